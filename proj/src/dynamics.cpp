#include "qubitlab/dynamics.hpp"

#include "qubitlab/numerics.hpp"
#include "qubitlab/ode.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qubitlab {

namespace {

constexpr double kSingularBandInit = 1e-3;  // refused at start
constexpr double kSingularBandRun = 1e-6;   // aborts during integration

// Raw canonical right-hand side without domain checks; transverse terms are
// evaluated lazily so the pure-az case stays regular at |I| = 1.
inline void eq_rhs_raw(double I, double phi, const FieldParams& a, double& dI,
                       double& dphi) {
    dI = 0.0;
    dphi = 2.0 * a.az;
    if (a.has_transverse()) {
        double root = std::sqrt(1.0 - I * I);  // NaN outside |I| <= 1 rejects the step
        double s = a.ax * std::sin(phi) - a.ay * std::cos(phi);
        double c = a.ay * std::sin(phi) + a.ax * std::cos(phi);
        dI = 2.0 * root * s;
        dphi += -2.0 * I / root * c;
    }
}

void validate_fields(const FieldParams& a) {
    if (!std::isfinite(a.ax) || !std::isfinite(a.ay) || !std::isfinite(a.az))
        throw std::invalid_argument("field coefficients must be finite");
}

std::string transverse_guard(double I, const FieldParams& a, double band) {
    if (a.has_transverse() && 1.0 - std::abs(I) <= band)
        return "singularity: |I| within " + std::to_string(band) +
               " of 1 with transverse fields (I = " + std::to_string(I) + ")";
    return {};
}

} // namespace

double FieldParams::magnitude() const {
    return std::sqrt(ax * ax + ay * ay + az * az);
}

void DissipationParams::validate() const {
    if (!(gamma >= 0.0))
        throw std::invalid_argument("gamma must be >= 0");
    if (!(noise_sigma >= 0.0))
        throw std::invalid_argument("noise_sigma must be >= 0");
    if (!(noise_tau > 0.0))
        throw std::invalid_argument("noise_tau must be > 0");
    if (!std::isfinite(friction_factor))
        throw std::invalid_argument("friction_factor must be finite");
}

FieldParams ConventionParams::scale_fields(const FieldParams& a) const {
    return {time_factor * a.ax, time_factor * a.ay, time_factor * a.az};
}

Trajectory classical_equivalent(const ConventionParams& conv, const ActionAnglePoint& p0,
                                const FieldParams& a, double dt, double t_final) {
    double s = conv.sign;
    Trajectory tr = evolve_classical({p0.I, s * p0.phi}, conv.scale_fields(a), dt,
                                     t_final);
    if (conv.sign < 0) {
        for (double& v : tr.phi)
            v = -v;
        for (double& v : tr.dphi)
            v = -v;
    }
    return tr;
}

double h0_value(const ActionAnglePoint& p, const FieldParams& a) {
    validate_fields(a);
    if (!(std::abs(p.I) <= 1.0))
        throw std::domain_error("h0_value: |I| must be <= 1");
    double root = std::sqrt(std::max(0.0, 1.0 - p.I * p.I));
    return root * (2.0 * a.ax * std::cos(p.phi) + 2.0 * a.ay * std::sin(p.phi)) +
           2.0 * a.az * p.I;
}

std::pair<double, double> hamilton_rhs(const ActionAnglePoint& p, const FieldParams& a) {
    validate_fields(a);
    if (!(std::abs(p.I) <= 1.0))
        throw std::domain_error("hamilton_rhs: |I| must be <= 1");
    std::string reason = transverse_guard(p.I, a, kSingularBandRun);
    if (!reason.empty())
        throw std::domain_error("hamilton_rhs: " + reason);
    double dI, dphi;
    eq_rhs_raw(p.I, p.phi, a, dI, dphi);
    return {dI, dphi};
}

std::pair<double, double> dissipative_rhs(const ActionAnglePoint& p, const FieldParams& a,
                                          const DissipationParams& d, double xi) {
    d.validate();
    auto [dI, dphi] = hamilton_rhs(p, a);
    dI += -d.friction_factor * d.gamma * dphi + xi;
    return {dI, dphi};
}

double ht_value(const ActionAnglePoint& p, double dphi, const FieldParams& a,
                const DissipationParams& d, double xi) {
    return h0_value(p, a) + 2.0 * d.gamma * p.phi * dphi - xi * p.phi;
}

namespace {

Trajectory run_adaptive_flow(const ActionAnglePoint& p0, const FieldParams& a,
                             double friction, double dt, double t_final,
                             const EvolveOptions& opt, bool with_xi_column) {
    validate_fields(a);
    if (!(std::abs(p0.I) < 1.0))
        throw std::domain_error("evolve: |I0| must be < 1");
    if (a.has_transverse() && 1.0 - std::abs(p0.I) <= kSingularBandInit)
        throw std::domain_error("evolve: initial condition within 1e-3 of |I| = 1 "
                                "with transverse fields");
    if (!(dt > 0.0) || !(t_final >= 0.0))
        throw std::invalid_argument("evolve: need dt > 0 and t_final >= 0");

    using Solver = Dopri5<2>;
    Solver::Rhs rhs = [&a, friction](double, const Solver::State& y, Solver::State& f) {
        double dI, dphi;
        eq_rhs_raw(y[0], y[1], a, dI, dphi);
        f[0] = dI - friction * dphi;
        f[1] = dphi;
    };
    Solver::Guard guard = [&a](double, const Solver::State& y) -> std::string {
        if (!std::isfinite(y[0]) || !std::isfinite(y[1]))
            return "non-finite state";
        return transverse_guard(y[0], a, kSingularBandRun);
    };

    Trajectory tr;
    Solver::Sampler emit = [&](double t, const Solver::State& y) {
        double dI, dphi;
        eq_rhs_raw(y[0], y[1], a, dI, dphi);
        tr.t.push_back(t);
        tr.I.push_back(y[0]);
        tr.phi.push_back(y[1]);
        tr.dI.push_back(dI - friction * dphi);
        tr.dphi.push_back(dphi);
    };

    OdeOptions oopt;
    oopt.abs_tol = opt.abs_tol;
    oopt.rel_tol = opt.rel_tol;
    oopt.max_step = std::min(opt.max_step, 5.0 * dt);
    auto res = Solver::integrate(rhs, 0.0, {p0.I, p0.phi}, t_final, dt, emit, oopt, guard);
    tr.completed = (res.status == OdeStatus::Completed);
    tr.abort_reason = res.abort_reason;
    if (with_xi_column)
        tr.xi.assign(tr.t.size(), 0.0);
    return tr;
}

} // namespace

Trajectory evolve_classical(const ActionAnglePoint& p0, const FieldParams& a, double dt,
                            double t_final, const EvolveOptions& opt) {
    return run_adaptive_flow(p0, a, 0.0, dt, t_final, opt, false);
}

Trajectory evolve_dissipative(const ActionAnglePoint& p0, const FieldParams& a,
                              const DissipationParams& d, double dt, double t_final,
                              const EvolveOptions& opt) {
    d.validate();
    if (d.noise_sigma == 0.0) {
        // xi(0) = 0 decays to itself: the flow is deterministic and smooth,
        // so reuse the adaptive integrator.
        return run_adaptive_flow(p0, a, d.friction_factor * d.gamma, dt, t_final, opt,
                                 true);
    }

    validate_fields(a);
    if (!(std::abs(p0.I) < 1.0))
        throw std::domain_error("evolve: |I0| must be < 1");
    if (a.has_transverse() && 1.0 - std::abs(p0.I) <= kSingularBandInit)
        throw std::domain_error("evolve: initial condition within 1e-3 of |I| = 1 "
                                "with transverse fields");
    if (!(dt > 0.0) || !(t_final >= 0.0))
        throw std::invalid_argument("evolve: need dt > 0 and t_final >= 0");

    std::mt19937_64 rng(d.seed);
    const double friction = d.friction_factor * d.gamma;
    double I = p0.I, phi = p0.phi, xi = 0.0;

    Trajectory tr;
    auto push = [&](double t) {
        double dI, dphi;
        eq_rhs_raw(I, phi, a, dI, dphi);
        tr.t.push_back(t);
        tr.I.push_back(I);
        tr.phi.push_back(phi);
        tr.dI.push_back(dI - friction * dphi + xi);
        tr.dphi.push_back(dphi);
        tr.xi.push_back(xi);
    };
    push(0.0);

    auto rk4 = [&](double h) {
        auto f = [&](double yI, double yphi, double& dI, double& dphi) {
            eq_rhs_raw(yI, yphi, a, dI, dphi);
            dI += -friction * dphi + xi;  // noise held constant over the step
        };
        double k1I, k1p, k2I, k2p, k3I, k3p, k4I, k4p;
        f(I, phi, k1I, k1p);
        f(I + 0.5 * h * k1I, phi + 0.5 * h * k1p, k2I, k2p);
        f(I + 0.5 * h * k2I, phi + 0.5 * h * k2p, k3I, k3p);
        f(I + h * k3I, phi + h * k3p, k4I, k4p);
        I += h / 6.0 * (k1I + 2 * k2I + 2 * k3I + k4I);
        phi += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
    };

    long n_steps = std::lround(t_final / dt);
    if (n_steps * dt < t_final - 1e-12 * (t_final + 1.0))
        ++n_steps;
    for (long k = 1; k <= n_steps; ++k) {
        double t_to = std::min(k * dt, t_final);
        rk4(t_to - tr.t.back());
        xi = ou_noise_step(xi, d, t_to - tr.t.back(), rng);
        if (!std::isfinite(I) || !std::isfinite(phi)) {
            tr.completed = false;
            tr.abort_reason = "non-finite state";
            return tr;
        }
        std::string reason = transverse_guard(I, a, kSingularBandRun);
        if (!reason.empty()) {
            tr.completed = false;
            tr.abort_reason = reason;
            return tr;
        }
        push(t_to);
    }
    return tr;
}

QubitAmplitudes quantum_propagator_step(const QubitAmplitudes& s, const FieldParams& a,
                                        double dt) {
    validate_fields(a);
    double mag = a.magnitude();
    if (mag == 0.0 || dt == 0.0)
        return s;
    double th = mag * dt;
    double cs = std::cos(th), sn = std::sin(th);
    double nx = a.ax / mag, ny = a.ay / mag, nz = a.az / mag;
    const Cplx mi(0.0, -1.0);
    Cplx a1 = cs * s.a1 + mi * sn * (nz * s.a1 + Cplx(nx, -ny) * s.a2);
    Cplx a2 = cs * s.a2 + mi * sn * (Cplx(nx, ny) * s.a1 - nz * s.a2);
    return {a1, a2};
}

QuantumTrajectory evolve_quantum(const QubitAmplitudes& s0, const FieldParams& a,
                                 double dt, double t_final) {
    if (!(dt > 0.0) || !(t_final >= 0.0))
        throw std::invalid_argument("evolve_quantum: need dt > 0 and t_final >= 0");
    if (std::abs(s0.norm2() - 1.0) > kNormTol)
        throw std::invalid_argument("evolve_quantum: state not normalized");
    QuantumTrajectory q;
    q.t.push_back(0.0);
    q.states.push_back(s0);
    long n_steps = std::lround(t_final / dt);
    if (n_steps * dt < t_final - 1e-12 * (t_final + 1.0))
        ++n_steps;
    for (long k = 1; k <= n_steps; ++k) {
        double t_to = std::min(k * dt, t_final);
        q.states.push_back(
            quantum_propagator_step(q.states.back(), a, t_to - q.t.back()));
        q.t.push_back(t_to);
    }
    return q;
}

Trajectory map_quantum_trajectory(const QuantumTrajectory& q, const FieldParams& a) {
    Trajectory tr;
    tr.t = q.t;
    tr.I.reserve(q.states.size());
    tr.phi.reserve(q.states.size());
    for (std::size_t k = 0; k < q.states.size(); ++k) {
        ActionAnglePoint p = to_action_angle(q.states[k]);  // throws at poles
        tr.I.push_back(p.I);
        tr.phi.push_back(p.phi);
    }
    unwrap_angles(tr.phi);
    // Velocities from the Bloch flow ds/dt = 2 a x s; phi = -atan2(y, x).
    for (std::size_t k = 0; k < q.states.size(); ++k) {
        BlochVector s = hopf_map(q.states[k]);
        double vx = 2.0 * (a.ay * s.z - a.az * s.y);
        double vy = 2.0 * (a.az * s.x - a.ax * s.z);
        double vz = 2.0 * (a.ax * s.y - a.ay * s.x);
        tr.dI.push_back(vz);
        double r2 = s.x * s.x + s.y * s.y;
        tr.dphi.push_back(-(s.x * vy - s.y * vx) / r2);
    }
    return tr;
}

double ou_noise_step(double xi, const DissipationParams& d, double dt,
                     std::mt19937_64& rng) {
    d.validate();
    if (!(dt > 0.0))
        throw std::invalid_argument("ou_noise_step: dt must be > 0");
    double decay = std::exp(-dt / d.noise_tau);
    if (d.noise_sigma == 0.0)
        return xi * decay;
    double amp = d.noise_sigma * std::sqrt(0.5 * d.noise_tau * (1.0 - decay * decay));
    std::normal_distribution<double> gauss(0.0, 1.0);
    return xi * decay + amp * gauss(rng);
}

SecondOrderResiduals second_order_residual(const Trajectory& traj, const FieldParams& a,
                                           double singular_band) {
    const std::size_t n = traj.size();
    if (n < 5)
        throw std::invalid_argument("second_order_residual: need at least 5 samples");
    if (traj.dI.size() != n || traj.dphi.size() != n)
        throw std::invalid_argument("second_order_residual: trajectory lacks velocities");
    double dt = traj.t[1] - traj.t[0];
    for (std::size_t k = 1; k < n; ++k)
        if (std::abs(traj.t[k] - traj.t[k - 1] - dt) > 1e-9 * dt)
            throw std::invalid_argument("second_order_residual: non-uniform sampling");

    std::vector<double> acc_I = deriv1_series(traj.dI, dt);
    std::vector<double> acc_phi = deriv1_series(traj.dphi, dt);

    SecondOrderResiduals out;
    out.t = traj.t;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.r_action.assign(n, nan);
    out.r_angle.assign(n, nan);
    out.skipped.assign(n, true);
    for (std::size_t k = 0; k < n; ++k) {
        double I = traj.I[k];
        bool edge = !std::isfinite(acc_I[k]);
        bool near_singular = std::abs(I) <= singular_band ||
                             1.0 - std::abs(I) <= singular_band;
        if (edge || near_singular) {
            ++out.n_skipped;
            continue;
        }
        double dI = traj.dI[k], dphi = traj.dphi[k];
        double om = 1.0 - I * I;
        double ra = acc_I[k] + I / om * dI * dI + om / I * dphi * (dphi - 2.0 * a.az);
        double rp = acc_phi[k] + dI * dphi * (I * I + 1.0) / (I * (I * I - 1.0)) +
                    2.0 * dI * a.az / (I * om);
        out.r_action[k] = ra;
        out.r_angle[k] = rp;
        out.skipped[k] = false;
        out.max_abs = std::max({out.max_abs, std::abs(ra), std::abs(rp)});
    }
    return out;
}

} // namespace qubitlab
