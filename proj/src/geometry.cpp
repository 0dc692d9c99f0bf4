#include "qubitlab/geometry.hpp"

#include "qubitlab/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qubitlab {

namespace {

constexpr double kFdStep1 = 1e-6;
constexpr double kFdStep2 = 1e-4;
constexpr double kDetTol = 1e-12;

void require_nonsingular_I(double I, const char* where) {
    if (std::abs(I) <= 1e-9 || std::abs(std::abs(I) - 1.0) <= 1e-9)
        throw std::domain_error(std::string(where) +
                                ": I too close to the singular set {-1, 0, 1}");
}

} // namespace

Cplx ScalarField::d1(double x) const {
    if (deriv)
        return deriv(x);
    return (value(x + kFdStep1) - value(x - kFdStep1)) / (2.0 * kFdStep1);
}

Cplx ScalarField::d2(double x) const {
    if (deriv2)
        return deriv2(x);
    if (deriv)
        return (deriv(x + kFdStep2) - deriv(x - kFdStep2)) / (2.0 * kFdStep2);
    return (value(x + kFdStep2) - 2.0 * value(x) + value(x - kFdStep2)) /
           (kFdStep2 * kFdStep2);
}

ScalarField constant_field(Cplx c) {
    return {[c](double) { return c; }, [](double) { return Cplx(0.0); },
            [](double) { return Cplx(0.0); }};
}

Cplx MetricComponents::det(double x1) const {
    Cplx gv = g(x1);
    return f(x1) * h(x1) - gv * gv;
}

MetricComponents flat_cylinder_metric() {
    return {Chart::ActionAngle, constant_field(1.0), constant_field(0.0),
            constant_field(1.0), SignatureHint::Riemannian};
}

MetricComponents flat_cylinder_spherical_chart() {
    ScalarField f{[](double th) { return Cplx(std::sin(th) * std::sin(th)); },
                  [](double th) { return Cplx(std::sin(2.0 * th)); },
                  [](double th) { return Cplx(2.0 * std::cos(2.0 * th)); }};
    return {Chart::Spherical, f, constant_field(0.0), constant_field(1.0),
            SignatureHint::Riemannian};
}

MetricComponents round_sphere_metric() {
    ScalarField h{[](double th) { return Cplx(std::sin(th) * std::sin(th)); },
                  [](double th) { return Cplx(std::sin(2.0 * th)); },
                  [](double th) { return Cplx(2.0 * std::cos(2.0 * th)); }};
    return {Chart::Spherical, constant_field(1.0), constant_field(0.0), h,
            SignatureHint::Riemannian};
}

MetricComponents lorentz_mz_metric() {
    return {Chart::ActionAngle, constant_field(-1.0), constant_field(0.0),
            constant_field(1.0), SignatureHint::Lorentzian};
}

MetricComponents barred_metric(ScalarField h) {
    return {Chart::Barred, constant_field(0.0), constant_field(1.0), std::move(h),
            SignatureHint::Complex};
}

namespace {

// Closed-form derivatives of the transverse candidate components.
Cplx cand_f(double I) {
    return Cplx(-(1.0 + I * I) / (2.0 * I * (1.0 - I * I)));
}
Cplx cand_df(double I) {
    double u = 1.0 + I * I;
    double v = 2.0 * I * (1.0 - I * I);
    double vp = 2.0 - 6.0 * I * I;
    return Cplx(-(2.0 * I * v - u * vp) / (v * v));
}
Cplx cand_w(double I) {  // g^2
    double q = I * (1.0 - I * I) * (1.0 - I * I);
    return Cplx(-(1.0 + I * I) / q);
}
Cplx cand_dw(double I) {
    double u = 1.0 + I * I;
    double om = 1.0 - I * I;
    double q = I * om * om;
    double qp = om * (1.0 - 5.0 * I * I);
    return Cplx(-(2.0 * I * q - u * qp) / (q * q));
}
Cplx cand_g(double I) {
    return std::sqrt(cand_w(I));
}
Cplx cand_dg(double I) {
    return cand_dw(I) / (2.0 * cand_g(I));
}
Cplx cand_h(double I) {
    return std::sqrt(Cplx(I * I - 1.0)) / I;
}
Cplx cand_dh(double I) {
    return 1.0 / (I * I * std::sqrt(Cplx(I * I - 1.0)));
}

} // namespace

MetricComponents transverse_candidate_metric() {
    MetricComponents m;
    m.chart = Chart::ActionAngle;
    m.hint = SignatureHint::Complex;
    m.f = {[](double I) { return cand_f(I); }, [](double I) { return cand_df(I); }, {}};
    m.g = {[](double I) { return cand_g(I); }, [](double I) { return cand_dg(I); }, {}};
    m.h = {[](double I) { return cand_h(I); }, [](double I) { return cand_dh(I); }, {}};
    return m;
}

MetricSample candidate_metric_sample(double I) {
    require_nonsingular_I(I, "candidate_metric_sample");
    return {cand_f(I), cand_g(I), cand_h(I)};
}

ChristoffelValues christoffel_from_metric(const MetricComponents& m, double x1) {
    Cplx f = m.f(x1), g = m.g(x1), h = m.h(x1);
    Cplx det = f * h - g * g;
    if (std::abs(det) <= kDetTol)
        throw std::domain_error("christoffel_from_metric: degenerate metric, |det| = " +
                                std::to_string(std::abs(det)));
    Cplx df = m.f.d1(x1), dg = m.g.d1(x1), dh = m.h.d1(x1);
    ChristoffelValues c;
    c.g111 = (h * df * 0.5 - g * dg) / det;
    c.g211 = (f * dg - g * df * 0.5) / det;
    c.g112 = -g * dh / (2.0 * det);
    c.g212 = f * dh / (2.0 * det);
    c.g122 = -h * dh / (2.0 * det);
    c.g222 = g * dh / (2.0 * det);
    return c;
}

ChristoffelValues action_angle_connection(double I) {
    require_nonsingular_I(I, "action_angle_connection");
    double om = 1.0 - I * I;
    ChristoffelValues c;
    c.g111 = Cplx(I / om);
    c.g122 = Cplx(om / I);
    c.g212 = Cplx((I * I + 1.0) / (2.0 * I * (I * I - 1.0)));
    c.g112 = c.g211 = c.g222 = Cplx(0.0);
    return c;
}

LeviCivitaOdeResiduals levi_civita_ode_residuals(const ScalarField& f,
                                                 const ScalarField& g,
                                                 const ScalarField& h, double I) {
    require_nonsingular_I(I, "levi_civita_ode_residuals");
    Cplx fv = f(I), gv = g(I), hv = h(I);
    if (std::abs(fv) <= kDetTol || std::abs(gv) <= kDetTol || std::abs(hv) <= kDetTol)
        throw std::domain_error("levi_civita_ode_residuals: zero denominator");
    double om = 1.0 - I * I;
    LeviCivitaOdeResiduals r;
    r.r1 = f.d1(I) / (2.0 * fv) + g.d1(I) / gv - I / om;
    r.r2 = -h.d1(I) / (2.0 * fv) - om / I;
    r.r3 = h.d1(I) / (2.0 * hv) - (I * I + 1.0) / (2.0 * I * (I * I - 1.0));
    return r;
}

Cplx dissipative_ode_residual(double gamma, double I) {
    require_nonsingular_I(I, "dissipative_ode_residual");
    return cand_dg(I) / cand_f(I) + cand_dh(I) / (2.0 * cand_g(I)) +
           gamma * (I * I + 1.0) / (I * (I * I - 1.0));
}

std::vector<DeviationRow> levi_civita_audit(
    const MetricComponents& m, const std::function<ChristoffelValues(double)>& target,
    const std::vector<double>& grid) {
    std::vector<DeviationRow> rows;
    rows.reserve(grid.size());
    for (double x : grid) {
        DeviationRow row;
        row.x1 = x;
        try {
            auto got = christoffel_from_metric(m, x).as_array();
            auto want = target(x).as_array();
            for (int i = 0; i < 6; ++i)
                row.dev[i] = got[i] - want[i];
        } catch (const std::exception&) {
            row.degenerate = true;
        }
        rows.push_back(row);
    }
    return rows;
}

BarredPoint barred_transform(const MetricComponents& m, double I0, double I,
                             double rel_tol) {
    double lo = std::min(I0, I), hi = std::max(I0, I);
    for (int k = 0; k <= 64; ++k) {
        double x = lo + (hi - lo) * k / 64.0;
        if (std::abs(m.h(x)) <= kDetTol)
            throw std::domain_error("barred_transform: h vanishes on the path");
    }
    auto root = [&m](double x) { return std::sqrt(-m.det(x)); };
    BarredPoint p;
    p.Ibar = integrate_gk([&](double x) { return root(x); }, I0, I, rel_tol);
    p.phi_shift = integrate_gk([&](double x) { return (m.g(x) - root(x)) / m.h(x); },
                               I0, I, rel_tol);
    return p;
}

Cplx scalar_curvature_barred(const ScalarField& h, double Ibar) {
    return h.d2(Ibar);
}

Cplx scalar_curvature_numeric(const MetricComponents& m, double x1, double step) {
    auto gamma_at = [&m](double x) {
        auto c = christoffel_from_metric(m, x);
        // G[a][b][c] with upper index a; symmetric in (b, c).
        std::array<std::array<std::array<Cplx, 2>, 2>, 2> G{};
        G[0][0][0] = c.g111;
        G[0][0][1] = G[0][1][0] = c.g112;
        G[0][1][1] = c.g122;
        G[1][0][0] = c.g211;
        G[1][0][1] = G[1][1][0] = c.g212;
        G[1][1][1] = c.g222;
        return G;
    };
    auto G = gamma_at(x1);
    auto Gp = gamma_at(x1 + step);
    auto Gm = gamma_at(x1 - step);
    std::array<std::array<std::array<Cplx, 2>, 2>, 2> dG{};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                dG[a][b][c] = (Gp[a][b][c] - Gm[a][b][c]) / (2.0 * step);

    // R^r_{s mu nu} = d_mu G^r_{nu s} - d_nu G^r_{mu s}
    //                 + G^r_{mu l} G^l_{nu s} - G^r_{nu l} G^l_{mu s},
    // with d_2 = 0 for metrics depending on x1 only.
    auto riemann = [&](int r, int s, int mu, int nu) {
        Cplx val(0.0);
        if (mu == 0)
            val += dG[r][nu][s];
        if (nu == 0)
            val -= dG[r][mu][s];
        for (int l = 0; l < 2; ++l)
            val += G[r][mu][l] * G[l][nu][s] - G[r][nu][l] * G[l][mu][s];
        return val;
    };

    Cplx f = m.f(x1), g = m.g(x1), h = m.h(x1);
    Cplx det = f * h - g * g;
    if (std::abs(det) <= kDetTol)
        throw std::domain_error("scalar_curvature_numeric: degenerate metric");
    Cplx inv[2][2] = {{h / det, -g / det}, {-g / det, f / det}};

    Cplx R(0.0);
    for (int s = 0; s < 2; ++s)
        for (int nu = 0; nu < 2; ++nu) {
            Cplx ricci(0.0);
            for (int mu = 0; mu < 2; ++mu)
                ricci += riemann(mu, s, mu, nu);
            R += inv[s][nu] * ricci;
        }
    return R;
}

Connection zero_connection() {
    return {[](double) { return ChristoffelValues{}; }, {}};
}

Connection action_angle_qubit_connection() {
    Connection c;
    c.coeffs = [](double I) {
        // Evaluated raw: the I = 0 pole is crossed transversally by the
        // dynamics-matched geodesics, where G^1_22 * v2^2 stays finite.
        double om = 1.0 - I * I;
        ChristoffelValues v;
        v.g111 = Cplx(I / om);
        v.g122 = Cplx(om / I);
        v.g212 = Cplx((I * I + 1.0) / (2.0 * I * (I * I - 1.0)));
        return v;
    };
    c.blocked = [](double I, double v1) -> std::string {
        if (1.0 - std::abs(I) <= 1e-6)
            return "singularity: |I| within 1e-6 of 1";
        if (std::abs(I) <= 1e-9 && std::abs(v1) <= 1e-6)
            return "singularity: stalled at the I = 0 connection pole";
        return {};
    };
    // The 1/I coefficients are crossed transversally; keep stages resolved
    // so the 0/0 products stay accurate through the crossing.
    c.step_limit = [](double I, double v1) {
        return std::max(1e-4, 0.05 * std::abs(I) / std::max(1.0, std::abs(v1)));
    };
    return c;
}

Connection cot_theta_connection() {
    Connection c;
    c.coeffs = [](double th) {
        ChristoffelValues v;
        v.g111 = Cplx(1.0 / std::tan(th));
        return v;
    };
    c.blocked = [](double th, double) -> std::string {
        if (th <= 1e-6 || th >= kPi - 1e-6)
            return "singularity: theta within 1e-6 of {0, pi}";
        return {};
    };
    return c;
}

Connection connection_from_metric(const MetricComponents& m) {
    Connection c;
    c.coeffs = [m](double x1) { return christoffel_from_metric(m, x1); };
    c.blocked = [m](double x1, double) -> std::string {
        if (std::abs(m.det(x1)) <= kDetTol)
            return "degenerate metric on trajectory";
        return {};
    };
    return c;
}

Trajectory geodesic_integrate(const Connection& c, const GeodesicState& s0, double dt,
                              double t_final, const EvolveOptions& opt) {
    if (!(dt > 0.0) || !(t_final >= 0.0))
        throw std::invalid_argument("geodesic_integrate: need dt > 0 and t_final >= 0");
    {
        auto g0 = c.coeffs(s0.x1).as_array();
        for (const Cplx& v : g0)
            if (std::abs(v.imag()) > 1e-9)
                throw std::invalid_argument(
                    "geodesic_integrate: connection is not real-valued at x1 = " +
                    std::to_string(s0.x1));
    }

    using Solver = Dopri5<4>;
    Solver::Rhs rhs = [&c](double, const Solver::State& y, Solver::State& f) {
        ChristoffelValues G;
        try {
            G = c.coeffs(y[0]);
        } catch (const std::exception&) {
            f = {std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0, 0.0};
            return;
        }
        double v1 = y[2], v2 = y[3];
        double a1 = -(G.g111.real() * v1 * v1 + 2.0 * G.g112.real() * v1 * v2 +
                      G.g122.real() * v2 * v2);
        double a2 = -(G.g211.real() * v1 * v1 + 2.0 * G.g212.real() * v1 * v2 +
                      G.g222.real() * v2 * v2);
        f[0] = v1;
        f[1] = v2;
        f[2] = a1;
        f[3] = a2;
    };
    Solver::Guard guard = [&c](double, const Solver::State& y) -> std::string {
        for (double v : y)
            if (!std::isfinite(v))
                return "non-finite state";
        if (c.blocked)
            return c.blocked(y[0], y[2]);
        return {};
    };

    Trajectory tr;
    Solver::Sampler emit = [&tr](double t, const Solver::State& y) {
        tr.t.push_back(t);
        tr.I.push_back(y[0]);
        tr.phi.push_back(y[1]);
        tr.dI.push_back(y[2]);
        tr.dphi.push_back(y[3]);
    };

    OdeOptions oopt;
    oopt.abs_tol = opt.abs_tol;
    oopt.rel_tol = opt.rel_tol;
    oopt.max_step = std::min(opt.max_step, 5.0 * dt);
    Solver::StepLimit limiter;
    if (c.step_limit)
        limiter = [&c](double, const Solver::State& y) {
            return c.step_limit(y[0], y[2]);
        };
    auto res = Solver::integrate(rhs, 0.0, {s0.x1, s0.x2, s0.v1, s0.v2}, t_final, dt,
                                 emit, oopt, guard, limiter);
    tr.completed = (res.status == OdeStatus::Completed);
    tr.abort_reason = res.abort_reason;
    return tr;
}

CausalResult causal_character(const MetricComponents& m, double v1, double v2,
                              double x1) {
    Cplx f = m.f(x1), g = m.g(x1), h = m.h(x1);
    if (std::abs(f.imag()) > 1e-12 || std::abs(g.imag()) > 1e-12 ||
        std::abs(h.imag()) > 1e-12)
        throw std::invalid_argument(
            "causal_character: unsupported signature (complex metric values)");
    double q = f.real() * v1 * v1 + 2.0 * g.real() * v1 * v2 + h.real() * v2 * v2;
    CausalClass cls = CausalClass::Null;
    if (q > 1e-12)
        cls = CausalClass::PositiveNorm;
    else if (q < -1e-12)
        cls = CausalClass::NegativeNorm;
    return {cls, q};
}

const char* causal_class_name(CausalClass c) {
    switch (c) {
        case CausalClass::PositiveNorm: return "positive-norm";
        case CausalClass::Null: return "null";
        case CausalClass::NegativeNorm: return "negative-norm";
    }
    return "unknown";
}

} // namespace qubitlab
