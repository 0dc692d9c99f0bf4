#pragma once

#include "qubitlab/state_maps.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace qubitlab {

/// Field coefficients of H = ax sx + ay sy + az sz (hbar = 1).
struct FieldParams {
    double ax = 0.0;
    double ay = 0.0;
    double az = 0.0;
    double magnitude() const;
    bool has_transverse() const { return ax != 0.0 || ay != 0.0; }
};

struct DissipationParams {
    double gamma = 0.0;            // friction constant, >= 0
    double friction_factor = 1.0;  // multiplies gamma*dphi in the dI equation
    double noise_sigma = 0.0;      // colored-noise strength, >= 0
    double noise_tau = 1.0;        // noise correlation time, > 0
    std::uint64_t seed = 0;
    void validate() const;
};

/// Clock/orientation convention pinned by the calibration audit.
/// time_factor scales the classical clock (the flow is linear in the fields,
/// so it is applied as a field scaling); sign = -1 means the classical flow
/// reproduces the quantum one only after reflecting the angle coordinate,
/// phi -> -phi (an orientation reversal of the chart).
struct ConventionParams {
    double time_factor = 1.0;  // in {1/2, 1, 2}
    int sign = 1;              // +1 or -1
    FieldParams scale_fields(const FieldParams& a) const;
};

/// Sampled evolution in action-angle coordinates. phi is unwrapped. For
/// geodesics in other charts the I/phi columns hold (x1, x2).
struct Trajectory {
    std::vector<double> t;
    std::vector<double> I;
    std::vector<double> phi;
    std::vector<double> dI;
    std::vector<double> dphi;
    std::vector<double> xi;  // noise samples; empty for noiseless runs
    bool completed = true;
    std::string abort_reason;
    std::size_t size() const { return t.size(); }
};

/// Classical Hamiltonian function
/// H0 = sqrt(1-I^2) (2 ax cos phi + 2 ay sin phi) + 2 az I.
double h0_value(const ActionAnglePoint& p, const FieldParams& a);

/// Canonical equations:
/// dI   = 2 sqrt(1-I^2) (ax sin phi - ay cos phi)
/// dphi = -2I/sqrt(1-I^2) (ay sin phi + ax cos phi) + 2 az.
std::pair<double, double> hamilton_rhs(const ActionAnglePoint& p, const FieldParams& a);

/// First-order dissipative flow: dphi as in the canonical equations,
/// dI = -dH0/dphi - friction_factor*gamma*dphi + xi.
std::pair<double, double> dissipative_rhs(const ActionAnglePoint& p, const FieldParams& a,
                                          const DissipationParams& d, double xi);

/// Effective energy H0 + 2 gamma phi dphi - xi phi (not conserved).
double ht_value(const ActionAnglePoint& p, double dphi, const FieldParams& a,
                const DissipationParams& d, double xi);

struct EvolveOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    /// Step cap; the effective cap is min(max_step, 5 * sample dt) so the
    /// cubic dense output stays well below the integrator tolerance on the
    /// sample grid.
    double max_step = 0.05;
};

/// Adaptive integration of the canonical flow, sampled every dt up to
/// t_final. Velocity columns hold the exact right-hand side at each sample.
/// Aborts (completed = false) if the trajectory enters the 1e-6 band around
/// |I| = 1 while transverse fields are present.
Trajectory evolve_classical(const ActionAnglePoint& p0, const FieldParams& a, double dt,
                            double t_final, const EvolveOptions& opt = {});

/// The classical trajectory that a pinned convention predicts for the
/// Schroedinger evolution: the canonical flow with scaled fields from the
/// reflected start, with the angle reflected back.
Trajectory classical_equivalent(const ConventionParams& conv, const ActionAnglePoint& p0,
                                const FieldParams& a, double dt, double t_final);

/// Dissipative/stochastic evolution. With noise_sigma = 0 the flow is
/// integrated adaptively (xi identically 0); with noise_sigma > 0 a
/// fixed-step scheme advances the deterministic part with RK4 over each dt
/// while the noise is held constant, then applies the exact
/// Ornstein-Uhlenbeck update. Deterministic for a fixed seed.
Trajectory evolve_dissipative(const ActionAnglePoint& p0, const FieldParams& a,
                              const DissipationParams& d, double dt, double t_final,
                              const EvolveOptions& opt = {});

/// Exact one-step unitary exp(-i (a . sigma) dt); identity when |a| = 0.
QubitAmplitudes quantum_propagator_step(const QubitAmplitudes& s, const FieldParams& a,
                                        double dt);

struct QuantumTrajectory {
    std::vector<double> t;
    std::vector<QubitAmplitudes> states;
};

/// Repeated exact propagator steps sampled every dt.
QuantumTrajectory evolve_quantum(const QubitAmplitudes& s0, const FieldParams& a,
                                 double dt, double t_final);

/// Action-angle image of a quantum trajectory: phi unwrapped by continuity,
/// velocities taken from the exact Bloch flow ds/dt = 2 a x s. Throws a pole
/// error if any sample has a vanishing amplitude.
Trajectory map_quantum_trajectory(const QuantumTrajectory& q, const FieldParams& a);

/// Exact Ornstein-Uhlenbeck update over dt:
/// xi' = xi e^{-dt/tau} + sigma sqrt(tau/2 (1 - e^{-2dt/tau})) N(0,1).
/// Stationary variance sigma^2 tau / 2. Draws nothing when sigma = 0.
double ou_noise_step(double xi, const DissipationParams& d, double dt,
                     std::mt19937_64& rng);

/// Residuals of the second-order form of the canonical equations, evaluated
/// per sample with fourth-order finite-difference accelerations. Samples
/// within singular_band of I in {-1, 0, 1} (and the two edge samples) are
/// skipped and flagged.
struct SecondOrderResiduals {
    std::vector<double> t;
    std::vector<double> r_action;  // NaN where skipped
    std::vector<double> r_angle;
    std::vector<bool> skipped;
    double max_abs = 0.0;  // over retained samples
    std::size_t n_skipped = 0;
};
SecondOrderResiduals second_order_residual(const Trajectory& traj, const FieldParams& a,
                                           double singular_band = 0.05);

} // namespace qubitlab
