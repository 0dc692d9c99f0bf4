#pragma once

#include "qubitlab/dynamics.hpp"
#include "qubitlab/numerics.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace qubitlab {

/// Complex-valued scalar function of one real coordinate. Missing analytic
/// derivatives fall back to central differences (1e-6 first, 1e-4 second).
struct ScalarField {
    std::function<Cplx(double)> value;
    std::function<Cplx(double)> deriv;   // optional
    std::function<Cplx(double)> deriv2;  // optional

    Cplx operator()(double x) const { return value(x); }
    Cplx d1(double x) const;
    Cplx d2(double x) const;
};

ScalarField constant_field(Cplx c);

enum class Chart { ActionAngle, Spherical, Barred };
enum class SignatureHint { Riemannian, Lorentzian, Complex };

/// ds^2 = f dx1^2 + 2 g dx1 dx2 + h dx2^2 with components depending on the
/// first coordinate only. Complex arithmetic is the default scalar field;
/// real Riemannian/Lorentzian metrics are special cases.
struct MetricComponents {
    Chart chart = Chart::ActionAngle;
    ScalarField f, g, h;
    SignatureHint hint = SignatureHint::Complex;
    Cplx det(double x1) const;  // f h - g^2
};

/// The six independent Levi-Civita coefficients at a point; lower-index
/// symmetry is structural. Order: G^1_11, G^1_12, G^1_22, G^2_11, G^2_12, G^2_22.
struct ChristoffelValues {
    Cplx g111, g112, g122, g211, g212, g222;
    std::array<Cplx, 6> as_array() const { return {g111, g112, g122, g211, g212, g222}; }
};

inline constexpr const char* kChristoffelNames[6] = {"G1_11", "G1_12", "G1_22",
                                                     "G2_11", "G2_12", "G2_22"};

// Canned metrics.
MetricComponents flat_cylinder_metric();          // dI^2 + dPhi^2
MetricComponents flat_cylinder_spherical_chart(); // sin^2(th) dth^2 + dPhi^2
MetricComponents round_sphere_metric();           // dth^2 + sin^2(th) dPhi^2
MetricComponents lorentz_mz_metric();             // dPhi^2 - dI^2
MetricComponents barred_metric(ScalarField h);    // 2 dIbar dPhibar + h dPhibar^2

/// The closed-form candidate metric for the transverse-field manifolds in
/// action-angle coordinates, with principal square roots:
/// f = -(1+I^2)/(2I(1-I^2)), g = sqrt((1+I^2)/(I(1-I^2)(I^2-1))), h = sqrt(I^2-1)/I.
MetricComponents transverse_candidate_metric();

struct MetricSample {
    Cplx f, g, h;
};
/// Pointwise values of the transverse candidate metric.
MetricSample candidate_metric_sample(double I);

/// Levi-Civita coefficients of a metric depending on the first coordinate:
/// G^1_11 = (h f'/2 - g g')/det   G^2_11 = (f g' - g f'/2)/det
/// G^1_12 = -g h'/(2 det)         G^2_12 = f h'/(2 det)
/// G^1_22 = -h h'/(2 det)         G^2_22 = g h'/(2 det)
/// Throws on |det| <= 1e-12.
ChristoffelValues christoffel_from_metric(const MetricComponents& m, double x1);

/// Closed-form connection matching the transverse-field qubit dynamics in
/// action-angle coordinates. Nonzero components:
/// G^1_11 = I/(1-I^2), G^1_22 = (1-I^2)/I, G^2_12 = (1/(2I)) (I^2+1)/(I^2-1).
/// Throws within 1e-9 of I in {-1, 0, 1}.
ChristoffelValues action_angle_connection(double I);

/// Residuals of the three ODEs forcing (f, g, h) to reproduce the
/// action-angle connection as Levi-Civita coefficients:
/// r1 = f'/(2f) + g'/g - I/(1-I^2)
/// r2 = -h'/(2f) - (1-I^2)/I
/// r3 = h'/(2h) - (1/(2I)) (I^2+1)/(I^2-1).
struct LeviCivitaOdeResiduals {
    Cplx r1, r2, r3;
};
LeviCivitaOdeResiduals levi_civita_ode_residuals(const ScalarField& f,
                                                 const ScalarField& g,
                                                 const ScalarField& h, double I);

/// Extra compatibility condition of the dissipative fit, evaluated on the
/// transverse candidate metric:
/// r4 = g'/f + h'/(2g) + gamma (I^2+1)/(I(I^2-1)).
Cplx dissipative_ode_residual(double gamma, double I);

/// Componentwise deviation of the metric's Levi-Civita coefficients from a
/// target connection over a grid. Degenerate points are flagged and kept.
struct DeviationRow {
    double x1 = 0.0;
    std::array<Cplx, 6> dev{};
    bool degenerate = false;
};
std::vector<DeviationRow> levi_civita_audit(
    const MetricComponents& m, const std::function<ChristoffelValues(double)>& target,
    const std::vector<double>& grid);

/// Quadrature chart change to null-offset form:
/// Ibar = int sqrt(-det) dI, phi-shift = int (g - sqrt(-det))/h dI from I0.
/// Real Lorentzian inputs (det < 0) give real outputs.
struct BarredPoint {
    Cplx Ibar;
    Cplx phi_shift;
};
BarredPoint barred_transform(const MetricComponents& m, double I0, double I,
                             double rel_tol = 1e-10);

/// Scalar curvature of 2 dIbar dPhibar + h(Ibar) dPhibar^2, which is h''.
Cplx scalar_curvature_barred(const ScalarField& h, double Ibar);

/// Scalar curvature assembled from the finite-difference Riemann tensor of
/// the full Levi-Civita connection (independent cross-check).
Cplx scalar_curvature_numeric(const MetricComponents& m, double x1, double step = 1e-4);

struct GeodesicState {
    double x1, x2;  // position
    double v1, v2;  // velocity
};

/// A connection plus an optional singular-set predicate used as the
/// integration guard (returns a non-empty abort reason) and an optional
/// step cap that keeps stages resolved near coefficient poles the solution
/// crosses transversally.
struct Connection {
    std::function<ChristoffelValues(double)> coeffs;
    std::function<std::string(double x1, double v1)> blocked;
    std::function<double(double x1, double v1)> step_limit;
};

Connection zero_connection();
/// The transverse-field qubit connection; blocked within 1e-6 of |I| = 1 and
/// when stalled at the I = 0 pole (the pole is crossed transversally).
Connection action_angle_qubit_connection();
/// G^1_11 = cot(theta); blocked within 1e-6 of theta in {0, pi}.
Connection cot_theta_connection();
/// Levi-Civita connection of a metric; blocked on |det| <= 1e-12 and must be
/// real-valued on the trajectory (imaginary parts beyond 1e-9 abort).
Connection connection_from_metric(const MetricComponents& m);

/// Integrates x'' + G(x) x' x' = 0 with the adaptive integrator, sampled
/// every dt. The I/phi columns hold (x1, x2).
Trajectory geodesic_integrate(const Connection& c, const GeodesicState& s0, double dt,
                              double t_final, const EvolveOptions& opt = {});

/// Quadratic form q = f v1^2 + 2 g v1 v2 + h v2^2 of a real metric at x1,
/// classified with null threshold |q| <= 1e-12.
enum class CausalClass { PositiveNorm, Null, NegativeNorm };
struct CausalResult {
    CausalClass cls;
    double q;
};
CausalResult causal_character(const MetricComponents& m, double v1, double v2, double x1);

const char* causal_class_name(CausalClass c);

} // namespace qubitlab
