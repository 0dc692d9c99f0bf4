#pragma once

#include <complex>
#include <utility>

namespace qubitlab {

using Cplx = std::complex<double>;

/// Normalized two-level state |psi> = a1|1> + a2|2> on S^3.
struct QubitAmplitudes {
    Cplx a1;
    Cplx a2;
    double norm2() const { return std::norm(a1) + std::norm(a2); }
};

/// Pauli expectation values; unit norm for pure states.
struct BlochVector {
    double x, y, z;
    double norm() const;
};

/// Action-angle coordinates of a qubit: I = |a1|^2 - |a2|^2 in (-1, 1) and
/// phi = arg a1 - arg a2. Trajectories keep phi unwrapped; wrapping to
/// (-pi, pi] happens only in comparisons and display.
struct ActionAnglePoint {
    double I;
    double phi;
};

/// Inputs whose norm deviates from 1 by more than this are rejected.
inline constexpr double kNormTol = 1e-9;
/// Below this amplitude magnitude the relative phase is treated as undefined.
inline constexpr double kPoleAmplitude = 1e-9;

/// Projection to the Bloch sphere:
/// (2 Re(conj(a1) a2), 2 Im(conj(a1) a2), |a1|^2 - |a2|^2).
BlochVector hopf_map(const QubitAmplitudes& s);

/// (I, phi) with phi reported in (-pi, pi]. Throws a pole error when either
/// amplitude is too small to carry a phase.
ActionAnglePoint to_action_angle(const QubitAmplitudes& s);

/// Inverse map with the gauge arg a2 = 0:
/// a1 = sqrt((1+I)/2) e^{i phi}, a2 = sqrt((1-I)/2).
QubitAmplitudes from_action_angle(const ActionAnglePoint& p);

/// (theta, phi) with theta = arccos(I) in (0, pi).
std::pair<double, double> spherical_from_action(const ActionAnglePoint& p);

} // namespace qubitlab
