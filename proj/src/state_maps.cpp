#include "qubitlab/state_maps.hpp"

#include "qubitlab/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qubitlab {

namespace {

void require_normalized(const QubitAmplitudes& s, const char* where) {
    double dev = std::abs(s.norm2() - 1.0);
    if (!(dev <= kNormTol))
        throw std::invalid_argument(std::string(where) +
                                    ": state not normalized, |norm^2 - 1| = " +
                                    std::to_string(dev));
}

} // namespace

double BlochVector::norm() const {
    return std::sqrt(x * x + y * y + z * z);
}

BlochVector hopf_map(const QubitAmplitudes& s) {
    require_normalized(s, "hopf_map");
    Cplx cross = std::conj(s.a1) * s.a2;
    return {2.0 * cross.real(), 2.0 * cross.imag(), std::norm(s.a1) - std::norm(s.a2)};
}

ActionAnglePoint to_action_angle(const QubitAmplitudes& s) {
    require_normalized(s, "to_action_angle");
    double m1 = std::abs(s.a1);
    double m2 = std::abs(s.a2);
    if (m1 <= kPoleAmplitude)
        throw std::domain_error("to_action_angle: pole state, arg(a1) undefined");
    if (m2 <= kPoleAmplitude)
        throw std::domain_error("to_action_angle: pole state, arg(a2) undefined");
    double I = std::norm(s.a1) - std::norm(s.a2);
    double phi = wrap_angle(std::arg(s.a1) - std::arg(s.a2));
    return {I, phi};
}

QubitAmplitudes from_action_angle(const ActionAnglePoint& p) {
    if (!(std::abs(p.I) < 1.0))
        throw std::domain_error("from_action_angle: |I| must be < 1, got I = " +
                                std::to_string(p.I));
    double m1 = std::sqrt(0.5 * (1.0 + p.I));
    double m2 = std::sqrt(0.5 * (1.0 - p.I));
    return {std::polar(m1, p.phi), Cplx(m2, 0.0)};
}

std::pair<double, double> spherical_from_action(const ActionAnglePoint& p) {
    if (!(std::abs(p.I) < 1.0))
        throw std::domain_error("spherical_from_action: |I| must be < 1, got I = " +
                                std::to_string(p.I));
    return {std::acos(p.I), p.phi};
}

} // namespace qubitlab
