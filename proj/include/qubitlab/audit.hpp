#pragma once

#include "qubitlab/dynamics.hpp"
#include "qubitlab/geometry.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qubitlab {

/// One entry of a check's input record (number or string, insertion-ordered).
struct InputValue {
    std::string key;
    bool is_number = true;
    double num = 0.0;
    std::string str;
};

struct CheckResult {
    enum class Verdict { Pass, Fail, Informational };

    std::string check_id;
    std::vector<InputValue> inputs;
    double residual = 0.0;
    double tolerance = 0.0;  // ignored for informational results
    Verdict verdict = Verdict::Fail;
    std::string notes;

    void in(const std::string& key, double v);
    void in(const std::string& key, const std::string& v);
    /// Sets verdict from residual <= tolerance.
    void judge();
};

struct AuditReport {
    ConventionParams convention;
    double calibration_sup_distance = 0.0;
    std::vector<CheckResult> results;
    std::uint64_t seed = 0;
};

struct AuditConfig {
    std::uint64_t seed = 42;
    std::vector<double> gamma_grid = {0.01, 0.1};
    /// Check ids or prefixes to run; empty runs everything.
    std::vector<std::string> checks;
    /// When set, grid/deviation/curvature tables are written here as CSV.
    std::string tables_dir;
};

/// Pins the classical-vs-quantum clock convention by running the exact
/// sigma_z propagator against the classical flow over
/// time_factor in {1/2, 1, 2} x sign in {-1, +1}. Exactly one candidate must
/// match with sup-distance <= 1e-10; otherwise throws with the full
/// distance table.
ConventionParams calibrate_convention(double* sup_distance = nullptr);

/// Dynamics trajectory vs geodesic of the action-angle connection started
/// tangent to the flow (initial velocity from the canonical equations).
/// Requires az = 0. Singularity aborts downgrade the result to informational.
CheckResult check_geodesic_equivalence(const FieldParams& a, const ActionAnglePoint& s0,
                                       double t_final);

/// Least-squares fit of the exact acceleration field at fixed p against a
/// velocity-quadratic (geodesic) ansatz over n_samples unit-circle
/// velocities. With gamma > 0 the dissipative terms are included and both
/// published variants of the axial friction term are reported.
CheckResult fit_connection_obstruction(const FieldParams& a, const ActionAnglePoint& p,
                                       int n_samples, double gamma = 0.0);

/// Axial (az-only) identities: straight line for gamma = 0, the helix
/// invariant I + gamma*phi for gamma > 0, and the spherical-chart
/// second-order residuals. Residual is normalized per part tolerance
/// (pass when every part is within its own tolerance); raw values are in
/// the inputs.
CheckResult check_axial_cases(double az, double gamma);

/// Runs the selected checks (all by default) in canonical order.
/// Individual check failures never abort the suite.
AuditReport run_full_audit(const AuditConfig& cfg);

/// Canonical check ids in report order.
std::vector<std::string> audit_check_ids();

/// True when every pass/fail check passed (informational results ignored).
bool audit_all_passed(const AuditReport& rep);

} // namespace qubitlab
