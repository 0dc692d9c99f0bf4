#pragma once

#include "qubitlab/audit.hpp"

#include <string>

namespace qubitlab {

/// Deterministic JSON rendering of an audit report: fixed key order,
/// floating-point numbers with 17 significant digits. Identical reports
/// serialize to identical bytes.
std::string report_to_json(const AuditReport& rep);

void write_report_json(const std::string& path, const AuditReport& rep);

} // namespace qubitlab
