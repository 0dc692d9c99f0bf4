#include "qubitlab/report.hpp"

#include "qubitlab/csv.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>

namespace qubitlab {

namespace {

std::string json_number(double v) {
    if (!std::isfinite(v))
        return "null";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
    return out;
}

const char* verdict_name(CheckResult::Verdict v) {
    switch (v) {
        case CheckResult::Verdict::Pass: return "pass";
        case CheckResult::Verdict::Fail: return "fail";
        case CheckResult::Verdict::Informational: return "informational";
    }
    return "unknown";
}

} // namespace

std::string report_to_json(const AuditReport& rep) {
    std::string out = "{\n";
    out += "  \"convention\": {\"time_factor\": " + json_number(rep.convention.time_factor) +
           ", \"sign\": " + json_number(rep.convention.sign) +
           ", \"calibration_sup_distance\": " + json_number(rep.calibration_sup_distance) +
           "},\n";
    out += "  \"results\": [\n";
    for (std::size_t i = 0; i < rep.results.size(); ++i) {
        const CheckResult& r = rep.results[i];
        out += "    {\"check_id\": " + json_string(r.check_id) + ", \"inputs\": {";
        for (std::size_t k = 0; k < r.inputs.size(); ++k) {
            const InputValue& iv = r.inputs[k];
            out += json_string(iv.key) + ": " +
                   (iv.is_number ? json_number(iv.num) : json_string(iv.str));
            if (k + 1 < r.inputs.size())
                out += ", ";
        }
        out += "}, \"residual\": " + json_number(r.residual) + ", \"tolerance\": ";
        out += (r.verdict == CheckResult::Verdict::Informational)
                   ? "null"
                   : json_number(r.tolerance);
        out += ", \"verdict\": " + json_string(verdict_name(r.verdict));
        out += ", \"notes\": " + json_string(r.notes) + "}";
        if (i + 1 < rep.results.size())
            out += ",";
        out += "\n";
    }
    out += "  ],\n";
    char seedbuf[32];
    std::snprintf(seedbuf, sizeof(seedbuf), "%" PRIu64, rep.seed);
    out += "  \"seeds\": {\"master\": ";
    out += seedbuf;
    out += "}\n}\n";
    return out;
}

void write_report_json(const std::string& path, const AuditReport& rep) {
    write_text_atomic(path, report_to_json(rep));
}

} // namespace qubitlab
