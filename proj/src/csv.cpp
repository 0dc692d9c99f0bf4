#include "qubitlab/csv.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace qubitlab {

std::string format_shortest(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_text_atomic(const std::string& path, const std::string& content) {
    std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

std::string trajectory_csv(const Trajectory& tr) {
    bool with_xi = !tr.xi.empty();
    std::string out = with_xi ? "t,I,Phi,dI,dPhi,xi\n" : "t,I,Phi,dI,dPhi\n";
    for (std::size_t k = 0; k < tr.size(); ++k) {
        out += format_shortest(tr.t[k]);
        out += ',';
        out += format_shortest(tr.I[k]);
        out += ',';
        out += format_shortest(tr.phi[k]);
        out += ',';
        out += format_shortest(tr.dI[k]);
        out += ',';
        out += format_shortest(tr.dphi[k]);
        if (with_xi) {
            out += ',';
            out += format_shortest(tr.xi[k]);
        }
        out += '\n';
    }
    return out;
}

void write_trajectory_csv(const std::string& path, const Trajectory& tr) {
    write_text_atomic(path, trajectory_csv(tr));
}

std::string complex_table_csv(const std::vector<ComplexTableRow>& rows) {
    std::string out = "I,component,re,im\n";
    for (const auto& r : rows) {
        out += format_shortest(r.x1);
        out += ',';
        out += r.component;
        out += ',';
        out += format_shortest(r.value.real());
        out += ',';
        out += format_shortest(r.value.imag());
        out += '\n';
    }
    return out;
}

std::string curvature_table_csv(const std::vector<CurvatureRow>& rows) {
    std::string out = "Ibar,R_formula,R_numeric\n";
    for (const auto& r : rows) {
        out += format_shortest(r.Ibar);
        out += ',';
        out += format_shortest(r.R_formula);
        out += ',';
        out += format_shortest(r.R_numeric);
        out += '\n';
    }
    return out;
}

} // namespace qubitlab
