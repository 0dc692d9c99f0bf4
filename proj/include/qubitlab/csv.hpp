#pragma once

#include "qubitlab/dynamics.hpp"
#include "qubitlab/geometry.hpp"

#include <string>
#include <vector>

namespace qubitlab {

/// Shortest decimal representation that round-trips to the same double.
std::string format_shortest(double v);

/// Write-temp-then-rename so readers never observe a partial file.
void write_text_atomic(const std::string& path, const std::string& content);

/// Trajectory table with header t,I,Phi,dI,dPhi and an extra xi column when
/// the trajectory carries noise samples.
std::string trajectory_csv(const Trajectory& tr);
void write_trajectory_csv(const std::string& path, const Trajectory& tr);

/// Deviation/residual tables: one row per grid point and component,
/// header I,component,re,im.
struct ComplexTableRow {
    double x1;
    std::string component;
    Cplx value;
};
std::string complex_table_csv(const std::vector<ComplexTableRow>& rows);

/// Curvature samples, header Ibar,R_formula,R_numeric.
struct CurvatureRow {
    double Ibar;
    double R_formula;
    double R_numeric;
};
std::string curvature_table_csv(const std::vector<CurvatureRow>& rows);

} // namespace qubitlab
