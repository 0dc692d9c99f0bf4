#include "qubitlab/numerics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qubitlab {

double wrap_angle(double x) {
    double r = std::remainder(x, 2.0 * kPi);  // lands in [-pi, pi]
    if (r <= -kPi)
        r += 2.0 * kPi;
    return r;
}

double angle_distance(double a, double b) {
    return wrap_angle(a - b);
}

void unwrap_angles(std::vector<double>& phi) {
    double offset = 0.0;
    for (std::size_t i = 1; i < phi.size(); ++i) {
        double raw = phi[i] + offset;
        double jump = raw - phi[i - 1];
        if (jump > kPi || jump < -kPi) {
            offset -= 2.0 * kPi * std::round(jump / (2.0 * kPi));
            raw = phi[i] + offset;
        }
        phi[i] = raw;
    }
}

std::vector<double> deriv1_series(const std::vector<double>& y, double dt) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> d(y.size(), nan);
    if (y.size() < 5 || dt <= 0)
        return d;
    for (std::size_t i = 2; i + 2 < y.size(); ++i)
        d[i] = (-y[i + 2] + 8.0 * y[i + 1] - 8.0 * y[i - 1] + y[i - 2]) / (12.0 * dt);
    return d;
}

std::vector<double> deriv2_series(const std::vector<double>& y, double dt) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> d(y.size(), nan);
    if (y.size() < 5 || dt <= 0)
        return d;
    for (std::size_t i = 2; i + 2 < y.size(); ++i)
        d[i] = (-y[i + 2] + 16.0 * y[i + 1] - 30.0 * y[i] + 16.0 * y[i - 1] - y[i - 2]) /
               (12.0 * dt * dt);
    return d;
}

namespace {

// QUADPACK 15-point Kronrod nodes/weights (positive half) and the embedded
// 7-point Gauss weights.
constexpr double kXgk[8] = {
    0.99145537112081263921, 0.94910791234275852453, 0.86486442335976907279,
    0.74153118559939443986, 0.58608723546769113029, 0.40584515137739716691,
    0.20778495500789846760, 0.0};
constexpr double kWgk[8] = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801};
constexpr double kWg[4] = {
    0.12948496616886969327, 0.27970539148927666790, 0.38183005050511894495,
    0.41795918367346938776};

struct PanelResult {
    Cplx integral;
    double error;
};

PanelResult gk15(const std::function<Cplx(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    Cplx fc = f(c);
    Cplx resk = kWgk[7] * fc;
    Cplx resg = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        Cplx f1 = f(c - half * kXgk[j]);
        Cplx f2 = f(c + half * kXgk[j]);
        resk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1)
            resg += kWg[j / 2] * (f1 + f2);
    }
    return {resk * half, std::abs((resk - resg) * half)};
}

Cplx gk_adaptive(const std::function<Cplx(double)>& f, double a, double b,
                 double tol_abs, int depth) {
    PanelResult p = gk15(f, a, b);
    if (p.error <= tol_abs || depth >= 50)
        return p.integral;
    double c = 0.5 * (a + b);
    return gk_adaptive(f, a, c, 0.5 * tol_abs, depth + 1) +
           gk_adaptive(f, c, b, 0.5 * tol_abs, depth + 1);
}

} // namespace

Cplx integrate_gk(const std::function<Cplx(double)>& f, double a, double b,
                  double rel_tol) {
    if (a == b)
        return Cplx(0.0, 0.0);
    PanelResult whole = gk15(f, a, b);
    double tol_abs = std::max(rel_tol * std::abs(whole.integral), 1e-15);
    if (whole.error <= tol_abs)
        return whole.integral;
    double c = 0.5 * (a + b);
    return gk_adaptive(f, a, c, 0.5 * tol_abs, 1) +
           gk_adaptive(f, c, b, 0.5 * tol_abs, 1);
}

std::array<double, 3> lsq_fit3(const std::vector<std::array<double, 3>>& basis,
                               const std::vector<double>& value) {
    if (basis.size() != value.size() || basis.size() < 3)
        throw std::invalid_argument("lsq_fit3: need at least 3 matching samples");
    double m[3][4] = {};
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const auto& x = basis[k];
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j)
                m[i][j] += x[i] * x[j];
            m[i][3] += x[i] * value[k];
        }
    }
    // Gaussian elimination with partial pivoting on the 3x3 normal system.
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col]))
                piv = r;
        if (std::abs(m[piv][col]) < 1e-14)
            throw std::runtime_error("lsq_fit3: degenerate sampling");
        if (piv != col)
            for (int j = 0; j < 4; ++j)
                std::swap(m[piv][j], m[col][j]);
        for (int r = 0; r < 3; ++r) {
            if (r == col)
                continue;
            double fct = m[r][col] / m[col][col];
            for (int j = col; j < 4; ++j)
                m[r][j] -= fct * m[col][j];
        }
    }
    return {m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]};
}

} // namespace qubitlab
