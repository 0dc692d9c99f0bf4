#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>

namespace qubitlab {

struct OdeOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double max_step = 0.05;
    double first_step = 1e-4;
    std::size_t max_steps = 20000000;
};

enum class OdeStatus { Completed, Aborted };

/// Adaptive embedded Dormand-Prince 5(4) pair with FSAL and cubic Hermite
/// dense output. The state dimension is fixed at compile time; the sampler
/// is invoked on the uniform grid t0 + k*sample_dt plus the final time.
/// `guard` inspects each accepted state and returns a non-empty reason to
/// stop; the integration then ends at the last good state.
template <std::size_t N>
struct Dopri5 {
    using State = std::array<double, N>;
    using Rhs = std::function<void(double, const State&, State&)>;
    using Guard = std::function<std::string(double, const State&)>;
    using Sampler = std::function<void(double, const State&)>;
    /// Optional state-dependent step cap (keeps stage evaluations resolved
    /// near right-hand-side poles that the solution crosses transversally).
    using StepLimit = std::function<double(double, const State&)>;

    struct Result {
        OdeStatus status = OdeStatus::Completed;
        double t_end = 0.0;  // last accepted time
        State y_end{};
        std::string abort_reason;
    };

    static Result integrate(const Rhs& rhs, double t0, State y0, double t1,
                            double sample_dt, const Sampler& emit,
                            OdeOptions opt = {}, const Guard& guard = {},
                            const StepLimit& step_limit = {}) {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                                a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                                a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                                e3 = 500.0 / 1113 - 7571.0 / 16695,
                                e4 = 125.0 / 192 - 393.0 / 640,
                                e5 = -2187.0 / 6784 + 92097.0 / 339200,
                                e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

        Result res;
        double t = t0;
        State y = y0;
        State k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
        rhs(t, y, k1);

        const double span = t1 - t0;
        const double fuzz = 1e-12 * (std::abs(t0) + std::abs(t1) + 1.0);
        long sample_idx = 0;
        double last_emitted = t0 - 1.0;
        auto emit_at = [&](double ts, const State& ys) {
            if (emit) emit(ts, ys);
            last_emitted = ts;
        };
        emit_at(t0, y);
        if (sample_dt > 0) sample_idx = 1;

        if (span <= 0) {
            res.t_end = t;
            res.y_end = y;
            return res;
        }

        double h = std::min({opt.first_step, opt.max_step, span});
        std::size_t steps = 0;
        while (t < t1 - fuzz) {
            if (++steps > opt.max_steps) {
                res.status = OdeStatus::Aborted;
                res.abort_reason = "step limit exceeded";
                break;
            }
            if (step_limit)
                h = std::min(h, std::max(step_limit(t, y), 1e-6));
            h = std::min(h, t1 - t);

            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * a21 * k1[i];
            rhs(t + h / 5, ytmp, k2);
            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            rhs(t + 3 * h / 10, ytmp, k3);
            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            rhs(t + 4 * h / 5, ytmp, k4);
            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            rhs(t + 8 * h / 9, ytmp, k5);
            for (std::size_t i = 0; i < N; ++i)
                ytmp[i] = y[i] +
                          h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                               a65 * k5[i]);
            rhs(t + h, ytmp, k6);
            for (std::size_t i = 0; i < N; ++i)
                ynew[i] = y[i] +
                          h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                               b6 * k6[i]);
            rhs(t + h, ynew, k7);  // FSAL stage

            double err = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                 e6 * k6[i] + e7 * k7[i]);
                double sk = opt.abs_tol +
                            opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                double q = ei / sk;
                err += q * q;
            }
            err = std::sqrt(err / N);

            if (!std::isfinite(err)) {
                h *= 0.5;
                if (h < 1e-14) {
                    res.status = OdeStatus::Aborted;
                    res.abort_reason = "step size underflow (non-finite right-hand side)";
                    break;
                }
                continue;
            }
            if (err > 1.0) {
                h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
                if (h < 1e-14) {
                    res.status = OdeStatus::Aborted;
                    res.abort_reason = "step size underflow";
                    break;
                }
                continue;
            }

            double tnew = t + h;
            std::string reason = guard ? guard(tnew, ynew) : std::string();
            if (!reason.empty()) {
                res.status = OdeStatus::Aborted;
                res.abort_reason = reason;
                break;  // last good state is (t, y)
            }

            // Dense output on the uniform sample grid.
            if (sample_dt > 0) {
                while (true) {
                    double ts = t0 + sample_idx * sample_dt;
                    if (ts > tnew + fuzz || ts > t1 + fuzz)
                        break;
                    double th = (ts - t) / h;
                    double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
                    double h10 = th * (1 - th) * (1 - th);
                    double h01 = th * th * (3 - 2 * th);
                    double h11 = th * th * (th - 1);
                    State ys;
                    for (std::size_t i = 0; i < N; ++i)
                        ys[i] = h00 * y[i] + h10 * h * k1[i] + h01 * ynew[i] +
                                h11 * h * k7[i];
                    emit_at(ts, ys);
                    ++sample_idx;
                }
            }

            t = tnew;
            y = ynew;
            k1 = k7;
            double scale = (err > 1e-30) ? 0.9 * std::pow(err, -0.2) : 5.0;
            h *= std::min(5.0, std::max(0.2, scale));
            h = std::min(h, opt.max_step);
        }

        res.t_end = t;
        res.y_end = y;
        if (res.status == OdeStatus::Completed && last_emitted < t1 - fuzz)
            emit_at(t1, y);
        return res;
    }
};

} // namespace qubitlab
