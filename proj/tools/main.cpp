// qubitlab command-line front end: evolutions, geodesics, audits and
// parameter sweeps with CSV/JSON outputs.
//
// Exit codes: 0 success, 1 runtime abort or failed check, 2 usage/config error.

#include "qubitlab/audit.hpp"
#include "qubitlab/csv.hpp"
#include "qubitlab/dynamics.hpp"
#include "qubitlab/geometry.hpp"
#include "qubitlab/report.hpp"

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace {

using namespace qubitlab;

std::uint64_t random_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct EvolveArgs {
    std::string mode;
    double ax = 0, ay = 0, az = 0;
    double i0 = 0, phi0 = 0;
    double t_final = 10.0, dt = 1e-3;
    double gamma = 0, friction_factor = 1, noise_sigma = 0, noise_tau = 1;
    double abs_tol = 1e-10, rel_tol = 1e-10;
    std::optional<std::uint64_t> seed;
    std::string out;
};

void add_config(CLI::App* cmd) {
    cmd->set_config("--config", "", "flat key = value file mirroring the flags; "
                                    "flags override the file");
    cmd->allow_config_extras(CLI::config_extras_mode::error);
}

int run_evolve(const EvolveArgs& args) {
    FieldParams a{args.ax, args.ay, args.az};
    ActionAnglePoint p0{args.i0, args.phi0};
    EvolveOptions opt{args.abs_tol, args.rel_tol};

    Trajectory tr;
    if (args.mode == "classical") {
        tr = evolve_classical(p0, a, args.dt, args.t_final, opt);
    } else if (args.mode == "dissipative") {
        DissipationParams d;
        d.gamma = args.gamma;
        d.friction_factor = args.friction_factor;
        d.noise_sigma = args.noise_sigma;
        d.noise_tau = args.noise_tau;
        d.seed = args.seed ? *args.seed : random_seed();
        if (!args.seed && d.noise_sigma > 0)
            std::printf("seed = %" PRIu64 "\n", d.seed);
        d.validate();
        tr = evolve_dissipative(p0, a, d, args.dt, args.t_final, opt);
    } else if (args.mode == "quantum") {
        QuantumTrajectory q = evolve_quantum(from_action_angle(p0), a, args.dt,
                                             args.t_final);
        try {
            tr = map_quantum_trajectory(q, a);
        } catch (const std::domain_error& e) {
            // Flush the mappable prefix before reporting the pole.
            QuantumTrajectory prefix;
            for (std::size_t k = 0; k < q.states.size(); ++k) {
                try {
                    (void)to_action_angle(q.states[k]);
                } catch (const std::domain_error&) {
                    break;
                }
                prefix.t.push_back(q.t[k]);
                prefix.states.push_back(q.states[k]);
            }
            if (!prefix.t.empty())
                write_trajectory_csv(args.out, map_quantum_trajectory(prefix, a));
            std::fprintf(stderr, "error: %s\n", e.what());
            return 1;
        }
    } else {
        std::fprintf(stderr, "error: unknown mode '%s'\n", args.mode.c_str());
        return 2;
    }

    write_trajectory_csv(args.out, tr);
    if (!tr.completed) {
        std::fprintf(stderr, "error: integration aborted (%s); partial trajectory "
                             "written to %s\n",
                     tr.abort_reason.c_str(), args.out.c_str());
        return 1;
    }
    return 0;
}

struct GeodesicArgs {
    std::string connection;
    double i0 = 0, theta0 = 1.5707963267948966, phi0 = 0;
    std::vector<double> v;
    bool from_dynamics = false;
    double ax = 0, ay = 0, az = 0;
    double t_final = 5.0, dt = 1e-3;
    double abs_tol = 1e-10, rel_tol = 1e-10;
    std::string out;
};

int run_geodesic(const GeodesicArgs& args) {
    Connection conn;
    double x1 = args.i0;
    if (args.connection == "flat") {
        conn = zero_connection();
    } else if (args.connection == "action-angle") {
        conn = action_angle_qubit_connection();
    } else if (args.connection == "cot-theta") {
        conn = cot_theta_connection();
        x1 = args.theta0;
    } else if (args.connection == "lorentz-mz") {
        conn = connection_from_metric(lorentz_mz_metric());
    } else {
        std::fprintf(stderr, "error: unknown connection '%s' (expected flat, "
                             "action-angle, cot-theta or lorentz-mz)\n",
                     args.connection.c_str());
        return 2;
    }

    GeodesicState s0{x1, args.phi0, 0.0, 0.0};
    if (args.from_dynamics) {
        auto [v1, v2] = hamilton_rhs({args.i0, args.phi0}, {args.ax, args.ay, args.az});
        s0.v1 = v1;
        s0.v2 = v2;
    } else {
        if (args.v.size() != 2) {
            std::fprintf(stderr, "error: --v needs two components (or use "
                                 "--from-dynamics)\n");
            return 2;
        }
        s0.v1 = args.v[0];
        s0.v2 = args.v[1];
    }

    Trajectory tr = geodesic_integrate(conn, s0, args.dt, args.t_final,
                                       {args.abs_tol, args.rel_tol});
    write_trajectory_csv(args.out, tr);
    if (!tr.completed) {
        std::fprintf(stderr, "error: integration aborted (%s); partial trajectory "
                             "written to %s\n",
                     tr.abort_reason.c_str(), args.out.c_str());
        return 1;
    }
    return 0;
}

struct AuditArgs {
    std::string out = "report.json";
    std::optional<std::uint64_t> seed;
    std::vector<std::string> checks;
    std::vector<double> gammas;
    std::string tables_dir;
};

int run_audit(const AuditArgs& args) {
    AuditConfig cfg;
    cfg.seed = args.seed ? *args.seed : random_seed();
    if (!args.seed)
        std::printf("seed = %" PRIu64 "\n", cfg.seed);
    if (!args.gammas.empty())
        cfg.gamma_grid = args.gammas;
    cfg.checks = args.checks;
    cfg.tables_dir = args.tables_dir;

    AuditReport rep = run_full_audit(cfg);
    write_report_json(args.out, rep);
    for (const auto& r : rep.results) {
        const char* verdict = r.verdict == CheckResult::Verdict::Pass ? "pass"
                              : r.verdict == CheckResult::Verdict::Fail ? "FAIL"
                                                                        : "info";
        std::printf("%-4s  %-28s residual=%.3e\n", verdict, r.check_id.c_str(),
                    r.residual);
    }
    std::printf("report written to %s (%zu checks)\n", args.out.c_str(),
                rep.results.size());
    return audit_all_passed(rep) ? 0 : 1;
}

struct SweepArgs {
    std::vector<double> gamma_grid{0.0};
    std::vector<double> sigma_grid{0.0};
    std::vector<double> az_grid{1.0};
    double ax = 0, ay = 0;
    double i0 = 0, phi0 = 0;
    double t_final = 5.0, dt = 1e-3;
    double friction_factor = 1, noise_tau = 1;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
};

int run_sweep(const SweepArgs& args) {
    std::uint64_t master = args.seed ? *args.seed : random_seed();
    if (!args.seed)
        std::printf("seed = %" PRIu64 "\n", master);
    std::filesystem::create_directories(args.out_dir);

    std::string index = "cell,gamma,sigma,az,seed,file,status\n";
    int cell = 0;
    bool any_aborted = false;
    for (double gamma : args.gamma_grid)
        for (double sigma : args.sigma_grid)
            for (double az : args.az_grid) {
                DissipationParams d;
                d.gamma = gamma;
                d.friction_factor = args.friction_factor;
                d.noise_sigma = sigma;
                d.noise_tau = args.noise_tau;
                d.seed = splitmix64(master ^ static_cast<std::uint64_t>(cell));
                char name[32];
                std::snprintf(name, sizeof(name), "cell_%03d.csv", cell);
                std::string status = "ok";
                try {
                    Trajectory tr = evolve_dissipative({args.i0, args.phi0},
                                                       {args.ax, args.ay, az}, d,
                                                       args.dt, args.t_final);
                    write_trajectory_csv(
                        (std::filesystem::path(args.out_dir) / name).string(), tr);
                    if (!tr.completed) {
                        status = "aborted";
                        any_aborted = true;
                    }
                } catch (const std::exception& e) {
                    status = "error";
                    any_aborted = true;
                    std::fprintf(stderr, "cell %d failed: %s\n", cell, e.what());
                }
                index += std::to_string(cell) + ',' + format_shortest(gamma) + ',' +
                         format_shortest(sigma) + ',' + format_shortest(az) + ',' +
                         std::to_string(d.seed) + ',' + name + ',' + status + '\n';
                ++cell;
            }
    write_text_atomic((std::filesystem::path(args.out_dir) / "index.csv").string(),
                      index);
    std::printf("%d cells written to %s\n", cell, args.out_dir.c_str());
    return any_aborted ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qubit action-angle dynamics and geometry laboratory"};
    app.require_subcommand(1);

    EvolveArgs ev;
    CLI::App* evolve = app.add_subcommand("evolve",
                                          "integrate an evolution and write a "
                                          "trajectory CSV");
    evolve->add_option("--mode", ev.mode, "classical | quantum | dissipative")
        ->required();
    evolve->add_option("--ax", ev.ax, "x field coefficient");
    evolve->add_option("--ay", ev.ay, "y field coefficient");
    evolve->add_option("--az", ev.az, "z field coefficient");
    evolve->add_option("--i0", ev.i0, "initial action, |I| < 1")->required();
    evolve->add_option("--phi0", ev.phi0, "initial angle (radians)");
    evolve->add_option("--t-final", ev.t_final, "integration time");
    evolve->add_option("--dt", ev.dt, "sample step");
    evolve->add_option("--gamma", ev.gamma, "friction constant");
    evolve->add_option("--friction-factor", ev.friction_factor,
                       "multiplier of gamma*dphi in the dI equation");
    evolve->add_option("--noise-sigma", ev.noise_sigma, "noise strength");
    evolve->add_option("--noise-tau", ev.noise_tau, "noise correlation time");
    evolve->add_option("--abs-tol", ev.abs_tol, "integrator absolute tolerance");
    evolve->add_option("--rel-tol", ev.rel_tol, "integrator relative tolerance");
    evolve->add_option("--seed", ev.seed, "RNG seed (omit to pick and print one)");
    evolve->add_option("--out", ev.out, "output CSV path")->required();
    add_config(evolve);

    GeodesicArgs ge;
    CLI::App* geodesic = app.add_subcommand("geodesic",
                                            "integrate a geodesic of a named "
                                            "connection");
    geodesic->add_option("--connection", ge.connection,
                         "flat | action-angle | cot-theta | lorentz-mz")
        ->required();
    geodesic->add_option("--i0", ge.i0, "initial first coordinate");
    geodesic->add_option("--theta0", ge.theta0, "initial theta (cot-theta chart)");
    geodesic->add_option("--phi0", ge.phi0, "initial second coordinate");
    geodesic->add_option("--v", ge.v, "initial velocity (two components)")
        ->expected(2);
    geodesic->add_flag("--from-dynamics", ge.from_dynamics,
                       "take the initial velocity from the canonical flow");
    geodesic->add_option("--ax", ge.ax, "x field coefficient (--from-dynamics)");
    geodesic->add_option("--ay", ge.ay, "y field coefficient (--from-dynamics)");
    geodesic->add_option("--az", ge.az, "z field coefficient (--from-dynamics)");
    geodesic->add_option("--t-final", ge.t_final, "integration time");
    geodesic->add_option("--dt", ge.dt, "sample step");
    geodesic->add_option("--abs-tol", ge.abs_tol, "integrator absolute tolerance");
    geodesic->add_option("--rel-tol", ge.rel_tol, "integrator relative tolerance");
    geodesic->add_option("--out", ge.out, "output CSV path")->required();
    add_config(geodesic);

    AuditArgs au;
    CLI::App* audit = app.add_subcommand("audit", "run the verification suite and "
                                                  "write a JSON report");
    audit->add_option("--out", au.out, "report path (JSON)");
    audit->add_option("--seed", au.seed, "master seed (omit to pick and print one)");
    audit->add_option("--check", au.checks,
                      "check id or prefix to run (repeatable); default all");
    audit->add_option("--gamma", au.gammas,
                      "friction grid for the dissipative-fit checks (repeatable)");
    audit->add_option("--tables-dir", au.tables_dir,
                      "directory for grid/deviation/curvature CSV tables");
    add_config(audit);

    SweepArgs sw;
    CLI::App* sweep = app.add_subcommand("sweep", "Cartesian parameter grid of "
                                                  "dissipative runs");
    sweep->add_option("--gamma-grid", sw.gamma_grid, "gamma values")
        ->delimiter(',');
    sweep->add_option("--sigma-grid", sw.sigma_grid, "noise strengths")
        ->delimiter(',');
    sweep->add_option("--az-grid", sw.az_grid, "z field coefficients")
        ->delimiter(',');
    sweep->add_option("--ax", sw.ax, "x field coefficient");
    sweep->add_option("--ay", sw.ay, "y field coefficient");
    sweep->add_option("--i0", sw.i0, "initial action");
    sweep->add_option("--phi0", sw.phi0, "initial angle");
    sweep->add_option("--t-final", sw.t_final, "integration time");
    sweep->add_option("--dt", sw.dt, "sample step");
    sweep->add_option("--friction-factor", sw.friction_factor,
                      "multiplier of gamma*dphi in the dI equation");
    sweep->add_option("--noise-tau", sw.noise_tau, "noise correlation time");
    sweep->add_option("--seed", sw.seed, "master seed (omit to pick and print one)");
    sweep->add_option("--out-dir", sw.out_dir, "output directory")->required();
    add_config(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*evolve)
            return run_evolve(ev);
        if (*geodesic)
            return run_geodesic(ge);
        if (*audit)
            return run_audit(au);
        if (*sweep)
            return run_sweep(sw);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
