// confgeo: batch front-end for conformal-map geodesics.
//
//   confgeo solve  <config>...           solve and write frames + report
//   confgeo oracle <config>...           closed-form path for linear targets
//   confgeo sweep --alpha 0.1,1,10 <config>
//   confgeo check                        built-in property checks
//
// Exit codes: 0 success, 1 usage/config/IO error, 2 NoConvergence, 3 NotConformal,
// 4 a property check failed.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <future>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "confgeo/confgeo.hpp"

namespace {

using namespace confgeo;

void print_outcome(const ExperimentConfig& cfg, const ExperimentOutcome& o) {
    const auto& r = o.result;
    const double min_cert =
        r.conformal_certificate.empty() ? 0.0 : *std::min_element(r.conformal_certificate.begin(), r.conformal_certificate.end());
    std::printf("%-28s alpha=%-8g status=%-14s action=%.12g grad=%.3e iters=%zu min|phi'|=%.6g time=%.3fs\n", cfg.name.c_str(),
                cfg.alpha, to_string(o.status), r.action, r.grad_norm, r.iterations, min_cert, o.wall_seconds);
    if (!o.message.empty()) std::printf("  %s\n", o.message.c_str());
    std::printf("  report: %s\n", o.report_file.string().c_str());
}

int worst_code(const std::vector<int>& codes) {
    int worst = 0;
    for (int c : codes) worst = std::max(worst, c);
    return worst;
}

ExperimentConfig load_with_override(const std::string& file, const std::string& out_override) {
    ExperimentConfig cfg = load_config(file);
    if (!out_override.empty()) cfg.output = std::filesystem::path(out_override) / cfg.name;
    return cfg;
}

int cmd_solve(const std::vector<std::string>& files, const std::string& out) {
    std::vector<ExperimentConfig> configs;
    for (const auto& f : files) configs.push_back(load_with_override(f, out));
    std::vector<std::future<ExperimentOutcome>> jobs;
    for (const auto& cfg : configs) jobs.push_back(std::async(std::launch::async, [&cfg] { return run_experiment(cfg); }));
    std::vector<int> codes;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const auto outcome = jobs[i].get();
        print_outcome(configs[i], outcome);
        codes.push_back(exit_code(outcome.status));
    }
    return worst_code(codes);
}

int cmd_oracle(const std::vector<std::string>& files, const std::string& out) {
    for (const auto& f : files) {
        const ExperimentConfig cfg = load_with_override(f, out);
        const OracleOutcome o = run_oracle(cfg);
        const std::size_t mid = cfg.N / 2;
        std::printf("%-28s alpha=%-8g c(t=%g)=(%.12g, %.12g) metric-reference=(%.12g, %.12g)\n", cfg.name.c_str(), cfg.alpha,
                    double(mid) / double(cfg.N), o.closed_form[mid].real(), o.closed_form[mid].imag(),
                    o.metric_reference[mid].real(), o.metric_reference[mid].imag());
        std::printf("  report: %s\n", o.report_file.string().c_str());
    }
    return 0;
}

int cmd_sweep(const std::string& file, const std::vector<double>& alphas, const std::string& out) {
    const ExperimentConfig base = load_with_override(file, out);
    std::vector<int> codes;
    for (const auto& [cfg, outcome] : run_sweep(base, alphas)) {
        print_outcome(cfg, outcome);
        codes.push_back(exit_code(outcome.status));
    }
    return worst_code(codes);
}

// Quick self-test of the algebraic identities the solver relies on.
int cmd_check() {
    std::mt19937_64 rng(20240501);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto random_poly = [&](std::size_t n) {
        Polynomial p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = {u(rng), u(rng)};
        return p;
    };
    auto random_path = [&](std::size_t n, std::size_t N) {
        std::vector<Polynomial> steps;
        for (std::size_t k = 0; k <= N; ++k) steps.push_back(random_poly(n));
        return DiscretePath(std::move(steps));
    };
    int failures = 0;
    auto report = [&](const char* name, bool ok, double measured, double limit) {
        std::printf("%-4s %-34s measured %.3e (limit %.1e)\n", ok ? "PASS" : "FAIL", name, measured, limit);
        if (!ok) ++failures;
    };

    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const Polynomial xi = random_poly(1 + rng() % 32), eta = random_poly(1 + rng() % 32);
        const Complex lhs = inner_l2(xi, derivative(eta));
        worst = std::max(worst, std::abs(lhs - inner_l2(adjoint_dz(xi), eta)) / (1.0 + std::abs(lhs)));
    }
    report("adjointness of d/dz", worst <= 1e-12, worst, 1e-12);

    worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const Polynomial p = random_poly(1 + rng() % 64), q = random_poly(1 + rng() % 64);
        const Polynomial a = mul_naive(p, q), b = mul_fft(p, q);
        double err = 0.0, scale = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            err = std::max(err, std::abs(a[j] - b[j]));
            scale = std::max(scale, std::abs(a[j]));
        }
        worst = std::max(worst, err / scale);
    }
    report("fft product == naive product", worst <= 1e-12, worst, 1e-12);

    worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const DiscretePath path = random_path(16, 20);
        const MetricParams params(0.1);
        const double a = discrete_action(path, params), b = discrete_action(path, params, ActionMode::fft);
        worst = std::max(worst, std::abs(a - b) / a);
    }
    report("fft action == naive action", worst <= 1e-10, worst, 1e-10);

    worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        const DiscretePath path = random_path(8, 5);
        const MetricParams params(0.5);
        const auto grad = action_gradient(path, params);
        for (std::size_t k = 1; k < 5; ++k) {
            for (std::size_t j = 0; j < 8; ++j) {
                DiscretePath plus = path, minus = path;
                plus[k][j] += 1e-6;
                minus[k][j] -= 1e-6;
                const double fd = (discrete_action(plus, params) - discrete_action(minus, params)) / 2e-6;
                worst = std::max(worst, std::abs(fd - grad[k - 1][j].real()) / std::max(1.0, std::abs(fd)));
            }
        }
    }
    report("gradient vs central differences", worst <= 1e-6, worst, 1e-6);

    worst = 0.0;
    for (double alpha : {0.0, 0.1, 1.0, 100.0}) {
        const TGState s0{Complex(1.0 + 0.3 * u(rng), 0.3 * u(rng)), Complex(0.3 * u(rng), 0.3 * u(rng))};
        const auto traj = tg_ode_integrate(s0, alpha, 1.0, 1000);
        for (const auto& s : traj) worst = std::max(worst, std::abs(tg_conserved(s, alpha) - tg_conserved(s0, alpha)));
    }
    report("conservation of (2c+alpha) a c", worst <= 1e-10, worst, 1e-10);

    SolverConfig cfg;
    const auto r = solve(cfg, Polynomial{0.0, 0.5});
    const TGClosedForm cf(1.0, 0.5, 0.0);
    worst = 0.0;
    for (std::size_t k = 0; k <= cfg.N; ++k) worst = std::max(worst, std::abs(r.path[k][1] - cf(double(k) / double(cfg.N))));
    report("scaling geodesic vs closed form", worst <= 1e-6, worst, 1e-6);

    return failures ? 4 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geodesics between conformal maps of the unit disk under the H^1_alpha metric"};
    app.require_subcommand(1);

    std::vector<std::string> solve_files, oracle_files;
    std::string out_dir, sweep_file;
    std::vector<double> alphas;

    auto* solve_cmd = app.add_subcommand("solve", "Solve the geodesic boundary-value problem for each config");
    solve_cmd->add_option("configs", solve_files, "Experiment config files")->required()->check(CLI::ExistingFile);
    solve_cmd->add_option("--out", out_dir, "Override output root (output becomes <out>/<name>)");

    auto* oracle_cmd = app.add_subcommand("oracle", "Write the closed-form totally geodesic path for linear targets");
    oracle_cmd->add_option("configs", oracle_files, "Experiment config files")->required()->check(CLI::ExistingFile);
    oracle_cmd->add_option("--out", out_dir, "Override output root");

    auto* sweep_cmd = app.add_subcommand("sweep", "Solve one config for several alpha values in parallel");
    sweep_cmd->add_option("--alpha", alphas, "Comma-separated alpha values")->required()->delimiter(',');
    sweep_cmd->add_option("config", sweep_file, "Experiment config file")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--out", out_dir, "Override output root");

    auto* check_cmd = app.add_subcommand("check", "Run built-in property checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve_cmd) return cmd_solve(solve_files, out_dir);
        if (*oracle_cmd) return cmd_oracle(oracle_files, out_dir);
        if (*sweep_cmd) return cmd_sweep(sweep_file, alphas, out_dir);
        if (*check_cmd) return cmd_check();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
