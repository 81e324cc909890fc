#pragma once

/// Experiment front-end: JSON configs, warp-frame emission (CSV / SVG) and
/// structured reports.  Everything written here is a deterministic function
/// of the config; wall-clock time goes to a separate timing.json so reports
/// and frames stay byte-identical across reruns.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "confgeo/geodesic_solver.hpp"
#include "confgeo/holo_poly.hpp"
#include "confgeo/metric.hpp"
#include "confgeo/tg_oracle.hpp"

namespace confgeo {

enum class FrameFormat { svg, csv };

struct MeshSpec {
    std::size_t circles = 8;   ///< radii j/circles, j = 1..circles
    std::size_t rays = 16;     ///< angles 2 pi m/rays
    std::size_t points = 128;  ///< samples per line
};

struct ExperimentConfig {
    std::string name;
    std::vector<std::string> aliases;
    double alpha = 0.0;
    std::size_t N = 20;
    std::size_t n = 16;
    std::vector<Complex> target;
    std::filesystem::path output;
    FrameFormat format = FrameFormat::svg;
    MeshSpec mesh{};
    double grad_tol = 1e-8;
    std::size_t max_iters = 5000;
    ActionMode mode = ActionMode::naive;

    Polynomial target_polynomial() const { return Polynomial(target).resized(n); }

    SolverConfig solver_config() const {
        SolverConfig cfg;
        cfg.n = n;
        cfg.N = N;
        cfg.alpha = alpha;
        cfg.grad_tol = grad_tol;
        cfg.max_iters = max_iters;
        cfg.mode = mode;
        return cfg;
    }
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed document or a field of the wrong shape.  `line` is 1-based, 0 if unknown.
class ParseError : public ConfigError {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& field, const std::string& msg)
        : ConfigError(source + (line ? ":" + std::to_string(line) : std::string{}) +
                      (field.empty() ? std::string{} : ": field '" + field + "'") + ": " + msg),
          line_(line), field_(field) {}
    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

/// Well-formed config that breaks an invariant (alpha < 0, too many coefficients, ...).
class ValidationError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

namespace detail {

inline std::size_t line_of_offset(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + std::size_t(std::count(text.begin(), text.begin() + std::ptrdiff_t(offset), '\n'));
}

inline std::size_t line_of_key(std::string_view text, std::string_view key) {
    const std::string quoted = "\"" + std::string(key) + "\"";
    const auto pos = text.find(quoted);
    return pos == std::string_view::npos ? 0 : line_of_offset(text, pos);
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline ExperimentConfig parse_config(std::string_view text, const std::string& source = "<config>") {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(source, detail::line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1), "", e.what());
    }
    if (!doc.is_object()) throw ParseError(source, 1, "", "top level must be an object");

    auto fail = [&](const std::string& field, const std::string& msg) -> ParseError {
        const auto leaf = field.substr(field.find_last_of('.') + 1);
        return ParseError(source, detail::line_of_key(text, leaf), field, msg);
    };
    auto require = [&](const json& obj, const char* key, const std::string& path) -> const json& {
        if (!obj.contains(key)) throw fail(path, "missing required field");
        return obj.at(key);
    };
    auto number = [&](const json& v, const std::string& path) {
        if (!v.is_number()) throw fail(path, "expected a number");
        return v.get<double>();
    };
    auto count = [&](const json& v, const std::string& path) -> std::size_t {
        if (!v.is_number_integer()) throw fail(path, "expected an integer");
        const auto i = v.get<long long>();
        if (i < 0) throw ValidationError(source + ": field '" + path + "' must be nonnegative");
        return std::size_t(i);
    };
    auto check_keys = [&](const json& obj, std::initializer_list<const char*> allowed, const std::string& prefix) {
        for (const auto& [key, _] : obj.items()) {
            if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end()) {
                throw fail(prefix + key, "unknown field");
            }
        }
    };

    check_keys(doc, {"name", "aliases", "alpha", "N", "n", "target", "output", "format", "mesh", "solver"}, "");

    ExperimentConfig cfg;
    const json& name = require(doc, "name", "name");
    if (!name.is_string()) throw fail("name", "expected a string");
    cfg.name = name.get<std::string>();
    if (doc.contains("aliases")) {
        const json& al = doc.at("aliases");
        if (!al.is_array()) throw fail("aliases", "expected an array of strings");
        for (const auto& a : al) {
            if (!a.is_string()) throw fail("aliases", "expected an array of strings");
            cfg.aliases.push_back(a.get<std::string>());
        }
    }
    cfg.alpha = number(require(doc, "alpha", "alpha"), "alpha");
    cfg.N = count(require(doc, "N", "N"), "N");
    cfg.n = count(require(doc, "n", "n"), "n");

    const json& target = require(doc, "target", "target");
    if (!target.is_array()) throw fail("target", "expected an array of [re, im] pairs");
    for (std::size_t i = 0; i < target.size(); ++i) {
        const json& pair = target[i];
        const std::string path = "target[" + std::to_string(i) + "]";
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
            throw ParseError(source, detail::line_of_key(text, "target"), path, "expected [re, im]");
        }
        cfg.target.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }

    cfg.output = doc.contains("output") ? std::filesystem::path(doc.at("output").get<std::string>())
                                        : std::filesystem::path("out") / cfg.name;
    if (doc.contains("format")) {
        const json& f = doc.at("format");
        if (f == "svg") {
            cfg.format = FrameFormat::svg;
        } else if (f == "csv") {
            cfg.format = FrameFormat::csv;
        } else {
            throw fail("format", "expected \"svg\" or \"csv\"");
        }
    }
    if (doc.contains("mesh")) {
        const json& mesh = doc.at("mesh");
        if (!mesh.is_object()) throw fail("mesh", "expected an object");
        check_keys(mesh, {"circles", "rays", "points"}, "mesh.");
        if (mesh.contains("circles")) cfg.mesh.circles = count(mesh.at("circles"), "mesh.circles");
        if (mesh.contains("rays")) cfg.mesh.rays = count(mesh.at("rays"), "mesh.rays");
        if (mesh.contains("points")) cfg.mesh.points = count(mesh.at("points"), "mesh.points");
    }
    if (doc.contains("solver")) {
        const json& solver = doc.at("solver");
        if (!solver.is_object()) throw fail("solver", "expected an object");
        check_keys(solver, {"grad_tol", "max_iters", "action_mode"}, "solver.");
        if (solver.contains("grad_tol")) cfg.grad_tol = number(solver.at("grad_tol"), "solver.grad_tol");
        if (solver.contains("max_iters")) cfg.max_iters = count(solver.at("max_iters"), "solver.max_iters");
        if (solver.contains("action_mode")) {
            const json& m = solver.at("action_mode");
            if (m == "naive") {
                cfg.mode = ActionMode::naive;
            } else if (m == "fft") {
                cfg.mode = ActionMode::fft;
            } else {
                throw fail("solver.action_mode", "expected \"naive\" or \"fft\"");
            }
        }
    }

    auto invalid = [&](const std::string& msg) { return ValidationError(source + ": " + msg); };
    if (cfg.name.empty()) throw invalid("name must not be empty");
    if (!(cfg.alpha >= 0.0) || !std::isfinite(cfg.alpha)) throw invalid("alpha must be finite and >= 0");
    if (cfg.n < 2) throw invalid("n must be >= 2");
    if (cfg.N < 2) throw invalid("N must be >= 2");
    if (cfg.target.empty()) throw invalid("target must list at least one coefficient");
    if (cfg.target.size() > cfg.n) throw invalid("target has more coefficients than the degree bound n");
    if (cfg.mesh.circles == 0 || cfg.mesh.rays == 0) throw invalid("mesh needs at least one circle and one ray");
    if (cfg.mesh.points < 128) throw invalid("mesh.points must be >= 128");
    if (!(cfg.grad_tol > 0.0)) throw invalid("solver.grad_tol must be positive");
    if (cfg.max_iters == 0) throw invalid("solver.max_iters must be positive");
    return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ParseError(file.string(), 0, "", "cannot open file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), file.string());
}

/// Images of the polar mesh under one step's map.  Lines 0..circles-1 are the
/// circles r = (j+1)/circles; the following `rays` lines are radial segments.
struct WarpFrame {
    std::size_t step = 0;
    std::vector<std::vector<Complex>> lines;
};

inline WarpFrame warp_frame(const Polynomial& phi, std::size_t step, const MeshSpec& mesh) {
    WarpFrame frame{step, {}};
    frame.lines.reserve(mesh.circles + mesh.rays);
    const double last = double(mesh.points - 1);
    for (std::size_t j = 1; j <= mesh.circles; ++j) {
        const double r = double(j) / double(mesh.circles);
        std::vector<Complex> line;
        line.reserve(mesh.points);
        // Closed curve: the final sample repeats theta = 0 exactly.
        for (std::size_t p = 0; p < mesh.points; ++p) {
            const Complex z = p + 1 == mesh.points ? Complex(r, 0.0) : std::polar(r, 2.0 * std::numbers::pi * double(p) / last);
            line.push_back(phi(z));
        }
        frame.lines.push_back(std::move(line));
    }
    for (std::size_t m = 0; m < mesh.rays; ++m) {
        const double theta = 2.0 * std::numbers::pi * double(m) / double(mesh.rays);
        std::vector<Complex> line;
        line.reserve(mesh.points);
        for (std::size_t p = 0; p < mesh.points; ++p) line.push_back(phi(std::polar(double(p) / last, theta)));
        frame.lines.push_back(std::move(line));
    }
    return frame;
}

inline std::vector<WarpFrame> warp_frames(const DiscretePath& path, const MeshSpec& mesh) {
    std::vector<WarpFrame> frames;
    frames.reserve(path.steps().size());
    for (std::size_t k = 0; k < path.steps().size(); ++k) frames.push_back(warp_frame(path[k], k, mesh));
    return frames;
}

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void write_frames_csv(const std::vector<WarpFrame>& frames, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot write " + file.string());
    out << "step,line_id,point_index,x,y\n";
    for (const auto& frame : frames) {
        for (std::size_t l = 0; l < frame.lines.size(); ++l) {
            for (std::size_t p = 0; p < frame.lines[l].size(); ++p) {
                const Complex w = frame.lines[l][p];
                out << frame.step << ',' << l << ',' << p << ',' << detail::format_double(w.real()) << ','
                    << detail::format_double(w.imag()) << '\n';
            }
        }
    }
    if (!out) throw IoError("write failed: " + file.string());
}

/// One SVG per frame; `extent` is the half-width of the shared square view
/// box.  The y axis is flipped so the picture has the usual orientation.
inline void write_frame_svg(const WarpFrame& frame, double extent, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot write " + file.string());
    const std::string e = detail::format_double(extent);
    const std::string w = detail::format_double(2.0 * extent);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-" << e << " -" << e << ' ' << w << ' ' << w
        << "\" width=\"512\" height=\"512\">\n";
    const std::string stroke = detail::format_double(extent / 256.0);
    for (const auto& line : frame.lines) {
        out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"" << stroke << "\" points=\"";
        for (std::size_t p = 0; p < line.size(); ++p) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%s%.9g,%.9g", p ? " " : "", line[p].real(), -line[p].imag());
            out << buf;
        }
        out << "\"/>\n";
    }
    out << "</svg>\n";
    if (!out) throw IoError("write failed: " + file.string());
}

inline std::string frame_file_name(std::size_t step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%04zu.svg", step);
    return buf;
}

/// Writes frames into `dir` (created if needed) and returns the files written.
inline std::vector<std::filesystem::path> emit_frames(const DiscretePath& path, const MeshSpec& mesh, FrameFormat format,
                                                      const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto frames = warp_frames(path, mesh);
    if (format == FrameFormat::csv) {
        const auto file = dir / "frames.csv";
        write_frames_csv(frames, file);
        return {file};
    }
    double extent = 0.0;
    for (const auto& f : frames) {
        for (const auto& line : f.lines) {
            for (const Complex w : line) extent = std::max(extent, std::max(std::abs(w.real()), std::abs(w.imag())));
        }
    }
    extent = extent > 0.0 ? 1.05 * extent : 1.0;
    std::vector<std::filesystem::path> files;
    for (const auto& f : frames) {
        files.push_back(dir / frame_file_name(f.step));
        write_frame_svg(f, extent, files.back());
    }
    return files;
}

namespace detail {

inline nlohmann::ordered_json complex_json(Complex c) { return nlohmann::ordered_json::array({c.real(), c.imag()}); }

inline nlohmann::ordered_json poly_json(const Polynomial& p) {
    auto arr = nlohmann::ordered_json::array();
    for (const Complex c : p.coeffs()) arr.push_back(complex_json(c));
    return arr;
}

inline void write_text(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot write " + file.string());
    out << text;
    if (!out) throw IoError("write failed: " + file.string());
}

}  // namespace detail

enum class RunStatus { converged, not_conformal, no_convergence };

inline const char* to_string(RunStatus s) noexcept {
    switch (s) {
        case RunStatus::converged: return "converged";
        case RunStatus::not_conformal: return "NotConformal";
        case RunStatus::no_convergence: return "NoConvergence";
    }
    return "?";
}

/// Process exit code for a run: 0 on success, 2 NoConvergence, 3 NotConformal.
inline int exit_code(RunStatus s) noexcept {
    switch (s) {
        case RunStatus::converged: return 0;
        case RunStatus::no_convergence: return 2;
        case RunStatus::not_conformal: return 3;
    }
    return 1;
}

struct ExperimentOutcome {
    GeodesicResult result;
    RunStatus status = RunStatus::converged;
    std::string message;
    double wall_seconds = 0.0;
    std::filesystem::path report_file;
    std::vector<std::filesystem::path> frame_files;
};

inline nlohmann::ordered_json make_report(const ExperimentConfig& cfg, const ExperimentOutcome& outcome) {
    nlohmann::ordered_json rep;
    const GeodesicResult& r = outcome.result;
    rep["name"] = cfg.name;
    rep["aliases"] = cfg.aliases;
    rep["alpha"] = cfg.alpha;
    rep["N"] = cfg.N;
    rep["n"] = cfg.n;
    auto target = nlohmann::ordered_json::array();
    for (const Complex c : cfg.target) target.push_back(detail::complex_json(c));
    rep["target"] = target;
    rep["status"] = to_string(outcome.status);
    rep["message"] = outcome.message;
    rep["converged"] = r.converged;
    rep["action"] = r.action;
    rep["grad_norm"] = r.grad_norm;
    rep["grad_tol"] = cfg.grad_tol;
    rep["iterations"] = r.iterations;
    rep["conformal_certificate"] = r.conformal_certificate;
    rep["min_conformal_certificate"] =
        r.conformal_certificate.empty() ? 0.0 : *std::min_element(r.conformal_certificate.begin(), r.conformal_certificate.end());
    rep["action_history"] = r.action_history;
    auto path = nlohmann::ordered_json::array();
    for (const auto& step : r.path.steps()) path.push_back(detail::poly_json(step));
    rep["path"] = path;
    auto frames = nlohmann::ordered_json::array();
    for (const auto& f : outcome.frame_files) frames.push_back(f.filename().string());
    rep["frames"] = {{"format", cfg.format == FrameFormat::svg ? "svg" : "csv"},
                     {"circles", cfg.mesh.circles},
                     {"rays", cfg.mesh.rays},
                     {"points", cfg.mesh.points},
                     {"files", frames}};
    return rep;
}

/// Solve, then write frames (only on success), report.json and timing.json
/// into cfg.output.  Solver failures are captured in the outcome rather than
/// thrown; config and IO errors propagate.
inline ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
    ExperimentOutcome outcome;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        outcome.result = solve(cfg.solver_config(), cfg.target_polynomial());
        outcome.status = RunStatus::converged;
    } catch (const NotConformal& e) {
        outcome.result = e.result();
        outcome.status = RunStatus::not_conformal;
        outcome.message = e.what();
    } catch (const NoConvergence& e) {
        outcome.result = e.result();
        outcome.status = RunStatus::no_convergence;
        outcome.message = e.what();
    }
    outcome.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::filesystem::create_directories(cfg.output);
    if (outcome.status == RunStatus::converged) {
        outcome.frame_files = emit_frames(outcome.result.path, cfg.mesh, cfg.format, cfg.output);
    }
    outcome.report_file = cfg.output / "report.json";
    detail::write_text(outcome.report_file, make_report(cfg, outcome).dump(2) + "\n");
    nlohmann::ordered_json timing;
    timing["name"] = cfg.name;
    timing["wall_seconds"] = outcome.wall_seconds;
    detail::write_text(cfg.output / "timing.json", timing.dump(2) + "\n");
    return outcome;
}

/// True when the target is c1 z (c0 = 0 and no higher terms).
inline bool is_linear_target(const ExperimentConfig& cfg) {
    for (std::size_t i = 0; i < cfg.target.size(); ++i) {
        if (i != 1 && cfg.target[i] != Complex{}) return false;
    }
    return cfg.target.size() >= 2 && cfg.target[1] != Complex{};
}

struct OracleOutcome {
    DiscretePath path;
    std::vector<Complex> closed_form;       ///< c(t_k) with c^2 + alpha c affine
    std::vector<Complex> metric_reference;  ///< c(t_k) from linear_geodesic_reference
    std::filesystem::path report_file;
    std::vector<std::filesystem::path> frame_files;
};

/// Closed-form path for linear targets, written to cfg.output / "oracle".
inline OracleOutcome run_oracle(const ExperimentConfig& cfg) {
    if (!is_linear_target(cfg)) throw ValidationError(cfg.name + ": oracle needs a linear target c1 z");
    const Complex c1 = cfg.target[1];
    const TGClosedForm closed(1.0, c1, cfg.alpha);
    constexpr std::size_t substeps = 100;
    const auto reference = linear_geodesic_reference(1.0, c1, cfg.alpha, cfg.N * substeps);

    OracleOutcome out;
    std::vector<Polynomial> steps;
    for (std::size_t k = 0; k <= cfg.N; ++k) {
        const double t = double(k) / double(cfg.N);
        out.closed_form.push_back(k == cfg.N ? c1 : closed(t));
        out.metric_reference.push_back(reference[k * substeps]);
        steps.push_back(Polynomial::monomial(1, cfg.n, out.closed_form.back()));
    }
    out.path = DiscretePath(std::move(steps));

    const auto dir = cfg.output / "oracle";
    std::filesystem::create_directories(dir);
    out.frame_files = emit_frames(out.path, cfg.mesh, cfg.format, dir);

    nlohmann::ordered_json rep;
    rep["name"] = cfg.name;
    rep["alpha"] = cfg.alpha;
    rep["N"] = cfg.N;
    rep["c1"] = detail::complex_json(c1);
    auto cf = nlohmann::ordered_json::array();
    auto mr = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k <= cfg.N; ++k) {
        cf.push_back(detail::complex_json(out.closed_form[k]));
        mr.push_back(detail::complex_json(out.metric_reference[k]));
    }
    rep["closed_form"] = cf;
    rep["metric_reference"] = mr;
    rep["discrete_action_closed_form"] = discrete_action(out.path, MetricParams(cfg.alpha));
    out.report_file = dir / "oracle.json";
    detail::write_text(out.report_file, rep.dump(2) + "\n");
    return out;
}

/// One experiment per alpha, run concurrently; outputs go to
/// cfg.output / "alpha_<value>".
inline std::vector<std::pair<ExperimentConfig, ExperimentOutcome>> run_sweep(const ExperimentConfig& base,
                                                                             const std::vector<double>& alphas) {
    std::vector<ExperimentConfig> configs;
    for (double a : alphas) {
        if (!(a >= 0.0) || !std::isfinite(a)) throw ValidationError("sweep: alpha values must be finite and >= 0");
        ExperimentConfig cfg = base;
        char buf[48];
        std::snprintf(buf, sizeof buf, "%g", a);
        cfg.alpha = a;
        cfg.name = base.name + "_alpha_" + buf;
        cfg.output = base.output / (std::string("alpha_") + buf);
        configs.push_back(std::move(cfg));
    }
    std::vector<std::future<ExperimentOutcome>> jobs;
    for (const auto& cfg : configs) jobs.push_back(std::async(std::launch::async, [&cfg] { return run_experiment(cfg); }));
    std::vector<std::pair<ExperimentConfig, ExperimentOutcome>> results;
    for (std::size_t i = 0; i < configs.size(); ++i) results.emplace_back(configs[i], jobs[i].get());
    return results;
}

}  // namespace confgeo
