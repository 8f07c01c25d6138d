#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "oitk/builtin.hpp"
#include "oitk/compat.hpp"
#include "oitk/error.hpp"
#include "oitk/flow.hpp"
#include "oitk/geometry.hpp"
#include "oitk/io.hpp"
#include "oitk/lifting.hpp"
#include "oitk/parallel.hpp"
#include "oitk/sampling.hpp"

namespace oitk::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr int kDefaultResolution = 128;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

class Outputs {
public:
    explicit Outputs(const std::string& dir) : dir_(dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) throw IoError("cannot create output directory " + dir);
    }

    std::string path(const std::string& name) {
        files_.push_back(name);
        return (dir_ / name).string();
    }

    std::string report_path() const { return (dir_ / "report.json").string(); }
    const std::vector<std::string>& files() const { return files_; }

private:
    fs::path dir_;
    std::vector<std::string> files_;
};

json grid_json(const Grid& g) { return json{{"nx", g.nx}, {"ny", g.ny}, {"Lx", g.Lx}, {"Ly", g.Ly}}; }

json split_json(const EnergySplit& e) {
    return json{{"total", e.total}, {"sigma_term", e.volume_term}, {"mismatch_term", e.mismatch_term}};
}

bool is_builtin(const std::string& spec) { return spec.rfind("builtin:", 0) == 0; }

bool is_raw(const std::string& spec) {
    for (const char* ext : {".f64", ".raw", ".bin"}) {
        std::string e(ext);
        if (spec.size() >= e.size() && spec.compare(spec.size() - e.size(), e.size(), e) == 0) return true;
    }
    return false;
}

std::string normalize_spec(const std::string& spec) {
    for (const std::string& name : builtin_names())
        if (spec == name) return "builtin:" + spec;
    return spec;
}

Grid resolve_grid(const JobConfig& c) {
    double Lx = c.Lx > 0.0 ? c.Lx : 2.0 * M_PI;
    double Ly = c.Ly > 0.0 ? c.Ly : 2.0 * M_PI;
    int nx = c.nx > 0 ? c.nx : c.n;
    int ny = c.ny > 0 ? c.ny : c.n;
    if (nx > 0 || ny > 0) {
        if (nx <= 0 || ny <= 0) throw InvalidArgument("both grid dimensions are required");
        return make_grid(nx, ny, Lx, Ly);
    }
    for (const std::string& raw : {c.source, c.target}) {
        std::string spec = normalize_spec(raw);
        if (spec.empty() || is_builtin(spec)) continue;
        if (is_raw(spec)) return io::read_raw_field(spec).grid();
        return io::image_to_field(io::read_image(spec), Lx, Ly).grid();
    }
    return make_grid(kDefaultResolution, kDefaultResolution, Lx, Ly);
}

Density load(const JobConfig& c, const std::string& spec, const Grid& g, bool strict) {
    std::string s = normalize_spec(spec);
    if (s.empty()) throw InvalidArgument("missing density input");
    return io::load_density(s, c.floor, strict, &g, g.Lx, g.Ly);
}

int resolve_steps(const JobConfig& c, int fallback) {
    if (c.eps > 0.0) {
        int n = static_cast<int>(std::lround(1.0 / c.eps));
        if (n < 1 || std::abs(n * c.eps - 1.0) > 1e-9) throw InvalidArgument("--eps must be 1/N for an integer N");
        if (c.N > 0 && c.N != n) throw InvalidArgument("--steps and --eps disagree");
        return n;
    }
    return c.N > 0 ? c.N : fallback;
}

constexpr int kMaxRefinements = 4;

// Retries a lift with doubled step counts while the step guard fails.
template <class F>
auto with_refinement(int N, json& res, F&& lift) {
    for (int k = 0;; ++k) {
        try {
            auto r = lift(N);
            res["refinements"] = k;
            return r;
        } catch (const SolverError&) {
            if (k >= kMaxRefinements) throw;
            N *= 2;
        }
    }
}

LiftOptions lift_options(const JobConfig& c) {
    LiftOptions o;
    o.step.midpoint = c.midpoint;
    return o;
}

void write_warp_set(Outputs& out, const Warp& w, const std::string& stem, json& results) {
    io::write_warp(out.path(stem + ".f64"), w);
    out.path(stem + ".f64.json");
    ScalarField jac = jacobian_det(w, Direction::Forward);
    io::write_diverging_png(out.path(stem + "_jacobian.png"), jac);
    io::write_diverging_png(out.path(stem + "_inverse_jacobian.png"), w.inv_jac);
    results[stem] = json{{"jacobian_min", jac.min()},
                         {"jacobian_max", jac.max()},
                         {"consistency_error", consistency_error(w)},
                         {"max_displacement", sup_norm(w.fwd)}};
}

void write_density_set(Outputs& out, const ScalarField& f, const std::string& stem, double hi) {
    io::write_raw_field(out.path(stem + ".f64"), f);
    out.path(stem + ".f64.json");
    io::write_gray_png(out.path(stem + ".png"), f, 0.0, hi);
}

double relative_l2(const ScalarField& a, const ScalarField& b) { return l2_norm(a - b) / l2_norm(b); }

json lift_json(const LiftResult& r) {
    return json{{"residual", r.residual}, {"steps", r.steps}, {"end_time", r.end_time}, {"path_energy", r.path_energy}};
}

void write_lift_traces(Outputs& out, const LiftResult& r) {
    std::ostringstream os;
    os << "step,velocity_norm,mass_defect\n";
    os.precision(17);
    for (std::size_t k = 0; k < r.velocity_norm_trace.size(); ++k)
        os << k + 1 << ',' << r.velocity_norm_trace[k] << ','
           << (k < r.mass_defect_trace.size() ? r.mass_defect_trace[k] : 0.0) << '\n';
    io::write_text(out.path("lift_trace.csv"), os.str());
}

json cmd_match_exact(const JobConfig& c, Outputs& out) {
    Grid g = resolve_grid(c);
    Density tgt = load(c, c.target, g, true);
    int N = resolve_steps(c, 20);
    Density src = c.source.empty() ? uniform_density(g) : load(c, c.source, g, true);
    json res;
    LiftResult r = with_refinement(N, res, [&](int n) {
        return c.source.empty() ? solve_oit(tgt, n, lift_options(c))
                                : lift_path(GeodesicPath(src, tgt), n, 1.0, lift_options(c));
    });
    Warp map = r.warp.inverse();
    res.update(lift_json(r));
    res["fisher_rao_distance"] = fisher_rao_distance(src, tgt);
    write_warp_set(out, map, "oit_map", res);
    write_density_set(out, pushforward_density(map, src).density.intensity, "matched", tgt.intensity.max());
    write_lift_traces(out, r);
    return res;
}

json cmd_match_inexact(const JobConfig& c, Outputs& out) {
    if (!c.source.empty() && normalize_spec(c.source) != "builtin:uniform")
        throw InvalidArgument("match-inexact uses the uniform source");
    Grid g = resolve_grid(c);
    Density tgt = load(c, c.target, g, true);
    int N = resolve_steps(c, 20);
    json res;
    LiftResult r =
        with_refinement(N, res, [&](int n) { return solve_inexact_compatible(tgt, c.sigma, n, lift_options(c)); });
    Warp map = r.warp.inverse();
    Density vol = uniform_density(g);
    Density reached = pushforward_density(map, vol).density;
    res.update(lift_json(r));
    res["s"] = 1.0 / (1.0 + c.sigma);
    res["distance_ratio"] = fisher_rao_distance(vol, reached) / fisher_rao_distance(vol, tgt);
    write_warp_set(out, map, "oit_map", res);
    write_density_set(out, reached.intensity, "matched", tgt.intensity.max());
    write_lift_traces(out, r);
    return res;
}

json cmd_register(const JobConfig& c, Outputs& out) {
    Grid g = resolve_grid(c);
    Density src = load(c, c.source, g, false), tgt = load(c, c.target, g, false);
    FlowParams p;
    p.sigma = c.sigma;
    p.eps = c.eps > 0.0 ? c.eps : 0.2;
    p.max_iter = c.max_iter;
    p.rel_tol = c.rel_tol;
    p.lambda = c.lambda;
    p.strang = c.strang;
    p.infinite_volume = c.infinite_volume;
    double hi = std::max(src.intensity.max(), tgt.intensity.max());
    FlowCallback cb;
    if (c.checkpoint_stride > 0) {
        cb = [&](const FlowState& s) {
            if (s.k % c.checkpoint_stride != 0) return;
            char name[32];
            std::snprintf(name, sizeof(name), "frame_%05d.png", s.k);
            ScalarField f = transported_root(s);
            io::write_gray_png(out.path(name), f * f, 0.0, hi);
        };
    }
    FlowResult r = run_flow(src, tgt, p, cb);
    const FlowReport& rep = r.report;

    std::ostringstream os;
    os.precision(17);
    os << "iter,E,sigma_term,mismatch\n";
    for (std::size_t k = 0; k < rep.energy_splits.size(); ++k) {
        const EnergySplit& e = rep.energy_splits[k];
        os << k + 1 << ',' << e.total << ',' << e.volume_term << ',' << e.mismatch_term << '\n';
    }
    io::write_text(out.path("energy.csv"), os.str());

    io::write_warp(out.path("warp.f64"), r.state.warp);
    out.path("warp.f64.json");
    io::write_diverging_png(out.path("jacobian.png"), r.state.J);
    ScalarField f = transported_root(r.state);
    write_density_set(out, f * f, "transported", hi);

    ScalarField one(g, 1.0);
    return json{{"iterations", rep.iterations},
                {"stop_reason", rep.stop_reason},
                {"initial_energy", rep.initial_energy},
                {"final_energy", split_json(rep.final_energy)},
                {"min_J", rep.min_J},
                {"J_deviation_l2", l2_norm(r.state.J - one)},
                {"jacobian_consistency", rep.jacobian_consistency},
                {"warp_consistency", rep.warp_consistency},
                {"clamped_cells", rep.clamped_cells},
                {"step_halvings", rep.step_halvings},
                {"applied_step", rep.applied_step}};
}

MetricKind metric_kind(const std::string& m) {
    if (m == "conformal") return MetricKind::Conformal;
    if (m == "flat-metric") return MetricKind::Flat;
    throw InvalidArgument("unknown metric: " + m);
}

LiftResult lift_with_metric(const JobConfig& c, const Density& src, const Density& tgt, int N, double t_end) {
    GeodesicPath path(src, tgt);
    if (c.metric == "flat") return lift_path(path, N, t_end, lift_options(c));
    if (metric_kind(c.metric) == MetricKind::Conformal) return lift_path_conformal(path, N, t_end, lift_options(c));
    Warp chi = build_flat_metric(src, N, lift_options(c));
    return lift_path_flat_metric(path, chi, N, t_end, lift_options(c));
}

json cmd_morph(const JobConfig& c, Outputs& out) {
    if (c.frames < 2) throw InvalidArgument("--frames must be at least 2");
    Grid g = resolve_grid(c);
    Density src = load(c, c.source, g, true), tgt = load(c, c.target, g, true);
    int N = resolve_steps(c, 20);
    double hi = std::max(src.intensity.max(), tgt.intensity.max());
    json frames = json::array();
    for (int k = 0; k < c.frames; ++k) {
        double t = static_cast<double>(k) / (c.frames - 1);
        Density geo = fisher_rao_geodesic(src, tgt, t);
        ScalarField frame = src.intensity;
        double residual = 0.0;
        int steps = 0;
        if (k > 0) {
            json info;
            LiftResult r = with_refinement(N, info, [&](int n) { return lift_with_metric(c, src, tgt, n, t); });
            frame = pullback_density(r.warp, src).density.intensity;
            residual = r.residual;
            steps = r.steps;
        }
        char stem[32];
        std::snprintf(stem, sizeof(stem), "frame_%03d", k);
        write_density_set(out, frame, stem, hi);
        frames.push_back(json{{"t", t},
                              {"steps", steps},
                              {"lift_residual", residual},
                              {"geodesic_deviation", relative_l2(frame, geo.intensity)}});
    }
    return json{{"metric", c.metric}, {"steps", N}, {"frames", frames}};
}

json cmd_lift(const JobConfig& c, Outputs& out) {
    Grid g = resolve_grid(c);
    Density src = load(c, c.source, g, true), tgt = load(c, c.target, g, true);
    int N = resolve_steps(c, 20);
    json res;
    if (c.metric == "symmetric" || c.metric == "symmetric-flat") {
        MetricKind kind = c.metric == "symmetric" ? MetricKind::Conformal : MetricKind::Flat;
        Warp R = with_refinement(N, res, [&](int n) { return symmetric_match(src, tgt, n, kind, lift_options(c)); });
        res["residual"] = relative_l2(pushforward_density(R, src).density.intensity, tgt.intensity);
        write_warp_set(out, R, "warp", res);
        return res;
    }
    LiftResult r = with_refinement(N, res, [&](int n) { return lift_with_metric(c, src, tgt, n, c.t_end); });
    res.update(lift_json(r));
    write_warp_set(out, r.warp, "warp", res);
    write_lift_traces(out, r);
    return res;
}

json cmd_sample(const JobConfig& c, Outputs& out) {
    Grid g = resolve_grid(c);
    Density tgt = load(c, c.target, g, true);
    if (c.samples < 1) throw InvalidArgument("--n must be positive");
    json res;
    Warp map;
    if (!c.warp_path.empty()) {
        map = io::read_warp(c.warp_path);
        if (map.grid() != g) throw InputError("cached warp grid does not match the target");
    } else {
        int N = resolve_steps(c, 20);
        json info;
        LiftResult r = with_refinement(N, info, [&](int n) { return solve_oit(tgt, n, lift_options(c)); });
        info.update(lift_json(r));
        res["lift"] = info;
        map = r.warp.inverse();
        io::write_warp(out.path("oit_map.f64"), map);
        out.path("oit_map.f64.json");
    }
    auto t0 = Clock::now();
    SampleBatch batch = transport_samples(map, c.samples, c.seed);
    double regen = seconds_since(t0);

    std::string csv = "x,y\n";
    csv.reserve(batch.points.size() * 40);
    char line[64];
    for (const Point& p : batch.points) {
        int len = std::snprintf(line, sizeof(line), "%.17g,%.17g\n", p.x, p.y);
        csv.append(line, static_cast<std::size_t>(len));
    }
    io::write_text(out.path("samples.csv"), csv);

    Chi2Result fit = chi2_gof(batch, tgt, c.bins, c.bins);
    Chi2Result null_fit = chi2_gof(draw_uniform(c.samples, c.seed, g), tgt, c.bins, c.bins);
    double crit = chi2_quantile(fit.dof, 0.999);
    res["n"] = batch.n;
    res["seed"] = batch.seed;
    res["chi2"] = json{{"stat", fit.stat},     {"dof", fit.dof},           {"critical_0_999", crit},
                       {"accepted", fit.stat < crit}, {"uniform_stat", null_fit.stat},
                       {"uniform_rejected", null_fit.stat > crit}};
    res["regeneration_seconds"] = regen;
    return res;
}

json cmd_distances(const JobConfig& c, Outputs&) {
    Grid g = resolve_grid(c);
    Density a = load(c, c.source, g, false), b = load(c, c.target, g, false);
    json res{{"fisher_rao", fisher_rao_distance(a, b)},
             {"fisher_rao_prob", fisher_rao_distance_prob(a, b)},
             {"hellinger", hellinger_distance(a, b)},
             {"hellinger_prob", hellinger_distance_prob(a, b)},
             {"total_variation", total_variation(a, b)},
             {"theta", geodesic_pair(a, b).theta}};
    if (b.intensity.min() > 0.0) {
        Divergences d = auxiliary_divergences(a, b);
        res["kl"] = d.kl;
        res["chi2"] = d.chi2;
    } else {
        res["kl"] = nullptr;
        res["chi2"] = nullptr;
    }
    return res;
}

json params_json(const JobConfig& c) {
    return json{{"source", c.source},       {"target", c.target},  {"steps", c.N},
                {"eps", c.eps},             {"sigma", c.sigma},    {"max_iter", c.max_iter},
                {"rel_tol", c.rel_tol},     {"lambda", c.lambda},  {"floor", c.floor},
                {"metric", c.metric},       {"strang", c.strang},  {"midpoint", c.midpoint},
                {"t_end", c.t_end},         {"frames", c.frames},  {"checkpoint_stride", c.checkpoint_stride},
                {"samples", c.samples},     {"seed", c.seed},      {"bins", c.bins}};
}

void add_grid_options(CLI::App* sub, JobConfig& c) {
    sub->add_option("--grid", c.n, "Grid resolution in both directions");
    sub->add_option("--nx", c.nx, "Grid points along x");
    sub->add_option("--ny", c.ny, "Grid points along y");
    sub->add_option("--lx", c.Lx, "Period along x (default 2 pi)");
    sub->add_option("--ly", c.Ly, "Period along y (default 2 pi)");
    sub->add_option("--out", c.out_dir, "Output directory");
    sub->add_option("--floor", c.floor, "Background added before normalization")->check(CLI::NonNegativeNumber);
}

}  // namespace

int execute(const JobConfig& c) {
    configure_threads();
    auto t0 = Clock::now();
    json report{{"command", c.command}, {"params", params_json(c)}, {"threads", max_threads()}};
    std::unique_ptr<Outputs> out;
    int code = kOk;
    try {
        out = std::make_unique<Outputs>(c.out_dir);
        Grid g = resolve_grid(c);
        report["grid"] = grid_json(g);
        json res;
        if (c.command == "match-exact") res = cmd_match_exact(c, *out);
        else if (c.command == "match-inexact") res = cmd_match_inexact(c, *out);
        else if (c.command == "register") res = cmd_register(c, *out);
        else if (c.command == "morph") res = cmd_morph(c, *out);
        else if (c.command == "lift") res = cmd_lift(c, *out);
        else if (c.command == "sample") res = cmd_sample(c, *out);
        else if (c.command == "distances") res = cmd_distances(c, *out);
        else throw InvalidArgument("unknown command " + c.command);
        report["status"] = "ok";
        report["results"] = res;
    } catch (const InvalidArgument& e) {
        code = kConfigError;
        report["status"] = "error";
        report["error"] = json{{"kind", "config"}, {"message", e.what()}};
    } catch (const InputError& e) {
        code = kInputError;
        report["status"] = "error";
        report["error"] = json{{"kind", "input"}, {"message", e.what()}};
    } catch (const SolverError& e) {
        code = kSolverError;
        report["status"] = "error";
        report["error"] = json{{"kind", "solver"}, {"message", e.what()}};
    } catch (const IoError& e) {
        code = kIoError;
        report["status"] = "error";
        report["error"] = json{{"kind", "io"}, {"message", e.what()}};
    }
    report["exit_code"] = code;
    report["outputs"] = out ? out->files() : std::vector<std::string>{};
    report["timings"] = json{{"total_seconds", seconds_since(t0)}};
    if (code != kOk) std::cerr << "oitk: " << report["error"]["message"].get<std::string>() << '\n';
    if (out) {
        try {
            io::write_text(out->report_path(), report.dump(2) + "\n");
        } catch (const IoError& e) {
            std::cerr << "oitk: " << e.what() << '\n';
            return code == kOk ? kIoError : code;
        }
    }
    return code;
}

int run(int argc, char** argv) {
    CLI::App app{"Optimal information transport on the flat torus"};
    app.require_subcommand(1);
    JobConfig c;

    auto* exact = app.add_subcommand("match-exact", "Exact OIT matching of a target density");
    auto* inexact = app.add_subcommand("match-inexact", "Inexact matching with the compatible metric");
    auto* reg = app.add_subcommand("register", "Divergence-metric gradient flow registration");
    auto* morph = app.add_subcommand("morph", "Morph frames along the Fisher-Rao geodesic");
    auto* lift = app.add_subcommand("lift", "Lift the Fisher-Rao geodesic between two densities");
    auto* sample = app.add_subcommand("sample", "Sample a density through its OIT map");
    auto* dist = app.add_subcommand("distances", "Distances and divergences between two densities");

    for (auto* sub : {exact, inexact, reg, morph, lift, sample, dist}) add_grid_options(sub, c);
    for (auto* sub : {exact, inexact, morph, lift, sample}) sub->add_flag("--midpoint", c.midpoint, "Midpoint exp steps");
    for (auto* sub : {exact, inexact, morph, lift, sample}) {
        sub->add_option("--steps", c.N, "Number of lifting steps")->check(CLI::PositiveNumber);
        sub->add_option("--eps", c.eps, "Lifting step 1/N")->check(CLI::PositiveNumber);
    }
    for (auto* sub : {exact, inexact, sample}) sub->add_option("--target", c.target, "Target density")->required();
    exact->add_option("--source", c.source, "Source density (default uniform)");
    inexact->add_option("--source", c.source, "Source density (uniform only)");
    inexact->add_option("--sigma", c.sigma, "Balance")->check(CLI::PositiveNumber);
    for (auto* sub : {reg, morph, lift, dist}) {
        sub->add_option("--source", c.source, "Source density")->required();
        sub->add_option("--target", c.target, "Target density")->required();
    }
    reg->add_option("--sigma", c.sigma, "Balance")->check(CLI::PositiveNumber);
    reg->add_option("--eps", c.eps, "Step size in unit-mass time")->check(CLI::PositiveNumber);
    reg->add_option("--max-iter", c.max_iter, "Iteration limit")->check(CLI::PositiveNumber);
    reg->add_option("--rel-tol", c.rel_tol, "Relative energy-decrease stop")->check(CLI::NonNegativeNumber);
    reg->add_option("--lambda", c.lambda, "Inertia weight")->check(CLI::PositiveNumber);
    reg->add_flag("--strang", c.strang, "Strang splitting for the Jacobian update");
    reg->add_flag("--infinite-volume", c.infinite_volume, "Set the c-factors to 1");
    reg->add_option("--checkpoint-stride", c.checkpoint_stride, "Write a frame every k iterations");
    morph->add_option("--metric", c.metric, "flat, conformal or flat-metric")
        ->check(CLI::IsMember({"flat", "conformal", "flat-metric"}));
    lift->add_option("--metric", c.metric, "flat, conformal, flat-metric, symmetric or symmetric-flat")
        ->check(CLI::IsMember({"flat", "conformal", "flat-metric", "symmetric", "symmetric-flat"}));
    morph->add_option("--frames", c.frames, "Number of frames including both ends");
    lift->add_option("--t-end", c.t_end, "End time of the lift")->check(CLI::Range(0.0, 1.0));
    sample->add_option("--n", c.samples, "Number of samples");
    sample->add_option("--seed", c.seed, "Seed");
    sample->add_option("--bins", c.bins, "Bins per axis for the goodness-of-fit test");
    sample->add_option("--warp", c.warp_path, "Cached OIT map to reuse");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }
    for (auto* sub : app.get_subcommands()) c.command = sub->get_name();
    return execute(c);
}

}  // namespace oitk::cli
