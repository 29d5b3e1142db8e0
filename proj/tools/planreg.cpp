// planreg: globally optimal planar registration from the command line.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "planreg/planreg.hpp"

namespace fs = std::filesystem;
using namespace planreg;

namespace {

struct SolveFlags {
    double eps = 1e-4;
    double delta = 0.1;
    double trim = 0.8;
    std::string box;
    std::uint64_t max_iter = 10'000'000;
    bool no_queue = false;
};

void add_solver_flags(CLI::App* cmd, SolveFlags& f) {
    cmd->add_option("--eps", f.eps, "relative optimality tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--delta", f.delta, "box size below which the relaxation bound is used; 0 disables it")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--trim", f.trim, "fraction of points kept, p = ceil(trim * n)")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--box", f.box,
                    "root box \"zx_min zx_max zy_min zy_max th_min th_max\"; default: destination bounding box "
                    "inflated by the source radius, theta in [0, 2pi] (generated instances use their own box)");
    cmd->add_option("--max-iter", f.max_iter, "iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_flag("--no-queue", f.no_queue, "rebuild candidate queues at every node");
}

TransformBox parse_box(const std::string& text) {
    std::istringstream in(text);
    double v[6];
    for (double& x : v)
        if (!(in >> x)) throw CLI::ValidationError("--box", "expected six numbers");
    std::string extra;
    if (in >> extra) throw CLI::ValidationError("--box", "expected six numbers");
    const TransformBox b{{v[0], v[2]}, {v[1], v[3]}, v[4], v[5]};
    if (!b.valid()) throw CLI::ValidationError("--box", "invalid box");
    return b;
}

SolverConfig make_config(const SolveFlags& f) {
    SolverConfig cfg;
    cfg.epsilon = f.eps;
    cfg.delta = f.delta;
    cfg.trim_fraction = f.trim;
    cfg.max_iterations = f.max_iter;
    cfg.use_queue = !f.no_queue;
    if (!f.box.empty()) cfg.root_box = parse_box(f.box);
    return cfg;
}

void print_result(const SolveResult& r) {
    std::cout << "transform zx=" << r.transform.z.x << " zy=" << r.transform.z.y << " theta=" << r.transform.theta
              << "\nobjective " << r.objective << "  lower bound " << r.lower_bound_at_exit << "  gap "
              << r.relative_gap << "\niterations " << r.stats.iterations << "  nodes " << r.stats.nodes_created
              << "  certified " << (r.certified ? "yes" : "no") << '\n';
}

int cmd_generate(std::size_t n, double sigma, double outliers, std::uint64_t seed, const std::string& out) {
    InstanceSpec spec;
    spec.n = n;
    spec.sigma = sigma;
    spec.outlier_fraction = outliers;
    spec.seed = seed;
    const Instance inst = generate_instance(spec);
    write_json(to_json(inst), out);
    std::cout << "wrote " << out << ": n=" << n << " outliers=" << spec.outlier_count() << " true zx="
              << inst.true_transform.z.x << " zy=" << inst.true_transform.z.y
              << " theta=" << inst.true_transform.theta << '\n';
    return 0;
}

struct SolveIo {
    std::string instance, src, dest, out, trace, plot;
    bool allow_uncertified = false;
};

int cmd_solve(const SolveIo& io, const SolveFlags& flags) {
    std::optional<Instance> inst;
    std::optional<PointSet> src, dest;
    if (!io.instance.empty()) {
        inst = instance_from_json(read_json(io.instance));
        src = inst->src;
        dest = inst->dest;
    } else {
        src = read_point_set(io.src);
        dest = read_point_set(io.dest);
    }

    SolverConfig cfg = make_config(flags);
    if (flags.box.empty()) cfg.root_box = inst ? inst->spec.root_box() : bounding_root_box(*src, *dest);

    std::ofstream trace;
    if (!io.trace.empty()) {
        trace.open(io.trace);
        if (!trace) throw std::runtime_error("cannot write '" + io.trace + "'");
        cfg.on_trace = [&trace](const TraceRecord& r) { trace << to_json(r).dump() << '\n'; };
    }

    const SolveResult r = solve(*src, *dest, cfg);
    print_result(r);
    if (inst)
        std::cout << "error vs truth: |dz|=" << norm(r.transform.z - inst->true_transform.z)
                  << " |dtheta|=" << angle_distance(r.transform.theta, inst->true_transform.theta) << '\n';

    if (!io.out.empty()) {
        Json j = to_json(r);
        j["root_box"] = to_json(cfg.root_box);
        j["src"] = to_json(*src);
        j["dest"] = to_json(*dest);
        write_json(j, io.out);
    }
    if (!io.plot.empty()) detail::write_file(io.plot, svg::alignment_plot(*src, *dest, r.transform));

    if (!r.certified && !io.allow_uncertified) {
        std::cerr << "error: iteration cap reached before certification (pass --allow-uncertified to accept)\n";
        return 3;
    }
    return 0;
}

int cmd_pairwise(const std::string& dir, const std::string& out, const std::string& report, const SolveFlags& flags,
                 unsigned threads) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".txt") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.size() < 2) throw std::runtime_error("pairwise: need at least two scans in '" + dir + "'");

    std::vector<std::optional<PointSet>> scans;
    std::vector<std::string> names;
    for (const fs::path& f : files) {
        names.push_back(f.string());
        try {
            scans.emplace_back(read_point_set(f.string()));
        } catch (const std::exception& e) {
            std::cerr << "warning: skipping scan: " << e.what() << '\n';
            scans.emplace_back(std::nullopt);
        }
    }

    const SolverConfig cfg = make_config(flags);
    const PairwiseRun run = run_pairwise(scans, names, cfg, !flags.box.empty(), threads);
    write_json(to_json(run.graph), out);
    if (!report.empty()) write_json(run_report_json(run, cfg, names), report);

    bool all_certified = true;
    for (const PairOutcome& p : run.pairs) {
        if (!p.present) {
            std::cout << p.i << '-' << p.j << ": absent\n";
            continue;
        }
        all_certified = all_certified && p.result.certified;
        std::cout << p.i << '-' << p.j << ": objective " << p.result.objective << " iterations "
                  << p.result.stats.iterations << (p.result.certified ? "" : " (not certified)") << '\n';
    }
    return all_certified ? 0 : 3;
}

int cmd_map(const std::string& graph_path, std::size_t reference, const std::string& out, const std::string& svg_path,
            double trim) {
    const PoseGraphFile f = pose_graph_from_json(read_json(graph_path));
    const std::vector<ComposedPose> poses = compose_map(f.graph, reference);
    write_json(poses_json(poses, reference, f.scans), out);
    for (std::size_t v = 0; v < poses.size(); ++v) {
        std::cout << "pose " << v << ": zx=" << poses[v].pose.z.x << " zy=" << poses[v].pose.z.y
                  << " theta=" << poses[v].pose.theta << " path";
        for (std::size_t u : poses[v].path) std::cout << ' ' << u;
        std::cout << '\n';
    }
    if (!svg_path.empty()) {
        if (f.scans.size() != f.graph.node_count)
            throw std::runtime_error("map: the pose graph does not list its scan files");
        const fs::path base = fs::path(graph_path).parent_path();
        std::vector<PointSet> scans;
        for (const std::string& s : f.scans) {
            const fs::path p(s);
            scans.push_back(read_point_set((p.is_relative() && !fs::exists(p) ? base / p : p).string()));
        }
        const auto layers = map_layers(scans, f.graph, poses, reference, trim);
        detail::write_file(svg_path, svg::map_plot(layers));
    }
    return 0;
}

int cmd_plot(const std::string& result, const std::vector<std::string>& traces, const std::string& out) {
    if (!result.empty()) {
        const Json j = read_json(result);
        if (!j.contains("src") || !j.contains("dest")) throw FormatError(result + ": result has no point sets");
        const SolveResult r = solve_result_from_json(j);
        detail::write_file(out, svg::alignment_plot(point_set_from_json(j["src"]), point_set_from_json(j["dest"]),
                                                    r.transform));
    } else {
        std::vector<svg::TraceSeries> series;
        for (const std::string& t : traces) series.push_back({fs::path(t).filename().string(), read_trace(t)});
        detail::write_file(out, svg::convergence_plot(series));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Globally optimal planar point-set registration by branch and bound"};
    app.set_config("--config", "", "read options from a TOML/INI file; command-line flags take precedence");
    app.require_subcommand(1);

    std::size_t gen_n = 50;
    double gen_sigma = 1e-3, gen_outliers = 0.1;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    auto* gen = app.add_subcommand("generate", "write a random instance");
    gen->add_option("--n", gen_n, "number of points")->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--sigma", gen_sigma, "inlier noise std per axis")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    gen->add_option("--outliers", gen_outliers, "outlier fraction")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    gen->add_option("--seed", gen_seed, "random seed")->capture_default_str();
    gen->add_option("--out", gen_out, "instance file")->required();

    SolveIo sio;
    SolveFlags sflags;
    auto* sol = app.add_subcommand("solve", "register one pair of point sets");
    auto* inst_opt = sol->add_option("--instance", sio.instance, "instance file from 'generate'");
    auto* src_opt = sol->add_option("--src", sio.src, "source point-set file");
    auto* dest_opt = sol->add_option("--dest", sio.dest, "destination point-set file");
    src_opt->needs(dest_opt)->excludes(inst_opt);
    dest_opt->needs(src_opt)->excludes(inst_opt);
    sol->add_option("--out", sio.out, "result file");
    sol->add_option("--trace", sio.trace, "per-iteration UB/LB records, one JSON object per line");
    sol->add_option("--plot", sio.plot, "SVG alignment plot");
    sol->add_flag("--allow-uncertified", sio.allow_uncertified, "exit 0 even if the iteration cap was hit");
    add_solver_flags(sol, sflags);

    std::string pw_dir, pw_out, pw_report;
    SolveFlags pflags;
    unsigned pw_threads = std::max(1u, std::thread::hardware_concurrency());
    auto* pw = app.add_subcommand("pairwise", "register every pair of scans in a directory");
    pw->add_option("--scans", pw_dir, "directory of *.txt point-set files")->required()->check(CLI::ExistingDirectory);
    pw->add_option("--out", pw_out, "pose-graph file")->required();
    pw->add_option("--report", pw_report, "run report file");
    pw->add_option("--threads", pw_threads, "parallel solves")->capture_default_str()->check(CLI::PositiveNumber);
    add_solver_flags(pw, pflags);

    std::string map_graph, map_out, map_svg;
    std::size_t map_ref = 0;
    double map_trim = 0.8;
    auto* mp = app.add_subcommand("map", "compose scan poses along minimum-weight paths");
    mp->add_option("--graph", map_graph, "pose-graph file")->required()->check(CLI::ExistingFile);
    mp->add_option("--reference", map_ref, "reference scan index")->capture_default_str();
    mp->add_option("--out", map_out, "poses file")->required();
    mp->add_option("--svg", map_svg, "SVG map");
    mp->add_option("--trim", map_trim, "fraction of points drawn as inliers")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));

    std::string plot_result, plot_out;
    std::vector<std::string> plot_traces;
    auto* pl = app.add_subcommand("plot", "re-render an SVG from saved results");
    auto* res_opt = pl->add_option("--result", plot_result, "result file from 'solve'")->check(CLI::ExistingFile);
    auto* tr_opt = pl->add_option("--trace", plot_traces, "trace files from 'solve'")->check(CLI::ExistingFile);
    res_opt->excludes(tr_opt);
    pl->add_option("--out", plot_out, "SVG file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) return cmd_generate(gen_n, gen_sigma, gen_outliers, gen_seed, gen_out);
        if (*sol) {
            if (sio.instance.empty() && sio.src.empty())
                throw CLI::RequiredError("--instance or --src/--dest");
            return cmd_solve(sio, sflags);
        }
        if (*pw) return cmd_pairwise(pw_dir, pw_out, pw_report, pflags, pw_threads);
        if (*mp) return cmd_map(map_graph, map_ref, map_out, map_svg, map_trim);
        if (*pl) {
            if (plot_result.empty() && plot_traces.empty()) throw CLI::RequiredError("--result or --trace");
            return cmd_plot(plot_result, plot_traces, plot_out);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
