#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ipd/ipd.hpp"
#include "ipd/json_io.hpp"

namespace {

using namespace ipd;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitUnstable = 2;

struct OutFile {
    explicit OutFile(const std::string& path) {
        if (!path.empty() && path != "-") {
            file.open(path);
            if (!file) {
                throw InputError("cannot write '" + path + "'");
            }
        }
    }
    std::ostream& stream() { return file.is_open() ? file : std::cout; }
    std::ofstream file;
};

Dataset load_input(const std::string& path, bool truth_col) {
    CsvOptions opts;
    opts.label_column = truth_col;
    if (path == "-") {
        return read_csv(std::cin, opts, "stdin");
    }
    return load_csv(path, opts);
}

Dataset generate_from_config(const json& cfg) {
    const std::string type = cfg.value("type", std::string("blobs"));
    const auto seed = cfg.value("seed", std::uint64_t{0});
    if (type == "blobs") {
        return generate_gaussian_blobs(cfg.value("k", std::size_t{30}), cfg.value("per_cluster", std::size_t{25}),
                                       cfg.value("box", 100.0), cfg.value("min_sep", 10.0), seed);
    }
    if (type == "shapes") {
        std::vector<Polygon> polys;
        if (cfg.contains("polygons")) {
            for (const auto& p : cfg.at("polygons")) {
                Polygon poly;
                for (const auto& v : p) {
                    poly.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
                }
                polys.push_back(std::move(poly));
            }
        } else {
            polys = shapes::aquanimal_like();
        }
        return generate_shapes(polys, cfg.value("per_shape", std::size_t{1000}), seed);
    }
    throw InputError("unknown generator type '" + type + "'");
}

void print_eval(const EvalResult& e, bool as_json) {
    if (as_json) {
        std::cout << to_json(e).dump(2) << '\n';
        return;
    }
    std::cout << std::fixed << std::setprecision(4) << "nmi       " << e.nmi << '\n'
              << "noise     " << e.noise << '\n'
              << "nu        " << e.nu << '\n'
              << "omega     " << e.omega << '\n'
              << "clusters  " << e.clusters << '\n';
}

void add_ipd_options(CLI::App* cmd, IpdConfig& cfg) {
    cmd->add_option("--eps", cfg.eps, "Neighborhood radius");
    cmd->add_option("--minpts", cfg.min_pts, "Core threshold (neighbors including the point)");
    cmd->add_option("--gamma", cfg.gamma, "Prototype size: fraction of n if <= 1, else a count")->capture_default_str();
    cmd->add_option("--beta", cfg.beta, "Batch size: fraction of n if <= 1, else a count")->capture_default_str();
    cmd->add_option("--tau", cfg.tau, "Representative density-ratio threshold")->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    cmd->add_flag("--auto-params", cfg.auto_params, "Estimate eps (and MinPts when unset) from the data");
    cmd->add_option("--auto-c-eps", cfg.auto_c_eps, "Grid row for --auto-params (1..3)")->capture_default_str();
    cmd->add_option("--auto-c-m", cfg.auto_c_m, "Grid column for --auto-params")->capture_default_str();
    cmd->add_option("--max-iterations", cfg.max_iterations, "Iteration cap (0 = ceil(n/beta) + MinPts)");
    cmd->add_option("--silhouette-sample", cfg.silhouette_sample, "Members scored per iteration in the trace");
    cmd->add_flag("--literal-refresh", cfg.literal_reference_refresh,
                  "Refresh the reference labeling only when the held-out set grows");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Incremental prototype-based DBSCAN"};
    app.require_subcommand(1);

    // gen
    std::string gen_type = "blobs", gen_config, gen_out = "-";
    std::size_t gen_k = 30, gen_per = 25;
    double gen_box = 100.0, gen_sep = 10.0;
    std::uint64_t gen_seed = 0;
    auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset as CSV (x..., label)");
    gen->add_option("type", gen_type, "blobs | shapes")->check(CLI::IsMember({"blobs", "shapes"}));
    gen->add_option("--config", gen_config, "JSON generator configuration");
    gen->add_option("-k,--k", gen_k, "Number of blobs")->capture_default_str();
    gen->add_option("--per-cluster", gen_per, "Points per blob or per shape")->capture_default_str();
    gen->add_option("--box", gen_box, "Side of the square holding blob means")->capture_default_str();
    gen->add_option("--min-sep", gen_sep, "Minimum distance between blob means")->capture_default_str();
    gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
    gen->add_option("-o,--out", gen_out, "Output CSV ('-' for stdout)");

    // estimate-params
    std::string ep_input;
    std::size_t ep_m = 0;
    std::uint64_t ep_seed = 0;
    bool ep_json = false, ep_truth = false;
    auto* ep = app.add_subcommand("estimate-params", "Candidate eps / MinPts grid from nearest-neighbor statistics");
    ep->add_option("-i,--input", ep_input, "Input CSV")->required();
    ep->add_option("--m", ep_m, "Sampled points (0 = min(500, n))");
    ep->add_option("--seed", ep_seed, "Random seed");
    ep->add_flag("--truth-col", ep_truth, "Last input column holds ground-truth labels");
    ep->add_flag("--json", ep_json, "Print JSON instead of a table");

    // fit
    IpdConfig fit_cfg;
    std::string fit_input, fit_labels = "-", fit_reps, fit_trace;
    bool fit_truth = false, fit_no_refine = false;
    auto* fit = app.add_subcommand("fit", "Cluster a dataset");
    fit->add_option("-i,--input", fit_input, "Input CSV")->required();
    add_ipd_options(fit, fit_cfg);
    fit->add_flag("--truth-col", fit_truth, "Last input column holds ground-truth labels (reported, not used)");
    fit->add_flag("--no-refine", fit_no_refine, "Skip the final noise refinement");
    fit->add_option("--labels-out", fit_labels, "Label CSV output ('-' for stdout)");
    fit->add_option("--reps-out", fit_reps, "Representatives as JSON lines");
    fit->add_option("--trace-out", fit_trace, "Per-iteration stability trace as JSON lines");

    // label
    std::string lab_reps, lab_input, lab_out = "-";
    bool lab_truth = false;
    auto* lab = app.add_subcommand("label", "Label points by their nearest representative");
    lab->add_option("--reps", lab_reps, "Representatives (JSON lines)")->required();
    lab->add_option("-i,--input", lab_input, "Points CSV")->required();
    lab->add_flag("--truth-col", lab_truth, "Last input column holds labels and is ignored");
    lab->add_option("-o,--out", lab_out, "Label CSV output");

    // eval
    std::string ev_pred, ev_truth;
    bool ev_json = false, ev_truth_col = false;
    auto* ev = app.add_subcommand("eval", "Compare predicted labels with ground truth");
    ev->add_option("--pred", ev_pred, "Predicted labels CSV")->required();
    ev->add_option("--truth", ev_truth, "Ground-truth labels CSV (or a dataset with --truth-col)")->required();
    ev->add_flag("--truth-col", ev_truth_col, "Read truth from the last column of a dataset CSV");
    ev->add_flag("--json", ev_json, "Print JSON");

    // bench
    IpdConfig bench_cfg;
    std::string bench_input;
    std::size_t bench_runs = 10;
    bool bench_truth = false, bench_json = false;
    auto* be = app.add_subcommand("bench", "Repeated seeded runs against DBSCAN");
    be->add_option("-i,--input", bench_input, "Input CSV")->required();
    add_ipd_options(be, bench_cfg);
    be->add_option("--runs", bench_runs, "Number of seeded runs")->capture_default_str();
    be->add_flag("--truth-col", bench_truth, "Last input column holds ground-truth labels");
    be->add_flag("--json", bench_json, "Print JSON");

    // dbscan
    std::string db_input, db_out = "-";
    double db_eps = 0.0;
    std::size_t db_minpts = 0;
    bool db_truth = false;
    auto* db = app.add_subcommand("dbscan", "Plain DBSCAN over the whole dataset");
    db->add_option("-i,--input", db_input, "Input CSV")->required();
    db->add_option("--eps", db_eps, "Neighborhood radius")->required();
    db->add_option("--minpts", db_minpts, "Core threshold")->required();
    db->add_flag("--truth-col", db_truth, "Last input column holds ground-truth labels");
    db->add_option("-o,--out", db_out, "Partition CSV (point_id,label,status)");

    // k-dist
    std::string kd_input, kd_out = "-";
    std::size_t kd_k = 4;
    bool kd_truth = false;
    auto* kd = app.add_subcommand("k-dist", "Sorted k-th nearest-neighbor distances");
    kd->add_option("-i,--input", kd_input, "Input CSV")->required();
    kd->add_option("-k,--k", kd_k, "Neighbor rank")->capture_default_str();
    kd->add_flag("--truth-col", kd_truth, "Last input column holds labels and is ignored");
    kd->add_option("-o,--out", kd_out, "Output CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*gen) {
            Dataset d;
            if (!gen_config.empty()) {
                std::ifstream in(gen_config);
                if (!in) {
                    throw InputError("cannot open '" + gen_config + "'");
                }
                d = generate_from_config(json::parse(in));
            } else if (gen_type == "blobs") {
                d = generate_gaussian_blobs(gen_k, gen_per, gen_box, gen_sep, gen_seed);
            } else {
                d = generate_shapes(shapes::aquanimal_like(), gen_per, gen_seed);
            }
            OutFile out(gen_out);
            write_csv(out.stream(), d);
            return kExitOk;
        }

        if (*ep) {
            const Dataset d = load_input(ep_input, ep_truth);
            ParamOptions opts;
            opts.m = ep_m;
            const ParamGrid g = estimate_params(d, opts, ep_seed);
            if (ep_json) {
                std::cout << to_json(g).dump(2) << '\n';
            } else {
                std::cout << std::fixed << std::setprecision(4) << "mu_eps " << g.mu_eps << "  sigma_eps "
                          << g.sigma_eps << '\n'
                          << "c_eps  c_M  eps       MinPts\n";
                for (const auto& c : g.candidates) {
                    std::cout << std::setw(5) << c.c_eps << std::setw(5) << c.c_m << "  " << std::setw(8) << c.eps
                              << "  " << c.min_pts << '\n';
                }
            }
            return kExitOk;
        }

        if (*fit) {
            const Dataset d = load_input(fit_input, fit_truth);
            fit_cfg.refine_noise = !fit_no_refine;
            if (!fit_cfg.auto_params && (fit_cfg.eps <= 0.0 || fit_cfg.min_pts == 0)) {
                throw InputError("--eps and --minpts are required unless --auto-params is given");
            }
            const IpdResult r = run_ipd(d, fit_cfg);
            {
                OutFile out(fit_labels);
                write_labels(out.stream(), r.labels);
            }
            if (!fit_reps.empty()) {
                OutFile out(fit_reps);
                write_representatives(out.stream(), r.representatives);
            }
            if (!fit_trace.empty()) {
                OutFile out(fit_trace);
                write_trace(out.stream(), r.trace);
            }
            std::cerr << "eps=" << r.eps << " minpts=" << r.min_pts << " clusters=" << r.cluster_count()
                      << " noise=" << r.noise_count() << " queries=" << r.queries << " iterations=" << r.trace.size()
                      << " converged=" << (r.converged ? "yes" : "no") << '\n';
            if (!r.refinement.warning.empty() && fit_cfg.refine_noise) {
                std::cerr << "warning: " << r.refinement.warning << '\n';
            }
            if (d.has_labels()) {
                const EvalResult e = evaluate(r.labels, d.labels());
                std::cerr << "nmi=" << e.nmi << " omega=" << e.omega << '\n';
            }
            if (r.unstable) {
                std::cerr << "error: iteration cap reached before the clustering stabilized\n";
                return kExitUnstable;
            }
            return kExitOk;
        }

        if (*lab) {
            std::ifstream in(lab_reps);
            if (!in) {
                throw InputError("cannot open '" + lab_reps + "'");
            }
            const RepresentativeSet reps = read_representatives(in);
            const Dataset d = load_input(lab_input, lab_truth);
            OutFile out(lab_out);
            write_labels(out.stream(), label_by_nearest_representative(d, reps));
            return kExitOk;
        }

        if (*ev) {
            const std::vector<Label> pred = load_labels(ev_pred);
            const std::vector<Label> truth =
                ev_truth_col ? load_input(ev_truth, true).labels() : load_labels(ev_truth);
            print_eval(evaluate(pred, truth), ev_json);
            return kExitOk;
        }

        if (*be) {
            const Dataset d = load_input(bench_input, bench_truth);
            if (!bench_cfg.auto_params && (bench_cfg.eps <= 0.0 || bench_cfg.min_pts == 0)) {
                throw InputError("--eps and --minpts are required unless --auto-params is given");
            }
            const BenchReport b = bench(d, bench_cfg, bench_runs);
            if (bench_json) {
                std::cout << to_json(b).dump(2) << '\n';
            } else {
                auto row = [](const char* name, const Summary& s) {
                    std::cout << std::left << std::setw(10) << name << std::right << std::fixed
                              << std::setprecision(4) << std::setw(14) << s.mean << " +- " << s.sd << '\n';
                };
                std::cout << "IPD (" << b.runs << " runs)\n";
                row("nmi", b.ipd.nmi);
                row("noise", b.ipd.noise);
                row("clusters", b.ipd.clusters);
                row("omega", b.ipd.omega);
                row("seconds", b.ipd.seconds);
                row("queries", b.ipd.queries);
                std::cout << "DBSCAN\n";
                row("nmi", b.dbscan.nmi);
                row("noise", b.dbscan.noise);
                row("clusters", b.dbscan.clusters);
                row("omega", b.dbscan.omega);
                row("seconds", b.dbscan.seconds);
                row("queries", b.dbscan.queries);
            }
            return kExitOk;
        }

        if (*db) {
            const Dataset d = load_input(db_input, db_truth);
            QueryCounter counter;
            const DbscanResult r = dbscan(d, db_eps, db_minpts, counter);
            OutFile out(db_out);
            write_partition(out.stream(), r);
            std::cerr << "clusters=" << r.cluster_count() << " noise=" << r.noise_count() << '\n';
            if (d.has_labels()) {
                print_eval(evaluate(r.labels(), d.labels()), false);
            }
            return kExitOk;
        }

        if (*kd) {
            const Dataset d = load_input(kd_input, kd_truth);
            OutFile out(kd_out);
            out.stream() << "rank,distance\n";
            const auto curve = k_dist_curve(d, kd_k);
            out.stream().precision(10);
            for (std::size_t i = 0; i < curve.size(); ++i) {
                out.stream() << i << ',' << curve[i] << '\n';
            }
            return kExitOk;
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const GenerationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}
