#ifndef IPD_DRIVER_HPP
#define IPD_DRIVER_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ipd/dataset.hpp"
#include "ipd/dbscan.hpp"
#include "ipd/error.hpp"
#include "ipd/metrics.hpp"
#include "ipd/params.hpp"
#include "ipd/prototype.hpp"
#include "ipd/representatives.hpp"
#include "ipd/sampling.hpp"
#include "ipd/stability.hpp"

namespace ipd {

struct IpdConfig {
    double eps = 0.0;
    std::size_t min_pts = 0;
    double gamma = 0.2;  // fraction of n when <= 1, else a count
    double beta = 0.1;   // same convention as gamma
    double tau = 0.3;
    std::uint64_t seed = 0;
    bool auto_params = false;
    int auto_c_eps = 3;  // grid cell used when auto_params is set
    int auto_c_m = 2;
    std::size_t max_iterations = 0;  // 0 selects ceil(n / beta) + MinPts
    EtaOptions eta;
    bool refine_noise = true;
    // Compare against the held-out labels only when the held-out set grows
    // instead of against the previous iteration.
    bool literal_reference_refresh = false;
    std::size_t silhouette_sample = 0;  // members scored per iteration; 0 disables
};

struct IpdResult {
    std::vector<Label> labels;
    RepresentativeSet representatives;
    std::vector<StabilityReport> trace;
    std::uint64_t queries = 0;
    double seconds = 0.0;
    double eps = 0.0;
    std::size_t min_pts = 0;
    bool converged = false;  // loop ended with delta = 0
    bool unstable = false;   // iteration cap reached
    std::vector<PointId> prototype;           // processed ids
    std::vector<PointState> prototype_states;  // aligned with `prototype`
    NoiseRefinement refinement;
    std::size_t noise_before_refinement = 0;

    std::size_t noise_count() const {
        return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kNoise));
    }
    std::size_t cluster_count() const {
        std::vector<Label> l(labels);
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
        return l.size() - (std::binary_search(l.begin(), l.end(), kNoise) ? 1 : 0);
    }
};

namespace detail {

// Removes k uniformly chosen elements from `pool` and returns them.
inline std::vector<PointId> take_random(std::vector<PointId>& pool, std::size_t k, Rng& rng) {
    k = std::min(k, pool.size());
    const std::size_t n = pool.size();
    for (std::size_t t = 0; t < k; ++t) {
        std::uniform_int_distribution<std::size_t> pick(0, n - 1 - t);
        std::swap(pool[pick(rng)], pool[n - 1 - t]);
    }
    std::vector<PointId> out(pool.end() - static_cast<std::ptrdiff_t>(k), pool.end());
    pool.resize(n - k);
    return out;
}

inline SilhouetteResult prototype_silhouette(const PrototypeGraph& graph, std::size_t sample, Rng& rng) {
    const auto& members = graph.members();
    const std::vector<PointId> ids =
        sample_without_replacement(std::span<const PointId>(members), std::min(sample, members.size()), rng);
    std::vector<double> coords;
    std::vector<Label> labels;
    coords.reserve(ids.size() * graph.data().dim());
    for (PointId id : ids) {
        const auto p = graph.data().point(id);
        coords.insert(coords.end(), p.begin(), p.end());
        labels.push_back(graph.state(id).label);
    }
    if (ids.empty()) {
        return {};
    }
    const Dataset subset(graph.data().dim(), std::move(coords));
    return silhouette(subset, labels);
}

}  // namespace detail

/// Fills eps and/or MinPts from the estimated grid when they are unset or auto_params is on.
/// Fills eps (and MinPts when unset) from the (auto_c_eps, auto_c_m) cell of the parameter grid.
inline void resolve_params(const Dataset& data, IpdConfig& cfg) {
    if (!cfg.auto_params) {
        return;
    }
    const ParamGrid grid = estimate_params(data, {}, cfg.seed);
    const ParamCandidate* chosen = nullptr;
    for (const auto& c : grid.candidates) {
        if (c.c_eps == cfg.auto_c_eps && (chosen == nullptr || c.c_m <= cfg.auto_c_m)) {
            chosen = &c;
        }
    }
    if (chosen == nullptr) {
        throw InputError("no parameter candidate for c_eps=" + std::to_string(cfg.auto_c_eps));
    }
    cfg.eps = chosen->eps;
    if (cfg.min_pts == 0) {
        cfg.min_pts = chosen->min_pts;
    }
}

/**
 * Incremental prototype-based DBSCAN. A random prototype is clustered with a
 * reduced core threshold, then grown batch by batch while the threshold rises
 * towards MinPts; a held-out sample labeled by nearest representative measures
 * stability between iterations. The loop stops once two consecutive labelings
 * agree at full threshold or the data is used up. Processed points keep their
 * graph labels (noise optionally refined); all others take the label of their
 * nearest representative.
 */
inline IpdResult run_ipd(const Dataset& data, IpdConfig cfg) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = data.size();
    if (n < 2) {
        throw InputError("need at least two points");
    }
    resolve_params(data, cfg);
    if (!(cfg.eps > 0.0) || cfg.min_pts < 1) {
        throw InputError("eps must be > 0 and MinPts >= 1");
    }
    if (!(cfg.tau > 0.0 && cfg.tau <= 1.0)) {
        throw InputError("tau must be in (0, 1]");
    }
    const std::size_t gamma = resolve_count(cfg.gamma, n);
    const std::size_t beta = resolve_count(cfg.beta, n);
    if (gamma < 1 || gamma > n) {
        throw InputError("gamma must resolve to [1, n] (got " + std::to_string(gamma) + ")");
    }
    if (beta < 1) {
        throw InputError("beta must resolve to at least one point");
    }
    const std::size_t max_iterations =
        cfg.max_iterations != 0 ? cfg.max_iterations : (n + beta - 1) / beta + cfg.min_pts;

    Rng rng(cfg.seed);
    Rng sil_rng(cfg.seed ^ 0x5851f42d4c957f2dULL);
    QueryCounter counter;
    PrototypeInit init = init_prototype(data, gamma, cfg.eps, cfg.min_pts, rng, cfg.eta, counter);
    PrototypeGraph& graph = init.graph;
    std::vector<PointId>& remaining = init.remaining;

    std::size_t alpha = compute_test_size(graph.cluster_count(), n);
    std::vector<PointId> s_test = detail::take_random(remaining, alpha, rng);
    RepresentativeSet reps = select_representatives(graph, cfg.tau);
    std::vector<Label> omega = label_by_nearest_representative(data, s_test, reps);

    IpdResult result;
    double delta = 1.0;
    std::size_t iteration = 0;
    while (delta > 0.0 && !remaining.empty()) {
        if (iteration >= max_iterations) {
            result.unstable = true;
            break;
        }
        ++iteration;
        const std::vector<PointId> batch = detail::take_random(remaining, beta, rng);
        if (graph.eta() < cfg.min_pts) {
            graph.reevaluate_core(graph.estimate_eta(cfg.eta, rng));
        }
        graph.inc_dbscan(batch);

        reps = select_representatives(graph, cfg.tau);
        StabilityReport report;
        report.omega = std::move(omega);
        report.omega_prime = label_by_nearest_representative(data, s_test, reps);
        delta = s_test.size() < 2 ? 1.0 : instability(report.omega, report.omega_prime);
        report.delta = delta;

        const std::size_t alpha_next = compute_test_size(graph.cluster_count(), n);
        bool grown = false;
        if (alpha_next > alpha && alpha_next - alpha <= remaining.size()) {
            const auto extra = detail::take_random(remaining, alpha_next - alpha, rng);
            s_test.insert(s_test.end(), extra.begin(), extra.end());
            alpha = alpha_next;
            grown = true;
        }
        if (grown) {
            omega = label_by_nearest_representative(data, s_test, reps);
        } else {
            omega = cfg.literal_reference_refresh ? report.omega : report.omega_prime;
        }

        if (delta == 0.0 && graph.eta() < cfg.min_pts) {
            delta = 1.0;
            graph.reevaluate_core(cfg.min_pts);
            report.forced_eta = true;
            if (!cfg.literal_reference_refresh) {
                reps = select_representatives(graph, cfg.tau);
                omega = label_by_nearest_representative(data, s_test, reps);
            }
        }

        report.iteration = iteration;
        report.eta = graph.eta();
        report.clusters = graph.cluster_count();
        report.noise = graph.noise_count();
        report.processed = graph.size();
        report.test_size = s_test.size();
        report.representatives = reps.size();
        report.queries = counter.value();
        if (cfg.silhouette_sample > 0) {
            const auto sil = detail::prototype_silhouette(graph, cfg.silhouette_sample, sil_rng);
            report.silhouette = sil.value;
            report.silhouette_valid = sil.valid;
        }
        result.trace.push_back(std::move(report));
    }
    result.converged = delta == 0.0;
    if (graph.eta() < cfg.min_pts) {
        graph.reevaluate_core(cfg.min_pts);
    }

    result.representatives = select_representatives(graph, cfg.tau);
    result.labels.assign(n, kNoise);
    for (PointId id : graph.members()) {
        const PointState s = graph.state(id);
        result.labels[id] = s.label;
        result.prototype.push_back(id);
        result.prototype_states.push_back(s);
    }
    std::vector<PointId> unprocessed = remaining;
    unprocessed.insert(unprocessed.end(), s_test.begin(), s_test.end());
    const auto nn = label_by_nearest_representative(data, unprocessed, result.representatives);
    for (std::size_t i = 0; i < unprocessed.size(); ++i) {
        result.labels[unprocessed[i]] = nn[i];
    }
    result.noise_before_refinement = result.noise_count();
    if (cfg.refine_noise) {
        result.refinement = refine_noise(graph, result.representatives);
        for (const auto& [id, label] : result.refinement.reassigned) {
            result.labels[id] = label;
        }
    }

    result.queries = counter.value();
    result.eps = cfg.eps;
    result.min_pts = cfg.min_pts;
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

struct Summary {
    double mean = 0.0;
    double sd = 0.0;  // population
};

inline Summary summarize(std::span<const double> v) {
    Summary s;
    if (v.empty()) {
        return s;
    }
    for (double x : v) {
        s.mean += x;
    }
    s.mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) {
        ss += (x - s.mean) * (x - s.mean);
    }
    s.sd = std::sqrt(ss / static_cast<double>(v.size()));
    return s;
}

struct MethodStats {
    Summary nmi;
    Summary noise;
    Summary clusters;
    Summary omega;
    Summary seconds;
    Summary queries;
};

struct BenchRun {
    std::uint64_t seed = 0;
    std::size_t clusters = 0;
    std::size_t noise = 0;
    std::size_t noise_before_refinement = 0;
    double nmi = 0.0;
    double omega = 0.0;
    double seconds = 0.0;
    std::uint64_t queries = 0;
    std::size_t processed = 0;
    std::size_t iterations = 0;
    bool converged = false;
    bool unstable = false;
};

struct BenchReport {
    std::size_t runs = 0;
    bool has_truth = false;
    MethodStats ipd;
    MethodStats dbscan;
    std::vector<BenchRun> per_run;
};

/**
 * Repeats run_ipd with seeds seed, seed+1, ... and runs DBSCAN once on the
 * full data (it has no randomness). NMI and omega need ground-truth labels
 * and stay zero otherwise.
 */
inline BenchReport bench(const Dataset& data, const IpdConfig& config, std::size_t runs) {
    if (runs < 1) {
        throw InputError("runs must be >= 1");
    }
    IpdConfig cfg = config;
    resolve_params(data, cfg);
    cfg.auto_params = false;

    BenchReport report;
    report.runs = runs;
    report.has_truth = data.has_labels();
    std::vector<double> nmi, noise, clusters, om, secs, queries;
    for (std::size_t r = 0; r < runs; ++r) {
        cfg.seed = config.seed + r;
        const IpdResult res = run_ipd(data, cfg);
        BenchRun run;
        run.seed = cfg.seed;
        run.clusters = res.cluster_count();
        run.noise = res.noise_count();
        run.noise_before_refinement = res.noise_before_refinement;
        run.seconds = res.seconds;
        run.queries = res.queries;
        run.processed = res.prototype.size();
        run.iterations = res.trace.size();
        run.converged = res.converged;
        run.unstable = res.unstable;
        if (report.has_truth) {
            const EvalResult ev = evaluate(res.labels, data.labels());
            run.nmi = ev.nmi;
            run.omega = ev.omega;
        }
        nmi.push_back(run.nmi);
        noise.push_back(static_cast<double>(run.noise));
        clusters.push_back(static_cast<double>(run.clusters));
        om.push_back(run.omega);
        secs.push_back(run.seconds);
        queries.push_back(static_cast<double>(run.queries));
        report.per_run.push_back(run);
    }
    report.ipd = {summarize(nmi), summarize(noise), summarize(clusters), summarize(om), summarize(secs),
                  summarize(queries)};

    QueryCounter counter;
    const auto t0 = std::chrono::steady_clock::now();
    const DbscanResult db = dbscan(data, cfg.eps, cfg.min_pts, counter);
    const double db_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::vector<Label> db_labels = db.labels();
    report.dbscan.noise.mean = static_cast<double>(db.noise_count());
    report.dbscan.clusters.mean = static_cast<double>(db.cluster_count());
    report.dbscan.seconds.mean = db_secs;
    report.dbscan.queries.mean = static_cast<double>(counter.value());
    if (report.has_truth) {
        const EvalResult ev = evaluate(db_labels, data.labels());
        report.dbscan.nmi.mean = ev.nmi;
        report.dbscan.omega.mean = ev.omega;
    }
    return report;
}

}  // namespace ipd

#endif  // IPD_DRIVER_HPP
