// Clusters the synthetic shapes dataset and compares against plain DBSCAN.
//
//   ipd_sample [per_shape] [seed]

#include <cstdlib>
#include <iomanip>
#include <iostream>

#include "ipd/ipd.hpp"

int main(int argc, char** argv) {
    using namespace ipd;
    const std::size_t per_shape = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 2000;
    const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 7;

    const Dataset data = generate_shapes(shapes::aquanimal_like(), per_shape, seed);
    std::cout << "points: " << data.size() << "\n";

    IpdConfig cfg;
    cfg.auto_params = true;
    cfg.min_pts = 6;
    cfg.seed = seed;
    const IpdResult r = run_ipd(data, cfg);

    std::cout << std::fixed << std::setprecision(4);
    std::cout << "eps " << r.eps << "  MinPts " << r.min_pts << "\n\n";
    std::cout << "iter  delta    eta  clusters  processed  queries\n";
    for (const auto& t : r.trace) {
        std::cout << std::setw(4) << t.iteration << "  " << t.delta << std::setw(5) << t.eta << std::setw(10)
                  << t.clusters << std::setw(11) << t.processed << std::setw(9) << t.queries << "\n";
    }

    const EvalResult ev = evaluate(r.labels, data.labels());
    std::cout << "\nIPD     clusters " << r.cluster_count() << "  noise " << r.noise_count() << "  nmi " << ev.nmi
              << "  queries " << r.queries << "  seconds " << r.seconds << "\n";

    QueryCounter counter;
    const DbscanResult db = dbscan(data, r.eps, r.min_pts, counter);
    const EvalResult dev = evaluate(db.labels(), data.labels());
    std::cout << "DBSCAN  clusters " << db.cluster_count() << "  noise " << db.noise_count() << "  nmi " << dev.nmi
              << "  queries " << counter.value() << "\n";
    return 0;
}
