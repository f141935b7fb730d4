#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

#include "ipd/generators.hpp"
#include "ipd/prototype.hpp"
#include "support/oracles.hpp"

using namespace ipd;

namespace {

std::vector<PointId> iota_ids(std::size_t n, PointId from = 0) {
    std::vector<PointId> ids(n);
    std::iota(ids.begin(), ids.end(), from);
    return ids;
}

Dataset line(std::vector<double> xs) { return Dataset(1, std::move(xs)); }

Dataset uniform(std::size_t n, double scale, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, scale);
    std::vector<double> c(2 * n);
    for (double& v : c) {
        v = u(rng);
    }
    return Dataset(2, std::move(c));
}

void expect_consistent(const PrototypeGraph& g) {
    EXPECT_EQ(oracle::closure_violation(g), "");
    EXPECT_EQ(oracle::component_violation(g), "");
}

}  // namespace

TEST(NextEta, MeanAboveMinPtsStepsByOne) {
    EXPECT_EQ(next_eta(12.0, 2, 7), 3u);
    EXPECT_EQ(next_eta(12.0, 6, 7), 7u);
}

TEST(NextEta, RoundedMean) { EXPECT_EQ(next_eta(3.0, 1, 7), 3u); }

TEST(NextEta, ClampedAboveCurrent) { EXPECT_EQ(next_eta(1.2, 2, 7), 3u); }

TEST(NextEta, NeverExceedsMinPtsAndNeverDecreases) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> mean(0.0, 30.0);
    std::uniform_int_distribution<std::size_t> mp(1, 15);
    for (int t = 0; t < 2000; ++t) {
        const std::size_t min_pts = mp(rng);
        std::uniform_int_distribution<std::size_t> et(1, min_pts);
        const std::size_t eta = et(rng);
        const std::size_t next = next_eta(mean(rng), eta, min_pts);
        EXPECT_LE(next, min_pts);
        EXPECT_GE(next, eta);
        if (eta < min_pts) {
            EXPECT_GT(next, eta);
        }
    }
}

TEST(EstimateEta, MeanNeighborCountThree) {
    // Ten well separated triplets: every cached neighborhood has three points.
    std::vector<double> xs;
    for (int t = 0; t < 10; ++t) {
        xs.insert(xs.end(), {t * 10.0, t * 10.0 + 0.1, t * 10.0 + 0.2});
    }
    const Dataset d = line(xs);
    QueryCounter c;
    PrototypeGraph g(d, 0.5, 7, c);
    g.seed(iota_ids(d.size()), 1);
    Rng rng(3);
    EXPECT_DOUBLE_EQ(g.mean_neighbor_count({}, rng), 3.0);
    EXPECT_EQ(g.estimate_eta({}, rng), 3u);
}

TEST(EstimateEta, SparseCacheClampsToEtaPlusOne) {
    // 16 isolated points and two pairs: mean neighborhood size 24 / 20 = 1.2.
    std::vector<double> xs;
    for (int i = 0; i < 16; ++i) {
        xs.push_back(i * 10.0);
    }
    xs.insert(xs.end(), {500.0, 500.1, 600.0, 600.1});
    const Dataset d = line(xs);
    QueryCounter c;
    PrototypeGraph g(d, 0.5, 7, c);
    g.seed(iota_ids(d.size()), 2);
    Rng rng(3);
    EXPECT_DOUBLE_EQ(g.mean_neighbor_count({}, rng), 1.2);
    EXPECT_EQ(g.estimate_eta({}, rng), 3u);
}

TEST(EstimateEta, SampleSizeUsesFractionWithFloor) {
    const Dataset d = uniform(1000, 30.0, 2);
    QueryCounter c;
    PrototypeGraph g(d, 1.0, 5, c);
    g.seed(iota_ids(d.size()), 2);
    // Deterministic per rng state; different options give different samples.
    Rng a(1), b(1);
    EXPECT_EQ(g.mean_neighbor_count({.fraction = 0.1, .min_sample = 30}, a),
              g.mean_neighbor_count({.fraction = 0.1, .min_sample = 30}, b));
    Rng full(1);
    double mean = 0.0;
    for (PointId id : g.members()) {
        mean += static_cast<double>(g.neighbor_count(id));
    }
    mean /= 1000.0;
    EXPECT_NEAR(g.mean_neighbor_count({.fraction = 1.0, .min_sample = 30}, full), mean, 1e-12);
}

TEST(InitPrototype, FullSampleLeavesNothing) {
    const Dataset d = uniform(200, 10.0, 4);
    Rng rng(5);
    QueryCounter c;
    auto init = init_prototype(d, d.size(), 1.0, 4, rng, {}, c);
    EXPECT_TRUE(init.remaining.empty());
    EXPECT_EQ(init.graph.size(), d.size());
    EXPECT_EQ(c.value(), d.size());
    expect_consistent(init.graph);
}

TEST(InitPrototype, FractionSizes) {
    const Dataset d = uniform(788, 40.0, 1);
    Rng rng(5);
    QueryCounter c;
    auto init = init_prototype(d, resolve_count(0.2, d.size()), 1.5, 5, rng, {}, c);
    EXPECT_EQ(init.graph.size(), 158u);
    EXPECT_EQ(init.remaining.size(), 630u);
    std::set<PointId> all(init.remaining.begin(), init.remaining.end());
    for (PointId id : init.graph.members()) {
        EXPECT_TRUE(all.insert(id).second);
    }
    EXPECT_EQ(all.size(), 788u);
    EXPECT_GE(init.graph.eta(), 2u);
    EXPECT_LE(init.graph.eta(), 5u);
}

TEST(InitPrototype, DeterministicPerSeed) {
    const Dataset d = uniform(300, 10.0, 4);
    auto a = init_prototype(d, 60, 1.0, 4, 42);
    auto b = init_prototype(d, 60, 1.0, 4, 42);
    EXPECT_EQ(a.graph.members(), b.graph.members());
    EXPECT_EQ(a.graph.member_labels(), b.graph.member_labels());
    EXPECT_EQ(a.remaining, b.remaining);
}

TEST(InitPrototype, GammaOutOfRangeThrows) {
    const Dataset d = uniform(10, 1.0, 4);
    Rng rng(1);
    EXPECT_THROW(init_prototype(d, 11, 1.0, 4, rng), InputError);
    EXPECT_THROW(init_prototype(d, 0, 1.0, 4, rng), InputError);
}

TEST(InitPrototype, FullSampleAtMinPtsMatchesDbscan) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Dataset d = generate_gaussian_blobs(4, 60, 30.0, 6.0, seed);
        Rng rng(seed);
        QueryCounter c;
        auto init = init_prototype(d, d.size(), 1.0, 5, rng, {}, c);
        init.graph.reevaluate_core(5);
        const auto ids = iota_ids(d.size());
        const auto ref = oracle::dbscan(d, ids, 1.0, 5);
        std::vector<Label> labels(d.size());
        for (PointId id : ids) {
            labels[id] = init.graph.state(id).label;
            EXPECT_EQ(init.graph.state(id).status == PointStatus::core, ref.status[id] == PointStatus::core);
        }
        std::string why;
        EXPECT_TRUE(oracle::equivalent(ref, labels, &why)) << why;
        expect_consistent(init.graph);
    }
}

TEST(ReevaluateCore, SameEtaIsNoop) {
    const Dataset d = uniform(100, 10.0, 4);
    QueryCounter c;
    PrototypeGraph g(d, 1.0, 6, c);
    g.seed(iota_ids(d.size()), 3);
    EXPECT_TRUE(g.reevaluate_core(3).empty());
}

TEST(ReevaluateCore, LowerEtaThrows) {
    const Dataset d = uniform(20, 10.0, 4);
    QueryCounter c;
    PrototypeGraph g(d, 1.0, 6, c);
    g.seed(iota_ids(d.size()), 3);
    EXPECT_THROW(g.reevaluate_core(2), InputError);
}

TEST(ReevaluateCore, DemotionStripsDependentBorder) {
    // v=0 is border only through u=1, which has exactly three neighbors.
    // a=1.9 stays core thanks to the group at 2.5..2.8.
    const Dataset d = line({0.0, 1.0, 1.9, 2.5, 2.6, 2.7, 2.8});
    QueryCounter c;
    PrototypeGraph g(d, 1.0, 6, c);
    g.seed(iota_ids(d.size()), 3);
    ASSERT_EQ(g.state(1).status, PointStatus::core);
    ASSERT_EQ(g.state(0).status, PointStatus::border);

    const ChangeLog log = g.reevaluate_core(4);
    EXPECT_EQ(g.state(1).status, PointStatus::border);
    EXPECT_EQ(g.state(0).status, PointStatus::noise);
    EXPECT_EQ(g.state(0).label, kNoise);
    EXPECT_EQ(g.state(2).status, PointStatus::core);
    EXPECT_EQ(g.eta(), 4u);
    bool saw_u = false, saw_v = false;
    for (const auto& ch : log) {
        saw_u = saw_u || (ch.id == 1 && ch.before.status == PointStatus::core && ch.after.status == PointStatus::border);
        saw_v = saw_v || (ch.id == 0 && ch.before.status == PointStatus::border && ch.after.status == PointStatus::noise);
    }
    EXPECT_TRUE(saw_u);
    EXPECT_TRUE(saw_v);
    expect_consistent(g);
}

TEST(ReevaluateCore, SplitsClusterWhenBridgeCoreIsDemoted) {
    // Two dense groups joined by a single bridge core at 5.0.
    const Dataset d = line({3.0, 3.3, 3.6, 3.9, 4.2, 5.0, 5.8, 6.1, 6.4, 6.7, 7.0});
    QueryCounter c;
    PrototypeGraph g(d, 0.8, 6, c);
    g.seed(iota_ids(d.size()), 3);
    ASSERT_EQ(g.cluster_count(), 1u);
    g.reevaluate_core(4);
    EXPECT_NE(g.state(5).status, PointStatus::core);
    EXPECT_EQ(g.cluster_count(), 2u);
    EXPECT_NE(g.state(0).label, g.state(10).label);
    EXPECT_EQ(std::min(g.state(0).label, g.state(10).label), 0);
    expect_consistent(g);
}

TEST(ReevaluateCore, CascadeMatchesFreshDbscan) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const Dataset d = uniform(10, 3.0, seed);
        const auto ids = iota_ids(d.size());
        QueryCounter c;
        PrototypeGraph g(d, 1.0, 8, c);
        g.seed(ids, 2);
        std::mt19937_64 rng(seed);
        std::size_t eta = 2;
        while (eta < 8) {
            eta += 1 + rng() % 2;
            eta = std::min<std::size_t>(eta, 8);
            g.reevaluate_core(eta);
            const auto ref = oracle::dbscan(d, ids, 1.0, eta);
            std::vector<Label> labels(d.size());
            for (PointId id : ids) {
                labels[id] = g.state(id).label;
                ASSERT_EQ(g.state(id).status == PointStatus::core, ref.status[id] == PointStatus::core);
                ASSERT_EQ(g.state(id).status == PointStatus::noise, ref.status[id] == PointStatus::noise);
            }
            std::string why;
            ASSERT_TRUE(oracle::equivalent(ref, labels, &why)) << "seed " << seed << ": " << why;
            ASSERT_EQ(oracle::closure_violation(g), "");
            ASSERT_EQ(oracle::component_violation(g), "");
        }
    }
}

TEST(IncDbscan, BridgeMergesUnderSmallestId) {
    const Dataset d = line({0.0, 0.5, 1.0, 3.0, 3.5, 4.0, 2.0});
    QueryCounter c;
    PrototypeGraph g(d, 1.0, 3, c);
    const std::vector<PointId> proto{0, 1, 2, 3, 4, 5};
    g.seed(proto, 2);
    ASSERT_EQ(g.cluster_count(), 2u);
    const Label c0 = g.state(0).label;
    const Label c1 = g.state(5).label;
    ASSERT_NE(c0, c1);
    const std::vector<PointId> batch{6};
    g.inc_dbscan(batch);
    EXPECT_EQ(g.state(6).status, PointStatus::core);
    for (PointId id = 0; id < 7; ++id) {
        EXPECT_EQ(g.state(id).label, std::min(c0, c1));
    }
    expect_consistent(g);
}

TEST(IncDbscan, EmptyBatchChangesNothing) {
    const Dataset d = uniform(50, 5.0, 1);
    QueryCounter c;
    PrototypeGraph g(d, 1.0, 4, c);
    g.seed(iota_ids(d.size()), 3);
    const auto before = g.member_labels();
    const Label next = g.next_cluster_id();
    EXPECT_EQ(g.inc_dbscan({}), next);
    EXPECT_EQ(g.member_labels(), before);
}

TEST(IncDbscan, AlreadyProcessedPointsAreSkipped) {
    const Dataset d = uniform(50, 5.0, 1);
    QueryCounter c;
    PrototypeGraph g(d, 1.0, 4, c);
    g.seed(iota_ids(40), 3);
    const auto q = c.value();
    const std::vector<PointId> batch{1, 2, 45};
    g.inc_dbscan(batch);
    EXPECT_EQ(c.value(), q + 1);
    EXPECT_EQ(g.size(), 41u);
}

TEST(IncDbscan, SecondBlobFoundsNewCluster) {
    const Dataset d = generate_gaussian_blobs(2, 120, 60.0, 30.0, 8);
    std::vector<PointId> a, b;
    for (PointId i = 0; i < d.size(); ++i) {
        (d.labels()[i] == 0 ? a : b).push_back(i);
    }
    QueryCounter c;
    PrototypeGraph g(d, 1.0, 5, c);
    g.seed(a, 4);
    const std::size_t before = g.cluster_count();
    const Label next = g.next_cluster_id();
    g.inc_dbscan(b);
    std::set<Label> new_labels;
    for (PointId id : b) {
        if (g.state(id).label >= next) {
            new_labels.insert(g.state(id).label);
        }
    }
    EXPECT_EQ(g.cluster_count(), before + 1);
    EXPECT_EQ(new_labels.size(), 1u);

    const auto ids = iota_ids(d.size());
    const auto ref = oracle::dbscan(d, ids, 1.0, 4);
    std::vector<Label> labels(d.size());
    for (PointId id : ids) {
        labels[id] = g.state(id).label;
        EXPECT_EQ(g.state(id).status == PointStatus::core, ref.status[id] == PointStatus::core);
    }
    std::string why;
    EXPECT_TRUE(oracle::equivalent(ref, labels, &why)) << why;
    expect_consistent(g);
}

TEST(IncDbscan, QueriesStayInsideProcessedPoints) {
    const Dataset d = uniform(600, 20.0, 7);
    QueryCounter c;
    Rng rng(2);
    auto init = init_prototype(d, 100, 1.2, 5, rng, {}, c);
    std::size_t processed = 100;
    std::vector<PointId>& rem = init.remaining;
    for (int it = 0; it < 3; ++it) {
        std::vector<PointId> batch(rem.end() - 50, rem.end());
        rem.resize(rem.size() - 50);
        init.graph.inc_dbscan(batch);
        processed += 50;
        EXPECT_EQ(c.value(), processed);
    }
    const std::set<PointId> untouched(rem.begin(), rem.end());
    for (PointId id : init.graph.members()) {
        for (PointId q : init.graph.neighborhood(id)) {
            EXPECT_FALSE(untouched.count(q));
        }
        EXPECT_EQ(init.graph.neighborhood(id).size(),
                  oracle::range_query(d, init.graph.members(), id, 1.2).size());
    }
}

TEST(IncDbscan, RandomGrowthKeepsInvariantsAndEndsAtDbscan) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const Dataset d = seed % 2 == 0 ? uniform(150, 8.0, seed) : generate_gaussian_blobs(3, 50, 20.0, 4.0, seed);
        const std::size_t min_pts = 4 + seed % 4;
        QueryCounter c;
        Rng rng(seed);
        auto init = init_prototype(d, 20 + seed % 30, 0.9, min_pts, rng, {}, c);
        PrototypeGraph& g = init.graph;
        auto& rem = init.remaining;
        ASSERT_EQ(oracle::closure_violation(g), "");
        while (!rem.empty()) {
            if (g.eta() < min_pts) {
                g.reevaluate_core(g.estimate_eta({}, rng));
                ASSERT_EQ(oracle::closure_violation(g), "") << "seed " << seed;
                ASSERT_EQ(oracle::component_violation(g), "") << "seed " << seed;
            }
            const std::size_t k = std::min<std::size_t>(rem.size(), 1 + rng() % 25);
            std::vector<PointId> batch(rem.end() - static_cast<std::ptrdiff_t>(k), rem.end());
            rem.resize(rem.size() - k);
            g.inc_dbscan(batch);
            ASSERT_EQ(oracle::closure_violation(g), "") << "seed " << seed;
            ASSERT_EQ(oracle::component_violation(g), "") << "seed " << seed;
        }
        g.reevaluate_core(min_pts);
        const auto ids = iota_ids(d.size());
        const auto ref = oracle::dbscan(d, ids, 0.9, min_pts);
        std::vector<Label> labels(d.size());
        for (PointId id : ids) {
            labels[id] = g.state(id).label;
            ASSERT_EQ(g.state(id).status == PointStatus::core, ref.status[id] == PointStatus::core);
        }
        std::string why;
        ASSERT_TRUE(oracle::equivalent(ref, labels, &why)) << "seed " << seed << ": " << why;
    }
}

TEST(IncDbscan, DensityReachablePointsCarryMemberCluster) {
    // Member core at 0 with label c; the batch extends a chain of cores to the right.
    std::vector<double> xs{-0.4, -0.2, 0.0};
    for (int i = 1; i <= 20; ++i) {
        xs.push_back(0.3 * i);
    }
    const Dataset d = line(xs);
    QueryCounter c;
    PrototypeGraph g(d, 0.5, 3, c);
    g.seed(std::vector<PointId>{0, 1, 2}, 3);
    const Label lc = g.state(2).label;
    ASSERT_GE(lc, 0);
    g.inc_dbscan(iota_ids(20, 3));
    for (PointId id = 0; id < d.size(); ++id) {
        EXPECT_EQ(g.state(id).label, lc);
    }
}

TEST(ReevaluateNoiseBorder, NoiseWithGrownCacheBecomesCore) {
    const Dataset d = line({0.0, 0.2, 0.4, 5.0});
    QueryCounter c;
    PrototypeGraph g(d, 0.5, 3, c);
    g.seed(std::vector<PointId>{0, 3}, 2);
    ASSERT_EQ(g.state(0).status, PointStatus::noise);
    g.inc_dbscan(std::vector<PointId>{1, 2});
    EXPECT_EQ(g.state(0).status, PointStatus::core);
    expect_consistent(g);
}

TEST(ReevaluateNoiseBorder, DirectTransitions) {
    const Dataset d = line({0.0, 0.2, 0.4, 2.0, 2.3});
    QueryCounter c;
    PrototypeGraph g(d, 0.5, 3, c);
    g.seed(iota_ids(5), 3);
    ASSERT_EQ(g.state(3).status, PointStatus::noise);
    // Below threshold: noise -> border of the expanding cluster.
    const auto ch = g.reevaluate_noise_border(3, 7);
    ASSERT_TRUE(ch.has_value());
    EXPECT_EQ(ch->after.status, PointStatus::border);
    EXPECT_EQ(ch->after.label, 7);
    // Core points are left alone.
    const PointState core_before = g.state(1);
    ASSERT_EQ(core_before.status, PointStatus::core);
    EXPECT_FALSE(g.reevaluate_noise_border(1, 9).has_value());
    EXPECT_EQ(g.state(1), core_before);
}

TEST(ReevaluateNoiseBorder, BorderPromotedWhenThresholdMet) {
    const Dataset d = line({0.0, 0.2, 0.4, 0.6});
    QueryCounter c;
    PrototypeGraph g(d, 0.25, 3, c);
    g.seed(std::vector<PointId>{0, 1, 2}, 3);
    ASSERT_EQ(g.state(2).status, PointStatus::border);
    g.inc_dbscan(std::vector<PointId>{3});
    EXPECT_EQ(g.state(2).status, PointStatus::core);
    EXPECT_EQ(g.state(3).label, g.state(1).label);
    expect_consistent(g);
}

TEST(EdgeState, Classification) {
    const Dataset d = line({0.0, 0.2, 0.4, 0.6, 3.0, 3.2});
    QueryCounter c;
    PrototypeGraph g(d, 0.25, 3, c);
    g.seed(iota_ids(6), 3);
    EXPECT_EQ(g.edge_state(1, 2), EdgeState::v_yes);
    EXPECT_EQ(g.edge_state(0, 1), EdgeState::v_weak);
    EXPECT_EQ(g.edge_state(4, 5), EdgeState::v_no);
}

TEST(PrototypeGraph, NonMemberAccessIsInternalError) {
    const Dataset d = line({0.0, 1.0});
    QueryCounter c;
    PrototypeGraph g(d, 0.5, 2, c);
    g.seed(std::vector<PointId>{0}, 2);
    EXPECT_THROW(g.state(1), InternalError);
    EXPECT_THROW(g.neighborhood(1), InternalError);
}
