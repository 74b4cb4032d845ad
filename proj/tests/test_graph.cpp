#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "emsim/errors.hpp"
#include "emsim/graph.hpp"
#include "oracles.hpp"

using namespace emsim;

namespace {

std::vector<Emitter> emitters_from_intervals(const std::vector<std::pair<double, double>>& iv) {
    std::vector<Emitter> out;
    for (std::size_t i = 0; i < iv.size(); ++i) {
        Emitter e;
        e.id = static_cast<int>(i);
        e.f0_ghz = iv[i].first;
        e.delta_vm_ghz = iv[i].second - iv[i].first;
        e.linewidth_mhz = 50.0;
        out.push_back(e);
    }
    return out;
}

std::vector<std::vector<int>> canonical(std::vector<std::vector<int>> parts) {
    for (auto& p : parts) std::sort(p.begin(), p.end());
    std::sort(parts.begin(), parts.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return parts;
}

} // namespace

TEST_SUITE("graph") {

TEST_CASE("hand-checkable components") {
    const auto ensemble = emitters_from_intervals({{0.0, 1.0}, {0.5, 1.5}, {3.0, 4.0}});
    const auto report = interval_components(ensemble, TuningLaw{});
    CHECK(canonical(report.components) == std::vector<std::vector<int>>{{0, 1}, {2}});
    CHECK(report.largest_size == 2);
    CHECK(report.p_c == doctest::Approx(2.0 / 3.0));
    CHECK(report.non_singleton_nodes == 2);
}

TEST_CASE("zero tunability means singletons") {
    const auto ensemble = emitters_from_intervals({{0.0, 0.0}, {1.0, 1.0}, {2.5, 2.5}, {7.0, 7.0}});
    const auto report = interval_components(ensemble, TuningLaw{});
    CHECK(report.components.size() == 4);
    CHECK(report.largest_size == 1);
    CHECK(report.p_c == doctest::Approx(0.25));
}

TEST_CASE("touching intervals connect") {
    const auto ensemble = emitters_from_intervals({{0.0, 1.0}, {1.0, 2.0}});
    CHECK(interval_components(ensemble, TuningLaw{}).largest_size == 2);
}

TEST_CASE("empty ensemble rejected") {
    CHECK_THROWS_AS(interval_components({}, TuningLaw{}), std::domain_error);
}

TEST_CASE("sweep partition matches union-find oracle") {
    Rng rng = make_rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 120);
        std::vector<std::pair<double, double>> iv;
        iv.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double lo = uniform(rng, 0.0, 10.0);
            iv.emplace_back(lo, lo + uniform(rng, 0.0, 1.5));
        }
        const auto report = interval_components(emitters_from_intervals(iv), TuningLaw{});
        oracle::IntervalUnionFind uf(iv);
        CHECK(canonical(report.components) == uf.partition());
    }
}

TEST_CASE("pc_sweep at the ratio limits") {
    EnsembleConfig base;
    base.v_inh_ghz = 20.0;
    base.rng_seed = 5;

    SUBCASE("ratio 0 -> exactly 1/n every trial") {
        const auto curve = pc_sweep(base, TuningLaw{}, {0.0}, {100, 400}, 5);
        CHECK(curve.p_c_mean[0][0] == 1.0 / 100.0);
        CHECK(curve.p_c_mean[0][1] == 1.0 / 400.0);
        CHECK(curve.p_c_stderr[0][0] == 0.0);
        CHECK(curve.p_c_stderr[0][1] == 0.0);
    }
    SUBCASE("ratio 1 at n = 1000 saturates") {
        const auto curve = pc_sweep(base, TuningLaw{}, {1.0}, {1000}, 10);
        CHECK(curve.p_c_mean[0][0] >= 0.99);
    }
    SUBCASE("invalid inputs") {
        CHECK_THROWS_AS(pc_sweep(base, TuningLaw{}, {1.2}, {10}, 1), config_error);
        CHECK_THROWS_AS(pc_sweep(base, TuningLaw{}, {0.5}, {10}, 0), config_error);
        CHECK_THROWS_AS(pc_sweep(base, TuningLaw{}, {0.5}, {0}, 1), config_error);
    }
}

TEST_CASE("p_c monotone in tuning ratio within Monte-Carlo noise") {
    EnsembleConfig base;
    base.v_inh_ghz = 20.0;
    base.rng_seed = 23;
    std::vector<double> ratios;
    for (int i = 0; i <= 10; ++i) ratios.push_back(0.002 * std::pow(40.0, i / 10.0));
    const auto curve = pc_sweep(base, TuningLaw{}, ratios, {200}, 10);
    for (std::size_t i = 0; i + 1 < ratios.size(); ++i) {
        const double slack =
            2.0 * (curve.p_c_stderr[i][0] + curve.p_c_stderr[i + 1][0]);
        CHECK(curve.p_c_mean[i + 1][0] >= curve.p_c_mean[i][0] - slack);
    }
}

TEST_CASE("parallel pc_sweep reduces identically to serial") {
    EnsembleConfig base;
    base.rng_seed = 31;
    const std::vector<double> ratios{0.01, 0.05, 0.2};
    const auto serial = pc_sweep(base, TuningLaw{}, ratios, {50, 150}, 4, 1);
    const auto parallel = pc_sweep(base, TuningLaw{}, ratios, {50, 150}, 4, 4);
    CHECK(serial.p_c_mean == parallel.p_c_mean);
    CHECK(serial.p_c_stderr == parallel.p_c_stderr);
}

TEST_CASE("channel graph") {
    const TuningLaw law;
    FrequencyGrid grid;

    SUBCASE("disjoint reachable sets give no edges") {
        auto ensemble = emitters_from_intervals({{1.9, 2.1}, {5.9, 6.1}});
        const auto g = channel_graph(ensemble, law, grid, 60.0);
        CHECK(g.edges.empty());
        CHECK(g.members[0] == std::vector<int>{0});
        CHECK(g.members[2] == std::vector<int>{1});
    }
    SUBCASE("three emitters in one channel form a triangle") {
        auto ensemble = emitters_from_intervals({{9.5, 10.5}, {9.8, 10.2}, {9.9, 10.8}});
        for (auto& e : ensemble) e.linewidth_mhz = 30.0;
        const auto g = channel_graph(ensemble, law, grid, 60.0);
        CHECK(g.edges.size() == 3);
    }
    SUBCASE("an emitter reaching channels 7 and 8 bridges both cliques") {
        auto ensemble = emitters_from_intervals(
            {{13.9, 14.1}, {13.8, 16.2}, {15.9, 16.1}}); // channels at 14 and 16 GHz
        for (auto& e : ensemble) e.linewidth_mhz = 30.0;
        const auto g = channel_graph(ensemble, law, grid, 60.0);
        CHECK(g.node_channels[1] == std::vector<int>{7, 8});
        CHECK(g.edges == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
    }
    SUBCASE("linewidth gate drops edges but not membership") {
        auto ensemble = emitters_from_intervals({{9.5, 10.5}, {9.8, 10.2}});
        ensemble[0].linewidth_mhz = 30.0;
        ensemble[1].linewidth_mhz = 500.0;
        const auto g = channel_graph(ensemble, law, grid, 60.0);
        CHECK(g.edges.empty());
        CHECK(g.members[4].size() == 2);
    }
}

TEST_CASE("dense channels: channel edges form a subset of interval edges") {
    EnsembleConfig base;
    base.n_qubit = 50;
    base.v_inh_ghz = 20.0;
    base.mean_tuning_ghz = 1.0;
    base.rng_seed = 41;
    const auto ensemble = sample_ensemble(base);
    const TuningLaw law;
    FrequencyGrid dense;
    dense.v0_ghz = -1.0; // combs start below the inhomogeneous window
    dense.delta_v_ghz = base.v_inh_ghz / 1e4;
    dense.k_max = 300000;
    const auto g = channel_graph(ensemble, law, dense, 1e9);
    CHECK(!g.edges.empty());
    for (const auto& [i, j] : g.edges) {
        const Interval a = tuning_interval(ensemble[static_cast<std::size_t>(i)], law);
        const Interval b = tuning_interval(ensemble[static_cast<std::size_t>(j)], law);
        CHECK(a.intersects(b));
    }
}

TEST_CASE("scaling estimate") {
    const auto s = scaling_estimate(2.3, 1024.0, 1.0, 11.0);
    CHECK(s.n_qubit == doctest::Approx(25907.2).epsilon(1e-12));
    CHECK(s.n_link == doctest::Approx(2355.2).epsilon(1e-12));
    CHECK(s.n_link <= s.n_qubit);
    CHECK(scaling_estimate(2.3, 1024.0, 0.0, 11.0).n_qubit == 0.0);
    const auto single = scaling_estimate(2.3, 1024.0, 1.0, 1.0);
    CHECK(single.n_qubit == doctest::Approx(2355.2).epsilon(1e-12));
    CHECK_THROWS_AS(scaling_estimate(-1.0, 1.0, 1.0, 1.0), std::domain_error);
}

TEST_CASE("resolvable spots") {
    CHECK(resolvable_spots(2650.0, 2.52) == 868521);
    CHECK(resolvable_spots(2.0, 1.0) == 3); // floor(pi)
    CHECK(resolvable_spots(1000.0, 10.0) == 7853);
    CHECK_THROWS_AS(resolvable_spots(0.0, 1.0), std::domain_error);
}

TEST_CASE("quoted operating point: 2 GHz of 150 GHz is 1.3 percent") {
    const double ratio_percent = 100.0 * 2.0 / 150.0;
    CHECK(std::round(ratio_percent * 10.0) / 10.0 == doctest::Approx(1.3));
}

} // TEST_SUITE
