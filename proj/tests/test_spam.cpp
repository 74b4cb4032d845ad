#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "emsim/errors.hpp"
#include "emsim/io.hpp"
#include "emsim/spam.hpp"
#include "oracles.hpp"

using namespace emsim;

namespace {

ReadoutModel paper_model(std::uint64_t seed, long long shots = 100000, double p_charge = 0.15) {
    ReadoutModel m;
    m.lambda_bright = 18.0;
    m.lambda_dark = 1.6;
    m.p_charge = p_charge;
    m.shots = shots;
    m.seed = seed;
    return m;
}

std::vector<double> poisson_pmf_vector(double lambda, int len) {
    std::vector<double> p(static_cast<std::size_t>(len));
    for (int n = 0; n < len; ++n) p[static_cast<std::size_t>(n)] = oracle::poisson_pmf(n, lambda);
    double sum = 0.0;
    for (double v : p) sum += v;
    for (double& v : p) v /= sum;
    return p;
}

} // namespace

TEST_SUITE("spam") {

TEST_CASE("simulate_readout degenerate modes") {
    SUBCASE("p_charge 0: every bin is dark-distributed") {
        const auto records = simulate_readout(paper_model(1, 20000, 0.0));
        double m1 = 0, m2 = 0, m3 = 0;
        for (const auto& r : records) {
            m1 += r.bin1;
            m2 += r.bin2;
            m3 += r.bin3;
        }
        const double n = static_cast<double>(records.size());
        const double se3 = 3.0 * std::sqrt(1.6 / n);
        CHECK(std::abs(m1 / n - 1.6) < se3);
        CHECK(std::abs(m2 / n - 1.6) < se3);
        CHECK(std::abs(m3 / n - 1.6) < se3);
    }
    SUBCASE("p_charge 1 with vanishing dark rate: bin 2 is identically zero") {
        ReadoutModel m = paper_model(2, 5000, 1.0);
        m.lambda_dark = 0.0;
        const auto records = simulate_readout(m);
        for (const auto& r : records) CHECK(r.bin2 == 0);
    }
    SUBCASE("paper rates recovered by the law of large numbers") {
        const auto records = simulate_readout(paper_model(3, 100000, 1.0));
        double m2 = 0, m3 = 0;
        for (const auto& r : records) {
            m2 += r.bin2;
            m3 += r.bin3;
        }
        const double n = static_cast<double>(records.size());
        CHECK(std::abs(m2 / n - 1.6) < 3.0 * std::sqrt(1.6 / n));
        CHECK(std::abs(m3 / n - 18.0) < 3.0 * std::sqrt(18.0 / n));
    }
    SUBCASE("determinism and validation") {
        const auto a = simulate_readout(paper_model(9, 1000));
        const auto b = simulate_readout(paper_model(9, 1000));
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].bin1 == b[i].bin1);
            CHECK(a[i].bin2 == b[i].bin2);
            CHECK(a[i].bin3 == b[i].bin3);
        }
        ReadoutModel bad = paper_model(1);
        bad.lambda_dark = 20.0; // above bright
        CHECK_THROWS_AS(simulate_readout(bad), config_error);
        bad = paper_model(1);
        bad.p_charge = 1.5;
        CHECK_THROWS_AS(simulate_readout(bad), config_error);
    }
}

TEST_CASE("mixture fit on a pure Poisson collapses") {
    Rng rng = make_rng(12);
    std::poisson_distribution<int> pois(5.0);
    std::vector<long long> hist(40, 0);
    for (int i = 0; i < 10000; ++i) ++hist[static_cast<std::size_t>(pois(rng))];
    const MixtureFit fit = fit_mixture(hist);
    const bool weight_collapsed =
        (fit.p0 < 0.05 && std::abs(fit.lambda1 - 5.0) < 0.25) ||
        (fit.p0 > 0.95 && std::abs(fit.lambda2 - 5.0) < 0.25);
    const bool means_collapsed =
        std::abs(fit.lambda1 - 5.0) < 0.5 && std::abs(fit.lambda2 - 5.0) < 0.5;
    CHECK((weight_collapsed || means_collapsed));
}

TEST_CASE("mixture fit recovers a 50/50 bright-dark mixture within 5%") {
    Rng rng = make_rng(13);
    std::poisson_distribution<int> bright(18.0), dark(1.6);
    std::vector<long long> hist(64, 0);
    for (int i = 0; i < 100000; ++i) {
        const int n = (uniform01(rng) < 0.5) ? dark(rng) : bright(rng);
        ++hist[static_cast<std::size_t>(n)];
    }
    const MixtureFit fit = fit_mixture(hist);
    CHECK(std::abs(fit.p0 - 0.5) / 0.5 < 0.05);
    CHECK(std::abs(fit.lambda1 - 18.0) / 18.0 < 0.05);
    CHECK(std::abs(fit.lambda2 - 1.6) / 1.6 < 0.05);

    // EM ascent property: the likelihood never decreases.
    REQUIRE(fit.ll_trace.size() >= 2);
    for (std::size_t i = 1; i < fit.ll_trace.size(); ++i)
        CHECK(fit.ll_trace[i] >= fit.ll_trace[i - 1] - 1e-9);
}

TEST_CASE("mixture fit rejects degenerate histograms") {
    std::vector<long long> all_zero(10, 0);
    all_zero[0] = 5000;
    CHECK_THROWS_AS(fit_mixture(all_zero), fit_error);

    std::vector<long long> tiny(10, 0);
    tiny[2] = 30;
    tiny[9] = 30;
    CHECK_THROWS_AS(fit_mixture(tiny), fit_error); // under 100 counts
}

TEST_CASE("threshold crossover") {
    MixtureFit fit;
    fit.p0 = 0.5;
    fit.lambda1 = 18.0;
    fit.lambda2 = 1.6;
    const double n_m = solve_threshold(fit);
    CHECK(n_m == doctest::Approx(6.7758287699584185).epsilon(1e-12));

    // Scan oracle: the weighted densities cross between floor and ceil.
    const double before = 0.5 * oracle::poisson_pmf(6, 18.0) - 0.5 * oracle::poisson_pmf(6, 1.6);
    const double after = 0.5 * oracle::poisson_pmf(7, 18.0) - 0.5 * oracle::poisson_pmf(7, 1.6);
    CHECK(before < 0.0);
    CHECK(after > 0.0);

    // Numeric root of the defining equation agrees to 1e-9.
    auto g = [&](double n) {
        return std::log((1.0 - fit.p0) / fit.p0) + n * std::log(fit.lambda1 / fit.lambda2) -
               (fit.lambda1 - fit.lambda2);
    };
    double lo = 0.0, hi = 60.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    CHECK(std::abs(n_m - 0.5 * (lo + hi)) < 1e-9);

    SUBCASE("e-fold spacing gives lambda2 (e - 1)") {
        MixtureFit f2;
        f2.p0 = 0.5;
        f2.lambda1 = std::exp(1.0);
        f2.lambda2 = 1.0;
        CHECK(solve_threshold(f2) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
    }
    SUBCASE("degenerate fits rejected") {
        MixtureFit bad = fit;
        bad.lambda2 = bad.lambda1;
        CHECK_THROWS_AS(solve_threshold(bad), std::domain_error);
        bad = fit;
        bad.p0 = 0.0;
        CHECK_THROWS_AS(solve_threshold(bad), std::domain_error);
        bad.p0 = 1.0;
        CHECK_THROWS_AS(solve_threshold(bad), std::domain_error);
    }
}

TEST_CASE("e_spam objective") {
    SUBCASE("separable deltas") {
        std::vector<double> dark(11, 0.0), bright(11, 0.0);
        dark[0] = 1.0;
        bright[10] = 1.0;
        const auto r = e_spam(dark, bright);
        CHECK(r.value == 0.0);
        CHECK(r.n_m == 1); // smallest minimizer
    }
    SUBCASE("indistinguishable distributions") {
        const auto p = poisson_pmf_vector(3.0, 30);
        const auto r = e_spam(p, p);
        CHECK(r.value == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(r.n_m == 0);
    }
    SUBCASE("paper-rate Poisson pair, frozen regression value") {
        const auto dark = poisson_pmf_vector(1.6, 61);
        const auto bright = poisson_pmf_vector(18.0, 61);
        const auto r = e_spam(dark, bright);
        CHECK(r.value == doctest::Approx(0.0011896033858887778).epsilon(1e-9));
        CHECK(r.n_m == 7);
        const auto scan = oracle::espam_scan(dark, bright);
        CHECK(r.value == doctest::Approx(scan.value).epsilon(1e-12));
        CHECK(r.n_m == scan.n_m);
    }
    SUBCASE("implementation matches the exhaustive scan on random pairs") {
        Rng rng = make_rng(15);
        for (int trial = 0; trial < 100; ++trial) {
            const int len = 5 + static_cast<int>(rng() % 40);
            std::vector<double> a(static_cast<std::size_t>(len)), b(static_cast<std::size_t>(len));
            double sa = 0.0, sb = 0.0;
            for (int i = 0; i < len; ++i) {
                a[static_cast<std::size_t>(i)] = uniform01(rng);
                b[static_cast<std::size_t>(i)] = uniform01(rng);
                sa += a[static_cast<std::size_t>(i)];
                sb += b[static_cast<std::size_t>(i)];
            }
            for (double& v : a) v /= sa;
            for (double& v : b) v /= sb;
            const auto got = e_spam(a, b);
            const auto want = oracle::espam_scan(a, b);
            CHECK(got.value == doctest::Approx(want.value).epsilon(1e-12));
            CHECK(got.n_m == want.n_m);
        }
    }
    SUBCASE("unnormalized input rejected") {
        std::vector<double> bad(5, 0.3);
        const auto ok = poisson_pmf_vector(2.0, 20);
        CHECK_THROWS_AS(e_spam(bad, ok), std::domain_error);
        CHECK_THROWS_AS(e_spam(ok, bad), std::domain_error);
    }
}

TEST_CASE("post-selection sweep") {
    const auto records = simulate_readout(paper_model(77));

    SUBCASE("c_th 0 reproduces the unconditioned statistics") {
        const auto res = post_selection_sweep(records, {0.0});
        REQUIRE(res.size() == 1);
        CHECK(res[0].p_success == 1.0);

        int max_count = 0;
        for (const auto& r : records) max_count = std::max({max_count, r.bin2, r.bin3});
        std::vector<double> dark(static_cast<std::size_t>(max_count) + 1, 0.0);
        std::vector<double> bright(static_cast<std::size_t>(max_count) + 1, 0.0);
        for (const auto& r : records) {
            dark[static_cast<std::size_t>(r.bin2)] += 1.0;
            bright[static_cast<std::size_t>(r.bin3)] += 1.0;
        }
        for (double& v : dark) v /= static_cast<double>(records.size());
        for (double& v : bright) v /= static_cast<double>(records.size());
        const auto unconditioned = oracle::espam_scan(dark, bright);
        CHECK(res[0].e_spam == doctest::Approx(unconditioned.value).epsilon(1e-9));
        CHECK(res[0].n_m == unconditioned.n_m);
    }
    SUBCASE("monotone in c_th") {
        std::vector<double> c_ths;
        for (int c = 0; c <= 22; ++c) c_ths.push_back(c);
        const auto res = post_selection_sweep(records, c_ths);
        for (std::size_t i = 1; i < res.size(); ++i) {
            CHECK(res[i].p_success <= res[i - 1].p_success); // survivor sets nest
            CHECK(res[i].e_spam <= res[i - 1].e_spam + 0.005);
        }
    }
    SUBCASE("no survivors flagged empty") {
        const auto res = post_selection_sweep(records, {1e9});
        REQUIRE(res.size() == 1);
        CHECK(res[0].empty);
        CHECK(res[0].p_success == 0.0);
    }
}

TEST_CASE("quadrant analysis") {
    SUBCASE("reported-count arithmetic") {
        CHECK(quadrant_error(143, 1508, 29) ==
              doctest::Approx(172.0 / 1680.0).epsilon(1e-12));
        CHECK(100.0 * quadrant_error(143, 1508, 29) == doctest::Approx(10.24).epsilon(1e-3));
    }
    SUBCASE("constructed records reproduce the counts") {
        std::vector<ReadoutRecord> records;
        for (int i = 0; i < 143; ++i) records.push_back({0, 5, 0});
        for (int i = 0; i < 1508; ++i) records.push_back({0, 0, 5});
        for (int i = 0; i < 29; ++i) records.push_back({0, 5, 5});
        for (int i = 0; i < 8320; ++i) records.push_back({0, 0, 0});
        const auto q = quadrant_analysis(records, 3.5);
        CHECK(q.blue == 143);
        CHECK(q.red == 1508);
        CHECK(q.magenta == 29);
        CHECK(q.gray == 8320);
        CHECK(q.error == doctest::Approx(0.10238095238095238).epsilon(1e-12));
    }
    SUBCASE("all red means zero error") {
        std::vector<ReadoutRecord> records(100, {0, 0, 9});
        CHECK(quadrant_analysis(records, 3.5).error == 0.0);
    }
    SUBCASE("simulated fractions match the closed-form Poisson tails") {
        const auto records = simulate_readout(paper_model(55, 10000, 0.15));
        const auto q = quadrant_analysis(records, 3.5);
        const double n = 10000.0;
        const double t_dark = oracle::poisson_tail(4, 1.6); // P(count >= 3.5)
        const double t_bright = oracle::poisson_tail(4, 18.0);
        const double pc = 0.15;
        const double exp_gray = pc * (1 - t_dark) * (1 - t_bright) +
                                (1 - pc) * (1 - t_dark) * (1 - t_dark);
        const double exp_red = pc * (1 - t_dark) * t_bright + (1 - pc) * (1 - t_dark) * t_dark;
        const double exp_blue = pc * t_dark * (1 - t_bright) + (1 - pc) * t_dark * (1 - t_dark);
        const double exp_mag = pc * t_dark * t_bright + (1 - pc) * t_dark * t_dark;
        auto within3se = [&](long long count, double p) {
            const double se = std::sqrt(p * (1.0 - p) / n);
            return std::abs(static_cast<double>(count) / n - p) < 3.0 * se;
        };
        CHECK(within3se(q.gray, exp_gray));
        CHECK(within3se(q.red, exp_red));
        CHECK(within3se(q.blue, exp_blue));
        CHECK(within3se(q.magenta, exp_mag));
    }
    SUBCASE("invalid threshold") {
        CHECK_THROWS_AS(quadrant_analysis({}, 0.0), std::domain_error);
    }
}

TEST_CASE("mean time to success arithmetic") {
    ReadoutModel m = paper_model(1);
    m.t_cycle_us = 60.0;
    CHECK(mean_time_to_success_us(m, 0.03) == doctest::Approx(2000.0).epsilon(1e-12)); // 2 ms
    CHECK(mean_time_to_success_us(m, 0.03) <= 2000.0 + 1e-9);
    CHECK(std::isinf(mean_time_to_success_us(m, 0.0)));
}

TEST_CASE("records csv round trip and error reporting") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "emsim_spam_io_test";
    fs::create_directories(dir);

    const auto records = simulate_readout(paper_model(5, 500));
    save_records_csv(dir / "records.csv", records);
    const auto loaded = load_records_csv(dir / "records.csv");
    REQUIRE(loaded.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(loaded[i].bin1 == records[i].bin1);
        CHECK(loaded[i].bin2 == records[i].bin2);
        CHECK(loaded[i].bin3 == records[i].bin3);
    }

    {
        std::ofstream out(dir / "bad.csv");
        out << "shot,bin1,bin2,bin3\n0,1,2,3\nnot,a,row\n";
    }
    try {
        load_records_csv(dir / "bad.csv");
        FAIL("expected io_error");
    } catch (const io_error& e) {
        CHECK(std::string(e.what()).find(":3") != std::string::npos); // row number surfaced
    }
    fs::remove_all(dir);
}

} // TEST_SUITE
