#include "emsim/spam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "emsim/errors.hpp"
#include "emsim/rng.hpp"

namespace emsim {

void ReadoutModel::validate() const {
    // lambda_dark = 0 is admitted as the degenerate all-zero-counts limit.
    if (lambda_dark < 0.0 || lambda_dark >= lambda_bright)
        throw config_error("readout model: need 0 <= lambda_dark < lambda_bright");
    if (lambda_bright <= 0.0) throw config_error("readout model: lambda_bright must be > 0");
    if (p_charge < 0.0 || p_charge > 1.0)
        throw config_error("readout model: p_charge must lie in [0, 1]");
    if (shots < 0) throw config_error("readout model: shots must be >= 0");
    if (t_m_us <= 0.0 || t_cycle_us <= 0.0)
        throw config_error("readout model: durations must be > 0");
}

namespace {

int draw_poisson(Rng& rng, std::poisson_distribution<int>& dist, double lambda) {
    if (lambda <= 0.0) return 0;
    return dist(rng);
}

double log_poisson_pmf(int n, double lambda) {
    if (lambda <= 0.0) return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return n * std::log(lambda) - lambda - std::lgamma(static_cast<double>(n) + 1.0);
}

} // namespace

std::vector<ReadoutRecord> simulate_readout(const ReadoutModel& model) {
    model.validate();

    Rng rng = make_rng(derive_seed(model.seed, {0x5a}));
    std::poisson_distribution<int> bright(std::max(model.lambda_bright, 1e-300));
    std::poisson_distribution<int> bright3(std::max(model.bright_bin3(), 1e-300));
    std::poisson_distribution<int> dark(std::max(model.lambda_dark, 1e-300));

    std::vector<ReadoutRecord> records;
    records.reserve(static_cast<std::size_t>(model.shots));
    for (long long s = 0; s < model.shots; ++s) {
        ReadoutRecord r;
        const bool charged = uniform01(rng) < model.p_charge;
        if (charged) {
            r.bin1 = draw_poisson(rng, bright, model.lambda_bright);
            r.bin2 = draw_poisson(rng, dark, model.lambda_dark);
            r.bin3 = draw_poisson(rng, bright3, model.bright_bin3());
        } else {
            r.bin1 = draw_poisson(rng, dark, model.lambda_dark);
            r.bin2 = draw_poisson(rng, dark, model.lambda_dark);
            r.bin3 = draw_poisson(rng, dark, model.lambda_dark);
        }
        records.push_back(r);
    }
    return records;
}

namespace {

struct EmState {
    double p0, lambda1, lambda2, ll;
};

double histogram_ll(const std::vector<long long>& h, double p0, double l1, double l2) {
    double ll = 0.0;
    for (std::size_t n = 0; n < h.size(); ++n) {
        if (h[n] == 0) continue;
        const double lp1 = log_poisson_pmf(static_cast<int>(n), l1);
        const double lp2 = log_poisson_pmf(static_cast<int>(n), l2);
        // log((1-p0) e^lp1 + p0 e^lp2), stabilized.
        const double a = std::log1p(-p0) + lp1;
        const double b = std::log(p0) + lp2;
        const double m = std::max(a, b);
        ll += static_cast<double>(h[n]) * (m + std::log(std::exp(a - m) + std::exp(b - m)));
    }
    return ll;
}

EmState run_em(const std::vector<long long>& h, double p0, double l1, double l2,
               std::vector<double>* trace) {
    constexpr int kMaxIter = 500;
    constexpr double kTol = 1e-9;
    constexpr double kLambdaFloor = 1e-9;
    constexpr double kWeightFloor = 1e-12;

    p0 = std::clamp(p0, kWeightFloor, 1.0 - kWeightFloor);
    l1 = std::max(l1, kLambdaFloor);
    l2 = std::max(l2, kLambdaFloor);

    double total = 0.0;
    for (long long c : h) total += static_cast<double>(c);

    double ll = histogram_ll(h, p0, l1, l2);
    if (trace) trace->push_back(ll);
    for (int iter = 0; iter < kMaxIter; ++iter) {
        double w2 = 0.0, s2 = 0.0, w1 = 0.0, s1 = 0.0;
        for (std::size_t n = 0; n < h.size(); ++n) {
            if (h[n] == 0) continue;
            const double a = std::log1p(-p0) + log_poisson_pmf(static_cast<int>(n), l1);
            const double b = std::log(p0) + log_poisson_pmf(static_cast<int>(n), l2);
            const double m = std::max(a, b);
            const double za = std::exp(a - m), zb = std::exp(b - m);
            const double r2 = zb / (za + zb); // responsibility of the dark component
            const double cnt = static_cast<double>(h[n]);
            w2 += cnt * r2;
            s2 += cnt * r2 * static_cast<double>(n);
            w1 += cnt * (1.0 - r2);
            s1 += cnt * (1.0 - r2) * static_cast<double>(n);
        }
        p0 = std::clamp(w2 / total, kWeightFloor, 1.0 - kWeightFloor);
        l1 = std::max(w1 > 0.0 ? s1 / w1 : kLambdaFloor, kLambdaFloor);
        l2 = std::max(w2 > 0.0 ? s2 / w2 : kLambdaFloor, kLambdaFloor);

        const double next_ll = histogram_ll(h, p0, l1, l2);
        if (trace) trace->push_back(next_ll);
        if (next_ll - ll < kTol) {
            ll = next_ll;
            break;
        }
        ll = next_ll;
    }
    return {p0, l1, l2, ll};
}

} // namespace

MixtureFit fit_mixture(const std::vector<long long>& histogram) {
    long long total = 0;
    int support = 0;
    for (long long c : histogram) {
        if (c < 0) throw fit_error("fit_mixture: negative histogram count");
        total += c;
        if (c > 0) ++support;
    }
    if (total < 100) throw fit_error("fit_mixture: need at least 100 counts");
    if (support < 2) throw fit_error("fit_mixture: degenerate single-bin histogram");

    // Quantile-anchored initialization: dark component from the lower
    // quartile, bright from the top decile.
    auto quantile_mean = [&](double q_lo, double q_hi) {
        const double lo = q_lo * static_cast<double>(total);
        const double hi = q_hi * static_cast<double>(total);
        double cum = 0.0, w = 0.0, s = 0.0;
        for (std::size_t n = 0; n < histogram.size(); ++n) {
            const double cnt = static_cast<double>(histogram[n]);
            const double take = std::max(0.0, std::min(cum + cnt, hi) - std::max(cum, lo));
            w += take;
            s += take * static_cast<double>(n);
            cum += cnt;
        }
        return w > 0.0 ? s / w : 0.0;
    };
    const double init_l2 = quantile_mean(0.0, 0.25);
    const double init_l1 = quantile_mean(0.90, 1.0);

    Rng rng = make_rng(0x6d6c65u); // fixed seed: restarts are part of the algorithm
    EmState best{0, 0, 0, -std::numeric_limits<double>::infinity()};
    std::vector<double> best_trace;
    for (int attempt = 0; attempt < 4; ++attempt) {
        double p0 = 0.5, l1 = init_l1, l2 = init_l2;
        if (attempt > 0) {
            p0 = uniform(rng, 0.2, 0.8);
            l1 = init_l1 * uniform(rng, 0.7, 1.3);
            l2 = std::max(init_l2, 0.05) * uniform(rng, 0.7, 1.3);
        }
        std::vector<double> trace;
        const EmState s = run_em(histogram, p0, l1, l2, &trace);
        if (s.ll > best.ll) {
            best = s;
            best_trace = std::move(trace);
        }
    }

    MixtureFit fit;
    fit.p0 = best.p0;
    fit.lambda1 = best.lambda1;
    fit.lambda2 = best.lambda2;
    if (fit.lambda1 < fit.lambda2) { // canonical ordering lambda1 > lambda2
        std::swap(fit.lambda1, fit.lambda2);
        fit.p0 = 1.0 - fit.p0;
    }
    fit.log_likelihood = best.ll;
    fit.ll_trace = std::move(best_trace);
    return fit;
}

double solve_threshold(const MixtureFit& fit) {
    if (fit.lambda1 == fit.lambda2)
        throw std::domain_error("solve_threshold: equal component means");
    if (fit.p0 <= 0.0 || fit.p0 >= 1.0)
        throw std::domain_error("solve_threshold: threshold undefined for p0 in {0, 1}");
    return (fit.lambda1 - fit.lambda2 + std::log(fit.p0 / (1.0 - fit.p0))) /
           std::log(fit.lambda1 / fit.lambda2);
}

EspamResult e_spam(const std::vector<double>& p_dark, const std::vector<double>& p_bright) {
    auto check_normalized = [](const std::vector<double>& p, const char* name) {
        double sum = 0.0;
        for (double v : p) {
            if (v < 0.0) throw std::domain_error(std::string("e_spam: negative mass in ") + name);
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::domain_error(std::string("e_spam: ") + name + " is not normalized");
    };
    check_normalized(p_dark, "P_dark");
    check_normalized(p_bright, "P_bright");

    const int len = static_cast<int>(std::max(p_dark.size(), p_bright.size()));
    auto at = [](const std::vector<double>& p, int n) {
        return n < static_cast<int>(p.size()) ? p[n] : 0.0;
    };

    // e(N_m) = 0.5 * (tail of P_dark from N_m + head of P_bright below N_m);
    // scan all integer thresholds, keep the smallest minimizer.
    EspamResult best{std::numeric_limits<double>::infinity(), 0};
    double dark_tail = 1.0;
    double bright_head = 0.0;
    for (int n_m = 0; n_m <= len; ++n_m) {
        if (n_m > 0) {
            dark_tail -= at(p_dark, n_m - 1);
            bright_head += at(p_bright, n_m - 1);
        }
        const double v = 0.5 * (std::max(dark_tail, 0.0) + bright_head);
        if (v < best.value - 1e-15) {
            best.value = v;
            best.n_m = n_m;
        }
    }
    return best;
}

std::vector<SpamResult> post_selection_sweep(const std::vector<ReadoutRecord>& records,
                                             const std::vector<double>& c_th_list) {
    std::vector<SpamResult> out;
    out.reserve(c_th_list.size());
    for (double c_th : c_th_list) {
        SpamResult res;
        res.c_th = c_th;

        int max_count = 0;
        long long survivors = 0;
        for (const ReadoutRecord& r : records)
            if (r.bin1 >= c_th) {
                ++survivors;
                max_count = std::max({max_count, r.bin2, r.bin3});
            }
        res.p_success = records.empty()
                            ? 0.0
                            : static_cast<double>(survivors) / static_cast<double>(records.size());
        if (survivors == 0) {
            res.empty = true;
            out.push_back(res);
            continue;
        }

        std::vector<double> p_dark(static_cast<std::size_t>(max_count) + 1, 0.0);
        std::vector<double> p_bright(static_cast<std::size_t>(max_count) + 1, 0.0);
        const double w = 1.0 / static_cast<double>(survivors);
        for (const ReadoutRecord& r : records)
            if (r.bin1 >= c_th) {
                p_dark[static_cast<std::size_t>(r.bin2)] += w;
                p_bright[static_cast<std::size_t>(r.bin3)] += w;
            }

        // Counting in units of 1/survivors keeps each pmf summing to 1 up to
        // rounding; renormalize to stay inside e_spam's 1e-9 gate.
        auto renorm = [](std::vector<double>& p) {
            double s = 0.0;
            for (double v : p) s += v;
            for (double& v : p) v /= s;
        };
        renorm(p_dark);
        renorm(p_bright);

        const EspamResult es = e_spam(p_dark, p_bright);
        res.e_spam = es.value;
        res.n_m = es.n_m;
        out.push_back(res);
    }
    return out;
}

QuadrantCounts quadrant_analysis(const std::vector<ReadoutRecord>& records, double n_m) {
    if (n_m <= 0.0) throw std::domain_error("quadrant_analysis: N_m must be > 0");
    QuadrantCounts q;
    for (const ReadoutRecord& r : records) {
        const bool b2 = static_cast<double>(r.bin2) >= n_m;
        const bool b3 = static_cast<double>(r.bin3) >= n_m;
        if (!b2 && !b3)
            ++q.gray;
        else if (!b2 && b3)
            ++q.red;
        else if (b2 && !b3)
            ++q.blue;
        else
            ++q.magenta;
    }
    q.error = quadrant_error(q.blue, q.red, q.magenta);
    return q;
}

double quadrant_error(long long blue, long long red, long long magenta) {
    const long long denom = blue + red + magenta;
    if (denom == 0) return 0.0;
    return static_cast<double>(blue + magenta) / static_cast<double>(denom);
}

double mean_time_to_success_us(const ReadoutModel& model, double p_success) {
    if (p_success <= 0.0) return std::numeric_limits<double>::infinity();
    return model.t_cycle_us / p_success;
}

} // namespace emsim
