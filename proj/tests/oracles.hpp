#pragma once

// Test-only reference implementations, kept independent of the library code
// they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace oracle {

/// Pairwise O(n^2) union-find over interval intersections; the reference
/// partition for the sort-and-sweep component computation.
class IntervalUnionFind {
  public:
    explicit IntervalUnionFind(const std::vector<std::pair<double, double>>& intervals)
        : parent_(intervals.size()) {
        std::iota(parent_.begin(), parent_.end(), 0);
        for (std::size_t i = 0; i < intervals.size(); ++i)
            for (std::size_t j = i + 1; j < intervals.size(); ++j)
                if (intervals[i].first <= intervals[j].second &&
                    intervals[j].first <= intervals[i].second)
                    unite(i, j);
    }

    /// Canonical partition: members sorted, groups ordered by first member.
    std::vector<std::vector<int>> partition() {
        std::vector<std::vector<int>> groups(parent_.size());
        for (std::size_t i = 0; i < parent_.size(); ++i)
            groups[static_cast<std::size_t>(find(static_cast<int>(i)))].push_back(
                static_cast<int>(i));
        std::vector<std::vector<int>> out;
        for (auto& g : groups)
            if (!g.empty()) {
                std::sort(g.begin(), g.end());
                out.push_back(std::move(g));
            }
        std::sort(out.begin(), out.end(),
                  [](const auto& a, const auto& b) { return a.front() < b.front(); });
        return out;
    }

  private:
    int find(int a) {
        while (parent_[static_cast<std::size_t>(a)] != a) {
            parent_[static_cast<std::size_t>(a)] =
                parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(a)])];
            a = parent_[static_cast<std::size_t>(a)];
        }
        return a;
    }
    void unite(std::size_t a, std::size_t b) {
        int ra = find(static_cast<int>(a)), rb = find(static_cast<int>(b));
        if (ra != rb) parent_[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
    }
    std::vector<int> parent_;
};

inline double poisson_pmf(int n, double lambda) {
    if (lambda <= 0.0) return n == 0 ? 1.0 : 0.0;
    return std::exp(n * std::log(lambda) - lambda - std::lgamma(static_cast<double>(n) + 1.0));
}

/// P(X >= n) for X ~ Poisson(lambda).
inline double poisson_tail(int n, double lambda) {
    double head = 0.0;
    for (int k = 0; k < n; ++k) head += poisson_pmf(k, lambda);
    return std::max(0.0, 1.0 - head);
}

/// Exhaustive scan of the readout-error objective; smallest minimizer wins.
struct EspamScan {
    double value;
    int n_m;
};
inline EspamScan espam_scan(const std::vector<double>& p_dark,
                            const std::vector<double>& p_bright) {
    const int len = static_cast<int>(std::max(p_dark.size(), p_bright.size()));
    auto at = [](const std::vector<double>& p, int n) {
        return n < static_cast<int>(p.size()) ? p[n] : 0.0;
    };
    EspamScan best{2.0, -1};
    for (int n_m = 0; n_m <= len; ++n_m) {
        double dark_tail = 0.0, bright_head = 0.0;
        for (int n = n_m; n < len; ++n) dark_tail += at(p_dark, n);
        for (int n = 0; n < n_m; ++n) bright_head += at(p_bright, n);
        const double v = 0.5 * (dark_tail + bright_head);
        if (v < best.value - 1e-15) best = {v, n_m};
    }
    return best;
}

/// Two-sided KS statistic against a continuous CDF given as a callable.
template <typename Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    }
    return d;
}

} // namespace oracle
