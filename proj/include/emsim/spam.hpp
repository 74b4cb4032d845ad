#pragma once

#include <cstdint>
#include <vector>

namespace emsim {

/// Photon counts for the three APD readout bins of one shot.
struct ReadoutRecord {
    int bin1 = 0;
    int bin2 = 0;
    int bin3 = 0;
};

/// Generative three-bin readout model. With probability p_charge the shot is
/// in the addressed charge/spin manifold: bin 1 reads bright, bin 2 dark,
/// bin 3 bright; otherwise all bins read dark.
struct ReadoutModel {
    double lambda_bright = 18.0;
    double lambda_dark = 1.6;
    double p_charge = 0.15;
    long long shots = 100000;
    double t_m_us = 50.0;    ///< bin duration
    double t_cycle_us = 60.0; ///< full prepare-and-measure cycle, for rate arithmetic
    /// Optional bin-3 bright rate for measured-data asymmetry; < 0 means
    /// "same as lambda_bright".
    double lambda_bright_bin3 = -1.0;
    std::uint64_t seed = 0;

    void validate() const;
    double bright_bin3() const { return lambda_bright_bin3 < 0.0 ? lambda_bright : lambda_bright_bin3; }
};

/// Two-component Poisson mixture, canonical ordering lambda1 > lambda2.
/// p0 weights the second (dark) component:
///   p(n) = (1 - p0) Pois(n; lambda1) + p0 Pois(n; lambda2).
struct MixtureFit {
    double p0 = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double log_likelihood = 0.0;
    std::vector<double> ll_trace; ///< per-iteration log-likelihood of the winning start
};

/// One point of the post-selection sweep.
struct SpamResult {
    double c_th = 0.0;
    double e_spam = 0.0;
    int n_m = 0;          ///< minimizing integer threshold
    double p_success = 0.0;
    bool empty = false;   ///< no shots survived this c_th
};

struct QuadrantCounts {
    long long gray = 0;    ///< both bins dark: not initialized, excluded
    long long red = 0;     ///< bin2 dark, bin3 bright: correct
    long long blue = 0;    ///< bin2 bright, bin3 dark: error
    long long magenta = 0; ///< both bright: error
    double error = 0.0;    ///< (blue + magenta) / (blue + red + magenta)
};

std::vector<ReadoutRecord> simulate_readout(const ReadoutModel& model);

/// Mixture-Poisson MLE by EM on a count histogram (index = count, value =
/// occurrences). Iterates until the log-likelihood improves by < 1e-9 or 500
/// iterations, with three seeded restarts. Throws fit_error on degenerate
/// input (fewer than 100 counts or single-bin support).
MixtureFit fit_mixture(const std::vector<long long>& histogram);

/// Closed-form crossover of the two mixture components:
///   N_m = (lambda1 - lambda2 + ln(p0/(1-p0))) / ln(lambda1/lambda2).
/// Counts >= ceil(N_m) classify as bright.
double solve_threshold(const MixtureFit& fit);

struct EspamResult {
    double value = 0.0;
    int n_m = 0;
};

/// Exact minimization over integer N_m of
///   0.5 * (sum_{N >= N_m} P_dark(N) + sum_{N < N_m} P_bright(N)),
/// smallest minimizer on ties. Inputs must each sum to 1 within 1e-9.
EspamResult e_spam(const std::vector<double>& p_dark, const std::vector<double>& p_bright);

/// For each C_th: keep shots with bin1 >= C_th, build P_dark from bin 2 and
/// P_bright from bin 3 of the survivors, minimize e_spam.
std::vector<SpamResult> post_selection_sweep(const std::vector<ReadoutRecord>& records,
                                             const std::vector<double>& c_th_list);

/// Classify shots by (bin2 >= N_m, bin3 >= N_m) into the four quadrants.
QuadrantCounts quadrant_analysis(const std::vector<ReadoutRecord>& records, double n_m);

/// Arithmetic form used when only the three error-relevant counts are known.
double quadrant_error(long long blue, long long red, long long magenta);

/// Mean wall-clock time to one successful preparation, t_cycle / p_success.
double mean_time_to_success_us(const ReadoutModel& model, double p_success);

} // namespace emsim
