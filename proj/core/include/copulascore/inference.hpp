#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "copulascore/scoring.hpp"

namespace copulascore {

/// Per-period bivariate score differences, forecaster 1 minus forecaster 2.
/// Positive values favour forecaster 2 (lower scores are better).
class ScoreDiffSeries {
public:
    /// Throws std::invalid_argument on unequal lengths, fewer than two
    /// periods, or a non-finite entry.
    ScoreDiffSeries(std::vector<double> d_marg, std::vector<double> d_cop);

    std::size_t size() const { return d_m_.size(); }
    std::span<const double> marg() const { return d_m_; }
    std::span<const double> cop() const { return d_c_; }
    double mean_marg() const;
    double mean_cop() const;

private:
    std::vector<double> d_m_;
    std::vector<double> d_c_;
};

ScoreDiffSeries score_diffs(std::span<const BivariateScore> scores1,
                            std::span<const BivariateScore> scores2);

enum class HacWeights { Zero, Bartlett, Truncated };

/// Lag cutoff and kernel of the long-run covariance estimator. The default
/// (no lags) gives the sample covariance.
struct HacConfig {
    int lags = 0;
    HacWeights weights = HacWeights::Zero;

    /// Weight applied to lag h, 1 <= h <= lags.
    double weight(int h) const;
};

struct LongRunCov {
    double s_mm = 0.0;
    double s_mc = 0.0;
    double s_cc = 0.0;

    double det() const { return s_mm * s_cc - s_mc * s_mc; }
    double correlation() const;
    bool positive_definite(double tol = 0.0) const;
};

/// Lag-0 outer-product average (divisor n) plus the weighted, symmetrised
/// cross-lag terms. Throws std::invalid_argument if n <= lags.
LongRunCov hac_cov(const ScoreDiffSeries& d, const HacConfig& cfg);

enum class Hypothesis {
    /// Equal expected marginal and copula scores.
    Equal,
    /// Equal marginal scores and forecaster 1 not worse in the copula score.
    LexSuperiority,
};

/// Level spent in each step; the two parts sum to the overall level.
struct AlphaSplit {
    double marginal = 0.025;
    double copula = 0.025;

    static AlphaSplit even(double alpha) { return {alpha / 2.0, alpha / 2.0}; }
    double total() const { return marginal + copula; }
};

struct CriticalValues {
    double c1 = 0.0;
    double c2 = 0.0;
};

/// Solves
///   P(|Z1| > c1) = split.marginal
///   P(|Z1| <= c1, |Z2| > c2) = split.copula      (Equal)
///   P(|Z1| <= c1,  Z2  > c2) = split.copula      (LexSuperiority)
/// for Z ~ N(0, omega). c1 is closed form; c2 is found by bisection on
/// bvn_rect_prob to 1e-10 in probability. Throws std::invalid_argument if
/// omega is not positive definite or the split is not inside (0,1).
CriticalValues critical_values(const LongRunCov& omega, const AlphaSplit& split,
                               Hypothesis hypothesis);
CriticalValues critical_values(const LongRunCov& omega, double alpha,
                               Hypothesis hypothesis);

/// P(|Z1| > c1) + P(step-two event) recomputed from rectangle probabilities.
double two_step_size(const LongRunCov& omega, const CriticalValues& cv,
                     Hypothesis hypothesis);

/// Bonferroni critical values: each component tested on its own at half the
/// level, one-sided in the copula component for LexSuperiority.
CriticalValues bonferroni_critical_values(const LongRunCov& omega, double alpha,
                                          Hypothesis hypothesis);

enum class Outcome { NoRejection, RejectedAtMarginalStep, RejectedAtCopulaStep };

/// Thrown when neither score component varies, so the series carries no
/// information for ranking the forecasts.
class DegenerateSeries : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TwoStepResult {
    Hypothesis hypothesis = Hypothesis::Equal;
    std::size_t n = 0;
    double alpha = 0.05;
    double mean_marg = 0.0;
    double mean_cop = 0.0;
    double stat_m = 0.0;  // sqrt(n) * mean_marg
    double stat_c = 0.0;  // sqrt(n) * mean_cop
    LongRunCov omega;
    /// Empty when the corresponding step was skipped.
    std::optional<double> c1;
    std::optional<double> c2;
    Outcome outcome = Outcome::NoRejection;
    /// One component was degenerate; the other was tested alone at full
    /// level with a univariate Diebold-Mariano test.
    bool degenerate_fallback = false;
    /// |corr(omega)| was pushed below one before solving for c2.
    bool correlation_shrunk = false;
    /// Per-component exceedances (Bonferroni reports both).
    bool marginal_exceeds = false;
    bool copula_exceeds = false;

    bool rejected() const { return outcome != Outcome::NoRejection; }
    /// "0", "M" or "C".
    std::string label() const;
};

/// Sequential test: reject if |stat_m| > c1, otherwise if the copula
/// statistic exceeds c2 (|stat_c| for Equal, stat_c for LexSuperiority).
///
/// A component counts as degenerate when its long-run variance is at most
/// 1e-12 times the squared mean absolute score difference. If only one
/// component is degenerate the other is tested alone at the full level
/// (degenerate_fallback). Throws DegenerateSeries if both are.
TwoStepResult two_step_test(const ScoreDiffSeries& d, const HacConfig& cfg,
                            double alpha, Hypothesis hypothesis);
TwoStepResult two_step_test(const ScoreDiffSeries& d, const HacConfig& cfg,
                            const AlphaSplit& split, Hypothesis hypothesis);

/// Non-sequential reference test with Bonferroni critical values. Rejects
/// if either component exceeds its critical value; outcome attributes the
/// rejection to the marginal component first.
TwoStepResult bonferroni_test(const ScoreDiffSeries& d, const HacConfig& cfg,
                              double alpha, Hypothesis hypothesis);

std::string to_string(Hypothesis h);
std::string to_string(Outcome o);
std::string to_string(HacWeights w);

}  // namespace copulascore
