#include "copulascore/inference.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "copulascore/dist_math.hpp"

namespace copulascore {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDegenerateRel = 1e-12;
constexpr double kCorrLimit = 1.0 - 1e-10;
constexpr double kCorrShrunk = 1.0 - 1e-8;
constexpr double kProbTol = 1e-10;
constexpr double kSearchBound = 8.5;

double mean(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double mean_abs(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return s / static_cast<double>(x.size());
}

void check_split(const AlphaSplit& split) {
    if (!(split.marginal > 0.0 && split.copula > 0.0 && split.total() < 1.0)) {
        throw std::invalid_argument(fmt::format(
            "invalid significance split ({}, {})", split.marginal, split.copula));
    }
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument(fmt::format("alpha must lie in (0,1), got {}", alpha));
    }
}

// Probability of the step-two rejection event on the standardised scale.
double step_two_prob(const BvnSpec& unit, double q1, double c2, Hypothesis h) {
    const double upper = bvn_rect_prob(unit, -q1, q1, c2, kInf);
    if (h == Hypothesis::LexSuperiority) return upper;
    return upper + bvn_rect_prob(unit, -q1, q1, -kInf, -c2);
}

// Bisection for the standardised c2; the step-two probability is
// nonincreasing in c2.
double solve_c2(double rho, double q1, double target, Hypothesis h) {
    const BvnSpec unit(1.0, 1.0, rho);
    double lo = h == Hypothesis::Equal ? 0.0 : -kSearchBound;
    double hi = kSearchBound;
    if (step_two_prob(unit, q1, lo, h) < target) {
        throw std::invalid_argument("critical_values: copula level not attainable");
    }
    for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double diff = step_two_prob(unit, q1, mid, h) - target;
        if (std::abs(diff) <= kProbTol) return mid;
        if (diff > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct Degeneracy {
    bool marg = false;
    bool cop = false;
};

Degeneracy classify(const ScoreDiffSeries& d, const LongRunCov& omega) {
    const double scale = std::max(mean_abs(d.marg()), mean_abs(d.cop()));
    const double tol = kDegenerateRel * scale * scale;
    return {omega.s_mm <= tol, omega.s_cc <= tol};
}

TwoStepResult base_result(const ScoreDiffSeries& d, const LongRunCov& omega,
                          double alpha, Hypothesis h) {
    TwoStepResult r;
    r.hypothesis = h;
    r.n = d.size();
    r.alpha = alpha;
    r.mean_marg = d.mean_marg();
    r.mean_cop = d.mean_cop();
    const double root_n = std::sqrt(static_cast<double>(d.size()));
    r.stat_m = root_n * r.mean_marg;
    r.stat_c = root_n * r.mean_cop;
    r.omega = omega;
    return r;
}

// Univariate Diebold-Mariano test of the one informative component at full
// level.
void degenerate_fallback(TwoStepResult& r, const Degeneracy& deg) {
    if (deg.marg && deg.cop) {
        throw DegenerateSeries(
            "both score-difference components are degenerate; the forecasts "
            "cannot be ranked");
    }
    r.degenerate_fallback = true;
    if (deg.marg) {
        const double q = r.hypothesis == Hypothesis::Equal
                             ? norm_quantile(1.0 - r.alpha / 2.0)
                             : norm_quantile(1.0 - r.alpha);
        r.c2 = std::sqrt(r.omega.s_cc) * q;
        r.copula_exceeds = r.hypothesis == Hypothesis::Equal ? std::abs(r.stat_c) > *r.c2
                                                             : r.stat_c > *r.c2;
        r.outcome = r.copula_exceeds ? Outcome::RejectedAtCopulaStep : Outcome::NoRejection;
    } else {
        r.c1 = std::sqrt(r.omega.s_mm) * norm_quantile(1.0 - r.alpha / 2.0);
        r.marginal_exceeds = std::abs(r.stat_m) > *r.c1;
        r.outcome = r.marginal_exceeds ? Outcome::RejectedAtMarginalStep : Outcome::NoRejection;
    }
}

LongRunCov shrink_if_singular(const LongRunCov& omega, bool& shrunk) {
    shrunk = false;
    const double corr = omega.correlation();
    if (std::abs(corr) < kCorrLimit) return omega;
    shrunk = true;
    LongRunCov out = omega;
    out.s_mc = std::copysign(kCorrShrunk, corr) * std::sqrt(omega.s_mm * omega.s_cc);
    return out;
}

}  // namespace

ScoreDiffSeries::ScoreDiffSeries(std::vector<double> d_marg, std::vector<double> d_cop)
    : d_m_(std::move(d_marg)), d_c_(std::move(d_cop)) {
    if (d_m_.size() != d_c_.size()) {
        throw std::invalid_argument(fmt::format(
            "ScoreDiffSeries: component lengths differ ({} vs {})", d_m_.size(), d_c_.size()));
    }
    if (d_m_.size() < 2) {
        throw std::invalid_argument("ScoreDiffSeries: need at least two periods");
    }
    for (std::size_t t = 0; t < d_m_.size(); ++t) {
        if (!std::isfinite(d_m_[t]) || !std::isfinite(d_c_[t])) {
            throw std::invalid_argument(
                fmt::format("ScoreDiffSeries: non-finite entry at t={}", t));
        }
    }
}

double ScoreDiffSeries::mean_marg() const { return mean(d_m_); }
double ScoreDiffSeries::mean_cop() const { return mean(d_c_); }

ScoreDiffSeries score_diffs(std::span<const BivariateScore> scores1,
                            std::span<const BivariateScore> scores2) {
    if (scores1.size() != scores2.size()) {
        throw std::invalid_argument(
            fmt::format("score_diffs: length mismatch ({} vs {})", scores1.size(),
                        scores2.size()));
    }
    std::vector<double> dm(scores1.size());
    std::vector<double> dc(scores1.size());
    for (std::size_t t = 0; t < scores1.size(); ++t) {
        dm[t] = scores1[t].s_marg - scores2[t].s_marg;
        dc[t] = scores1[t].s_cop - scores2[t].s_cop;
    }
    return ScoreDiffSeries(std::move(dm), std::move(dc));
}

double HacConfig::weight(int h) const {
    switch (weights) {
        case HacWeights::Zero:
            return 0.0;
        case HacWeights::Bartlett:
            return 1.0 - static_cast<double>(h) / (lags + 1.0);
        case HacWeights::Truncated:
            return 1.0;
    }
    return 0.0;
}

double LongRunCov::correlation() const {
    const double denom = std::sqrt(s_mm * s_cc);
    return denom > 0.0 ? s_mc / denom : 0.0;
}

bool LongRunCov::positive_definite(double tol) const {
    return s_mm > tol && s_cc > tol && det() > tol;
}

LongRunCov hac_cov(const ScoreDiffSeries& d, const HacConfig& cfg) {
    const auto n = d.size();
    if (cfg.lags < 0 || n <= static_cast<std::size_t>(cfg.lags)) {
        throw std::invalid_argument(
            fmt::format("hac_cov: need n > lags (n={}, lags={})", n, cfg.lags));
    }
    const double mm = d.mean_marg();
    const double mc = d.mean_cop();
    std::vector<double> em(n);
    std::vector<double> ec(n);
    for (std::size_t t = 0; t < n; ++t) {
        em[t] = d.marg()[t] - mm;
        ec[t] = d.cop()[t] - mc;
    }
    LongRunCov out;
    for (std::size_t t = 0; t < n; ++t) {
        out.s_mm += em[t] * em[t];
        out.s_mc += em[t] * ec[t];
        out.s_cc += ec[t] * ec[t];
    }
    for (int h = 1; h <= cfg.lags; ++h) {
        const double w = cfg.weight(h);
        if (w == 0.0) continue;
        double g_mm = 0.0;
        double g_mc = 0.0;
        double g_cm = 0.0;
        double g_cc = 0.0;
        for (std::size_t t = static_cast<std::size_t>(h); t < n; ++t) {
            const std::size_t s = t - static_cast<std::size_t>(h);
            g_mm += em[t] * em[s];
            g_mc += em[t] * ec[s];
            g_cm += ec[t] * em[s];
            g_cc += ec[t] * ec[s];
        }
        // Gamma_h + Gamma_h'
        out.s_mm += w * 2.0 * g_mm;
        out.s_mc += w * (g_mc + g_cm);
        out.s_cc += w * 2.0 * g_cc;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    out.s_mm *= inv_n;
    out.s_mc *= inv_n;
    out.s_cc *= inv_n;
    return out;
}

CriticalValues critical_values(const LongRunCov& omega, const AlphaSplit& split,
                               Hypothesis hypothesis) {
    check_split(split);
    if (!omega.positive_definite()) {
        throw std::invalid_argument("critical_values: long-run covariance is not positive definite");
    }
    const double q1 = norm_quantile(1.0 - split.marginal / 2.0);
    // The step-two event lives on {|Z1| <= q1}; solve on the standardised
    // scale and rescale.
    const double c2 = solve_c2(omega.correlation(), q1, split.copula, hypothesis);
    return {std::sqrt(omega.s_mm) * q1, std::sqrt(omega.s_cc) * c2};
}

CriticalValues critical_values(const LongRunCov& omega, double alpha,
                               Hypothesis hypothesis) {
    check_alpha(alpha);
    return critical_values(omega, AlphaSplit::even(alpha), hypothesis);
}

double two_step_size(const LongRunCov& omega, const CriticalValues& cv,
                     Hypothesis hypothesis) {
    const BvnSpec spec(omega.s_mm, omega.s_cc, omega.s_mc);
    const double inside = bvn_rect_prob(spec, -cv.c1, cv.c1, -kInf, kInf);
    double step2 = bvn_rect_prob(spec, -cv.c1, cv.c1, cv.c2, kInf);
    if (hypothesis == Hypothesis::Equal) {
        step2 += bvn_rect_prob(spec, -cv.c1, cv.c1, -kInf, -cv.c2);
    }
    return (1.0 - inside) + step2;
}

CriticalValues bonferroni_critical_values(const LongRunCov& omega, double alpha,
                                          Hypothesis hypothesis) {
    check_alpha(alpha);
    if (!omega.positive_definite()) {
        throw std::invalid_argument(
            "bonferroni_critical_values: long-run covariance is not positive definite");
    }
    const double half = alpha / 2.0;
    const double q2 = hypothesis == Hypothesis::Equal ? norm_quantile(1.0 - half / 2.0)
                                                      : norm_quantile(1.0 - half);
    return {std::sqrt(omega.s_mm) * norm_quantile(1.0 - half / 2.0),
            std::sqrt(omega.s_cc) * q2};
}

TwoStepResult two_step_test(const ScoreDiffSeries& d, const HacConfig& cfg,
                            const AlphaSplit& split, Hypothesis hypothesis) {
    check_split(split);
    const LongRunCov omega = hac_cov(d, cfg);
    TwoStepResult r = base_result(d, omega, split.total(), hypothesis);
    const Degeneracy deg = classify(d, omega);
    if (deg.marg || deg.cop) {
        degenerate_fallback(r, deg);
        return r;
    }
    const LongRunCov solved = shrink_if_singular(omega, r.correlation_shrunk);
    const CriticalValues cv = critical_values(solved, split, hypothesis);
    r.c1 = cv.c1;
    r.c2 = cv.c2;
    r.marginal_exceeds = std::abs(r.stat_m) > cv.c1;
    r.copula_exceeds = hypothesis == Hypothesis::Equal ? std::abs(r.stat_c) > cv.c2
                                                       : r.stat_c > cv.c2;
    if (r.marginal_exceeds) {
        r.outcome = Outcome::RejectedAtMarginalStep;
    } else if (r.copula_exceeds) {
        r.outcome = Outcome::RejectedAtCopulaStep;
    }
    return r;
}

TwoStepResult two_step_test(const ScoreDiffSeries& d, const HacConfig& cfg, double alpha,
                            Hypothesis hypothesis) {
    check_alpha(alpha);
    return two_step_test(d, cfg, AlphaSplit::even(alpha), hypothesis);
}

TwoStepResult bonferroni_test(const ScoreDiffSeries& d, const HacConfig& cfg, double alpha,
                              Hypothesis hypothesis) {
    check_alpha(alpha);
    const LongRunCov omega = hac_cov(d, cfg);
    TwoStepResult r = base_result(d, omega, alpha, hypothesis);
    const Degeneracy deg = classify(d, omega);
    if (deg.marg || deg.cop) {
        degenerate_fallback(r, deg);
        return r;
    }
    // Bonferroni needs only the diagonal, so a singular omega is harmless.
    LongRunCov diag = omega;
    diag.s_mc = 0.0;
    const CriticalValues cv = bonferroni_critical_values(diag, alpha, hypothesis);
    r.c1 = cv.c1;
    r.c2 = cv.c2;
    r.marginal_exceeds = std::abs(r.stat_m) > cv.c1;
    r.copula_exceeds = hypothesis == Hypothesis::Equal ? std::abs(r.stat_c) > cv.c2
                                                       : r.stat_c > cv.c2;
    if (r.marginal_exceeds) {
        r.outcome = Outcome::RejectedAtMarginalStep;
    } else if (r.copula_exceeds) {
        r.outcome = Outcome::RejectedAtCopulaStep;
    }
    return r;
}

std::string TwoStepResult::label() const {
    switch (outcome) {
        case Outcome::NoRejection:
            return "0";
        case Outcome::RejectedAtMarginalStep:
            return "M";
        case Outcome::RejectedAtCopulaStep:
            return "C";
    }
    return "0";
}

std::string to_string(Hypothesis h) {
    return h == Hypothesis::Equal ? "equal" : "lex";
}

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::NoRejection:
            return "no_rejection";
        case Outcome::RejectedAtMarginalStep:
            return "rejected_at_marginal_step";
        case Outcome::RejectedAtCopulaStep:
            return "rejected_at_copula_step";
    }
    return "no_rejection";
}

std::string to_string(HacWeights w) {
    switch (w) {
        case HacWeights::Zero:
            return "zero";
        case HacWeights::Bartlett:
            return "bartlett";
        case HacWeights::Truncated:
            return "truncated";
    }
    return "zero";
}

}  // namespace copulascore
