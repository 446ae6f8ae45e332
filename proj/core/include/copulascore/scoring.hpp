#pragma once

#include <span>
#include <variant>
#include <vector>

#include "copulascore/copulas.hpp"

namespace copulascore {

/// Zero-mean Gaussian marginal forecasts, one standard deviation per
/// coordinate.
class MarginalForecast {
public:
    /// Throws std::invalid_argument unless every sd is finite and > 0.
    explicit MarginalForecast(std::vector<double> sd);

    std::size_t dim() const { return sd_.size(); }
    std::span<const double> sd() const { return sd_; }

private:
    std::vector<double> sd_;
};

/// Copula part of a forecast; the built-in scores cover these two.
using CopulaForecast = std::variant<IndependenceCopula, GaussianCopula>;

/// Value of the two-component score: marginal part first, copula part
/// second. Compared lexicographically.
struct BivariateScore {
    double s_marg = 0.0;
    double s_cop = 0.0;

    bool operator==(const BivariateScore&) const = default;
};

/// Sum of univariate log-scores, -sum_i log f_i(y_i).
double s_marg(const MarginalForecast& f, std::span<const double> y);

/// Probability integral transforms F_i(y_i), clamped to
/// [1e-15, 1 - 1e-15].
std::vector<double> pit(const MarginalForecast& f, std::span<const double> y);

/// Copula log-score at the PITs: -log c(F_1(y_1), ..., F_d(y_d)).
/// Exactly zero for the independence copula.
double s_cop(const CopulaForecast& c, const MarginalForecast& f,
             std::span<const double> y);

/// Log-score of the full predictive law, s_marg + s_cop.
double s_joint(const CopulaForecast& c, const MarginalForecast& f,
               std::span<const double> y);

BivariateScore bivariate_score(const CopulaForecast& c, const MarginalForecast& f,
                               std::span<const double> y);

/// Strict lexicographic order: a1 < b1, or a1 == b1 and a2 < b2.
bool lex_less(const BivariateScore& a, const BivariateScore& b);

}  // namespace copulascore
