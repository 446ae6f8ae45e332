#include "copulascore/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace copulascore {

namespace {

constexpr double kPitClamp = 1e-15;

void check_dim(const MarginalForecast& f, std::span<const double> y) {
    if (y.size() != f.dim()) {
        throw std::invalid_argument("score: observation dimension does not match forecast");
    }
}

}  // namespace

MarginalForecast::MarginalForecast(std::vector<double> sd) : sd_(std::move(sd)) {
    if (sd_.empty()) throw std::invalid_argument("MarginalForecast: empty");
    for (double s : sd_) {
        if (!(s > 0.0 && std::isfinite(s))) {
            throw std::invalid_argument("MarginalForecast: standard deviations must be positive");
        }
    }
}

double s_marg(const MarginalForecast& f, std::span<const double> y) {
    check_dim(f, y);
    const double log_sqrt_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double z = y[i] / f.sd()[i];
        total += 0.5 * z * z + log_sqrt_2pi + std::log(f.sd()[i]);
    }
    return total;
}

std::vector<double> pit(const MarginalForecast& f, std::span<const double> y) {
    check_dim(f, y);
    std::vector<double> u(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        u[i] = std::clamp(norm_cdf(y[i] / f.sd()[i]), kPitClamp, 1.0 - kPitClamp);
    }
    return u;
}

double s_cop(const CopulaForecast& c, const MarginalForecast& f,
             std::span<const double> y) {
    if (std::holds_alternative<IndependenceCopula>(c)) {
        check_dim(f, y);
        return 0.0;
    }
    const auto& g = std::get<GaussianCopula>(c);
    if (static_cast<std::size_t>(g.corr.dim) != f.dim()) {
        throw std::invalid_argument("s_cop: copula and marginal dimensions differ");
    }
    return -gaussian_copula_logdensity(g.corr, pit(f, y));
}

double s_joint(const CopulaForecast& c, const MarginalForecast& f,
               std::span<const double> y) {
    return s_marg(f, y) + s_cop(c, f, y);
}

BivariateScore bivariate_score(const CopulaForecast& c, const MarginalForecast& f,
                               std::span<const double> y) {
    return {s_marg(f, y), s_cop(c, f, y)};
}

bool lex_less(const BivariateScore& a, const BivariateScore& b) {
    return a.s_marg < b.s_marg || (a.s_marg == b.s_marg && a.s_cop < b.s_cop);
}

}  // namespace copulascore
