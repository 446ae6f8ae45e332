#include "copulascore/dist_math.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace copulascore {

namespace {

constexpr double kTruncation = 8.5;
constexpr double kQuadTol = 1e-9;
constexpr int kMaxPanels = 1 << 12;

// Upper tail 1 - Phi(x) without cancellation for large x.
double norm_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// Phi(hi) - Phi(lo), evaluated on the tail that keeps precision.
double norm_interval(double lo, double hi) {
    if (!(lo < hi)) return 0.0;
    if (lo > 0.0) return norm_sf(lo) - norm_sf(hi);
    return norm_cdf(hi) - norm_cdf(lo);
}

struct GaussLegendre {
    static constexpr int kOrder = 20;
    std::array<double, kOrder> nodes{};
    std::array<double, kOrder> weights{};

    GaussLegendre() {
        // Newton iteration on P_n from the Chebyshev-like initial guesses.
        const int n = kOrder;
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0;
                double p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
    }
};

const GaussLegendre& gauss_legendre() {
    static const GaussLegendre rule;
    return rule;
}

template <typename F>
double composite_gl(const F& f, double lo, double hi, int panels) {
    const auto& rule = gauss_legendre();
    const double h = (hi - lo) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * h;
        double acc = 0.0;
        for (int k = 0; k < GaussLegendre::kOrder; ++k) {
            acc += rule.weights[k] * f(mid + 0.5 * h * rule.nodes[k]);
        }
        total += 0.5 * h * acc;
    }
    return total;
}

}  // namespace

double norm_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double norm_cdf(double x) {
    if (std::isnan(x)) return x;
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("norm_quantile: p must lie in (0,1), got " +
                                std::to_string(p));
    }
    // Wichura, AS 241 (PPND16), relative accuracy about 1e-16.
    const double q = p - 0.5;
    double x = 0.0;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        x = q *
            (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                  67265.770927008700853) * r + 45921.953931549871457) * r +
                13731.693765509461125) * r + 1971.5909503065514427) * r +
              133.14166789178437745) * r + 3.387132872796366608) /
            (((((((5226.495278852545925 * r + 28729.085735721942674) * r +
                  39307.89580009271061) * r + 21213.794301586595867) * r +
                5394.1960214247511077) * r + 687.1870074920579083) * r +
              42.313330701600911252) * r + 1.0);
    } else {
        double r = q < 0.0 ? p : 1.0 - p;
        r = std::sqrt(-std::log(r));
        if (r <= 5.0) {
            r -= 1.6;
            x = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
                      0.24178072517745061177) * r + 1.27045825245236838258) * r +
                    3.64784832476320460504) * r + 5.7694972214606914055) * r +
                  4.6303378461565452959) * r + 1.42343711074968357734) /
                (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
                      0.0151986665636164571966) * r + 0.14810397642748007459) * r +
                    0.68976733498510000455) * r + 1.6763848301838038494) * r +
                  2.05319162663775882187) * r + 1.0);
        } else {
            r -= 5.0;
            x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      0.0012426609473880784386) * r + 0.026532189526576123093) * r +
                    0.29656057182850489123) * r + 1.7848265399172913358) * r +
                  5.4637849111641143699) * r + 6.6579046435011037772) /
                (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
                      1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
                    0.0148753612908506148525) * r + 0.13692988092273580531) * r +
                  0.59983220655588793769) * r + 1.0);
        }
        if (q < 0.0) x = -x;
    }
    // One Newton step against the erfc-based cdf.
    const double dens = norm_pdf(x);
    if (dens > 0.0) {
        const double resid = p < 0.5 ? norm_cdf(x) - p : (1.0 - p) - norm_sf(x);
        x -= resid / dens;
    }
    return x;
}

EquiCorr::EquiCorr(int dim_, double rho_) : dim(dim_), rho(rho_) {
    if (!is_valid(dim, rho)) {
        throw std::invalid_argument("EquiCorr: rho=" + std::to_string(rho) +
                                    " is not admissible for dim=" +
                                    std::to_string(dim));
    }
}

bool EquiCorr::is_valid(int dim, double rho) {
    return dim >= 2 && std::isfinite(rho) && rho < 1.0 &&
           rho > -1.0 / static_cast<double>(dim - 1);
}

double equicorr_logdet(const EquiCorr& ec) {
    const double k = ec.dim - 1.0;
    return k * std::log1p(-ec.rho) + std::log1p(k * ec.rho);
}

double equicorr_quadform(const EquiCorr& ec, std::span<const double> z) {
    if (static_cast<int>(z.size()) != ec.dim) {
        throw std::invalid_argument("equicorr_quadform: length mismatch");
    }
    double sum = 0.0;
    double sumsq = 0.0;
    for (double v : z) {
        sum += v;
        sumsq += v * v;
    }
    const double shrink = ec.rho / (1.0 + (ec.dim - 1.0) * ec.rho);
    return (sumsq - shrink * sum * sum) / (1.0 - ec.rho);
}

BvnSpec::BvnSpec(double s11, double s22, double s12)
    : sigma11(s11), sigma22(s22), sigma12(s12) {
    if (!(s11 > 0.0 && s22 > 0.0 && std::isfinite(s11) && std::isfinite(s22) &&
          std::isfinite(s12) && s11 * s22 - s12 * s12 > 0.0)) {
        throw std::invalid_argument("BvnSpec: covariance is not positive definite");
    }
}

double BvnSpec::correlation() const {
    return sigma12 / std::sqrt(sigma11 * sigma22);
}

double bvn_rect_prob(const BvnSpec& spec, double a1, double b1, double a2,
                     double b2) {
    if (std::isnan(a1) || std::isnan(b1) || std::isnan(a2) || std::isnan(b2)) {
        throw std::invalid_argument("bvn_rect_prob: NaN limit");
    }
    const double s1 = std::sqrt(spec.sigma11);
    const double s2 = std::sqrt(spec.sigma22);
    const double r = spec.correlation();
    const double lo = std::max(a1 / s1, -kTruncation);
    const double hi = std::min(b1 / s1, kTruncation);
    const double lo2 = a2 / s2;
    const double hi2 = b2 / s2;
    if (!(lo < hi) || !(lo2 < hi2)) return 0.0;

    const double cond_sd = std::sqrt((1.0 - r) * (1.0 + r));
    auto integrand = [&](double x) {
        const double mean = r * x;
        const double u = std::isinf(hi2) ? hi2 : (hi2 - mean) / cond_sd;
        const double l = std::isinf(lo2) ? lo2 : (lo2 - mean) / cond_sd;
        return norm_pdf(x) * norm_interval(l, u);
    };

    std::vector<double> breaks{lo, hi};
    if (r != 0.0) {
        const double width = cond_sd / std::abs(r);
        for (double lim : {lo2, hi2}) {
            if (std::isinf(lim)) continue;
            const double centre = lim / r;
            for (double k : {-8.0, -2.0, 0.0, 2.0, 8.0}) {
                const double b = centre + k * width;
                if (b > lo && b < hi) breaks.push_back(b);
            }
        }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    auto integrate = [&](int panels) {
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
            total += composite_gl(integrand, breaks[i], breaks[i + 1], panels);
        }
        return total;
    };

    int panels = 2;
    double prev = integrate(panels);
    while (panels < kMaxPanels) {
        panels *= 2;
        const double next = integrate(panels);
        const bool done = std::abs(next - prev) < kQuadTol;
        prev = next;
        if (done) break;
    }
    return std::clamp(prev, 0.0, 1.0);
}

}  // namespace copulascore
