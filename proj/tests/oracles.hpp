#pragma once

// Reference computations used only by the tests. None of these call into the
// library's numerical kernels.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

/// Phi(x) from the everywhere-convergent series
///   Phi(x) = 1/2 + phi(x) * sum_k x^(2k+1) / (1*3*...*(2k+1)),
/// summed in long double.
inline double cdf_series(double xd) {
    const long double x = xd;
    long double term = x;
    long double sum = x;
    for (int k = 1; k < 2000; ++k) {
        term *= x * x / (2.0L * k + 1.0L);
        sum += term;
        if (std::fabs(term) < 1e-30L * std::fabs(sum)) break;
    }
    const long double pdf = std::exp(-0.5L * x * x) / std::sqrt(2.0L * 3.14159265358979323846L);
    return static_cast<double>(0.5L + pdf * sum);
}

/// Inverse of cdf_series by plain bisection.
inline double quantile_bisect(double p) {
    double lo = -10.0;
    double hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (cdf_series(mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

inline std::vector<std::vector<double>> equicorr_dense(int d, double rho) {
    std::vector<std::vector<double>> r(d, std::vector<double>(d, rho));
    for (int i = 0; i < d; ++i) r[i][i] = 1.0;
    return r;
}

/// log|det A| by Gaussian elimination with partial pivoting.
inline double logdet(std::vector<std::vector<double>> a) {
    const auto n = a.size();
    double acc = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        }
        std::swap(a[c], a[piv]);
        acc += std::log(std::abs(a[c][c]));
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return acc;
}

/// z' A^{-1} z by solving A x = z with Gauss-Jordan elimination.
inline double quadform(std::vector<std::vector<double>> a, std::vector<double> z) {
    const auto n = a.size();
    std::vector<double> x = z;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        }
        std::swap(a[c], a[piv]);
        std::swap(x[c], x[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            x[r] -= f * x[c];
        }
    }
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) q += z[i] * x[i] / a[i][i];
    return q;
}

struct McEstimate {
    double mean = 0.0;
    double se = 0.0;
};

/// Monte Carlo estimate of P(a1<=Z1<=b1, a2<=Z2<=b2) for a standardised
/// bivariate normal with correlation rho, using std::normal_distribution.
inline McEstimate bvn_rect_mc(double rho, double a1, double b1, double a2, double b2,
                              std::size_t draws, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    const double s = std::sqrt(1.0 - rho * rho);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < draws; ++i) {
        const double z1 = nd(gen);
        const double z2 = rho * z1 + s * nd(gen);
        if (z1 >= a1 && z1 <= b1 && z2 >= a2 && z2 <= b2) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(draws);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(draws))};
}

}  // namespace oracle
