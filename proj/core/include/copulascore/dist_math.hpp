#pragma once

#include <span>

namespace copulascore {

// Standard normal kernels.
double norm_pdf(double x);
double norm_cdf(double x);

/// Inverse of norm_cdf on (0,1). Throws std::domain_error outside the open
/// interval.
double norm_quantile(double p);

/// Correlation matrix with a common off-diagonal entry.
struct EquiCorr {
    int dim = 2;
    double rho = 0.0;

    /// Throws std::invalid_argument unless dim >= 2 and
    /// -1/(dim-1) < rho < 1.
    EquiCorr(int dim, double rho);

    static bool is_valid(int dim, double rho);
};

double equicorr_logdet(const EquiCorr& ec);

/// z' R^{-1} z for the equicorrelation matrix R. z must have length ec.dim.
double equicorr_quadform(const EquiCorr& ec, std::span<const double> z);

/// Covariance of a centered bivariate normal.
struct BvnSpec {
    double sigma11 = 1.0;
    double sigma22 = 1.0;
    double sigma12 = 0.0;

    /// Throws std::invalid_argument if the matrix is not positive definite.
    BvnSpec(double sigma11, double sigma22, double sigma12);

    double correlation() const;
};

/// P(a1 <= Z1 <= b1, a2 <= Z2 <= b2) for Z ~ N(0, spec). Limits may be
/// +-infinity.
///
/// Integrates phi(z1) * P(a2 <= Z2 <= b2 | Z1 = z1) over the standardized
/// first coordinate with composite Gauss-Legendre panels, doubling the panel
/// count until two successive refinements agree to 1e-9. Breakpoints are
/// inserted where
/// the conditional law of Z2 crosses a2 and b2 so that near-singular
/// correlations stay accurate. Infinite limits are truncated at 8.5 standard
/// deviations.
double bvn_rect_prob(const BvnSpec& spec, double a1, double b1, double a2,
                     double b2);

}  // namespace copulascore
