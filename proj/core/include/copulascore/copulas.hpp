#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "copulascore/dist_math.hpp"
#include "copulascore/matrix.hpp"

namespace copulascore {

class Copula;

/// Which pair of quarters of the unit square a two-block mixture occupies.
/// UpperRight places the translated copy up and to the right of the original
/// (blocks on the main diagonal); LowerRight places it down and to the right
/// (blocks on the anti-diagonal).
enum class MixDirection { UpperRight, LowerRight };

struct IndependenceCopula {
    int dim = 2;
};
struct ComonotoneCopula {
    int dim = 2;
};
/// Only exists in two dimensions.
struct CountermonotoneCopula {};
struct GaussianCopula {
    EquiCorr corr;
};
/// Copula of an equal-weight mixture of a bivariate law and its translate.
/// `lambda` is the mixing weight of the underlying distributions; the
/// resulting copula does not depend on it.
struct MixtureCopula {
    std::shared_ptr<const Copula> base;
    MixDirection direction = MixDirection::UpperRight;
    double lambda = 0.5;
};

/// Thrown when a copula variant has no closed-form cdf.
class CdfUnsupported : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class Copula {
public:
    using Variant = std::variant<IndependenceCopula, ComonotoneCopula,
                                 CountermonotoneCopula, GaussianCopula, MixtureCopula>;

    static Copula independence(int dim);
    static Copula comonotone(int dim);
    static Copula countermonotone();
    static Copula gaussian(const EquiCorr& corr);
    /// Throws std::invalid_argument unless base is two-dimensional and
    /// 0 < lambda < 1.
    static Copula mixture(const Copula& base, MixDirection direction,
                          double lambda = 0.5);

    int dim() const;
    const Variant& variant() const { return v_; }
    std::string describe() const;

private:
    explicit Copula(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

/// A two-dimensional copula extended to R^2 by clamping each argument to
/// [0,1].
struct ExtendedCopula {
    Copula inner;

    explicit ExtendedCopula(Copula c);
    double operator()(double x1, double x2) const;
};

/// Closed-form cdf. Throws CdfUnsupported for the Gaussian variant and
/// std::invalid_argument on a dimension mismatch or an argument outside
/// [0,1].
double copula_cdf(const Copula& c, std::span<const double> u);

/// Cdf of the two-block mixture built on `base`:
///   UpperRight: (C(2u1, 2u2) + C(2u1 - 1, 2u2 - 1)) / 2
///   LowerRight: (C(2u1, 2u2 - 1) + C(2u1 - 1, 2u2)) / 2
double mixture_cdf(const ExtendedCopula& base, MixDirection direction, double u1,
                   double u2);

/// Points drawn from a copula, with the mixture block each point came from
/// (always 0 for non-mixture copulas).
struct CopulaSample {
    Matrix points;
    std::vector<int> component;
};

/// n i.i.d. draws, deterministic given the seed. Gaussian draws are clamped
/// to [1e-15, 1 - 1e-15].
CopulaSample copula_sample_labelled(const Copula& c, std::size_t n,
                                    std::uint64_t seed);
Matrix copula_sample(const Copula& c, std::size_t n, std::uint64_t seed);

class Rng;

/// Fills z with one draw from N(0, R). Uses z = a*w + b*(sum w)*1 with
/// w ~ N(0, I), a^2 = 1 - rho and d*b^2 + 2ab = rho, valid for every
/// admissible rho.
void sample_equicorr_normal(const EquiCorr& ec, Rng& rng, std::span<double> z);

/// log c_R(u) for the Gaussian equicorrelation copula. Throws
/// std::domain_error unless every u_i lies strictly inside (0,1).
double gaussian_copula_logdensity(const EquiCorr& ec, std::span<const double> u);

/// Same density evaluated from normal scores z_i = norm_quantile(u_i).
double gaussian_copula_logdensity_scores(const EquiCorr& ec,
                                         std::span<const double> z);

}  // namespace copulascore
