#include "copulascore/copulas.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "copulascore/rng.hpp"

namespace copulascore {

namespace {

constexpr double kUnitClamp = 1e-15;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

void check_unit(std::span<const double> u, int dim) {
    if (static_cast<int>(u.size()) != dim) {
        throw std::invalid_argument(
            fmt::format("copula_cdf: expected {} coordinates, got {}", dim, u.size()));
    }
    for (double v : u) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument(
                fmt::format("copula_cdf: argument {} outside [0,1]", v));
        }
    }
}

// Draws one point into `out`; returns the mixture block (0 otherwise).
int draw_point(const Copula& c, Rng& rng, std::span<double> out) {
    return std::visit(
        overloaded{
            [&](const IndependenceCopula&) {
                for (double& v : out) v = rng.uniform();
                return 0;
            },
            [&](const ComonotoneCopula&) {
                const double u = rng.uniform();
                std::fill(out.begin(), out.end(), u);
                return 0;
            },
            [&](const CountermonotoneCopula&) {
                const double u = rng.uniform();
                out[0] = u;
                out[1] = 1.0 - u;
                return 0;
            },
            [&](const GaussianCopula& g) {
                sample_equicorr_normal(g.corr, rng, out);
                for (double& v : out) {
                    v = std::clamp(norm_cdf(v), kUnitClamp, 1.0 - kUnitClamp);
                }
                return 0;
            },
            [&](const MixtureCopula& m) {
                double inner[2];
                draw_point(*m.base, rng, inner);
                const int block = rng.coin() ? 1 : 0;
                // Block 0 holds the untranslated copy in the lower-left
                // quarter (UpperRight) or upper-left quarter (LowerRight).
                double shift1 = block == 0 ? 0.0 : 0.5;
                double shift2 = shift1;
                if (m.direction == MixDirection::LowerRight) shift2 = 0.5 - shift1;
                out[0] = shift1 + 0.5 * inner[0];
                out[1] = shift2 + 0.5 * inner[1];
                return block;
            },
        },
        c.variant());
}

}  // namespace

Copula Copula::independence(int dim) {
    if (dim < 1) throw std::invalid_argument("independence copula: dim must be >= 1");
    return Copula(IndependenceCopula{dim});
}

Copula Copula::comonotone(int dim) {
    if (dim < 1) throw std::invalid_argument("comonotone copula: dim must be >= 1");
    return Copula(ComonotoneCopula{dim});
}

Copula Copula::countermonotone() { return Copula(CountermonotoneCopula{}); }

Copula Copula::gaussian(const EquiCorr& corr) { return Copula(GaussianCopula{corr}); }

Copula Copula::mixture(const Copula& base, MixDirection direction, double lambda) {
    if (base.dim() != 2) {
        throw std::invalid_argument("mixture copula: base must be two-dimensional");
    }
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw std::invalid_argument("mixture copula: lambda must lie in (0,1)");
    }
    return Copula(MixtureCopula{std::make_shared<const Copula>(base), direction, lambda});
}

int Copula::dim() const {
    return std::visit(overloaded{
                          [](const IndependenceCopula& c) { return c.dim; },
                          [](const ComonotoneCopula& c) { return c.dim; },
                          [](const CountermonotoneCopula&) { return 2; },
                          [](const GaussianCopula& c) { return c.corr.dim; },
                          [](const MixtureCopula&) { return 2; },
                      },
                      v_);
}

std::string Copula::describe() const {
    return std::visit(
        overloaded{
            [](const IndependenceCopula& c) { return fmt::format("independence({})", c.dim); },
            [](const ComonotoneCopula& c) { return fmt::format("comonotone({})", c.dim); },
            [](const CountermonotoneCopula&) { return std::string("countermonotone"); },
            [](const GaussianCopula& c) {
                return fmt::format("gaussian(dim={}, rho={})", c.corr.dim, c.corr.rho);
            },
            [](const MixtureCopula& m) {
                return fmt::format("mixture({}, {})", m.base->describe(),
                                   m.direction == MixDirection::UpperRight ? "ur" : "lr");
            },
        },
        v_);
}

ExtendedCopula::ExtendedCopula(Copula c) : inner(std::move(c)) {
    if (inner.dim() != 2) {
        throw std::invalid_argument("ExtendedCopula: inner copula must be two-dimensional");
    }
}

double ExtendedCopula::operator()(double x1, double x2) const {
    const double u[2] = {clamp_unit(x1), clamp_unit(x2)};
    return copula_cdf(inner, u);
}

double copula_cdf(const Copula& c, std::span<const double> u) {
    check_unit(u, c.dim());
    return std::visit(
        overloaded{
            [&](const IndependenceCopula&) {
                double p = 1.0;
                for (double v : u) p *= v;
                return p;
            },
            [&](const ComonotoneCopula&) { return *std::min_element(u.begin(), u.end()); },
            [&](const CountermonotoneCopula&) { return std::max(u[0] + u[1] - 1.0, 0.0); },
            [&](const GaussianCopula&) -> double {
                throw CdfUnsupported("copula_cdf: no closed-form cdf for the Gaussian copula");
            },
            [&](const MixtureCopula& m) {
                return mixture_cdf(ExtendedCopula(*m.base), m.direction, u[0], u[1]);
            },
        },
        c.variant());
}

double mixture_cdf(const ExtendedCopula& base, MixDirection direction, double u1,
                   double u2) {
    if (direction == MixDirection::UpperRight) {
        return 0.5 * (base(2.0 * u1, 2.0 * u2) + base(2.0 * (u1 - 0.5), 2.0 * (u2 - 0.5)));
    }
    return 0.5 * (base(2.0 * u1, 2.0 * (u2 - 0.5)) + base(2.0 * (u1 - 0.5), 2.0 * u2));
}

CopulaSample copula_sample_labelled(const Copula& c, std::size_t n, std::uint64_t seed) {
    CopulaSample out{Matrix(n, static_cast<std::size_t>(c.dim())), std::vector<int>(n, 0)};
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        out.component[i] = draw_point(c, rng, out.points.row(i));
    }
    return out;
}

Matrix copula_sample(const Copula& c, std::size_t n, std::uint64_t seed) {
    return copula_sample_labelled(c, n, seed).points;
}

void sample_equicorr_normal(const EquiCorr& ec, Rng& rng, std::span<double> z) {
    const double d = ec.dim;
    const double a = std::sqrt(1.0 - ec.rho);
    const double b = (std::sqrt(1.0 + (d - 1.0) * ec.rho) - a) / d;
    double sum = 0.0;
    for (double& v : z) {
        v = rng.normal();
        sum += v;
    }
    for (double& v : z) v = a * v + b * sum;
}

double gaussian_copula_logdensity_scores(const EquiCorr& ec, std::span<const double> z) {
    double zz = 0.0;
    for (double v : z) zz += v * v;
    return -0.5 * equicorr_logdet(ec) - 0.5 * (equicorr_quadform(ec, z) - zz);
}

double gaussian_copula_logdensity(const EquiCorr& ec, std::span<const double> u) {
    if (static_cast<int>(u.size()) != ec.dim) {
        throw std::invalid_argument("gaussian_copula_logdensity: length mismatch");
    }
    std::vector<double> z(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(u[i] > 0.0 && u[i] < 1.0)) {
            throw std::domain_error(
                fmt::format("gaussian_copula_logdensity: u[{}]={} not in (0,1)", i, u[i]));
        }
        z[i] = norm_quantile(u[i]);
    }
    return gaussian_copula_logdensity_scores(ec, z);
}

}  // namespace copulascore
