#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "copulascore/inference.hpp"
#include "copulascore/matrix.hpp"
#include "copulascore/scoring.hpp"

namespace copulascore {

/// CCC-GARCH(1,1) data-generating process with identical volatility
/// parameters across coordinates and an equicorrelated Gaussian innovation.
struct DgpSpec {
    double omega0 = 0.001;
    double alpha0 = 0.1;
    double beta0 = 0.5;
    double rho = 0.5;
    int dim = 5;
    int n = 300;
    int burn_in = 500;

    /// Throws std::invalid_argument on a non-stationary or otherwise invalid
    /// specification.
    void validate() const;
    double stationary_variance() const { return omega0 / (1.0 - alpha0 - beta0); }
};

/// Half-widths of the uniform multiplicative noise U[1 - delta, 1 + delta]
/// applied to the true volatility parameters and to rho.
struct ContaminationSpec {
    double delta_marg = 0.0;
    double delta_cop = 0.0;

    void validate(const DgpSpec& dgp) const;
};

enum class SettingLabel { I, II, III, IV, V };

/// A pair of contaminated forecasters; forecaster 2 is never more
/// contaminated than forecaster 1.
struct Setting {
    SettingLabel label = SettingLabel::I;
    ContaminationSpec forecaster1;
    ContaminationSpec forecaster2;

    static Setting standard(SettingLabel label);
    static SettingLabel parse_label(const std::string& s);
};

std::string to_string(SettingLabel label);

/// Simulated observations and true conditional standard deviations, both
/// n x dim, burn-in removed.
struct SimPath {
    Matrix y;
    Matrix sigma;
    /// Full path including burn-in, kept for full-recursion forecasts.
    Matrix y_full;
};

/// Deterministic given (spec, seed, replication). Volatilities start at the
/// stationary variance and the first burn_in steps are discarded.
SimPath simulate_path(const DgpSpec& spec, std::uint64_t seed,
                      std::uint64_t replication = 0);

/// How contaminated GARCH parameters enter the volatility forecast.
enum class ContaminationMode {
    /// sigma~^2 = delta * sigma^2(theta), using the true lagged state.
    OneStep,
    /// Filter the whole observed history with parameters delta * theta.
    FullRecursion,
};

struct Forecast {
    MarginalForecast marginals;
    CopulaForecast copula;
};

/// Forecast for period t of the path with fresh contamination draws
/// delta_marg (common to all coordinates) and delta_cop.
Forecast contaminated_forecast(const DgpSpec& spec, const SimPath& path, std::size_t t,
                               const ContaminationSpec& cspec, Rng& rng,
                               ContaminationMode mode = ContaminationMode::OneStep);

/// Per-period scores of both forecasters on one simulated path.
struct ScoredReplication {
    std::vector<BivariateScore> forecaster1;
    std::vector<BivariateScore> forecaster2;
};

/// Random streams: replication r of master seed s uses Rng(s, r, k) with
/// k = 0 for the path, 1 for forecaster 1 and 2 for forecaster 2.
ScoredReplication score_replication(const DgpSpec& spec, const Setting& setting,
                                    std::uint64_t seed, std::uint64_t replication,
                                    ContaminationMode mode = ContaminationMode::OneStep);

struct FreqRow {
    Hypothesis hypothesis = Hypothesis::Equal;
    SettingLabel setting = SettingLabel::I;
    int n = 0;
    int reps = 0;
    std::uint64_t seed = 0;
    int marginal_rejections = 0;
    int copula_rejections = 0;

    int joint_rejections() const { return marginal_rejections + copula_rejections; }
    double marginal_pct() const { return 100.0 * marginal_rejections / reps; }
    double copula_pct() const { return 100.0 * copula_rejections / reps; }
    double joint_pct() const { return 100.0 * joint_rejections() / reps; }
};

/// Rejection frequencies for both hypotheses (Equal first).
struct FreqTable {
    std::vector<FreqRow> rows;

    const FreqRow& row(Hypothesis h) const;
};

struct ExperimentOptions {
    double alpha = 0.05;
    HacConfig hac{};
    ContaminationMode mode = ContaminationMode::OneStep;
    /// 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;
};

/// Runs `reps` replications of both two-step tests. The tally does not
/// depend on the thread count.
FreqTable run_experiment(const DgpSpec& spec, const Setting& setting, int reps,
                         std::uint64_t seed, const ExperimentOptions& options = {});

}  // namespace copulascore
