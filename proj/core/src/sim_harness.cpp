#include "copulascore/sim_harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fmt/format.h>
#include <stdexcept>
#include <thread>

#include "copulascore/copulas.hpp"
#include "copulascore/rng.hpp"

namespace copulascore {

namespace {

enum Stream : std::uint64_t { kPathStream = 0, kForecaster1 = 1, kForecaster2 = 2 };

struct RepOutcome {
    Outcome equal = Outcome::NoRejection;
    Outcome lex = Outcome::NoRejection;
};

RepOutcome run_replication(const DgpSpec& spec, const Setting& setting,
                           std::uint64_t seed, std::uint64_t rep,
                           const ExperimentOptions& opt) {
    const ScoredReplication scored = score_replication(spec, setting, seed, rep, opt.mode);
    const ScoreDiffSeries d = score_diffs(scored.forecaster1, scored.forecaster2);
    return {two_step_test(d, opt.hac, opt.alpha, Hypothesis::Equal).outcome,
            two_step_test(d, opt.hac, opt.alpha, Hypothesis::LexSuperiority).outcome};
}

}  // namespace

void DgpSpec::validate() const {
    if (!(omega0 > 0.0 && alpha0 >= 0.0 && beta0 >= 0.0 && alpha0 + beta0 < 1.0)) {
        throw std::invalid_argument("DgpSpec: need omega0 > 0 and alpha0 + beta0 < 1");
    }
    if (!EquiCorr::is_valid(dim, rho)) {
        throw std::invalid_argument("DgpSpec: rho is not admissible for this dimension");
    }
    if (n < 2 || burn_in < 0) {
        throw std::invalid_argument("DgpSpec: need n >= 2 and burn_in >= 0");
    }
}

void ContaminationSpec::validate(const DgpSpec& dgp) const {
    if (!(delta_marg >= 0.0 && delta_marg < 1.0 && delta_cop >= 0.0)) {
        throw std::invalid_argument("ContaminationSpec: half-widths must lie in [0,1)");
    }
    if (!EquiCorr::is_valid(dgp.dim, dgp.rho * (1.0 + delta_cop)) ||
        !EquiCorr::is_valid(dgp.dim, dgp.rho * (1.0 - delta_cop))) {
        throw std::invalid_argument(fmt::format(
            "ContaminationSpec: delta_cop={} can push rho outside the admissible range",
            delta_cop));
    }
}

Setting Setting::standard(SettingLabel label) {
    switch (label) {
        case SettingLabel::I:
            return {label, {0.1, 0.1}, {0.1, 0.1}};
        case SettingLabel::II:
            return {label, {0.1, 0.5}, {0.1, 0.1}};
        case SettingLabel::III:
            return {label, {0.5, 0.5}, {0.5, 0.1}};
        case SettingLabel::IV:
            return {label, {0.5, 0.1}, {0.1, 0.1}};
        case SettingLabel::V:
            return {label, {0.5, 0.5}, {0.1, 0.1}};
    }
    throw std::invalid_argument("unknown setting");
}

SettingLabel Setting::parse_label(const std::string& s) {
    if (s == "i") return SettingLabel::I;
    if (s == "ii") return SettingLabel::II;
    if (s == "iii") return SettingLabel::III;
    if (s == "iv") return SettingLabel::IV;
    if (s == "v") return SettingLabel::V;
    throw std::invalid_argument(fmt::format("unknown setting '{}' (expected i..v)", s));
}

std::string to_string(SettingLabel label) {
    switch (label) {
        case SettingLabel::I:
            return "i";
        case SettingLabel::II:
            return "ii";
        case SettingLabel::III:
            return "iii";
        case SettingLabel::IV:
            return "iv";
        case SettingLabel::V:
            return "v";
    }
    return "?";
}

SimPath simulate_path(const DgpSpec& spec, std::uint64_t seed, std::uint64_t replication) {
    spec.validate();
    const auto d = static_cast<std::size_t>(spec.dim);
    const auto total = static_cast<std::size_t>(spec.n + spec.burn_in);
    const EquiCorr corr(spec.dim, spec.rho);
    Rng rng(seed, replication, kPathStream);

    SimPath path{Matrix(static_cast<std::size_t>(spec.n), d),
                 Matrix(static_cast<std::size_t>(spec.n), d), Matrix(total, d)};
    std::vector<double> var(d, spec.stationary_variance());
    std::vector<double> eps(d);
    for (std::size_t s = 0; s < total; ++s) {
        sample_equicorr_normal(corr, rng, eps);
        const bool keep = s >= static_cast<std::size_t>(spec.burn_in);
        const std::size_t t = s - static_cast<std::size_t>(spec.burn_in);
        for (std::size_t i = 0; i < d; ++i) {
            const double sd = std::sqrt(var[i]);
            const double y = sd * eps[i];
            path.y_full(s, i) = y;
            if (keep) {
                path.y(t, i) = y;
                path.sigma(t, i) = sd;
            }
            var[i] = spec.omega0 + spec.alpha0 * y * y + spec.beta0 * var[i];
        }
    }
    return path;
}

Forecast contaminated_forecast(const DgpSpec& spec, const SimPath& path, std::size_t t,
                               const ContaminationSpec& cspec, Rng& rng,
                               ContaminationMode mode) {
    const double delta_marg = rng.uniform(1.0 - cspec.delta_marg, 1.0 + cspec.delta_marg);
    const double delta_cop = rng.uniform(1.0 - cspec.delta_cop, 1.0 + cspec.delta_cop);
    const auto d = static_cast<std::size_t>(spec.dim);

    std::vector<double> sd(d);
    if (mode == ContaminationMode::OneStep) {
        for (std::size_t i = 0; i < d; ++i) sd[i] = std::sqrt(delta_marg) * path.sigma(t, i);
    } else {
        const double w = delta_marg * spec.omega0;
        const double a = delta_marg * spec.alpha0;
        const double b = delta_marg * spec.beta0;
        if (!(a + b < 1.0)) {
            throw std::invalid_argument("contaminated_forecast: scaled GARCH is not stationary");
        }
        const std::size_t global = t + static_cast<std::size_t>(spec.burn_in);
        for (std::size_t i = 0; i < d; ++i) {
            double var = w / (1.0 - a - b);
            for (std::size_t s = 0; s < global; ++s) {
                const double y = path.y_full(s, i);
                var = w + a * y * y + b * var;
            }
            sd[i] = std::sqrt(var);
        }
    }

    const double rho = spec.rho * delta_cop;
    if (!EquiCorr::is_valid(spec.dim, rho)) {
        throw std::invalid_argument(
            fmt::format("contaminated_forecast: contaminated rho={} is not admissible", rho));
    }
    return {MarginalForecast(std::move(sd)), GaussianCopula{EquiCorr(spec.dim, rho)}};
}

ScoredReplication score_replication(const DgpSpec& spec, const Setting& setting,
                                    std::uint64_t seed, std::uint64_t replication,
                                    ContaminationMode mode) {
    setting.forecaster1.validate(spec);
    setting.forecaster2.validate(spec);
    const SimPath path = simulate_path(spec, seed, replication);
    Rng rng1(seed, replication, kForecaster1);
    Rng rng2(seed, replication, kForecaster2);

    ScoredReplication out;
    out.forecaster1.reserve(static_cast<std::size_t>(spec.n));
    out.forecaster2.reserve(static_cast<std::size_t>(spec.n));
    for (std::size_t t = 0; t < static_cast<std::size_t>(spec.n); ++t) {
        const auto y = path.y.row(t);
        const Forecast f1 = contaminated_forecast(spec, path, t, setting.forecaster1, rng1, mode);
        const Forecast f2 = contaminated_forecast(spec, path, t, setting.forecaster2, rng2, mode);
        out.forecaster1.push_back(bivariate_score(f1.copula, f1.marginals, y));
        out.forecaster2.push_back(bivariate_score(f2.copula, f2.marginals, y));
    }
    return out;
}

const FreqRow& FreqTable::row(Hypothesis h) const {
    for (const auto& r : rows) {
        if (r.hypothesis == h) return r;
    }
    throw std::out_of_range("FreqTable: hypothesis not present");
}

FreqTable run_experiment(const DgpSpec& spec, const Setting& setting, int reps,
                         std::uint64_t seed, const ExperimentOptions& options) {
    if (reps < 1) throw std::invalid_argument("run_experiment: reps must be >= 1");
    spec.validate();
    setting.forecaster1.validate(spec);
    setting.forecaster2.validate(spec);

    unsigned threads = options.threads;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(reps));

    std::vector<RepOutcome> outcomes(static_cast<std::size_t>(reps));
    std::vector<std::exception_ptr> errors(threads);
    auto worker = [&](unsigned k) {
        try {
            for (std::size_t r = k; r < outcomes.size(); r += threads) {
                outcomes[r] = run_replication(spec, setting, seed, r, options);
            }
        } catch (...) {
            errors[k] = std::current_exception();
        }
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker, k);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    FreqTable table;
    for (Hypothesis h : {Hypothesis::Equal, Hypothesis::LexSuperiority}) {
        FreqRow row{h, setting.label, spec.n, reps, seed, 0, 0};
        for (const auto& o : outcomes) {
            const Outcome out = h == Hypothesis::Equal ? o.equal : o.lex;
            if (out == Outcome::RejectedAtMarginalStep) ++row.marginal_rejections;
            if (out == Outcome::RejectedAtCopulaStep) ++row.copula_rejections;
        }
        table.rows.push_back(row);
    }
    return table;
}

}  // namespace copulascore
