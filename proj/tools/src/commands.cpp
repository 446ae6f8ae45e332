#include "copulascore/cli/commands.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <map>
#include <ostream>

namespace copulascore::cli {

using nlohmann::json;

namespace {

json number(double x) { return std::isfinite(x) ? json(round12(x)) : json(nullptr); }

json optional_number(const std::optional<double>& x) {
    return x ? number(*x) : json(nullptr);
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", p.string()));
    return f;
}

BivariateScore average(const std::vector<BivariateScore>& s) {
    BivariateScore avg;
    for (const auto& v : s) {
        avg.s_marg += v.s_marg;
        avg.s_cop += v.s_cop;
    }
    avg.s_marg /= static_cast<double>(s.size());
    avg.s_cop /= static_cast<double>(s.size());
    return avg;
}

TwoStepResult run_test(const ScoreDiffSeries& d, const CompareOptions& o) {
    return o.method == TestMethod::TwoStep ? two_step_test(d, o.hac, o.alpha, o.hypothesis)
                                           : bonferroni_test(d, o.hac, o.alpha, o.hypothesis);
}

const std::map<std::string, Hypothesis> kHypotheses{
    {"equal", Hypothesis::Equal}, {"lex", Hypothesis::LexSuperiority}};
const std::map<std::string, HacWeights> kWeights{{"zero", HacWeights::Zero},
                                                 {"bartlett", HacWeights::Bartlett},
                                                 {"truncated", HacWeights::Truncated}};
const std::map<std::string, TestMethod> kMethods{{"two-step", TestMethod::TwoStep},
                                                 {"bonferroni", TestMethod::Bonferroni}};
const std::map<std::string, ContaminationMode> kModes{
    {"one-step", ContaminationMode::OneStep},
    {"full-recursion", ContaminationMode::FullRecursion}};

}  // namespace

TestReport build_report(const ScoresFile& scores, const CompareOptions& options) {
    const ScoreDiffSeries d = scores.diffs();
    TestReport rep{run_test(d, options), options, average(scores.model1),
                   average(scores.model2), scores.t, {}, {}};
    double sm = 0.0;
    double sc = 0.0;
    for (std::size_t t = 0; t < d.size(); ++t) {
        sm += d.marg()[t];
        sc += d.cop()[t];
        rep.cum_marg.push_back(sm / static_cast<double>(t + 1));
        rep.cum_cop.push_back(sc / static_cast<double>(t + 1));
    }
    return rep;
}

json report_json(const TestReport& report) {
    const auto& r = report.result;
    const auto& o = report.options;
    return json{
        {"method", o.method == TestMethod::TwoStep ? "two-step" : "bonferroni"},
        {"hypothesis", to_string(r.hypothesis)},
        {"alpha", number(r.alpha)},
        {"hac", {{"lags", o.hac.lags}, {"weights", to_string(o.hac.weights)}}},
        {"n", r.n},
        {"average_scores",
         {{"model1", {{"s_marg", number(report.average1.s_marg)},
                      {"s_cop", number(report.average1.s_cop)}}},
          {"model2", {{"s_marg", number(report.average2.s_marg)},
                      {"s_cop", number(report.average2.s_cop)}}}}},
        {"mean_diff", {{"marg", number(r.mean_marg)}, {"cop", number(r.mean_cop)}}},
        {"stat_m", number(r.stat_m)},
        {"stat_c", number(r.stat_c)},
        {"omega",
         {{"s_mm", number(r.omega.s_mm)},
          {"s_mc", number(r.omega.s_mc)},
          {"s_cc", number(r.omega.s_cc)}}},
        {"c1", optional_number(r.c1)},
        {"c2", optional_number(r.c2)},
        {"outcome", to_string(r.outcome)},
        {"label", r.label()},
        {"degenerate_fallback", r.degenerate_fallback},
        {"correlation_shrunk", r.correlation_shrunk},
    };
}

void write_cumdiff(std::ostream& out, const TestReport& report) {
    out << "t,cum_d_marg,cum_d_cop\n";
    for (std::size_t i = 0; i < report.t.size(); ++i) {
        out << format_number(report.t[i]) << ',' << format_number(report.cum_marg[i]) << ','
            << format_number(report.cum_cop[i]) << '\n';
    }
}

json compare_matrix(const std::vector<ModelScores>& models, const CompareOptions& options) {
    json names = json::array();
    for (const auto& m : models) names.push_back(m.name);
    json labels = json::array();
    for (std::size_t i = 0; i < models.size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < models.size(); ++j) {
            if (i == j) {
                row.push_back("-");
                continue;
            }
            try {
                row.push_back(run_test(score_diffs(models[i].scores, models[j].scores), options)
                                  .label());
            } catch (const DegenerateSeries&) {
                row.push_back("0");
            }
        }
        labels.push_back(std::move(row));
    }
    return json{{"hypothesis", to_string(options.hypothesis)},
                {"alpha", number(options.alpha)},
                {"models", std::move(names)},
                {"labels", std::move(labels)}};
}

FreqTable simulate(const SimulateOptions& options) {
    DgpSpec dgp = options.dgp;
    dgp.n = options.n;
    ExperimentOptions exp;
    exp.alpha = options.alpha;
    exp.mode = options.mode;
    exp.threads = options.threads;
    return run_experiment(dgp, Setting::standard(options.setting), options.reps, options.seed,
                          exp);
}

void write_freq_csv(std::ostream& out, const FreqTable& table) {
    out << "hypothesis,setting,n,marginal_pct,copula_pct,joint_pct,reps,seed\n";
    for (const auto& r : table.rows) {
        out << to_string(r.hypothesis) << ',' << to_string(r.setting) << ',' << r.n << ','
            << format_number(r.marginal_pct()) << ',' << format_number(r.copula_pct()) << ','
            << format_number(r.joint_pct()) << ',' << r.reps << ',' << r.seed << '\n';
    }
}

json freq_json(const FreqTable& table, const SimulateOptions& options) {
    json rows = json::array();
    for (const auto& r : table.rows) {
        rows.push_back({{"hypothesis", to_string(r.hypothesis)},
                        {"setting", to_string(r.setting)},
                        {"n", r.n},
                        {"marginal_pct", number(r.marginal_pct())},
                        {"copula_pct", number(r.copula_pct())},
                        {"joint_pct", number(r.joint_pct())},
                        {"reps", r.reps},
                        {"seed", r.seed}});
    }
    const auto& g = options.dgp;
    return json{{"alpha", number(options.alpha)},
                {"mode", options.mode == ContaminationMode::OneStep ? "one-step"
                                                                    : "full-recursion"},
                {"dgp",
                 {{"omega0", number(g.omega0)},
                  {"alpha0", number(g.alpha0)},
                  {"beta0", number(g.beta0)},
                  {"rho", number(g.rho)},
                  {"dim", g.dim},
                  {"burn_in", g.burn_in}}},
                {"rows", std::move(rows)}};
}

ScoresFile simulated_scores(const SimulateOptions& options, std::uint64_t replication) {
    DgpSpec dgp = options.dgp;
    dgp.n = options.n;
    const auto scored = score_replication(dgp, Setting::standard(options.setting),
                                          options.seed, replication, options.mode);
    ScoresFile out;
    for (int t = 1; t <= dgp.n; ++t) out.t.push_back(t);
    out.model1 = scored.forecaster1;
    out.model2 = scored.forecaster2;
    return out;
}

Copula parse_base_copula(const std::string& spec) {
    if (spec == "independence") return Copula::independence(2);
    if (spec == "comonotone") return Copula::comonotone(2);
    if (spec == "countermonotone") return Copula::countermonotone();
    const std::string prefix = "gaussian:";
    if (spec.rfind(prefix, 0) == 0) {
        std::size_t used = 0;
        const std::string tail = spec.substr(prefix.size());
        double rho = 0.0;
        try {
            rho = std::stod(tail, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != tail.size()) {
            throw std::invalid_argument(fmt::format("invalid correlation in '{}'", spec));
        }
        return Copula::gaussian(EquiCorr(2, rho));
    }
    throw std::invalid_argument(fmt::format(
        "unknown base copula '{}' (expected independence, comonotone, countermonotone or "
        "gaussian:RHO)",
        spec));
}

MixDirection parse_direction(const std::string& s) {
    if (s == "ur") return MixDirection::UpperRight;
    if (s == "lr") return MixDirection::LowerRight;
    throw std::invalid_argument(fmt::format("unknown direction '{}' (expected ur or lr)", s));
}

void write_cxls_csv(std::ostream& out, const CopulaSample& sample) {
    out << "u1,u2,component\n";
    for (std::size_t i = 0; i < sample.points.rows(); ++i) {
        out << format_number(sample.points(i, 0)) << ',' << format_number(sample.points(i, 1))
            << ',' << sample.component[i] << '\n';
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-step comparison of copula forecasts", "copulascore"};
    app.require_subcommand(1);

    CompareOptions cmp;
    std::string scores_path;
    std::string matrix_dir;
    std::string cumdiff_path;
    auto* compare = app.add_subcommand("compare", "test two forecasters from a scores file");
    auto* scores_opt = compare->add_option("--scores", scores_path, "scores CSV");
    auto* matrix_opt =
        compare->add_option("--matrix", matrix_dir, "directory of per-model score files");
    scores_opt->excludes(matrix_opt);
    compare->add_option("--alpha", cmp.alpha, "significance level")
        ->check(CLI::Range(0.0, 1.0));
    compare->add_option("--hypothesis", cmp.hypothesis, "equal or lex")
        ->transform(CLI::CheckedTransformer(kHypotheses));
    compare->add_option("--hac-lags", cmp.hac.lags, "lag cutoff")->check(CLI::NonNegativeNumber);
    compare->add_option("--hac-weights", cmp.hac.weights, "zero, bartlett or truncated")
        ->transform(CLI::CheckedTransformer(kWeights));
    compare->add_option("--method", cmp.method, "two-step or bonferroni")
        ->transform(CLI::CheckedTransformer(kMethods));
    compare->add_option("--cumdiff", cumdiff_path, "write running mean differences here");

    SimulateOptions sim;
    std::string setting = "i";
    std::string prefix;
    std::string emit_scores;
    auto* simulate_cmd = app.add_subcommand("simulate", "rejection-frequency study");
    simulate_cmd->add_option("--setting", setting, "i, ii, iii, iv or v");
    simulate_cmd->add_option("--n", sim.n, "sample size")->check(CLI::Range(2, 1 << 24));
    simulate_cmd->add_option("--reps", sim.reps, "replications")->check(CLI::Range(1, 1 << 24));
    simulate_cmd->add_option("--alpha", sim.alpha, "significance level")
        ->check(CLI::Range(0.0, 1.0));
    simulate_cmd->add_option("--seed", sim.seed, "master seed");
    simulate_cmd->add_option("--out", prefix, "output prefix (.csv and .json)")->required();
    simulate_cmd->add_option("--threads", sim.threads, "worker threads (0 = all cores)");
    simulate_cmd->add_option("--mode", sim.mode, "one-step or full-recursion")
        ->transform(CLI::CheckedTransformer(kModes));
    simulate_cmd->add_option("--emit-scores", emit_scores,
                             "also write the scores of replication 0 to this file");

    std::string base = "independence";
    std::string direction = "ur";
    std::size_t samples = 10000;
    std::uint64_t demo_seed = 1;
    std::string demo_out;
    auto* demo = app.add_subcommand("cxls-demo", "sample a two-block mixture copula");
    demo->add_option("--base", base,
                     "independence, comonotone, countermonotone or gaussian:RHO");
    demo->add_option("--direction", direction, "ur or lr");
    demo->add_option("--samples", samples, "number of points");
    demo->add_option("--seed", demo_seed, "seed");
    demo->add_option("--out", demo_out, "output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (compare->parsed()) {
            if (!matrix_dir.empty()) {
                out << compare_matrix(load_model_dir(matrix_dir), cmp).dump(2) << '\n';
                return 0;
            }
            if (scores_path.empty()) {
                err << "compare: one of --scores or --matrix is required\n";
                return 2;
            }
            const TestReport report = build_report(parse_scores(scores_path), cmp);
            if (!cumdiff_path.empty()) {
                auto f = open_out(cumdiff_path);
                write_cumdiff(f, report);
            }
            out << report_json(report).dump(2) << '\n';
            return 0;
        }
        if (simulate_cmd->parsed()) {
            sim.setting = Setting::parse_label(setting);
            const FreqTable table = simulate(sim);
            {
                auto f = open_out(prefix + ".csv");
                write_freq_csv(f, table);
            }
            {
                auto f = open_out(prefix + ".json");
                f << freq_json(table, sim).dump(2) << '\n';
            }
            if (!emit_scores.empty()) write_scores(emit_scores, simulated_scores(sim));
            write_freq_csv(out, table);
            return 0;
        }
        if (demo->parsed()) {
            const Copula mix =
                Copula::mixture(parse_base_copula(base), parse_direction(direction));
            auto f = open_out(demo_out);
            write_cxls_csv(f, copula_sample_labelled(mix, samples, demo_seed));
            return 0;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace copulascore::cli
