#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "copulascore/cli/scores_file.hpp"
#include "copulascore/copulas.hpp"
#include "copulascore/inference.hpp"
#include "copulascore/sim_harness.hpp"

namespace copulascore::cli {

enum class TestMethod { TwoStep, Bonferroni };

struct CompareOptions {
    double alpha = 0.05;
    Hypothesis hypothesis = Hypothesis::Equal;
    HacConfig hac{};
    TestMethod method = TestMethod::TwoStep;
};

/// Everything `compare` reports for one pair of forecasters.
struct TestReport {
    TwoStepResult result;
    CompareOptions options;
    BivariateScore average1;
    BivariateScore average2;
    /// Running means (1/T) sum_{t<=T} d_t, one entry per period.
    std::vector<double> t;
    std::vector<double> cum_marg;
    std::vector<double> cum_cop;
};

TestReport build_report(const ScoresFile& scores, const CompareOptions& options);
nlohmann::json report_json(const TestReport& report);
/// CSV with header `t,cum_d_marg,cum_d_cop`.
void write_cumdiff(std::ostream& out, const TestReport& report);

/// Pairwise attribution labels for every ordered pair of models; entry
/// [i][j] tests model i as forecaster 1 against model j as forecaster 2.
nlohmann::json compare_matrix(const std::vector<ModelScores>& models,
                              const CompareOptions& options);

struct SimulateOptions {
    SettingLabel setting = SettingLabel::I;
    int n = 150;
    int reps = 2000;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    ContaminationMode mode = ContaminationMode::OneStep;
    DgpSpec dgp{};
};

FreqTable simulate(const SimulateOptions& options);
/// Columns: hypothesis,setting,n,marginal_pct,copula_pct,joint_pct,reps,seed
void write_freq_csv(std::ostream& out, const FreqTable& table);
nlohmann::json freq_json(const FreqTable& table, const SimulateOptions& options);

/// Scores of both forecasters on replication `replication` of a setting,
/// with t = 1..n.
ScoresFile simulated_scores(const SimulateOptions& options, std::uint64_t replication = 0);

/// Parses `independence`, `comonotone`, `countermonotone` or `gaussian:RHO`
/// into a two-dimensional copula.
Copula parse_base_copula(const std::string& spec);
MixDirection parse_direction(const std::string& s);
/// CSV with header `u1,u2,component`.
void write_cxls_csv(std::ostream& out, const CopulaSample& sample);

/// Command-line entry point. Returns 0 once an analysis completes, whatever
/// its outcome, and nonzero on input or configuration errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace copulascore::cli
