#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "copulascore/inference.hpp"
#include "copulascore/scoring.hpp"

namespace copulascore::cli {

/// Exact header of the pairwise scores file.
inline constexpr const char* kScoresHeader = "t,s_marg_1,s_cop_1,s_marg_2,s_cop_2";
/// Header of a single-model scores file (used by matrix mode).
inline constexpr const char* kModelScoresHeader = "t,s_marg,s_cop";

/// Input error with the 1-based line and, where known, the column name.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line,
               std::optional<std::string> column = std::nullopt);

    std::size_t line() const { return line_; }
    const std::optional<std::string>& column() const { return column_; }

private:
    std::size_t line_;
    std::optional<std::string> column_;
};

/// Per-period scores of two competing forecasters.
struct ScoresFile {
    std::vector<double> t;
    std::vector<BivariateScore> model1;
    std::vector<BivariateScore> model2;

    std::size_t size() const { return t.size(); }
    ScoreDiffSeries diffs() const { return score_diffs(model1, model2); }
    bool operator==(const ScoresFile&) const = default;
};

/// Per-period scores of a single forecaster.
struct ModelScores {
    std::string name;
    std::vector<double> t;
    std::vector<BivariateScore> scores;
};

/// Accepts two layouts:
///  * `t,s_marg_1,s_cop_1,s_marg_2,s_cop_2`
///  * `t,logf_1_1,...,logf_1_d,logc_1,logf_2_1,...,logf_2_d,logc_2` with
///    per-coordinate marginal log-densities and the copula log-density at
///    the PITs, reduced to scores as s_marg = -sum logf, s_cop = -logc.
/// Rows need strictly increasing t, finite numeric cells and at least two
/// rows. Throws ParseError.
ScoresFile parse_scores(std::istream& in);
ScoresFile parse_scores(const std::filesystem::path& path);

/// Lossless (17 significant digits) so that re-parsing reproduces the
/// in-memory values exactly.
void write_scores(std::ostream& out, const ScoresFile& scores);
void write_scores(const std::filesystem::path& path, const ScoresFile& scores);

ModelScores parse_model_scores(std::istream& in, std::string name);
/// Every `*.csv` file in `dir`, sorted by file name; the model name is the
/// file stem. All files must share the same t column.
std::vector<ModelScores> load_model_dir(const std::filesystem::path& dir);

/// Decimal with 12 significant digits, as used in every report.
std::string format_number(double x);
/// x rounded to 12 significant digits.
double round12(double x);

}  // namespace copulascore::cli
