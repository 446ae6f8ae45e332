#include "copulascore/cli/scores_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace copulascore::cli {

namespace {

struct Table {
    std::vector<std::string> header;
    // (line number, cells)
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
};

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.emplace_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

Table read_table(std::istream& in) {
    Table table;
    std::string line;
    std::size_t lineno = 0;
    std::size_t blank_at = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            if (lineno == 1) throw ParseError("missing header", 1);
            if (blank_at == 0) blank_at = lineno;
            continue;
        }
        if (blank_at != 0) throw ParseError("blank line inside data", blank_at);
        if (lineno == 1) {
            table.header = split(line);
        } else {
            table.rows.emplace_back(lineno, split(line));
        }
    }
    if (table.header.empty()) throw ParseError("missing header", 1);
    return table;
}

double parse_cell(const std::string& cell, std::size_t line, const std::string& column) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (cell.empty() || ec != std::errc() || ptr != last) {
        throw ParseError(fmt::format("non-numeric cell '{}'", cell), line, column);
    }
    if (!std::isfinite(value)) {
        throw ParseError(fmt::format("non-finite cell '{}'", cell), line, column);
    }
    return value;
}

// Parses all rows into a numeric matrix, checking the t column.
std::vector<std::vector<double>> numeric_rows(const Table& table) {
    std::vector<std::vector<double>> out;
    out.reserve(table.rows.size());
    const std::size_t width = table.header.size();
    for (const auto& [line, cells] : table.rows) {
        if (cells.size() != width) {
            throw ParseError(
                fmt::format("expected {} fields, found {}", width, cells.size()), line);
        }
        std::vector<double> values(width);
        for (std::size_t c = 0; c < width; ++c) {
            values[c] = parse_cell(cells[c], line, table.header[c]);
        }
        if (!out.empty() && !(values[0] > out.back()[0])) {
            throw ParseError(
                fmt::format("t={} does not exceed the previous t={}", cells[0],
                            format_number(out.back()[0])),
                line, "t");
        }
        out.push_back(std::move(values));
    }
    if (out.size() < 2) {
        throw ParseError(fmt::format("need at least 2 data rows, found {}", out.size()),
                         table.rows.empty() ? 1 : table.rows.back().first);
    }
    return out;
}

void check_header(const std::vector<std::string>& got,
                  const std::vector<std::string>& want) {
    for (std::size_t c = 0; c < std::max(got.size(), want.size()); ++c) {
        if (c >= got.size()) {
            throw ParseError(fmt::format("header is missing column '{}'", want[c]), 1, want[c]);
        }
        if (c >= want.size()) {
            throw ParseError(fmt::format("unexpected header column '{}'", got[c]), 1, got[c]);
        }
        if (got[c] != want[c]) {
            throw ParseError(
                fmt::format("header column {} is '{}', expected '{}'", c + 1, got[c], want[c]),
                1, got[c]);
        }
    }
}

// Dimension of a log-density header, or nullopt if it is not one.
std::optional<std::size_t> density_dim(const std::vector<std::string>& header) {
    if (header.size() < 5 || header.size() % 2 == 0 || header[0] != "t") return std::nullopt;
    const std::size_t d = (header.size() - 3) / 2;
    for (int model = 1; model <= 2; ++model) {
        const std::size_t base = 1 + (model - 1) * (d + 1);
        for (std::size_t i = 0; i < d; ++i) {
            if (header[base + i] != fmt::format("logf_{}_{}", model, i + 1)) return std::nullopt;
        }
        if (header[base + d] != fmt::format("logc_{}", model)) return std::nullopt;
    }
    return d;
}

const std::vector<std::string>& scores_header() {
    static const std::vector<std::string> h = split(kScoresHeader);
    return h;
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t line,
                       std::optional<std::string> column)
    : std::runtime_error(column ? fmt::format("line {}, column '{}': {}", line, *column, what)
                                : fmt::format("line {}: {}", line, what)),
      line_(line),
      column_(std::move(column)) {}

ScoresFile parse_scores(std::istream& in) {
    const Table table = read_table(in);
    ScoresFile out;
    if (const auto d = density_dim(table.header)) {
        for (const auto& row : numeric_rows(table)) {
            out.t.push_back(row[0]);
            BivariateScore s[2];
            for (int model = 0; model < 2; ++model) {
                const std::size_t base = 1 + static_cast<std::size_t>(model) * (*d + 1);
                double logf = 0.0;
                for (std::size_t i = 0; i < *d; ++i) logf += row[base + i];
                s[model] = {-logf, -row[base + *d]};
            }
            out.model1.push_back(s[0]);
            out.model2.push_back(s[1]);
        }
        return out;
    }
    check_header(table.header, scores_header());
    for (const auto& row : numeric_rows(table)) {
        out.t.push_back(row[0]);
        out.model1.push_back({row[1], row[2]});
        out.model2.push_back({row[3], row[4]});
    }
    return out;
}

ScoresFile parse_scores(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
    return parse_scores(in);
}

void write_scores(std::ostream& out, const ScoresFile& scores) {
    out << kScoresHeader << '\n';
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", scores.t[i],
                           scores.model1[i].s_marg, scores.model1[i].s_cop,
                           scores.model2[i].s_marg, scores.model2[i].s_cop);
    }
}

void write_scores(const std::filesystem::path& path, const ScoresFile& scores) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    write_scores(out, scores);
}

ModelScores parse_model_scores(std::istream& in, std::string name) {
    const Table table = read_table(in);
    check_header(table.header, split(kModelScoresHeader));
    ModelScores out{std::move(name), {}, {}};
    for (const auto& row : numeric_rows(table)) {
        out.t.push_back(row[0]);
        out.scores.push_back({row[1], row[2]});
    }
    return out;
}

std::vector<ModelScores> load_model_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw std::runtime_error(fmt::format("'{}' is not a directory", dir.string()));
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.size() < 2) {
        throw std::runtime_error(
            fmt::format("'{}' must contain at least two model score files", dir.string()));
    }
    std::vector<ModelScores> models;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", f.string()));
        try {
            models.push_back(parse_model_scores(in, f.stem().string()));
        } catch (const ParseError& e) {
            throw std::runtime_error(fmt::format("{}: {}", f.string(), e.what()));
        }
        if (models.back().t != models.front().t) {
            throw std::runtime_error(fmt::format(
                "{}: t column differs from {}", f.string(), files.front().string()));
        }
    }
    return models;
}

std::string format_number(double x) { return fmt::format("{:.12g}", x); }

double round12(double x) {
    if (!std::isfinite(x)) return x;
    return std::stod(format_number(x));
}

}  // namespace copulascore::cli
