#include "kellylab/backtest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "kellylab/kelly_core.hpp"

namespace kellylab {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const auto end = comma == std::string::npos ? line.size() : comma;
    fields.emplace_back(trim(std::string_view(line).substr(start, end - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool blank(const std::string& line) { return trim(line).empty(); }

double parse_number(const std::string& field, std::size_t row, const std::string& column) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << "row " << row << ", column " << column << ": '" << field << "' is not a finite decimal";
    throw CsvError(ErrorKind::ParseError, msg.str(), row, column);
  }
  return value;
}

struct CsvGrid {
  std::vector<std::string> labels;  // header minus the key column
  std::vector<std::string> keys;
  std::vector<std::vector<double>> rows;
};

CsvGrid read_grid(std::istream& in, const std::string& key_column) {
  CsvGrid grid;
  std::string line;
  bool have_header = false;
  while (!have_header && std::getline(in, line)) {
    if (blank(line)) continue;
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
      line.erase(0, 3);
    }
    auto header = split(line);
    if (header.size() < 2 || header.front() != key_column) {
      throw CsvError(ErrorKind::ParseError,
                     "header must be '" + key_column + ",<asset1>,...' with at least one asset", 0,
                     key_column);
    }
    grid.labels.assign(header.begin() + 1, header.end());
    have_header = true;
  }
  if (!have_header) throw CsvError(ErrorKind::ParseError, "input is empty", 0, key_column);

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    ++row;
    auto fields = split(line);
    if (fields.size() != grid.labels.size() + 1) {
      std::ostringstream msg;
      msg << "row " << row << " has " << fields.size() << " fields, header has "
          << grid.labels.size() + 1;
      throw CsvError(ErrorKind::ParseError, msg.str(), row, key_column);
    }
    std::vector<double> values;
    values.reserve(grid.labels.size());
    for (std::size_t c = 0; c < grid.labels.size(); ++c) {
      values.push_back(parse_number(fields[c + 1], row, grid.labels[c]));
    }
    grid.keys.push_back(std::move(fields.front()));
    grid.rows.push_back(std::move(values));
  }
  if (grid.rows.empty()) throw CsvError(ErrorKind::ParseError, "no data rows", 0, key_column);
  return grid;
}

std::vector<std::vector<double>> transpose(const std::vector<std::vector<double>>& rows) {
  std::vector<std::vector<double>> cols(rows.front().size(), std::vector<double>(rows.size()));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (std::size_t i = 0; i < rows[t].size(); ++i) cols[i][t] = rows[t][i];
  }
  return cols;
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  return in;
}

// Uniform on [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t draw(const SimplexVector& probs, std::mt19937_64& rng) {
  const double u = unit_uniform(rng);
  double cdf = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] == 0.0) continue;
    last_positive = i;
    cdf += probs[i];
    if (u < cdf) return i;
  }
  return last_positive;
}

std::string period_label(std::size_t t, std::size_t n) {
  const auto width = std::to_string(n).size();
  std::ostringstream s;
  s << 't' << std::setw(static_cast<int>(width)) << std::setfill('0') << t;
  return s.str();
}

}  // namespace

ReturnsTable load_returns(std::istream& in, const LoadOptions& options) {
  CsvGrid grid = read_grid(in, "date");

  std::unordered_set<std::string> seen;
  for (std::size_t t = 0; t < grid.keys.size(); ++t) {
    const std::size_t row = t + 1;
    const std::string& date = grid.keys[t];
    if (!seen.insert(date).second) {
      throw CsvError(ErrorKind::DuplicatePeriod, "row " + std::to_string(row) + ": period '" + date +
                                                     "' appears more than once",
                     row, "date");
    }
    if (t > 0 && !(grid.keys[t - 1] < date)) {
      throw CsvError(ErrorKind::UnorderedPeriod, "row " + std::to_string(row) + ": period '" + date +
                                                     "' does not follow '" + grid.keys[t - 1] + "'",
                     row, "date");
    }
    for (std::size_t i = 0; i < grid.labels.size(); ++i) {
      const double r = grid.rows[t][i];
      const bool ok = options.horse_race_mode ? r >= 0.0 : r > 0.0;
      if (!ok) {
        std::ostringstream msg;
        msg << "row " << row << ", column " << grid.labels[i] << ": gross return " << r
            << (options.horse_race_mode ? " is negative" : " is not positive");
        throw CsvError(ErrorKind::NonPositiveReturn, msg.str(), row, grid.labels[i]);
      }
    }
  }

  ReturnMatrix matrix(transpose(grid.rows), grid.labels, grid.keys, options.horse_race_mode);
  return ReturnsTable{std::move(grid.keys), std::move(grid.labels), std::move(matrix),
                      options.horse_race_mode};
}

ReturnsTable load_returns_file(const std::string& path, const LoadOptions& options) {
  auto in = open(path);
  return load_returns(in, options);
}

ScenarioSet load_scenarios(std::istream& in) {
  CsvGrid grid = read_grid(in, "prob");
  std::vector<double> probs;
  for (std::size_t k = 0; k < grid.keys.size(); ++k) {
    probs.push_back(parse_number(grid.keys[k], k + 1, "prob"));
  }
  return ScenarioSet(SimplexVector(std::move(probs)), std::move(grid.rows));
}

ScenarioSet load_scenarios_file(const std::string& path) {
  auto in = open(path);
  return load_scenarios(in);
}

void write_returns_csv(std::ostream& out, const ReturnsTable& table) {
  out << "date";
  for (const auto& a : table.assets) out << ',' << a;
  out << '\n';
  const auto precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t t = 0; t < table.periods(); ++t) {
    out << table.dates[t];
    for (std::size_t i = 0; i < table.assets.size(); ++i) out << ',' << table.gross_returns(i, t);
    out << '\n';
  }
  out.precision(precision);
}

double ComparisonReport::delta_nats() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double a = growth_a ? growth_a->value : -inf;
  const double b = growth_b ? growth_b->value : -inf;
  if (!growth_a && !growth_b) return std::numeric_limits<double>::quiet_NaN();
  return b - a;
}

ComparisonReport compare_strategies(const ReturnsTable& table, const SimplexVector& w_a,
                                    const SimplexVector& w_b) {
  auto growth = [&](const SimplexVector& w) -> Outcome<Nats> {
    const auto path = wealth_path(table.gross_returns, w);
    if (!path) return Outcome<Nats>(path.unbounded());
    return path->growth;
  };
  return ComparisonReport{
      table.periods(), growth(w_a), growth(w_b),
      "delta = g(W_B) - g(W_A) = KL(W*||W_A) - KL(W*||W_B): the change in divergence from the "
      "unknown growth-optimal portfolio W*, in bits; the allocation-independent money and "
      "entropy terms cancel. Realized growth over this sample only; stationarity is not assumed."};
}

nlohmann::ordered_json json_number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

nlohmann::ordered_json to_json(const ComparisonReport& report) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double ga = report.growth_a ? report.growth_a->value : -inf;
  const double gb = report.growth_b ? report.growth_b->value : -inf;
  nlohmann::ordered_json j;
  j["g_a_nats"] = json_number(ga);
  j["g_b_nats"] = json_number(gb);
  j["g_a_bits"] = json_number(ga / kLn2);
  j["g_b_bits"] = json_number(gb / kLn2);
  j["delta_nats"] = json_number(report.delta_nats());
  j["delta_bits"] = json_number(report.delta_bits());
  j["n_periods"] = report.n_periods;
  j["ruin_a"] = !report.growth_a.ok();
  j["ruin_b"] = !report.growth_b.ok();
  j["interpretation"] = report.interpretation;
  return j;
}

ReturnsTable generate_synthetic(const SyntheticSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorKind::InvalidSpec, "synthetic data needs n >= 1 periods");
  std::mt19937_64 rng(seed);

  std::vector<std::vector<double>> rows;
  rows.reserve(n);
  std::size_t m = 0;
  bool zeros = false;
  if (const auto* race = std::get_if<HorseRaceSpec>(&spec)) {
    try {
      HorseRace validated(race->probs, race->returns);
    } catch (const Error& e) {
      throw Error(ErrorKind::InvalidSpec, std::string("horse race spec: ") + e.what());
    }
    m = race->returns.size();
    for (std::size_t t = 0; t < n; ++t) {
      std::vector<double> row(m, 0.0);
      const std::size_t winner = draw(race->probs, rng);
      row[winner] = race->returns[winner];
      rows.push_back(std::move(row));
    }
    zeros = m > 1;
  } else {
    const auto& scenarios = std::get<ScenarioSet>(spec);
    m = scenarios.assets();
    for (std::size_t t = 0; t < n; ++t) {
      rows.push_back(scenarios.returns(draw(scenarios.probs(), rng)));
      for (double r : rows.back()) zeros = zeros || r == 0.0;
    }
  }

  std::vector<std::string> dates, assets;
  for (std::size_t t = 0; t < n; ++t) dates.push_back(period_label(t + 1, n));
  for (std::size_t i = 0; i < m; ++i) assets.push_back("a" + std::to_string(i));
  ReturnMatrix matrix(transpose(rows), assets, dates, zeros);
  return ReturnsTable{std::move(dates), std::move(assets), std::move(matrix), zeros};
}

}  // namespace kellylab
