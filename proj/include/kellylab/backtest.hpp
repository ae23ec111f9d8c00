#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "kellylab/growth_opt.hpp"
#include "kellylab/info_measures.hpp"
#include "kellylab/outcome.hpp"
#include "json.hpp"

namespace kellylab {

// A malformed or invalid cell in a CSV input. row is the 1-based data row
// (header excluded), column the header label.
class CsvError : public Error {
 public:
  CsvError(ErrorKind kind, const std::string& message, std::size_t row, std::string column)
      : Error(kind, message), row_(row), column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

struct ReturnsTable {
  std::vector<std::string> dates;
  std::vector<std::string> assets;
  ReturnMatrix gross_returns;
  // Losing assets may carry a zero gross return.
  bool horse_race_mode = false;

  std::size_t periods() const noexcept { return dates.size(); }
};

struct LoadOptions {
  bool horse_race_mode = false;
};

// Header "date,<asset...>", one row per period, decimal gross returns with
// '.' separators. Periods must be unique and strictly increasing.
// Throws CsvError with ParseError, NonPositiveReturn, DuplicatePeriod or
// UnorderedPeriod.
ReturnsTable load_returns(std::istream& in, const LoadOptions& options = {});
ReturnsTable load_returns_file(const std::string& path, const LoadOptions& options = {});

// Header "prob,<asset...>", one scenario per row.
ScenarioSet load_scenarios(std::istream& in);
ScenarioSet load_scenarios_file(const std::string& path);

void write_returns_csv(std::ostream& out, const ReturnsTable& table);

struct ComparisonReport {
  std::size_t n_periods = 0;
  Outcome<Nats> growth_a;
  Outcome<Nats> growth_b;
  std::string interpretation;

  // g_B - g_A in nats: +inf / -inf when exactly one side is ruined, NaN when
  // both are.
  double delta_nats() const;
  double delta_bits() const { return delta_nats() / kLn2; }
};

// Realized growth ln(R_n)/n of each constant-rebalanced strategy.
ComparisonReport compare_strategies(const ReturnsTable& table, const SimplexVector& w_a,
                                    const SimplexVector& w_b);

// {"g_a_nats", "g_b_nats", "delta_nats", "delta_bits", "n_periods", "ruin_a",
//  "ruin_b", ...}. Infinities are rendered as the strings "inf" / "-inf".
nlohmann::ordered_json to_json(const ComparisonReport& report);

// Number for JSON output: finite values as numbers, infinities as "inf" or
// "-inf", NaN as null.
nlohmann::ordered_json json_number(double v);

struct HorseRaceSpec {
  SimplexVector probs;
  std::vector<double> returns;
};

using SyntheticSpec = std::variant<HorseRaceSpec, ScenarioSet>;

// n IID draws from the distribution, reproducible from seed. Horse-race draws pay the
// winner's return and 0 elsewhere. Throws InvalidSpec.
ReturnsTable generate_synthetic(const SyntheticSpec& spec, std::size_t n, std::uint64_t seed);

}  // namespace kellylab
