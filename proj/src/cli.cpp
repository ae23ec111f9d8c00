#include "kellylab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kellylab/backtest.hpp"
#include "kellylab/growth_opt.hpp"
#include "kellylab/info_measures.hpp"
#include "kellylab/kelly_core.hpp"
#include "kellylab/type_class.hpp"
#include "kellylab/winner_fraction.hpp"

namespace kellylab::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kBudgetEnv = "KELLYLAB_BUDGET";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    std::string field = text.substr(start, comma - start);
    field.erase(0, field.find_first_not_of(" \t"));
    field.erase(field.find_last_not_of(" \t") + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
      throw UsageError(flag + ": '" + field + "' is not a finite decimal");
    }
    values.push_back(v);
    start = comma + 1;
  }
  return values;
}

SimplexVector parse_simplex(const std::string& text, const std::string& flag) {
  try {
    return SimplexVector(parse_list(text, flag));
  } catch (const Error& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

std::vector<std::size_t> parse_periods(const std::string& text) {
  std::vector<std::size_t> out;
  for (double v : parse_list(text, "--periods")) {
    if (v < 1.0 || v != std::floor(v)) throw UsageError("--periods: entries must be positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

Json vec(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

Json counts_json(const std::vector<std::size_t>& counts) {
  Json a = Json::array();
  for (auto c : counts) a.push_back(c);
  return a;
}

// "<name>_nats" and "<name>_bits" for every reported quantity.
void put(Json& j, const std::string& name, double nats) {
  j[name + "_nats"] = json_number(nats);
  j[name + "_bits"] = json_number(nats / kLn2);
}

std::string cell(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return Json(v).dump();
}

struct Options {
  std::string format = "json";
  std::optional<std::uint64_t> budget;

  std::uint64_t resolved_budget() const {
    if (budget) return *budget;
    if (const char* env = std::getenv(kBudgetEnv)) {
      std::uint64_t v = 0;
      const std::string s(env);
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw UsageError(std::string(kBudgetEnv) + " must be a nonnegative integer, got '" + s + "'");
      }
      return v;
    }
    return kDefaultEnumerationBudget;
  }
};

void emit_json(std::ostream& out, const Options& opt, const Json& j) {
  if (opt.format == "text") {
    for (const auto& [key, value] : j.items()) {
      out << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
    }
    return;
  }
  out << j.dump(2) << '\n';
}

void emit_table(std::ostream& out, const Options& opt, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows, const Json& j) {
  if (opt.format != "csv") {
    emit_json(out, opt, j);
    return;
  }
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << '\n';
  }
}

ReturnMatrix restrict(const ReturnMatrix& matrix, std::optional<std::size_t> assets,
                      std::optional<std::size_t> periods) {
  if (assets && *assets != matrix.assets()) {
    throw UsageError("--assets " + std::to_string(*assets) + " does not match the matrix (" +
                     std::to_string(matrix.assets()) + " assets)");
  }
  if (periods) {
    if (*periods == 0 || *periods > matrix.periods()) {
      throw UsageError("--periods must lie in [1, " + std::to_string(matrix.periods()) + "]");
    }
    return matrix.prefix(*periods);
  }
  return matrix;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct KellyArgs {
  double p = 0.0, r = 0.0;
  std::optional<double> f;
};

void kelly_command(const KellyArgs& a, const Options& opt, std::ostream& out) {
  const BinaryGame game = [&] {
    try {
      return BinaryGame(a.p, a.r);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }();
  const KellyFraction f = kelly_fraction(game);
  Json j;
  j["f_star"] = f.fraction;
  j["no_edge"] = f.no_edge;
  put(j, "g_star", kelly_growth(game, f.fraction)->value);
  put(j, "kl_fair", kelly_growth_at_optimum_fair_odds(game).value);
  if (a.f) {
    if (!(*a.f >= 0.0 && *a.f <= 1.0)) throw UsageError("--f must lie in [0, 1]");
    const auto g = kelly_growth(game, *a.f);
    j["f"] = *a.f;
    j["ruin"] = !g.ok();
    put(j, "g_f", g ? g->value : -INFINITY);
  }
  emit_json(out, opt, j);
}

struct HorseArgs {
  std::string probs, returns, weights;
};

void horse_race_command(const HorseArgs& a, const Options& opt, std::ostream& out) {
  const SimplexVector p = parse_simplex(a.probs, "--probs");
  const HorseRace race = [&] {
    try {
      return HorseRace(p, parse_list(a.returns, "--returns"));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }();
  const SimplexVector w_star = horse_race_optimal(race);
  const SimplexVector w = a.weights.empty() ? w_star : parse_simplex(a.weights, "--weights");
  if (w.size() != race.size()) throw UsageError("--weights must have one entry per horse");

  Json j;
  j["w_star"] = vec(w_star.weights());
  j["weights"] = vec(w.weights());
  const auto g = horse_race_growth(race, w);
  j["ruin"] = !g.ok();
  put(j, "total", g ? g->total.value : -INFINITY);
  put(j, "money", [&] {
    double money = 0.0;
    for (std::size_t i = 0; i < race.size(); ++i) {
      if (p[i] > 0.0) money += p[i] * std::log(race.returns()[i]);
    }
    return money;
  }());
  put(j, "entropy", entropy(p).value);
  put(j, "divergence", g ? g->divergence_term.value : INFINITY);
  j["fair_odds"] = has_fair_odds(race);
  if (has_fair_odds(race)) {
    const auto fair = fair_odds_growth(race, w);
    double market = 0.0;
    for (std::size_t i = 0; i < race.size(); ++i) {
      if (p[i] > 0.0) market += p[i] * std::log(p[i] * race.returns()[i]);
    }
    put(j, "market_divergence", fair ? fair->market_divergence.value : market);
    put(j, "allocation_divergence", fair ? fair->allocation_divergence.value : INFINITY);
  }
  emit_json(out, opt, j);
}

void optimize_command(const std::string& path, const Options& opt, std::ostream& out) {
  const ScenarioSet scenarios = load_scenarios_file(path);
  const OptimalPortfolio best = log_optimal_portfolio(scenarios);
  Json j;
  j["w_star"] = vec(best.weights.weights());
  put(j, "g_star", best.growth.value);
  j["multipliers"] = vec(best.certificate.multipliers);
  j["max_violation"] = json_number(best.certificate.max_violation);
  j["degenerate"] = best.degenerate;
  j["converged"] = best.converged;
  j["iterations"] = best.iterations;
  emit_json(out, opt, j);
}

struct MatrixArgs {
  std::string matrix, weights, periods, reference;
  std::optional<std::size_t> assets;
  bool horse_race = false;
};

ReturnMatrix load_matrix(const MatrixArgs& a) {
  return load_returns_file(a.matrix, LoadOptions{a.horse_race}).gross_returns;
}

void expand_command(const MatrixArgs& a, const Options& opt, std::ostream& out) {
  std::optional<std::size_t> periods;
  if (!a.periods.empty()) {
    const auto list = parse_periods(a.periods);
    if (list.size() != 1) throw UsageError("expand takes a single --periods value");
    periods = list.front();
  }
  const ReturnMatrix matrix = restrict(load_matrix(a), a.assets, periods);
  const SimplexVector w = parse_simplex(a.weights, "--weights");
  const IdentityCheck check = expand_identity_check(matrix, w, opt.resolved_budget());
  Json j;
  j["assets"] = matrix.assets();
  j["periods"] = matrix.periods();
  j["terms"] = check.terms;
  j["lhs"] = json_number(check.lhs);
  j["rhs"] = json_number(check.rhs);
  j["rel_err"] = json_number(check.rel_err);
  put(j, "log_wealth", std::log(check.lhs));
  emit_json(out, opt, j);
}

struct ConcentrationArgs {
  std::string weights;
  std::size_t periods = 0;
};

void concentration_command(const ConcentrationArgs& a, const Options& opt, std::ostream& out) {
  const SimplexVector w = parse_simplex(a.weights, "--weights");
  const auto rows = mass_concentration_check(w, a.periods, opt.resolved_budget());

  std::vector<std::string> header;
  for (std::size_t i = 0; i < w.size(); ++i) header.push_back("count_" + std::to_string(i));
  for (const char* c : {"exact_log_mass", "minus_n_kl", "lower_bound", "gap"}) header.emplace_back(c);

  Json j;
  j["periods"] = a.periods;
  j["weights"] = vec(w.weights());
  Json classes = Json::array();
  std::vector<std::vector<std::string>> table;
  bool all = true;
  for (const auto& r : rows) {
    all = all && r.within_bounds;
    Json c;
    c["counts"] = counts_json(r.counts);
    c["exact_log_mass"] = json_number(r.exact_log_mass);
    c["minus_n_kl"] = json_number(r.minus_n_kl);
    c["lower_bound"] = json_number(r.lower_bound);
    put(c, "gap", r.gap);
    c["within_bounds"] = r.within_bounds;
    classes.push_back(std::move(c));

    std::vector<std::string> line;
    for (auto n : r.counts) line.push_back(std::to_string(n));
    for (double v : {r.exact_log_mass, r.minus_n_kl, r.lower_bound, r.gap}) line.push_back(cell(v));
    table.push_back(std::move(line));
  }
  j["all_within_bounds"] = all;
  j["classes"] = std::move(classes);
  emit_table(out, opt, header, table, j);
}

void dominant_command(const MatrixArgs& a, const Options& opt, std::ostream& out) {
  const ReturnMatrix full = restrict(load_matrix(a), a.assets, std::nullopt);
  const SimplexVector w = parse_simplex(a.weights, "--weights");
  std::optional<SimplexVector> reference;
  if (!a.reference.empty()) reference = parse_simplex(a.reference, "--reference");
  const std::vector<std::size_t> lengths =
      a.periods.empty() ? std::vector<std::size_t>{full.periods()} : parse_periods(a.periods);

  std::vector<std::string> header{"periods"};
  for (std::size_t i = 0; i < w.size(); ++i) header.push_back("count_" + std::to_string(i));
  for (const char* c : {"approx_log_wealth", "exact_log_wealth", "per_period_gap"}) header.emplace_back(c);

  Json j;
  j["weights"] = vec(w.weights());
  Json rows = Json::array();
  std::vector<std::vector<std::string>> table;
  for (std::size_t n : lengths) {
    Json r;
    r["periods"] = n;
    std::vector<std::string> line{std::to_string(n)};
    const ReturnMatrix matrix = restrict(full, std::nullopt, n);
    try {
      const auto g = dominant_class_growth(matrix, w, opt.resolved_budget(), reference);
      if (g) {
        r["counts"] = counts_json(g->counts);
        r["approx_log_wealth"] = json_number(g->approx_log_wealth);
        r["exact_log_wealth"] = json_number(g->exact_log_wealth);
        put(r, "per_period_gap", g->per_period_gap);
        for (auto c : g->counts) line.push_back(std::to_string(c));
        for (double v : {g->approx_log_wealth, g->exact_log_wealth, g->per_period_gap}) line.push_back(cell(v));
      } else {
        r["unbounded"] = to_string(g.unbounded().kind);
        r["message"] = g.unbounded().detail;
        line.resize(header.size(), "");
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotAType) throw;
      r["not_a_type"] = true;
      r["message"] = e.what();
      line.resize(header.size(), "");
    }
    rows.push_back(std::move(r));
    table.push_back(std::move(line));
  }
  j["rows"] = std::move(rows);
  emit_table(out, opt, header, table, j);
}

void winner_command(const std::string& path, const Options& opt, std::ostream& out) {
  const ScenarioSet scenarios = load_scenarios_file(path);
  const WinnerFractionResult r = entropy_bound_check(scenarios);
  const bool degenerate = r.status == BoundStatus::SatisfiedDegenerate;
  Json j;
  j["w_prime"] = vec(r.w_prime.weights());
  j["w_star"] = vec(r.w_star.weights());
  j["g_star_nats"] = json_number(r.optimal_growth.value);
  j["g_prime_nats"] = json_number(degenerate ? -INFINITY : r.heuristic_growth.value);
  j["gap_bits"] = json_number(degenerate ? INFINITY : r.gap.to_bits().value);
  j["entropy_bound_bits"] = json_number(r.entropy_bound.to_bits().value);
  j["g_star_bits"] = json_number(r.optimal_growth.to_bits().value);
  j["g_prime_bits"] = json_number(degenerate ? -INFINITY : r.heuristic_growth.to_bits().value);
  j["gap_nats"] = json_number(degenerate ? INFINITY : r.gap.value);
  j["entropy_bound_nats"] = json_number(r.entropy_bound.value);
  j["status"] = to_string(r.status);
  if (!r.warning.empty()) j["warning"] = r.warning;
  emit_json(out, opt, j);
}

struct CompareArgs {
  std::string returns, wa, wb;
  bool horse_race = false;
};

void compare_command(const CompareArgs& a, const Options& opt, std::ostream& out) {
  const ReturnsTable table = load_returns_file(a.returns, LoadOptions{a.horse_race});
  const SimplexVector wa = parse_simplex(a.wa, "--wa");
  const SimplexVector wb = parse_simplex(a.wb, "--wb");
  if (wa.size() != table.assets.size() || wb.size() != table.assets.size()) {
    throw UsageError("--wa/--wb must have one entry per asset column");
  }
  emit_json(out, opt, to_json(compare_strategies(table, wa, wb)));
}

struct SynthArgs {
  std::string probs, returns, scenarios, out_path;
  std::size_t periods = 0;
  std::uint64_t seed = 0;
};

void synth_command(const SynthArgs& a, const Options& opt, std::ostream& out) {
  if (a.scenarios.empty() == (a.probs.empty() || a.returns.empty())) {
    throw UsageError("synth needs either --probs with --returns, or --scenarios");
  }
  const SyntheticSpec spec = a.scenarios.empty()
                                 ? SyntheticSpec(HorseRaceSpec{parse_simplex(a.probs, "--probs"),
                                                               parse_list(a.returns, "--returns")})
                                 : SyntheticSpec(load_scenarios_file(a.scenarios));
  const ReturnsTable table = generate_synthetic(spec, a.periods, a.seed);
  if (a.out_path.empty()) {
    write_returns_csv(out, table);
    return;
  }
  std::ofstream file(a.out_path);
  if (!file) throw UsageError("cannot write " + a.out_path);
  write_returns_csv(file, table);
  Json j;
  j["path"] = a.out_path;
  j["n_periods"] = table.periods();
  j["assets"] = table.assets.size();
  j["seed"] = a.seed;
  j["horse_race_mode"] = table.horse_race_mode;
  emit_json(out, opt, j);
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidSimplex:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::ParseError:
      return kExitUsage;
    default:
      return kExitDomainError;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kelly criterion and log-optimal portfolio toolkit", "kellylab"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--format", opt.format, "Report format")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--budget", opt.budget, "Enumeration budget (overrides " + std::string(kBudgetEnv) + ")");

  std::function<void()> action;

  KellyArgs kelly;
  auto* k = app.add_subcommand("kelly", "Classic binary Kelly wager");
  k->add_option("--p", kelly.p, "Win probability")->required();
  k->add_option("--r", kelly.r, "Gross return on a win (odds + 1)")->required();
  k->add_option("--f", kelly.f, "Also evaluate growth at this wager fraction");
  k->callback([&] { action = [&] { kelly_command(kelly, opt, out); }; });

  HorseArgs horse;
  auto* h = app.add_subcommand("horse-race", "Horse-race allocation and growth decomposition");
  h->add_option("--probs", horse.probs, "True win probabilities, comma separated")->required();
  h->add_option("--returns", horse.returns, "Gross return per horse, comma separated")->required();
  h->add_option("--weights", horse.weights, "Allocation to evaluate (default: proportional)");
  h->callback([&] { action = [&] { horse_race_command(horse, opt, out); }; });

  std::string optimize_path;
  auto* o = app.add_subcommand("optimize", "Log-optimal portfolio over a scenario CSV");
  o->add_option("--scenarios", optimize_path, "CSV with header prob,<asset...>")->required();
  o->callback([&] { action = [&] { optimize_command(optimize_path, opt, out); }; });

  MatrixArgs expand;
  auto* e = app.add_subcommand("expand", "Check the sum-of-products expansion of CRP wealth");
  e->add_option("--matrix", expand.matrix, "Returns CSV with header date,<asset...>")->required();
  e->add_option("--weights", expand.weights, "Portfolio weights")->required();
  e->add_option("--assets", expand.assets, "Expected asset count");
  e->add_option("--periods", expand.periods, "Use the first n periods");
  e->add_flag("--horse-race", expand.horse_race, "Accept zero gross returns");
  e->callback([&] { action = [&] { expand_command(expand, opt, out); }; });

  ConcentrationArgs conc;
  auto* c = app.add_subcommand("concentration", "Type-class mass against exp(-n KL)");
  c->add_option("--weights", conc.weights, "Portfolio weights")->required();
  c->add_option("--periods", conc.periods, "Sequence length n")->required()->check(CLI::PositiveNumber);
  c->callback([&] { action = [&] { concentration_command(conc, opt, out); }; });

  MatrixArgs dom;
  auto* d = app.add_subcommand("dominant", "Dominant type-class reduction of CRP wealth");
  d->add_option("--matrix", dom.matrix, "Returns CSV with header date,<asset...>")->required();
  d->add_option("--weights", dom.weights, "Portfolio weights")->required();
  d->add_option("--periods", dom.periods, "Comma-separated prefix lengths (default: all periods)");
  d->add_option("--reference", dom.reference, "Keep this class instead of the weights' own");
  d->add_option("--assets", dom.assets, "Expected asset count");
  d->add_flag("--horse-race", dom.horse_race, "Accept zero gross returns");
  d->callback([&] { action = [&] { dominant_command(dom, opt, out); }; });

  std::string winner_path;
  auto* w = app.add_subcommand("winner-fraction", "Winner-fraction heuristic and its entropy bound");
  w->add_option("--scenarios", winner_path, "CSV with header prob,<asset...>")->required();
  w->callback([&] { action = [&] { winner_command(winner_path, opt, out); }; });

  CompareArgs cmp;
  auto* cm = app.add_subcommand("compare", "A/B growth difference of two constant-rebalanced strategies");
  cm->add_option("--returns", cmp.returns, "Returns CSV with header date,<asset...>")->required();
  cm->add_option("--wa", cmp.wa, "Strategy A weights")->required();
  cm->add_option("--wb", cmp.wb, "Strategy B weights")->required();
  cm->add_flag("--horse-race", cmp.horse_race, "Accept zero gross returns");
  cm->callback([&] { action = [&] { compare_command(cmp, opt, out); }; });

  SynthArgs syn;
  auto* s = app.add_subcommand("synth", "Generate IID synthetic returns as CSV");
  s->add_option("--probs", syn.probs, "Horse-race win probabilities");
  s->add_option("--returns", syn.returns, "Horse-race gross returns");
  s->add_option("--scenarios", syn.scenarios, "Scenario CSV to sample rows from");
  s->add_option("--periods", syn.periods, "Number of periods")->required()->check(CLI::PositiveNumber);
  s->add_option("--seed", syn.seed, "RNG seed")->required();
  s->add_option("--out", syn.out_path, "Write the CSV here instead of stdout");
  s->callback([&] { action = [&] { synth_command(syn, opt, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "kellylab: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    action();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "kellylab: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "kellylab: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
}

}  // namespace kellylab::cli
