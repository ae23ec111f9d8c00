#include "kellylab/growth_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

namespace kellylab {

// ---------------------------------------------------------------------------
// ScenarioSet / ReturnMatrix
// ---------------------------------------------------------------------------

ScenarioSet::ScenarioSet(SimplexVector probs, std::vector<std::vector<double>> rows)
    : probs_(std::move(probs)), rows_(std::move(rows)) {
  if (rows_.size() != probs_.size()) {
    std::ostringstream msg;
    msg << "scenario set has " << probs_.size() << " probabilities but " << rows_.size()
        << " rows";
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
  assets_ = rows_.front().size();
  if (assets_ == 0) throw Error(ErrorKind::InvalidArgument, "scenario rows need at least one asset");
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    const auto& row = rows_[k];
    if (row.size() != assets_) {
      std::ostringstream msg;
      msg << "scenario row " << k << " has " << row.size() << " returns, expected " << assets_;
      throw Error(ErrorKind::DimensionMismatch, msg.str());
    }
    bool any_positive = false;
    for (std::size_t i = 0; i < assets_; ++i) {
      if (!std::isfinite(row[i]) || row[i] < 0.0) {
        std::ostringstream msg;
        msg << "scenario row " << k << " asset " << i << ": return must be finite and >= 0, got "
            << row[i];
        throw Error(ErrorKind::NonPositiveReturn, msg.str());
      }
      any_positive = any_positive || row[i] > 0.0;
    }
    if (!any_positive) {
      std::ostringstream msg;
      msg << "scenario row " << k << " has no positive return; every portfolio is ruined there";
      throw Error(ErrorKind::NonPositiveReturn, msg.str());
    }
  }
}

ScenarioSet ScenarioSet::horse_race(const SimplexVector& probs, const std::vector<double>& returns) {
  if (probs.size() != returns.size()) {
    throw Error(ErrorKind::DimensionMismatch, "horse race probabilities and returns differ in size");
  }
  std::vector<std::vector<double>> rows(probs.size(), std::vector<double>(probs.size(), 0.0));
  for (std::size_t i = 0; i < probs.size(); ++i) rows[i][i] = returns[i];
  return ScenarioSet(probs, std::move(rows));
}

ReturnMatrix::ReturnMatrix(std::vector<std::vector<double>> values, bool allow_zero)
    : ReturnMatrix(std::move(values), {}, {}, allow_zero) {}

ReturnMatrix::ReturnMatrix(std::vector<std::vector<double>> values,
                           std::vector<std::string> asset_labels,
                           std::vector<std::string> period_labels, bool allow_zero)
    : assets_(values.size()),
      asset_labels_(std::move(asset_labels)),
      period_labels_(std::move(period_labels)),
      allow_zero_(allow_zero) {
  if (assets_ == 0) throw Error(ErrorKind::InvalidArgument, "return matrix needs at least one asset");
  periods_ = values.front().size();
  if (periods_ == 0) throw Error(ErrorKind::InvalidArgument, "return matrix needs at least one period");
  values_.reserve(assets_ * periods_);
  for (std::size_t i = 0; i < assets_; ++i) {
    if (values[i].size() != periods_) {
      throw Error(ErrorKind::DimensionMismatch, "return matrix rows differ in length");
    }
    for (std::size_t t = 0; t < periods_; ++t) {
      const double r = values[i][t];
      const bool ok = std::isfinite(r) && (allow_zero_ ? r >= 0.0 : r > 0.0);
      if (!ok) {
        std::ostringstream msg;
        msg << "asset " << i << " period " << t << ": gross return " << r
            << (allow_zero_ ? " must be >= 0" : " must be > 0");
        throw Error(ErrorKind::NonPositiveReturn, msg.str());
      }
      values_.push_back(r);
    }
  }
  if (asset_labels_.empty()) {
    for (std::size_t i = 0; i < assets_; ++i) asset_labels_.push_back("a" + std::to_string(i));
  }
  if (period_labels_.empty()) {
    for (std::size_t t = 0; t < periods_; ++t) period_labels_.push_back(std::to_string(t + 1));
  }
  if (asset_labels_.size() != assets_ || period_labels_.size() != periods_) {
    throw Error(ErrorKind::DimensionMismatch, "label count does not match the return matrix");
  }
}

ReturnMatrix ReturnMatrix::prefix(std::size_t n) const {
  if (n == 0 || n > periods_) throw Error(ErrorKind::InvalidArgument, "prefix length out of range");
  std::vector<std::vector<double>> values(assets_, std::vector<double>(n));
  for (std::size_t i = 0; i < assets_; ++i) {
    for (std::size_t t = 0; t < n; ++t) values[i][t] = (*this)(i, t);
  }
  return ReturnMatrix(std::move(values), asset_labels_,
                      std::vector<std::string>(period_labels_.begin(), period_labels_.begin() + n),
                      allow_zero_);
}

// ---------------------------------------------------------------------------
// Growth evaluation
// ---------------------------------------------------------------------------

namespace {

double dot(std::span<const double> w, const std::vector<double>& r) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += w[i] * r[i];
  return s;
}

void require_assets(const ScenarioSet& scenarios, std::size_t m) {
  if (scenarios.assets() != m) {
    std::ostringstream msg;
    msg << "weights have " << m << " entries, scenarios have " << scenarios.assets() << " assets";
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
}

// -inf on ruin.
double objective(const ScenarioSet& sc, std::span<const double> w) {
  double g = 0.0;
  for (std::size_t k = 0; k < sc.rows(); ++k) {
    const double p = sc.prob(k);
    if (p == 0.0) continue;
    const double v = dot(w, sc.returns(k));
    if (!(v > 0.0)) return -std::numeric_limits<double>::infinity();
    g += p * std::log(v);
  }
  return g;
}

std::vector<double> multipliers(const ScenarioSet& sc, std::span<const double> w) {
  std::vector<double> m(sc.assets(), 0.0);
  for (std::size_t k = 0; k < sc.rows(); ++k) {
    const double p = sc.prob(k);
    if (p == 0.0) continue;
    const auto& r = sc.returns(k);
    const double v = dot(w, r);
    if (!(v > 0.0)) {
      std::fill(m.begin(), m.end(), std::numeric_limits<double>::infinity());
      return m;
    }
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += p * r[i] / v;
  }
  return m;
}

double violation(std::span<const double> w, const std::vector<double>& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double v = w[i] > 0.0 ? std::abs(m[i] - 1.0) : std::max(0.0, m[i] - 1.0);
    if (std::isnan(v)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, v);
  }
  return worst;
}

void renormalize(std::vector<double>& w) {
  for (double& x : w) x = std::max(x, 0.0);
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= s;
}

}  // namespace

Outcome<Nats> expected_log_growth(const ScenarioSet& scenarios, const SimplexVector& w) {
  require_assets(scenarios, w.size());
  double g = 0.0;
  for (std::size_t k = 0; k < scenarios.rows(); ++k) {
    const double p = scenarios.prob(k);
    if (p == 0.0) continue;
    const double v = dot(w.weights(), scenarios.returns(k));
    if (!(v > 0.0)) {
      std::ostringstream msg;
      msg << "portfolio return is 0 in scenario row " << k << " (probability " << p << ")";
      return Outcome<Nats>::ruin(msg.str());
    }
    g += p * std::log(v);
  }
  return Nats{g};
}

OptimalityCertificate certify(const ScenarioSet& scenarios, const SimplexVector& w) {
  require_assets(scenarios, w.size());
  OptimalityCertificate cert;
  cert.multipliers = multipliers(scenarios, w.weights());
  cert.max_violation = violation(w.weights(), cert.multipliers);
  return cert;
}

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

namespace {

constexpr double kProportionalTolerance = 1e-12;

// If every positive-probability row is a nonnegative multiple of one base
// row, return that base row.
std::optional<std::vector<double>> common_direction(const ScenarioSet& sc) {
  std::optional<std::vector<double>> base;
  for (std::size_t k = 0; k < sc.rows(); ++k) {
    if (sc.prob(k) == 0.0) continue;
    const auto& row = sc.returns(k);
    if (!base) {
      base = row;
      continue;
    }
    double bb = 0.0, rb = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
      bb += (*base)[i] * (*base)[i];
      rb += row[i] * (*base)[i];
      scale = std::max(scale, row[i]);
    }
    const double c = rb / bb;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (std::abs(row[i] - c * (*base)[i]) > kProportionalTolerance * scale) return std::nullopt;
    }
  }
  return base;
}

class Solver {
 public:
  Solver(const ScenarioSet& sc, const SolverOptions& opt) : sc_(sc), opt_(opt), m_(sc.assets()) {}

  OptimalPortfolio run() {
    if (auto base = common_direction(sc_)) return degenerate(*base);

    w_ = start_point();
    refresh();
    multiplicative_phase();
    newton_phase();

    w_ = best_w_;
    refresh();
    OptimalPortfolio out{SimplexVector(w_), {}, Nats{objective(sc_, w_)}};
    out.certificate = OptimalityCertificate{mult_, viol_};
    out.converged = out.certificate.max_violation <= opt_.tolerance;
    out.iterations = iterations_;
    return out;
  }

 private:
  OptimalPortfolio degenerate(const std::vector<double>& base) {
    // Objective is a constant plus ln(W . base): all weight on the largest
    // entries of the base row, split evenly among exact ties.
    const double best = *std::max_element(base.begin(), base.end());
    std::vector<double> w(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) w[i] = base[i] == best ? 1.0 : 0.0;
    renormalize(w);
    SimplexVector weights(w);
    OptimalPortfolio out{weights, certify(sc_, weights), expected_log_growth(sc_, weights).value()};
    out.degenerate = true;
    out.converged = true;
    return out;
  }

  std::vector<double> start_point() const {
    if (!opt_.initial) return SimplexVector::uniform(m_).vector();
    if (opt_.initial->size() != m_) {
      throw Error(ErrorKind::DimensionMismatch, "initial point does not match the asset count");
    }
    std::vector<double> w = opt_.initial->vector();
    if (std::any_of(w.begin(), w.end(), [](double x) { return x <= 0.0; })) {
      for (double& x : w) x = 0.999 * x + 0.001 / static_cast<double>(m_);
    }
    return w;
  }

  void refresh() {
    mult_ = multipliers(sc_, w_);
    viol_ = violation(w_, mult_);
    if (viol_ < best_viol_) {
      stall_ = viol_ < 0.5 * best_viol_ ? 0 : stall_ + 1;
      best_viol_ = viol_;
      best_w_ = w_;
    } else {
      ++stall_;
    }
  }

  // Once within tolerance, keep polishing toward a tighter certificate until
  // progress stalls.
  bool done() const {
    if (iterations_ >= opt_.max_iterations) return true;
    if (best_viol_ <= kPolishFactor * opt_.tolerance) return true;
    return best_viol_ <= opt_.tolerance && stall_ >= kMaxStall;
  }

  // w_i <- w_i E[r_i / (W . r)]; fixed points are exactly the Bell-Cover
  // conditions on the support.
  void multiplicative_phase() {
    for (std::size_t k = 0; k < opt_.multiplicative_iterations && !done(); ++k) {
      for (std::size_t i = 0; i < m_; ++i) w_[i] *= mult_[i];
      renormalize(w_);
      ++iterations_;
      refresh();
    }
  }

  // Active-set Newton on the support with a Frank-Wolfe / away-step fallback.
  void newton_phase() {
    constexpr double kDropBelow = 1e-10;
    for (double& x : w_) {
      if (x < kDropBelow) x = 0.0;
    }
    renormalize(w_);
    refresh();
    stall_ = 0;

    std::vector<bool> active(m_);
    for (std::size_t i = 0; i < m_; ++i) active[i] = w_[i] > 0.0;

    while (!done()) {
      ++iterations_;
      // Release the most violated inactive asset once the support is settled.
      double support_viol = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (active[i]) support_viol = std::max(support_viol, std::abs(mult_[i] - 1.0));
      }
      if (support_viol <= opt_.tolerance) {
        std::size_t j = m_;
        for (std::size_t i = 0; i < m_; ++i) {
          if (!active[i] && mult_[i] > 1.0 + opt_.tolerance && (j == m_ || mult_[i] > mult_[j])) j = i;
        }
        if (j < m_) active[j] = true;
      }
      if (!newton_step(active)) frank_wolfe_step(active);
      for (std::size_t i = 0; i < m_; ++i) active[i] = active[i] && (w_[i] > 0.0 || mult_[i] > 1.0);
      refresh();
    }
  }

  bool newton_step(std::vector<bool>& active) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < m_; ++i) {
      if (active[i]) idx.push_back(i);
    }
    const auto s = static_cast<Eigen::Index>(idx.size());
    if (s < 2) return false;

    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(s, s);
    Eigen::VectorXd grad(s);
    for (Eigen::Index a = 0; a < s; ++a) grad(a) = mult_[idx[a]];
    for (std::size_t k = 0; k < sc_.rows(); ++k) {
      const double p = sc_.prob(k);
      if (p == 0.0) continue;
      const auto& r = sc_.returns(k);
      const double v = dot(w_, r);
      const double c = p / (v * v);
      for (Eigen::Index a = 0; a < s; ++a) {
        for (Eigen::Index b = 0; b <= a; ++b) hess(a, b) -= c * r[idx[a]] * r[idx[b]];
      }
    }
    hess.triangularView<Eigen::StrictlyUpper>() = hess.transpose();
    const double ridge = 1e-12 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
    hess.diagonal().array() -= ridge;

    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(s + 1, s + 1);
    kkt.topLeftCorner(s, s) = hess;
    kkt.block(0, s, s, 1).setOnes();
    kkt.block(s, 0, 1, s).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
    rhs.head(s) = -grad;
    const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
    if (!sol.allFinite()) return false;

    std::vector<double> dir(m_, 0.0);
    for (Eigen::Index a = 0; a < s; ++a) dir[idx[a]] = sol(a);
    double slope = 0.0;
    for (std::size_t i = 0; i < m_; ++i) slope += mult_[i] * dir[i];
    if (!(slope > 0.0)) return false;

    double alpha_max = 1.0;
    std::size_t blocking = m_;
    for (std::size_t i = 0; i < m_; ++i) {
      if (dir[i] < 0.0 && -w_[i] / dir[i] < alpha_max) {
        alpha_max = -w_[i] / dir[i];
        blocking = i;
      }
    }
    if (alpha_max <= 0.0) return false;

    const double alpha = line_search(dir, slope, alpha_max);
    if (alpha == 0.0) return false;
    for (std::size_t i = 0; i < m_; ++i) w_[i] += alpha * dir[i];
    if (alpha == alpha_max && blocking < m_) {
      w_[blocking] = 0.0;
      active[blocking] = false;
    }
    renormalize(w_);
    return true;
  }

  void frank_wolfe_step(std::vector<bool>& active) {
    // Toward the vertex with the largest multiplier, or away from the
    // support asset with the smallest one, whichever has the steeper slope.
    std::size_t up = 0, down = m_;
    for (std::size_t i = 0; i < m_; ++i) {
      if (mult_[i] > mult_[up]) up = i;
      if (w_[i] > 0.0 && (down == m_ || mult_[i] < mult_[down])) down = i;
    }
    const double up_slope = mult_[up] - 1.0;
    const double down_slope = down < m_ ? 1.0 - mult_[down] : 0.0;

    std::vector<double> dir(m_);
    double alpha_max = 1.0, slope = 0.0;
    std::size_t drop = m_;
    if (up_slope >= down_slope) {
      for (std::size_t i = 0; i < m_; ++i) dir[i] = (i == up ? 1.0 : 0.0) - w_[i];
      slope = up_slope;
    } else {
      for (std::size_t i = 0; i < m_; ++i) dir[i] = w_[i] - (i == down ? 1.0 : 0.0);
      slope = down_slope;
      alpha_max = w_[down] < 1.0 ? w_[down] / (1.0 - w_[down]) : 0.0;
      drop = down;
    }
    if (!(slope > 0.0) || alpha_max <= 0.0) {
      iterations_ = opt_.max_iterations;  // no ascent direction left
      return;
    }
    const double alpha = line_search(dir, slope, alpha_max);
    if (alpha == 0.0) {
      iterations_ = opt_.max_iterations;
      return;
    }
    for (std::size_t i = 0; i < m_; ++i) w_[i] += alpha * dir[i];
    if (drop < m_ && alpha == alpha_max) {
      w_[drop] = 0.0;
      active[drop] = false;
    }
    if (up_slope >= down_slope) active[up] = true;
    renormalize(w_);
  }

  // Backtracking Armijo search, with slack for round-off near the optimum.
  double line_search(const std::vector<double>& dir, double slope, double alpha_max) const {
    const double f0 = objective(sc_, w_);
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() * (std::abs(f0) + 1.0);
    std::vector<double> trial(m_);
    for (double alpha = alpha_max; alpha > 1e-20; alpha *= 0.5) {
      for (std::size_t i = 0; i < m_; ++i) trial[i] = std::max(0.0, w_[i] + alpha * dir[i]);
      const double f1 = objective(sc_, trial);
      if (std::isfinite(f1) && f1 >= f0 + 1e-4 * alpha * slope - slack) return alpha;
    }
    return 0.0;
  }

  const ScenarioSet& sc_;
  const SolverOptions& opt_;
  std::size_t m_;
  std::vector<double> w_;
  std::vector<double> mult_;
  double viol_ = std::numeric_limits<double>::infinity();
  std::vector<double> best_w_;
  double best_viol_ = std::numeric_limits<double>::infinity();
  std::size_t stall_ = 0;
  std::size_t iterations_ = 0;

  static constexpr double kPolishFactor = 1e-2;
  static constexpr std::size_t kMaxStall = 20;
};

}  // namespace

OptimalPortfolio log_optimal_portfolio(const ScenarioSet& scenarios, const SolverOptions& options) {
  return Solver(scenarios, options).run();
}

// ---------------------------------------------------------------------------
// Constant-rebalanced wealth
// ---------------------------------------------------------------------------

Outcome<WealthPath> wealth_path(const ReturnMatrix& matrix, const SimplexVector& w) {
  if (matrix.assets() != w.size()) {
    std::ostringstream msg;
    msg << "weights have " << w.size() << " entries, matrix has " << matrix.assets() << " assets";
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
  WealthPath path;
  path.period_returns.reserve(matrix.periods());
  for (std::size_t t = 0; t < matrix.periods(); ++t) {
    double v = 0.0;
    for (std::size_t i = 0; i < matrix.assets(); ++i) v += w[i] * matrix(i, t);
    if (!(v > 0.0)) {
      std::ostringstream msg;
      msg << "portfolio return is " << v << " in period " << matrix.period_labels()[t];
      return Outcome<WealthPath>::ruin(msg.str());
    }
    path.period_returns.push_back(v);
    path.cumulative *= v;
    path.log_wealth += std::log(v);
  }
  path.growth = Nats{path.log_wealth / static_cast<double>(matrix.periods())};
  return path;
}

}  // namespace kellylab
