#include "ancvi/bellman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace ancvi {

std::string_view to_string(OperatorMode mode) {
  switch (mode) {
    case OperatorMode::Consistency: return "consistency";
    case OperatorMode::Optimality: return "optimality";
    case OperatorMode::AntiOptimality: return "anti-optimality";
    case OperatorMode::GsOptimality: return "gs-optimality";
    case OperatorMode::GsAntiOptimality: return "gs-anti-optimality";
  }
  return "unknown";
}

Operator::Operator(const Mdp& mdp, OperatorMode mode, ValueKind kind, std::optional<Policy> policy)
    : mdp_(&mdp), mode_(mode), kind_(kind), policy_(std::move(policy)) {
  if (mode_ == OperatorMode::Consistency) {
    if (!policy_) throw Error(ErrorCode::ConfigMismatch, "consistency operator needs a policy");
    require_valid(*policy_, mdp);
  } else if (policy_) {
    throw Error(ErrorCode::ConfigMismatch, "only the consistency operator takes a policy");
  }
}

Operator Operator::jacobi() const {
  switch (mode_) {
    case OperatorMode::GsOptimality: return Operator(*mdp_, OperatorMode::Optimality, kind_);
    case OperatorMode::GsAntiOptimality: return Operator(*mdp_, OperatorMode::AntiOptimality, kind_);
    default: return *this;
  }
}

Operator Operator::anti() const {
  switch (mode_) {
    case OperatorMode::Optimality: return Operator(*mdp_, OperatorMode::AntiOptimality, kind_);
    case OperatorMode::GsOptimality: return Operator(*mdp_, OperatorMode::GsAntiOptimality, kind_);
    default: throw Error(ErrorCode::ConfigMismatch, "anti-optimality counterpart only exists for optimality operators");
  }
}

ValueFn Operator::operator()(const ValueFn& u) const { return apply(*this, u); }

namespace {

void check_input(const Operator& op, const ValueFn& u) {
  if (u.kind != op.kind()) throw Error(ErrorCode::KindMismatch, "operator and value function differ in kind");
  if (u.size() != op.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "value function has length " + std::to_string(u.size()) +
                                                  ", operator expects " + std::to_string(op.dim()));
  }
}

double expected(std::span<const double> row, std::span<const double> v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) acc += row[i] * v[i];
  return acc;
}

double lookahead(const Mdp& mdp, std::size_t s, std::size_t a, std::span<const double> v) {
  return mdp.reward(s, a) + mdp.gamma() * expected(mdp.row(s, a), v);
}

// Extreme of a contiguous block; `maximize` selects max vs min.
double extreme(std::span<const double> xs, bool maximize) {
  double best = xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i) best = maximize ? std::max(best, xs[i]) : std::min(best, xs[i]);
  return best;
}

double extreme_lookahead(const Mdp& mdp, std::size_t s, std::span<const double> v, bool maximize) {
  double best = lookahead(mdp, s, 0, v);
  for (std::size_t a = 1; a < mdp.n_actions(); ++a) {
    const double q = lookahead(mdp, s, a, v);
    best = maximize ? std::max(best, q) : std::min(best, q);
  }
  return best;
}

std::vector<double> state_extremes(const Mdp& mdp, const std::vector<double>& q, bool maximize) {
  const std::size_t na = mdp.n_actions();
  std::vector<double> m(mdp.n_states());
  for (std::size_t s = 0; s < m.size(); ++s) m[s] = extreme({q.data() + s * na, na}, maximize);
  return m;
}

ValueFn apply_consistency(const Operator& op, const ValueFn& u) {
  const Mdp& mdp = op.mdp();
  const Policy& pi = *op.policy();
  const std::size_t n = mdp.n_states();
  const std::size_t na = mdp.n_actions();
  ValueFn out{u.kind, std::vector<double>(u.size(), 0.0)};
  if (u.kind == ValueKind::StateValue) {
    for (std::size_t s = 0; s < n; ++s) {
      double acc = 0.0;
      for (std::size_t a = 0; a < na; ++a) {
        const double p = pi.prob(s, a);
        if (p != 0.0) acc += p * lookahead(mdp, s, a, u.values);
      }
      out[s] = acc;
    }
  } else {
    std::vector<double> m(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t a = 0; a < na; ++a) m[s] += pi.prob(s, a) * u[s * na + a];
    }
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t a = 0; a < na; ++a) out[s * na + a] = lookahead(mdp, s, a, m);
    }
  }
  return out;
}

ValueFn apply_optimality(const Operator& op, const ValueFn& u, bool maximize) {
  const Mdp& mdp = op.mdp();
  const std::size_t n = mdp.n_states();
  const std::size_t na = mdp.n_actions();
  ValueFn out{u.kind, std::vector<double>(u.size(), 0.0)};
  if (u.kind == ValueKind::StateValue) {
    for (std::size_t s = 0; s < n; ++s) out[s] = extreme_lookahead(mdp, s, u.values, maximize);
  } else {
    const auto m = state_extremes(mdp, u.values, maximize);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t a = 0; a < na; ++a) out[s * na + a] = lookahead(mdp, s, a, m);
    }
  }
  return out;
}

ValueFn apply_gauss_seidel(const Operator& op, const ValueFn& u, bool maximize) {
  const Mdp& mdp = op.mdp();
  const std::size_t n = mdp.n_states();
  const std::size_t na = mdp.n_actions();
  ValueFn out = u;
  if (u.kind == ValueKind::StateValue) {
    for (std::size_t s = 0; s < n; ++s) out[s] = extreme_lookahead(mdp, s, out.values, maximize);
  } else {
    // m[s] tracks the per-state extreme of the partially updated Q.
    auto m = state_extremes(mdp, out.values, maximize);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t a = 0; a < na; ++a) {
        out[s * na + a] = lookahead(mdp, s, a, m);
        m[s] = extreme({out.values.data() + s * na, na}, maximize);
      }
    }
  }
  return out;
}

Policy extreme_policy(const Mdp& mdp, const ValueFn& u, bool maximize) {
  require_valid(u, mdp);
  const std::size_t n = mdp.n_states();
  const std::size_t na = mdp.n_actions();
  std::vector<std::size_t> actions(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    double best = 0.0;
    for (std::size_t a = 0; a < na; ++a) {
      const double q = u.kind == ValueKind::StateValue ? lookahead(mdp, s, a, u.values) : u[s * na + a];
      // Strict comparison keeps the smallest index on ties.
      if (a == 0 || (maximize ? q > best : q < best)) {
        best = q;
        actions[s] = a;
      }
    }
  }
  return Policy::deterministic(na, actions);
}

ValueFn solve_linear(const Operator& op) {
  const auto kernel = induced_kernel(op.mdp(), *op.policy(), op.kind());
  const auto dim = static_cast<Eigen::Index>(kernel.dim);
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::VectorXd b(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    b(i) = kernel.reward[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) -= op.gamma() * kernel.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  const Eigen::VectorXd x = a.partialPivLu().solve(b);
  return {op.kind(), std::vector<double>(x.data(), x.data() + dim)};
}

}  // namespace

ValueFn apply(const Operator& op, const ValueFn& u) {
  check_input(op, u);
  switch (op.mode()) {
    case OperatorMode::Consistency: return apply_consistency(op, u);
    case OperatorMode::Optimality: return apply_optimality(op, u, true);
    case OperatorMode::AntiOptimality: return apply_optimality(op, u, false);
    case OperatorMode::GsOptimality: return apply_gauss_seidel(op, u, true);
    case OperatorMode::GsAntiOptimality: return apply_gauss_seidel(op, u, false);
  }
  return u;
}

Policy greedy_policy(const Mdp& mdp, const ValueFn& u) { return extreme_policy(mdp, u, true); }

Policy anti_greedy_policy(const Mdp& mdp, const ValueFn& u) { return extreme_policy(mdp, u, false); }

double bellman_error(const Operator& op, const ValueFn& u) { return sup_norm_diff(apply(op, u), u); }

std::size_t default_max_iter(double gamma, double tol) {
  constexpr std::size_t cap = 1'000'000;
  if (gamma >= 1.0) return cap;
  const double steps = 10.0 * std::ceil(std::log(tol) / std::log(gamma));
  if (!(steps < static_cast<double>(cap))) return cap;
  return std::max<std::size_t>(1, static_cast<std::size_t>(steps));
}

ValueFn fixed_point(const Operator& op, const FixedPointOptions& options) {
  const double gamma = op.gamma();
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(ErrorCode::BadGamma, "gamma must lie in (0, 1]");
  if (!(options.tol > 0.0)) throw Error(ErrorCode::ConfigMismatch, "tol must be positive");
  const bool anti = op.mode() == OperatorMode::AntiOptimality || op.mode() == OperatorMode::GsAntiOptimality;
  if (gamma == 1.0 && anti) {
    throw Error(ErrorCode::BadGamma, "the anti-optimality fixed point is only defined for gamma < 1");
  }
  const std::size_t max_iter = options.max_iter.value_or(default_max_iter(gamma, options.tol));

  ValueFn u = options.start.value_or(ValueFn::zeros(op.kind(), op.dim()));
  check_input(op, u);

  if (gamma < 1.0 && op.mode() == OperatorMode::Consistency && !options.force_iterative &&
      op.dim() <= kDirectSolveLimit) {
    u = solve_linear(op);
  }

  ValueFn next = apply(op, u);
  if (gamma == 1.0) {
    const double slack = 1e-12 * (1.0 + sup_norm(u));
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (next[i] < u[i] - slack) {
        throw Error(ErrorCode::NotMonotoneStart, "at gamma = 1 the start must satisfy U <= T U");
      }
    }
  }
  for (std::size_t iter = 0;; ++iter) {
    const double residual = sup_norm_diff(next, u);
    if (residual <= options.tol) return u;
    if (iter >= max_iter) {
      throw Error(ErrorCode::NoConvergence, "residual " + std::to_string(residual) + " above tol after " +
                                                std::to_string(max_iter) + " iterations");
    }
    u = std::move(next);
    next = apply(op, u);
  }
}

}  // namespace ancvi
