#pragma once

#include <cstddef>
#include <optional>

#include "ancvi/mdp.hpp"

namespace ancvi {

enum class OperatorMode {
  Consistency,       // T^pi
  Optimality,        // T*
  AntiOptimality,    // T-hat*, max replaced by min
  GsOptimality,      // T*_GS = T*_n ... T*_1
  GsAntiOptimality,  // T-hat*_GS
};

std::string_view to_string(OperatorMode mode);

/**
 * A Bellman-type operator bound to an MDP and a value kind.
 *
 * Holds a non-owning reference to the MDP; the MDP must outlive the operator.
 * Consistency operators own a copy of their policy.
 */
class Operator {
 public:
  Operator(const Mdp& mdp, OperatorMode mode, ValueKind kind, std::optional<Policy> policy = std::nullopt);

  static Operator consistency(const Mdp& mdp, Policy policy, ValueKind kind = ValueKind::StateValue) {
    return Operator(mdp, OperatorMode::Consistency, kind, std::move(policy));
  }
  static Operator optimality(const Mdp& mdp, ValueKind kind = ValueKind::StateValue) {
    return Operator(mdp, OperatorMode::Optimality, kind);
  }
  static Operator anti_optimality(const Mdp& mdp, ValueKind kind = ValueKind::StateValue) {
    return Operator(mdp, OperatorMode::AntiOptimality, kind);
  }
  static Operator gs_optimality(const Mdp& mdp, ValueKind kind = ValueKind::StateValue) {
    return Operator(mdp, OperatorMode::GsOptimality, kind);
  }
  static Operator gs_anti_optimality(const Mdp& mdp, ValueKind kind = ValueKind::StateValue) {
    return Operator(mdp, OperatorMode::GsAntiOptimality, kind);
  }

  [[nodiscard]] const Mdp& mdp() const noexcept { return *mdp_; }
  [[nodiscard]] OperatorMode mode() const noexcept { return mode_; }
  [[nodiscard]] ValueKind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::optional<Policy>& policy() const noexcept { return policy_; }
  [[nodiscard]] std::size_t dim() const noexcept { return mdp_->dim(kind_); }
  [[nodiscard]] double gamma() const noexcept { return mdp_->gamma(); }
  [[nodiscard]] bool is_gauss_seidel() const noexcept {
    return mode_ == OperatorMode::GsOptimality || mode_ == OperatorMode::GsAntiOptimality;
  }

  /// Same mode family without the Gauss-Seidel sweep (T*_GS -> T*).
  [[nodiscard]] Operator jacobi() const;
  /// The anti-optimality counterpart of an optimality-type operator.
  [[nodiscard]] Operator anti() const;

  ValueFn operator()(const ValueFn& u) const;

 private:
  const Mdp* mdp_;
  OperatorMode mode_;
  ValueKind kind_;
  std::optional<Policy> policy_;
};

/// Evaluates op at u. GS modes perform one in-place sweep in ascending
/// coordinate order (states for V, lexicographic (s, a) for Q).
ValueFn apply(const Operator& op, const ValueFn& u);

/// Deterministic argmax policy (smallest action index on ties).
/// Satisfies T^pi u = T* u.
Policy greedy_policy(const Mdp& mdp, const ValueFn& u);

/// Deterministic argmin policy. Satisfies T^pi u = T-hat* u.
Policy anti_greedy_policy(const Mdp& mdp, const ValueFn& u);

/// ||op(u) - u||_inf
double bellman_error(const Operator& op, const ValueFn& u);

struct FixedPointOptions {
  double tol = 1e-12;
  /// Defaults to default_max_iter(gamma, tol).
  std::optional<std::size_t> max_iter;
  /// Start of the iteration; zero when absent. At gamma = 1 it must satisfy
  /// start <= T start.
  std::optional<ValueFn> start;
  /// Skip the direct linear solve for consistency operators.
  bool force_iterative = false;
};

/// 10 * ceil(log(tol) / log(gamma)), capped at 10^6 (and equal to the cap at gamma = 1).
std::size_t default_max_iter(double gamma, double tol);

/// Largest system solved directly for consistency operators.
inline constexpr std::size_t kDirectSolveLimit = 2000;

/**
 * Returns u with bellman_error(op, u) <= tol.
 *
 * gamma < 1: consistency operators of dimension <= kDirectSolveLimit use an
 * LU solve of (I - gamma P^pi) u = r^pi, everything else iterates op.
 * gamma = 1: the fixed point is not unique; iterates op monotonically from a
 * start with start <= T start, which converges to the least fixed point above
 * the start. Anti-optimality modes are refused at gamma = 1.
 *
 * Throws NoConvergence when the residual stays above tol after max_iter steps.
 */
ValueFn fixed_point(const Operator& op, const FixedPointOptions& options = {});

}  // namespace ancvi
