#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ancvi/error.hpp"

namespace ancvi {

/// Tolerance used for every row-stochasticity check in the library.
inline constexpr double kStochasticTol = 1e-12;

enum class ValueKind { StateValue, StateActionValue };

std::string_view to_string(ValueKind kind);

/**
 * Finite MDP (S, A, P, r, gamma) with dense storage.
 *
 * transitions are stored row-major as [s][a][s'] and rewards as [s][a].
 * The constructor only checks shapes; content checks (stochastic rows,
 * finite entries, gamma range) live in validate() so that malformed input
 * can be reported rather than rejected blindly. Sparse storage is a non-goal.
 */
class Mdp {
 public:
  Mdp(std::size_t n_states, std::size_t n_actions, double gamma,
      std::vector<double> transitions, std::vector<double> rewards);

  [[nodiscard]] std::size_t n_states() const noexcept { return n_states_; }
  [[nodiscard]] std::size_t n_actions() const noexcept { return n_actions_; }
  [[nodiscard]] double gamma() const noexcept { return gamma_; }
  [[nodiscard]] bool undiscounted() const noexcept { return gamma_ == 1.0; }

  /// Length of a value vector of the given kind (n or n*|A|).
  [[nodiscard]] std::size_t dim(ValueKind kind) const noexcept {
    return kind == ValueKind::StateValue ? n_states_ : n_states_ * n_actions_;
  }

  [[nodiscard]] double prob(std::size_t s, std::size_t a, std::size_t next) const {
    return transitions_[(s * n_actions_ + a) * n_states_ + next];
  }
  [[nodiscard]] std::span<const double> row(std::size_t s, std::size_t a) const {
    return {transitions_.data() + (s * n_actions_ + a) * n_states_, n_states_};
  }
  [[nodiscard]] double reward(std::size_t s, std::size_t a) const {
    return rewards_[s * n_actions_ + a];
  }

  [[nodiscard]] const std::vector<double>& transitions() const noexcept { return transitions_; }
  [[nodiscard]] const std::vector<double>& rewards() const noexcept { return rewards_; }

  /// Copy with every transition row divided by its sum. Only done on request.
  [[nodiscard]] Mdp renormalized() const;

 private:
  std::size_t n_states_;
  std::size_t n_actions_;
  double gamma_;
  std::vector<double> transitions_;
  std::vector<double> rewards_;
};

/// Per-state action distribution, row-major [s][a].
class Policy {
 public:
  Policy(std::size_t n_states, std::size_t n_actions, std::vector<double> probs);

  static Policy deterministic(std::size_t n_actions, std::span<const std::size_t> actions);
  static Policy uniform(std::size_t n_states, std::size_t n_actions);

  [[nodiscard]] std::size_t n_states() const noexcept { return n_states_; }
  [[nodiscard]] std::size_t n_actions() const noexcept { return n_actions_; }
  [[nodiscard]] double prob(std::size_t s, std::size_t a) const { return probs_[s * n_actions_ + a]; }
  [[nodiscard]] const std::vector<double>& probs() const noexcept { return probs_; }

  [[nodiscard]] bool is_deterministic() const;
  /// Most probable action per state; smallest index on ties.
  [[nodiscard]] std::vector<std::size_t> actions() const;

 private:
  std::size_t n_states_;
  std::size_t n_actions_;
  std::vector<double> probs_;
};

/// V-function (length n) or Q-function (length n*|A|, row-major (s, a)).
struct ValueFn {
  ValueKind kind = ValueKind::StateValue;
  std::vector<double> values;

  static ValueFn zeros(ValueKind kind, std::size_t dim) { return {kind, std::vector<double>(dim, 0.0)}; }
  static ValueFn constant(ValueKind kind, std::size_t dim, double c) { return {kind, std::vector<double>(dim, c)}; }

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  friend bool operator==(const ValueFn&, const ValueFn&) = default;
};

struct ValidationIssue {
  ErrorCode code;
  std::size_t state = 0;
  std::size_t action = 0;
  double value = 0.0;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  [[nodiscard]] bool ok() const noexcept { return issues.empty(); }
  [[nodiscard]] std::string to_string() const;
};

/// Lists every violated invariant: non-stochastic rows (with indices and sum),
/// negative or non-finite entries, and gamma outside (0, 1].
ValidationReport validate(const Mdp& mdp);

/// Throws Error(ValidationFailed) carrying the full report if validate() fails.
void require_valid(const Mdp& mdp);

/// Checks that each policy row is a distribution over the mdp's actions.
void require_valid(const Policy& policy, const Mdp& mdp);

/// Checks length, kind, and finiteness of a value function against an mdp.
void require_valid(const ValueFn& u, const Mdp& mdp);

/**
 * Garnet random MDP: each (s, a) gets exactly `branching` distinct successors
 * with probabilities drawn uniformly from the simplex; rewards are uniform on
 * [0, reward_scale]. Same arguments give a bit-identical instance.
 */
Mdp make_garnet(std::size_t n_states, std::size_t n_actions, std::size_t branching,
                double reward_scale, std::uint64_t seed, double gamma = 0.9);

/// max_i |u_i - w_i|. Throws KindMismatch / DimensionMismatch.
double sup_norm_diff(const ValueFn& u, const ValueFn& w);

/// max_i |u_i|.
double sup_norm(const ValueFn& u);

/// Dense P^pi (dim x dim, row-major) and r^pi for the chosen value kind.
struct InducedKernel {
  std::size_t dim = 0;
  std::vector<double> matrix;
  std::vector<double> reward;

  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return matrix[i * dim + j]; }
};

InducedKernel induced_kernel(const Mdp& mdp, const Policy& policy, ValueKind kind);

}  // namespace ancvi
