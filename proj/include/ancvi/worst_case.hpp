#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ancvi/bellman.hpp"
#include "ancvi/solvers.hpp"

namespace ancvi {

/**
 * Single-action chain MDP on which every span-respecting method has Bellman
 * error at least gamma^k / sum_{i<=k} gamma^i * ||U^0 - U*|| for k <= n-2.
 *
 * State 0 is absorbing with reward 0, state j > 0 moves to j-1, and only
 * state 1 pays reward 1 (plus the shift that centres the instance on u0).
 */
struct HardInstance {
  Mdp mdp;
  ValueFn u0;
  ValueFn analytic_fixed_point;  // [0, 1, gamma, ..., gamma^{n-2}] + u0
  std::size_t n = 0;
};

/// Chain of n >= 2 states with u0 = 0. Throws BadSize.
HardInstance build_hard(std::size_t n, double gamma);

/// Same chain with rewards r = u0 - gamma P u0 + e_1, so that
/// T U = T_0 (U - u0) + u0 and the fixed point is shifted by u0.
HardInstance build_hard_shifted(std::size_t n, double gamma, const ValueFn& u0);

/// Relative threshold of the span test: residual_i <= kSpanTol * (1 + ||U^i||).
inline constexpr double kSpanTol = 1e-8;

/**
 * For each recorded iterate U^i, the sup norm of the residual of the least
 * squares projection of U^i - U^0 onto span{T U^j - U^j : j < i}. Entry 0 is
 * 0. Throws MissingIterates when the trace did not record iterates.
 */
std::vector<double> span_residuals(const Operator& op, const IterationTrace& trace);

bool satisfies_span_condition(const IterationTrace& trace, const std::vector<double>& residuals);

struct LowerBoundRow {
  std::size_t k = 0;
  double measured = 0.0;
  double lower = 0.0;
  double ratio = 0.0;  // measured / lower
};

struct LowerBoundReport {
  std::vector<LowerBoundRow> rows;
  double dist_opt = 0.0;
  bool holds = true;  // measured >= lower - 1e-10 at every k
};

/**
 * Compares a trace run on instance.mdp from instance.u0 against the lower
 * bound for k = 0..horizon (default: the trace length). Throws SpanViolated
 * when the trace leaves the span class, HorizonExceeded when horizon > n-2.
 */
LowerBoundReport confront_lower_bound(const HardInstance& instance, const IterationTrace& trace,
                                      std::optional<std::size_t> horizon = std::nullopt);

}  // namespace ancvi
