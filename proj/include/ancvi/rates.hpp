#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ancvi/solvers.hpp"

namespace ancvi {

// Closed-form Bellman-error bounds. Every discounted formula is evaluated in a
// gamma^k-factored form so that small gamma with large k never overflows.

/// (1 + gamma) gamma^k D: plain VI.
double vi_upper(double gamma, std::size_t k, double dist_opt);

enum class Regime { General, MonotoneStart };

/// Anchored rate coefficient for D = 1:
///   General        gamma^k (1-gamma^2)(1+2gamma-gamma^{k+1}) / (1-gamma^{2k+2})
///   MonotoneStart  gamma^k (1-gamma^2)(1+gamma-gamma^{k+1})  / (1-gamma^{2k+2})
/// with the gamma = 1 limits 2/(k+1) and 1/(k+1).
double anc_factor(double gamma, std::size_t k, Regime regime);

double anc_upper(double gamma, std::size_t k, double dist, Regime regime);

enum class ApxScheme { AncVi, Vi };

/// Error-accumulation term of approximate VI: (1+gamma)/(1+gamma^{k+1}) *
/// (1-gamma^k)/(1-gamma) * eps_max for the anchored scheme, without the
/// 1/(1+gamma^{k+1}) factor for plain VI. Throws BadGamma at gamma = 1.
double apx_error_term(double gamma, std::size_t k, double eps_max, ApxScheme scheme);

/// gamma^k / sum_{i=0}^k gamma^i * D.
double lower_bound(double gamma, std::size_t k, double dist_opt);

/// anc_upper(MonotoneStart) / lower_bound; lies in [1, 4].
double optimality_factor(double gamma, std::size_t k);

enum class BoundKind {
  ViUpper,         // (1+gamma) gamma^k dist_opt
  AncGeneral,      // General coefficient * max(dist_opt, dist_anti)
  AncMonotone,     // MonotoneStart coefficient * distance on the detected start side
  ApxAncGeneral,   // AncGeneral + apx_error_term(AncVi)
  ApxAncMonotone,  // AncMonotone (upper start only) + apx_error_term(AncVi)
  Lower,           // lower_bound(gamma, k, dist_opt); measured must stay above it
};

std::string_view to_string(BoundKind bound);

struct BoundInputs {
  double gamma = 0.0;
  double dist_opt = 0.0;                // ||U^0 - U*||
  std::optional<double> dist_anti;      // ||U^0 - U-hat*||, optimality operators with gamma < 1
  std::optional<double> eps_max;        // overrides the running max of the trace's noise norms
  double tighten = 1.0;                 // scales every upper bound; testing hook
};

struct BoundCheck {
  BoundKind bound = BoundKind::AncGeneral;
  std::size_t k = 0;
  double measured = 0.0;
  double value = 0.0;
  double margin = 0.0;  // value - measured for upper bounds, measured - value for Lower
  bool violated = false;
  std::optional<double> alternate;  // AncMonotone evaluated with the other start-side distance
};

struct BoundReport {
  std::vector<BoundCheck> checks;
  std::vector<std::string> notes;

  [[nodiscard]] std::size_t violations() const;
  [[nodiscard]] bool ok() const { return violations() == 0; }
  /// Check for (bound, k), if evaluated.
  [[nodiscard]] const BoundCheck* find(BoundKind bound, std::size_t k) const;
};

inline constexpr double kDefaultRelTol = 1e-9;
inline constexpr double kAbsFloor = 1e-12;

/// Bound value for one k, or nullopt when the bound does not apply (for
/// example a monotone-start bound on a trace whose start is on neither side).
std::optional<double> evaluate_bound(BoundKind bound, const BoundInputs& inputs, std::size_t k,
                                     std::optional<Side> side, double eps_max);

/**
 * Evaluates each selected bound at every k of the trace and flags violations:
 * an upper bound is violated when measured > value + rel_tol * value + 1e-12,
 * a lower bound when measured < value - rel_tol * value - 1e-12.
 * Throws GammaMismatch when inputs.gamma differs from the trace's.
 */
BoundReport verify_trace(const IterationTrace& trace, const BoundInputs& inputs,
                         const std::set<BoundKind>& bounds, double rel_tol = kDefaultRelTol);

/// Bounds that apply to a trace of the given variant.
std::set<BoundKind> default_bounds(SolverVariant variant);

}  // namespace ancvi
