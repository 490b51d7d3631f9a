#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ancvi/bellman.hpp"
#include "ancvi/mdp.hpp"

namespace ancvi {

enum class SolverVariant { Vi, AncVi, ApxAncVi, GsAncVi };

std::string_view to_string(SolverVariant variant);

/// Componentwise uniform noise on [-eps_bound, eps_bound], one fresh vector
/// per iteration from a seeded generator.
struct NoiseSpec {
  double eps_bound = 0.0;
  std::uint64_t seed = 0;
};

struct SolverConfig {
  SolverVariant variant = SolverVariant::AncVi;
  std::size_t iterations = 0;
  ValueFn initial;
  std::optional<NoiseSpec> noise;
  bool record_iterates = false;
};

/// Which side of the operator a start lies on: Lower means U <= T U.
enum class Side { Lower, Upper };

std::string_view to_string(Side side);

/// Reference fixed points; when present the trace records distances to them.
struct References {
  std::optional<ValueFn> opt;
  std::optional<ValueFn> anti;
};

struct TraceRow {
  std::size_t k = 0;
  std::optional<double> beta;  // absent for plain VI
  double bellman_err = 0.0;
  std::optional<double> dist_to_opt;
  std::optional<double> dist_to_anti;
  double noise_norm = 0.0;  // ||eps^{k-1}||_inf, zero at k = 0
  std::int64_t wall_ns = 0;
};

struct IterationTrace {
  SolverVariant variant = SolverVariant::Vi;
  OperatorMode mode = OperatorMode::Optimality;
  ValueKind kind = ValueKind::StateValue;
  double gamma = 0.0;
  std::size_t n_states = 0;
  std::optional<Side> start_side;

  std::vector<TraceRow> rows;
  std::vector<ValueFn> iterates;  // U^0..U^K when record_iterates
  std::vector<ValueFn> noise;     // eps^0..eps^{K-1} when record_iterates
  std::optional<ValueFn> final_iterate;

  [[nodiscard]] std::size_t iterations() const noexcept { return rows.empty() ? 0 : rows.size() - 1; }
};

/// Anchor weight 1 / sum_{i=0}^k gamma^{-2i}; 1/(k+1) at gamma = 1.
double beta(double gamma, std::size_t k);

/**
 * Runs cfg.iterations steps of the chosen scheme on op.
 *
 *   Vi        U^k = T U^{k-1}
 *   AncVi     U^k = beta_k U^0 + (1 - beta_k) T U^{k-1}
 *   ApxAncVi  U^k = beta_k U^0 + (1 - beta_k) (T* U^{k-1} + eps^{k-1})
 *   GsAncVi   U^k = beta_k U^0 + (1 - beta_k) T*_GS U^{k-1}
 *
 * The recorded Bellman error always uses the exact operator op.
 */
IterationTrace run(const Operator& op, const SolverConfig& cfg, const References& refs = {});

/// Constant start (min r)/(1-gamma) (Lower) or (max r)/(1-gamma) (Upper).
/// Throws BadGamma at gamma = 1.
ValueFn warm_start(const Mdp& mdp, ValueKind kind, Side side);

/// Lower if u <= T u, Upper if u >= T u (Lower wins when both hold), within
/// a slack of 1e-12 * (1 + ||u||).
std::optional<Side> detect_start_side(const Operator& op, const ValueFn& u);

/// Greedy policy at the final iterate. Throws MissingIterates.
Policy extract_policy(const Mdp& mdp, const IterationTrace& trace);

/**
 * Limit of anchored iteration at gamma = 1 from a start u0 <= T u0: the least
 * fixed point above u0, computed by monotone iteration to residual <= tol.
 */
ValueFn undiscounted_limit(const Operator& op, const ValueFn& u0, double tol = 1e-10);

}  // namespace ancvi
