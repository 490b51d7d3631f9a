#include "ancvi/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace ancvi {

std::string_view to_string(SolverVariant variant) {
  switch (variant) {
    case SolverVariant::Vi: return "vi";
    case SolverVariant::AncVi: return "anc";
    case SolverVariant::ApxAncVi: return "apx";
    case SolverVariant::GsAncVi: return "gs-anc";
  }
  return "unknown";
}

std::string_view to_string(Side side) { return side == Side::Lower ? "lower" : "upper"; }

double beta(double gamma, std::size_t k) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(ErrorCode::BadGamma, "gamma must lie in (0, 1]");
  if (k == 0) return 1.0;
  const double kk = static_cast<double>(k);
  if (gamma == 1.0) return 1.0 / (kk + 1.0);
  // gamma^{2k} (1 - gamma^2) / (1 - gamma^{2k+2}), with the differences from 1
  // taken through expm1 so that gamma near 1 keeps full precision.
  const double log_g = std::log(gamma);
  return std::exp(2.0 * kk * log_g) * std::expm1(2.0 * log_g) / std::expm1((2.0 * kk + 2.0) * log_g);
}

namespace {

void check_config(const Operator& op, const SolverConfig& cfg) {
  if (cfg.initial.kind != op.kind() || cfg.initial.size() != op.dim()) {
    throw Error(ErrorCode::ConfigMismatch, "initial value function does not match the operator");
  }
  if (cfg.noise.has_value() != (cfg.variant == SolverVariant::ApxAncVi)) {
    throw Error(ErrorCode::ConfigMismatch, "noise must be given exactly for the approximate variant");
  }
  if (cfg.noise && !(cfg.noise->eps_bound >= 0.0)) {
    throw Error(ErrorCode::ConfigMismatch, "eps_bound must be nonnegative");
  }
  switch (cfg.variant) {
    case SolverVariant::Vi:
      break;
    case SolverVariant::AncVi:
      if (op.is_gauss_seidel()) throw Error(ErrorCode::ConfigMismatch, "use GsAncVi for Gauss-Seidel operators");
      break;
    case SolverVariant::ApxAncVi:
      if (op.mode() != OperatorMode::Optimality) {
        throw Error(ErrorCode::ConfigMismatch, "ApxAncVi runs on the optimality operator");
      }
      break;
    case SolverVariant::GsAncVi:
      if (op.mode() != OperatorMode::GsOptimality) {
        throw Error(ErrorCode::ConfigMismatch, "GsAncVi runs on the Gauss-Seidel optimality operator");
      }
      break;
  }
}

}  // namespace

std::optional<Side> detect_start_side(const Operator& op, const ValueFn& u) {
  const ValueFn tu = apply(op, u);
  const double slack = 1e-12 * (1.0 + sup_norm(u));
  bool lower = true;
  bool upper = true;
  for (std::size_t i = 0; i < u.size(); ++i) {
    lower = lower && u[i] <= tu[i] + slack;
    upper = upper && u[i] >= tu[i] - slack;
  }
  if (lower) return Side::Lower;
  if (upper) return Side::Upper;
  return std::nullopt;
}

IterationTrace run(const Operator& op, const SolverConfig& cfg, const References& refs) {
  check_config(op, cfg);
  using clock = std::chrono::steady_clock;

  IterationTrace trace;
  trace.variant = cfg.variant;
  trace.mode = op.mode();
  trace.kind = op.kind();
  trace.gamma = op.gamma();
  trace.n_states = op.mdp().n_states();
  trace.start_side = detect_start_side(op, cfg.initial);
  trace.rows.reserve(cfg.iterations + 1);

  const bool anchored = cfg.variant != SolverVariant::Vi;
  const ValueFn& u0 = cfg.initial;
  const std::size_t dim = u0.size();

  std::mt19937_64 rng(cfg.noise ? cfg.noise->seed : 0);
  std::uniform_real_distribution<double> noise_dist(-(cfg.noise ? cfg.noise->eps_bound : 0.0),
                                                    cfg.noise ? cfg.noise->eps_bound : 0.0);

  ValueFn u = u0;
  auto started = clock::now();
  ValueFn tu = apply(op, u);
  double noise_norm = 0.0;
  for (std::size_t k = 0;; ++k) {
    TraceRow row;
    row.k = k;
    if (anchored) row.beta = beta(op.gamma(), k);
    row.bellman_err = sup_norm_diff(tu, u);
    if (refs.opt) row.dist_to_opt = sup_norm_diff(u, *refs.opt);
    if (refs.anti) row.dist_to_anti = sup_norm_diff(u, *refs.anti);
    row.noise_norm = noise_norm;
    row.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - started).count();
    trace.rows.push_back(row);
    if (cfg.record_iterates) trace.iterates.push_back(u);
    if (k == cfg.iterations) break;

    started = clock::now();
    if (cfg.variant == SolverVariant::ApxAncVi) {
      ValueFn eps{u.kind, std::vector<double>(dim)};
      for (double& e : eps.values) e = noise_dist(rng);
      noise_norm = sup_norm(eps);
      for (std::size_t i = 0; i < dim; ++i) tu[i] += eps[i];
      if (cfg.record_iterates) trace.noise.push_back(std::move(eps));
    }
    if (anchored) {
      const double b = beta(op.gamma(), k + 1);
      for (std::size_t i = 0; i < dim; ++i) u[i] = b * u0[i] + (1.0 - b) * tu[i];
    } else {
      u = std::move(tu);
    }
    tu = apply(op, u);
  }
  trace.final_iterate = std::move(u);
  return trace;
}

ValueFn warm_start(const Mdp& mdp, ValueKind kind, Side side) {
  if (mdp.gamma() >= 1.0) throw Error(ErrorCode::BadGamma, "warm starts need gamma < 1");
  const auto& r = mdp.rewards();
  const double bound = side == Side::Lower ? *std::min_element(r.begin(), r.end())
                                           : *std::max_element(r.begin(), r.end());
  ValueFn u = ValueFn::constant(kind, mdp.dim(kind), bound / (1.0 - mdp.gamma()));

  const Operator ops[] = {
      Operator::consistency(mdp, Policy::uniform(mdp.n_states(), mdp.n_actions()), kind),
      Operator::optimality(mdp, kind),
      Operator::anti_optimality(mdp, kind),
      Operator::gs_optimality(mdp, kind),
      Operator::gs_anti_optimality(mdp, kind),
  };
  for (const auto& op : ops) {
    const auto detected = detect_start_side(op, u);
    // A fixed point is on both sides; detect_start_side reports Lower then.
    const bool ok = detected == side || (detected == Side::Lower && side == Side::Upper &&
                                         bellman_error(op, u) <= 1e-12 * (1.0 + sup_norm(u)));
    if (!ok) throw Error(ErrorCode::NotMonotoneStart, "warm start failed its side check for " + std::string(to_string(op.mode())));
  }
  return u;
}

Policy extract_policy(const Mdp& mdp, const IterationTrace& trace) {
  if (!trace.final_iterate) throw Error(ErrorCode::MissingIterates, "trace holds no final iterate");
  return greedy_policy(mdp, *trace.final_iterate);
}

ValueFn undiscounted_limit(const Operator& op, const ValueFn& u0, double tol) {
  FixedPointOptions options;
  options.tol = tol;
  options.start = u0;
  return fixed_point(op, options);
}

}  // namespace ancvi
