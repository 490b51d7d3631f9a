#include "ancvi/rates.hpp"

#include <algorithm>
#include <cmath>

namespace ancvi {

namespace {

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(ErrorCode::BadGamma, "gamma must lie in (0, 1]");
}

// 1 - gamma^p, accurate for gamma near 1.
double one_minus_gpow(double log_g, double p) { return -std::expm1(p * log_g); }

bool is_upper(BoundKind b) { return b != BoundKind::Lower; }

}  // namespace

double vi_upper(double gamma, std::size_t k, double dist_opt) {
  check_gamma(gamma);
  return (1.0 + gamma) * std::pow(gamma, static_cast<double>(k)) * dist_opt;
}

double anc_factor(double gamma, std::size_t k, Regime regime) {
  check_gamma(gamma);
  const double kk = static_cast<double>(k);
  if (gamma == 1.0) return (regime == Regime::General ? 2.0 : 1.0) / (kk + 1.0);
  const double lg = std::log(gamma);
  // 1 + gamma - gamma^{k+1} written as 1 + gamma (1 - gamma^k): exact at k = 0.
  const double head = gamma * one_minus_gpow(lg, kk);
  const double lead = regime == Regime::General ? 1.0 + gamma + head : 1.0 + head;
  return std::pow(gamma, kk) * one_minus_gpow(lg, 2.0) * lead / one_minus_gpow(lg, 2.0 * kk + 2.0);
}

double anc_upper(double gamma, std::size_t k, double dist, Regime regime) {
  return anc_factor(gamma, k, regime) * dist;
}

double apx_error_term(double gamma, std::size_t k, double eps_max, ApxScheme scheme) {
  check_gamma(gamma);
  if (gamma == 1.0) throw Error(ErrorCode::BadGamma, "approximate error term needs gamma < 1");
  if (k == 0 || eps_max == 0.0) return 0.0;
  const double kk = static_cast<double>(k);
  const double lg = std::log(gamma);
  // (1 - gamma^k) / (1 - gamma)
  const double geometric = std::expm1(kk * lg) / std::expm1(lg);
  double term = (1.0 + gamma) * geometric * eps_max;
  if (scheme == ApxScheme::AncVi) term /= 1.0 + std::pow(gamma, kk + 1.0);
  return term;
}

double lower_bound(double gamma, std::size_t k, double dist_opt) {
  check_gamma(gamma);
  const double kk = static_cast<double>(k);
  if (gamma == 1.0) return dist_opt / (kk + 1.0);
  const double lg = std::log(gamma);
  return std::pow(gamma, kk) * one_minus_gpow(lg, 1.0) / one_minus_gpow(lg, kk + 1.0) * dist_opt;
}

double optimality_factor(double gamma, std::size_t k) {
  check_gamma(gamma);
  // The monotone coefficient divided by the lower bound reduces to
  // (1+gamma)(1+gamma-gamma^{k+1}) / (1+gamma^{k+1}); this form stays finite
  // where both bounds underflow.
  const double tail = std::pow(gamma, static_cast<double>(k) + 1.0);
  return (1.0 + gamma) * (1.0 + gamma - tail) / (1.0 + tail);
}

std::string_view to_string(BoundKind bound) {
  switch (bound) {
    case BoundKind::ViUpper: return "vi_upper";
    case BoundKind::AncGeneral: return "anc_general";
    case BoundKind::AncMonotone: return "anc_monotone";
    case BoundKind::ApxAncGeneral: return "apx_anc_general";
    case BoundKind::ApxAncMonotone: return "apx_anc_monotone";
    case BoundKind::Lower: return "lower";
  }
  return "unknown";
}

std::size_t BoundReport::violations() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.violated; }));
}

const BoundCheck* BoundReport::find(BoundKind bound, std::size_t k) const {
  for (const auto& c : checks) {
    if (c.bound == bound && c.k == k) return &c;
  }
  return nullptr;
}

namespace {

double general_distance(const BoundInputs& in) {
  return in.dist_anti ? std::max(in.dist_opt, *in.dist_anti) : in.dist_opt;
}

// Distance matching the start side. The upper start pairs with U-hat* for
// optimality-type traces; without an anti reference dist_opt is used.
std::optional<double> monotone_distance(const BoundInputs& in, std::optional<Side> side) {
  if (!side) return std::nullopt;
  if (*side == Side::Lower || in.gamma == 1.0) return in.dist_opt;
  return in.dist_anti.value_or(in.dist_opt);
}

}  // namespace

std::optional<double> evaluate_bound(BoundKind bound, const BoundInputs& in, std::size_t k,
                                     std::optional<Side> side, double eps_max) {
  switch (bound) {
    case BoundKind::ViUpper:
      return vi_upper(in.gamma, k, in.dist_opt);
    case BoundKind::AncGeneral:
      return anc_upper(in.gamma, k, general_distance(in), Regime::General);
    case BoundKind::AncMonotone: {
      const auto d = monotone_distance(in, side);
      if (!d) return std::nullopt;
      return anc_upper(in.gamma, k, *d, Regime::MonotoneStart);
    }
    case BoundKind::ApxAncGeneral:
      if (in.gamma == 1.0) return std::nullopt;
      return anc_upper(in.gamma, k, general_distance(in), Regime::General) +
             apx_error_term(in.gamma, k, eps_max, ApxScheme::AncVi);
    case BoundKind::ApxAncMonotone:
      if (in.gamma == 1.0 || side != Side::Upper) return std::nullopt;
      return anc_upper(in.gamma, k, *monotone_distance(in, side), Regime::MonotoneStart) +
             apx_error_term(in.gamma, k, eps_max, ApxScheme::AncVi);
    case BoundKind::Lower:
      return lower_bound(in.gamma, k, in.dist_opt);
  }
  return std::nullopt;
}

BoundReport verify_trace(const IterationTrace& trace, const BoundInputs& inputs,
                         const std::set<BoundKind>& bounds, double rel_tol) {
  if (trace.gamma != inputs.gamma) {
    throw Error(ErrorCode::GammaMismatch, "trace gamma " + std::to_string(trace.gamma) +
                                              " differs from bound gamma " + std::to_string(inputs.gamma));
  }
  BoundReport report;
  for (BoundKind b : bounds) {
    if ((b == BoundKind::AncMonotone || b == BoundKind::ApxAncMonotone) && !trace.start_side) {
      report.notes.push_back(std::string(to_string(b)) + " skipped: start is on neither side of the operator");
    } else if (b == BoundKind::ApxAncMonotone && trace.start_side == Side::Lower) {
      report.notes.push_back("apx_anc_monotone skipped: only stated for starts with U0 >= T U0");
    }
  }

  double running_eps = 0.0;
  for (const auto& row : trace.rows) {
    running_eps = std::max(running_eps, row.noise_norm);
    const double eps = inputs.eps_max.value_or(running_eps);
    for (BoundKind b : bounds) {
      const auto value = evaluate_bound(b, inputs, row.k, trace.start_side, eps);
      if (!value) continue;
      BoundCheck check;
      check.bound = b;
      check.k = row.k;
      check.measured = row.bellman_err;
      if (is_upper(b)) {
        check.value = *value * inputs.tighten;
        check.margin = check.value - check.measured;
        check.violated = check.measured > check.value + rel_tol * check.value + kAbsFloor;
      } else {
        check.value = *value;
        check.margin = check.measured - check.value;
        check.violated = check.measured < check.value - rel_tol * check.value - kAbsFloor;
      }
      if (b == BoundKind::AncMonotone && inputs.dist_anti && trace.start_side && inputs.gamma < 1.0) {
        const double other = *trace.start_side == Side::Lower ? *inputs.dist_anti : inputs.dist_opt;
        check.alternate = anc_upper(inputs.gamma, row.k, other, Regime::MonotoneStart);
      }
      report.checks.push_back(check);
    }
  }
  return report;
}

std::set<BoundKind> default_bounds(SolverVariant variant) {
  switch (variant) {
    case SolverVariant::Vi: return {BoundKind::ViUpper};
    case SolverVariant::AncVi:
    case SolverVariant::GsAncVi: return {BoundKind::AncGeneral, BoundKind::AncMonotone};
    case SolverVariant::ApxAncVi: return {BoundKind::ApxAncGeneral, BoundKind::ApxAncMonotone};
  }
  return {};
}

}  // namespace ancvi
