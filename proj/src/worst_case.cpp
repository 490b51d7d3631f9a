#include "ancvi/worst_case.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "ancvi/rates.hpp"

namespace ancvi {

namespace {

std::vector<double> chain_transitions(std::size_t n) {
  std::vector<double> p(n * n, 0.0);
  p[0] = 1.0;
  for (std::size_t j = 1; j < n; ++j) p[j * n + (j - 1)] = 1.0;
  return p;
}

ValueFn chain_fixed_point(std::size_t n, double gamma, ValueKind kind) {
  ValueFn u = ValueFn::zeros(kind, n);
  double g = 1.0;
  for (std::size_t j = 1; j < n; ++j, g *= gamma) u[j] = g;
  return u;
}

}  // namespace

HardInstance build_hard(std::size_t n, double gamma) {
  return build_hard_shifted(n, gamma, ValueFn::zeros(ValueKind::StateValue, n));
}

HardInstance build_hard_shifted(std::size_t n, double gamma, const ValueFn& u0) {
  if (n < 2) throw Error(ErrorCode::BadSize, "hard instance needs n >= 2, got " + std::to_string(n));
  if (u0.size() != n) throw Error(ErrorCode::BadSize, "u0 must have length n");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(ErrorCode::BadGamma, "gamma must lie in (0, 1]");

  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pu0 = i == 0 ? u0[0] : u0[i - 1];
    r[i] = u0[i] - gamma * pu0 + (i == 1 ? 1.0 : 0.0);
  }
  ValueFn fixed = chain_fixed_point(n, gamma, u0.kind);
  for (std::size_t i = 0; i < n; ++i) fixed[i] += u0[i];
  return HardInstance{Mdp(n, 1, gamma, chain_transitions(n), std::move(r)), u0, std::move(fixed), n};
}

std::vector<double> span_residuals(const Operator& op, const IterationTrace& trace) {
  if (trace.iterates.empty()) throw Error(ErrorCode::MissingIterates, "span test needs recorded iterates");
  const auto& its = trace.iterates;
  const auto dim = static_cast<Eigen::Index>(its.front().size());

  // Columns T U^j - U^j scaled to unit sup norm; zero columns carry no direction.
  std::vector<Eigen::VectorXd> columns;
  std::vector<double> out(its.size(), 0.0);
  for (std::size_t i = 0; i < its.size(); ++i) {
    if (i > 0) {
      Eigen::VectorXd y(dim);
      for (Eigen::Index r = 0; r < dim; ++r) y(r) = its[i][static_cast<std::size_t>(r)] - its[0][static_cast<std::size_t>(r)];
      if (columns.empty()) {
        out[i] = y.cwiseAbs().maxCoeff();
      } else {
        Eigen::MatrixXd a(dim, static_cast<Eigen::Index>(columns.size()));
        for (std::size_t c = 0; c < columns.size(); ++c) a.col(static_cast<Eigen::Index>(c)) = columns[c];
        const Eigen::VectorXd x = a.completeOrthogonalDecomposition().solve(y);
        out[i] = (y - a * x).cwiseAbs().maxCoeff();
      }
    }
    const ValueFn tu = apply(op, its[i]);
    Eigen::VectorXd col(dim);
    for (Eigen::Index r = 0; r < dim; ++r) col(r) = tu[static_cast<std::size_t>(r)] - its[i][static_cast<std::size_t>(r)];
    const double scale = col.cwiseAbs().maxCoeff();
    if (scale > 0.0) columns.push_back(col / scale);
  }
  return out;
}

bool satisfies_span_condition(const IterationTrace& trace, const std::vector<double>& residuals) {
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    if (residuals[i] > kSpanTol * (1.0 + sup_norm(trace.iterates[i]))) return false;
  }
  return true;
}

LowerBoundReport confront_lower_bound(const HardInstance& instance, const IterationTrace& trace,
                                      std::optional<std::size_t> horizon) {
  const std::size_t k_max = horizon.value_or(trace.iterations());
  if (k_max + 2 > instance.n) {
    throw Error(ErrorCode::HorizonExceeded, "the lower bound needs n >= k + 2; n = " + std::to_string(instance.n) +
                                                ", k = " + std::to_string(k_max));
  }
  if (k_max > trace.iterations()) throw Error(ErrorCode::ConfigMismatch, "horizon exceeds the trace length");
  if (trace.iterates.empty()) throw Error(ErrorCode::MissingIterates, "lower-bound check needs recorded iterates");
  if (trace.gamma != instance.mdp.gamma()) throw Error(ErrorCode::GammaMismatch, "trace was run at a different gamma");
  if (trace.iterates.front().values != instance.u0.values) {
    throw Error(ErrorCode::ConfigMismatch, "trace does not start at the instance's u0");
  }

  const Operator op = Operator::optimality(instance.mdp, trace.kind);
  if (!satisfies_span_condition(trace, span_residuals(op, trace))) {
    throw Error(ErrorCode::SpanViolated, "trace leaves U0 + span of past residuals");
  }

  LowerBoundReport report;
  report.dist_opt = sup_norm_diff(instance.u0, ValueFn{instance.u0.kind, instance.analytic_fixed_point.values});
  for (std::size_t k = 0; k <= k_max; ++k) {
    LowerBoundRow row;
    row.k = k;
    row.measured = trace.rows[k].bellman_err;
    row.lower = lower_bound(instance.mdp.gamma(), k, report.dist_opt);
    row.ratio = row.measured / row.lower;
    report.holds = report.holds && row.measured >= row.lower - 1e-10;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace ancvi
