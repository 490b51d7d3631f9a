#include "ancvi/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace ancvi {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonStochasticRow: return "NonStochasticRow";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::BadGamma: return "BadGamma";
    case ErrorCode::BadBranching: return "BadBranching";
    case ErrorCode::BadSize: return "BadSize";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::MissingIterates: return "MissingIterates";
    case ErrorCode::GammaMismatch: return "GammaMismatch";
    case ErrorCode::SpanViolated: return "SpanViolated";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::NotMonotoneStart: return "NotMonotoneStart";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(ValueKind kind) {
  return kind == ValueKind::StateValue ? "V" : "Q";
}

Mdp::Mdp(std::size_t n_states, std::size_t n_actions, double gamma,
         std::vector<double> transitions, std::vector<double> rewards)
    : n_states_(n_states),
      n_actions_(n_actions),
      gamma_(gamma),
      transitions_(std::move(transitions)),
      rewards_(std::move(rewards)) {
  if (n_states_ == 0 || n_actions_ == 0) {
    throw Error(ErrorCode::BadSize, "an MDP needs at least one state and one action");
  }
  if (transitions_.size() != n_states_ * n_actions_ * n_states_) {
    throw Error(ErrorCode::DimensionMismatch, "transition tensor must have n_states*n_actions*n_states entries");
  }
  if (rewards_.size() != n_states_ * n_actions_) {
    throw Error(ErrorCode::DimensionMismatch, "reward table must have n_states*n_actions entries");
  }
}

Mdp Mdp::renormalized() const {
  std::vector<double> p = transitions_;
  for (std::size_t row = 0; row < n_states_ * n_actions_; ++row) {
    auto first = p.begin() + static_cast<std::ptrdiff_t>(row * n_states_);
    const double sum = std::accumulate(first, first + static_cast<std::ptrdiff_t>(n_states_), 0.0);
    if (sum > 0.0) std::for_each(first, first + static_cast<std::ptrdiff_t>(n_states_), [sum](double& x) { x /= sum; });
  }
  return Mdp(n_states_, n_actions_, gamma_, std::move(p), rewards_);
}

Policy::Policy(std::size_t n_states, std::size_t n_actions, std::vector<double> probs)
    : n_states_(n_states), n_actions_(n_actions), probs_(std::move(probs)) {
  if (probs_.size() != n_states_ * n_actions_) {
    throw Error(ErrorCode::DimensionMismatch, "policy table must have n_states*n_actions entries");
  }
}

Policy Policy::deterministic(std::size_t n_actions, std::span<const std::size_t> actions) {
  std::vector<double> probs(actions.size() * n_actions, 0.0);
  for (std::size_t s = 0; s < actions.size(); ++s) {
    if (actions[s] >= n_actions) throw Error(ErrorCode::DimensionMismatch, "action index out of range");
    probs[s * n_actions + actions[s]] = 1.0;
  }
  return Policy(actions.size(), n_actions, std::move(probs));
}

Policy Policy::uniform(std::size_t n_states, std::size_t n_actions) {
  return Policy(n_states, n_actions,
                std::vector<double>(n_states * n_actions, 1.0 / static_cast<double>(n_actions)));
}

bool Policy::is_deterministic() const {
  return std::all_of(probs_.begin(), probs_.end(), [](double p) { return p == 0.0 || p == 1.0; });
}

std::vector<std::size_t> Policy::actions() const {
  std::vector<std::size_t> out(n_states_);
  for (std::size_t s = 0; s < n_states_; ++s) {
    auto first = probs_.begin() + static_cast<std::ptrdiff_t>(s * n_actions_);
    out[s] = static_cast<std::size_t>(std::max_element(first, first + static_cast<std::ptrdiff_t>(n_actions_)) - first);
  }
  return out;
}

std::string ValidationReport::to_string() const {
  if (ok()) return "valid";
  std::ostringstream os;
  os.precision(17);
  for (const auto& issue : issues) {
    os << ancvi::to_string(issue.code) << "(s=" << issue.state << ", a=" << issue.action
       << ", value=" << issue.value << "): " << issue.message << '\n';
  }
  return os.str();
}

ValidationReport validate(const Mdp& mdp) {
  ValidationReport report;
  const double g = mdp.gamma();
  if (!std::isfinite(g) || g <= 0.0 || g > 1.0) {
    report.issues.push_back({ErrorCode::BadGamma, 0, 0, g, "gamma must lie in (0, 1]"});
  }
  for (std::size_t s = 0; s < mdp.n_states(); ++s) {
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
      const auto row = mdp.row(s, a);
      bool finite_row = true;
      for (std::size_t next = 0; next < row.size(); ++next) {
        const double p = row[next];
        if (!std::isfinite(p)) {
          finite_row = false;
          report.issues.push_back({ErrorCode::NonFiniteEntry, s, a, p,
                                   "transition to state " + std::to_string(next) + " is not finite"});
        } else if (p < 0.0) {
          report.issues.push_back({ErrorCode::NonStochasticRow, s, a, p,
                                   "negative probability to state " + std::to_string(next)});
        }
      }
      if (finite_row) {
        const double sum = std::accumulate(row.begin(), row.end(), 0.0);
        if (std::abs(sum - 1.0) > kStochasticTol) {
          report.issues.push_back({ErrorCode::NonStochasticRow, s, a, sum, "row sums to " + std::to_string(sum)});
        }
      }
      if (!std::isfinite(mdp.reward(s, a))) {
        report.issues.push_back({ErrorCode::NonFiniteEntry, s, a, mdp.reward(s, a), "reward is not finite"});
      }
    }
  }
  return report;
}

void require_valid(const Mdp& mdp) {
  auto report = validate(mdp);
  if (!report.ok()) throw Error(ErrorCode::ValidationFailed, report.to_string());
}

void require_valid(const Policy& policy, const Mdp& mdp) {
  if (policy.n_states() != mdp.n_states() || policy.n_actions() != mdp.n_actions()) {
    throw Error(ErrorCode::DimensionMismatch, "policy shape does not match the MDP");
  }
  for (std::size_t s = 0; s < policy.n_states(); ++s) {
    double sum = 0.0;
    for (std::size_t a = 0; a < policy.n_actions(); ++a) {
      const double p = policy.prob(s, a);
      if (!std::isfinite(p) || p < 0.0) throw Error(ErrorCode::NonStochasticRow, "policy entry out of range at state " + std::to_string(s));
      sum += p;
    }
    if (std::abs(sum - 1.0) > kStochasticTol) {
      throw Error(ErrorCode::NonStochasticRow, "policy row " + std::to_string(s) + " sums to " + std::to_string(sum));
    }
  }
}

void require_valid(const ValueFn& u, const Mdp& mdp) {
  if (u.size() != mdp.dim(u.kind)) {
    throw Error(ErrorCode::DimensionMismatch, "value function of kind " + std::string(to_string(u.kind)) +
                                                  " has length " + std::to_string(u.size()) + ", expected " +
                                                  std::to_string(mdp.dim(u.kind)));
  }
  for (double x : u.values) {
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteEntry, "value function entry is not finite");
  }
}

Mdp make_garnet(std::size_t n_states, std::size_t n_actions, std::size_t branching,
                double reward_scale, std::uint64_t seed, double gamma) {
  if (n_states == 0 || n_actions == 0) throw Error(ErrorCode::BadSize, "garnet needs n_states, n_actions >= 1");
  if (branching < 1 || branching > n_states) {
    throw Error(ErrorCode::BadBranching, "branching must lie in [1, n_states], got " + std::to_string(branching));
  }
  if (!(reward_scale > 0.0)) throw Error(ErrorCode::BadBranching, "reward_scale must be positive");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::size_t> states(n_states);
  std::iota(states.begin(), states.end(), std::size_t{0});

  std::vector<double> p(n_states * n_actions * n_states, 0.0);
  std::vector<double> r(n_states * n_actions, 0.0);
  std::vector<std::size_t> successors;
  std::vector<double> cuts;
  for (std::size_t s = 0; s < n_states; ++s) {
    for (std::size_t a = 0; a < n_actions; ++a) {
      successors.clear();
      std::sample(states.begin(), states.end(), std::back_inserter(successors), branching, rng);

      // Gaps between sorted uniforms are a uniform sample from the simplex.
      cuts.assign(1, 0.0);
      for (std::size_t i = 1; i < branching; ++i) cuts.push_back(unit(rng));
      cuts.push_back(1.0);
      std::sort(cuts.begin(), cuts.end());

      double* row = p.data() + (s * n_actions + a) * n_states;
      for (std::size_t i = 0; i < branching; ++i) row[successors[i]] = cuts[i + 1] - cuts[i];
      r[s * n_actions + a] = reward_scale * unit(rng);
    }
  }
  return Mdp(n_states, n_actions, gamma, std::move(p), std::move(r));
}

double sup_norm_diff(const ValueFn& u, const ValueFn& w) {
  if (u.kind != w.kind) throw Error(ErrorCode::KindMismatch, "cannot compare V and Q functions");
  if (u.size() != w.size()) throw Error(ErrorCode::DimensionMismatch, "value functions differ in length");
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i] - w[i]));
  return m;
}

double sup_norm(const ValueFn& u) {
  double m = 0.0;
  for (double x : u.values) m = std::max(m, std::abs(x));
  return m;
}

InducedKernel induced_kernel(const Mdp& mdp, const Policy& policy, ValueKind kind) {
  require_valid(policy, mdp);
  const std::size_t n = mdp.n_states();
  const std::size_t na = mdp.n_actions();
  InducedKernel k;
  k.dim = mdp.dim(kind);
  k.matrix.assign(k.dim * k.dim, 0.0);
  k.reward.assign(k.dim, 0.0);
  if (kind == ValueKind::StateValue) {
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t a = 0; a < na; ++a) {
        const double pi = policy.prob(s, a);
        if (pi == 0.0) continue;
        k.reward[s] += pi * mdp.reward(s, a);
        const auto row = mdp.row(s, a);
        for (std::size_t next = 0; next < n; ++next) k.matrix[s * n + next] += pi * row[next];
      }
    }
  } else {
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t a = 0; a < na; ++a) {
        const std::size_t i = s * na + a;
        k.reward[i] = mdp.reward(s, a);
        const auto row = mdp.row(s, a);
        for (std::size_t next = 0; next < n; ++next) {
          if (row[next] == 0.0) continue;
          for (std::size_t b = 0; b < na; ++b) k.matrix[i * k.dim + next * na + b] = row[next] * policy.prob(next, b);
        }
      }
    }
  }
  return k;
}

}  // namespace ancvi
