#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "ancvi/io.hpp"
#include "ancvi/mdp.hpp"
#include "ancvi/worst_case.hpp"

using namespace ancvi;

namespace {

Mdp two_state_identity(double gamma = 0.9) { return Mdp(2, 1, gamma, {1, 0, 0, 1}, {0, 1}); }

ValueFn random_vec(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  ValueFn u = ValueFn::zeros(ValueKind::StateValue, n);
  for (double& x : u.values) x = d(rng);
  return u;
}

}  // namespace

TEST_CASE("validate accepts the identity chain") {
  CHECK(validate(two_state_identity()).ok());
}

TEST_CASE("validate reports a short row with its indices and sum") {
  const Mdp mdp(2, 1, 0.9, {0.5, 0.4, 0, 1}, {0, 0});
  const auto report = validate(mdp);
  REQUIRE(report.issues.size() == 1);
  CHECK(report.issues[0].code == ErrorCode::NonStochasticRow);
  CHECK(report.issues[0].state == 0);
  CHECK(report.issues[0].action == 0);
  CHECK(report.issues[0].value == doctest::Approx(0.9).epsilon(1e-15));
  CHECK_THROWS_AS(require_valid(mdp), Error);
}

TEST_CASE("validate lists every violation") {
  const double nan = std::nan("");
  const Mdp mdp(2, 1, 1.5, {nan, 1, -0.5, 1.5}, {0, INFINITY});
  const auto report = validate(mdp);
  int gamma = 0, nonfinite = 0, rows = 0;
  for (const auto& i : report.issues) {
    gamma += i.code == ErrorCode::BadGamma;
    nonfinite += i.code == ErrorCode::NonFiniteEntry;
    rows += i.code == ErrorCode::NonStochasticRow;
  }
  CHECK(gamma == 1);
  CHECK(nonfinite == 2);  // NaN transition, infinite reward
  CHECK(rows == 1);       // negative entry; row 1 still sums to 1
}

TEST_CASE("gamma = 1 is valid, gamma = 0 is not") {
  CHECK(validate(two_state_identity(1.0)).ok());
  CHECK_FALSE(validate(two_state_identity(0.0)).ok());
}

TEST_CASE("hard chain has one-hot rows and validates") {
  const auto hard = build_hard(4, 0.9);
  CHECK(validate(hard.mdp).ok());
  for (std::size_t s = 0; s < 4; ++s) {
    int ones = 0;
    for (double p : hard.mdp.row(s, 0)) {
      CHECK((p == 0.0 || p == 1.0));
      ones += p == 1.0;
    }
    CHECK(ones == 1);
  }
}

TEST_CASE("shape errors are raised at construction") {
  CHECK_THROWS_AS(Mdp(2, 1, 0.9, {1, 0, 0}, {0, 0}), Error);
  CHECK_THROWS_AS(Mdp(0, 1, 0.9, {}, {}), Error);
}

TEST_CASE("renormalization only on request") {
  const Mdp mdp(1, 1, 0.5, {1.0 + 1e-9}, {0});
  CHECK_FALSE(validate(mdp).ok());
  CHECK(validate(mdp.renormalized()).ok());
}

TEST_CASE("garnet single state is a self loop") {
  const Mdp g = make_garnet(1, 1, 1, 1.0, 0);
  CHECK(g.prob(0, 0, 0) == 1.0);
  CHECK(g.reward(0, 0) >= 0.0);
  CHECK(g.reward(0, 0) <= 1.0);
}

TEST_CASE("garnet is deterministic and valid") {
  const Mdp a = make_garnet(10, 3, 2, 1.0, 7);
  const Mdp b = make_garnet(10, 3, 2, 1.0, 7);
  CHECK(a.transitions() == b.transitions());
  CHECK(a.rewards() == b.rewards());
  CHECK(mdp_to_json(a) == mdp_to_json(b));
  CHECK(validate(a).ok());
  CHECK(mdp_to_json(a) != mdp_to_json(make_garnet(10, 3, 2, 1.0, 8)));

  for (std::size_t s = 0; s < 10; ++s) {
    for (std::size_t act = 0; act < 3; ++act) {
      int support = 0;
      for (double p : a.row(s, act)) support += p > 0.0;
      CHECK(support <= 2);
      CHECK(support >= 1);
    }
  }
}

TEST_CASE("garnet rejects bad branching") {
  CHECK_THROWS_AS(make_garnet(5, 2, 0, 1.0, 0), Error);
  CHECK_THROWS_AS(make_garnet(5, 2, 6, 1.0, 0), Error);
  try {
    make_garnet(5, 2, 6, 1.0, 0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadBranching);
  }
}

TEST_CASE("sup_norm_diff") {
  const ValueFn u{ValueKind::StateValue, {0, 1, 0.9, 0.81}};
  CHECK(sup_norm_diff(u, u) == 0.0);
  CHECK(sup_norm_diff(u, ValueFn::zeros(ValueKind::StateValue, 4)) == 1.0);

  const ValueFn q{ValueKind::StateActionValue, {0, 1, 0.9, 0.81}};
  CHECK_THROWS_AS(sup_norm_diff(u, q), Error);
  CHECK_THROWS_AS(sup_norm_diff(u, ValueFn::zeros(ValueKind::StateValue, 3)), Error);
}

TEST_CASE("sup_norm_diff matches a loop and is a metric") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto u = random_vec(rng, 17);
    const auto v = random_vec(rng, 17);
    const auto w = random_vec(rng, 17);
    double oracle = 0.0;
    for (std::size_t i = 0; i < 17; ++i) {
      const double d = std::abs(u[i] - v[i]);
      if (d > oracle) oracle = d;
    }
    CHECK(sup_norm_diff(u, v) == oracle);
    CHECK(sup_norm_diff(u, v) == sup_norm_diff(v, u));
    CHECK(sup_norm_diff(u, w) <= sup_norm_diff(u, v) + sup_norm_diff(v, w) + 1e-12);
  }
}

TEST_CASE("induced kernel of a single-action MDP stacks the slices") {
  const Mdp g = make_garnet(6, 1, 3, 1.0, 3);
  const auto pi = Policy::uniform(6, 1);
  const auto k = induced_kernel(g, pi, ValueKind::StateValue);
  for (std::size_t s = 0; s < 6; ++s) {
    CHECK(k.reward[s] == g.reward(s, 0));
    for (std::size_t t = 0; t < 6; ++t) CHECK(k.at(s, t) == g.prob(s, 0, t));
  }
}

TEST_CASE("uniform policy averages action rows") {
  // P(.|0,0) = [1, 0], P(.|0,1) = [0, 1], P(.|1,0) = [0.5, 0.5], P(.|1,1) = [0.2, 0.8]
  const Mdp mdp(2, 2, 0.9, {1, 0, 0, 1, 0.5, 0.5, 0.2, 0.8}, {1, 3, 0, 2});
  const auto k = induced_kernel(mdp, Policy::uniform(2, 2), ValueKind::StateValue);
  CHECK(k.at(0, 0) == doctest::Approx(0.5));
  CHECK(k.at(0, 1) == doctest::Approx(0.5));
  CHECK(k.at(1, 0) == doctest::Approx(0.35));
  CHECK(k.at(1, 1) == doctest::Approx(0.65));
  CHECK(k.reward[0] == doctest::Approx(2.0));
  CHECK(k.reward[1] == doctest::Approx(1.0));

  const auto kq = induced_kernel(mdp, Policy::uniform(2, 2), ValueKind::StateActionValue);
  REQUIRE(kq.dim == 4);
  // (s=1, a=1) -> (s'=1, a'=0): P(1|1,1) * pi(0|1) = 0.8 * 0.5
  CHECK(kq.at(3, 2) == doctest::Approx(0.4));
  CHECK(kq.reward[3] == 2.0);
}

TEST_CASE("induced kernel rows are stochastic") {
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Mdp g = make_garnet(8, 3, 3, 1.0, seed);
    std::vector<double> probs(8 * 3);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    for (std::size_t s = 0; s < 8; ++s) {
      double sum = 0.0;
      for (std::size_t a = 0; a < 3; ++a) sum += probs[s * 3 + a] = d(rng);
      for (std::size_t a = 0; a < 3; ++a) probs[s * 3 + a] /= sum;
    }
    const Policy pi(8, 3, probs);
    for (auto kind : {ValueKind::StateValue, ValueKind::StateActionValue}) {
      const auto k = induced_kernel(g, pi, kind);
      for (std::size_t i = 0; i < k.dim; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < k.dim; ++j) sum += k.at(i, j);
        CHECK(std::abs(sum - 1.0) <= 1e-12);
      }
    }
  }
}

TEST_CASE("induced kernel rejects a mismatched policy") {
  const Mdp g = make_garnet(4, 2, 2, 1.0, 0);
  CHECK_THROWS_AS(induced_kernel(g, Policy::uniform(3, 2), ValueKind::StateValue), Error);
  CHECK_THROWS_AS(induced_kernel(g, Policy(4, 2, std::vector<double>(8, 0.3)), ValueKind::StateValue), Error);
}

TEST_CASE("policy helpers") {
  const std::vector<std::size_t> acts{1, 0, 2};
  const auto p = Policy::deterministic(3, acts);
  CHECK(p.is_deterministic());
  CHECK(p.actions() == acts);
  CHECK_FALSE(Policy::uniform(2, 2).is_deterministic());
}

TEST_CASE("MDP JSON round trip and schema") {
  const Mdp g = make_garnet(5, 2, 3, 2.0, 42, 0.95);
  const std::string text = mdp_to_json(g);
  CHECK(text.find("\"n_states\"") != std::string::npos);
  CHECK(text.find("\"transitions\"") != std::string::npos);
  const Mdp back = mdp_from_json(text);
  CHECK(back.transitions() == g.transitions());
  CHECK(back.rewards() == g.rewards());
  CHECK(back.gamma() == g.gamma());
  CHECK(mdp_to_json(back) == text);
}

TEST_CASE("MDP JSON loader rejects bad input") {
  const std::string bad_row =
      R"({"n_states":2,"n_actions":1,"gamma":0.9,"transitions":[[[0.5,0.4]],[[0,1]]],"rewards":[[0],[0]]})";
  try {
    mdp_from_json(bad_row);
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationFailed);
    CHECK(std::string(e.what()).find("NonStochasticRow") != std::string::npos);
  }
  const std::string bad_shape =
      R"({"n_states":2,"n_actions":1,"gamma":0.9,"transitions":[[[1,0]]],"rewards":[[0],[0]]})";
  try {
    mdp_from_json(bad_shape);
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
  }
  CHECK_THROWS_AS(mdp_from_json("{not json"), Error);
  CHECK_THROWS_AS(load_mdp("/nonexistent/mdp.json"), Error);
}
