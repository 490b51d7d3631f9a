#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ancvi/bellman.hpp"
#include "ancvi/worst_case.hpp"

using namespace ancvi;

namespace {

constexpr ValueKind V = ValueKind::StateValue;
constexpr ValueKind Q = ValueKind::StateActionValue;

ValueFn random_fn(std::mt19937_64& rng, ValueKind kind, std::size_t dim, double scale = 5.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  ValueFn u = ValueFn::zeros(kind, dim);
  for (double& x : u.values) x = d(rng);
  return u;
}

Policy random_policy(std::mt19937_64& rng, std::size_t n, std::size_t na) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> p(n * na);
  for (std::size_t s = 0; s < n; ++s) {
    double sum = 0.0;
    for (std::size_t a = 0; a < na; ++a) sum += p[s * na + a] = d(rng);
    for (std::size_t a = 0; a < na; ++a) p[s * na + a] /= sum;
  }
  return Policy(n, na, p);
}

// Brute-force one-step lookahead straight from the definition.
double q_of(const Mdp& m, std::size_t s, std::size_t a, const std::vector<double>& v) {
  double e = 0.0;
  for (std::size_t t = 0; t < m.n_states(); ++t) e += m.prob(s, a, t) * v[t];
  return m.reward(s, a) + m.gamma() * e;
}

// Oracle for T* / T-hat* on V or Q, written without any of the library's helpers.
ValueFn oracle_optimality(const Mdp& m, const ValueFn& u, bool maximize) {
  const std::size_t n = m.n_states(), na = m.n_actions();
  const double init = maximize ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  ValueFn out = u;
  if (u.kind == V) {
    for (std::size_t s = 0; s < n; ++s) {
      double best = init;
      for (std::size_t a = 0; a < na; ++a) {
        const double q = q_of(m, s, a, u.values);
        best = maximize ? std::max(best, q) : std::min(best, q);
      }
      out[s] = best;
    }
  } else {
    std::vector<double> ext(n, init);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t a = 0; a < na; ++a) {
        ext[s] = maximize ? std::max(ext[s], u[s * na + a]) : std::min(ext[s], u[s * na + a]);
      }
    }
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t a = 0; a < na; ++a) out[s * na + a] = q_of(m, s, a, ext);
    }
  }
  return out;
}

// T_GS = T_n ... T_1 with T_j replacing coordinate j by (T U)_j.
ValueFn oracle_gauss_seidel(const Mdp& m, ValueFn u, bool maximize) {
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = oracle_optimality(m, u, maximize)[j];
  return u;
}

std::vector<Operator> all_operators(const Mdp& m, ValueKind kind, const Policy& pi) {
  return {Operator::consistency(m, pi, kind), Operator::optimality(m, kind), Operator::anti_optimality(m, kind),
          Operator::gs_optimality(m, kind), Operator::gs_anti_optimality(m, kind)};
}

}  // namespace

TEST_CASE("optimality operator on the hard chain at zero") {
  const auto hard = build_hard(4, 0.9);
  const auto out = apply(Operator::optimality(hard.mdp), ValueFn::zeros(V, 4));
  CHECK(out.values == std::vector<double>{0, 1, 0, 0});
}

TEST_CASE("zero rewards keep zero fixed for every mode") {
  const Mdp g = make_garnet(5, 2, 2, 1.0, 1);
  const Mdp zero(5, 2, 0.9, g.transitions(), std::vector<double>(10, 0.0));
  for (auto kind : {V, Q}) {
    for (const auto& op : all_operators(zero, kind, Policy::uniform(5, 2))) {
      CHECK(apply(op, ValueFn::zeros(kind, zero.dim(kind))) == ValueFn::zeros(kind, zero.dim(kind)));
    }
  }
}

TEST_CASE("optimality and anti-optimality match brute force") {
  std::mt19937_64 rng(3);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Mdp m = make_garnet(3, 2, 2, 1.0, seed, 0.8);
    for (auto kind : {V, Q}) {
      const auto u = random_fn(rng, kind, m.dim(kind));
      for (bool maximize : {true, false}) {
        const auto op = maximize ? Operator::optimality(m, kind) : Operator::anti_optimality(m, kind);
        const auto gs = maximize ? Operator::gs_optimality(m, kind) : Operator::gs_anti_optimality(m, kind);
        CHECK(sup_norm_diff(apply(op, u), oracle_optimality(m, u, maximize)) <= 1e-13);
        CHECK(sup_norm_diff(apply(gs, u), oracle_gauss_seidel(m, u, maximize)) <= 1e-13);
      }
    }
  }
}

TEST_CASE("consistency operator equals r^pi + gamma P^pi u") {
  std::mt19937_64 rng(4);
  const Mdp m = make_garnet(6, 3, 3, 1.0, 9, 0.7);
  const auto pi = random_policy(rng, 6, 3);
  for (auto kind : {V, Q}) {
    const auto k = induced_kernel(m, pi, kind);
    const auto u = random_fn(rng, kind, m.dim(kind));
    ValueFn expected = u;
    for (std::size_t i = 0; i < k.dim; ++i) {
      double acc = k.reward[i];
      for (std::size_t j = 0; j < k.dim; ++j) acc += m.gamma() * k.at(i, j) * u[j];
      expected[i] = acc;
    }
    CHECK(sup_norm_diff(apply(Operator::consistency(m, pi, kind), u), expected) <= 1e-12);
  }
}

TEST_CASE("apply rejects mismatched inputs") {
  const Mdp m = make_garnet(4, 2, 2, 1.0, 0);
  const auto op = Operator::optimality(m, V);
  CHECK_THROWS_AS(apply(op, ValueFn::zeros(Q, 8)), Error);
  CHECK_THROWS_AS(apply(op, ValueFn::zeros(V, 3)), Error);
  CHECK_THROWS_AS(Operator(m, OperatorMode::Consistency, V), Error);
}

TEST_CASE("greedy policy") {
  SUBCASE("single action") {
    const Mdp m = make_garnet(5, 1, 2, 1.0, 2);
    std::mt19937_64 rng(1);
    const auto p = greedy_policy(m, random_fn(rng, V, 5));
    CHECK(p.actions() == std::vector<std::size_t>(5, 0));
  }
  SUBCASE("hard chain") {
    const auto hard = build_hard(6, 0.9);
    CHECK(greedy_policy(hard.mdp, hard.analytic_fixed_point).actions() == std::vector<std::size_t>(6, 0));
  }
  SUBCASE("T^pi u = T* u on random instances") {
    std::mt19937_64 rng(8);
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const Mdp m = make_garnet(7, 4, 3, 1.0, seed, 0.9);
      for (auto kind : {V, Q}) {
        const auto u = random_fn(rng, kind, m.dim(kind));
        const auto pi = greedy_policy(m, u);
        CHECK(pi.is_deterministic());
        CHECK(sup_norm_diff(apply(Operator::consistency(m, pi, kind), u), apply(Operator::optimality(m, kind), u)) <=
              1e-12);
        const auto anti = anti_greedy_policy(m, u);
        CHECK(sup_norm_diff(apply(Operator::consistency(m, anti, kind), u),
                            apply(Operator::anti_optimality(m, kind), u)) <= 1e-12);
      }
    }
  }
  SUBCASE("ties go to the smallest index") {
    const Mdp m(1, 3, 0.5, {1, 1, 1}, {2, 2, 2});
    CHECK(greedy_policy(m, ValueFn::zeros(V, 1)).actions()[0] == 0);
    CHECK(anti_greedy_policy(m, ValueFn::zeros(V, 1)).actions()[0] == 0);
  }
}

TEST_CASE("anti-greedy picks the dominated action") {
  // Same transitions, action 0 pays strictly more.
  const Mdp m(2, 2, 0.9, {1, 0, 1, 0, 0, 1, 0, 1}, {1, 0, 1, 0});
  CHECK(anti_greedy_policy(m, ValueFn::zeros(V, 2)).actions() == std::vector<std::size_t>{1, 1});
  CHECK(greedy_policy(m, ValueFn::zeros(V, 2)).actions() == std::vector<std::size_t>{0, 0});
  const auto single = make_garnet(3, 1, 1, 1.0, 0);
  CHECK(anti_greedy_policy(single, ValueFn::zeros(V, 3)).actions() == std::vector<std::size_t>(3, 0));
}

TEST_CASE("bellman error") {
  const auto hard1 = build_hard(4, 1.0);
  CHECK(bellman_error(Operator::optimality(hard1.mdp), ValueFn::zeros(V, 4)) == 1.0);

  std::mt19937_64 rng(12);
  const Mdp m = make_garnet(6, 2, 3, 1.0, 5, 0.9);
  const auto u = random_fn(rng, V, 6);
  const auto tu = oracle_optimality(m, u, true);
  double oracle = 0.0;
  for (std::size_t i = 0; i < 6; ++i) oracle = std::max(oracle, std::abs(tu[i] - u[i]));
  CHECK(bellman_error(Operator::optimality(m), u) == doctest::Approx(oracle).epsilon(1e-14));

  const auto fp = fixed_point(Operator::optimality(m));
  CHECK(bellman_error(Operator::optimality(m), fp) <= 1e-12);
}

TEST_CASE("fixed points") {
  SUBCASE("hard chain") {
    const auto hard = build_hard(4, 0.9);
    const auto fp = fixed_point(Operator::optimality(hard.mdp));
    CHECK(sup_norm_diff(fp, ValueFn{V, {0, 1, 0.9, 0.81}}) <= 1e-11);
  }
  SUBCASE("zero rewards") {
    const Mdp g = make_garnet(5, 2, 2, 1.0, 1);
    const Mdp zero(5, 2, 0.9, g.transitions(), std::vector<double>(10, 0.0));
    CHECK(sup_norm(fixed_point(Operator::optimality(zero))) == 0.0);
  }
  SUBCASE("Gauss-Seidel shares the fixed point of T*") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Mdp m = make_garnet(12, 3, 3, 1.0, seed, 0.95);
      for (auto kind : {V, Q}) {
        const auto a = fixed_point(Operator::optimality(m, kind));
        const auto b = fixed_point(Operator::gs_optimality(m, kind));
        CHECK(sup_norm_diff(a, b) <= 10 * 1e-12 / (1 - 0.95));
        const auto c = fixed_point(Operator::anti_optimality(m, kind));
        const auto d = fixed_point(Operator::gs_anti_optimality(m, kind));
        CHECK(sup_norm_diff(c, d) <= 10 * 1e-12 / (1 - 0.95));
      }
    }
  }
  SUBCASE("direct and iterative policy evaluation agree") {
    std::mt19937_64 rng(2);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Mdp m = make_garnet(9, 3, 4, 1.0, seed, 0.9);
      const auto pi = random_policy(rng, 9, 3);
      for (auto kind : {V, Q}) {
        const auto op = Operator::consistency(m, pi, kind);
        FixedPointOptions it;
        it.force_iterative = true;
        const auto direct = fixed_point(op);
        const auto iterative = fixed_point(op, it);
        CHECK(bellman_error(op, direct) <= 1e-12);
        CHECK(sup_norm_diff(direct, iterative) <= 10 * 1e-12 / (1 - 0.9));
      }
    }
  }
  SUBCASE("no convergence within the budget") {
    const Mdp m = make_garnet(5, 2, 2, 1.0, 0, 0.99);
    FixedPointOptions opt;
    opt.max_iter = 3;
    try {
      fixed_point(Operator::optimality(m), opt);
      FAIL("expected NoConvergence");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoConvergence);
    }
  }
  SUBCASE("gamma = 1") {
    const auto hard = build_hard(5, 1.0);
    const auto fp = fixed_point(Operator::optimality(hard.mdp));
    CHECK(fp.values == std::vector<double>{0, 1, 1, 1, 1});
    try {
      fixed_point(Operator::anti_optimality(hard.mdp));
      FAIL("expected BadGamma");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BadGamma);
    }
    FixedPointOptions opt;
    opt.start = ValueFn{V, {0, 5, 0, 0, 0}};
    CHECK_THROWS_AS(fixed_point(Operator::optimality(hard.mdp), opt), Error);
  }
}

TEST_CASE("default iteration budget") {
  CHECK(default_max_iter(0.5, 1e-12) == 400);
  CHECK(default_max_iter(1.0, 1e-12) == 1'000'000);
  CHECK(default_max_iter(1.0 - 1e-9, 1e-12) == 1'000'000);
}

TEST_CASE("contraction and monotonicity for every mode") {
  std::mt19937_64 rng(77);
  for (double gamma : {0.3, 0.9, 1.0}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Mdp m = make_garnet(8, 3, 3, 1.0, seed, gamma);
      const auto pi = random_policy(rng, 8, 3);
      for (auto kind : {V, Q}) {
        for (const auto& op : all_operators(m, kind, pi)) {
          const auto u = random_fn(rng, kind, m.dim(kind));
          const auto w = random_fn(rng, kind, m.dim(kind));
          CHECK(sup_norm_diff(apply(op, u), apply(op, w)) <= gamma * sup_norm_diff(u, w) + 1e-12);

          ValueFn above = u;
          std::uniform_real_distribution<double> bump(0.0, 2.0);
          for (double& x : above.values) x += bump(rng);
          const auto tu = apply(op, u);
          const auto ta = apply(op, above);
          for (std::size_t i = 0; i < tu.size(); ++i) CHECK(tu[i] <= ta[i] + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("anti-optimality is dominated by optimality") {
  std::mt19937_64 rng(21);
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const Mdp m = make_garnet(10, 3, 3, 1.0, seed, 0.9);
    const auto pi = random_policy(rng, 10, 3);
    for (auto kind : {V, Q}) {
      const auto lo = fixed_point(Operator::anti_optimality(m, kind));
      const auto hi = fixed_point(Operator::optimality(m, kind));
      for (std::size_t i = 0; i < lo.size(); ++i) CHECK(lo[i] <= hi[i] + 1e-12);

      const auto u = random_fn(rng, kind, m.dim(kind));
      const auto a = apply(Operator::anti_optimality(m, kind), u);
      const auto c = apply(Operator::consistency(m, pi, kind), u);
      const auto o = apply(Operator::optimality(m, kind), u);
      for (std::size_t i = 0; i < u.size(); ++i) {
        CHECK(a[i] <= c[i] + 1e-12);
        CHECK(c[i] <= o[i] + 1e-12);
      }
    }
  }
}
