#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qaa/problem.hpp"
#include "qaa/spin_algebra.hpp"
#include "qaa/rng.hpp"

using namespace qaa;
using Catch::Approx;

TEST_CASE("beta map on the reference instance p = (0, 3, 1, 1)") {
  const BetaCoefficients b = betas_from_p({0.0, 3.0, 1.0, 1.0});
  CHECK(b[0] == Approx(13.0 / 6.0).margin(1e-15));
  CHECK(b[1] == Approx(0.5).margin(1e-15));
  CHECK(b[2] == Approx(-1.5).margin(1e-15));
  CHECK(b[3] == Approx(-7.0 / 6.0).margin(1e-15));
}

TEST_CASE("reduced cost boundary values follow from the clause weights") {
  // G_P(+1) = (4/3) p0 (all-plus strings see only k = 0 clauses) and
  // G_P(-1) = (4/3) p3; the reference instance has G_P(+1) = 0 and
  // G_P(-1) = 4/3 with a flat approach, G_P'(-1) = 0.
  const HwpInstance ref = HwpInstance::reference_instance();
  CHECK(gp_eval(ref.beta, 1.0) == Approx(0.0).margin(1e-15));
  CHECK(gp_eval(ref.beta, -1.0) == Approx(4.0 / 3.0).margin(1e-14));
  CHECK(gp_deriv(ref.beta, -1.0) == Approx(0.0).margin(1e-14));

  Rng rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const ClauseWeights p{rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0),
                          rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0)};
    const BetaCoefficients b = betas_from_p(p);
    CHECK(gp_eval(b, 1.0) == Approx(4.0 / 3.0 * p[0]).margin(1e-12));
    CHECK(gp_eval(b, -1.0) == Approx(4.0 / 3.0 * p[3]).margin(1e-12));
  }
}

TEST_CASE("uniform clause weights give a constant reduced cost") {
  // p = (1,1,1,1): every string sees the same number of clauses, so
  // G_P(q) = 4/3 for all q.
  const BetaCoefficients b = betas_from_p({1.0, 1.0, 1.0, 1.0});
  CHECK(b[1] == Approx(0.0).margin(1e-15));
  CHECK(b[2] == Approx(0.0).margin(1e-15));
  CHECK(b[3] == Approx(0.0).margin(1e-15));
  CHECK(b[0] == Approx(4.0 / 3.0).margin(1e-15));
}

TEST_CASE("exact cost at n = 3 reads off the clause weights directly") {
  // A 3-bit string of weight w is itself the only triple, in occupancy
  // class k = w: E(w) = p_w.
  const ClauseWeights p{0.25, 1.5, 2.0, 0.75};
  for (int w = 0; w <= 3; ++w)
    CHECK(exact_cost(3, w, p) == Approx(p[w]).margin(1e-15));
}

TEST_CASE("exact cost counts clauses over all unordered triples") {
  // Summed over all 2^n strings, each of the C(n,3) triples contributes
  // each occupancy class k on C(3,k) 2^(n-3) strings:
  //   sum_w C(n,w) E(w) = C(n,3) 2^(n-3) sum_k C(3,k) p_k.
  const int n = 11;
  const ClauseWeights p{0.5, 2.0, 1.25, 3.0};
  double lhs = 0.0, choose = 1.0;
  for (int w = 0; w <= n; ++w) {
    lhs += choose * exact_cost(n, w, p);
    choose *= static_cast<double>(n - w) / (w + 1);
  }
  const double cn3 = n * (n - 1) * (n - 2) / 6.0;
  const double rhs =
      cn3 * std::pow(2.0, n - 3) * (p[0] + 3.0 * p[1] + 3.0 * p[2] + p[3]);
  CHECK(lhs == Approx(rhs).epsilon(1e-13));
}

TEST_CASE("exact cost converges to the reduced cubic at rate 1/n") {
  // max_w |E(w)/l^3 - G_P(1 - 2w/n)| should halve from n to 2n.
  const HwpInstance inst(ClauseWeights{0.4, 2.2, 0.9, 1.7});
  auto model_error = [&](int n) {
    const double l3 = std::pow(0.5 * n, 3);
    double worst = 0.0;
    for (int w = 0; w <= n; ++w)
      worst = std::max(worst, std::abs(exact_cost(n, w, inst.p) / l3 -
                                       gp_eval(inst.beta, 1.0 - 2.0 * w / n)));
    return worst;
  };
  const double e1 = model_error(64), e2 = model_error(128);
  CHECK(e1 < 0.5);  // already small at n = 64
  CHECK(e2 < e1);
  CHECK(e1 / e2 == Approx(2.0).epsilon(0.3));
}

TEST_CASE("cost Hamiltonian modes agree asymptotically and exactly at scale l^3") {
  const HwpInstance inst = HwpInstance::reference_instance();
  const int n = 40;
  const double l3 = std::pow(0.5 * n, 3);
  const SubspaceOperator exact = build_hp(n, inst, HpMode::exact);
  const SubspaceOperator asym = build_hp(n, inst, HpMode::asymptotic);
  for (int w = 0; w <= n; ++w) {
    CHECK(exact(w, w) == Approx(exact_cost(n, w, inst.p)).margin(1e-12));
    CHECK(asym(w, w) ==
          Approx(l3 * gp_eval(inst.beta, 1.0 - 2.0 * w / n)).margin(1e-9));
    CHECK(std::abs(exact(w, w) - asym(w, w)) / l3 < 0.2);
  }
}

TEST_CASE("start Hamiltonian annihilates the +x coherent state") {
  // H_B = 2 l^3 (I - N_x) has the uniform superposition as its zero mode;
  // its spectrum is 2 l^3 (1 - m/l), equally spaced with step 2 l^2.
  const int n = 12;
  const double l = 0.5 * n, l3 = l * l * l;
  const Spectrum s = eigh(build_hb(n), false);
  for (int k = 0; k <= n; ++k)
    CHECK(s.eigenvalues[k] ==
          Approx(2.0 * l3 * (1.0 - (l - k) / l)).margin(1e-9 * l3));
  CHECK(s.eigenvalues[0] == Approx(0.0).margin(1e-10 * l3));
}

TEST_CASE("cost classification of the reference instance: double minimum at q = +1") {
  const CostClassification c = classify_cost(HwpInstance::reference_instance().beta);
  CHECK(c.shape == CostShape::double_minimum);
  CHECK(c.q_star == Approx(1.0).margin(1e-12));
  CHECK(c.value == Approx(0.0).margin(1e-12));
  REQUIRE(c.local_minima.size() == 2);
  CHECK(c.local_minima.front() == Approx(-1.0).margin(1e-12));
  CHECK(c.local_minima.back() == Approx(1.0).margin(1e-12));
}

TEST_CASE("cost classification handles interior, monotonic, and degenerate shapes") {
  SECTION("symmetric single interior minimum: p = (1,0,0,1)") {
    // G_P = 1/3 + q^2.
    const CostClassification c = classify_cost(betas_from_p({1.0, 0.0, 0.0, 1.0}));
    CHECK(c.shape == CostShape::single_minimum);
    CHECK(c.q_star == Approx(0.0).margin(1e-12));
    CHECK(c.value == Approx(1.0 / 3.0).margin(1e-12));
  }
  SECTION("monotonic with a degenerate boundary minimum: p = (0,0,0,1)") {
    // G_P = (1 - q)^3 / 6 decreases to a triple root at q = +1, where both
    // G_P' and G_P'' vanish; the value comparison must still find it.
    const CostClassification c = classify_cost(betas_from_p({0.0, 0.0, 0.0, 1.0}));
    CHECK(c.shape == CostShape::monotonic);
    CHECK(c.q_star == Approx(1.0).margin(1e-12));
    CHECK(c.value == Approx(0.0).margin(1e-12));
  }
  SECTION("constant cost reports the plateau representative q = 0") {
    const CostClassification c = classify_cost(betas_from_p({1.0, 1.0, 1.0, 1.0}));
    CHECK(c.shape == CostShape::monotonic);
    CHECK(c.q_star == 0.0);
  }
}

TEST_CASE("classified global minimum beats a fine grid scan") {
  Rng rng(2024);
  for (int trial = 0; trial < 400; ++trial) {
    const ClauseWeights p{rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0),
                          rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0)};
    const BetaCoefficients b = betas_from_p(p);
    const CostClassification c = classify_cost(b);
    double grid_min = 1e300;
    for (int i = 0; i <= 1000; ++i)
      grid_min = std::min(grid_min, gp_eval(b, -1.0 + 2.0 * i / 1000.0));
    // The classified value can only undercut the grid (it refines exactly).
    CHECK(c.value <= grid_min + 1e-9);
    CHECK(c.value >= grid_min - 0.01);  // grid resolution guard
    CHECK(std::abs(c.q_star) <= 1.0);
  }
}

TEST_CASE("cost shape names are stable identifiers") {
  CHECK(to_string(CostShape::monotonic) == "monotonic");
  CHECK(to_string(CostShape::single_minimum) == "single-minimum");
  CHECK(to_string(CostShape::double_minimum) == "double-minimum");
}

TEST_CASE("exact_cost validates its arguments") {
  const ClauseWeights p{1.0, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS(exact_cost(2, 0, p), std::invalid_argument);
  CHECK_THROWS_AS(exact_cost(5, -1, p), std::invalid_argument);
  CHECK_THROWS_AS(exact_cost(5, 6, p), std::invalid_argument);
}
