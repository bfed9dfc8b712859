#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qaa/spectral.hpp"
#include "qaa/semiclassical.hpp"
#include "qaa/rng.hpp"

using namespace qaa;
using Catch::Approx;

TEST_CASE("gap profile endpoints are fixed by the start and cost Hamiltonians") {
  // At tau = 0 the (l^3-scaled) gap is that of 2(1 - N_x): exactly 4/n.
  // At tau = 1 it is the smallest scaled cost difference above the minimum.
  const HwpInstance inst = HwpInstance::reference_instance();
  const int n = 24;
  const GapProfile prof = gap_profile(inst, DriverSpec::none(), n, 201);
  CHECK(prof.gap.front() == Approx(4.0 / n).margin(1e-10));

  const double l3 = std::pow(0.5 * n, 3);
  double e0 = 1e300, e1 = 1e300;
  for (int w = 0; w <= n; ++w) {
    const double e = exact_cost(n, w, inst.p);
    if (e < e0) {
      e1 = e0;
      e0 = e;
    } else if (e < e1) {
      e1 = e;
    }
  }
  CHECK(prof.gap.back() == Approx((e1 - e0) / l3).margin(1e-10));
}

TEST_CASE("gap profile is reported in l^3-scaled units unless raw is requested") {
  const HwpInstance inst = HwpInstance::reference_instance();
  const int n = 20;
  SpectralOptions raw;
  raw.raw_units = true;
  const GapProfile scaled = gap_profile(inst, DriverSpec::none(), n, 101);
  const GapProfile rawp = gap_profile(inst, DriverSpec::none(), n, 101, raw);
  const double l3 = std::pow(0.5 * n, 3);
  for (std::size_t i = 0; i < scaled.tau.size(); ++i) {
    CHECK(rawp.gap[i] == Approx(l3 * scaled.gap[i]).epsilon(1e-12));
    CHECK(rawp.lambda0[i] == Approx(l3 * scaled.lambda0[i]).margin(1e-8 * l3));
  }
}

TEST_CASE("runtime bound combines the matrix element and the refined minimum gap") {
  const HwpInstance inst = HwpInstance::reference_instance();
  const GapProfile prof = gap_profile(inst, DriverSpec::none(), 30, 201);
  CHECK(prof.hdot_max > 0.0);
  CHECK(prof.min_gap > 0.0);
  CHECK(prof.runtime_bound ==
        Approx(prof.hdot_max / (prof.min_gap * prof.min_gap)).epsilon(1e-12));
  CHECK(prof.min_gap <= *std::min_element(prof.gap.begin(), prof.gap.end()) + 1e-15);
}

TEST_CASE("grid refinement recovers the frozen bare-schedule minimum gaps") {
  // Reference instance without a driver: the avoided crossing narrows
  // exponentially; pinned values from the dense diagonalization.
  const HwpInstance inst = HwpInstance::reference_instance();
  SpectralOptions opt;
  opt.refine_tol = 1e-10;

  const GapProfile p20 = gap_profile(inst, DriverSpec::none(), 20, 201, opt);
  CHECK(p20.min_gap == Approx(2.7954306682954665e-3).epsilon(1e-6));

  const GapProfile p60 = gap_profile(inst, DriverSpec::none(), 60, 201, opt);
  CHECK(p60.min_gap == Approx(5.3721799661245847e-7).epsilon(1e-5));
  CHECK(p60.tau_at_min == Approx(0.4461).margin(2e-3));
}

TEST_CASE("a super-critical driver opens the minimum gap by orders of magnitude") {
  const HwpInstance inst = HwpInstance::reference_instance();
  GammaCoefficients g;
  g.g4 = -8.0;
  const GapProfile driven =
      gap_profile(inst, DriverSpec::from_gamma(g), 60, 201);
  const GapProfile bare = gap_profile(inst, DriverSpec::none(), 60, 201);
  CHECK(driven.min_gap > 1e-2);
  CHECK(driven.min_gap / bare.min_gap > 1e3);
}

TEST_CASE("block and polynomial drivers of the reference flavor give close profiles") {
  // The reference block has effective polynomial gamma4 = -8; at finite n
  // the two differ by the O(1/n) operator correction.
  const HwpInstance inst = HwpInstance::reference_instance();
  const int n = 80;
  const GapProfile block =
      gap_profile(inst, DriverSpec::from_block(reference_driver()), n, 101);
  GammaCoefficients g;
  g.g4 = -8.0;
  const GapProfile poly = gap_profile(inst, DriverSpec::from_gamma(g), n, 101);
  for (std::size_t i = 0; i < block.tau.size(); ++i)
    CHECK(block.gap[i] == Approx(poly.gap[i]).margin(0.5));
  CHECK(block.min_gap == Approx(poly.min_gap).epsilon(0.5));
}

TEST_CASE("scaling fit classifies the frozen exponential and polynomial families") {
  const HwpInstance inst = HwpInstance::reference_instance();
  const std::vector<int> sizes{20, 30, 40, 50, 60};
  SpectralOptions opt;
  opt.refine_tol = 1e-10;

  SECTION("bare schedule: exponential, rate near 0.21") {
    const ScalingFit fit =
        min_gap_scaling(inst, DriverSpec::none(), sizes, 201, opt);
    CHECK(fit.verdict == ScalingVerdict::exponential);
    CHECK(fit.exp_rate == Approx(0.21).margin(0.03));
    CHECK(fit.exp_rss < fit.pow_rss);
  }
  SECTION("strong driver gamma4 = -8: polynomial with unit exponent") {
    GammaCoefficients g;
    g.g4 = -8.0;
    const ScalingFit fit =
        min_gap_scaling(inst, DriverSpec::from_gamma(g), sizes, 201, opt);
    CHECK(fit.verdict == ScalingVerdict::polynomial);
    CHECK(fit.pow_exponent == Approx(1.0).margin(0.15));
  }
  SECTION("weak driver gamma4 = -0.5 stays exponential") {
    GammaCoefficients g;
    g.g4 = -0.5;
    const ScalingFit fit =
        min_gap_scaling(inst, DriverSpec::from_gamma(g), sizes, 201, opt);
    CHECK(fit.verdict == ScalingVerdict::exponential);
  }
  SECTION("moderate super-critical driver gamma4 = -2 is polynomial") {
    GammaCoefficients g;
    g.g4 = -2.0;
    const ScalingFit fit =
        min_gap_scaling(inst, DriverSpec::from_gamma(g), sizes, 201, opt);
    CHECK(fit.verdict == ScalingVerdict::polynomial);
  }
}

TEST_CASE("ground-state overlap with the cost minimizer sweeps from binomial to 1") {
  const HwpInstance inst = HwpInstance::reference_instance();
  const int n = 14;
  // Cost minimizer of the reference instance is w* = 0 (q = +1).
  const double at0 = ground_overlap(inst, DriverSpec::none(), n, 0.0);
  CHECK(at0 == Approx(1.0 / std::pow(2.0, n)).epsilon(1e-9));
  const double at1 = ground_overlap(inst, DriverSpec::none(), n, 1.0);
  CHECK(at1 == Approx(1.0).margin(1e-9));
  const double mid = ground_overlap(inst, DriverSpec::none(), n, 0.3);
  CHECK(mid > at0);
  CHECK(mid < 1.0);
}

TEST_CASE("mirror transform leaves the spectrum invariant") {
  // Reversing the clause weights p -> (p3, p2, p1, p0) together with
  // negating gamma4 and gamma6 conjugates H by the bit-flip, so every
  // eigenvalue — and the whole gap profile — is unchanged.
  const HwpInstance inst(ClauseWeights{0.3, 2.1, 0.8, 1.4});
  const HwpInstance mirrored(ClauseWeights{1.4, 0.8, 2.1, 0.3});
  GammaCoefficients g;
  g.g1 = 0.4;
  g.g2 = -0.9;
  g.g3 = 0.2;
  g.g4 = -1.3;
  g.g5 = 0.6;
  g.g6 = 0.8;
  GammaCoefficients gm = g;
  gm.g4 = -g.g4;
  gm.g6 = -g.g6;

  const int n = 40;
  const GapProfile a = gap_profile(inst, DriverSpec::from_gamma(g), n, 101);
  const GapProfile b = gap_profile(mirrored, DriverSpec::from_gamma(gm), n, 101);
  for (std::size_t i = 0; i < a.tau.size(); ++i) {
    CHECK(std::abs(a.gap[i] - b.gap[i]) <= 1e-10);
    CHECK(std::abs(a.lambda0[i] - b.lambda0[i]) <= 1e-10);
  }
}

TEST_CASE("gap profile is independent of the worker count") {
  const HwpInstance inst = HwpInstance::reference_instance();
  GammaCoefficients g;
  g.g4 = -3.0;
  SpectralOptions one, four;
  one.jobs = 1;
  four.jobs = 4;
  const GapProfile pa = gap_profile(inst, DriverSpec::from_gamma(g), 30, 101, one);
  const GapProfile pb = gap_profile(inst, DriverSpec::from_gamma(g), 30, 101, four);
  for (std::size_t i = 0; i < pa.tau.size(); ++i) {
    CHECK(pa.gap[i] == pb.gap[i]);
    CHECK(pa.hdot[i] == pb.hdot[i]);
  }
  CHECK(pa.min_gap == pb.min_gap);
}

TEST_CASE("semiclassical frequency predicts the exact gap away from bifurcations") {
  // One instance of the correspondence check: a smooth random model at
  // large n, probed at mid-schedule; the exact scaled gap must match
  // eps * Omega_* to better than 10%.
  const HwpInstance inst(ClauseWeights{1.1, 2.4, 0.6, 1.9});
  GammaCoefficients g;
  g.g1 = 0.5;
  g.g2 = -0.6;
  g.g3 = 0.15;
  g.g4 = -0.8;
  g.g5 = 0.4;
  g.g6 = -0.3;
  const EffectiveModel model(inst, g);
  const int n = 120;

  const SubspaceOperator hb = build_hb(n);
  const SubspaceOperator he = DriverSpec::from_gamma(g).build(n);
  const SubspaceOperator hp = build_hp(n, inst, HpMode::exact);
  const double l3 = std::pow(0.5 * n, 3);

  for (const double tau : {0.35, 0.55, 0.75}) {
    const StationaryPoint sp = stationary_analysis(model, tau);
    REQUIRE_FALSE(sp.mass_singular);
    REQUIRE(sp.elliptic);
    const Spectrum s = eigh(assemble_h(tau, hb, he, hp), false);
    const double exact_gap = s.gap() / l3;
    const double predicted = semiclassical_gap(sp, n);
    CHECK(std::abs(exact_gap - predicted) / predicted < 0.1);
  }
}

TEST_CASE("spectral routines validate their inputs") {
  const HwpInstance inst = HwpInstance::reference_instance();
  CHECK_THROWS_AS(gap_profile(inst, DriverSpec::none(), 30, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      min_gap_scaling(inst, DriverSpec::none(), {20, 30, 40, 50}, 201),
      std::invalid_argument);
  CHECK_THROWS_AS(
      min_gap_scaling(inst, DriverSpec::none(), {10, 20, 30, 40, 50}, 201),
      std::invalid_argument);
}
