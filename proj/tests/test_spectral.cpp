#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "csma/errors.hpp"
#include "csma/hitting.hpp"
#include "csma/spectral.hpp"
#include "doctest.h"
#include "support/uniformization.hpp"

using namespace csma;

namespace {

// Independent spectrum oracle: dense nonsymmetric eigensolve of the negated
// killed generator restricted to its transient states.
std::vector<double> raw_spectrum(const Generator& gen) {
  std::vector<int> transient;
  for (int i = 0; i < gen.size(); ++i)
    if (!gen.is_absorbing(i)) transient.push_back(i);
  const int m = static_cast<int>(transient.size());
  Eigen::MatrixXd t(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) t(a, b) = -gen.rate(transient[a], transient[b]);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(t);
  std::vector<double> out(m);
  for (int i = 0; i < m; ++i) {
    CHECK(std::abs(solver.eigenvalues()[i].imag()) < 1e-9);
    out[static_cast<std::size_t>(i)] = solver.eigenvalues()[i].real();
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("potential coefficients follow the detailed-balance recursion") {
  // Single node: trivially [1].
  {
    PartiteNetwork net({1}, 3.0);
    auto theta = potential_coefficients(build_generator(net, {AggState::center()}));
    REQUIRE(theta.size() == 1);
    CHECK(theta[0] == doctest::Approx(1.0));
  }
  // Two nodes, nu = 1: far end 1, then 2.
  {
    PartiteNetwork net({2}, 1.0);
    auto theta = potential_coefficients(build_generator(net, {AggState::center()}));
    REQUIRE(theta.size() == 2);
    CHECK(theta[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(theta[1] == doctest::Approx(2.0).epsilon(1e-14));
  }
  // Three nodes, nu = 2: (1, 3/2, 3/4) from the far end toward absorption.
  {
    PartiteNetwork net({3}, 2.0);
    auto theta = potential_coefficients(build_generator(net, {AggState::center()}));
    REQUIRE(theta.size() == 3);
    CHECK(theta[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(theta[1] == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(theta[2] == doctest::Approx(0.75).epsilon(1e-14));
  }
  // The weights satisfy theta_x q(x,y) = theta_y q(y,x) along the two-branch
  // line of a bipartite network.
  {
    PartiteNetwork net({2, 3}, 1.7);
    Generator gen = build_generator(net, {AggState::branch(2, 3)});
    auto theta = potential_coefficients(gen);
    const std::vector<AggState> path = {AggState::branch(1, 2), AggState::branch(1, 1),
                                        AggState::center(), AggState::branch(2, 1),
                                        AggState::branch(2, 2)};
    REQUIRE(theta.size() == path.size());
    CHECK(theta[0] == doctest::Approx(1.0));
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      int a = gen.index_of(path[i]);
      int b = gen.index_of(path[i + 1]);
      CHECK(theta[i] * gen.rate(a, b) ==
            doctest::Approx(theta[i + 1] * gen.rate(b, a)).epsilon(1e-12));
    }
  }
  // A killed star with three or more transient branches is not a path.
  {
    PartiteNetwork net({1, 1, 1, 1}, 1.0);
    Generator gen = build_generator(net, {AggState::branch(4, 1)});
    CHECK_THROWS_AS((void)potential_coefficients(gen), StructureError);
  }
  {
    PartiteNetwork net({1, 1, 1}, 1.0);
    Generator gen = build_generator(net, {AggState::center()});
    CHECK_THROWS_AS((void)potential_coefficients(gen), StructureError);
  }
}

TEST_CASE("symmetrization produces the exact symmetric similarity transform") {
  // Two nodes, nu = 1, absorb the center: [[2, -sqrt(2)], [-sqrt(2), 2]].
  {
    PartiteNetwork net({2}, 1.0);
    SymmetrizedChain sym = symmetrize(build_generator(net), AggState::center());
    REQUIRE(sym.transient_states.size() == 2);
    CHECK(sym.transient_states[0] == AggState::branch(1, 1));
    CHECK(sym.transient_states[1] == AggState::branch(1, 2));
    CHECK(sym.matrix(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(sym.matrix(1, 1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(sym.matrix(0, 1) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-14));
    CHECK(sym.matrix(1, 0) == sym.matrix(0, 1));  // exact equality
  }
  // Single node: [1].
  {
    PartiteNetwork net({1}, 0.4);
    SymmetrizedChain sym = symmetrize(build_generator(net), AggState::center());
    REQUIRE(sym.transient_states.size() == 1);
    CHECK(sym.matrix(0, 0) == doctest::Approx(1.0));
  }
  // Exact symmetry and positive weights on a star-shaped killed generator.
  {
    PartiteNetwork net({2, 3, 2}, 2.5);
    SymmetrizedChain sym = symmetrize(build_generator(net), AggState::branch(2, 3));
    const auto n = static_cast<int>(sym.transient_states.size());
    REQUIRE(n == 7);
    for (int i = 0; i < n; ++i) {
      CHECK(sym.theta[static_cast<std::size_t>(i)] > 0.0);
      for (int j = 0; j < n; ++j) CHECK(sym.matrix(i, j) == sym.matrix(j, i));
    }
  }
  CHECK_THROWS_AS(
      (void)symmetrize(build_generator(PartiteNetwork({2}, 1.0)), AggState::branch(2, 1)),
      ValidationError);
}

TEST_CASE("absorption spectrum matches closed forms and a dense eigensolve") {
  // Single node: one Exp(1) transmission.
  {
    PartiteNetwork net({1}, 5.0);
    PhaseType pt = absorption_spectrum(build_generator(net), AggState::center());
    REQUIRE(pt.order() == 1);
    CHECK(pt.rates()[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Two nodes, nu = 1: eigenvalues 2 -/+ sqrt(2); mean = sum of inverses = 2.
  {
    PartiteNetwork net({2}, 1.0);
    Generator gen = build_generator(net);
    PhaseType pt = absorption_spectrum(gen, AggState::center());
    REQUIRE(pt.order() == 2);
    CHECK(pt.rates()[0] == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
    CHECK(pt.rates()[1] == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-12));
    CHECK(pt.mean() == doctest::Approx(2.0).epsilon(1e-12));
    double solve = mean_hitting_time(build_generator(net),
                                     HittingQuery(AggState::branch(1, 2), AggState::center()));
    CHECK(pt.mean() == doctest::Approx(solve).epsilon(1e-12));
  }
  // Sorted, positive, distinct; mean identity; similarity with the dense
  // nonsymmetric eigensolve of -T.
  for (const auto& [sizes, nu] : std::vector<std::pair<std::vector<int>, double>>{
           {{3}, 2.0}, {{4}, 0.8}, {{2, 2}, 3.0}}) {
    PartiteNetwork net(sizes, nu);
    AggState absorb =
        sizes.size() == 1 ? AggState::center() : AggState::branch(2, sizes[1]);
    AggState far = AggState::branch(1, sizes[0]);
    Generator gen = build_generator(net, {absorb});
    PhaseType pt = absorption_spectrum(gen, absorb);
    const auto& rates = pt.rates();
    for (std::size_t i = 0; i + 1 < rates.size(); ++i) {
      CHECK(rates[i] > 0.0);
      CHECK(rates[i + 1] > rates[i]);
    }
    CHECK(pt.mean() ==
          doctest::Approx(mean_hitting_time(gen, HittingQuery(far, absorb))).epsilon(1e-9));
    auto dense = raw_spectrum(gen);
    REQUIRE(dense.size() == rates.size());
    for (std::size_t i = 0; i < rates.size(); ++i)
      CHECK(rates[i] == doctest::Approx(dense[i]).epsilon(1e-9));
  }
}

TEST_CASE("phase-type CDF agrees with transient absorption mass") {
  CHECK(phase_type_cdf(PhaseType({1.0}), 1.0) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
  CHECK(phase_type_cdf(PhaseType({0.3, 4.0}), 0.0) == 0.0);
  CHECK_THROWS_AS((void)phase_type_cdf(PhaseType({1.0}), -0.5), ValidationError);
  CHECK_THROWS_AS((void)phase_type_cdf(PhaseType({1.0, 1.0 + 1e-12}), 1.0), ConditioningError);

  // Two nodes, nu = 1, t = 2: CDF equals the absorbed mass, both against the
  // spectral propagator and against an independent uniformization oracle.
  {
    PartiteNetwork net({2}, 1.0);
    Generator gen = build_generator(net, {AggState::center()});
    PhaseType pt = absorption_spectrum(gen, AggState::center());
    double cdf = phase_type_cdf(pt, 2.0);
    Distribution law = transient_distribution(gen, AggState::branch(1, 2), 2.0);
    CHECK(cdf == doctest::Approx(law.probability(0)).epsilon(1e-10));
    auto oracle = testsupport::uniformized_law(gen, gen.index_of(AggState::branch(1, 2)), 2.0);
    CHECK(cdf == doctest::Approx(oracle[0]).epsilon(1e-10));
  }
  // 20 log-spaced times: CDF vs absorbed mass within 1e-8; CDF monotone in t.
  {
    PartiteNetwork net({3}, 1.5);
    Generator gen = build_generator(net, {AggState::center()});
    PhaseType pt = absorption_spectrum(gen, AggState::center());
    double previous = -1.0;
    for (int i = 0; i < 20; ++i) {
      double t = pt.mean() * std::pow(10.0, -2.0 + 4.0 * i / 19.0);
      double cdf = phase_type_cdf(pt, t);
      CHECK(cdf >= 0.0);
      CHECK(cdf <= 1.0);
      CHECK(cdf >= previous);
      previous = cdf;
      Distribution law = transient_distribution(gen, AggState::branch(1, 3), t);
      CHECK(std::abs(cdf - law.probability(0)) < 1e-8);
    }
  }
}

TEST_CASE("gershgorin discs localise the spectrum") {
  // Two nodes, nu = 100: discs (101, sqrt(200)) and (2, sqrt(200)), disjoint.
  {
    PartiteNetwork net({2}, 100.0);
    SymmetrizedChain sym = symmetrize(build_generator(net), AggState::center());
    auto discs = gershgorin_discs(sym);
    REQUIRE(discs.size() == 2);
    CHECK(discs[0].center == doctest::Approx(101.0).epsilon(1e-14));
    CHECK(discs[0].radius == doctest::Approx(std::sqrt(200.0)).epsilon(1e-14));
    CHECK(discs[1].center == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(discs[1].radius == doctest::Approx(std::sqrt(200.0)).epsilon(1e-14));
    CHECK(discs_disjoint(discs));
    CHECK(disc_separated(discs, 1));
    CHECK(disc_separated(discs, 0));
  }
  // Same shape at nu = 1: the discs overlap.
  {
    PartiteNetwork net({2}, 1.0);
    auto discs = gershgorin_discs(symmetrize(build_generator(net), AggState::center()));
    CHECK_FALSE(discs_disjoint(discs));
    CHECK_FALSE(disc_separated(discs, 1));
    CHECK_THROWS_AS((void)disc_separated(discs, 5), ValidationError);
  }
  // Containment: every eigenvalue lies in the union of the discs.
  for (const auto& [sizes, nu] : std::vector<std::pair<std::vector<int>, double>>{
           {{3}, 2.0}, {{4}, 0.5}, {{2, 3}, 10.0}}) {
    PartiteNetwork net(sizes, nu);
    AggState absorb =
        sizes.size() == 1 ? AggState::center() : AggState::branch(2, sizes[1]);
    Generator gen = build_generator(net, {absorb});
    auto discs = gershgorin_discs(symmetrize(gen, absorb));
    PhaseType pt = absorption_spectrum(gen, absorb);
    for (double a : pt.rates()) {
      bool inside = false;
      for (const auto& d : discs)
        if (std::abs(a - d.center) <= d.radius + 1e-9) inside = true;
      CHECK(inside);
    }
  }
}

TEST_CASE("transient distribution is exact at zero, small, and huge times") {
  PartiteNetwork net({1, 1}, 1.0);
  Generator gen = build_generator(net);

  // t = 0 returns the initial law exactly.
  Distribution at0 = transient_distribution(gen, AggState::center(), 0.0);
  CHECK(at0.probability(0) == doctest::Approx(1.0).epsilon(1e-14));

  // Small t against uniformization, 1e-12.
  Distribution small = transient_distribution(gen, AggState::center(), 0.1);
  auto oracle = testsupport::uniformized_law(gen, 0, 0.1);
  for (std::size_t i = 0; i < small.size(); ++i)
    CHECK(small.probability(i) == doctest::Approx(oracle[i]).epsilon(1e-12));

  // Negative time is rejected.
  CHECK_THROWS_AS((void)transient_distribution(gen, AggState::center(), -1.0), ValidationError);

  // Larger instance against uniformization at moderate t.
  {
    PartiteNetwork big({2, 3}, 2.0);
    Generator bg = build_generator(big);
    Distribution law = transient_distribution(bg, AggState::branch(1, 2), 0.7);
    auto ref = testsupport::uniformized_law(bg, bg.index_of(AggState::branch(1, 2)), 0.7);
    for (std::size_t i = 0; i < law.size(); ++i)
      CHECK(law.probability(i) == doctest::Approx(ref[i]).epsilon(1e-10));
  }

  // Very large t converges to the stationary law (spectral form never decays
  // into a truncated series, so t = 1e6 is exact).
  {
    PartiteNetwork big({2, 2}, 1.0);
    Distribution law =
        transient_distribution(build_generator(big), AggState::branch(1, 2), 1e6);
    Distribution pi = stationary_agg(big);
    CHECK(tv_distance(law, pi) < 1e-10);
  }

  // Propagation is linear in the initial distribution.
  {
    PartiteNetwork big({2, 2}, 1.3);
    Generator bg = build_generator(big);
    auto states = agg_states(big);
    std::vector<double> w(states.size(), 0.0);
    w[1] = 0.3;
    w[3] = 0.7;
    Distribution mixed = transient_distribution(
        bg, Distribution::from_probabilities(states, w), 0.4);
    Distribution a = transient_distribution(bg, states[1], 0.4);
    Distribution b = transient_distribution(bg, states[3], 0.4);
    for (std::size_t i = 0; i < mixed.size(); ++i)
      CHECK(mixed.probability(i) ==
            doctest::Approx(0.3 * a.probability(i) + 0.7 * b.probability(i)).epsilon(1e-12));
  }
}

TEST_CASE("eigenvalue-mean products isolate the slow mode as nu grows") {
  // Single node: the product is exactly [1] for every nu.
  for (double nu : {0.1, 1.0, 100.0}) {
    PartiteNetwork net({1}, nu);
    auto products = eigen_time_products(net, AggState::branch(1, 1), AggState::center());
    REQUIRE(products.size() == 1);
    CHECK(products[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
  // L = 3 at nu = 1e4: slow product within 1e-3 of 1, next product > 1e3.
  {
    PartiteNetwork net({3}, 1e4);
    auto products = eigen_time_products(net, AggState::branch(1, 3), AggState::center());
    REQUIRE(products.size() == 3);
    CHECK(std::abs(products[0] - 1.0) < 1e-3);
    CHECK(products[1] > 1e3);
  }
  // Trend: alpha_1 * E[T] decreases monotonically toward 1 along a nu sweep.
  for (int size : {2, 3, 4}) {
    double previous = std::numeric_limits<double>::infinity();
    for (double nu : {10.0, 100.0, 1000.0, 10000.0}) {
      PartiteNetwork net({size}, nu);
      auto products = eigen_time_products(net, AggState::branch(1, size), AggState::center());
      CHECK(products[0] > 1.0);
      CHECK(products[0] < previous);
      previous = products[0];
    }
    CHECK(previous - 1.0 < 1e-2);
  }
  // Bipartite line: killed cross-branch chain shows the same localisation.
  {
    PartiteNetwork net({3, 2}, 1000.0);
    auto products = eigen_time_products(net, AggState::branch(1, 3), AggState::branch(2, 2));
    REQUIRE(products.size() == 5);
    CHECK(std::abs(products[0] - 1.0) < 2e-2);
    CHECK(products[1] > 100.0);
  }
  // The start state must sit at the far end of the reachable path.
  {
    PartiteNetwork net({1, 1, 1}, 1.0);
    CHECK_THROWS_AS(
        (void)eigen_time_products(net, AggState::center(), AggState::branch(3, 1)),
        StructureError);
  }
}
