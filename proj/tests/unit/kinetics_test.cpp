#include "crn/kinetics.hpp"

#include "crn/errors.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace crn {
namespace {

using testing::corpus;

ReactionNetwork net_of(const std::string& text) { return parse_network(text).network; }

State st(std::initializer_list<int> v) {
  State x(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (int a : v) x[i++] = a;
  return x;
}

// x (x-1) ... (x-y+1) by integer arithmetic.
double falling(long x, int y) {
  long p = 1;
  for (int j = 0; j < y; ++j) p *= std::max(0L, x - j);
  return static_cast<double>(p);
}

TEST(Theta, Values) {
  const ThetaSpec t{2.0, 1.5, {{1, 0.5}, {3, 7.0}}};
  EXPECT_EQ(t(0), 0.0);
  EXPECT_EQ(t(-2), 0.0);
  EXPECT_EQ(t(1), 0.5);
  EXPECT_DOUBLE_EQ(t(2), 2.0 * std::pow(2.0, 1.5));
  EXPECT_EQ(t(3), 7.0);
  EXPECT_DOUBLE_EQ(t(4), 16.0);
}

TEST(Theta, LogFactorialMatchesDirectSum) {
  const ThetaSpec t{2.0, 1.5, {{1, 0.5}, {3, 7.0}}};
  for (long x : {0L, 1L, 2L, 3L, 10L, 1000L, 100000L}) {
    double direct = 0.0;
    for (long j = 1; j <= x; ++j) direct += std::log(t(j));
    EXPECT_NEAR(t.log_factorial(x), direct, 1e-12 * std::max(1.0, std::abs(direct))) << x;
    EXPECT_NEAR(t.log_factorial_span(0, x), direct, 1e-12 * std::max(1.0, std::abs(direct)));
  }
}

TEST(Intensity, Examples) {
  const auto net = net_of("species: A B\n2 A + B -> 0 , 3.0");
  const KineticsSpec ma = KineticsSpec::mass_action(2);
  EXPECT_EQ(intensity(net, ma, 0, st({5, 2})), 120.0);
  EXPECT_EQ(intensity(net, ma, 0, st({1, 7})), 0.0);

  const auto bd = net_of("species: A\nA -> 0 , 1");
  KineticsSpec sq{{ThetaSpec::power(1.0, 2.0)}};
  EXPECT_EQ(intensity(bd, sq, 0, st({3})), 9.0);
  sq.thetas[0].overrides[1] = 0.5;
  EXPECT_EQ(intensity(bd, sq, 0, st({1})), 0.5);
}

TEST(Intensity, ZeroOutsideLattice) {
  const auto net = net_of("species: A B\nA + B -> 0 , 2.0");
  const KineticsSpec ma = KineticsSpec::mass_action(2);
  EXPECT_EQ(intensity(net, ma, 0, st({0, 4})), 0.0);
  EXPECT_EQ(intensity(net, ma, 0, st({-1, 4})), 0.0);
}

// theta(x) = x written out as explicit overrides is the same kinetics as
// the built-in mass action; both equal kappa x!/(x-y)! over the lattice.
TEST(Intensity, MassActionEqualsGeneralThetaIdentity) {
  const auto net = corpus("binding.crn").network;
  const KineticsSpec ma = KineticsSpec::mass_action(net.num_species());
  KineticsSpec general;
  for (int i = 0; i < net.num_species(); ++i) {
    ThetaSpec t = ThetaSpec::power(1.0, 1.0);
    for (long j = 1; j <= 12; ++j) t.overrides[j] = static_cast<double>(j);
    general.thetas.push_back(t);
  }
  ASSERT_EQ(general.mode(), KineticsSpec::Mode::general);
  for (int a = 0; a <= 15; ++a) {
    for (int b = 0; b <= 15; ++b) {
      for (int c = 0; c <= 3; ++c) {
        const State x = st({a, b, c});
        for (int k = 0; k < net.num_reactions(); ++k) {
          const auto& y = net.reaction(k).source;
          const double expected = net.reaction(k).rate * falling(a, y[0]) * falling(b, y[1]) *
                                  falling(c, y[2]);
          EXPECT_DOUBLE_EQ(intensity(net, ma, k, x), expected);
          EXPECT_DOUBLE_EQ(intensity(net, general, k, x), expected);
        }
      }
    }
  }
}

TEST(ScaledIntensity, Examples) {
  const auto net = net_of("species: S1 S2\nS1 + S2 -> 2 S2 , 1.0\n0 -> S1 , 0.5");
  const KineticsSpec ma = KineticsSpec::mass_action(2);
  const ScalingConfig cfg = ScalingConfig::classical(10.0, 2);
  EXPECT_DOUBLE_EQ(scaled_intensity(net, ma, cfg, 0, st({4, 4})), 1.6);
  EXPECT_DOUBLE_EQ(scaled_intensity(net, ma, cfg, 1, st({4, 4})), 5.0);

  const auto mono = net_of("species: A\nA -> 0 , 2.5");
  EXPECT_EQ(scaled_intensity(mono, KineticsSpec::mass_action(1),
                             ScalingConfig::classical(123.0, 1), 0, st({7})),
            intensity(mono, KineticsSpec::mass_action(1), 0, st({7})));

  const KineticsSpec sq{{ThetaSpec::power(1.0, 2.0)}};
  const ScalingConfig mod = ScalingConfig::modified(10.0, Vector::Constant(1, 2.0),
                                                    Vector::Ones(1));
  // d.y - 1 = 1 for A -> 0.
  EXPECT_DOUBLE_EQ(scaled_intensity(mono, sq, mod, 0, st({5})), 2.5 * 25.0 / 10.0);
}

TEST(ScaledIntensity, UnitVolumeIsIdentity) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> count(0, 20);
  const auto net = corpus("binding.crn").network;
  const KineticsSpec ma = KineticsSpec::mass_action(3);
  const ScalingConfig cfg = ScalingConfig::classical(1.0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const State x = st({count(rng), count(rng), count(rng)});
    for (int k = 0; k < net.num_reactions(); ++k) {
      EXPECT_EQ(scaled_intensity(net, ma, cfg, k, x), intensity(net, ma, k, x));
    }
  }
}

// lambda^V(floor(V x~)) / V -> kappa x~^y with error O(1/V).
TEST(ScaledIntensity, ClassicalLawOfLargeNumbers) {
  const auto net = net_of("species: S1 S2\nS1 + S2 -> 2 S2 , 1.7\n2 S1 -> S2 , 0.3");
  const KineticsSpec ma = KineticsSpec::mass_action(2);
  const Vector x_tilde = (Vector(2) << 0.37, 1.91).finished();
  for (int k = 0; k < net.num_reactions(); ++k) {
    const double limit = deterministic_rate(net, k, x_tilde);
    for (double V : {1e2, 1e3, 1e4}) {
      const State x = (V * x_tilde).array().floor().cast<int>().matrix();
      const double scaled =
          scaled_intensity(net, ma, ScalingConfig::classical(V, 2), k, x) / V;
      EXPECT_LE(std::abs(scaled - limit) / limit, 10.0 / V) << "k=" << k << " V=" << V;
    }
  }
}

TEST(ScalingConfig, Validation) {
  EXPECT_THROW(ScalingConfig::classical(0.0, 1).validate(1), DomainError);
  EXPECT_THROW(ScalingConfig::modified(2.0, Vector::Constant(1, -1.0), Vector::Ones(1))
                   .validate(1),
               DomainError);
  EXPECT_THROW(ScalingConfig::classical(2.0, 2).validate(1), DomainError);
  EXPECT_NO_THROW(ScalingConfig::modified(2.0, Vector::Constant(1, 0.5), Vector::Ones(1))
                      .validate(1));
}

TEST(DeterministicRate, Examples) {
  const auto net = net_of("species: A B\n2 A + B -> 0 , 3.0\n0 -> A , 4.0");
  const Vector x = (Vector(2) << 2.0, 0.5).finished();
  EXPECT_DOUBLE_EQ(deterministic_rate(net, 0, x), 6.0);
  EXPECT_DOUBLE_EQ(deterministic_rate(net, 1, Vector::Zero(2)), 4.0);
  const Eigen::VectorXf xf = x.cast<float>();
  EXPECT_FLOAT_EQ(deterministic_rate(net, 0, xf), 6.0f);
}

TEST(GeneralizedOdeRate, Examples) {
  const auto net = net_of("species: A B\nA + B -> 0 , 2.0");
  const Vector d = (Vector(2) << 2.0, 0.5).finished();
  const Vector A = (Vector(2) << 3.0, 1.0).finished();
  const Vector x = (Vector(2) << 2.0, 4.0).finished();
  EXPECT_DOUBLE_EQ(generalized_ode_rate(net, 0, x, d, A), 2.0 * 12.0 * 2.0);
  EXPECT_DOUBLE_EQ(generalized_ode_rate(net, 0, x, Vector::Ones(2), Vector::Ones(2)),
                   deterministic_rate(net, 0, x));
  EXPECT_THROW(generalized_ode_rate(net, 0, (Vector(2) << 1.0, -1.0).finished(), d, A),
               DomainError);
}

}  // namespace
}  // namespace crn
