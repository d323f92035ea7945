#include "crn/dsl.hpp"

#include "crn/errors.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

namespace crn {
namespace {

using testing::corpus;
using testing::corpus_files;

ParseError parse_error(const std::string& text) {
  try {
    parse_network(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no parse error for:\n" << text;
  return ParseError("none", 0, 0);
}

TEST(ParseNetwork, BirthDeath) {
  const auto parsed = parse_network("species: A\n0 -> A , 1.0\nA -> 0 , 1.0");
  const auto& net = parsed.network;
  EXPECT_EQ(net.num_species(), 1);
  EXPECT_EQ(net.num_reactions(), 2);
  ASSERT_EQ(net.num_complexes(), 2);
  EXPECT_EQ(net.complex(0), IntVector::Zero(1));
  EXPECT_EQ(net.complex(1), IntVector::Ones(1));
  EXPECT_TRUE(parsed.kinetics.is_mass_action());
}

TEST(ParseNetwork, CoefficientsFollowDeclarationOrder) {
  const auto net = parse_network("species: S1 S2\nS1 + S2 -> 2 S2 , 1.0").network;
  EXPECT_EQ(net.reaction(0).source, (IntVector(2) << 1, 1).finished());
  EXPECT_EQ(net.reaction(0).product, (IntVector(2) << 0, 2).finished());
}

TEST(ParseNetwork, ComplexesAreDeduplicated) {
  const auto net = parse_network("species: A B\nA -> B , 1\nB -> A , 2\n2 A -> B , 3").network;
  EXPECT_EQ(net.num_complexes(), 3);
  EXPECT_EQ(net.source_index(1), net.product_index(0));
  EXPECT_EQ(net.product_index(2), net.source_index(1));
}

TEST(ParseNetwork, ReversibleSugarAndComments) {
  const auto parsed = parse_network(
      "# header\n\nspecies: A B   # two species\nA <-> 2 B , 0.5 , 1e-3 # pair\n");
  ASSERT_EQ(parsed.network.num_reactions(), 2);
  EXPECT_EQ(parsed.network.reaction(0).rate, 0.5);
  EXPECT_EQ(parsed.network.reaction(1).rate, 1e-3);
  EXPECT_EQ(parsed.network.reaction(1).source, (IntVector(2) << 0, 2).finished());
}

TEST(ParseNetwork, RepeatedSpeciesInComplexAccumulates) {
  const auto net = parse_network("species: A\nA + A -> 0 , 1").network;
  EXPECT_EQ(net.reaction(0).source[0], 2);
}

TEST(ParseNetwork, ThetaLine) {
  const auto parsed = parse_network(
      "species: A B\n0 <-> A , 1 , 1\ntheta A power A=2.5 d=-1 overrides 1=0.5 3=0\n"
      "B -> 0 , 1\n");
  const ThetaSpec& theta = parsed.kinetics.thetas[0];
  EXPECT_EQ(theta.tail_A, 2.5);
  EXPECT_EQ(theta.tail_d, -1.0);
  EXPECT_EQ(theta.overrides.at(1), 0.5);
  EXPECT_EQ(theta.overrides.at(3), 0.0);
  EXPECT_TRUE(parsed.kinetics.thetas[1].is_mass_action());
  EXPECT_EQ(parsed.kinetics.mode(), KineticsSpec::Mode::general);
}

TEST(ParseNetwork, SelfLoopRejected) {
  const ParseError e = parse_error("species: A\nA -> A , 1.0");
  EXPECT_EQ(e.line(), 2);
  EXPECT_NE(e.detail().find("self-loop"), std::string::npos);
}

TEST(ParseNetwork, ErrorsCarryLocation) {
  {
    const ParseError e = parse_error("species: A\nA -> B , 1");
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 6);
    EXPECT_NE(e.detail().find("unknown species"), std::string::npos);
  }
  {
    const ParseError e = parse_error("species: A\nA -> 0 , 1\nA -> 0 , 2");
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(e.detail().find("duplicate"), std::string::npos);
  }
  {
    const ParseError e = parse_error("species: A\nA -> 0 , 0");
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 10);
  }
  {
    const ParseError e = parse_error("species: A\nA -> 0 , -2");
    EXPECT_NE(e.detail().find("positive"), std::string::npos);
  }
  {
    const ParseError e = parse_error("species: A\nA -> 0 , 1\ntheta A power A=1 d=2 overrides 0=1");
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 33);
    EXPECT_NE(e.detail().find("x <= 0"), std::string::npos);
  }
  {
    const ParseError e = parse_error("species: A\nA -> 0 1");
    EXPECT_EQ(e.column(), 8);
  }
  {
    const ParseError e = parse_error("# nothing\nA -> 0 , 1");
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 1);
  }
  EXPECT_NE(parse_error("species: A\n").detail().find("no reactions"), std::string::npos);
  EXPECT_NE(parse_error("species: A\nA -> 0 , 1\ntheta A power A=0 d=2").detail().find("A must"),
            std::string::npos);
  EXPECT_NE(parse_error("species: A\nA -> 0 , 1\ntheta A power A=1 d=0").detail().find("d must"),
            std::string::npos);
  EXPECT_NE(parse_error("species: A A\nA -> 0 , 1").detail().find("duplicate species"),
            std::string::npos);
  EXPECT_NE(parse_error("species: A\nA -> 0 , 1\nspecies: B").detail().find("only one"),
            std::string::npos);
  EXPECT_NE(parse_error("species: A\nA -> 0 , 1 ; 2").detail().find("unexpected character"),
            std::string::npos);
}

TEST(LoadNetwork, MissingFileIsParseError) {
  EXPECT_THROW(load_network("/nonexistent/missing.crn"), ParseError);
}

TEST(SerializeNetwork, BirthDeathHasTwoReactionLines) {
  const auto parsed = corpus("birthdeath.crn");
  const std::string text = serialize_network(parsed.network, parsed.kinetics);
  EXPECT_EQ(text, "species: A\n0 -> A , 1\nA -> 0 , 1\n");
}

TEST(SerializeNetwork, EmitsOverrideClause) {
  const auto parsed = parse_network(
      "species: A\n0 <-> A , 1 , 0.1\ntheta A power A=1 d=2 overrides 1=0.5 2=4.25");
  const std::string text = serialize_network(parsed.network, parsed.kinetics);
  EXPECT_NE(text.find("theta A power A=1 d=2 overrides 1=0.5 2=4.25\n"), std::string::npos);
  EXPECT_NE(text.find("A -> 0 , 0.1\n"), std::string::npos);
}

TEST(SerializeNetwork, CorpusRoundTripAndFixpoint) {
  for (const auto& file : corpus_files()) {
    SCOPED_TRACE(file);
    const auto parsed = corpus(file);
    const std::string once = serialize_network(parsed.network, parsed.kinetics);
    const auto again = parse_network(once);
    EXPECT_EQ(again.network, parsed.network);
    EXPECT_EQ(again.kinetics, parsed.kinetics);
    EXPECT_EQ(serialize_network(again.network, again.kinetics), once);
  }
}

// Random networks with awkward rates survive a round trip exactly.
TEST(SerializeNetwork, RandomRoundTripProperty) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coeff(0, 3), species_count(1, 4);
  std::uniform_real_distribution<double> log_rate(-20.0, 20.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = species_count(rng);
    std::vector<std::string> names;
    for (int i = 0; i < m; ++i) names.push_back("X" + std::to_string(i));
    std::vector<Reaction> reactions;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Reaction r{IntVector(m), IntVector(m), std::exp(log_rate(rng))};
      for (int i = 0; i < m; ++i) {
        r.source[i] = coeff(rng);
        r.product[i] = coeff(rng);
      }
      if (r.source == r.product) continue;
      bool dup = false;
      for (const auto& other : reactions) {
        dup = dup || (other.source == r.source && other.product == r.product);
      }
      if (!dup) reactions.push_back(r);
    }
    if (reactions.empty()) continue;
    KineticsSpec kin = KineticsSpec::mass_action(m);
    if (trial % 3 == 0) {
      kin.thetas[0] = ThetaSpec{std::exp(log_rate(rng)), 1.0 / 3.0, {{2, 0.1}, {5, 1e-300}}};
    }
    const ReactionNetwork net(names, reactions);
    const auto parsed = parse_network(serialize_network(net, kin));
    ASSERT_EQ(parsed.network, net);
    ASSERT_EQ(parsed.kinetics, kin);
  }
}

TEST(FormatReal, ShortestRoundTrip) {
  EXPECT_EQ(format_real(1.0), "1");
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(1e-300), "1e-300");
}

}  // namespace
}  // namespace crn
