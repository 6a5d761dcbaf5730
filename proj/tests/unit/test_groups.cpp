#include <gtest/gtest.h>

#include <random>

#include "metadio/frontend.hpp"
#include "metadio/groups.hpp"
#include "metadio/oracle.hpp"
#include "../support.hpp"

using namespace metadio;

namespace {

Element word(const std::string& w, const GroupSpec& spec) {
  return eval_word(parse_system(w + " = 1\n", spec).equations[0].lhs, {}, spec);
}

}  // namespace

TEST(Groups, BsGeneratorsAndRelation) {
  for (std::int64_t k : {1, 2, 3, 5}) {
    GroupSpec s = GroupSpec::bs(k);
    EXPECT_EQ(word("b^-1 a b", s), word("a^" + std::to_string(k), s)) << k;
  }
  GroupSpec s = GroupSpec::bs(2);
  // b a b^-1 = (1/2, 0)
  auto e = std::get<BsElement>(word("b a b^-1", s));
  EXPECT_EQ(e.u, zk_normalize(1, 1, 2));
  EXPECT_EQ(e.r, 0);
}

TEST(Groups, LamplighterProducts) {
  GroupSpec s = GroupSpec::wreath(0, {2});
  EXPECT_TRUE(is_identity(word("a a", s), s));
  EXPECT_FALSE(is_identity(word("a t a t^-1", s), s));
  EXPECT_EQ(word("t a t^-1 a", s), word("a t a t^-1", s));  // lamps commute
  auto e = std::get<WreathElement>(word("t^3 a", s));
  EXPECT_EQ(e.x, 3);
  EXPECT_EQ(e.p.terms().size(), 1u);
  EXPECT_EQ(e.p.terms().begin()->first, 3);
}

TEST(Groups, PowerMatchesRepeatedProduct) {
  std::mt19937_64 rng(11);
  for (const auto& spec : support::families()) {
    for (int it = 0; it < 50; ++it) {
      Element g = random_element(spec, 3, rng);
      Element acc = identity(spec);
      for (int e = 0; e <= 4; ++e) {
        EXPECT_EQ(power(g, e, spec), acc);
        EXPECT_EQ(power(g, -e, spec), inv(acc, spec));
        acc = mul(acc, g, spec);
      }
    }
  }
}

TEST(Groups, ElementRenderingRoundTrips) {
  std::mt19937_64 rng(12);
  for (const auto& spec : support::families()) {
    for (int it = 0; it < 100; ++it) {
      Element g = random_element(spec, 4, rng);
      EXPECT_EQ(parse_element(render_element(g), spec), g) << render_element(g);
    }
  }
}

TEST(Groups, ElementWordEvaluatesBack) {
  std::mt19937_64 rng(13);
  for (const auto& spec : support::families()) {
    for (int it = 0; it < 100; ++it) {
      Element g = random_element(spec, 3, rng);
      EXPECT_EQ(eval_word(support::element_word(g, spec), {}, spec), g);
    }
  }
}

TEST(Groups, VerifyWitness) {
  auto sys = parse_input("group BS 2\nX^-1 a X = a^4\n");
  EXPECT_TRUE(verify_witness(sys, {{"X", BsElement{zk_integer(0, 2), 2}}}));
  EXPECT_FALSE(verify_witness(sys, {{"X", BsElement{zk_integer(0, 2), 1}}}));
  EXPECT_THROW(verify_witness(sys, {}), UnboundVariable);
}

TEST(Oracle, BallsAreDuplicateFree) {
  for (const auto& spec : support::families()) {
    auto elems = ball_elements(spec, Ball{2});
    std::set<std::string> seen;
    for (const auto& e : elems) EXPECT_TRUE(seen.insert(render_element(e)).second);
    EXPECT_FALSE(elems.empty());
  }
}

TEST(Oracle, FindsSmallSolutions) {
  auto sys = parse_input("group wreath Z^0 x Z_2\nX^2 = t^2\n");
  auto found = brute_force_group(sys, Ball{1});
  EXPECT_FALSE(found.empty());
  for (const auto& a : found) EXPECT_TRUE(verify_witness(sys, a));
  EXPECT_FALSE(group_has_solution_in_ball(parse_input("group wreath Z^0 x Z_2\nX^2 = a\n"), Ball{2}));
}

TEST(Frontend, ParsesHeadersAndComments) {
  auto s = parse_input("# leading comment\n\ngroup wreath Z^1 x Z_2 x Z_3   # mixed\nX a1 = c2 X  # tail\n1 = 1\n");
  EXPECT_EQ(s.spec, GroupSpec::wreath(1, {2, 3}));
  ASSERT_EQ(s.equations.size(), 2u);
  EXPECT_TRUE(s.equations[1].lhs.empty());
  EXPECT_EQ(s.variables, std::vector<std::string>{"X"});
  EXPECT_EQ(parse_input(render_system(s)).equations.size(), 2u);
}

TEST(Frontend, ErrorsCarryLocations) {
  auto at = [](const std::string& text) -> std::pair<std::size_t, std::size_t> {
    try {
      parse_input(text);
    } catch (const ParseError& e) {
      return {e.line, e.column};
    }
    return {0, 0};
  };
  EXPECT_EQ(at("group BS 0\nX = a\n"), (std::pair<std::size_t, std::size_t>{1, 10}));
  EXPECT_EQ(at("group BS 2\nX = c\n").first, 2u);
  EXPECT_EQ(at("group BS 2\nX a\n").first, 2u);
  EXPECT_EQ(at("group BS 2\nX^0 = a\n"), (std::pair<std::size_t, std::size_t>{2, 3}));
  EXPECT_EQ(at("X = a\n").first, 1u);
  EXPECT_EQ(at("group wreath Z^1 x Z_1\n").first, 1u);
  EXPECT_EQ(at("group BS 2\nX = a = b\n").first, 2u);
}

TEST(Frontend, CyclicAliasOnlyForCyclicA) {
  EXPECT_NO_THROW(parse_input("group wreath Z^0 x Z_2\nX = a\n"));
  EXPECT_NO_THROW(parse_input("group wreath Z^1\nX = a\n"));
  EXPECT_THROW(parse_input("group wreath Z^1 x Z_2\nX = a\n"), ParseError);
}
