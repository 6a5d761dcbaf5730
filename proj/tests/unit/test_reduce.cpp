#include <gtest/gtest.h>

#include "../support.hpp"
#include "metadio/frontend.hpp"
#include "metadio/reduce.hpp"

using namespace metadio;

namespace {

EquationSystem parse(const std::string& text) { return parse_input(text); }

}  // namespace

TEST(Reduce, IdentityEquation) {
  auto red = reduce_bs(parse("group BS 2\nX = 1\n"));
  ASSERT_EQ(red.linear.size(), 1u);
  EXPECT_EQ(red.linear[0], AffineForm::variable("r.X"));
  ASSERT_EQ(red.components.size(), 1u);
  ASSERT_EQ(red.components[0].rows.size(), 1u);
  const LinRow& row = red.components[0].rows[0];
  EXPECT_TRUE(row.constant.is_zero());
  ASSERT_EQ(row.coeffs.size(), 1u);
  EXPECT_EQ(row.coeffs.at("Z.X"), ExpSum::constant(Domain::kadic(2), 1));
}

TEST(Reduce, ConjugationCancelsTheUnknown) {
  // X^-1 a X = a^3 collapses to 2^{r} - 3 = 0
  auto red = reduce_bs(parse("group BS 2\nX^-1 a X = a^3\n"));
  EXPECT_TRUE(red.linear.empty());
  ASSERT_EQ(red.components[0].rows.size(), 1u);
  const LinRow& row = red.components[0].rows[0];
  EXPECT_FALSE(row.has_unknowns());
  Domain d = Domain::kadic(2);
  EXPECT_EQ(row.constant, ExpSum::monomial(d, 1, AffineForm::variable("r.X")) - ExpSum::constant(d, 3));
}

TEST(Reduce, DefiningRelationIsTrivial) {
  for (std::int64_t k : {2, 3, 5}) {
    auto red = reduce_bs(parse("group BS " + std::to_string(k) + "\nb^-1 a b = a^" + std::to_string(k) + "\n"));
    EXPECT_TRUE(red.linear.empty());
    EXPECT_TRUE(red.components[0].rows.empty());
  }
}

TEST(Reduce, WreathHasOneSystemPerComponent) {
  auto red = reduce_wreath(parse("group wreath Z^2\nX a1 = a2 X\n"));
  EXPECT_EQ(red.components.size(), 2u);
  auto triv = reduce_wreath(parse("group wreath Z^0 x Z_2\n1 = 1\n"));
  EXPECT_TRUE(triv.linear.empty());
  EXPECT_TRUE(triv.components[0].rows.empty());
}

TEST(Reduce, LamplighterCommutation) {
  // X a = a X:  (t^{x} - 1) * 1 = 0 over Z_2 after the P.X terms cancel
  auto red = reduce_wreath(parse("group wreath Z^0 x Z_2\nX a = a X\n"));
  ASSERT_EQ(red.components[0].rows.size(), 1u);
  const LinRow& row = red.components[0].rows[0];
  EXPECT_FALSE(row.has_unknowns());
  Domain d = Domain::laurent(2);
  EXPECT_EQ(row.constant, ExpSum::monomial(d, 1, AffineForm::variable("x.X")) + ExpSum::constant(d, 1));
}

TEST(Reduce, SoundnessOnRandomSystems) {
  std::mt19937_64 rng(11);
  for (const auto& spec : support::families()) {
    for (int it = 0; it < 60; ++it) {
      Assignment planted;
      auto sys = support::random_system(spec, 2, 2, rng, it % 2 ? &planted : nullptr);
      auto red = reduce(sys);
      for (int s = 0; s < 40; ++s) {
        Assignment a;
        for (const auto& x : sys.variables) a[x] = random_element(spec, 3, rng);
        if (s == 0 && !planted.empty()) a = planted;
        bool g = verify_witness(sys, a);
        bool r = reduced_satisfied(red, coordinates(red, a));
        ASSERT_EQ(g, r) << render_system(sys) << render_reduced(red);
      }
    }
  }
}

TEST(Reduce, TrivialRingHasNoComponents) {
  auto red = reduce_wreath(parse("group wreath Z^0\nX t = t X\n"));
  EXPECT_TRUE(red.components.empty());
}

TEST(Triangularize, SingleRowIsOneBranch) {
  auto red = reduce_bs(parse("group BS 2\nX^2 = a^3\n"));
  auto tris = triangularize(red.components[0]);
  ASSERT_EQ(tris.size(), 1u);
  EXPECT_TRUE(is_triangular(tris[0]));
  // coefficient 1 + 2^-r; its zero branch leaves -3*2^(-2r) = 0 and dies
  EXPECT_EQ(tris[0].pivots.size(), 1u);
}

TEST(Triangularize, ConstantCoefficientsEliminateOnce) {
  Domain d = Domain::kadic(2);
  ComponentSystem sys{d, 0, {}};
  LinRow r1, r2;
  r1.constant = ExpSum::constant(d, -3);
  r1.add("U", ExpSum::constant(d, 1));
  r2.constant = ExpSum::constant(d, -3);
  r2.add("U", ExpSum::constant(d, 1));
  sys.rows = {r1, r2};
  auto tris = triangularize(sys);
  ASSERT_EQ(tris.size(), 1u);
  EXPECT_EQ(tris[0].pivots.size(), 1u);
  EXPECT_TRUE(tris[0].residuals.empty());
}

TEST(Triangularize, DifferenceCoefficientSplits) {
  Domain d = Domain::kadic(2);
  AffineForm r = AffineForm::variable("r"), s = AffineForm::variable("s");
  ComponentSystem sys{d, 0, {}};
  LinRow row;
  row.add("U", ExpSum::monomial(d, 1, r) - ExpSum::monomial(d, 1, s));
  row.constant = ExpSum::constant(d, -1);
  sys.rows = {row};
  auto tris = triangularize(sys);
  ASSERT_EQ(tris.size(), 1u);
  bool zero = false, nonzero = false;
  for (const auto& t : tris) {
    if (t.pivots.empty()) {
      zero = true;
      ASSERT_EQ(t.residuals.size(), 1u);
    } else {
      nonzero = true;
      ASSERT_EQ(t.nonzero.size(), 1u);
    }
  }
  // the zero branch also carries the dead row -1 = 0 and is dropped
  EXPECT_FALSE(zero);
  EXPECT_TRUE(nonzero);
}

// Union of branch solution sets equals the input solution set, checked on a
// grid of exponent values and unknown values.
TEST(Triangularize, PreservesSolutionsOnSmallGrid) {
  std::mt19937_64 rng(5);
  Domain d = Domain::kadic(2);
  std::uniform_int_distribution<int> cd(-2, 2), ed(0, 1);
  const std::vector<std::string> exps{"r", "s"}, unknowns{"U", "V"};
  auto rand_sum = [&]() {
    ExpSum e(d);
    int terms = ed(rng) + 1;
    for (int i = 0; i < terms; ++i) {
      AffineForm f(Int(cd(rng) + 0));
      if (ed(rng)) f.add(exps[static_cast<std::size_t>(ed(rng))], 1);
      e.add_term(cd(rng), f);
    }
    return e;
  };
  for (int it = 0; it < 150; ++it) {
    ComponentSystem sys{d, 0, {}};
    for (int i = 0; i < 2; ++i) {
      LinRow row;
      for (const auto& u : unknowns)
        if (ed(rng)) row.add(u, rand_sum());
      row.constant = rand_sum();
      sys.rows.push_back(row);
    }
    auto tris = triangularize(sys);
    for (const auto& t : tris) ASSERT_TRUE(is_triangular(t));
    for (int rv = 0; rv <= 3; ++rv)
      for (int sv = 0; sv <= 3; ++sv)
        for (int uz = -3; uz <= 3; ++uz)
          for (int vz = -3; vz <= 3; ++vz) {
            Coordinates c;
            c.ints = {{"r", rv}, {"s", sv}};
            c.zk = {{"U", zk_normalize(uz, 1, 2)}, {"V", zk_integer(vz, 2)}};
            bool orig = true;
            for (const auto& row : sys.rows) orig = orig && row_satisfied(row, d, 0, c);
            bool any = false;
            for (const auto& t : tris) {
              bool ok = true;
              for (const auto& p : t.pivots) ok = ok && row_satisfied(p.row, d, 0, c);
              for (const auto& r : t.residuals) ok = ok && zk_is_zero(r.evaluate_kadic(c.ints));
              for (const auto& r : t.nonzero) ok = ok && !zk_is_zero(r.evaluate_kadic(c.ints));
              any = any || ok;
            }
            ASSERT_EQ(orig, any);
          }
  }
}

TEST(SignSplit, ClearsNegatedExponents) {
  Domain d = Domain::kadic(3);
  auto y = [](const char* n) { return AffineForm::variable(n); };
  ExpSum e = ExpSum::monomial(d, 1, y("y1")) - ExpSum::monomial(d, 1, y("y2")) + ExpSum::monomial(d, 1, y("y3")) +
             ExpSum::constant(d, 5);
  auto branches = sign_split({e}, {"y1"});
  ASSERT_EQ(branches.size(), 2u);
  ExpSum expect = ExpSum::constant(d, 1) - ExpSum::monomial(d, 1, y("y1") + y("y2")) +
                  ExpSum::monomial(d, 1, y("y1") + y("y3")) + ExpSum::monomial(d, 5, y("y1"));
  EXPECT_TRUE(branches[0].negated.empty());
  EXPECT_EQ(branches[0].equations[0], e);
  EXPECT_EQ(branches[1].negated, std::set<std::string>{"y1"});
  EXPECT_EQ(branches[1].equations[0], expect);
}

TEST(SignSplit, TriSystemBranchCount) {
  auto red = reduce_bs(parse("group BS 2\nX^-1 a X = a^3\n"));
  auto tris = triangularize(red.components[0]);
  ASSERT_EQ(tris.size(), 1u);
  auto split = sign_split(tris[0]);
  EXPECT_EQ(split.size(), 2u);
  auto again = sign_split(split[1]);
  EXPECT_EQ(again.size(), 1u);
}
