#include <gtest/gtest.h>

#include <random>

#include "metadio/expsolve.hpp"
#include "metadio/oracle.hpp"

using namespace metadio;

namespace {

AffineForm v(const char* n) { return AffineForm::variable(n); }

// Integer points of the box lying in some system of the disjunction.
std::set<IntAssignment> disjunction_points(const Disjunction& d, const std::vector<std::string>& vars, const Box& box) {
  std::set<IntAssignment> out;
  for_each_point(vars, box, {}, [&](const IntAssignment& p) {
    for (const auto& sys : d) {
      bool ok = true;
      for (const auto& f : sys) ok = ok && f.evaluate(p) == 0;
      if (ok) {
        out.insert(p);
        return;
      }
    }
  });
  return out;
}

std::vector<std::string> names(const std::set<std::string>& s) { return {s.begin(), s.end()}; }

}  // namespace

TEST(DeltaBound, ClosedFormExamples) {
  EXPECT_EQ(delta_bound({1, -1, 1, -1, -6}, 2), 4);  // floor(log2 9) + 1 with terms +-1, +-1 and C = -6
  EXPECT_EQ(delta_bound({1}, 2), 2);
  EXPECT_EQ(delta_bound({4, 5}, 10), 2);
}

TEST(DeltaBound, DominantTermWins) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> cd(-10, 10), ed(0, 6);
  for (int it = 0; it < 2000; ++it) {
    std::int64_t k = 2 + it % 2;
    std::vector<Int> cs;
    int n = 2 + it % 3;
    for (int j = 0; j < n; ++j) {
      int c = 0;
      while (c == 0) c = cd(rng);
      cs.push_back(c);
    }
    Int C = cd(rng) * 3;
    std::vector<Int> all = cs;
    all.push_back(C);
    std::int64_t delta = delta_bound(all, k);
    // y_0 exceeds every other exponent by delta + 1
    std::vector<std::int64_t> ys;
    std::int64_t mx = 0;
    for (int j = 1; j < n; ++j) {
      ys.push_back(ed(rng));
      mx = std::max(mx, ys.back());
    }
    Int kk = k;
    Int dom = int_abs(cs[0]) * int_pow(kk, static_cast<std::uint64_t>(mx + delta + 1));
    Int rest = int_abs(C);
    for (int j = 1; j < n; ++j) rest += int_abs(cs[static_cast<std::size_t>(j)]) * int_pow(kk, static_cast<std::uint64_t>(ys[static_cast<std::size_t>(j - 1)]));
    EXPECT_GT(dom, rest);
  }
}

TEST(Semenov, EqualPowers) {
  Domain d = Domain::kadic(2);
  SemenovSystem s{2, {ExpSum::monomial(d, 1, v("y1")) - ExpSum::monomial(d, 1, v("y2"))}, {}};
  auto dis = semenov_solve(s);
  ASSERT_EQ(dis.size(), 1u);
  ASSERT_EQ(dis[0].size(), 1u);
  EXPECT_EQ(dis[0][0], (v("y1") - v("y2")).normalized_equation());
}

TEST(Semenov, TwoPowersMakeSix) {
  Domain d = Domain::kadic(2);
  SemenovSystem s{2, {ExpSum::monomial(d, 1, v("y1")) + ExpSum::monomial(d, 1, v("y2")) - ExpSum::constant(d, 6)}, {}};
  auto dis = semenov_solve(s);
  auto pts = disjunction_points(dis, {"y1", "y2"}, {-6, 6});
  std::set<IntAssignment> expect{{{"y1", 1}, {"y2", 2}}, {{"y1", 2}, {"y2", 1}}};
  EXPECT_EQ(pts, expect);
}

TEST(Semenov, NoPowerOfTwoIsThree) {
  Domain d = Domain::kadic(2);
  SemenovSystem s{2, {ExpSum::monomial(d, 1, v("y")) - ExpSum::constant(d, 3)}, {}};
  EXPECT_TRUE(semenov_solve(s).empty());
}

TEST(Semenov, NegativeExponents) {
  // 2^y = 1/4 has the single solution y = -2
  Domain d = Domain::kadic(2);
  AffineForm m2(Int(-2));
  SemenovSystem s{2, {ExpSum::monomial(d, 1, v("y")) - ExpSum::monomial(d, 1, m2)}, {}};
  auto pts = disjunction_points(semenov_solve(s), {"y"}, {-8, 8});
  EXPECT_EQ(pts, (std::set<IntAssignment>{{{"y", -2}}}));
}

TEST(Semenov, NaturalFlagRestrictsOnlyThroughTheBox) {
  Domain d = Domain::kadic(3);
  SemenovSystem s{3, {ExpSum::monomial(d, 3, v("y")) - ExpSum::constant(d, 1)}, {"y"}};
  auto brute = brute_force_exp(s, {-4, 4});
  EXPECT_TRUE(brute.empty());
  SemenovSystem z{3, s.equations, {}};
  EXPECT_EQ(brute_force_exp(z, {-4, 4}).size(), 1u);
}

TEST(Semenov, MatchesBruteForceOnRandomEquations) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> bd(-5, 5), cd(-20, 20), nv(1, 3), nt(1, 3), coin(0, 2);
  const std::vector<std::string> all{"y1", "y2", "y3"};
  for (int it = 0; it < 120; ++it) {
    std::int64_t k = 2 + it % 2;
    Domain d = Domain::kadic(k);
    int vars = nv(rng);
    ExpSum e = ExpSum::constant(d, cd(rng));
    int terms = nt(rng);
    for (int j = 0; j < terms; ++j) {
      int b = 0;
      while (b == 0) b = bd(rng);
      AffineForm f;
      // mostly single variables, sometimes sums
      f.add(all[static_cast<std::size_t>(j % vars)], 1);
      if (coin(rng) == 0 && vars > 1) f.add(all[static_cast<std::size_t>((j + 1) % vars)], 1);
      e.add_term(b, f);
    }
    SemenovSystem s{k, {e}, {}};
    Box box{-8, 12};
    auto brute = brute_force_exp(s, box);
    std::set<IntAssignment> expect(brute.begin(), brute.end());
    auto got = disjunction_points(semenov_solve(s), names(s.variables()), box);
    ASSERT_EQ(got, expect) << e.render();
  }
}

TEST(Grouping, WorkedZ5Example) {
  Domain d = Domain::laurent(5);
  auto f = [](int c, std::initializer_list<std::pair<const char*, int>> vs) {
    AffineForm a{Int(c)};
    for (auto [n, k] : vs) a.add(n, k);
    return a;
  };
  ExpSum e = ExpSum::monomial(d, 3, f(3, {{"x1", -1}, {"x2", 1}})) + ExpSum::monomial(d, 4, f(-2, {{"x1", 1}})) +
             ExpSum::monomial(d, 2, f(-2, {{"x3", 1}})) + ExpSum::constant(d, 1);
  auto dis = grouping_solve({e});
  LinearSystem want{f(3, {{"x1", -1}, {"x2", 1}}) - f(-2, {{"x3", 1}}), f(-2, {{"x1", 1}})};
  auto canon = *canonical_system(want);
  EXPECT_NE(std::find(dis.begin(), dis.end(), canon), dis.end());
}

TEST(Grouping, SmallExamples) {
  Domain z = Domain::laurent(0), z2 = Domain::laurent(2);
  auto dis = grouping_solve({ExpSum::monomial(z, 1, v("x")) - ExpSum::monomial(z, 1, v("y"))});
  ASSERT_EQ(dis.size(), 1u);
  EXPECT_EQ(dis[0], LinearSystem{(v("x") - v("y")).normalized_equation()});
  auto lamp = grouping_solve({ExpSum::monomial(z2, 1, v("x")) + ExpSum::constant(z2, 1)});
  ASSERT_EQ(lamp.size(), 1u);
  EXPECT_EQ(lamp[0], LinearSystem{v("x")});
}

TEST(Grouping, MatchesBruteForce) {
  std::mt19937_64 rng(23);
  const std::vector<std::int64_t> moduli{2, 3, 5, 6, 0};
  const std::vector<std::string> xs{"x1", "x2", "x3"};
  std::uniform_int_distribution<int> cd(-4, 4), ed(-3, 3), nt(1, 5), coin(0, 1);
  for (int it = 0; it < 150; ++it) {
    Domain d = Domain::laurent(moduli[static_cast<std::size_t>(it) % moduli.size()]);
    ExpSum e(d);
    int terms = nt(rng);
    for (int j = 0; j < terms; ++j) {
      AffineForm f(Int(ed(rng)));
      for (const auto& x : xs)
        if (coin(rng) && coin(rng)) f.add(x, ed(rng));
      e.add_term(cd(rng), f);
    }
    Box box{-5, 5};
    auto brute = brute_force_laurent({e}, box);
    std::set<IntAssignment> expect(brute.begin(), brute.end());
    auto vs = e.variables();
    auto got = disjunction_points(grouping_solve({e}), names(vs), box);
    ASSERT_EQ(got, expect) << e.render() << " over " << d.render();
  }
}
