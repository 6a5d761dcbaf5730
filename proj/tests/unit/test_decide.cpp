#include <gtest/gtest.h>

#include <random>

#include "metadio/decide.hpp"
#include "metadio/frontend.hpp"
#include "metadio/oracle.hpp"
#include "metadio/report.hpp"
#include "../support.hpp"

using namespace metadio;

namespace {

EquationSystem parse(const std::string& text) { return parse_input(text); }

// Runs the modulus search on every leaf of every branch.
bool all_leaves_refuted(const EquationSystem& sys, const Budget& budget) {
  Pipeline pl = build_pipeline(sys);
  if (pl.linear_empty) return true;
  for (const auto& br : pl.branches)
    for (const auto& leaf : br.leaves) {
      if (leaf.degenerate) continue;
      ModulusSearch ms(sys.spec, leaf.tris, leaf.params, budget);
      while (ms.state() == ModulusSearch::State::Running) ms.step(1000);
      if (ms.state() != ModulusSearch::State::Refuted) return false;
      if (!replay_chain(ms.chain(), sys.spec, leaf.tris, leaf.params)) return false;
    }
  return true;
}

}  // namespace

TEST(ModulusSchedule, BsStartsWithSmallPrimePowers) {
  ModulusSchedule s(GroupSpec::bs(2));
  std::vector<std::int64_t> qs;
  for (std::size_t i = 0; i < 5; ++i) qs.push_back(s.at(i, 1000, 3)->modulus);
  EXPECT_EQ(qs, (std::vector<std::int64_t>{3, 5, 7, 9, 11}));
}

TEST(ModulusSchedule, WreathUsesUnitConstantTerm) {
  ModulusSchedule s(GroupSpec::wreath(0, {2}));
  auto d0 = s.at(0, 1000, 3);
  ASSERT_TRUE(d0);
  EXPECT_EQ(d0->modulus, 2);
  EXPECT_EQ(d0->poly, (DensePoly{1, 1}));
}

TEST(ModulusSearch, RefutesConjugationToCube) {
  EXPECT_TRUE(all_leaves_refuted(parse("group BS 2\nX^-1 a X = a^3\n"), Budget{}));
}

TEST(ModulusSearch, RefutesSquareRootInLamplighter) {
  EXPECT_TRUE(all_leaves_refuted(parse("group wreath Z^0 x Z_2\nX^2 = a\n"), Budget{}));
}

TEST(ModulusSearch, DoesNotRefuteSolvable) {
  EXPECT_FALSE(all_leaves_refuted(parse("group BS 2\nX^-1 a X = a^4\n"), Budget{1, 60, 2}));
}

TEST(Decide, DocumentedExamples) {
  auto sat = decide(parse("group BS 2\nX^-1 a X = a^4\n"));
  ASSERT_EQ(sat.kind, Verdict::Kind::Sat);
  EXPECT_EQ(std::get<BsElement>(sat.witness.at("X")), (BsElement{zk_integer(0, 2), 2}));  // X = b^2

  auto root = decide(parse("group BS 2\nX^2 = a^3\n"));
  ASSERT_EQ(root.kind, Verdict::Kind::Sat);
  EXPECT_EQ(std::get<BsElement>(root.witness.at("X")), (BsElement{zk_normalize(3, 1, 2), 0}));

  auto lin = decide(parse("group BS 2\nX^2 = a b\n"));
  ASSERT_EQ(lin.kind, Verdict::Kind::Unsat);
  EXPECT_EQ(lin.certificate->kind, Certificate::Kind::LinearInfeasible);
}

TEST(Decide, ModulusCertificateReplaysAndRejectsEdits) {
  auto sys = parse("group BS 2\nX^-1 a X = a^3\n");
  auto v = decide(sys);
  ASSERT_EQ(v.kind, Verdict::Kind::Unsat);
  const Certificate& c = *v.certificate;
  ASSERT_EQ(c.branches.size(), 1u);
  ASSERT_EQ(c.branches[0].kind, BranchCert::Kind::Modulus);
  EXPECT_EQ(c.branches[0].chain.back().modulus, 3);  // powers of 2 mod 3 are 1, 2
  EXPECT_TRUE(verify_certificate(c, sys));
  Certificate edited = c;
  edited.branches[0].chain[0].modulus = 5;
  EXPECT_FALSE(verify_certificate(edited, sys));
  edited = c;
  edited.system_hash = "0000000000000000";
  EXPECT_FALSE(verify_certificate(edited, sys));
  EXPECT_FALSE(verify_certificate(c, parse("group BS 2\nX^-1 a X = a^5\n")));
}

TEST(Decide, PlantedSystemsAreNeverUnsat) {
  std::mt19937_64 rng(21);
  for (const auto& spec : support::families()) {
    for (int it = 0; it < 40; ++it) {
      Assignment planted;
      auto sys = support::random_system(spec, 2, 2, rng, &planted, 2);
      auto v = decide(sys, Budget{20000});
      EXPECT_NE(v.kind, Verdict::Kind::Unsat) << render_system(sys);
      if (v.kind == Verdict::Kind::Sat) EXPECT_TRUE(verify_witness(sys, v.witness));
    }
  }
}

TEST(Decide, AgreesWithOracleOnSmallSystems) {
  std::mt19937_64 rng(22);
  for (const auto& spec : support::families()) {
    for (int it = 0; it < 15; ++it) {
      auto sys = support::random_system(spec, 2, 1, rng);
      auto v = decide(sys, Budget{20000});
      if (v.kind == Verdict::Kind::Sat) EXPECT_TRUE(verify_witness(sys, v.witness));
      if (v.kind == Verdict::Kind::Unsat) {
        EXPECT_TRUE(verify_certificate(*v.certificate, sys));
        EXPECT_FALSE(group_has_solution_in_ball(sys, Ball{3})) << render_system(sys);
      }
    }
  }
}

TEST(Decide, BothProceduresAdvanceUnderSmallCaps) {
  // refuted only at the degree-2 modulus t^2 + t + 1 over Z_2
  auto sys = parse("group wreath Z^1\nX^3 = a^3 t^3\n");
  std::uint64_t last_r = 0, last_w = 0;
  for (std::uint64_t cap : {8, 16, 32, 48}) {
    Budget b;
    b.steps = cap;
    auto v = decide(sys, b);
    ASSERT_EQ(v.kind, Verdict::Kind::Unknown) << cap;
    EXPECT_GT(v.stats.refutation_steps, last_r);
    EXPECT_GT(v.stats.witness_steps, last_w);
    last_r = v.stats.refutation_steps;
    last_w = v.stats.witness_steps;
  }
  EXPECT_EQ(decide(sys).kind, Verdict::Kind::Unsat);
}

TEST(Decide, RepeatedRunsAreIdentical) {
  auto sys = parse("group wreath Z^1 x Z_2\nX^2 = a1^2 c1\n");
  auto a = decide(sys), b = decide(sys);
  ASSERT_EQ(a.kind, b.kind);
  EXPECT_EQ(*a.certificate, *b.certificate);
  EXPECT_EQ(report_json(sys, a, Budget{}, 0).dump(), report_json(sys, b, Budget{}, 0).dump());
}

TEST(Report, CertificateJsonRoundTrips) {
  for (const char* text : {"group BS 2\nX^-1 a X = a^3\n", "group BS 2\nX^2 = a b\n", "group wreath Z^1\nX^3 = a^3 t^3\n",
                           "group wreath Z^0 x Z_2\nX^2 = t a t\n"}) {
    auto sys = parse(text);
    auto v = decide(sys);
    ASSERT_EQ(v.kind, Verdict::Kind::Unsat) << text;
    EXPECT_EQ(certificate_from_json(to_json(*v.certificate)), *v.certificate);
    auto check = check_report(report_json(sys, v, Budget{}, 0.5));
    EXPECT_TRUE(check.ok) << check.message;
  }
}

TEST(Report, RejectsForgedWitness) {
  auto sys = parse("group BS 2\nX^-1 a X = a^4\n");
  auto j = report_json(sys, decide(sys), Budget{}, 0);
  j["witness"]["X"] = "0*2^-0 | 1";
  EXPECT_FALSE(check_report(j).ok);
  j["witness"] = Json::object();
  EXPECT_FALSE(check_report(j).ok);
}
