#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace wmtest;
using smt::PermAmount;
using smt::Rational;

namespace {

const char* kLocs = R"(invariant Q(V) = V == 1 ==> a |-> 7;
proc main() returns (a, l) requires true ensures true { alloc_na(a); alloc_acq(l, Q); }
)";

const char* kThreeThreads = R"(invariant Q1(V) = V != 0 ==> a |-> 42;
invariant Q2(V) = V != 0 ==> b |-> 7;
proc main() returns (a, b, l)
  requires true
  ensures a |-> 43 * b |-> 8 * Init(l)
{
  alloc_na(a);
  alloc_na(b);
  alloc_acq(l, Q1 * Q2);
  [l]_rel := 0;
  par {
    thread requires Acq(l, Q1) * Init(l) ensures a |-> 43 {
      while ([l]_acq == 0);
      x := [a]_na;
      [a]_na := x + 1;
    }
    thread requires Uninit(a) * Uninit(b) * Rel(l, Q1 * Q2) ensures Init(l) {
      [a]_na := 42;
      [b]_na := 7;
      [l]_rel := 1;
    }
    thread requires Acq(l, Q2) * Init(l) ensures b |-> 8 {
      while ([l]_acq == 0);
      y := [b]_na;
      [b]_na := y + 1;
    }
  }
}
)";

}  // namespace

TEST(StateInvariants, CleanAfterAllocation) {
    Fixture fx(kLocs);
    std::vector<monitor::StateReport> reports;
    auto r = fx.run("main", &reports);
    ASSERT_TRUE(r.diagnostics.empty());
    ASSERT_FALSE(reports.empty());
    for (const auto& rep : reports) EXPECT_TRUE(rep.violations.empty()) << rep.assertion;
    for (const auto& s : r.finals) EXPECT_TRUE(monitor::checkStateInvariants(s, fx.eng).empty());
}

TEST(StateInvariants, MismatchedValInit) {
    Fixture fx(kLocs);
    auto s = fx.state({"a"});
    auto a = s.store.at("a");
    fx.eng.addField(s, HeapLabel::Real, a, Field::Val, PermAmount(Rational(1, 2)));
    fx.eng.addField(s, HeapLabel::Real, a, Field::Init, PermAmount(Rational(1)));
    auto v = monitor::checkStateInvariants(s, fx.eng);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].location, "a");
}

TEST(StateInvariants, PartialUninitialised) {
    Fixture fx(kLocs);
    auto s = fx.inhale(fx.state({"a"}), "Uninit(a)");
    for (auto& c : s.fields) c.perm = PermAmount(Rational(1, 2));
    EXPECT_EQ(monitor::checkStateInvariants(s, fx.eng).size(), 1u);
    auto full = fx.inhale(fx.state({"a"}), "Uninit(a)");
    EXPECT_TRUE(monitor::checkStateInvariants(full, fx.eng).empty());
}

TEST(StateInvariants, CorpusSweep) {
    cli::RunConfig cfg;
    cfg.checkSoundness = true;
    cfg.strictInvariants = true;  // every checkpoint is checked; violations become diagnostics
    int reports = 0, files = 0;
    for (const auto& e : std::filesystem::directory_iterator(WEAKMEM_CORPUS_DIR)) {
        if (e.path().extension() != ".rsl") continue;
        ++files;
        auto fv = cli::verifyFile(e.path().string(), cfg);
        for (const auto& p : fv.procedures)
            for (const auto& r : p.soundness) {
                ++reports;
                EXPECT_TRUE(r.violations.empty()) << e.path() << " " << r.obligation << ":" << r.line << " "
                                                  << r.violations.front().message;
            }
        EXPECT_FALSE(has(kinds(fv), DiagKind::SoundnessInvariantViolation)) << e.path();
    }
    // only end-of-body states are kept when clean
    EXPECT_GE(reports, files);
}

TEST(Reconstruct, EmptyIsTrue) {
    Fixture fx(kLocs);
    EXPECT_EQ(monitor::reconstructAssertion(fx.state({"a"}), fx.eng), "true");
}

TEST(Reconstruct, JoinOfThreeThreads) {
    auto fv = verify(kThreeThreads);
    ASSERT_EQ(fv.status, cli::Status::Verified);
    std::string fin = allFinals(fv);
    EXPECT_TRUE(contains(fin, "a ↦¹ 43")) << fin;
    EXPECT_TRUE(contains(fin, "b ↦¹ 8")) << fin;
    EXPECT_TRUE(contains(fin, "Init(l)")) << fin;
    EXPECT_FALSE(contains(fin, "⇑")) << fin;
    EXPECT_FALSE(contains(fin, "⇓")) << fin;
}

TEST(Reconstruct, Fractions) {
    Fixture fx(kLocs);
    auto s = fx.inhale(fx.state({"a"}), "a |->[1/2] 5");
    EXPECT_EQ(monitor::reconstructAssertion(s, fx.eng), "a ↦¹⁄² 5");
}

TEST(Reconstruct, ReadValuesShown) {
    Fixture fx(kLocs);
    auto s = fx.inhale(fx.state({"a", "l"}), "Acq(l, Q) * Init(l)");
    ASSERT_EQ(s.preds.size(), 1u);
    EXPECT_FALSE(contains(monitor::reconstructAssertion(s, fx.eng), "obliterated"));
    s.preds[0].valsRead.push_back(smt::LinTerm(1LL));
    std::string text = monitor::reconstructAssertion(s, fx.eng);
    EXPECT_TRUE(contains(text, "{1}")) << text;
    EXPECT_TRUE(contains(text, "obliterated")) << text;
    EXPECT_TRUE(contains(text, "Init(l)")) << text;
}

TEST(Reconstruct, Stable) {
    Fixture fx(kThreeThreads);
    auto r1 = fx.run("main");
    auto r2 = fx.run("main");
    ASSERT_EQ(r1.finals.size(), r2.finals.size());
    for (std::size_t i = 0; i < r1.finals.size(); ++i) {
        auto t = monitor::reconstructAssertion(r1.finals[i], fx.eng);
        EXPECT_EQ(t, monitor::reconstructAssertion(r1.finals[i], fx.eng));
        EXPECT_EQ(t, monitor::reconstructAssertion(r2.finals[i], fx.eng));
    }
}

TEST(Reconstruct, Modalities) {
    auto fv = verify("proc main(a, b) requires a |-> 1 * b |-> 2 ensures true { fence_rel(a |-> 1); }");
    std::string fin = allFinals(fv);
    EXPECT_TRUE(contains(fin, "⇑(a ↦¹ 1)")) << fin;
    EXPECT_TRUE(contains(fin, "b ↦¹ 2")) << fin;
}
