#include "support.hpp"

#include <gtest/gtest.h>

using namespace wmtest;
using smt::Answer;
using smt::PermAmount;
using smt::Rational;

namespace {

const char* kLocs = "proc main(a, b, c, d) requires true ensures true { }\n";

bool verified(const std::string& src) { return verify(src).status == cli::Status::Verified; }

// Every chunk of the state holds between zero and one.
void expectBounded(const Fixture& fx, const sym::SymState& s, const std::string& what) {
    for (const auto& c : s.fields) {
        EXPECT_NE(fx.eng.permAtLeast(s, PermAmount(Rational(1)), c.perm), Answer::No) << what;
        EXPECT_NE(fx.eng.permAtLeast(s, c.perm, PermAmount(Rational(0))), Answer::No) << what;
    }
}

// Locations a..d plus the free variables the generators use, bound once like procedure parameters.
sym::SymState start(const Fixture& fx) {
    auto s = fx.state({"a", "b", "c", "d"});
    s.var("x");
    s.var("y");
    return s;
}

// Inhale does not prune contradictory pure facts; such paths are dead and satisfy everything.
bool live(const Fixture& fx, const sym::SymState& s) { return fx.solver.isFeasible(s.path) != Answer::No; }

// Star of value-free fractional points-to: giving it away adds no path facts.
ast::AssertionPtr genResources(Rng& r) {
    static const char* locs[] = {"a", "b", "c"};
    std::vector<ast::AssertionPtr> parts;
    for (int i = r.range(1, 2); i > 0; --i) {
        auto a = std::make_shared<ast::Assertion>();
        a->kind = ast::AKind::PointsTo;
        a->loc = ast::mkVar(locs[r.range(0, 2)]);
        a->perm = ast::PermExpr{false, 1, r.range(1, 4)};
        parts.push_back(a);
    }
    return parts.size() == 1 ? parts[0] : ast::mkStar(parts);
}

bool empty(const Fixture& fx, const sym::SymState& s) {
    for (const auto& c : s.fields)
        if (fx.eng.permZero(s, c.perm) != Answer::Yes) return false;
    return true;
}

}  // namespace

TEST(PermAlgebra, InhaleStaysWithinCap) {
    Fixture fx(kLocs);
    Rng rng(101);
    for (int i = 0; i < 1000; ++i) {
        auto src = genAssertion(rng, 3, false);
        auto o = fx.eng.inhale(start(fx), fx.encoder.encode(src, "main"));
        EXPECT_TRUE(o.failures.empty()) << frontend::print(*src);
        for (const auto& s : o.states)
            if (live(fx, s)) expectBounded(fx, s, frontend::print(*src));
    }
}

TEST(PermAlgebra, InhaleThenExhaleRoundTrips) {
    Fixture fx(kLocs);
    Rng rng(102);
    int nonTrivial = 0;
    for (int i = 0; i < 1000; ++i) {
        auto src = genAssertion(rng, 3, false);
        auto a = fx.encoder.encode(src, "main");
        auto in = fx.eng.inhale(start(fx), a);
        for (auto& s : in.states) {
            if (!live(fx, s)) continue;
            nonTrivial += !s.fields.empty();
            auto out = fx.eng.exhale(s, a);
            EXPECT_TRUE(out.failures.empty()) << frontend::print(*src) << "\n" << out.failures.front().message;
            for (const auto& t : out.states)
                if (live(fx, t)) EXPECT_TRUE(empty(fx, t)) << frontend::print(*src);
        }
    }
    EXPECT_GT(nonTrivial, 300);
}

TEST(PermAlgebra, ExhaleFromEmptyOnlyForPure) {
    Fixture fx(kLocs);
    auto o = fx.eng.exhale(fx.state({"a"}), fx.A("a |->[1/4] _"));
    EXPECT_FALSE(o.failures.empty());
    auto p = fx.eng.exhale(fx.state({"a"}), fx.A("1 + 1 == 2"));
    EXPECT_TRUE(p.failures.empty());
}

// Adding permission never turns a successful exhale into a failure, and untouched chunks survive.
TEST(Frame, ExtraResourcesDoNotHurt) {
    Fixture fx(kLocs);
    Rng rng(103);
    int checked = 0;
    for (int i = 0; i < 800; ++i) {
        auto have = fx.encoder.encode(genAssertion(rng, 3, false), "main");
        auto more = fx.encoder.encode(genAssertion(rng, 2, false), "main");
        auto want = fx.encoder.encode(genAssertion(rng, 2, false), "main");
        for (auto& s : fx.eng.inhale(start(fx), have).states) {
            if (!live(fx, s)) continue;
            auto base = fx.eng.exhale(s, want);
            if (!base.failures.empty()) continue;
            auto framed = fx.inhale(s, "d |-> 9");
            for (auto& bigger : fx.eng.inhale(framed, more).states) {
                if (!live(fx, bigger)) continue;
                ++checked;
                auto o = fx.eng.exhale(bigger, want);
                EXPECT_TRUE(o.failures.empty()) << frontend::print(*have) << " + " << frontend::print(*more) << " - "
                                                << frontend::print(*want);
                for (const auto& t : o.states) {
                    if (!live(fx, t)) continue;
                    auto d = t.store.at("d");
                    EXPECT_EQ(fx.eng.permAtLeast(t, fx.eng.permOf(t, HeapLabel::Real, d, Field::Val), PermAmount(Rational(1))),
                              Answer::Yes);
                }
            }
        }
    }
    EXPECT_GT(checked, 100);
}

TEST(Frame, FailureIsMonotone) {
    // If exhaling W fails from S, it also fails once some resources of S have been given away.
    Fixture fx(kLocs);
    Rng rng(104);
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
        auto have = fx.encoder.encode(genAssertion(rng, 3, false), "main");
        auto give = fx.encoder.encode(genResources(rng), "main");
        auto want = fx.encoder.encode(genAssertion(rng, 2, false), "main");
        for (auto& s : fx.eng.inhale(start(fx), have).states) {
            if (!live(fx, s)) continue;
            auto full = fx.eng.exhale(s, want);
            if (full.failures.empty()) continue;
            auto smaller = fx.eng.exhale(s, give);
            if (!smaller.failures.empty()) continue;
            for (auto& t : smaller.states) {
                if (!live(fx, t)) continue;
                ++checked;
                EXPECT_FALSE(fx.eng.exhale(t, want).failures.empty())
                    << frontend::print(*have) << " - " << frontend::print(*give) << " - " << frontend::print(*want);
            }
        }
    }
    EXPECT_GT(checked, 20);
}

TEST(Duplicable, InitRelRmwAcq) {
    const char* inv = "invariant Q(V) = V == 1 ==> a |-> 7;\n";
    for (const char* r : {"Init(l)", "Rel(l, Q)", "RMWAcq(l, Q)"}) {
        std::string src = std::string(inv) + "proc main(a, l) requires " + r + " ensures " + r + " * " + r + " { }";
        EXPECT_TRUE(verified(src)) << r;
    }
}

TEST(Duplicable, AcqIsNot) {
    const char* inv = "invariant Q(V) = V == 1 ==> a |-> 7;\n";
    EXPECT_TRUE(verified(std::string(inv) + "proc main(a, l) requires Acq(l, Q) ensures Acq(l, Q) { }"));
    EXPECT_FALSE(verified(std::string(inv) + "proc main(a, l) requires Acq(l, Q) ensures Acq(l, Q) * Acq(l, Q) { }"));
}

TEST(AcquireRead, RepeatedReadsOfOneValueGainOnce) {
    for (int k = 1; k <= 4; ++k) {
        std::string reads, same = "true";
        for (int j = 0; j < k; ++j) {
            reads += "  x" + std::to_string(j) + " := [l]_acq;\n";
            if (j) same += " && x" + std::to_string(j) + " == x0";
        }
        std::string rets;
        for (int j = 0; j < k; ++j) rets += (j ? ", x" : "x") + std::to_string(j);
        std::string head = "invariant H(V) = V != 0 ==> a |->[1/2] 42;\nproc main(a, l) returns (" + rets +
                           ") requires Acq(l, H) * Init(l) ensures ";
        std::string cond = "(" + same + " && x0 != 0)";
        EXPECT_TRUE(verified(head + cond + " ==> a |->[1/2] 42 {\n" + reads + "}")) << k;
        EXPECT_FALSE(verified(head + cond + " ==> a |->[3/4] 42 {\n" + reads + "}")) << k;
    }
}

TEST(Cas, SameValueKeepsFrame) {
    // Reading and writing the same value moves nothing, whatever else is held.
    const char* invs[] = {"V == 1 ==> a |-> 7", "V == 1 ==> a |->[1/2] 7", "(V == 1 ==> a |-> 7) * (V == 0 ==> b |-> 1)",
                          "V >= 1 ? a |-> 7 : b |-> 1"};
    const char* frames[] = {"c |-> 3", "c |-> 3 * b |->[1/2] 1", "true"};
    for (const char* q : invs)
        for (const char* f : frames)
            for (int v : {0, 1}) {
                std::string src = std::string("invariant R(V) = ") + q + ";\n" +
                                  "proc main(a, b, c, l) returns (r) requires " + f +
                                  " * RMWAcq(l, R) * Rel(l, R) * Init(l)\n  ensures " + f + " * (r == " +
                                  std::to_string(v) + " ==> emp) { r := CAS_rel_acq(l, " + std::to_string(v) + ", " +
                                  std::to_string(v) + "); }";
                EXPECT_TRUE(verified(src)) << src;
            }
}

TEST(Cas, HeldResourceNotForcedOut) {
    // Holding what the new value demands does not require giving it up when the read gives it back.
    const char* src = "invariant R(V) = V == 1 ==> a |-> 7;\n"
                      "proc main(a, l) returns (r) requires a |->[1/2] 7 * RMWAcq(l, R) * Rel(l, R) * Init(l)\n"
                      "  ensures r == 1 ==> a |->[1/2] 7 { r := CAS_rel_acq(l, 1, 1); }";
    EXPECT_TRUE(verified(src));
}

TEST(Ghost, ModalitiesAreInvisible) {
    for (int v = -3; v <= 3; ++v) {
        std::string val = std::to_string(v);
        for (const char* m : {"Up", "Down"}) {
            std::string src = "proc main(ghost g) requires g |-> " + val + " ensures " + m + "(g |-> " + val + ") { }";
            EXPECT_TRUE(verified(src)) << src;
            std::string back = "proc main(ghost g) requires " + std::string(m) + "(g |-> " + val + ") ensures g |-> " + val + " { }";
            EXPECT_TRUE(verified(back)) << back;
        }
        std::string fence = "proc main(ghost g) requires g |-> " + val + " ensures g |-> " + val + " { fence_rel(g |-> " + val +
                            "); fence_acq; }";
        EXPECT_TRUE(verified(fence)) << fence;
    }
}

TEST(Ghost, NonGhostDoesMove) {
    EXPECT_FALSE(verified("proc main(a) requires a |-> 1 ensures a |-> 1 { fence_rel(a |-> 1); }"));
    EXPECT_TRUE(verified("proc main(a) requires a |-> 1 ensures Up(a |-> 1) { fence_rel(a |-> 1); }"));
}
