#include "support.hpp"

#include <gtest/gtest.h>

using namespace wmtest;

namespace {

const char* kTwoConjuncts = R"(invariant Q1(V) = V != 0 ==> a |-> 42;
invariant Q2(V) = V != 0 ==> b |-> 7;
proc main() returns (a, b, l) requires true ensures true {
  alloc_na(a);
  alloc_na(b);
  alloc_acq(l, Q1 * Q2);
}
proc left(l) requires Acq(l, Q1) ensures true { }
proc right(l) requires Acq(l, Q2) ensures true { }
)";

const char* kRewrite = R"(invariant Q1(V) = V != 0 ==> a |-> 42;
invariant Q2(V) = V != 0 ==> b |-> 7;
invariant Q3(V) = V != 0 ==> a |-> 42 * b |-> 7;
proc main() returns (a, b, x) requires true ensures true {
  alloc_na(a);
  alloc_na(b);
  alloc_acq(x, Q3);
  rewrite Acq(x, Q3) to Acq(x, Q1 * Q2);
  par {
    thread requires Acq(x, Q1) ensures true { }
    thread requires Rel(x, Q3) ensures true { }
    thread requires Acq(x, Q2) ensures true { }
  }
}
)";

ast::InvRef ref(std::vector<std::string> names) {
    ast::InvRef r;
    r.names = std::move(names);
    return r;
}

ast::AssertionPtr parseA(const std::string& text) {
    ast::AssertionPtr a;
    EXPECT_TRUE(frontend::parseAssertionOnly(text, a).ok()) << text;
    return a;
}

ast::ExprPtr parseE(const std::string& text) {
    auto a = parseA(text);
    return a->expr;
}

void labels(const ast::Expr& e, std::vector<HeapLabel>& out) {
    if (e.kind == ast::ExprKind::HeapRead || e.kind == ast::ExprKind::ValsReadContains) out.push_back(e.label);
    for (const auto& k : e.args) labels(*k, out);
}

void labels(const ast::Assertion& a, std::vector<HeapLabel>& out) {
    if (a.kind == ast::AKind::Acc || a.kind == ast::AKind::Pred || a.kind == ast::AKind::ValsReadEmpty ||
        a.kind == ast::AKind::InvInstance)
        out.push_back(a.label);
    if (a.expr) labels(*a.expr, out);
    if (a.value) labels(*a.value, out);
    for (const auto& k : a.kids) labels(*k, out);
}

std::vector<HeapLabel> labelsOf(const ast::AssertionPtr& a) {
    std::vector<HeapLabel> out;
    labels(*a, out);
    return out;
}

}  // namespace

TEST(InvariantTable, WholeAndConjunctIndices) {
    auto r = frontend::parse(kTwoConjuncts);
    ASSERT_TRUE(r.ok());
    auto t = spec::buildInvariantTable(r.program);
    int q1 = t.wholeOf(ref({"Q1"}));
    int q2 = t.wholeOf(ref({"Q2"}));
    int both = t.wholeOf(ref({"Q1", "Q2"}));
    EXPECT_EQ(std::set<int>({q1, q2, both}).size(), 3u);
    EXPECT_EQ(t.size(), 3u);
    EXPECT_EQ(t.conjunctsOf(ref({"Q1", "Q2"})), (std::vector<int>{q1, q2}));
    EXPECT_EQ(t.conjunctsOf(ref({"Q1"})), std::vector<int>{q1});
}

TEST(InvariantTable, SingletonConjunct) {
    auto r = frontend::parse("invariant Q(V) = V == 1 ==> a |-> 3;\nproc main() returns (a, l) requires true ensures true { alloc_na(a); alloc_acq(l, Q); }");
    ASSERT_TRUE(r.ok());
    auto t = spec::buildInvariantTable(r.program);
    EXPECT_EQ(t.conjunctsOf(ref({"Q"})), std::vector<int>{t.wholeOf(ref({"Q"}))});
}

TEST(InvariantTable, RewriteProgramEnumeration) {
    // Distinct bodies: Q3 (no top-level star: the implication extends over it), Q1 * Q2, Q1, Q2.
    auto r = frontend::parse(kRewrite);
    ASSERT_TRUE(r.ok());
    auto t = spec::buildInvariantTable(r.program);
    for (auto names : std::vector<std::vector<std::string>>{{"Q1"}, {"Q2"}, {"Q3"}, {"Q1", "Q2"}})
        EXPECT_TRUE(t.has(ref(names)));
    EXPECT_EQ(t.size(), 4u);
    EXPECT_EQ(t.conjunctsOf(ref({"Q3"})).size(), 1u);
    EXPECT_EQ(t.conjunctsOf(ref({"Q1", "Q2"})), (std::vector<int>{t.wholeOf(ref({"Q1"})), t.wholeOf(ref({"Q2"}))}));
}

TEST(InvariantTable, ConjunctsReassembleWhole) {
    for (const char* src : {kTwoConjuncts, kRewrite}) {
        auto r = frontend::parse(src);
        ASSERT_TRUE(r.ok());
        auto t = spec::buildInvariantTable(r.program);
        for (const auto& e : t.entries()) {
            std::vector<ast::AssertionPtr> parts;
            for (int i : t.conjunctsOfIndex(e.index)) parts.push_back(t.entry(i).body);
            auto star = parts.size() == 1 ? parts[0] : ast::mkStar(parts);
            EXPECT_EQ(frontend::print(*star), frontend::print(*e.body)) << e.text;
        }
    }
}

TEST(InvariantTable, IndicesUnique) {
    auto r = frontend::parse(kRewrite);
    auto t = spec::buildInvariantTable(r.program);
    std::set<std::string> texts;
    for (std::size_t i = 0; i < t.size(); ++i) {
        EXPECT_EQ(t.entry(static_cast<int>(i)).index, static_cast<int>(i));
        EXPECT_TRUE(texts.insert(t.entry(static_cast<int>(i)).text).second);
    }
}

TEST(Substitute, ReleaseOfOne) {
    auto q1 = parseA("V != 0 ==> a |-> 42");
    auto got = spec::instantiate(q1, ast::mkInt(1));
    EXPECT_TRUE(ast::sameAssertion(*got, *parseA("1 != 0 ==> a |-> 42"))) << frontend::print(*got);
}

TEST(Substitute, ReleaseOfZeroIsVacuous) {
    Fixture fx(kTwoConjuncts);
    auto inst = spec::instantiate(fx.table.entry(fx.table.wholeOf(ref({"Q1"}))).body, ast::mkInt(0));
    EXPECT_TRUE(ast::sameAssertion(*inst, *parseA("0 != 0 ==> a |-> 42")));
    // nothing held, yet exhaling the instance succeeds
    auto s = fx.state({"a", "b"});
    auto o = fx.eng.exhale(s, fx.encoder.encode(inst, "main"));
    EXPECT_TRUE(o.failures.empty());
    EXPECT_EQ(o.states.size(), 1u);
}

TEST(Substitute, Structural) {
    auto got = spec::instantiate(parseA("V >= 0 * c |-> V"), parseE("x + 1"));
    EXPECT_TRUE(ast::sameAssertion(*got, *parseA("x + 1 >= 0 * c |-> x + 1"))) << frontend::print(*got);
}

TEST(Substitute, DistributesOverConnectives) {
    Rng rng(11);
    for (int i = 0; i < 300; ++i) {
        auto a = genAssertion(rng, 2, true);
        auto b = genAssertion(rng, 2, true);
        auto g = genBool(rng, 1, true);
        auto v = genInt(rng, 2, false);
        auto sa = spec::instantiate(a, v), sb = spec::instantiate(b, v);
        auto sg = spec::substitute(g, {{"V", v}});
        EXPECT_TRUE(ast::sameAssertion(*spec::instantiate(ast::mkStar({a, b}), v), *ast::mkStar({sa, sb})));
        EXPECT_TRUE(ast::sameAssertion(*spec::instantiate(ast::mkImplies(g, a), v), *ast::mkImplies(sg, sa)));
        EXPECT_TRUE(ast::sameAssertion(*spec::instantiate(ast::mkCond(g, a, b), v), *ast::mkCond(sg, sa, sb)));
        std::vector<std::string> fv;
        spec::freeVariables(*sa, fv);
        EXPECT_EQ(std::count(fv.begin(), fv.end(), "V"), 0);
    }
}

TEST(Relabel, PointsToMovesUp) {
    Fixture fx(kTwoConjuncts);
    auto enc = fx.A("a |-> 42");
    for (HeapLabel l : labelsOf(enc)) EXPECT_EQ(l, HeapLabel::Real);
    auto up = spec::relabel(enc, spec::LabelMap::toUp());
    auto ls = labelsOf(up);
    ASSERT_FALSE(ls.empty());
    for (HeapLabel l : ls) EXPECT_EQ(l, HeapLabel::Up);
    // same as encoding directly under the modality
    EXPECT_TRUE(ast::sameAssertion(*up, *fx.A("Up(a |-> 42)")));
}

TEST(Relabel, PureUnchanged) {
    Fixture fx(kTwoConjuncts);
    auto p = fx.A("x > 0");
    EXPECT_TRUE(ast::sameAssertion(*spec::relabel(p, spec::LabelMap::toUp()), *p));
}

TEST(Relabel, GhostIsIdentity) {
    Fixture fx("proc main() returns (g) requires true ensures true { alloc_ghost(g); [g]_na := 5; }");
    auto enc = fx.A("g |-> 5");
    spec::GhostTest ghost = [](const ast::Expr& e) { return e.kind == ast::ExprKind::Var && e.name == "g"; };
    auto down = spec::relabel(enc, spec::LabelMap::toDown(), ghost);
    for (HeapLabel l : labelsOf(down)) EXPECT_EQ(l, HeapLabel::Real);
    // the encoder applies the same rule from the location classification
    for (HeapLabel l : labelsOf(fx.A("Down(g |-> 5)"))) EXPECT_EQ(l, HeapLabel::Real);
}

TEST(Relabel, DoubleModalityRejected) {
    Fixture fx(kTwoConjuncts);
    auto up = spec::relabel(fx.A("a |-> 42"), spec::LabelMap::toUp());
    EXPECT_THROW(spec::relabel(up, spec::LabelMap::toUp()), EncodingError);
    try {
        fx.A("Up(Up(a |-> 1))");
        FAIL() << "nested modality accepted";
    } catch (const EncodingError& e) {
        EXPECT_EQ(e.diag.kind, DiagKind::DoubleModality);
    }
}

TEST(Relabel, InverseRestores) {
    Fixture fx(kTwoConjuncts);
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        auto enc = fx.encoder.encode(genAssertion(rng, 3, false), "main");
        for (auto f : {spec::LabelMap::toUp(), spec::LabelMap::toDown(), spec::LabelMap::toTmp()}) {
            auto there = spec::relabel(enc, f);
            auto back = spec::relabel(there, f.inverse());
            EXPECT_TRUE(ast::sameAssertion(*back, *enc)) << frontend::print(*enc);
        }
    }
}

TEST(Encode, MentionsDown) {
    Fixture fx(kTwoConjuncts);
    EXPECT_TRUE(spec::mentionsDown(*parseA("Down(a |-> 1)")));
    EXPECT_TRUE(spec::mentionsDown(*fx.A("Down(a |-> 1)")));
    EXPECT_FALSE(spec::mentionsDown(*fx.A("Up(a |-> 1)")));
}
