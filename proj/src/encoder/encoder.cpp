#include "weakmem/encoder/encoder.hpp"

#include "weakmem/frontend/parser.hpp"

#include <algorithm>

namespace weakmem::enc {

using namespace ast;

const char* toString(PKind k) {
    switch (k) {
        case PKind::Inhale: return "inhale";
        case PKind::Exhale: return "exhale";
        case PKind::AssertCheck: return "assert";
        case PKind::HavocVar: return "havoc";
        case PKind::Assign: return "assign";
        case PKind::FieldWrite: return "field-write";
        case PKind::NewRef: return "new";
        case PKind::Branch: return "branch";
        case PKind::NondetBranch: return "nondet";
        case PKind::ForEachHeldConjunct: return "foreach-held-conjunct";
        case PKind::ConjunctGuard: return "conjunct-guard";
        case PKind::RecordRead: return "record-read";
        case PKind::TransferHeap: return "transfer";
        case PKind::ExhalePreferTmp: return "exhale-prefer-tmp";
        case PKind::KillBranch: return "kill";
        case PKind::DropAllPermissions: return "drop-all";
        case PKind::SpinDiscard: return "spin-discard";
        case PKind::CheckNoValsRead: return "check-no-vals-read";
        case PKind::Fork: return "fork";
        case PKind::Checkpoint: return "checkpoint";
    }
    return "?";
}

namespace {

[[noreturn]] void fail(DiagKind k, const SourceSpan& sp, const std::string& rule, const std::string& msg) {
    Diagnostic d;
    d.kind = k;
    d.span = sp;
    d.rule = rule;
    d.message = msg;
    throw EncodingError{d};
}

PermExpr full() { return PermExpr{}; }
PermExpr wildcard() {
    PermExpr p;
    p.wildcard = true;
    return p;
}

AssertionPtr eqFact(ExprPtr a, ExprPtr b) { return mkPure(mkBinary(BinOp::Eq, std::move(a), std::move(b))); }

Primitive prim(PKind k, const SourceSpan& sp, const std::string& rule) {
    Primitive p;
    p.kind = k;
    p.span = sp;
    p.rule = rule;
    return p;
}

Primitive inhale(AssertionPtr a, const SourceSpan& sp, const std::string& rule) {
    Primitive p = prim(PKind::Inhale, sp, rule);
    p.a = std::move(a);
    return p;
}

Primitive exhale(AssertionPtr a, DiagKind k, const SourceSpan& sp, const std::string& rule) {
    Primitive p = prim(PKind::Exhale, sp, rule);
    p.a = std::move(a);
    p.failKind = k;
    return p;
}

Primitive check(AssertionPtr a, DiagKind k, const SourceSpan& sp, const std::string& rule) {
    Primitive p = prim(PKind::AssertCheck, sp, rule);
    p.a = std::move(a);
    p.failKind = k;
    return p;
}

Primitive havoc(const std::string& v, const SourceSpan& sp, const std::string& rule) {
    Primitive p = prim(PKind::HavocVar, sp, rule);
    p.var = v;
    return p;
}

Primitive assign(const std::string& v, ExprPtr e, const SourceSpan& sp, const std::string& rule) {
    Primitive p = prim(PKind::Assign, sp, rule);
    p.var = v;
    p.e = std::move(e);
    return p;
}

Primitive transfer(HeapLabel from, HeapLabel to, const SourceSpan& sp, const std::string& rule) {
    Primitive p = prim(PKind::TransferHeap, sp, rule);
    p.label = from;
    p.to = to;
    return p;
}

// Init(l): some init permission and the flag set.
AssertionPtr initAtom(const ExprPtr& l) {
    return mkStar({mkAcc(l, Field::Init, HeapLabel::Real, wildcard()), eqFact(mkHeapRead(l, Field::Init, HeapLabel::Real), mkInt(1))});
}

AssertionPtr invAt(ExprPtr indexExpr, IndexRef idx, ExprPtr value, HeapLabel label) {
    auto a = std::make_shared<Assertion>(*mkInvInstance(idx, std::move(value), label));
    a->loc = std::move(indexExpr);
    return a;
}

bool writesWithRelease(AccessMode m) { return m == AccessMode::Rel || m == AccessMode::RelAcq; }
bool readsWithAcquire(AccessMode m) { return m == AccessMode::Acq || m == AccessMode::RelAcq; }

std::string modeRule(const char* base, AccessMode m) { return std::string(base) + "-" + toString(m); }

// The single atomic operation inside a spin-loop condition, or null.
const Expr* atomicOperand(const Expr& e, int& count) {
    const Expr* found = nullptr;
    if (e.kind == ExprKind::Read || e.kind == ExprKind::Cas) {
        ++count;
        found = &e;
    }
    for (const auto& a : e.args) {
        const Expr* f = atomicOperand(*a, count);
        if (f) found = f;
    }
    return found;
}

ExprPtr replaceAtomic(const ExprPtr& e, const ExprPtr& with) {
    if (e->kind == ExprKind::Read || e->kind == ExprKind::Cas) return with;
    if (e->args.empty()) return e;
    auto out = std::make_shared<Expr>(*e);
    for (auto& a : out->args) a = replaceAtomic(a, with);
    return out;
}

}  // namespace

std::string Encoder::temp(const std::string& hint) const { return "$" + hint + std::to_string(++counter_); }

spec::GhostTest Encoder::ghostTest(const std::string& proc) const {
    return [this, proc](const Expr& loc) {
        return loc.kind == ExprKind::Var && m_.classOf(proc, loc.name) == frontend::LocClass::Ghost;
    };
}

AssertionPtr Encoder::encode(const AssertionPtr& a, const std::string& proc, HeapLabel label) const {
    return spec::encodeAssertion(a, t_, p_, label, ghostTest(proc));
}

std::vector<Primitive> Encoder::encodeBlock(const Block& b, const std::string& proc) const {
    std::vector<Primitive> out;
    for (const auto& s : b) {
        auto part = encodeStmt(*s, proc);
        out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return out;
}

ProcedurePlan Encoder::encodeProcedure(const Procedure& proc) const {
    counter_ = 0;
    ProcedurePlan plan;
    plan.name = proc.name;
    plan.span = proc.span;
    plan.params = proc.params;
    plan.returns = proc.returns;
    plan.prims.push_back(inhale(encode(proc.pre, proc.name), proc.preSpan, "precondition"));
    auto body = encodeBlock(proc.body, proc.name);
    plan.prims.insert(plan.prims.end(), body.begin(), body.end());
    Primitive end = prim(PKind::Checkpoint, proc.postSpan, "end-of-body");
    end.final = true;
    plan.prims.push_back(end);
    plan.prims.push_back(exhale(encode(proc.post, proc.name), DiagKind::ExhaleFailure, proc.postSpan, "postcondition"));
    forEachStmt(proc.body, [&](const Stmt& s) {
        if (s.kind == SKind::Par) plan.threads += static_cast<int>(s.threads.size());
    });
    return plan;
}

std::vector<Primitive> Encoder::encodeStmt(const Stmt& s, const std::string& proc) const {
    std::vector<Primitive> out;
    const SourceSpan& sp = s.span;
    ExprPtr l = s.loc.empty() ? nullptr : mkVar(s.loc);
    switch (s.kind) {
        case SKind::AllocNa:
        case SKind::AllocGhost: {
            const char* rule = s.kind == SKind::AllocNa ? "alloc-na" : "alloc-ghost";
            Primitive n = prim(PKind::NewRef, sp, rule);
            n.var = s.target;
            n.ghost = s.kind == SKind::AllocGhost;
            out.push_back(n);
            auto ua = std::make_shared<Assertion>();
            ua->kind = AKind::Uninit;
            ua->loc = mkVar(s.target);
            out.push_back(inhale(encode(ua, proc), sp, rule));
            break;
        }
        case SKind::AllocAcq:
        case SKind::AllocRmw: {
            const char* rule = s.kind == SKind::AllocAcq ? "alloc-acq" : "alloc-rmw";
            Primitive n = prim(PKind::NewRef, sp, rule);
            n.var = s.target;
            out.push_back(n);
            auto rel = std::make_shared<Assertion>();
            rel->kind = AKind::Rel;
            rel->loc = mkVar(s.target);
            rel->inv = s.inv;
            auto acq = std::make_shared<Assertion>(*rel);
            acq->kind = s.kind == SKind::AllocAcq ? AKind::Acq : AKind::RMWAcq;
            out.push_back(inhale(encode(mkStar({rel, acq}), proc), sp, rule));
            break;
        }
        case SKind::Write: out = write(s, proc); break;
        case SKind::Read: out = read(s, proc); break;
        case SKind::Cas: out = rmw(s, proc); break;
        case SKind::Faa: out = rmw(s, proc); break;
        case SKind::FenceAcq: out.push_back(transfer(HeapLabel::Down, HeapLabel::Real, sp, "fence-acq")); break;
        case SKind::FenceRel: {
            AssertionPtr a = encode(s.annot, proc);
            out.push_back(exhale(a, DiagKind::ExhaleFailure, sp, "fence-rel"));
            out.push_back(inhale(spec::relabel(a, spec::LabelMap::toUp(), ghostTest(proc)), sp, "fence-rel"));
            break;
        }
        case SKind::Rewrite: out = rewrite(s, proc); break;
        case SKind::While: out = s.hasInvariant ? loop(s, proc) : spin(s, proc); break;
        case SKind::If: {
            Primitive b = prim(PKind::Branch, sp, "if");
            b.e = s.e1;
            b.body = encodeBlock(s.body, proc);
            b.elseBody = encodeBlock(s.elseBody, proc);
            out.push_back(std::move(b));
            break;
        }
        case SKind::Par: out = par(s, proc); break;
        case SKind::Call: out = call(s, proc); break;
        case SKind::Assign: out.push_back(assign(s.target, s.e1, sp, "assign")); break;
        case SKind::Free:
            out.push_back(exhale(mkStar({mkAcc(l, Field::Val, HeapLabel::Real, full()), mkAcc(l, Field::Init, HeapLabel::Real, full())}),
                                 DiagKind::InsufficientPermission, sp, "free"));
            break;
    }
    Primitive cp = prim(PKind::Checkpoint, sp, "statement");
    out.push_back(cp);
    return out;
}

std::vector<Primitive> Encoder::write(const Stmt& s, const std::string&) const {
    std::vector<Primitive> out;
    const SourceSpan& sp = s.span;
    ExprPtr l = mkVar(s.loc);
    if (s.mode == AccessMode::Na) {
        const char* rule = "write-na";
        out.push_back(check(mkStar({mkAcc(l, Field::Val, HeapLabel::Real, full()), mkAcc(l, Field::Init, HeapLabel::Real, full())}),
                            DiagKind::InsufficientPermission, sp, rule));
        std::string v = temp("w");
        out.push_back(assign(v, s.e1, sp, rule));
        Primitive fw = prim(PKind::FieldWrite, sp, rule);
        fw.loc = l;
        fw.field = Field::Val;
        fw.e = mkVar(v);
        out.push_back(fw);
        fw.field = Field::Init;
        fw.e = mkInt(1);
        out.push_back(fw);
        return out;
    }
    std::string rule = modeRule("write", s.mode);
    out.push_back(check(mkAcc(l, Field::Rel, HeapLabel::Real, wildcard()), DiagKind::NoRelPermission, sp, rule));
    HeapLabel lab = writesWithRelease(s.mode) ? HeapLabel::Real : HeapLabel::Up;
    std::string v = temp("w");
    out.push_back(assign(v, s.e1, sp, rule));
    out.push_back(exhale(invAt(mkHeapRead(l, Field::Rel, HeapLabel::Real), {}, mkVar(v), lab), DiagKind::ExhaleFailure, sp, rule));
    out.push_back(inhale(initAtom(l), sp, rule));
    return out;
}

std::vector<Primitive> Encoder::read(const Stmt& s, const std::string&) const {
    std::vector<Primitive> out;
    const SourceSpan& sp = s.span;
    ExprPtr l = mkVar(s.loc);
    if (s.mode == AccessMode::Na) {
        const char* rule = "read-na";
        out.push_back(check(mkAcc(l, Field::Val, HeapLabel::Real, wildcard()), DiagKind::InsufficientPermission, sp, rule));
        out.push_back(check(eqFact(mkHeapRead(l, Field::Init, HeapLabel::Real), mkInt(1)), DiagKind::ReadOfUninitialised, sp, rule));
        out.push_back(assign(s.target, mkHeapRead(l, Field::Val, HeapLabel::Real), sp, rule));
        return out;
    }
    std::string rule = modeRule("read", s.mode);
    out.push_back(check(initAtom(l), DiagKind::Uninitialised, sp, rule));
    out.push_back(check(mkStar({mkAcc(l, Field::Acq, HeapLabel::Real, wildcard()), eqFact(mkHeapRead(l, Field::Acq, HeapLabel::Real), mkInt(1))}),
                        DiagKind::NoAcqPermission, sp, rule));
    // read into a temporary so an invariant mentioning the target still sees its old value
    std::string v = temp("r");
    out.push_back(havoc(v, sp, rule));
    Primitive each = prim(PKind::ForEachHeldConjunct, sp, rule);
    each.loc = l;
    Primitive g = prim(PKind::ConjunctGuard, sp, rule);
    g.guard = GuardMode::Read;
    g.loc = l;
    g.var = v;
    each.body.push_back(g);
    HeapLabel lab = readsWithAcquire(s.mode) ? HeapLabel::Real : HeapLabel::Down;
    each.body.push_back(inhale(invAt(nullptr, {-1, true}, mkVar(v), lab), sp, rule));
    Primitive rr = prim(PKind::RecordRead, sp, rule);
    rr.loc = l;
    rr.var = v;
    each.body.push_back(rr);
    out.push_back(each);
    out.push_back(assign(s.target, mkVar(v), sp, rule));
    return out;
}

std::vector<Primitive> Encoder::rmw(const Stmt& s, const std::string&) const {
    std::vector<Primitive> out;
    bool faa = s.kind == SKind::Faa;
    const SourceSpan& sp = s.span;
    ExprPtr l = mkVar(s.loc);
    std::string rule = modeRule(faa ? "faa" : "cas", s.mode);
    out.push_back(check(initAtom(l), DiagKind::Uninitialised, sp, rule));
    out.push_back(check(mkStar({mkAcc(l, Field::Acq, HeapLabel::Real, wildcard()),
                                eqFact(mkHeapRead(l, Field::Acq, HeapLabel::Real), mkInt(0)),
                                mkAcc(l, Field::Rel, HeapLabel::Real, wildcard())}),
                        DiagKind::MissingRMWPermissions, sp, rule));
    std::string r = temp("r");
    std::string e1 = temp("e");
    out.push_back(assign(e1, s.e1, sp, rule));
    std::string e2;
    if (!faa) {
        e2 = temp("e");
        out.push_back(assign(e2, s.e2, sp, rule));
    }
    out.push_back(havoc(r, sp, rule));

    std::vector<Primitive> success;
    Primitive each = prim(PKind::ForEachHeldConjunct, sp, rule);
    each.loc = l;
    Primitive g = prim(PKind::ConjunctGuard, sp, rule);
    g.guard = GuardMode::Positive;
    g.loc = l;
    each.body.push_back(g);
    each.body.push_back(inhale(invAt(nullptr, {-1, true}, mkVar(r), HeapLabel::Tmp), sp, rule));
    success.push_back(each);
    ExprPtr written = faa ? mkBinary(BinOp::Add, mkVar(r), mkVar(e1)) : mkVar(e2);
    Primitive x = prim(PKind::ExhalePreferTmp, sp, rule);
    x.a = invAt(mkHeapRead(l, Field::Rel, HeapLabel::Real), {}, written, HeapLabel::Tmp);
    x.label = writesWithRelease(s.mode) ? HeapLabel::Real : HeapLabel::Up;
    x.failKind = DiagKind::ExhaleFailure;
    success.push_back(x);
    success.push_back(transfer(HeapLabel::Tmp, readsWithAcquire(s.mode) ? HeapLabel::Real : HeapLabel::Down, sp, rule));

    if (faa) {
        out.insert(out.end(), success.begin(), success.end());
    } else {
        Primitive b = prim(PKind::Branch, sp, rule);
        b.e = mkBinary(BinOp::Eq, mkVar(r), mkVar(e1));
        b.body = std::move(success);
        out.push_back(std::move(b));
    }
    out.push_back(assign(s.target, mkVar(r), sp, rule));
    return out;
}

std::vector<Primitive> Encoder::rewrite(const Stmt& s, const std::string& proc) const {
    std::vector<Primitive> out;
    const SourceSpan& sp = s.span;
    ExprPtr l = mkVar(s.loc);
    const char* rule = "rewrite";
    const auto& from = t_.conjunctsOf(s.inv);
    const auto& to = t_.conjunctsOf(s.inv2);
    out.push_back(check(mkStar({mkAcc(l, Field::Acq, HeapLabel::Real, wildcard()), eqFact(mkHeapRead(l, Field::Acq, HeapLabel::Real), mkInt(1))}),
                        DiagKind::NoAcqPermission, sp, rule));
    Primitive nv = prim(PKind::CheckNoValsRead, sp, rule);
    nv.loc = l;
    nv.indices = from;
    nv.failKind = DiagKind::RewriteAfterRead;
    out.push_back(nv);

    // justification: for an arbitrary value, Q's conjuncts entail Q''s conjuncts
    Primitive side = prim(PKind::NondetBranch, sp, rule);
    std::string v = temp("v");
    side.body.push_back(prim(PKind::DropAllPermissions, sp, rule));
    side.body.push_back(havoc(v, sp, rule));
    std::vector<AssertionPtr> qs, qs2;
    for (int i : from) qs.push_back(invAt(nullptr, {i, false}, mkVar(v), HeapLabel::Real));
    for (int i : to) qs2.push_back(invAt(nullptr, {i, false}, mkVar(v), HeapLabel::Real));
    side.body.push_back(inhale(mkStar(qs), sp, rule));
    side.body.push_back(exhale(mkStar(qs2), DiagKind::RewriteNotJustified, sp, rule));
    side.body.push_back(prim(PKind::KillBranch, sp, rule));
    out.push_back(side);

    std::vector<AssertionPtr> give, get;
    for (int i : from) give.push_back(mkPred(l, {i, false}, HeapLabel::Real, full()));
    for (int i : to) {
        get.push_back(mkPred(l, {i, false}, HeapLabel::Real, full()));
        get.push_back(mkValsReadEmpty(l, {i, false}, HeapLabel::Real));
    }
    out.push_back(exhale(mkStar(give), DiagKind::NoAcqPermission, sp, rule));
    out.push_back(inhale(mkStar(get), sp, rule));
    (void)proc;
    return out;
}

std::vector<Primitive> Encoder::loop(const Stmt& s, const std::string& proc) const {
    std::vector<Primitive> out;
    const SourceSpan& sp = s.span;
    AssertionPtr inv = encode(s.annot, proc);
    if (spec::mentionsDown(*inv))
        fail(DiagKind::DownInLoopInvariant, sp, "while", "loop invariants may not hold resources under the down modality");
    out.push_back(exhale(inv, DiagKind::ExhaleFailure, sp, "loop-entry"));
    for (const auto& v : frontend::assignedVariables(s.body)) out.push_back(havoc(v, sp, "while"));
    Primitive iter = prim(PKind::NondetBranch, sp, "loop-body");
    iter.body.push_back(prim(PKind::DropAllPermissions, sp, "loop-body"));
    iter.body.push_back(inhale(inv, sp, "loop-body"));
    iter.body.push_back(inhale(mkPure(s.e1), sp, "loop-body"));
    auto body = encodeBlock(s.body, proc);
    iter.body.insert(iter.body.end(), body.begin(), body.end());
    iter.body.push_back(exhale(inv, DiagKind::ExhaleFailure, sp, "loop-preservation"));
    iter.body.push_back(prim(PKind::KillBranch, sp, "loop-body"));
    out.push_back(iter);
    out.push_back(inhale(inv, sp, "loop-exit"));
    out.push_back(inhale(mkPure(mkUnary(UnOp::Not, s.e1)), sp, "loop-exit"));
    return out;
}

std::vector<Primitive> Encoder::spin(const Stmt& s, const std::string&) const {
    const SourceSpan& sp = s.span;
    int count = 0;
    const Expr* op = atomicOperand(*s.e1, count);
    if (!s.body.empty() || count != 1 || !op)
        fail(DiagKind::MissingLoopInvariant, sp, "while",
             "loop needs an invariant (only empty-bodied loops spinning on one atomic read or CAS are exempt)");
    std::vector<Primitive> out;
    ExprPtr l = mkVar(op->name);
    std::string r = temp("spin");
    ExprPtr exitCond = mkUnary(UnOp::Not, replaceAtomic(s.e1, mkVar(r)));
    if (op->kind == ExprKind::Cas) {
        // a failed CAS changes nothing, so spinning is one CAS whose result satisfies the exit condition
        Stmt c;
        c.kind = SKind::Cas;
        c.target = r;
        c.loc = op->name;
        c.mode = op->mode;
        c.e1 = op->args[0];
        c.e2 = op->args[1];
        c.span = sp;
        out = rmw(c, "");
        // constrain the result before the success split
        for (auto it = out.begin(); it != out.end(); ++it) {
            if (it->kind == PKind::HavocVar) {
                std::string rv = it->var;
                Primitive assume = inhale(mkPure(replaceAtomic(mkUnary(UnOp::Not, s.e1), mkVar(rv))), sp, "spin-exit");
                out.insert(it + 1, assume);
                break;
            }
        }
        return out;
    }
    std::string rule = modeRule("spin-read", op->mode);
    out.push_back(check(initAtom(l), DiagKind::Uninitialised, sp, rule));
    out.push_back(check(mkStar({mkAcc(l, Field::Acq, HeapLabel::Real, wildcard()), eqFact(mkHeapRead(l, Field::Acq, HeapLabel::Real), mkInt(1))}),
                        DiagKind::NoAcqPermission, sp, rule));
    HeapLabel lab = readsWithAcquire(op->mode) ? HeapLabel::Real : HeapLabel::Down;
    // discarded reads: whatever they would gain must be pure
    Primitive disc = prim(PKind::ForEachHeldConjunct, sp, rule);
    disc.loc = l;
    Primitive g = prim(PKind::ConjunctGuard, sp, rule);
    g.guard = GuardMode::Full;
    g.loc = l;
    disc.body.push_back(g);
    Primitive sd = prim(PKind::SpinDiscard, sp, rule);
    sd.loc = l;
    sd.e = replaceAtomic(s.e1, mkVar("V"));
    sd.label = lab;
    sd.failKind = DiagKind::SpinPatternResourceLeak;
    disc.body.push_back(sd);
    out.push_back(disc);
    out.push_back(havoc(r, sp, rule));
    out.push_back(inhale(mkPure(exitCond), sp, "spin-exit"));
    Primitive each = prim(PKind::ForEachHeldConjunct, sp, rule);
    each.loc = l;
    Primitive rg = prim(PKind::ConjunctGuard, sp, rule);
    rg.guard = GuardMode::Read;
    rg.loc = l;
    rg.var = r;
    each.body.push_back(rg);
    each.body.push_back(inhale(invAt(nullptr, {-1, true}, mkVar(r), lab), sp, rule));
    Primitive rr = prim(PKind::RecordRead, sp, rule);
    rr.loc = l;
    rr.var = r;
    each.body.push_back(rr);
    out.push_back(each);
    return out;
}

std::vector<Primitive> Encoder::par(const Stmt& s, const std::string& proc) const {
    Primitive f = prim(PKind::Fork, s.span, "par");
    for (const auto& t : s.threads) {
        ThreadPlan tp;
        tp.pre = encode(t.pre, proc);
        tp.post = encode(t.post, proc);
        tp.span = t.span;
        tp.preSpan = t.preSpan;
        tp.postSpan = t.postSpan;
        tp.body = encodeBlock(t.body, proc);
        f.threads.push_back(std::move(tp));
        for (const auto& v : frontend::assignedVariables(t.body))
            if (std::find(f.havocAfterJoin.begin(), f.havocAfterJoin.end(), v) == f.havocAfterJoin.end())
                f.havocAfterJoin.push_back(v);
    }
    return {f};
}

std::vector<Primitive> Encoder::call(const Stmt& s, const std::string& proc) const {
    const Procedure* callee = p_.findProcedure(s.callee);
    if (!callee) fail(DiagKind::UndeclaredVariable, s.span, "call", "unknown procedure '" + s.callee + "'");
    if (callee->params.size() != s.args.size() || callee->returns.size() != s.results.size())
        fail(DiagKind::TypeError, s.span, "call", "arity mismatch calling '" + s.callee + "'");
    std::vector<Primitive> out;
    std::map<std::string, ExprPtr> sub;
    for (std::size_t i = 0; i < s.args.size(); ++i) {
        std::string t = temp("arg");
        out.push_back(assign(t, s.args[i], s.span, "call"));
        sub[callee->params[i].name] = mkVar(t);
    }
    AssertionPtr pre = spec::substitute(spec::expandMacros(callee->pre, p_), sub);
    out.push_back(exhale(encode(pre, proc), DiagKind::ExhaleFailure, s.span, "call-pre"));
    for (std::size_t i = 0; i < s.results.size(); ++i) {
        out.push_back(havoc(s.results[i], s.span, "call"));
        sub[callee->returns[i].name] = mkVar(s.results[i]);
    }
    AssertionPtr post = spec::substitute(spec::expandMacros(callee->post, p_), sub);
    out.push_back(inhale(encode(post, proc), s.span, "call-post"));
    return out;
}

// ---- dump

namespace {

std::string pad(int n) { return std::string(static_cast<std::size_t>(n) * 2, ' '); }

std::string guardText(const Primitive& p) {
    std::string l = frontend::print(*p.loc);
    switch (p.guard) {
        case GuardMode::Read: return "perm(AcqConjunct(" + l + ", i)) >= 1 && !(" + p.var + " in valsRead(" + l + ", i))";
        case GuardMode::Positive: return "perm(AcqConjunct(" + l + ", i)) > 0";
        case GuardMode::Full: return "perm(AcqConjunct(" + l + ", i)) >= 1";
    }
    return "?";
}

}  // namespace

std::string dump(const Primitive& p, int indent) {
    std::string in = pad(indent);
    auto a = [&] { return p.a ? frontend::print(*p.a) : std::string("true"); };
    switch (p.kind) {
        case PKind::Inhale: return in + "inhale " + a() + "\n";
        case PKind::Exhale: return in + "exhale " + a() + "\n";
        case PKind::AssertCheck: return in + "assert " + a() + "\n";
        case PKind::HavocVar: return in + p.var + " := havoc()\n";
        case PKind::Assign: return in + p.var + " := " + frontend::print(*p.e) + "\n";
        case PKind::FieldWrite:
            return in + frontend::print(*p.loc) + "." + toString(p.field) + " := " + frontend::print(*p.e) + "\n";
        case PKind::NewRef: return in + p.var + " := new()" + (p.ghost ? " // ghost" : "") + "\n";
        case PKind::Branch: {
            std::string s = in + "if (" + frontend::print(*p.e) + ") {\n" + dump(p.body, indent + 1);
            if (!p.elseBody.empty()) s += in + "} else {\n" + dump(p.elseBody, indent + 1);
            return s + in + "}\n";
        }
        case PKind::NondetBranch: return in + "if (*) {\n" + dump(p.body, indent + 1) + in + "}\n";
        case PKind::ForEachHeldConjunct:
            return in + "foreach held AcqConjunct(" + frontend::print(*p.loc) + ", i) {\n" + dump(p.body, indent + 1) + in + "}\n";
        case PKind::ConjunctGuard: return in + "guard " + guardText(p) + "\n";
        case PKind::RecordRead: {
            std::string l = frontend::print(*p.loc);
            return in + "valsRead(" + l + ", i) := valsRead(" + l + ", i) union {" + p.var + "}\n";
        }
        case PKind::TransferHeap: return in + "transfer @" + std::string(toString(p.label)) + " -> @" + toString(p.to) + "\n";
        case PKind::ExhalePreferTmp: return in + "exhale-prefer-tmp (fallback @" + toString(p.label) + ") " + a() + "\n";
        case PKind::KillBranch: return in + "assume false\n";
        case PKind::DropAllPermissions: return in + "drop all permissions\n";
        case PKind::SpinDiscard:
            return in + "spin-discard " + frontend::print(*p.loc) + " when " + frontend::print(*p.e) + " (reads @" +
                   toString(p.label) + ")\n";
        case PKind::CheckNoValsRead: {
            std::string s = in + "assert valsRead(" + frontend::print(*p.loc) + ", i) == {} for i in {";
            for (std::size_t i = 0; i < p.indices.size(); ++i) s += (i ? ", " : "") + std::to_string(p.indices[i]);
            return s + "}\n";
        }
        case PKind::Fork: {
            std::string s = in + "fork {\n";
            for (const auto& t : p.threads) {
                s += in + "  thread requires " + frontend::print(*t.pre) + " ensures " + frontend::print(*t.post) + " {\n";
                s += dump(t.body, indent + 2) + in + "  }\n";
            }
            s += in + "}\n";
            for (const auto& v : p.havocAfterJoin) s += in + v + " := havoc()\n";
            return s;
        }
        case PKind::Checkpoint:
            return in + "// ---- " + p.rule + " (line " + std::to_string(p.span.line) + ")\n";
    }
    return "";
}

std::string dump(const std::vector<Primitive>& seq, int indent) {
    std::string s;
    for (const auto& p : seq) s += dump(p, indent);
    return s;
}

}  // namespace weakmem::enc
