#include "weakmem/encoder/executor.hpp"

#include "weakmem/frontend/parser.hpp"

#include <json.hpp>

#include <algorithm>

namespace weakmem::enc {

using namespace ast;
using smt::Answer;
using smt::Formula;
using smt::LinTerm;
using sym::Failure;
using sym::SymState;

void addDiagnostic(std::vector<Diagnostic>& out, const Diagnostic& d) {
    for (const auto& x : out)
        if (x.kind == d.kind && x.span.offset == d.span.offset) return;
    out.push_back(d);
}

namespace {

bool boolish(const Expr& e) {
    if (e.kind == ExprKind::Bool) return true;
    if (e.kind == ExprKind::Unary) return e.unop == UnOp::Not;
    if (e.kind == ExprKind::Binary) return isComparison(e.binop) || isBoolOp(e.binop);
    return false;
}

Failure mkFailure(DiagKind k, std::string msg) {
    Failure f;
    f.kind = k;
    f.message = std::move(msg);
    return f;
}

void bindFresh(SymState& s, const std::string& v) { s.store[v] = LinTerm(smt::Atom::fresh(v)); }

}  // namespace

void Executor::traceStep(const SymState& s, const Primitive& p) {
    if (!opts_.trace) return;
    nlohmann::json j;
    j["span"] = {{"line", p.span.line}, {"column", p.span.column}, {"offset", p.span.offset}};
    j["primitive"] = toString(p.kind);
    j["rule"] = p.rule;
    j["digest"] = s.digest();
    opts_.trace(j.dump());
}

void Executor::report(const SymState& s, const Primitive& p, const Failure& f, ExecResult& r) {
    // failures on contradictory paths are not real
    if (eng_.context().solver->isFeasible(s.path) == Answer::No) return;
    Diagnostic d;
    d.kind = f.kind;
    d.span = p.span;
    d.rule = p.rule;
    d.message = f.message;
    d.facts = f.facts;
    d.incompleteSolver = f.incomplete;
    addDiagnostic(r.diagnostics, d);
}

std::vector<int> Executor::heldIndices(const SymState& s, const LinTerm& loc) const {
    std::vector<int> out;
    for (const auto& c : s.preds) {
        if (c.label != HeapLabel::Real) continue;
        if (std::find(out.begin(), out.end(), c.index) != out.end()) continue;
        if (c.loc == loc || eng_.entails(s, smt::eq(c.loc, loc)) == Answer::Yes) out.push_back(c.index);
    }
    std::sort(out.begin(), out.end());
    return out;
}

ExecResult Executor::run(const std::vector<Primitive>& seq, SymState init) {
    ExecResult r;
    budget_ = opts_.branchCap;
    std::vector<Work> work;
    work.push_back(Work{std::move(init), {Frame{&seq, 0, -1}}});
    while (!work.empty()) {
        Work w = std::move(work.back());
        work.pop_back();
        while (!w.stack.empty() && w.stack.back().pc >= w.stack.back().seq->size()) w.stack.pop_back();
        if (w.stack.empty()) continue;
        Frame& f = w.stack.back();
        const Primitive& p = (*f.seq)[f.pc];
        ++f.pc;
        std::vector<Work> next;
        step(std::move(w), p, next, r);
        if (next.size() > 1) {
            r.branches += static_cast<int>(next.size()) - 1;
            budget_ -= static_cast<int>(next.size()) - 1;
            if (budget_ < 0) {
                r.capped = true;
                Diagnostic d;
                d.kind = DiagKind::BranchLimitExceeded;
                d.span = p.span;
                d.rule = p.rule;
                d.message = "more than " + std::to_string(opts_.branchCap) + " paths";
                addDiagnostic(r.diagnostics, d);
                return r;
            }
        }
        // keep source order: first successor explored first
        for (auto it = next.rbegin(); it != next.rend(); ++it) work.push_back(std::move(*it));
    }
    return r;
}

void Executor::step(Work w, const Primitive& p, std::vector<Work>& out, ExecResult& r) {
    SymState& s = w.s;
    int bound = w.stack.back().bound;
    traceStep(s, p);
    auto fanOut = [&](sym::Outcome o) {
        for (const auto& f : o.failures) report(s, p, f, r);
        for (auto& st : o.states) {
            if (st.infeasible) continue;
            out.push_back(Work{std::move(st), w.stack});
        }
    };
    try {
        switch (p.kind) {
            case PKind::Inhale: fanOut(eng_.inhale(s, p.a, bound)); return;
            case PKind::Exhale: fanOut(eng_.exhale(s, p.a, p.failKind, bound)); return;
            case PKind::AssertCheck: {
                sym::Outcome o = eng_.check(s, p.a, p.failKind, bound);
                for (auto& f : o.failures) f.kind = p.failKind;
                fanOut(std::move(o));
                return;
            }
            case PKind::ExhalePreferTmp:
                fanOut(eng_.exhale(s, p.a, p.failKind, bound, sym::ExhaleMode::PreferTmp, p.label));
                return;
            case PKind::HavocVar: bindFresh(s, p.var); break;
            case PKind::Assign: {
                if (boolish(*p.e)) {
                    Formula f = eng_.evalBool(s, *p.e, bound);
                    LinTerm b(smt::Atom::fresh(p.var));
                    s.assume((f && smt::eq(b, 1LL)) || (!f && smt::eq(b, 0LL)));
                    s.store[p.var] = b;
                } else {
                    s.store[p.var] = eng_.evalInt(s, *p.e, bound);
                }
                break;
            }
            case PKind::FieldWrite: {
                LinTerm loc = eng_.evalInt(s, *p.loc, bound);
                LinTerm v = eng_.evalInt(s, *p.e, bound);
                int i = eng_.findField(s, HeapLabel::Real, loc, p.field);
                if (i < 0) throw mkFailure(DiagKind::InsufficientPermission, "no permission to write " + frontend::print(*p.loc));
                s.fields[static_cast<std::size_t>(i)].value = v;
                break;
            }
            case PKind::NewRef: {
                LinTerm t = eng_.newLocation(s, p.var);
                s.store[p.var] = t;
                if (p.ghost) s.ghosts.insert(t.key());
                break;
            }
            case PKind::Branch: {
                Formula c = eng_.evalBool(s, *p.e, bound);
                bool canThen = eng_.feasible(s, c) != Answer::No;
                bool canElse = eng_.feasible(s, !c) != Answer::No;
                if (canThen) {
                    Work t{s, w.stack};
                    t.s.assume(c);
                    t.stack.push_back(Frame{&p.body, 0, bound});
                    out.push_back(std::move(t));
                }
                if (canElse) {
                    Work e{std::move(s), w.stack};
                    e.s.assume(!c);
                    e.stack.push_back(Frame{&p.elseBody, 0, bound});
                    out.push_back(std::move(e));
                }
                return;
            }
            case PKind::NondetBranch: {
                Work side{s, w.stack};
                side.stack.push_back(Frame{&p.body, 0, bound});
                out.push_back(std::move(side));
                break;
            }
            case PKind::ForEachHeldConjunct: {
                LinTerm loc = eng_.evalInt(s, *p.loc, bound);
                auto idx = heldIndices(s, loc);
                for (auto it = idx.rbegin(); it != idx.rend(); ++it) w.stack.push_back(Frame{&p.body, 0, *it});
                break;
            }
            case PKind::ConjunctGuard: {
                LinTerm loc = eng_.evalInt(s, *p.loc, bound);
                int i = eng_.findPred(s, HeapLabel::Real, loc, bound);
                bool held = false;
                if (i >= 0) {
                    const auto& perm = s.preds[static_cast<std::size_t>(i)].perm;
                    held = p.guard == GuardMode::Positive ? eng_.permPositive(s, perm) == Answer::Yes
                                                          : eng_.permAtLeast(s, perm, smt::Rational(1)) == Answer::Yes;
                }
                if (!held) {
                    w.stack.pop_back();
                    break;
                }
                if (p.guard != GuardMode::Read) break;
                LinTerm x = s.var(p.var);
                Formula fresh = Formula::top();
                for (const auto& v : s.preds[static_cast<std::size_t>(i)].valsRead) fresh = fresh && smt::ne(x, v);
                if (fresh.isTrue()) break;
                bool canRead = eng_.feasible(s, fresh) != Answer::No;
                bool canSkip = eng_.feasible(s, !fresh) != Answer::No;
                if (canSkip) {
                    Work skip{s, w.stack};
                    skip.s.assume(!fresh);
                    skip.stack.pop_back();
                    out.push_back(std::move(skip));
                }
                if (canRead) {
                    s.assume(fresh);
                    out.insert(out.begin(), Work{std::move(s), w.stack});
                }
                return;
            }
            case PKind::RecordRead: {
                LinTerm loc = eng_.evalInt(s, *p.loc, bound);
                int i = eng_.findPred(s, HeapLabel::Real, loc, bound);
                if (i >= 0) s.preds[static_cast<std::size_t>(i)].valsRead.push_back(s.var(p.var));
                break;
            }
            case PKind::TransferHeap: eng_.transferHeap(s, p.label, p.to); break;
            case PKind::KillBranch: return;
            case PKind::DropAllPermissions: eng_.dropAllPermissions(s); break;
            case PKind::SpinDiscard: {
                bool ok = true;
                spinDiscard(w, p, bound, r, ok);
                if (!ok) return;
                break;
            }
            case PKind::CheckNoValsRead: {
                LinTerm loc = eng_.evalInt(s, *p.loc, bound);
                for (int idx : p.indices) {
                    int i = eng_.findPred(s, HeapLabel::Real, loc, idx);
                    if (i >= 0 && !s.preds[static_cast<std::size_t>(i)].valsRead.empty())
                        throw mkFailure(p.failKind, "values of conjunct " + std::to_string(idx) + " of " +
                                                        frontend::print(*p.loc) + "'s invariant were already read");
                }
                break;
            }
            case PKind::Fork: fork(std::move(w), p, out, r); return;
            case PKind::Checkpoint:
                if (opts_.onCheckpoint) opts_.onCheckpoint(s, p);
                if (p.final) r.finals.push_back(s);
                break;
        }
    } catch (const Failure& f) {
        report(s, p, f, r);
        return;
    } catch (const EncodingError& e) {
        report(s, p, mkFailure(e.diag.kind, e.diag.message), r);
        return;
    }
    if (!s.infeasible) out.push_back(std::move(w));
}

// A spinning read discards every value satisfying the loop condition. Whatever such a read would
// gain must therefore be pure; when the condition pins a single value it is marked as read.
void Executor::spinDiscard(Work& w, const Primitive& p, int bound, ExecResult& r, bool& ok) {
    SymState& s = w.s;
    LinTerm loc = eng_.evalInt(s, *p.loc, bound);
    SymState probe = s;
    LinTerm v(smt::Atom::fresh("spin"));
    probe.store["V"] = v;
    probe.assume(eng_.evalBool(probe, *p.e, bound));
    if (probe.infeasible || eng_.feasible(probe, Formula::top()) == Answer::No) return;
    eng_.dropAllPermissions(probe);
    AssertionPtr inst = eng_.invInstance(probe, bound, mkVar("V"), p.label);
    sym::Outcome o = eng_.inhale(probe, inst, bound);
    bool leak = !o.failures.empty();
    for (const auto& st : o.states)
        if (!st.infeasible && (!st.fields.empty() || !st.preds.empty())) leak = true;
    if (leak) {
        report(s, p,
               mkFailure(p.failKind, "a value discarded by the spin loop would carry resources of " +
                                         frontend::print(*p.loc) + "'s invariant (conjunct " + std::to_string(bound) + ")"),
               r);
        ok = false;
        return;
    }
    if (auto c = eng_.context().solver->impliedConstant(probe.path, v)) {
        int i = eng_.findPred(s, HeapLabel::Real, loc, bound);
        if (i >= 0) s.preds[static_cast<std::size_t>(i)].valsRead.push_back(LinTerm(*c));
    }
}

void Executor::fork(Work w, const Primitive& p, std::vector<Work>& out, ExecResult& r) {
    // hand each thread its precondition
    std::vector<SymState> states{std::move(w.s)};
    for (const auto& t : p.threads) {
        std::vector<SymState> next;
        Primitive at = p;
        at.span = t.preSpan;
        at.rule = "par-split";
        for (auto& st : states) {
            sym::Outcome o = eng_.exhale(st, t.pre, DiagKind::ExhaleFailure);
            for (const auto& f : o.failures) report(st, at, f, r);
            for (auto& x : o.states)
                if (!x.infeasible) next.push_back(std::move(x));
        }
        states = std::move(next);
    }
    for (auto& st : states) {
        for (const auto& t : p.threads) {
            SymState ts = st;
            ts.fields.clear();
            ts.preds.clear();
            std::vector<Primitive> plan;
            Primitive in;
            in.kind = PKind::Inhale;
            in.a = t.pre;
            in.span = t.preSpan;
            in.rule = "thread-precondition";
            plan.push_back(in);
            plan.insert(plan.end(), t.body.begin(), t.body.end());
            Primitive end;
            end.kind = PKind::Checkpoint;
            end.span = t.postSpan;
            end.rule = "end-of-thread";
            plan.push_back(end);
            Primitive post;
            post.kind = PKind::Exhale;
            post.a = t.post;
            post.span = t.postSpan;
            post.rule = "thread-postcondition";
            plan.push_back(post);
            Executor sub(eng_, ExecOptions{budget_, opts_.onCheckpoint, opts_.trace});
            ExecResult tr = sub.run(plan, std::move(ts));
            for (const auto& d : tr.diagnostics) addDiagnostic(r.diagnostics, d);
            r.branches += tr.branches;
            budget_ -= tr.branches;
            if (tr.capped) r.capped = true;
        }
        for (const auto& v : p.havocAfterJoin) bindFresh(st, v);
        std::vector<SymState> joined{std::move(st)};
        for (const auto& t : p.threads) {
            std::vector<SymState> next;
            for (auto& x : joined) {
                sym::Outcome o = eng_.inhale(x, t.post);
                for (const auto& f : o.failures) report(x, p, f, r);
                for (auto& y : o.states)
                    if (!y.infeasible) next.push_back(std::move(y));
            }
            joined = std::move(next);
        }
        for (auto& x : joined) out.push_back(Work{std::move(x), w.stack});
    }
}

}  // namespace weakmem::enc
