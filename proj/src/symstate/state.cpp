#include "weakmem/symstate/state.hpp"

#include "weakmem/frontend/parser.hpp"

#include <algorithm>
#include <functional>

namespace weakmem::sym {

using namespace ast;
using smt::Answer;
using smt::Atom;

void SymState::assume(const Formula& f) {
    if (f.isTrue()) return;
    if (f.isFalse()) infeasible = true;
    path.push_back(f);
}

LinTerm SymState::var(const std::string& name) {
    auto it = store.find(name);
    if (it != store.end()) return it->second;
    LinTerm t(Atom::fresh(name));
    store.emplace(name, t);
    return t;
}

std::string SymState::digest() const {
    std::vector<std::string> parts;
    for (const auto& c : fields)
        parts.push_back(smt::toString(c.loc) + "." + toString(c.field) + "@" + toString(c.label) + ":" + smt::toString(c.perm));
    for (const auto& p : preds)
        parts.push_back("AcqConjunct(" + smt::toString(p.loc) + "," + std::to_string(p.index) + ")@" + toString(p.label) +
                        ":" + smt::toString(p.perm) + "/" + std::to_string(p.valsRead.size()));
    std::sort(parts.begin(), parts.end());
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& s : parts)
        for (unsigned char ch : s) h = (h ^ ch) * 1099511628211ULL;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf) + " chunks=" + std::to_string(fields.size() + preds.size()) + " facts=" +
           std::to_string(path.size());
}

namespace {

Failure failure(DiagKind k, std::string msg, bool incomplete = false) {
    Failure f;
    f.kind = k;
    f.message = std::move(msg);
    f.incomplete = incomplete;
    return f;
}

std::string locText(const ExprPtr& e) { return e ? frontend::print(*e) : "?"; }

PermAmount amountOf(const PermExpr& p) { return Rational(p.num, p.den); }

}  // namespace

// ---- evaluation

namespace {

// Heap reads go to `heap` (the pre-exhale snapshot during exhale); facts and fresh names go to `s`.
struct Eval {
    const Engine& eng;
    SymState& s;
    const SymState& heap;
    int bound;
    const std::map<std::string, LinTerm>* tmpSources = nullptr;
    HeapLabel fallback = HeapLabel::Real;

    LinTerm readField(const Expr& e) {
        LinTerm loc = integer(*e.args[0]);
        HeapLabel l = heap.effective(loc, e.label);
        if (tmpSources && l == HeapLabel::Tmp) {
            auto it = tmpSources->find(loc.key() + "." + toString(e.field));
            if (it != tmpSources->end()) return it->second;
            int i = eng.findField(heap, HeapLabel::Tmp, loc, e.field);
            if (i < 0) l = heap.effective(loc, fallback);
        }
        int i = eng.findField(heap, l, loc, e.field);
        if (i < 0 || eng.permPositive(s, heap.fields[static_cast<std::size_t>(i)].perm) != Answer::Yes)
            throw failure(DiagKind::InsufficientPermission,
                          "no permission to read " + locText(e.args[0]) + "." + toString(e.field) +
                              (l == HeapLabel::Real ? "" : std::string("@") + toString(l)));
        return heap.fields[static_cast<std::size_t>(i)].value;
    }

    LinTerm integer(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Int: return LinTerm(static_cast<long long>(e.value));
            case ExprKind::Bool: return LinTerm(e.flag ? 1LL : 0LL);
            case ExprKind::Var: return s.var(e.name);
            case ExprKind::Unary:
                if (e.unop == UnOp::Neg) return -integer(*e.args[0]);
                break;
            case ExprKind::Binary: {
                if (isComparison(e.binop) || isBoolOp(e.binop)) break;
                LinTerm a = integer(*e.args[0]);
                LinTerm b = integer(*e.args[1]);
                switch (e.binop) {
                    case BinOp::Add: return a + b;
                    case BinOp::Sub: return a - b;
                    case BinOp::Mul: return smt::mul(a, b);
                    case BinOp::Div: return smt::applyOpaque(smt::OpaqueOp::Div, a, b);
                    case BinOp::Mod: return smt::applyOpaque(smt::OpaqueOp::Mod, a, b);
                    case BinOp::BitAnd: return smt::applyOpaque(smt::OpaqueOp::BitAnd, a, b);
                    case BinOp::BitOr: return smt::applyOpaque(smt::OpaqueOp::BitOr, a, b);
                    case BinOp::BitXor: return smt::applyOpaque(smt::OpaqueOp::BitXor, a, b);
                    case BinOp::Shl: return smt::applyOpaque(smt::OpaqueOp::Shl, a, b);
                    case BinOp::Shr: return smt::applyOpaque(smt::OpaqueOp::Shr, a, b);
                    default: break;
                }
                break;
            }
            case ExprKind::HeapRead: return readField(e);
            default: break;
        }
        throw failure(DiagKind::TypeError, "expression '" + frontend::print(e) + "' is not an integer term");
    }

    Formula boolean(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Bool: return e.flag ? Formula::top() : Formula::bottom();
            case ExprKind::Unary:
                if (e.unop == UnOp::Not) return !boolean(*e.args[0]);
                break;
            case ExprKind::Binary:
                switch (e.binop) {
                    case BinOp::And: return boolean(*e.args[0]) && boolean(*e.args[1]);
                    case BinOp::Or: return boolean(*e.args[0]) || boolean(*e.args[1]);
                    case BinOp::Eq:
                    case BinOp::Ne: {
                        if (isBoolish(*e.args[0]) || isBoolish(*e.args[1])) {
                            Formula a = boolean(*e.args[0]), b = boolean(*e.args[1]);
                            Formula same = (a && b) || (!a && !b);
                            return e.binop == BinOp::Eq ? same : !same;
                        }
                        LinTerm a = integer(*e.args[0]), b = integer(*e.args[1]);
                        return e.binop == BinOp::Eq ? smt::eq(a, b) : smt::ne(a, b);
                    }
                    case BinOp::Lt: return smt::lt(integer(*e.args[0]), integer(*e.args[1]));
                    case BinOp::Le: return smt::le(integer(*e.args[0]), integer(*e.args[1]));
                    case BinOp::Gt: return smt::gt(integer(*e.args[0]), integer(*e.args[1]));
                    case BinOp::Ge: return smt::ge(integer(*e.args[0]), integer(*e.args[1]));
                    default: break;
                }
                break;
            case ExprKind::ValsReadContains: {
                LinTerm loc = integer(*e.args[0]);
                LinTerm x = integer(*e.args[1]);
                int idx = e.index.bound ? bound : e.index.index;
                int i = eng.findPred(heap, heap.effective(loc, e.label), loc, idx);
                if (i < 0) return Formula::bottom();
                return smt::member(x, smt::SetTerm{heap.preds[static_cast<std::size_t>(i)].valsRead});
            }
            default: break;
        }
        return smt::ne(integer(e), LinTerm(0LL));
    }

    static bool isBoolish(const Expr& e) {
        if (e.kind == ExprKind::Bool) return true;
        if (e.kind == ExprKind::Unary) return e.unop == UnOp::Not;
        if (e.kind == ExprKind::Binary) return isComparison(e.binop) || isBoolOp(e.binop);
        return e.kind == ExprKind::ValsReadContains;
    }
};

}  // namespace

LinTerm Engine::evalInt(SymState& s, const Expr& e, int bound) const {
    Eval ev{*this, s, s, bound};
    return ev.integer(e);
}

Formula Engine::evalBool(SymState& s, const Expr& e, int bound) const {
    Eval ev{*this, s, s, bound};
    return ev.boolean(e);
}

// ---- decisions

Answer Engine::entails(const SymState& s, const Formula& f) const {
    if (f.isTrue()) return Answer::Yes;
    return c_.solver->entails(s.path, f);
}

Answer Engine::feasible(const SymState& s, const Formula& extra) const {
    if (extra.isFalse()) return Answer::No;
    // relevance slicing needs seed atoms; with none, ask about the whole path
    if (extra.isTrue()) return c_.solver->isFeasible(s.path);
    return c_.solver->feasibleWith(s.path, {extra});
}

Answer Engine::permAtLeast(const SymState& s, const PermAmount& held, const PermAmount& need) const {
    PermAmount d = held - need;
    if (d.isExact()) return d.exact() >= 0 ? Answer::Yes : Answer::No;
    return c_.solver->permEntails(s.permFacts, smt::permLe(need, held));
}

Answer Engine::permPositive(const SymState& s, const PermAmount& held) const {
    if (held.isExact()) return held.exact() > 0 ? Answer::Yes : Answer::No;
    return c_.solver->permEntails(s.permFacts, smt::permLt(PermAmount(), held));
}

Answer Engine::permZero(const SymState& s, const PermAmount& held) const {
    if (held.isExact()) return held.exact() <= 0 ? Answer::Yes : Answer::No;
    return c_.solver->permEntails(s.permFacts, smt::permLe(held, PermAmount()));
}

std::vector<std::string> Engine::counterFacts(const SymState& s, const Formula& goal) const {
    std::vector<smt::Atom> seeds;
    goal.collectAtoms(seeds);
    std::vector<std::string> out;
    for (const auto& f : smt::relevantFacts(s.path, seeds)) {
        out.push_back(smt::toString(f));
        if (out.size() >= 8) break;
    }
    return out;
}

// ---- chunks

int Engine::findField(const SymState& s, HeapLabel l, const LinTerm& loc, Field f) const {
    for (std::size_t i = 0; i < s.fields.size(); ++i) {
        const auto& c = s.fields[i];
        if (c.label == l && c.field == f && c.loc == loc) return static_cast<int>(i);
    }
    for (std::size_t i = 0; i < s.fields.size(); ++i) {
        const auto& c = s.fields[i];
        if (c.label == l && c.field == f && entails(s, smt::eq(c.loc, loc)) == Answer::Yes) return static_cast<int>(i);
    }
    return -1;
}

int Engine::findPred(const SymState& s, HeapLabel l, const LinTerm& loc, int index) const {
    for (std::size_t i = 0; i < s.preds.size(); ++i) {
        const auto& c = s.preds[i];
        if (c.label == l && c.index == index && c.loc == loc) return static_cast<int>(i);
    }
    for (std::size_t i = 0; i < s.preds.size(); ++i) {
        const auto& c = s.preds[i];
        if (c.label == l && c.index == index && entails(s, smt::eq(c.loc, loc)) == Answer::Yes)
            return static_cast<int>(i);
    }
    return -1;
}

PermAmount Engine::permOf(const SymState& s, HeapLabel l, const LinTerm& loc, Field f) const {
    int i = findField(s, s.effective(loc, l), loc, f);
    return i < 0 ? PermAmount() : s.fields[static_cast<std::size_t>(i)].perm;
}

PermAmount Engine::predPermOf(const SymState& s, HeapLabel l, const LinTerm& loc, int index) const {
    int i = findPred(s, s.effective(loc, l), loc, index);
    return i < 0 ? PermAmount() : s.preds[static_cast<std::size_t>(i)].perm;
}

namespace {

void noteLocation(SymState& s, const LinTerm& loc) {
    for (const auto& l : s.locations)
        if (l == loc) return;
    s.locations.push_back(loc);
}

// Cap: a field chunk never exceeds full permission; an overflow is an assumption failure.
void applyCap(SymState& s, const PermAmount& p) {
    if (p.isExact()) {
        if (p.exact() > 1) {
            s.infeasible = true;
            s.notes.push_back("permission above 1 inhaled; path assumed infeasible");
        }
        return;
    }
    if (p.exact() >= 1) {
        bool allPositive = true;
        for (const auto& [w, k] : p.tokens()) allPositive = allPositive && k > 0;
        if (allPositive) {
            s.infeasible = true;
            s.notes.push_back("permission above 1 inhaled; path assumed infeasible");
            return;
        }
    }
    s.permFacts.push_back(smt::permLe(p, Rational(1)));
}

}  // namespace

void Engine::addField(SymState& s, HeapLabel l, const LinTerm& loc, Field f, const PermAmount& k) const {
    l = s.effective(loc, l);
    noteLocation(s, loc);
    int i = findField(s, l, loc, f);
    if (i >= 0) {
        auto& c = s.fields[static_cast<std::size_t>(i)];
        c.perm = c.perm + k;
        applyCap(s, c.perm);
        return;
    }
    // separate chunks whose exact parts would overflow must be different locations
    for (const auto& c : s.fields) {
        if (c.label != l || c.field != f) continue;
        PermAmount sum = c.perm + k;
        if (sum.exact() > 1 || (sum.isExact() && sum.exact() > 1)) s.assume(smt::ne(c.loc, loc));
    }
    FieldChunk c;
    c.label = l;
    c.loc = loc;
    c.field = f;
    c.perm = k;
    c.value = LinTerm(Atom::fresh(std::string(toString(f))));
    applyCap(s, c.perm);
    s.fields.push_back(std::move(c));
}

void Engine::addPred(SymState& s, HeapLabel l, const LinTerm& loc, int index, const PermAmount& k) const {
    l = s.effective(loc, l);
    noteLocation(s, loc);
    int i = findPred(s, l, loc, index);
    if (i >= 0) {
        auto& c = s.preds[static_cast<std::size_t>(i)];
        c.perm = c.perm + k;
        return;
    }
    PredChunk c;
    c.label = l;
    c.loc = loc;
    c.index = index;
    c.perm = k;
    s.preds.push_back(std::move(c));
}

LinTerm Engine::newLocation(SymState& s, const std::string& hint) const {
    LinTerm t(Atom::fresh(hint));
    for (const auto& l : s.locations) s.assume(smt::ne(t, l));
    s.locations.push_back(t);
    return t;
}

void Engine::transferHeap(SymState& s, HeapLabel from, HeapLabel to) const {
    std::vector<FieldChunk> moving;
    std::vector<FieldChunk> keep;
    for (auto& c : s.fields) (c.label == from ? moving : keep).push_back(std::move(c));
    s.fields = std::move(keep);
    for (auto& c : moving) {
        int i = findField(s, to, c.loc, c.field);
        if (i >= 0) {
            auto& d = s.fields[static_cast<std::size_t>(i)];
            d.perm = d.perm + c.perm;
            s.assume(smt::eq(d.value, c.value));
            applyCap(s, d.perm);
        } else {
            c.label = to;
            s.fields.push_back(std::move(c));
        }
    }
    std::vector<PredChunk> pmoving;
    std::vector<PredChunk> pkeep;
    for (auto& c : s.preds) (c.label == from ? pmoving : pkeep).push_back(std::move(c));
    s.preds = std::move(pkeep);
    for (auto& c : pmoving) {
        int i = findPred(s, to, c.loc, c.index);
        if (i >= 0) {
            auto& d = s.preds[static_cast<std::size_t>(i)];
            d.perm = d.perm + c.perm;
            for (const auto& v : c.valsRead) d.valsRead.push_back(v);
        } else {
            c.label = to;
            s.preds.push_back(std::move(c));
        }
    }
}

void Engine::dropAllPermissions(SymState& s) const {
    s.fields.clear();
    s.preds.clear();
}

spec::GhostTest Engine::ghostTest(const SymState& s) const {
    return [&s](const Expr& loc) {
        if (loc.kind != ExprKind::Var) return false;
        auto it = s.store.find(loc.name);
        return it != s.store.end() && s.isGhost(it->second);
    };
}

AssertionPtr Engine::invInstance(const SymState& s, int index, const ExprPtr& value, HeapLabel label) const {
    const auto& entry = c_.table->entry(index);
    AssertionPtr inst = spec::instantiate(entry.body, value);
    return spec::encodeAssertion(inst, *c_.table, *c_.program, label, ghostTest(s));
}

std::vector<std::pair<int, SymState>> Engine::resolveIndex(SymState s, const Assertion& a, int bound) const {
    std::vector<std::pair<int, SymState>> out;
    if (!a.loc) {
        out.emplace_back(a.index.bound ? bound : a.index.index, std::move(s));
        return out;
    }
    LinTerm t = evalInt(s, *a.loc, bound);
    if (auto c = c_.solver->impliedConstant(s.path, t)) {
        if (*c >= 0 && *c < static_cast<long long>(c_.table->size())) out.emplace_back(static_cast<int>(*c), std::move(s));
        return out;
    }
    for (std::size_t i = 0; i < c_.table->size(); ++i) {
        Formula f = smt::eq(t, LinTerm(static_cast<long long>(i)));
        if (feasible(s, f) == Answer::No) continue;
        SymState b = s;
        b.assume(f);
        out.emplace_back(static_cast<int>(i), std::move(b));
    }
    return out;
}

// ---- inhale

namespace {

bool isSourceForm(AKind k) {
    switch (k) {
        case AKind::PointsTo:
        case AKind::Uninit:
        case AKind::Init:
        case AKind::Acq:
        case AKind::Rel:
        case AKind::RMWAcq:
        case AKind::Up:
        case AKind::Down:
        case AKind::Macro: return true;
        default: return false;
    }
}

struct Item {
    SymState s;
    std::vector<AssertionPtr> todo;  // stack, back is next
};

void push(Item& it, const AssertionPtr& a) {
    if (a->kind == AKind::Star) {
        for (auto k = a->kids.rbegin(); k != a->kids.rend(); ++k) it.todo.push_back(*k);
    } else {
        it.todo.push_back(a);
    }
}

}  // namespace

Outcome Engine::inhale(SymState s0, const AssertionPtr& a, int bound) const {
    Outcome out;
    std::vector<Item> work;
    work.push_back({std::move(s0), {}});
    push(work.back(), a);
    while (!work.empty()) {
        Item it = std::move(work.back());
        work.pop_back();
        SymState& s = it.s;
        try {
            while (!it.todo.empty() && !s.infeasible) {
                AssertionPtr x = it.todo.back();
                it.todo.pop_back();
                if (isSourceForm(x->kind)) {
                    push(it, spec::encodeAssertion(x, *c_.table, *c_.program, HeapLabel::Real, ghostTest(s)));
                    continue;
                }
                switch (x->kind) {
                    case AKind::Pure: s.assume(evalBool(s, *x->expr, bound)); break;
                    case AKind::Star: push(it, x); break;
                    case AKind::Implies:
                    case AKind::Cond: {
                        Formula g = evalBool(s, *x->expr, bound);
                        AssertionPtr yes = x->kids[0];
                        AssertionPtr no = x->kind == AKind::Cond ? x->kids[1] : nullptr;
                        Answer pos = g.isTrue() ? Answer::Yes : g.isFalse() ? Answer::No : entails(s, g);
                        if (pos == Answer::Yes) {
                            push(it, yes);
                            break;
                        }
                        Answer neg = g.isFalse() ? Answer::Yes : entails(s, !g);
                        if (neg == Answer::Yes) {
                            if (no) push(it, no);
                            break;
                        }
                        Item other = it;
                        other.s.assume(!g);
                        if (no) push(other, no);
                        work.push_back(std::move(other));
                        s.assume(g);
                        push(it, yes);
                        break;
                    }
                    case AKind::Acc: {
                        LinTerm loc = evalInt(s, *x->loc, bound);
                        PermAmount k;
                        if (x->perm.wildcard) {
                            Atom w = Atom::fresh("w");
                            k = PermAmount::token(w);
                            s.permFacts.push_back(smt::permLt(PermAmount(), k));
                        } else {
                            k = amountOf(x->perm);
                        }
                        addField(s, x->label, loc, x->field, k);
                        break;
                    }
                    case AKind::Pred: {
                        LinTerm loc = evalInt(s, *x->loc, bound);
                        int idx = x->index.bound ? bound : x->index.index;
                        PermAmount k;
                        if (x->perm.wildcard) {
                            Atom w = Atom::fresh("w");
                            k = PermAmount::token(w);
                            s.permFacts.push_back(smt::permLt(PermAmount(), k));
                        } else {
                            k = amountOf(x->perm);
                        }
                        addPred(s, x->label, loc, idx, k);
                        break;
                    }
                    case AKind::ValsReadEmpty:
                        // fresh instances start empty; held ones keep their history
                        break;
                    case AKind::InvInstance: {
                        auto cands = resolveIndex(std::move(s), *x, bound);
                        if (cands.empty()) {
                            it.s.infeasible = true;
                            break;
                        }
                        for (std::size_t i = 1; i < cands.size(); ++i) {
                            Item other{std::move(cands[i].second), it.todo};
                            push(other, invInstance(other.s, cands[i].first, x->value, x->label));
                            work.push_back(std::move(other));
                        }
                        it.s = std::move(cands[0].second);
                        push(it, invInstance(it.s, cands[0].first, x->value, x->label));
                        break;
                    }
                    default: break;
                }
            }
            if (!s.infeasible) out.states.push_back(std::move(s));
        } catch (const Failure& f) {
            // a dead path cannot fail
            if (feasible(s, Formula::top()) != Answer::No) out.failures.push_back(f);
        } catch (const EncodingError& e) {
            out.failures.push_back(failure(e.diag.kind, e.diag.message));
        }
    }
    return out;
}

// ---- exhale and check


namespace {

// Deducts k from a chunk's permission; returns an empty string on success.
template <class Chunk>
std::string take(const Engine& eng, SymState& s, std::vector<Chunk>& chunks, int i, const PermExpr& k, bool consume,
                 bool& incomplete) {
    auto& c = chunks[static_cast<std::size_t>(i)];
    if (k.wildcard) {
        Answer a = eng.permPositive(s, c.perm);
        if (a != Answer::Yes) {
            incomplete = a == Answer::Unknown;
            return "no permission held";
        }
        if (!consume) return "";
        Atom w = Atom::fresh("w");
        PermAmount wt = PermAmount::token(w);
        s.permFacts.push_back(smt::permLt(PermAmount(), wt));
        s.permFacts.push_back(smt::permLt(wt, c.perm));
        c.perm = c.perm - wt;
        return "";
    }
    PermAmount need = amountOf(k);
    Answer a = eng.permAtLeast(s, c.perm, need);
    if (a != Answer::Yes) {
        incomplete = a == Answer::Unknown;
        return "held " + smt::toString(c.perm) + ", need " + smt::toString(need);
    }
    if (!consume) return "";
    c.perm = c.perm - need;
    if (eng.permZero(s, c.perm) == Answer::Yes) chunks.erase(chunks.begin() + i);
    return "";
}

std::string permText(const PermExpr& p) {
    if (p.wildcard) return "wildcard";
    return p.den == 1 ? std::to_string(p.num) : std::to_string(p.num) + "/" + std::to_string(p.den);
}

}  // namespace

Outcome Engine::exhale(SymState s0, const AssertionPtr& a, DiagKind failKind, int bound, ExhaleMode mode,
                       HeapLabel fallback) const {
    Outcome out;
    const SymState snapshot = s0;
    struct XItem {
        SymState s;
        std::vector<AssertionPtr> todo;
        std::map<std::string, LinTerm> sources;
    };
    std::vector<XItem> work;
    {
        Item first{std::move(s0), {}};
        push(first, a);
        work.push_back({std::move(first.s), std::move(first.todo), {}});
    }
    while (!work.empty()) {
        XItem it = std::move(work.back());
        work.pop_back();
        SymState& s = it.s;
        Eval ev{*this, s, snapshot, bound, mode == ExhaleMode::PreferTmp ? &it.sources : nullptr, fallback};
        auto pushX = [](XItem& i, const AssertionPtr& x) {
            if (x->kind == AKind::Star) {
                for (auto k = x->kids.rbegin(); k != x->kids.rend(); ++k) i.todo.push_back(*k);
            } else {
                i.todo.push_back(x);
            }
        };
        try {
            while (!it.todo.empty() && !s.infeasible) {
                AssertionPtr x = it.todo.back();
                it.todo.pop_back();
                if (isSourceForm(x->kind)) {
                    pushX(it, spec::encodeAssertion(x, *c_.table, *c_.program, HeapLabel::Real, ghostTest(s)));
                    continue;
                }
                switch (x->kind) {
                    case AKind::Pure: {
                        Formula g = ev.boolean(*x->expr);
                        Answer r = entails(s, g);
                        if (r != Answer::Yes) {
                            Failure f = failure(failKind, "could not prove " + frontend::print(*x->expr) +
                                                              (r == Answer::Unknown ? " (solver gave up)" : ""),
                                                r == Answer::Unknown);
                            f.facts = counterFacts(s, g);
                            throw f;
                        }
                        break;
                    }
                    case AKind::Star: pushX(it, x); break;
                    case AKind::Implies:
                    case AKind::Cond: {
                        Formula g = ev.boolean(*x->expr);
                        AssertionPtr yes = x->kids[0];
                        AssertionPtr no = x->kind == AKind::Cond ? x->kids[1] : nullptr;
                        Answer pos = g.isTrue() ? Answer::Yes : g.isFalse() ? Answer::No : entails(s, g);
                        if (pos == Answer::Yes) {
                            pushX(it, yes);
                            break;
                        }
                        Answer neg = g.isFalse() ? Answer::Yes : entails(s, !g);
                        if (neg == Answer::Yes) {
                            if (no) pushX(it, no);
                            break;
                        }
                        XItem other = it;
                        other.s.assume(!g);
                        if (no) pushX(other, no);
                        work.push_back(std::move(other));
                        s.assume(g);
                        pushX(it, yes);
                        break;
                    }
                    case AKind::Acc: {
                        LinTerm loc = ev.integer(*x->loc);
                        HeapLabel l = s.effective(loc, x->label);
                        std::string what = "acc(" + locText(x->loc) + "." + toString(x->field) +
                                           (l == HeapLabel::Real ? "" : std::string("@") + toString(l)) + ", " +
                                           permText(x->perm) + ")";
                        bool incomplete = false;
                        if (mode == ExhaleMode::PreferTmp && l == HeapLabel::Tmp) {
                            HeapLabel fb = s.effective(loc, fallback);
                            std::string whatFb = "acc(" + locText(x->loc) + "." + toString(x->field) + "@tmp/" +
                                                 toString(fb) + ", " + permText(x->perm) + ")";
                            int ti = findField(s, HeapLabel::Tmp, loc, x->field);
                            int fi = findField(s, fb, loc, x->field);
                            std::string key = loc.key() + "." + toString(x->field);
                            PermAmount tmpHeld = ti >= 0 ? s.fields[static_cast<std::size_t>(ti)].perm : PermAmount();
                            bool tmpCovers = ti >= 0 && (x->perm.wildcard ? permPositive(s, tmpHeld) == Answer::Yes
                                                                          : permAtLeast(s, tmpHeld, amountOf(x->perm)) == Answer::Yes);
                            if (tmpCovers) {
                                it.sources[key] = s.fields[static_cast<std::size_t>(ti)].value;
                                take(*this, s, s.fields, ti, x->perm, true, incomplete);
                                break;
                            }
                            if (fi < 0) throw failure(failKind, "insufficient permission for " + whatFb);
                            LinTerm fbVal = s.fields[static_cast<std::size_t>(fi)].value;
                            PermExpr rest = x->perm;
                            if (ti >= 0 && !x->perm.wildcard) {
                                // everything tmp has, the rest from the fallback heap
                                LinTerm tmpVal = s.fields[static_cast<std::size_t>(ti)].value;
                                PermAmount remaining = amountOf(x->perm) - tmpHeld;
                                s.fields.erase(s.fields.begin() + ti);
                                fi = findField(s, fb, loc, x->field);
                                auto& fc = s.fields[static_cast<std::size_t>(fi)];
                                Answer enough = permAtLeast(s, fc.perm, remaining);
                                if (enough != Answer::Yes)
                                    throw failure(failKind, "insufficient permission for " + whatFb, enough == Answer::Unknown);
                                s.assume(smt::eq(tmpVal, fbVal));
                                fc.perm = fc.perm - remaining;
                                if (permZero(s, fc.perm) == Answer::Yes) s.fields.erase(s.fields.begin() + fi);
                                it.sources[key] = tmpVal;
                                break;
                            }
                            std::string why = take(*this, s, s.fields, fi, rest, true, incomplete);
                            if (!why.empty()) throw failure(failKind, "insufficient permission for " + whatFb + ": " + why, incomplete);
                            it.sources[key] = fbVal;
                            break;
                        }
                        int i = findField(s, l, loc, x->field);
                        if (i < 0) throw failure(failKind, "insufficient permission for " + what + ": none held");
                        std::string why = take(*this, s, s.fields, i, x->perm, consume_, incomplete);
                        if (!why.empty()) throw failure(failKind, "insufficient permission for " + what + ": " + why, incomplete);
                        break;
                    }
                    case AKind::Pred: {
                        LinTerm loc = ev.integer(*x->loc);
                        HeapLabel l = s.effective(loc, x->label);
                        int idx = x->index.bound ? bound : x->index.index;
                        std::string what = "acc(AcqConjunct(" + locText(x->loc) + ", " + std::to_string(idx) + ")" +
                                           (l == HeapLabel::Real ? "" : std::string("@") + toString(l)) + ", " +
                                           permText(x->perm) + ")";
                        bool incomplete = false;
                        int i = -1;
                        if (mode == ExhaleMode::PreferTmp && l == HeapLabel::Tmp) {
                            int ti = findPred(s, HeapLabel::Tmp, loc, idx);
                            bool tmpCovers = ti >= 0 && (x->perm.wildcard
                                                             ? permPositive(s, s.preds[static_cast<std::size_t>(ti)].perm) == Answer::Yes
                                                             : permAtLeast(s, s.preds[static_cast<std::size_t>(ti)].perm, amountOf(x->perm)) == Answer::Yes);
                            i = tmpCovers ? ti : findPred(s, s.effective(loc, fallback), loc, idx);
                        } else {
                            i = findPred(s, l, loc, idx);
                        }
                        if (i < 0) throw failure(failKind, "insufficient permission for " + what + ": none held");
                        std::string why = take(*this, s, s.preds, i, x->perm, consume_, incomplete);
                        if (!why.empty()) throw failure(failKind, "insufficient permission for " + what + ": " + why, incomplete);
                        break;
                    }
                    case AKind::ValsReadEmpty: {
                        LinTerm loc = ev.integer(*x->loc);
                        int idx = x->index.bound ? bound : x->index.index;
                        int i = findPred(snapshot, snapshot.effective(loc, x->label), loc, idx);
                        if (i < 0) throw failure(failKind, "AcqConjunct(" + locText(x->loc) + ", " + std::to_string(idx) + ") not held");
                        if (!snapshot.preds[static_cast<std::size_t>(i)].valsRead.empty())
                            throw failure(failKind, "values were already read through AcqConjunct(" + locText(x->loc) + ", " +
                                                        std::to_string(idx) + "); the acquire permission cannot be handed on");
                        break;
                    }
                    case AKind::InvInstance: {
                        auto cands = resolveIndex(std::move(s), *x, bound);
                        if (cands.empty()) {
                            it.s.infeasible = true;
                            break;
                        }
                        for (std::size_t i = 1; i < cands.size(); ++i) {
                            XItem other{std::move(cands[i].second), it.todo, it.sources};
                            pushX(other, invInstance(other.s, cands[i].first, x->value, x->label));
                            work.push_back(std::move(other));
                        }
                        it.s = std::move(cands[0].second);
                        pushX(it, invInstance(it.s, cands[0].first, x->value, x->label));
                        break;
                    }
                    default: break;
                }
            }
            if (!s.infeasible) out.states.push_back(std::move(s));
        } catch (const Failure& f) {
            // a dead path cannot fail
            if (feasible(s, Formula::top()) != Answer::No) out.failures.push_back(f);
        } catch (const EncodingError& e) {
            out.failures.push_back(failure(e.diag.kind, e.diag.message));
        }
    }
    return out;
}

Outcome Engine::check(SymState s, const AssertionPtr& a, DiagKind failKind, int bound) const {
    Engine probe(*this);
    probe.consume_ = false;
    Outcome o = probe.exhale(s, a, failKind, bound);
    return o;
}

}  // namespace weakmem::sym
