#include "weakmem/speclogic/speclogic.hpp"

#include "weakmem/frontend/parser.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <stdexcept>

namespace weakmem::spec {

using namespace ast;

namespace {

[[noreturn]] void fail(DiagKind k, const SourceSpan& sp, const std::string& rule, const std::string& msg) {
    Diagnostic d;
    d.kind = k;
    d.span = sp;
    d.rule = rule;
    d.message = msg;
    throw EncodingError{d};
}

}  // namespace

// ---- table

AssertionPtr invariantBody(const InvRef& ref, const Program& p) {
    std::vector<AssertionPtr> parts;
    for (const auto& n : ref.names) {
        const InvariantDecl* d = p.findInvariant(n);
        if (!d) fail(DiagKind::UndeclaredVariable, ref.span, "invariant", "unknown invariant '" + n + "'");
        parts.push_back(expandMacros(d->body, p));
    }
    return mkStar(std::move(parts), ref.span);
}

int InvariantTable::intern(const AssertionPtr& body, const SourceSpan& span) {
    std::string text = frontend::print(*body);
    auto it = byText_.find(text);
    if (it != byText_.end()) return it->second;
    int idx = static_cast<int>(entries_.size());
    entries_.push_back({idx, body, text, span});
    byText_.emplace(text, idx);
    return idx;
}

int InvariantTable::add(const InvRef& ref, const Program& p) {
    auto found = occ_.find(ref.key());
    if (found != occ_.end()) return found->second.whole;
    AssertionPtr body = invariantBody(ref, p);
    Occurrence o;
    o.whole = intern(body, ref.span);
    if (body->kind == AKind::Star) {
        for (const auto& k : body->kids) {
            int c = intern(k, ref.span);
            if (std::find(o.conjuncts.begin(), o.conjuncts.end(), c) == o.conjuncts.end()) o.conjuncts.push_back(c);
        }
        // reassembly must give back the whole body
        std::vector<AssertionPtr> parts;
        for (const auto& k : body->kids) parts.push_back(k);
        if (frontend::print(*mkStar(parts)) != entries_[static_cast<std::size_t>(o.whole)].text)
            throw std::logic_error("invariant conjuncts do not reassemble");
    } else {
        o.conjuncts.push_back(o.whole);
    }
    conjByWhole_.emplace(o.whole, o.conjuncts);
    occ_.emplace(ref.key(), o);
    return o.whole;
}

int InvariantTable::wholeOf(const InvRef& ref) const {
    auto it = occ_.find(ref.key());
    if (it == occ_.end()) throw std::out_of_range("invariant not indexed: " + ref.key());
    return it->second.whole;
}

const std::vector<int>& InvariantTable::conjunctsOf(const InvRef& ref) const {
    auto it = occ_.find(ref.key());
    if (it == occ_.end()) throw std::out_of_range("invariant not indexed: " + ref.key());
    return it->second.conjuncts;
}

const std::vector<int>& InvariantTable::conjunctsOfIndex(int whole) const {
    static const std::vector<int> none;
    auto it = conjByWhole_.find(whole);
    return it == conjByWhole_.end() ? none : it->second;
}

std::string InvariantTable::toJson() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : entries_) {
        nlohmann::json j;
        j["index"] = e.index;
        j["span"] = {{"line", e.span.line}, {"column", e.span.column}, {"offset", e.span.offset}, {"length", e.span.length}};
        j["body"] = e.text;
        auto c = conjByWhole_.find(e.index);
        if (c != conjByWhole_.end()) j["conjuncts"] = c->second;
        arr.push_back(j);
    }
    return arr.dump(2);
}

namespace {

void indexAssertion(const Assertion& a, const Program& p, InvariantTable& t, std::set<std::string>& seenInv) {
    switch (a.kind) {
        case AKind::Acq:
        case AKind::Rel:
        case AKind::RMWAcq: {
            t.add(a.inv, p);
            // invariants may mention further invariants
            for (const auto& n : a.inv.names) {
                if (!seenInv.insert(n).second) continue;
                if (const InvariantDecl* d = p.findInvariant(n)) indexAssertion(*expandMacros(d->body, p), p, t, seenInv);
            }
            break;
        }
        case AKind::Macro: indexAssertion(*expandMacros(std::make_shared<Assertion>(a), p), p, t, seenInv); break;
        default:
            for (const auto& k : a.kids) indexAssertion(*k, p, t, seenInv);
            break;
    }
}

}  // namespace

InvariantTable buildInvariantTable(const Program& p) {
    InvariantTable t;
    std::set<std::string> seen;
    auto addRef = [&](const InvRef& r) {
        t.add(r, p);
        for (const auto& n : r.names) {
            if (!seen.insert(n).second) continue;
            if (const InvariantDecl* d = p.findInvariant(n)) indexAssertion(*expandMacros(d->body, p), p, t, seen);
        }
    };
    for (const auto& proc : p.procedures) {
        indexAssertion(*proc.pre, p, t, seen);
        indexAssertion(*proc.post, p, t, seen);
        forEachStmt(proc.body, [&](const Stmt& s) {
            switch (s.kind) {
                case SKind::AllocAcq:
                case SKind::AllocRmw: addRef(s.inv); break;
                case SKind::Rewrite:
                    addRef(s.inv);
                    addRef(s.inv2);
                    break;
                case SKind::FenceRel: indexAssertion(*s.annot, p, t, seen); break;
                case SKind::While:
                    if (s.hasInvariant) indexAssertion(*s.annot, p, t, seen);
                    break;
                case SKind::Par:
                    for (const auto& th : s.threads) {
                        indexAssertion(*th.pre, p, t, seen);
                        indexAssertion(*th.post, p, t, seen);
                    }
                    break;
                default: break;
            }
        });
    }
    return t;
}

// ---- substitution and macros

ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& sub) {
    if (!e) return e;
    if (e->kind == ExprKind::Var) {
        auto it = sub.find(e->name);
        return it == sub.end() ? e : it->second;
    }
    if (e->args.empty()) return e;
    auto out = std::make_shared<Expr>(*e);
    bool changed = false;
    for (auto& a : out->args) {
        ExprPtr n = substitute(a, sub);
        changed = changed || n != a;
        a = n;
    }
    // location variables of Read/Cas are names, not operands
    if (e->kind == ExprKind::Read || e->kind == ExprKind::Cas) {
        auto it = sub.find(e->name);
        if (it != sub.end() && it->second->kind == ExprKind::Var) {
            out->name = it->second->name;
            changed = true;
        }
    }
    return changed ? ExprPtr(out) : e;
}

AssertionPtr substitute(const AssertionPtr& a, const std::map<std::string, ExprPtr>& sub) {
    if (!a) return a;
    auto out = std::make_shared<Assertion>(*a);
    out->expr = substitute(a->expr, sub);
    out->loc = substitute(a->loc, sub);
    out->value = substitute(a->value, sub);
    for (auto& e : out->args) e = substitute(e, sub);
    for (auto& k : out->kids) k = substitute(k, sub);
    return out;
}

AssertionPtr instantiate(const AssertionPtr& q, const ExprPtr& value) { return substitute(q, {{"V", value}}); }

namespace {

AssertionPtr expandMacrosRec(const AssertionPtr& a, const Program& p, int depth) {
    if (!a) return a;
    if (depth > 64) fail(DiagKind::TypeError, a->span, "macro", "macro expansion too deep (recursive definition?)");
    if (a->kind == AKind::Macro) {
        const MacroDecl* m = p.findMacro(a->name);
        if (!m || m->params.size() != a->args.size()) return a;
        std::map<std::string, ExprPtr> sub;
        for (std::size_t i = 0; i < m->params.size(); ++i) sub[m->params[i]] = a->args[i];
        return expandMacrosRec(substitute(m->body, sub), p, depth + 1);
    }
    if (a->kids.empty()) return a;
    std::vector<AssertionPtr> kids;
    bool changed = false;
    for (const auto& k : a->kids) {
        kids.push_back(expandMacrosRec(k, p, depth));
        changed = changed || kids.back() != k;
    }
    if (!changed) return a;
    if (a->kind == AKind::Star) return mkStar(std::move(kids), a->span);
    auto out = std::make_shared<Assertion>(*a);
    out->kids = std::move(kids);
    return out;
}

}  // namespace

AssertionPtr expandMacros(const AssertionPtr& a, const Program& p) { return expandMacrosRec(a, p, 0); }

// ---- relabel

namespace {

HeapLabel mapLabel(HeapLabel l, LabelMap f, const SourceSpan& sp) {
    if (l == f.from) return f.to;
    if (f.from == HeapLabel::Real && l != HeapLabel::Real)
        fail(DiagKind::DoubleModality, sp, "modality",
             std::string("nested modality: atom already tagged @") + toString(l) + ", cannot move to @" + toString(f.to));
    return l;
}

bool isGhost(const GhostTest& g, const ExprPtr& loc) { return g && loc && g(*loc); }

}  // namespace

ExprPtr relabel(const ExprPtr& e, LabelMap f, const GhostTest& ghost) {
    if (!e || e->args.empty()) return e;
    auto out = std::make_shared<Expr>(*e);
    for (auto& a : out->args) a = relabel(a, f, ghost);
    if ((e->kind == ExprKind::HeapRead || e->kind == ExprKind::ValsReadContains) && !isGhost(ghost, e->args[0]))
        out->label = mapLabel(e->label, f, e->span);
    return out;
}

AssertionPtr relabel(const AssertionPtr& a, LabelMap f, const GhostTest& ghost) {
    if (!a) return a;
    auto out = std::make_shared<Assertion>(*a);
    switch (a->kind) {
        case AKind::Acc:
        case AKind::Pred:
        case AKind::ValsReadEmpty:
            if (!isGhost(ghost, a->loc)) out->label = mapLabel(a->label, f, a->span);
            break;
        case AKind::InvInstance: out->label = mapLabel(a->label, f, a->span); break;
        case AKind::Up:
        case AKind::Down:
            if (f.from == HeapLabel::Real) fail(DiagKind::DoubleModality, a->span, "modality", "nested modality");
            break;
        default: break;
    }
    out->expr = relabel(a->expr, f, ghost);
    for (auto& k : out->kids) k = relabel(k, f, ghost);
    return out;
}

// ---- encoding

namespace {

ExprPtr heapRead(const ExprPtr& loc, Field f, HeapLabel l) { return mkHeapRead(loc, f, l); }

AssertionPtr fact(ExprPtr lhs, ExprPtr rhs) { return mkPure(mkBinary(BinOp::Eq, std::move(lhs), std::move(rhs))); }

struct Encoder {
    const InvariantTable& t;
    const Program& p;
    const GhostTest& ghost;

    HeapLabel labelFor(const ExprPtr& loc, HeapLabel l) const { return isGhost(ghost, loc) ? HeapLabel::Real : l; }

    AssertionPtr enc(const AssertionPtr& a, HeapLabel label) const {
        switch (a->kind) {
            case AKind::Pure: return a;
            case AKind::PointsTo: {
                HeapLabel l = labelFor(a->loc, label);
                std::vector<AssertionPtr> parts{mkAcc(a->loc, Field::Val, l, a->perm), mkAcc(a->loc, Field::Init, l, a->perm)};
                if (a->value) parts.push_back(fact(heapRead(a->loc, Field::Val, l), a->value));
                parts.push_back(fact(heapRead(a->loc, Field::Init, l), mkInt(1)));
                return mkStar(std::move(parts), a->span);
            }
            case AKind::Uninit: {
                HeapLabel l = labelFor(a->loc, label);
                return mkStar({mkAcc(a->loc, Field::Val, l, {}), mkAcc(a->loc, Field::Init, l, {}),
                               fact(heapRead(a->loc, Field::Init, l), mkInt(0))},
                              a->span);
            }
            case AKind::Init: {
                HeapLabel l = labelFor(a->loc, label);
                return mkStar({mkAcc(a->loc, Field::Init, l, wildcard()), fact(heapRead(a->loc, Field::Init, l), mkInt(1))},
                              a->span);
            }
            case AKind::Rel: {
                HeapLabel l = labelFor(a->loc, label);
                int idx = t.wholeOf(a->inv);
                return mkStar({mkAcc(a->loc, Field::Rel, l, wildcard()), fact(heapRead(a->loc, Field::Rel, l), mkInt(idx))},
                              a->span);
            }
            case AKind::Acq:
            case AKind::RMWAcq: {
                HeapLabel l = labelFor(a->loc, label);
                bool acq = a->kind == AKind::Acq;
                std::vector<AssertionPtr> parts{mkAcc(a->loc, Field::Acq, l, wildcard()),
                                                fact(heapRead(a->loc, Field::Acq, l), mkInt(acq ? 1 : 0))};
                for (int i : t.conjunctsOf(a->inv)) {
                    IndexRef ir{i, false};
                    parts.push_back(mkPred(a->loc, ir, l, acq ? PermExpr{} : wildcard()));
                    if (acq) parts.push_back(mkValsReadEmpty(a->loc, ir, l));
                }
                return mkStar(std::move(parts), a->span);
            }
            case AKind::Star: {
                std::vector<AssertionPtr> kids;
                for (const auto& k : a->kids) kids.push_back(enc(k, label));
                return mkStar(std::move(kids), a->span);
            }
            case AKind::Implies: return mkImplies(a->expr, enc(a->kids[0], label), a->span);
            case AKind::Cond: return mkCond(a->expr, enc(a->kids[0], label), enc(a->kids[1], label), a->span);
            case AKind::Up:
            case AKind::Down:
                if (label != HeapLabel::Real)
                    fail(DiagKind::DoubleModality, a->span, "modality",
                         std::string("modality nested under @") + toString(label));
                return enc(a->kids[0], a->kind == AKind::Up ? HeapLabel::Up : HeapLabel::Down);
            case AKind::Macro: {
                AssertionPtr x = expandMacros(a, p);
                if (x->kind == AKind::Macro) fail(DiagKind::UndeclaredVariable, a->span, "macro", "unknown definition '" + a->name + "'");
                return enc(x, label);
            }
            default:
                // already encoded
                return label == HeapLabel::Real ? a : relabel(a, {HeapLabel::Real, label}, ghost);
        }
    }

    static PermExpr wildcard() {
        PermExpr w;
        w.wildcard = true;
        return w;
    }
};

}  // namespace

AssertionPtr encodeAssertion(const AssertionPtr& a, const InvariantTable& t, const Program& p, HeapLabel label,
                             const GhostTest& ghost) {
    Encoder e{t, p, ghost};
    return e.enc(a, label);
}

bool mentionsDown(const Assertion& a) {
    if (a.kind == AKind::Down) return true;
    if ((a.kind == AKind::Acc || a.kind == AKind::Pred || a.kind == AKind::InvInstance) && a.label == HeapLabel::Down)
        return true;
    for (const auto& k : a.kids)
        if (mentionsDown(*k)) return true;
    return false;
}

void freeVariables(const Expr& e, std::vector<std::string>& out) {
    auto add = [&](const std::string& n) {
        if (!n.empty() && std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
    };
    if (e.kind == ExprKind::Var || e.kind == ExprKind::Read || e.kind == ExprKind::Cas) add(e.name);
    for (const auto& a : e.args) freeVariables(*a, out);
}

void freeVariables(const Assertion& a, std::vector<std::string>& out) {
    if (a.expr) freeVariables(*a.expr, out);
    if (a.loc) freeVariables(*a.loc, out);
    if (a.value) freeVariables(*a.value, out);
    for (const auto& e : a.args) freeVariables(*e, out);
    for (const auto& k : a.kids) freeVariables(*k, out);
}

}  // namespace weakmem::spec
