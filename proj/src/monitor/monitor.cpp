#include "weakmem/monitor/monitor.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace weakmem::monitor {

using smt::Answer;
using smt::LinTerm;
using smt::PermAmount;
using sym::FieldChunk;
using sym::PredChunk;
using sym::SymState;

namespace {

struct LocView {
    LinTerm loc;
    std::string name;
    std::vector<const FieldChunk*> fields;
    std::vector<const PredChunk*> preds;

    const FieldChunk* field(HeapLabel l, Field f) const {
        for (auto* c : fields)
            if (c->label == l && c->field == f) return c;
        return nullptr;
    }
    bool atomic() const {
        if (!preds.empty()) return true;
        bool anyVal = false;
        for (auto* c : fields) {
            if (c->field == Field::Rel || c->field == Field::Acq) return true;
            if (c->field == Field::Val) anyVal = true;
        }
        if (anyVal) return false;
        for (auto* c : fields)
            if (c->field == Field::Init && !c->perm.isExact()) return true;
        return false;
    }
};

std::string nameOf(const SymState& s, const LinTerm& t) {
    std::string best;
    for (const auto& [n, v] : s.store) {
        if (!(v == t)) continue;
        bool temp = !n.empty() && n[0] == '$';
        bool bestTemp = !best.empty() && best[0] == '$';
        if (best.empty() || (bestTemp && !temp)) best = n;
    }
    return best.empty() ? smt::toString(t) : best;
}

// Locations in a stable order: by display name, then by term text.
std::vector<LocView> views(const SymState& s, const sym::Engine& eng) {
    std::vector<LocView> out;
    auto slot = [&](const LinTerm& loc) -> LocView& {
        for (auto& v : out)
            if (v.loc == loc) return v;
        for (auto& v : out)
            if (eng.entails(s, smt::eq(v.loc, loc)) == Answer::Yes) return v;
        out.push_back(LocView{loc, nameOf(s, loc), {}, {}});
        return out.back();
    };
    for (const auto& c : s.fields) slot(c.loc).fields.push_back(&c);
    for (const auto& c : s.preds) slot(c.loc).preds.push_back(&c);
    std::sort(out.begin(), out.end(), [](const LocView& a, const LocView& b) {
        return a.name != b.name ? a.name < b.name : smt::toString(a.loc) < smt::toString(b.loc);
    });
    return out;
}

std::string valueText(const SymState& s, const sym::Engine& eng, const LinTerm& v) {
    if (v.isConstant()) return smt::toString(v.constant());
    if (auto c = eng.context().solver->impliedConstant(s.path, v)) return smt::toString(*c);
    return nameOf(s, v);
}

std::string superscript(const std::string& digits) {
    static const char* sup[] = {"⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"};
    std::string out;
    for (char ch : digits) out += (ch >= '0' && ch <= '9') ? sup[ch - '0'] : std::string(1, ch);
    return out;
}

std::string permText(const PermAmount& p) {
    if (!p.isExact()) return "[" + smt::toString(p) + "]";
    const auto& r = p.exact();
    std::string n = smt::toString(smt::Integer(boost::multiprecision::numerator(r)));
    std::string d = smt::toString(smt::Integer(boost::multiprecision::denominator(r)));
    return d == "1" ? superscript(n) : superscript(n) + "⁄" + superscript(d);
}

bool entailsEq(const SymState& s, const sym::Engine& eng, const LinTerm& t, long long c) {
    return eng.entails(s, smt::eq(t, LinTerm(c))) == Answer::Yes;
}

std::string invText(const sym::Engine& eng, int index) {
    const auto* t = eng.context().table;
    if (!t || index < 0 || static_cast<std::size_t>(index) >= t->size()) return "Q#" + std::to_string(index);
    return t->entry(index).text;
}

std::string conjunctText(const SymState& s, const sym::Engine& eng, const PredChunk& c) {
    std::string body = invText(eng, c.index);
    if (c.valsRead.empty()) return body;
    std::vector<std::string> vals;
    for (const auto& v : c.valsRead) {
        std::string t = valueText(s, eng, v);
        if (std::find(vals.begin(), vals.end(), t) == vals.end()) vals.push_back(t);
    }
    std::string set;
    for (std::size_t i = 0; i < vals.size(); ++i) set += (i ? ", " : "") + vals[i];
    return "(𝒱 ∈ {" + set + "} ⇒ obliterated) ∧ (" + body + ")";
}

std::vector<std::string> atomsAt(const SymState& s, const sym::Engine& eng, const LocView& v, HeapLabel l) {
    std::vector<std::string> out;
    if (!v.atomic()) {
        const FieldChunk* val = v.field(l, Field::Val);
        const FieldChunk* init = v.field(l, Field::Init);
        if (!val && !init) return out;
        if (init && entailsEq(s, eng, init->value, 0) && val) {
            out.push_back("Uninit(" + v.name + ")");
        } else if (val) {
            out.push_back(v.name + " ↦" + permText(val->perm) + " " + valueText(s, eng, val->value));
        } else {
            out.push_back("acc(" + v.name + ".init, " + smt::toString(init->perm) + ")");
        }
        return out;
    }
    const FieldChunk* init = v.field(l, Field::Init);
    if (init && entailsEq(s, eng, init->value, 1)) out.push_back("Init(" + v.name + ")");
    const FieldChunk* rel = v.field(l, Field::Rel);
    if (rel) {
        auto c = eng.context().solver->impliedConstant(s.path, rel->value);
        out.push_back("Rel(" + v.name + ", " + (c ? invText(eng, static_cast<int>(*c)) : "?") + ")");
    }
    std::vector<const PredChunk*> held;
    for (auto* p : v.preds)
        if (p->label == l) held.push_back(p);
    std::sort(held.begin(), held.end(), [](auto* a, auto* b) { return a->index < b->index; });
    const FieldChunk* acq = v.field(l, Field::Acq);
    if (acq) {
        bool rmw = entailsEq(s, eng, acq->value, 0);
        std::string body;
        for (std::size_t i = 0; i < held.size(); ++i) body += (i ? " ∗ " : "") + conjunctText(s, eng, *held[i]);
        if (held.empty()) body = "true";
        out.push_back(std::string(rmw ? "RMWAcq(" : "Acq(") + v.name + ", " + body + ")");
    } else {
        for (auto* p : held) out.push_back("AcqConjunct(" + v.name + ", " + conjunctText(s, eng, *p) + ")");
    }
    return out;
}

}  // namespace

std::vector<Violation> checkStateInvariants(const SymState& s, const sym::Engine& eng) {
    std::vector<Violation> out;
    for (const auto& v : views(s, eng)) {
        if (v.atomic()) continue;
        for (HeapLabel l : {HeapLabel::Real, HeapLabel::Up, HeapLabel::Down, HeapLabel::Tmp}) {
            const FieldChunk* val = v.field(l, Field::Val);
            const FieldChunk* init = v.field(l, Field::Init);
            if (!val && !init) continue;
            PermAmount pv = val ? val->perm : PermAmount();
            PermAmount pi = init ? init->perm : PermAmount();
            bool same = pv == pi || (eng.permAtLeast(s, pv, pi) == Answer::Yes && eng.permAtLeast(s, pi, pv) == Answer::Yes);
            if (!same) {
                out.push_back({v.name, toString(l),
                               "P[" + v.name + ".val] = " + smt::toString(pv) + " but P[" + v.name + ".init] = " +
                                   smt::toString(pi)});
                continue;
            }
            if (!val || !init || eng.permPositive(s, pv) != Answer::Yes) continue;
            bool mayBeUnset = eng.feasible(s, smt::eq(init->value, LinTerm(0LL))) != Answer::No;
            if (mayBeUnset && eng.permAtLeast(s, pv, smt::Rational(1)) != Answer::Yes)
                out.push_back({v.name, toString(l),
                               "P[" + v.name + ".val] = " + smt::toString(pv) + " while " + v.name +
                                   " may be uninitialised"});
        }
    }
    return out;
}

std::string reconstructAssertion(const SymState& s, const sym::Engine& eng) {
    auto vs = views(s, eng);
    std::vector<std::string> parts;
    for (HeapLabel l : {HeapLabel::Real, HeapLabel::Up, HeapLabel::Down, HeapLabel::Tmp}) {
        std::vector<std::string> atoms;
        for (const auto& v : vs) {
            auto a = atomsAt(s, eng, v, l);
            atoms.insert(atoms.end(), a.begin(), a.end());
        }
        if (atoms.empty()) continue;
        std::string joined;
        for (std::size_t i = 0; i < atoms.size(); ++i) joined += (i ? " ∗ " : "") + atoms[i];
        switch (l) {
            case HeapLabel::Real: parts.push_back(joined); break;
            case HeapLabel::Up: parts.push_back("⇑(" + joined + ")"); break;
            case HeapLabel::Down: parts.push_back("⇓(" + joined + ")"); break;
            case HeapLabel::Tmp: parts.push_back("tmp(" + joined + ")"); break;
        }
    }
    if (parts.empty()) return "true";
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? " ∗ " : "") + parts[i];
    return out;
}

StateReport report(const std::string& obligation, int line, const SymState& s, const sym::Engine& eng) {
    StateReport r;
    r.obligation = obligation;
    r.line = line;
    for (const auto& v : views(s, eng)) {
        std::string cls = s.isGhost(v.loc) ? "ghost" : v.atomic() ? "atomic" : "non-atomic";
        r.classification.emplace_back(v.name, cls);
    }
    r.violations = checkStateInvariants(s, eng);
    r.assertion = reconstructAssertion(s, eng);
    return r;
}

}  // namespace weakmem::monitor
