#include "weakmem/solver/formula.hpp"

#include <set>

namespace weakmem::smt {

namespace {

Integer gcdOf(const LinTerm& t) {
    Integer g = 0;
    for (const auto& [a, k] : t.coeffs()) g = boost::multiprecision::gcd(g, Integer(abs(k)));
    return g;
}

// ceil(a / b) for b > 0
Integer ceilDiv(const Integer& a, const Integer& b) {
    Integer q = a / b;
    if (a % b != 0 && a > 0) q += 1;
    return q;
}

LinTerm divideCoeffs(const LinTerm& t, const Integer& g, const Integer& newConst) {
    LinTerm r(newConst);
    for (const auto& [a, k] : t.coeffs()) r += LinTerm(a).scaled(k / g);
    return r;
}

LinTerm signNormal(const LinTerm& t) {
    if (!t.coeffs().empty() && t.coeffs().begin()->second < 0) return -t;
    return t;
}

const std::vector<Formula>& emptyParts() {
    static const std::vector<Formula> none;
    return none;
}

}  // namespace

Formula Formula::bottom() {
    Formula f;
    f.kind_ = Kind::False;
    return f;
}

Formula Formula::eqZero(const LinTerm& t) {
    if (t.isConstant()) return t.constant() == 0 ? top() : bottom();
    Integer g = gcdOf(t);
    if (t.constant() % g != 0) return bottom();
    Formula f;
    f.kind_ = Kind::Eq;
    f.term_ = signNormal(g == 1 ? t : divideCoeffs(t, g, t.constant() / g));
    return f;
}

Formula Formula::neZero(const LinTerm& t) {
    Formula e = eqZero(t);
    if (e.kind_ != Kind::Eq) return e.isTrue() ? bottom() : top();
    e.kind_ = Kind::Ne;
    return e;
}

Formula Formula::leZero(const LinTerm& t) {
    if (t.isConstant()) return t.constant() <= 0 ? top() : bottom();
    Integer g = gcdOf(t);
    Formula f;
    f.kind_ = Kind::Le;
    f.term_ = g == 1 ? t : divideCoeffs(t, g, ceilDiv(t.constant(), g));
    return f;
}

Formula Formula::conj(std::vector<Formula> parts) {
    std::vector<Formula> out;
    std::set<std::string> seen;
    std::vector<Formula> work = std::move(parts);
    for (std::size_t i = 0; i < work.size(); ++i) {
        Formula p = work[i];
        if (p.kind_ == Kind::True) continue;
        if (p.kind_ == Kind::False) return bottom();
        if (p.kind_ == Kind::And) {
            for (const auto& q : *p.parts_) work.push_back(q);
            continue;
        }
        if (seen.insert(p.key()).second) out.push_back(std::move(p));
    }
    if (out.empty()) return top();
    if (out.size() == 1) return out[0];
    Formula f;
    f.kind_ = Kind::And;
    f.parts_ = std::make_shared<const std::vector<Formula>>(std::move(out));
    return f;
}

Formula Formula::disj(std::vector<Formula> parts) {
    std::vector<Formula> out;
    std::set<std::string> seen;
    std::vector<Formula> work = std::move(parts);
    for (std::size_t i = 0; i < work.size(); ++i) {
        Formula p = work[i];
        if (p.kind_ == Kind::False) continue;
        if (p.kind_ == Kind::True) return top();
        if (p.kind_ == Kind::Or) {
            for (const auto& q : *p.parts_) work.push_back(q);
            continue;
        }
        if (seen.insert(p.key()).second) out.push_back(std::move(p));
    }
    if (out.empty()) return bottom();
    if (out.size() == 1) return out[0];
    Formula f;
    f.kind_ = Kind::Or;
    f.parts_ = std::make_shared<const std::vector<Formula>>(std::move(out));
    return f;
}

const std::vector<Formula>& Formula::parts() const { return parts_ ? *parts_ : emptyParts(); }

Formula Formula::negate() const {
    switch (kind_) {
        case Kind::True: return bottom();
        case Kind::False: return top();
        case Kind::Eq: {
            Formula f = *this;
            f.kind_ = Kind::Ne;
            return f;
        }
        case Kind::Ne: {
            Formula f = *this;
            f.kind_ = Kind::Eq;
            return f;
        }
        case Kind::Le: return leZero(-term_ + LinTerm(1));
        case Kind::And: {
            std::vector<Formula> ps;
            for (const auto& p : *parts_) ps.push_back(p.negate());
            return disj(std::move(ps));
        }
        case Kind::Or: {
            std::vector<Formula> ps;
            for (const auto& p : *parts_) ps.push_back(p.negate());
            return conj(std::move(ps));
        }
    }
    return top();
}

std::string Formula::key() const {
    switch (kind_) {
        case Kind::True: return "T";
        case Kind::False: return "F";
        case Kind::Eq: return "(=" + term_.key() + ")";
        case Kind::Le: return "(<=" + term_.key() + ")";
        case Kind::Ne: return "(!=" + term_.key() + ")";
        case Kind::And:
        case Kind::Or: {
            std::string s = kind_ == Kind::And ? "(and" : "(or";
            for (const auto& p : *parts_) s += " " + p.key();
            return s + ")";
        }
    }
    return "?";
}

void Formula::collectAtoms(std::vector<Atom>& out) const {
    if (isAtom()) {
        term_.collectAtoms(out);
        return;
    }
    for (const auto& p : parts()) p.collectAtoms(out);
}

bool Formula::hasOpaque() const {
    if (isAtom()) return term_.hasOpaque();
    for (const auto& p : parts())
        if (p.hasOpaque()) return true;
    return false;
}

Formula eq(const LinTerm& a, const LinTerm& b) { return Formula::eqZero(a - b); }
Formula ne(const LinTerm& a, const LinTerm& b) { return Formula::neZero(a - b); }
Formula le(const LinTerm& a, const LinTerm& b) { return Formula::leZero(a - b); }
Formula lt(const LinTerm& a, const LinTerm& b) { return Formula::leZero(a - b + LinTerm(1)); }
Formula ge(const LinTerm& a, const LinTerm& b) { return le(b, a); }
Formula gt(const LinTerm& a, const LinTerm& b) { return lt(b, a); }
Formula operator&&(const Formula& a, const Formula& b) { return Formula::conj({a, b}); }
Formula operator||(const Formula& a, const Formula& b) { return Formula::disj({a, b}); }
Formula operator!(const Formula& a) { return a.negate(); }
Formula implies(const Formula& a, const Formula& b) { return a.negate() || b; }
Formula ite(const Formula& c, const Formula& a, const Formula& b) { return (c && a) || (c.negate() && b); }

SetTerm SetTerm::inserted(const LinTerm& x) const {
    SetTerm s = *this;
    s.elems.push_back(x);
    return s;
}

Formula member(const LinTerm& x, const SetTerm& s) {
    std::vector<Formula> ds;
    for (const auto& e : s.elems) ds.push_back(eq(x, e));
    return Formula::disj(std::move(ds));
}

std::string toString(const Formula& f) {
    switch (f.kind()) {
        case Formula::Kind::True: return "true";
        case Formula::Kind::False: return "false";
        case Formula::Kind::Eq: return toString(f.term()) + " == 0";
        case Formula::Kind::Le: return toString(f.term()) + " <= 0";
        case Formula::Kind::Ne: return toString(f.term()) + " != 0";
        case Formula::Kind::And:
        case Formula::Kind::Or: {
            std::string sep = f.kind() == Formula::Kind::And ? " && " : " || ";
            std::string s = "(";
            for (std::size_t i = 0; i < f.parts().size(); ++i) {
                if (i) s += sep;
                s += toString(f.parts()[i]);
            }
            return s + ")";
        }
    }
    return "?";
}

}  // namespace weakmem::smt
