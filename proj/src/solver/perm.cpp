#include "weakmem/solver/perm.hpp"

namespace weakmem::smt {

PermAmount PermAmount::operator+(const PermAmount& o) const {
    PermAmount r = *this;
    r.c_ += o.c_;
    for (const auto& [w, k] : o.tokens_) {
        auto& slot = r.tokens_[w];
        slot += k;
        if (slot == 0) r.tokens_.erase(w);
    }
    return r;
}

PermAmount PermAmount::operator-(const PermAmount& o) const { return *this + o.scaled(-1); }

PermAmount PermAmount::scaled(const Rational& k) const {
    PermAmount r;
    if (k == 0) return r;
    r.c_ = c_ * k;
    for (const auto& [w, c] : tokens_) r.tokens_.emplace(w, c * k);
    return r;
}

std::string toString(const PermAmount& p) {
    std::string s;
    for (const auto& [w, k] : p.tokens()) {
        std::string name = "w" + std::to_string(w.id());
        if (k == 1)
            s += s.empty() ? name : " + " + name;
        else if (k == -1)
            s += s.empty() ? "-" + name : " - " + name;
        else
            s += (s.empty() ? "" : " + ") + toString(k) + "*" + name;
    }
    if (s.empty()) return toString(p.exact());
    if (p.exact() > 0) s += " + " + toString(p.exact());
    if (p.exact() < 0) s += " - " + toString(Rational(-p.exact()));
    return s;
}

PermFact permLe(const PermAmount& a, const PermAmount& b) { return {a - b, PermFact::Rel::Le}; }
PermFact permLt(const PermAmount& a, const PermAmount& b) { return {a - b, PermFact::Rel::Lt}; }
PermFact permEq(const PermAmount& a, const PermAmount& b) { return {a - b, PermFact::Rel::Eq}; }

std::string toString(const PermFact& f) {
    const char* op = f.rel == PermFact::Rel::Le ? " <= 0" : f.rel == PermFact::Rel::Lt ? " < 0" : " == 0";
    return toString(f.term) + op;
}

}  // namespace weakmem::smt
