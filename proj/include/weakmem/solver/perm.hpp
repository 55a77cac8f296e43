#pragma once

#include "weakmem/solver/term.hpp"

#include <map>
#include <string>

namespace weakmem::smt {

// Permission amount: exact rational part plus rational multiples of wildcard tokens.
class PermAmount {
public:
    PermAmount() = default;
    PermAmount(const Rational& c) : c_(c) {}  // NOLINT
    static PermAmount token(const Atom& w) {
        PermAmount p;
        p.tokens_.emplace(w, Rational(1));
        return p;
    }

    const Rational& exact() const { return c_; }
    const std::map<Atom, Rational>& tokens() const { return tokens_; }
    bool isExact() const { return tokens_.empty(); }
    bool isZero() const { return tokens_.empty() && c_ == 0; }

    PermAmount operator+(const PermAmount& o) const;
    PermAmount operator-(const PermAmount& o) const;
    PermAmount scaled(const Rational& k) const;
    bool operator==(const PermAmount& o) const { return c_ == o.c_ && tokens_ == o.tokens_; }
    bool operator!=(const PermAmount& o) const { return !(*this == o); }

private:
    Rational c_ = 0;
    std::map<Atom, Rational> tokens_;
};

std::string toString(const PermAmount& p);

// p (rel) 0
struct PermFact {
    enum class Rel { Le, Lt, Eq };
    PermAmount term;
    Rel rel = Rel::Le;
};

PermFact permLe(const PermAmount& a, const PermAmount& b);
PermFact permLt(const PermAmount& a, const PermAmount& b);
PermFact permEq(const PermAmount& a, const PermAmount& b);
std::string toString(const PermFact& f);

}  // namespace weakmem::smt
