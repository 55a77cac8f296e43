#pragma once

#include "weakmem/solver/term.hpp"

#include <memory>
#include <string>
#include <vector>

namespace weakmem::smt {

// Negation normal form over integer atoms: t == 0, t <= 0, t != 0, and/or.
class Formula {
public:
    enum class Kind { True, False, Eq, Le, Ne, And, Or };

    Formula() = default;  // true

    static Formula top() { return Formula(); }
    static Formula bottom();
    static Formula eqZero(const LinTerm& t);
    static Formula leZero(const LinTerm& t);
    static Formula neZero(const LinTerm& t);
    static Formula conj(std::vector<Formula> parts);
    static Formula disj(std::vector<Formula> parts);

    Kind kind() const { return kind_; }
    bool isTrue() const { return kind_ == Kind::True; }
    bool isFalse() const { return kind_ == Kind::False; }
    bool isAtom() const { return kind_ == Kind::Eq || kind_ == Kind::Le || kind_ == Kind::Ne; }
    const LinTerm& term() const { return term_; }
    const std::vector<Formula>& parts() const;

    Formula negate() const;
    std::string key() const;
    void collectAtoms(std::vector<Atom>& out) const;
    bool hasOpaque() const;

    bool operator==(const Formula& o) const { return key() == o.key(); }

private:
    Kind kind_ = Kind::True;
    LinTerm term_;
    std::shared_ptr<const std::vector<Formula>> parts_;
};

Formula eq(const LinTerm& a, const LinTerm& b);
Formula ne(const LinTerm& a, const LinTerm& b);
Formula le(const LinTerm& a, const LinTerm& b);
Formula lt(const LinTerm& a, const LinTerm& b);
Formula ge(const LinTerm& a, const LinTerm& b);
Formula gt(const LinTerm& a, const LinTerm& b);
Formula operator&&(const Formula& a, const Formula& b);
Formula operator||(const Formula& a, const Formula& b);
Formula operator!(const Formula& a);
Formula implies(const Formula& a, const Formula& b);
Formula ite(const Formula& c, const Formula& a, const Formula& b);

// Finite integer sets given by explicit element terms (used for valsRead).
struct SetTerm {
    std::vector<LinTerm> elems;
    SetTerm inserted(const LinTerm& x) const;
};
Formula member(const LinTerm& x, const SetTerm& s);

std::string toString(const Formula& f);

}  // namespace weakmem::smt
