#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace weakmem::smt {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Operations the linear fragment cannot interpret; kept as uninterpreted applications.
enum class OpaqueOp { Mul, Div, Mod, BitAnd, BitOr, BitXor, Shl, Shr };

const char* opaqueName(OpaqueOp op);

class LinTerm;
struct AtomData;

// A symbol or an opaque application; compared by canonical key.
class Atom {
public:
    // Fresh symbol. Ids come from a per-thread counter (see resetSymbolCounter).
    static Atom fresh(const std::string& hint);
    // Symbol with an explicit id, used by tests and the SMT-LIB reader-side mapping.
    static Atom symbol(std::uint64_t id, const std::string& hint);
    static Atom app(OpaqueOp op, std::vector<LinTerm> args);

    bool isSymbol() const;
    std::uint64_t id() const;
    const std::string& hint() const;
    OpaqueOp op() const;
    const std::vector<LinTerm>& args() const;
    const std::string& key() const;

    friend bool operator<(const Atom& a, const Atom& b);
    friend bool operator==(const Atom& a, const Atom& b);
    friend bool operator!=(const Atom& a, const Atom& b) { return !(a == b); }

private:
    std::shared_ptr<const AtomData> d_;
};

void resetSymbolCounter();

// c + sum(coeff * atom) over mathematical integers.
class LinTerm {
public:
    LinTerm() = default;
    LinTerm(long long c) : c_(c) {}  // NOLINT
    LinTerm(const Integer& c) : c_(c) {}  // NOLINT
    explicit LinTerm(const Atom& a) { coeffs_.emplace(a, 1); }

    static LinTerm var(const Atom& a) { return LinTerm(a); }

    const Integer& constant() const { return c_; }
    const std::map<Atom, Integer>& coeffs() const { return coeffs_; }
    bool isConstant() const { return coeffs_.empty(); }
    // Single atom with coefficient 1 and no constant.
    std::optional<Atom> asAtom() const;

    LinTerm operator+(const LinTerm& o) const;
    LinTerm operator-(const LinTerm& o) const;
    LinTerm operator-() const;
    LinTerm scaled(const Integer& k) const;
    LinTerm& operator+=(const LinTerm& o);

    bool operator==(const LinTerm& o) const { return c_ == o.c_ && coeffs_ == o.coeffs_; }
    bool operator!=(const LinTerm& o) const { return !(*this == o); }
    bool operator<(const LinTerm& o) const;

    std::string key() const;
    void collectAtoms(std::vector<Atom>& out) const;
    bool hasOpaque() const;

private:
    Integer c_ = 0;
    std::map<Atom, Integer> coeffs_;
};

struct AtomData {
    bool isSymbol = true;
    std::uint64_t id = 0;
    std::string hint;
    OpaqueOp op = OpaqueOp::Mul;
    std::vector<LinTerm> args;
    std::string key;
};

// Build arithmetic with constant folding; nonlinear parts become opaque atoms.
LinTerm mul(const LinTerm& a, const LinTerm& b);
LinTerm applyOpaque(OpaqueOp op, const LinTerm& a, const LinTerm& b);

// Euclidean division and modulo (remainder is always non-negative).
Integer euclidDiv(const Integer& a, const Integer& b);
Integer euclidMod(const Integer& a, const Integer& b);

std::string toString(const Integer& v);
std::string toString(const Rational& v);
std::string toString(const LinTerm& t);

}  // namespace weakmem::smt
