#include "weakmem/solver/term.hpp"

#include <sstream>

namespace weakmem::smt {

namespace {
thread_local std::uint64_t g_nextSymbol = 1;
}

void resetSymbolCounter() { g_nextSymbol = 1; }

const char* opaqueName(OpaqueOp op) {
    switch (op) {
        case OpaqueOp::Mul: return "mul";
        case OpaqueOp::Div: return "div";
        case OpaqueOp::Mod: return "mod";
        case OpaqueOp::BitAnd: return "band";
        case OpaqueOp::BitOr: return "bor";
        case OpaqueOp::BitXor: return "bxor";
        case OpaqueOp::Shl: return "shl";
        case OpaqueOp::Shr: return "shr";
    }
    return "?";
}

Atom Atom::fresh(const std::string& hint) { return symbol(g_nextSymbol++, hint); }

Atom Atom::symbol(std::uint64_t id, const std::string& hint) {
    auto d = std::make_shared<AtomData>();
    d->isSymbol = true;
    d->id = id;
    d->hint = hint;
    // zero-padded so that key order matches creation order
    std::ostringstream os;
    os << "$";
    os.width(10);
    os.fill('0');
    os << id;
    d->key = os.str();
    Atom a;
    a.d_ = std::move(d);
    return a;
}

Atom Atom::app(OpaqueOp op, std::vector<LinTerm> args) {
    auto d = std::make_shared<AtomData>();
    d->isSymbol = false;
    d->op = op;
    std::string key = std::string(opaqueName(op)) + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) key += ",";
        key += args[i].key();
    }
    key += ")";
    d->key = std::move(key);
    d->args = std::move(args);
    Atom a;
    a.d_ = std::move(d);
    return a;
}

bool Atom::isSymbol() const { return d_->isSymbol; }
std::uint64_t Atom::id() const { return d_->id; }
const std::string& Atom::hint() const { return d_->hint; }
OpaqueOp Atom::op() const { return d_->op; }
const std::vector<LinTerm>& Atom::args() const { return d_->args; }
const std::string& Atom::key() const { return d_->key; }

bool operator<(const Atom& a, const Atom& b) {
    if (a.d_ == b.d_) return false;
    return a.d_->key < b.d_->key;
}
bool operator==(const Atom& a, const Atom& b) { return a.d_ == b.d_ || a.d_->key == b.d_->key; }

std::optional<Atom> LinTerm::asAtom() const {
    if (c_ != 0 || coeffs_.size() != 1 || coeffs_.begin()->second != 1) return std::nullopt;
    return coeffs_.begin()->first;
}

LinTerm& LinTerm::operator+=(const LinTerm& o) {
    c_ += o.c_;
    for (const auto& [a, k] : o.coeffs_) {
        auto it = coeffs_.find(a);
        if (it == coeffs_.end()) {
            coeffs_.emplace(a, k);
        } else {
            it->second += k;
            if (it->second == 0) coeffs_.erase(it);
        }
    }
    return *this;
}

LinTerm LinTerm::operator+(const LinTerm& o) const {
    LinTerm r = *this;
    r += o;
    return r;
}

LinTerm LinTerm::operator-() const { return scaled(-1); }

LinTerm LinTerm::operator-(const LinTerm& o) const { return *this + o.scaled(-1); }

LinTerm LinTerm::scaled(const Integer& k) const {
    LinTerm r;
    if (k == 0) return r;
    r.c_ = c_ * k;
    for (const auto& [a, c] : coeffs_) r.coeffs_.emplace(a, c * k);
    return r;
}

bool LinTerm::operator<(const LinTerm& o) const {
    if (c_ != o.c_) return c_ < o.c_;
    return coeffs_ < o.coeffs_;
}

std::string LinTerm::key() const {
    std::string s = c_.str();
    for (const auto& [a, k] : coeffs_) s += "+" + k.str() + "*" + a.key();
    return s;
}

void LinTerm::collectAtoms(std::vector<Atom>& out) const {
    for (const auto& [a, k] : coeffs_) {
        out.push_back(a);
        if (!a.isSymbol())
            for (const auto& arg : a.args()) arg.collectAtoms(out);
    }
}

bool LinTerm::hasOpaque() const {
    for (const auto& [a, k] : coeffs_)
        if (!a.isSymbol()) return true;
    return false;
}

Integer euclidDiv(const Integer& a, const Integer& b) {
    Integer q = a / b;  // truncating
    Integer r = a - q * b;
    if (r < 0) q += (b > 0 ? -1 : 1);
    return q;
}

Integer euclidMod(const Integer& a, const Integer& b) {
    Integer r = a % b;
    if (r < 0) r += (b > 0 ? b : -b);
    return r;
}

LinTerm mul(const LinTerm& a, const LinTerm& b) {
    if (a.isConstant()) return b.scaled(a.constant());
    if (b.isConstant()) return a.scaled(b.constant());
    return LinTerm(Atom::app(OpaqueOp::Mul, {a, b}));
}

LinTerm applyOpaque(OpaqueOp op, const LinTerm& a, const LinTerm& b) {
    if (op == OpaqueOp::Mul) return mul(a, b);
    if (a.isConstant() && b.isConstant()) {
        const Integer& x = a.constant();
        const Integer& y = b.constant();
        switch (op) {
            case OpaqueOp::Div:
                if (y != 0) return LinTerm(euclidDiv(x, y));
                break;
            case OpaqueOp::Mod:
                if (y != 0) return LinTerm(euclidMod(x, y));
                break;
            case OpaqueOp::BitAnd:
                if (x >= 0 && y >= 0) return LinTerm(Integer(x & y));
                break;
            case OpaqueOp::BitOr:
                if (x >= 0 && y >= 0) return LinTerm(Integer(x | y));
                break;
            case OpaqueOp::BitXor:
                if (x >= 0 && y >= 0) return LinTerm(Integer(x ^ y));
                break;
            case OpaqueOp::Shl:
                if (x >= 0 && y >= 0 && y < 256) return LinTerm(Integer(x << static_cast<unsigned>(y)));
                break;
            case OpaqueOp::Shr:
                if (x >= 0 && y >= 0 && y < 256) return LinTerm(Integer(x >> static_cast<unsigned>(y)));
                break;
            case OpaqueOp::Mul: break;
        }
    }
    // identities that keep terms linear
    if (b.isConstant()) {
        const Integer& y = b.constant();
        if ((op == OpaqueOp::Div) && y == 1) return a;
        if ((op == OpaqueOp::Mod) && (y == 1 || y == -1)) return LinTerm(0);
        if ((op == OpaqueOp::Shl || op == OpaqueOp::Shr) && y == 0) return a;
        if (op == OpaqueOp::Shl && y > 0 && y < 64) return a.scaled(Integer(1) << static_cast<unsigned>(y));
    }
    return LinTerm(Atom::app(op, {a, b}));
}

std::string toString(const Integer& v) { return v.str(); }

std::string toString(const Rational& v) {
    auto n = boost::multiprecision::numerator(v);
    auto d = boost::multiprecision::denominator(v);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

namespace {
std::string atomText(const Atom& a) {
    if (a.isSymbol()) return a.hint() + "#" + std::to_string(a.id());
    std::string s = std::string(opaqueName(a.op())) + "(";
    for (std::size_t i = 0; i < a.args().size(); ++i) {
        if (i) s += ", ";
        s += toString(a.args()[i]);
    }
    return s + ")";
}
}  // namespace

std::string toString(const LinTerm& t) {
    std::string s;
    for (const auto& [a, k] : t.coeffs()) {
        std::string part = atomText(a);
        if (k == 1) {
            s += s.empty() ? part : " + " + part;
        } else if (k == -1) {
            s += s.empty() ? "-" + part : " - " + part;
        } else if (k < 0) {
            s += (s.empty() ? "-" : " - ") + Integer(-k).str() + "*" + part;
        } else {
            s += (s.empty() ? "" : " + ") + k.str() + "*" + part;
        }
    }
    if (s.empty()) return t.constant().str();
    if (t.constant() > 0) s += " + " + t.constant().str();
    if (t.constant() < 0) s += " - " + Integer(-t.constant()).str();
    return s;
}

}  // namespace weakmem::smt
