#include "weakmem/solver/fm.hpp"

#include <set>
#include <string>

namespace weakmem::smt {

namespace {

using boost::multiprecision::denominator;
using boost::multiprecision::numerator;

Integer ceilDiv(const Integer& a, const Integer& b) {
    Integer q = a / b;
    if (a % b != 0 && a > 0) q += 1;
    return q;
}

// Scale to integer coefficients, turn strict into non-strict and divide by the gcd.
void tighten(LinearConstraint& c) {
    Integer l = denominator(c.constant);
    for (const auto& [v, k] : c.coeffs) l = boost::multiprecision::lcm(l, Integer(denominator(k)));
    if (l != 1) {
        for (auto& [v, k] : c.coeffs) k *= l;
        c.constant *= l;
    }
    if (c.strict) {
        c.constant += 1;
        c.strict = false;
    }
    Integer g = 0;
    for (const auto& [v, k] : c.coeffs) g = boost::multiprecision::gcd(g, Integer(abs(numerator(k))));
    if (g > 1) {
        for (auto& [v, k] : c.coeffs) k /= g;
        c.constant = Rational(ceilDiv(numerator(c.constant), g));
    }
}

std::string keyOf(const LinearConstraint& c) {
    std::string s = c.strict ? "<" : "<=";
    s += toString(c.constant);
    for (const auto& [v, k] : c.coeffs) s += " " + std::to_string(v) + ":" + toString(k);
    return s;
}

}  // namespace

Feasibility fourierMotzkin(std::vector<LinearConstraint> cs, bool integral, std::size_t limit) {
    if (integral)
        for (auto& c : cs) tighten(c);
    while (true) {
        std::vector<LinearConstraint> live;
        std::set<std::string> seen;
        for (auto& c : cs) {
            for (auto it = c.coeffs.begin(); it != c.coeffs.end();) {
                if (it->second == 0)
                    it = c.coeffs.erase(it);
                else
                    ++it;
            }
            if (c.coeffs.empty()) {
                if (c.strict ? !(c.constant < 0) : !(c.constant <= 0)) return Feasibility::Unsat;
                continue;
            }
            if (seen.insert(keyOf(c)).second) live.push_back(std::move(c));
        }
        if (live.empty()) return Feasibility::Sat;

        std::map<int, std::pair<std::size_t, std::size_t>> counts;
        for (const auto& c : live)
            for (const auto& [v, k] : c.coeffs) {
                auto& e = counts[v];
                (k > 0 ? e.first : e.second)++;
            }
        int pick = -1;
        bool oneSided = false;
        long long best = -1;
        for (const auto& [v, pn] : counts) {
            if (pn.first == 0 || pn.second == 0) {
                pick = v;
                oneSided = true;
                break;
            }
            long long cost = static_cast<long long>(pn.first * pn.second) -
                             static_cast<long long>(pn.first + pn.second);
            if (pick < 0 || cost < best) {
                pick = v;
                best = cost;
            }
        }

        std::vector<LinearConstraint> next, pos, neg;
        for (auto& c : live) {
            auto it = c.coeffs.find(pick);
            if (it == c.coeffs.end())
                next.push_back(std::move(c));
            else if (it->second > 0)
                pos.push_back(std::move(c));
            else
                neg.push_back(std::move(c));
        }
        if (!oneSided) {
            if (next.size() + pos.size() * neg.size() > limit) return Feasibility::Unknown;
            for (const auto& p : pos)
                for (const auto& n : neg) {
                    Rational a = p.coeffs.at(pick);
                    Rational b = -n.coeffs.at(pick);
                    LinearConstraint r;
                    r.strict = p.strict || n.strict;
                    r.constant = p.constant * b + n.constant * a;
                    for (const auto& [v, k] : p.coeffs)
                        if (v != pick) r.coeffs[v] += k * b;
                    for (const auto& [v, k] : n.coeffs)
                        if (v != pick) r.coeffs[v] += k * a;
                    if (integral) {
                        for (auto it = r.coeffs.begin(); it != r.coeffs.end();) {
                            if (it->second == 0)
                                it = r.coeffs.erase(it);
                            else
                                ++it;
                        }
                        tighten(r);
                    }
                    next.push_back(std::move(r));
                }
        }
        cs = std::move(next);
    }
}

}  // namespace weakmem::smt
