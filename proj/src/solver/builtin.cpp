#include "weakmem/solver/solver.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace weakmem::smt {

namespace {

using boost::multiprecision::denominator;
using boost::multiprecision::numerator;

struct Row {
    std::map<int, Rational> c;
    Rational k = 0;

    void clean() {
        for (auto it = c.begin(); it != c.end();) {
            if (it->second == 0)
                it = c.erase(it);
            else
                ++it;
        }
    }
    // scale to integer coefficients and constant
    void integerize() {
        Integer l = denominator(k);
        for (const auto& [v, x] : c) l = boost::multiprecision::lcm(l, Integer(denominator(x)));
        if (l == 1) return;
        for (auto& [v, x] : c) x *= l;
        k *= l;
    }
    // this -= f * o
    void subtract(const Row& o, const Rational& f) {
        for (const auto& [v, x] : o.c) c[v] -= f * x;
        k -= f * o.k;
        clean();
    }
};

class VarIds {
public:
    int get(const Atom& a) {
        auto it = ids_.find(a.key());
        if (it != ids_.end()) return it->second;
        int id = static_cast<int>(ids_.size());
        ids_.emplace(a.key(), id);
        return id;
    }

private:
    std::map<std::string, int> ids_;
};

Row rowOf(const LinTerm& t, VarIds& ids) {
    Row r;
    r.k = Rational(t.constant());
    for (const auto& [a, x] : t.coeffs()) r.c[ids.get(a)] += Rational(x);
    r.clean();
    return r;
}

LinearConstraint le(const Row& r) {
    LinearConstraint c;
    c.coeffs = r.c;
    c.constant = r.k;
    return c;
}

LinearConstraint negLe(const Row& r, const Rational& shift) {
    // -r + shift <= 0
    LinearConstraint c;
    for (const auto& [v, x] : r.c) c.coeffs[v] = -x;
    c.constant = -r.k + shift;
    return c;
}

// Gaussian elimination of equalities; substitutes into `others`. Returns false on conflict.
bool eliminate(std::vector<Row> eqs, std::vector<Row*>& others, bool integral) {
    for (std::size_t i = 0; i < eqs.size(); ++i) {
        Row e = eqs[i];
        e.clean();
        if (e.c.empty()) {
            if (e.k != 0) return false;
            continue;
        }
        if (integral) {
            e.integerize();
            Integer g = 0;
            for (const auto& [v, x] : e.c) g = boost::multiprecision::gcd(g, Integer(abs(numerator(x))));
            if (g > 1 && numerator(e.k) % g != 0) return false;
        }
        int pivot = -1;
        Rational best;
        for (const auto& [v, x] : e.c) {
            Rational ax = abs(x);
            if (pivot < 0 || ax < best) {
                pivot = v;
                best = ax;
            }
        }
        const Rational pc = e.c.at(pivot);
        auto apply = [&](Row& r) {
            auto it = r.c.find(pivot);
            if (it == r.c.end()) return;
            Rational f = it->second / pc;
            r.subtract(e, f);
        };
        for (std::size_t j = i + 1; j < eqs.size(); ++j) apply(eqs[j]);
        for (Row* r : others) apply(*r);
    }
    return true;
}

class Theory {
public:
    explicit Theory(const BuiltinLimits& lim) : lim_(lim) {}

    Feasibility check(const std::vector<Formula>& lits) const {
        VarIds ids;
        std::vector<Row> eqs, les, nes;
        for (const auto& f : lits) {
            switch (f.kind()) {
                case Formula::Kind::Eq: eqs.push_back(rowOf(f.term(), ids)); break;
                case Formula::Kind::Le: les.push_back(rowOf(f.term(), ids)); break;
                case Formula::Kind::Ne: nes.push_back(rowOf(f.term(), ids)); break;
                case Formula::Kind::False: return Feasibility::Unsat;
                default: break;
            }
        }
        std::vector<Row*> others;
        for (auto& r : les) others.push_back(&r);
        for (auto& r : nes) others.push_back(&r);
        if (!eliminate(std::move(eqs), others, true)) return Feasibility::Unsat;

        std::vector<LinearConstraint> base;
        for (const auto& r : les) base.push_back(le(r));
        Feasibility f = fourierMotzkin(base, true, lim_.fmLimit);
        if (f != Feasibility::Sat) return f;

        std::vector<Row> open;
        for (auto& r : nes) {
            if (r.c.empty()) {
                if (r.k == 0) return Feasibility::Unsat;
                continue;
            }
            r.integerize();
            // drop disequalities already implied by the bounds
            std::vector<LinearConstraint> probe = base;
            probe.push_back(le(r));
            probe.push_back(negLe(r, 0));
            if (fourierMotzkin(probe, true, lim_.fmLimit) == Feasibility::Unsat) continue;
            open.push_back(r);
        }
        return split(base, open, 0);
    }

private:
    Feasibility split(const std::vector<LinearConstraint>& base, const std::vector<Row>& open,
                      std::size_t idx) const {
        if (idx == open.size()) return fourierMotzkin(base, true, lim_.fmLimit);
        if (idx >= lim_.maxDisequalitySplits) return Feasibility::Unknown;
        const Row& r = open[idx];
        bool unknown = false;
        // r <= -1
        {
            std::vector<LinearConstraint> b = base;
            LinearConstraint c = le(r);
            c.constant += 1;
            b.push_back(c);
            Feasibility f = fourierMotzkin(b, true, lim_.fmLimit);
            if (f != Feasibility::Unsat) {
                f = split(b, open, idx + 1);
                if (f == Feasibility::Sat) return f;
                unknown |= f == Feasibility::Unknown;
            }
        }
        // r >= 1
        {
            std::vector<LinearConstraint> b = base;
            b.push_back(negLe(r, 1));
            Feasibility f = fourierMotzkin(b, true, lim_.fmLimit);
            if (f != Feasibility::Unsat) {
                f = split(b, open, idx + 1);
                if (f == Feasibility::Sat) return f;
                unknown |= f == Feasibility::Unknown;
            }
        }
        return unknown ? Feasibility::Unknown : Feasibility::Unsat;
    }

    const BuiltinLimits& lim_;
};

class Search {
public:
    explicit Search(const BuiltinLimits& lim) : lim_(lim), theory_(lim) {}

    Feasibility run(std::vector<Formula> lits, std::vector<Formula> ors) {
        if (++cases_ > lim_.maxCases) return Feasibility::Unknown;
        Feasibility t = theory_.check(lits);
        if (t == Feasibility::Unsat || ors.empty()) return t;
        std::size_t pick = 0;
        for (std::size_t i = 1; i < ors.size(); ++i)
            if (ors[i].parts().size() < ors[pick].parts().size()) pick = i;
        Formula chosen = ors[pick];
        ors.erase(ors.begin() + static_cast<long>(pick));
        bool unknown = false;
        for (const auto& p : chosen.parts()) {
            std::vector<Formula> l2 = lits;
            std::vector<Formula> o2 = ors;
            if (!add(p, l2, o2)) continue;
            Feasibility r = run(std::move(l2), std::move(o2));
            if (r == Feasibility::Sat) return r;
            unknown |= r == Feasibility::Unknown;
        }
        return unknown ? Feasibility::Unknown : Feasibility::Unsat;
    }

    // Sorts a fact into literals and pending disjunctions; false if trivially inconsistent.
    static bool add(const Formula& f, std::vector<Formula>& lits, std::vector<Formula>& ors) {
        switch (f.kind()) {
            case Formula::Kind::True: return true;
            case Formula::Kind::False: return false;
            case Formula::Kind::And:
                for (const auto& p : f.parts())
                    if (!add(p, lits, ors)) return false;
                return true;
            case Formula::Kind::Or: ors.push_back(f); return true;
            default: lits.push_back(f); return true;
        }
    }

private:
    const BuiltinLimits& lim_;
    Theory theory_;
    std::size_t cases_ = 0;
};

Feasibility checkPerms(const std::vector<PermFact>& perms, std::size_t limit) {
    if (perms.empty()) return Feasibility::Sat;
    std::map<std::string, int> ids;
    std::vector<LinearConstraint> cs;
    auto conv = [&](const PermAmount& p, bool strict, bool negate) {
        LinearConstraint c;
        c.strict = strict;
        Rational s = negate ? Rational(-1) : Rational(1);
        c.constant = p.exact() * s;
        for (const auto& [w, k] : p.tokens()) {
            auto it = ids.emplace(w.key(), static_cast<int>(ids.size())).first;
            c.coeffs[it->second] += k * s;
        }
        return c;
    };
    for (const auto& f : perms) {
        switch (f.rel) {
            case PermFact::Rel::Le: cs.push_back(conv(f.term, false, false)); break;
            case PermFact::Rel::Lt: cs.push_back(conv(f.term, true, false)); break;
            case PermFact::Rel::Eq:
                cs.push_back(conv(f.term, false, false));
                cs.push_back(conv(f.term, false, true));
                break;
        }
    }
    return fourierMotzkin(std::move(cs), false, limit);
}

}  // namespace

const char* toString(Answer a) {
    switch (a) {
        case Answer::Yes: return "yes";
        case Answer::No: return "no";
        case Answer::Unknown: return "unknown";
    }
    return "?";
}

Feasibility BuiltinBackend::checkSat(const Query& q) const {
    Feasibility p = checkPerms(q.perms, limits_.fmLimit);
    if (p == Feasibility::Unsat) return p;
    std::vector<Formula> lits, ors;
    bool opaque = false;
    for (const auto& f : q.facts) {
        opaque |= f.hasOpaque();
        if (!Search::add(f, lits, ors)) return Feasibility::Unsat;
    }
    Search s(limits_);
    Feasibility i = s.run(std::move(lits), std::move(ors));
    if (i == Feasibility::Unsat) return i;
    if (i == Feasibility::Unknown || p == Feasibility::Unknown) return Feasibility::Unknown;
    // a model of the linear abstraction says nothing about the opaque operations
    return opaque ? Feasibility::Unknown : Feasibility::Sat;
}

std::vector<Formula> relevantFacts(const std::vector<Formula>& path, const std::vector<Atom>& seeds) {
    std::vector<std::vector<std::string>> keys(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) {
        std::vector<Atom> as;
        path[i].collectAtoms(as);
        for (const auto& a : as) keys[i].push_back(a.key());
    }
    std::set<std::string> live;
    for (const auto& a : seeds) live.insert(a.key());
    std::vector<bool> taken(path.size(), false);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < path.size(); ++i) {
            if (taken[i]) continue;
            bool hit = keys[i].empty() && path[i].isFalse();
            for (const auto& k : keys[i])
                if (live.count(k)) {
                    hit = true;
                    break;
                }
            if (!hit) continue;
            taken[i] = true;
            changed = true;
            for (const auto& k : keys[i]) live.insert(k);
        }
    }
    std::vector<Formula> out;
    for (std::size_t i = 0; i < path.size(); ++i)
        if (taken[i]) out.push_back(path[i]);
    return out;
}

std::vector<PermFact> relevantPermFacts(const std::vector<PermFact>& facts, const std::vector<Atom>& seeds) {
    std::set<std::string> live;
    for (const auto& a : seeds) live.insert(a.key());
    std::vector<bool> taken(facts.size(), false);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < facts.size(); ++i) {
            if (taken[i]) continue;
            bool hit = false;
            for (const auto& [w, k] : facts[i].term.tokens())
                if (live.count(w.key())) {
                    hit = true;
                    break;
                }
            if (!hit) continue;
            taken[i] = true;
            changed = true;
            for (const auto& [w, k] : facts[i].term.tokens()) live.insert(w.key());
        }
    }
    std::vector<PermFact> out;
    for (std::size_t i = 0; i < facts.size(); ++i)
        if (taken[i]) out.push_back(facts[i]);
    return out;
}

Solver::Solver() : backend_(std::make_shared<BuiltinBackend>()) {}

namespace {
Answer fromEntailment(Feasibility f) {
    switch (f) {
        case Feasibility::Unsat: return Answer::Yes;
        case Feasibility::Sat: return Answer::No;
        case Feasibility::Unknown: return Answer::Unknown;
    }
    return Answer::Unknown;
}
Answer fromFeasibility(Feasibility f) {
    switch (f) {
        case Feasibility::Unsat: return Answer::No;
        case Feasibility::Sat: return Answer::Yes;
        case Feasibility::Unknown: return Answer::Unknown;
    }
    return Answer::Unknown;
}
}  // namespace

Answer Solver::entails(const std::vector<Formula>& path, const Formula& goal) const {
    if (goal.isTrue()) return Answer::Yes;
    std::vector<Atom> seeds;
    goal.collectAtoms(seeds);
    Query q;
    q.facts = relevantFacts(path, seeds);
    q.facts.push_back(goal.negate());
    return fromEntailment(backend_->checkSat(q));
}

Answer Solver::feasibleWith(const std::vector<Formula>& path, const std::vector<Formula>& extra) const {
    std::vector<Atom> seeds;
    for (const auto& f : extra) {
        if (f.isFalse()) return Answer::No;
        f.collectAtoms(seeds);
    }
    Query q;
    q.facts = relevantFacts(path, seeds);
    for (const auto& f : extra) q.facts.push_back(f);
    return fromFeasibility(backend_->checkSat(q));
}

Answer Solver::isFeasible(const std::vector<Formula>& path) const {
    Query q;
    q.facts = path;
    return fromFeasibility(backend_->checkSat(q));
}

Answer Solver::permEntails(const std::vector<PermFact>& facts, const PermFact& goal) const {
    std::vector<Atom> seeds;
    for (const auto& [w, k] : goal.term.tokens()) seeds.push_back(w);
    std::vector<PermFact> base = relevantPermFacts(facts, seeds);
    auto refute = [&](PermFact neg) {
        Query q;
        q.perms = base;
        q.perms.push_back(std::move(neg));
        return backend_->checkSat(q);
    };
    const PermAmount& t = goal.term;
    switch (goal.rel) {
        case PermFact::Rel::Le: return fromEntailment(refute({t.scaled(-1), PermFact::Rel::Lt}));
        case PermFact::Rel::Lt: return fromEntailment(refute({t.scaled(-1), PermFact::Rel::Le}));
        case PermFact::Rel::Eq: {
            Answer a = fromEntailment(refute({t.scaled(-1), PermFact::Rel::Lt}));
            if (a != Answer::Yes) return a;
            return fromEntailment(refute({t, PermFact::Rel::Lt}));
        }
    }
    return Answer::Unknown;
}

Answer Solver::permFeasible(const std::vector<PermFact>& facts) const {
    Query q;
    q.perms = facts;
    return fromFeasibility(backend_->checkSat(q));
}

std::optional<Integer> Solver::impliedConstant(const std::vector<Formula>& path, const LinTerm& t) const {
    if (t.isConstant()) return t.constant();
    std::vector<Atom> seeds;
    t.collectAtoms(seeds);
    std::vector<Formula> rel = relevantFacts(path, seeds);
    VarIds ids;
    std::vector<Row> eqs;
    std::vector<Formula> lits, ors;
    for (const auto& f : rel) Search::add(f, lits, ors);
    for (const auto& f : lits)
        if (f.kind() == Formula::Kind::Eq) eqs.push_back(rowOf(f.term(), ids));
    Row target = rowOf(t, ids);
    std::vector<Row*> others{&target};
    if (!eliminate(std::move(eqs), others, false)) return std::nullopt;
    if (!target.c.empty() || denominator(target.k) != 1) return std::nullopt;
    Integer c = numerator(target.k);
    if (entails(path, eq(t, LinTerm(c))) != Answer::Yes) return std::nullopt;
    return c;
}

}  // namespace weakmem::smt
