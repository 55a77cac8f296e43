#pragma once

#include "weakmem/solver/fm.hpp"
#include "weakmem/solver/formula.hpp"
#include "weakmem/solver/perm.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace weakmem::smt {

enum class Answer { Yes, No, Unknown };

const char* toString(Answer a);

// Satisfiability question: integer facts and permission facts (token variables are rationals).
struct Query {
    std::vector<Formula> facts;
    std::vector<PermFact> perms;
};

struct ExternalSolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual Feasibility checkSat(const Query& q) const = 0;
};

struct BuiltinLimits {
    std::size_t maxCases = 20000;      // disjunction cases explored per query
    std::size_t maxDisequalitySplits = 10;
    std::size_t fmLimit = 20000;
};

class BuiltinBackend : public Backend {
public:
    explicit BuiltinBackend(BuiltinLimits limits = {}) : limits_(limits) {}
    Feasibility checkSat(const Query& q) const override;

private:
    BuiltinLimits limits_;
};

// Pipes an SMT-LIB2 script to a child process and parses sat/unsat/unknown.
class ExternalBackend : public Backend {
public:
    ExternalBackend(std::string command, int timeoutMs) : command_(std::move(command)), timeoutMs_(timeoutMs) {}
    Feasibility checkSat(const Query& q) const override;

private:
    std::string command_;
    int timeoutMs_;
};

// Entailment and feasibility front end. Stateless apart from the backend handle.
class Solver {
public:
    Solver();
    explicit Solver(std::shared_ptr<const Backend> backend) : backend_(std::move(backend)) {}

    Answer entails(const std::vector<Formula>& path, const Formula& goal) const;
    // Satisfiability of path facts that share symbols with `extra` (the rest is assumed consistent).
    Answer feasibleWith(const std::vector<Formula>& path, const std::vector<Formula>& extra) const;
    Answer isFeasible(const std::vector<Formula>& path) const;

    Answer permEntails(const std::vector<PermFact>& facts, const PermFact& goal) const;
    Answer permFeasible(const std::vector<PermFact>& facts) const;

    // A constant c with path |= t == c, if one can be found cheaply.
    std::optional<Integer> impliedConstant(const std::vector<Formula>& path, const LinTerm& t) const;

    const Backend& backend() const { return *backend_; }

private:
    std::shared_ptr<const Backend> backend_;
};

// Facts transitively sharing atoms with the seeds.
std::vector<Formula> relevantFacts(const std::vector<Formula>& path, const std::vector<Atom>& seeds);
std::vector<PermFact> relevantPermFacts(const std::vector<PermFact>& facts, const std::vector<Atom>& seeds);

// Script whose answer is unsat iff path |= goal.
std::string emitSmtlib(const std::vector<Formula>& path, const Formula& goal);
std::string emitSmtlib(const Query& q);

}  // namespace weakmem::smt
