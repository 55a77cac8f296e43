#pragma once

#include "weakmem/frontend/ast.hpp"
#include "weakmem/solver/solver.hpp"
#include "weakmem/speclogic/speclogic.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace weakmem::sym {

using smt::Formula;
using smt::LinTerm;
using smt::PermAmount;
using smt::Rational;

struct FieldChunk {
    HeapLabel label = HeapLabel::Real;
    LinTerm loc;
    Field field = Field::Val;
    PermAmount perm;
    LinTerm value;
};

struct PredChunk {
    HeapLabel label = HeapLabel::Real;
    LinTerm loc;
    int index = 0;
    PermAmount perm;
    std::vector<LinTerm> valsRead;
};

// One path of the symbolic execution: heap chunks, path condition, variable store.
struct SymState {
    std::vector<FieldChunk> fields;
    std::vector<PredChunk> preds;
    std::vector<Formula> path;
    std::vector<smt::PermFact> permFacts;
    std::map<std::string, LinTerm> store;
    std::set<std::string> ghosts;  // keys of ghost location terms
    std::vector<LinTerm> locations;  // every location term seen by an allocation or a chunk
    bool infeasible = false;
    std::vector<std::string> notes;

    void assume(const Formula& f);
    bool isGhost(const LinTerm& loc) const { return ghosts.count(loc.key()) != 0; }
    HeapLabel effective(const LinTerm& loc, HeapLabel l) const { return isGhost(loc) ? HeapLabel::Real : l; }
    // Value of a variable; unbound names get a fresh symbol on first use.
    LinTerm var(const std::string& name);
    std::string digest() const;
};

struct Failure {
    DiagKind kind = DiagKind::ExhaleFailure;
    std::string message;
    std::vector<std::string> facts;
    bool incomplete = false;
};

// Successor states of a primitive; a failure kills only the path it happened on.
struct Outcome {
    std::vector<SymState> states;
    std::vector<Failure> failures;
};

struct Context {
    const spec::InvariantTable* table = nullptr;
    const ast::Program* program = nullptr;
    const smt::Solver* solver = nullptr;
};

enum class ExhaleMode { Plain, PreferTmp };

class Engine {
public:
    explicit Engine(Context c) : c_(c) {}

    // Expression evaluation. Heap reads require positive permission (throws Failure otherwise).
    LinTerm evalInt(SymState& s, const ast::Expr& e, int bound = -1) const;
    Formula evalBool(SymState& s, const ast::Expr& e, int bound = -1) const;

    Outcome inhale(SymState s, const ast::AssertionPtr& a, int bound = -1) const;
    Outcome exhale(SymState s, const ast::AssertionPtr& a, DiagKind failKind = DiagKind::ExhaleFailure, int bound = -1,
                   ExhaleMode mode = ExhaleMode::Plain, HeapLabel fallback = HeapLabel::Real) const;
    // Checks without consuming: permission atoms mean "at least this much is held".
    Outcome check(SymState s, const ast::AssertionPtr& a, DiagKind failKind, int bound = -1) const;

    void transferHeap(SymState& s, HeapLabel from, HeapLabel to) const;
    void dropAllPermissions(SymState& s) const;

    PermAmount permOf(const SymState& s, HeapLabel l, const LinTerm& loc, Field f) const;
    PermAmount predPermOf(const SymState& s, HeapLabel l, const LinTerm& loc, int index) const;

    // Chunk lookup (syntactic key match, then solver-proved aliasing). -1 if absent.
    int findField(const SymState& s, HeapLabel l, const LinTerm& loc, Field f) const;
    int findPred(const SymState& s, HeapLabel l, const LinTerm& loc, int index) const;

    // Decision helpers over the state's path / permission facts.
    smt::Answer entails(const SymState& s, const Formula& f) const;
    smt::Answer feasible(const SymState& s, const Formula& extra) const;
    smt::Answer permAtLeast(const SymState& s, const PermAmount& held, const PermAmount& need) const;
    smt::Answer permPositive(const SymState& s, const PermAmount& held) const;
    smt::Answer permZero(const SymState& s, const PermAmount& held) const;

    // Adds permission to a field chunk (creating it with a fresh value), applying the cap assumption.
    void addField(SymState& s, HeapLabel l, const LinTerm& loc, Field f, const PermAmount& k) const;
    void addPred(SymState& s, HeapLabel l, const LinTerm& loc, int index, const PermAmount& k) const;

    // Fresh location with distinctness from all known locations.
    LinTerm newLocation(SymState& s, const std::string& hint) const;

    // Instantiated, encoded table entry at the given label.
    ast::AssertionPtr invInstance(const SymState& s, int index, const ast::ExprPtr& value, HeapLabel label) const;
    // Candidate table indices for an index expression (one entry per feasible value).
    std::vector<std::pair<int, SymState>> resolveIndex(SymState s, const ast::Assertion& a, int bound) const;

    spec::GhostTest ghostTest(const SymState& s) const;
    std::vector<std::string> counterFacts(const SymState& s, const Formula& goal) const;

    const Context& context() const { return c_; }

private:
    Context c_;
    bool consume_ = true;
};

}  // namespace weakmem::sym
