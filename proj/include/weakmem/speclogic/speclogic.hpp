#pragma once

#include "weakmem/frontend/ast.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace weakmem::spec {

using ast::AssertionPtr;
using ast::ExprPtr;

struct TableEntry {
    int index = 0;
    AssertionPtr body;  // over V
    std::string text;   // printed body, also the dedup key
    SourceSpan span;    // first occurrence
};

// Integer indices for every syntactic invariant and every top-level conjunct of one.
class InvariantTable {
public:
    // Registers an occurrence (Q1 * Q2 * ...); returns its whole index.
    int add(const ast::InvRef& ref, const ast::Program& p);

    bool has(const ast::InvRef& ref) const { return occ_.count(ref.key()) != 0; }
    int wholeOf(const ast::InvRef& ref) const;
    const std::vector<int>& conjunctsOf(const ast::InvRef& ref) const;
    const std::vector<int>& conjunctsOfIndex(int whole) const;

    const TableEntry& entry(int i) const { return entries_.at(static_cast<std::size_t>(i)); }
    const std::vector<TableEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    std::string toJson() const;

private:
    int intern(const AssertionPtr& body, const SourceSpan& span);

    struct Occurrence {
        int whole = 0;
        std::vector<int> conjuncts;
    };
    std::vector<TableEntry> entries_;
    std::map<std::string, int> byText_;
    std::map<std::string, Occurrence> occ_;
    std::map<int, std::vector<int>> conjByWhole_;
};

// Body of the invariant named by an occurrence: the star of the named declarations.
AssertionPtr invariantBody(const ast::InvRef& ref, const ast::Program& p);

// Indexes every occurrence in allocation annotations, specifications, invariant bodies and rewrites.
InvariantTable buildInvariantTable(const ast::Program& p);

// Replaces every macro use by its instantiated body. Unknown macros are left as is.
AssertionPtr expandMacros(const AssertionPtr& a, const ast::Program& p);

ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& sub);
AssertionPtr substitute(const AssertionPtr& a, const std::map<std::string, ExprPtr>& sub);
// Q[V := e]
AssertionPtr instantiate(const AssertionPtr& q, const ExprPtr& value);

struct LabelMap {
    HeapLabel from = HeapLabel::Real;
    HeapLabel to = HeapLabel::Up;
    static LabelMap toUp() { return {HeapLabel::Real, HeapLabel::Up}; }
    static LabelMap toDown() { return {HeapLabel::Real, HeapLabel::Down}; }
    static LabelMap toTmp() { return {HeapLabel::Real, HeapLabel::Tmp}; }
    LabelMap inverse() const { return {to, from}; }
};

// Decides whether a location expression denotes a ghost location.
using GhostTest = std::function<bool(const ast::Expr& loc)>;

// Re-tags the heap atoms of an encoded assertion. Ghost atoms keep their label.
// Throws EncodingError(DoubleModality) when a forward map meets an atom already under a modality.
AssertionPtr relabel(const AssertionPtr& a, LabelMap f, const GhostTest& ghost = {});
ExprPtr relabel(const ExprPtr& e, LabelMap f, const GhostTest& ghost = {});

// Source assertion -> encoded form (Acc/Pred/ValsReadEmpty/pure facts over heap reads).
// Acq/Rel/RMWAcq invariants must already be in the table.
AssertionPtr encodeAssertion(const AssertionPtr& a, const InvariantTable& t, const ast::Program& p,
                             HeapLabel label = HeapLabel::Real, const GhostTest& ghost = {});

// Whether an assertion (source or encoded) contains a Down modality or Down-tagged atom.
bool mentionsDown(const ast::Assertion& a);
// Free variables of an assertion (including V).
void freeVariables(const ast::Assertion& a, std::vector<std::string>& out);
void freeVariables(const ast::Expr& e, std::vector<std::string>& out);

}  // namespace weakmem::spec
