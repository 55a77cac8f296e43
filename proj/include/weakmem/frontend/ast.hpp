#pragma once

#include "weakmem/diagnostic.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace weakmem {

enum class AccessMode { Na, Acq, Rel, RelAcq, Rlx };
enum class HeapLabel : int { Real = 0, Up = 1, Down = -1, Tmp = -3 };
enum class Field { Val, Init, Rel, Acq };

const char* toString(AccessMode m);
const char* toString(HeapLabel l);
const char* toString(Field f);
std::optional<AccessMode> parseMode(const std::string& s);

}  // namespace weakmem

namespace weakmem::ast {

enum class ExprKind {
    Int,
    Bool,
    Var,
    Unary,
    Binary,
    Read,    // [l]_mode, only as a loop condition operand
    Cas,     // CAS_mode(l, e1, e2), only as a loop condition operand
    // encoder-internal
    HeapRead,          // loc.field in heap `label`
    ValsReadContains,  // value in valsRead(loc, index)
};

enum class UnOp { Neg, Not };
enum class BinOp { Add, Sub, Mul, Div, Mod, BitAnd, BitOr, BitXor, Shl, Shr, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

const char* toString(BinOp op);
bool isComparison(BinOp op);
bool isBoolOp(BinOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Index of an invariant table entry, or the index bound by an enclosing ForEachHeldConjunct.
struct IndexRef {
    int index = -1;
    bool bound = false;
};

struct Expr {
    ExprKind kind = ExprKind::Int;
    std::int64_t value = 0;  // Int
    bool flag = false;       // Bool
    std::string name;        // Var; Read/Cas location variable
    UnOp unop = UnOp::Neg;
    BinOp binop = BinOp::Add;
    AccessMode mode = AccessMode::Na;
    Field field = Field::Val;
    HeapLabel label = HeapLabel::Real;
    IndexRef index;
    std::vector<ExprPtr> args;  // operands; HeapRead: {loc}; ValsReadContains: {loc, value}; Cas: {e1, e2}
    SourceSpan span;
};

ExprPtr mkInt(std::int64_t v, SourceSpan sp = {});
ExprPtr mkBool(bool b, SourceSpan sp = {});
ExprPtr mkVar(const std::string& n, SourceSpan sp = {});
ExprPtr mkUnary(UnOp op, ExprPtr a, SourceSpan sp = {});
ExprPtr mkBinary(BinOp op, ExprPtr a, ExprPtr b, SourceSpan sp = {});
ExprPtr mkHeapRead(ExprPtr loc, Field f, HeapLabel l);
ExprPtr mkValsReadContains(ExprPtr loc, IndexRef idx, HeapLabel l, ExprPtr value);

bool sameExpr(const Expr& a, const Expr& b);  // structural, ignores spans

// Permission amount written in an assertion: a constant fraction or wildcard.
struct PermExpr {
    bool wildcard = false;
    std::int64_t num = 1;
    std::int64_t den = 1;
    bool operator==(const PermExpr& o) const { return wildcard == o.wildcard && num * o.den == o.num * den; }
};

// Invariant reference Q1 * Q2 * ... by name.
struct InvRef {
    std::vector<std::string> names;
    SourceSpan span;
    std::string key() const;
};

enum class AKind {
    Pure,
    PointsTo,
    Star,
    Implies,
    Cond,
    Uninit,
    Init,
    Acq,
    Rel,
    RMWAcq,
    Up,
    Down,
    Macro,
    // encoded forms
    Acc,
    Pred,
    ValsReadEmpty,
    InvInstance,
};

struct Assertion;
using AssertionPtr = std::shared_ptr<const Assertion>;

struct Assertion {
    AKind kind = AKind::Pure;
    ExprPtr expr;   // Pure; guard of Implies/Cond
    ExprPtr loc;    // location operand
    ExprPtr value;  // points-to value (null: any); InvInstance value
    PermExpr perm;  // PointsTo fraction; Acc/Pred amount
    InvRef inv;     // Acq/Rel/RMWAcq
    std::string name;           // Macro
    std::vector<ExprPtr> args;  // Macro arguments
    std::vector<AssertionPtr> kids;  // Star: n-ary; Implies: {A}; Cond: {A, B}; Up/Down: {A}
    Field field = Field::Val;
    HeapLabel label = HeapLabel::Real;
    IndexRef index;
    SourceSpan span;
};

AssertionPtr mkPure(ExprPtr e, SourceSpan sp = {});
AssertionPtr mkTrue();
AssertionPtr mkStar(std::vector<AssertionPtr> kids, SourceSpan sp = {});
AssertionPtr mkImplies(ExprPtr guard, AssertionPtr body, SourceSpan sp = {});
AssertionPtr mkCond(ExprPtr guard, AssertionPtr a, AssertionPtr b, SourceSpan sp = {});
AssertionPtr mkAcc(ExprPtr loc, Field f, HeapLabel l, PermExpr p);
AssertionPtr mkPred(ExprPtr loc, IndexRef idx, HeapLabel l, PermExpr p);
AssertionPtr mkValsReadEmpty(ExprPtr loc, IndexRef idx, HeapLabel l);
AssertionPtr mkInvInstance(IndexRef idx, ExprPtr value, HeapLabel l);

bool sameAssertion(const Assertion& a, const Assertion& b);
bool isTrivial(const Assertion& a);  // literally `true`

enum class SKind {
    AllocNa,
    AllocAcq,
    AllocRmw,
    AllocGhost,
    Write,
    Read,
    Cas,
    Faa,
    FenceAcq,
    FenceRel,
    Rewrite,
    While,
    If,
    Par,
    Call,
    Assign,
    Free,
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;
using Block = std::vector<StmtPtr>;

struct Thread {
    AssertionPtr pre;
    AssertionPtr post;
    Block body;
    SourceSpan span;
    SourceSpan preSpan;
    SourceSpan postSpan;
};

struct Stmt {
    SKind kind = SKind::Assign;
    std::string target;  // assigned variable (Read/Cas/Faa/Assign) or allocated location
    std::string loc;     // accessed location variable
    AccessMode mode = AccessMode::Na;
    ExprPtr e1, e2;      // Write: e1; Cas: e1,e2; Faa: e1 (delta); Assign: e1; While/If: e1 = condition
    InvRef inv, inv2;    // AllocAcq/AllocRmw: inv; Rewrite: inv -> inv2
    AssertionPtr annot;  // FenceRel assertion; While invariant
    bool hasInvariant = false;
    Block body, elseBody;
    bool hasElse = false;
    std::vector<Thread> threads;
    std::string callee;
    std::vector<ExprPtr> args;
    std::vector<std::string> results;
    SourceSpan span;
};

struct Param {
    std::string name;
    bool ghost = false;
    SourceSpan span;
};

struct Procedure {
    std::string name;
    std::vector<Param> params;
    std::vector<Param> returns;
    AssertionPtr pre;
    AssertionPtr post;
    Block body;
    SourceSpan span;
    SourceSpan preSpan;
    SourceSpan postSpan;
};

struct InvariantDecl {
    std::string name;
    AssertionPtr body;
    SourceSpan span;
};

struct MacroDecl {
    std::string name;
    std::vector<std::string> params;
    AssertionPtr body;
    SourceSpan span;
};

struct Program {
    std::vector<InvariantDecl> invariants;
    std::vector<MacroDecl> macros;
    std::vector<Procedure> procedures;
    std::vector<std::string> requires_;  // feature pragmas
    std::optional<std::string> entry;

    const InvariantDecl* findInvariant(const std::string& n) const;
    const MacroDecl* findMacro(const std::string& n) const;
    const Procedure* findProcedure(const std::string& n) const;
};

bool sameStmt(const Stmt& a, const Stmt& b);
bool sameProgram(const Program& a, const Program& b);

// Walk helpers
void forEachStmt(const Block& b, const std::function<void(const Stmt&)>& f);

}  // namespace weakmem::ast
