#pragma once

#include "weakmem/frontend/ast.hpp"
#include "weakmem/frontend/checks.hpp"
#include "weakmem/speclogic/speclogic.hpp"

#include <string>
#include <vector>

namespace weakmem::enc {

using ast::AssertionPtr;
using ast::ExprPtr;

enum class PKind {
    Inhale,
    Exhale,
    AssertCheck,
    HavocVar,
    Assign,
    FieldWrite,
    NewRef,
    Branch,
    NondetBranch,
    ForEachHeldConjunct,
    ConjunctGuard,
    RecordRead,
    TransferHeap,
    ExhalePreferTmp,
    KillBranch,
    DropAllPermissions,
    SpinDiscard,
    CheckNoValsRead,
    Fork,
    Checkpoint,
};

const char* toString(PKind k);

enum class GuardMode { Read, Positive, Full };

struct ThreadPlan;

struct Primitive {
    PKind kind = PKind::Checkpoint;
    AssertionPtr a;                // Inhale/Exhale/AssertCheck/ExhalePreferTmp
    ExprPtr e;                     // Assign value, FieldWrite value, Branch condition, SpinDiscard condition
    ExprPtr loc;                   // FieldWrite/ForEach/RecordRead/SpinDiscard/CheckNoValsRead location
    std::string var;               // HavocVar/Assign/NewRef target; ConjunctGuard/RecordRead value variable
    Field field = Field::Val;
    HeapLabel label = HeapLabel::Real;  // SpinDiscard read label; TransferHeap source; ExhalePreferTmp fallback
    HeapLabel to = HeapLabel::Real;     // TransferHeap target
    GuardMode guard = GuardMode::Read;
    bool ghost = false;            // NewRef
    bool final = false;            // Checkpoint: end of an obligation body
    std::vector<int> indices;      // CheckNoValsRead
    DiagKind failKind = DiagKind::ExhaleFailure;
    std::vector<Primitive> body, elseBody;
    std::vector<ThreadPlan> threads;
    std::vector<std::string> havocAfterJoin;
    SourceSpan span;
    std::string rule;
};

struct ThreadPlan {
    AssertionPtr pre, post;  // encoded
    std::vector<Primitive> body;
    SourceSpan span, preSpan, postSpan;
};

std::string dump(const std::vector<Primitive>& seq, int indent = 0);
std::string dump(const Primitive& p, int indent = 0);

struct ProcedurePlan {
    std::string name;
    SourceSpan span;
    std::vector<ast::Param> params;  // ghost parameters start as ghost locations
    std::vector<ast::Param> returns;
    std::vector<Primitive> prims;
    int threads = 0;
};

// Statement-local translation; depends on the statement, the table and the location classes only.
class Encoder {
public:
    Encoder(const ast::Program& p, const spec::InvariantTable& t, const frontend::ModeInfo& m)
        : p_(p), t_(t), m_(m) {}

    // Throws EncodingError for statically detectable problems (missing loop invariant, nested modalities, ...).
    ProcedurePlan encodeProcedure(const ast::Procedure& proc) const;
    std::vector<Primitive> encodeStmt(const ast::Stmt& s, const std::string& proc) const;
    std::vector<Primitive> encodeBlock(const ast::Block& b, const std::string& proc) const;

    AssertionPtr encode(const AssertionPtr& a, const std::string& proc, HeapLabel label = HeapLabel::Real) const;

private:
    std::vector<Primitive> write(const ast::Stmt& s, const std::string& proc) const;
    std::vector<Primitive> read(const ast::Stmt& s, const std::string& proc) const;
    std::vector<Primitive> rmw(const ast::Stmt& s, const std::string& proc) const;
    std::vector<Primitive> rewrite(const ast::Stmt& s, const std::string& proc) const;
    std::vector<Primitive> loop(const ast::Stmt& s, const std::string& proc) const;
    std::vector<Primitive> spin(const ast::Stmt& s, const std::string& proc) const;
    std::vector<Primitive> par(const ast::Stmt& s, const std::string& proc) const;
    std::vector<Primitive> call(const ast::Stmt& s, const std::string& proc) const;

    // Fresh temporaries; '$' keeps them out of the source namespace.
    std::string temp(const std::string& hint) const;
    spec::GhostTest ghostTest(const std::string& proc) const;

    const ast::Program& p_;
    const spec::InvariantTable& t_;
    const frontend::ModeInfo& m_;
    mutable int counter_ = 0;
};

}  // namespace weakmem::enc
