#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace weakmem {

struct SourceSpan {
    std::size_t offset = 0;
    std::size_t length = 0;
    int line = 0;
    int column = 0;
};

enum class DiagKind {
    SyntaxError,
    DuplicateName,
    UndeclaredVariable,
    TypeError,
    MixedModeAccess,
    CASOnAcqLocation,
    AtomicAccessToNonAtomic,
    ReadOnRMWLocation,
    UnboundInvariantVariable,
    MissingLoopInvariant,
    DownInLoopInvariant,
    DoubleModality,
    InsufficientPermission,
    ReadOfUninitialised,
    NoRelPermission,
    NoAcqPermission,
    Uninitialised,
    ExhaleFailure,
    AssertionFailure,
    MissingRMWPermissions,
    RewriteNotJustified,
    RewriteAfterRead,
    SpinPatternResourceLeak,
    SoundnessInvariantViolation,
    BranchLimitExceeded,
    ExternalSolverError,
    Unsupported,
};

std::string_view toString(DiagKind kind);

struct Diagnostic {
    DiagKind kind = DiagKind::SyntaxError;
    SourceSpan span;
    std::string rule;     // proof rule / encoding step that produced the obligation
    std::string message;
    std::vector<std::string> facts;  // counter-facts from the solver, if any
    bool incompleteSolver = false;
};

bool operator==(const Diagnostic& a, const Diagnostic& b);

// Thrown for errors detected while encoding (before any state exists).
struct EncodingError {
    Diagnostic diag;
};

}  // namespace weakmem
