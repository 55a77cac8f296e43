#include "weakmem/diagnostic.hpp"

namespace weakmem {

std::string_view toString(DiagKind kind) {
    switch (kind) {
        case DiagKind::SyntaxError: return "SyntaxError";
        case DiagKind::DuplicateName: return "DuplicateName";
        case DiagKind::UndeclaredVariable: return "UndeclaredVariable";
        case DiagKind::TypeError: return "TypeError";
        case DiagKind::MixedModeAccess: return "MixedModeAccess";
        case DiagKind::CASOnAcqLocation: return "CASOnAcqLocation";
        case DiagKind::AtomicAccessToNonAtomic: return "AtomicAccessToNonAtomic";
        case DiagKind::ReadOnRMWLocation: return "ReadOnRMWLocation";
        case DiagKind::UnboundInvariantVariable: return "UnboundInvariantVariable";
        case DiagKind::MissingLoopInvariant: return "MissingLoopInvariant";
        case DiagKind::DownInLoopInvariant: return "DownInLoopInvariant";
        case DiagKind::DoubleModality: return "DoubleModality";
        case DiagKind::InsufficientPermission: return "InsufficientPermission";
        case DiagKind::ReadOfUninitialised: return "ReadOfUninitialised";
        case DiagKind::NoRelPermission: return "NoRelPermission";
        case DiagKind::NoAcqPermission: return "NoAcqPermission";
        case DiagKind::Uninitialised: return "Uninitialised";
        case DiagKind::ExhaleFailure: return "ExhaleFailure";
        case DiagKind::AssertionFailure: return "AssertionFailure";
        case DiagKind::MissingRMWPermissions: return "MissingRMWPermissions";
        case DiagKind::RewriteNotJustified: return "RewriteNotJustified";
        case DiagKind::RewriteAfterRead: return "RewriteAfterRead";
        case DiagKind::SpinPatternResourceLeak: return "SpinPatternResourceLeak";
        case DiagKind::SoundnessInvariantViolation: return "SoundnessInvariantViolation";
        case DiagKind::BranchLimitExceeded: return "BranchLimitExceeded";
        case DiagKind::ExternalSolverError: return "ExternalSolverError";
        case DiagKind::Unsupported: return "Unsupported";
    }
    return "?";
}

bool operator==(const Diagnostic& a, const Diagnostic& b) {
    return a.kind == b.kind && a.span.offset == b.span.offset && a.span.length == b.span.length &&
           a.rule == b.rule && a.message == b.message;
}

}  // namespace weakmem
