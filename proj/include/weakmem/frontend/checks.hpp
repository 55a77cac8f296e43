#pragma once

#include "weakmem/frontend/ast.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace weakmem::frontend {

// Declarations, arities, typing, placement of atomic operations in expressions.
std::vector<Diagnostic> checkProgram(const ast::Program& p);

enum class LocClass { Unknown, NonAtomic, AtomicAcq, AtomicRmw, Atomic, Ghost };
const char* toString(LocClass c);

struct ModeInfo {
    // keyed by procedure name, then variable name
    std::map<std::string, std::map<std::string, LocClass>> classes;
    LocClass classOf(const std::string& proc, const std::string& var) const;
};

struct ModeCheckResult {
    std::vector<Diagnostic> diagnostics;
    ModeInfo info;
};

// Location partition: every location gets one classification, checked against all accesses.
ModeCheckResult modeCheck(const ast::Program& p);

struct Metrics {
    int loc = 0;     // lines holding at least one statement
    int funcs = 0;   // procedures and threads
    int loops = 0;
    int prePost = 0;
    int loopInvariants = 0;
    int other = 0;   // invariant annotations at allocations, fence and rewrite annotations, ghost allocations
};

Metrics metrics(const ast::Program& p);

// Names of variables assigned anywhere inside a block (including nested threads).
std::vector<std::string> assignedVariables(const ast::Block& b);

}  // namespace weakmem::frontend
