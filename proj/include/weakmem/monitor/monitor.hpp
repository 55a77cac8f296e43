#pragma once

#include "weakmem/symstate/state.hpp"

#include <string>
#include <vector>

namespace weakmem::monitor {

struct Violation {
    std::string location;
    std::string label;
    std::string message;
};

// Per non-atomic location and heap: P[val] == P[init], and P[val] > 0 with init unset implies P[val] == 1.
// A location counts as non-atomic when it has a val chunk, or an exact init permission and no rel/acq chunk
// (atomic init permissions are always wildcard shares).
std::vector<Violation> checkStateInvariants(const sym::SymState& s, const sym::Engine& eng);

// Separation-logic reading of a state, one conjunct per held resource. "true" for the empty state.
std::string reconstructAssertion(const sym::SymState& s, const sym::Engine& eng);

struct StateReport {
    std::string obligation;  // procedure or thread checkpoint
    int line = 0;
    std::vector<std::pair<std::string, std::string>> classification;  // location -> class
    std::vector<Violation> violations;
    std::string assertion;
};

StateReport report(const std::string& obligation, int line, const sym::SymState& s, const sym::Engine& eng);

}  // namespace weakmem::monitor
