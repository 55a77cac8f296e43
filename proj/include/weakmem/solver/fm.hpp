#pragma once

#include "weakmem/solver/term.hpp"

#include <cstddef>
#include <map>
#include <vector>

namespace weakmem::smt {

enum class Feasibility { Sat, Unsat, Unknown };

// sum(coeffs[v] * v) + constant  (< or <=)  0
struct LinearConstraint {
    std::map<int, Rational> coeffs;
    Rational constant = 0;
    bool strict = false;
};

// Fourier-Motzkin elimination. With `integral` every variable ranges over the
// integers: strict constraints are tightened and rounding is applied, which keeps
// Unsat sound but may answer Sat for integer-infeasible systems (reported as Unknown).
Feasibility fourierMotzkin(std::vector<LinearConstraint> cs, bool integral, std::size_t limit = 20000);

}  // namespace weakmem::smt
