#pragma once

#include "weakmem/encoder/encoder.hpp"
#include "weakmem/symstate/state.hpp"

#include <functional>
#include <string>
#include <vector>

namespace weakmem::enc {

struct ExecOptions {
    int branchCap = 4096;
    // Called at every Checkpoint with the current state.
    std::function<void(const sym::SymState&, const Primitive&)> onCheckpoint;
    // One JSON object per executed primitive.
    std::function<void(const std::string&)> trace;
};

struct ExecResult {
    std::vector<Diagnostic> diagnostics;
    std::vector<sym::SymState> finals;  // states reaching a final checkpoint
    int branches = 0;
    bool capped = false;
};

// Depth-first execution of a primitive sequence. The first failure on a path ends that path.
class Executor {
public:
    Executor(const sym::Engine& eng, ExecOptions opts) : eng_(eng), opts_(std::move(opts)) {}

    ExecResult run(const std::vector<Primitive>& seq, sym::SymState init);

private:
    struct Frame {
        const std::vector<Primitive>* seq = nullptr;
        std::size_t pc = 0;
        int bound = -1;
    };
    struct Work {
        sym::SymState s;
        std::vector<Frame> stack;
    };

    // Executes one primitive; successors are pushed onto `out`.
    void step(Work w, const Primitive& p, std::vector<Work>& out, ExecResult& r);
    void fork(Work w, const Primitive& p, std::vector<Work>& out, ExecResult& r);
    void spinDiscard(Work& w, const Primitive& p, int bound, ExecResult& r, bool& ok);
    void report(const sym::SymState& s, const Primitive& p, const sym::Failure& f, ExecResult& r);
    void traceStep(const sym::SymState& s, const Primitive& p);
    std::vector<int> heldIndices(const sym::SymState& s, const smt::LinTerm& loc) const;

    const sym::Engine& eng_;
    ExecOptions opts_;
    int budget_ = 0;
};

void addDiagnostic(std::vector<Diagnostic>& out, const Diagnostic& d);  // dedups on kind and offset

}  // namespace weakmem::enc
