#pragma once

#include "weakmem/cli/driver.hpp"
#include "weakmem/encoder/executor.hpp"
#include "weakmem/frontend/parser.hpp"
#include "weakmem/monitor/monitor.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wmtest {

using namespace weakmem;

// Parsed, checked program plus everything needed to drive the engine by hand.
struct Fixture {
    frontend::ParseResult pr;
    spec::InvariantTable table;
    frontend::ModeCheckResult mc;
    smt::Solver solver;
    sym::Engine eng;
    enc::Encoder encoder;

    explicit Fixture(std::string_view src)
        : pr(checked(src)),
          table(spec::buildInvariantTable(pr.program)),
          mc(frontend::modeCheck(pr.program)),
          eng(sym::Context{&table, &pr.program, &solver}),
          encoder(pr.program, table, mc.info) {}

    static frontend::ParseResult checked(std::string_view src) {
        auto r = frontend::parse(src);
        if (!r.ok()) throw std::runtime_error("fixture does not parse: " + r.errors.front().message);
        return r;
    }

    const ast::Program& program() const { return pr.program; }

    ast::AssertionPtr source(const std::string& text) const {
        ast::AssertionPtr a;
        auto r = frontend::parseAssertionOnly(text, a);
        if (!r.ok()) throw std::runtime_error("bad assertion: " + text);
        return a;
    }

    ast::AssertionPtr A(const std::string& text, HeapLabel l = HeapLabel::Real, const std::string& proc = "main") const {
        return encoder.encode(source(text), proc, l);
    }

    // State with the named variables bound to distinct locations.
    sym::SymState state(std::initializer_list<const char*> locs = {}, std::initializer_list<const char*> ghosts = {}) const {
        sym::SymState s;
        for (const char* n : locs) s.store[n] = eng.newLocation(s, n);
        for (const char* n : ghosts) {
            s.store[n] = eng.newLocation(s, n);
            s.ghosts.insert(s.store[n].key());
        }
        return s;
    }

    // Single-successor inhale; throws if the assertion branches or fails.
    sym::SymState inhale(sym::SymState s, const std::string& text, HeapLabel l = HeapLabel::Real) const {
        auto o = eng.inhale(std::move(s), A(text, l));
        if (o.states.size() != 1 || !o.failures.empty()) throw std::runtime_error("inhale did not give one state: " + text);
        return o.states.front();
    }

    enc::ExecResult run(const std::string& proc, std::vector<monitor::StateReport>* reports = nullptr) const {
        const ast::Procedure* p = pr.program.findProcedure(proc);
        if (!p) throw std::runtime_error("no procedure " + proc);
        enc::ProcedurePlan plan = encoder.encodeProcedure(*p);
        sym::SymState init;
        for (const auto& prm : p->params) {
            smt::LinTerm t = init.var(prm.name);
            init.locations.push_back(t);
            if (prm.ghost) init.ghosts.insert(t.key());
        }
        enc::ExecOptions opts;
        if (reports)
            opts.onCheckpoint = [&](const sym::SymState& s, const enc::Primitive& prim) {
                reports->push_back(monitor::report(proc, prim.span.line, s, eng));
            };
        enc::Executor ex(eng, opts);
        return ex.run(plan.prims, std::move(init));
    }
};

inline cli::FileVerdict verify(std::string_view src, cli::RunConfig cfg = {}) {
    return cli::verifySource(src, "<test>", cfg);
}

inline std::vector<DiagKind> kinds(const std::vector<Diagnostic>& ds) {
    std::vector<DiagKind> out;
    for (const auto& d : ds) out.push_back(d.kind);
    return out;
}

inline std::vector<DiagKind> kinds(const cli::FileVerdict& fv) { return kinds(fv.allDiagnostics()); }

inline bool has(const std::vector<DiagKind>& ks, DiagKind k) { return std::find(ks.begin(), ks.end(), k) != ks.end(); }

inline bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

inline std::string allFinals(const cli::FileVerdict& fv, const std::string& proc = "main") {
    std::string out;
    for (const auto& p : fv.procedures)
        if (p.name == proc)
            for (const auto& a : p.finalAssertions) out += a + "\n";
    return out;
}

// Small deterministic generator, seeded per test.
struct Rng {
    unsigned long long x;
    explicit Rng(unsigned long long seed) : x(seed * 0x9E3779B97F4A7C15ull + 1) {}
    unsigned long long next() {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        return x;
    }
    int range(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<unsigned long long>(hi - lo + 1)); }
    bool coin() { return next() & 1; }
};

inline ast::ExprPtr genInt(Rng& r, int depth, bool withV = true);

inline ast::ExprPtr genBool(Rng& r, int depth, bool withV = true) {
    if (depth <= 0 || r.range(0, 3) == 0) {
        static const ast::BinOp cmp[] = {ast::BinOp::Eq, ast::BinOp::Ne, ast::BinOp::Lt, ast::BinOp::Le, ast::BinOp::Gt, ast::BinOp::Ge};
        return ast::mkBinary(cmp[r.range(0, 5)], genInt(r, depth - 1, withV), genInt(r, depth - 1, withV));
    }
    switch (r.range(0, 2)) {
        case 0: return ast::mkUnary(ast::UnOp::Not, genBool(r, depth - 1, withV));
        case 1: return ast::mkBinary(ast::BinOp::And, genBool(r, depth - 1, withV), genBool(r, depth - 1, withV));
        default: return ast::mkBinary(ast::BinOp::Or, genBool(r, depth - 1, withV), genBool(r, depth - 1, withV));
    }
}

inline ast::ExprPtr genInt(Rng& r, int depth, bool withV) {
    if (depth <= 0 || r.range(0, 2) == 0) {
        static const char* vars[] = {"x", "y", "V"};
        return r.coin() ? ast::mkInt(r.range(0, 50)) : ast::mkVar(vars[r.range(0, withV ? 2 : 1)]);
    }
    static const ast::BinOp ops[] = {ast::BinOp::Add, ast::BinOp::Sub, ast::BinOp::Mul, ast::BinOp::Mod, ast::BinOp::BitAnd};
    if (r.range(0, 5) == 0) return ast::mkUnary(ast::UnOp::Neg, genInt(r, depth - 1, withV));
    return ast::mkBinary(ops[r.range(0, 4)], genInt(r, depth - 1, withV), genInt(r, depth - 1, withV));
}

// Random source assertion over locations a, b, c and variables x, y (and V when withV).
inline ast::AssertionPtr genAssertion(Rng& r, int depth, bool withV) {
    static const char* locs[] = {"a", "b", "c"};
    if (depth <= 0 || r.range(0, 3) == 0) {
        auto a = std::make_shared<ast::Assertion>();
        switch (r.range(0, 3)) {
            case 0: return ast::mkPure(genBool(r, 2, withV));
            case 1:
                a->kind = ast::AKind::Uninit;
                a->loc = ast::mkVar(locs[r.range(0, 2)]);
                return a;
            default:
                a->kind = ast::AKind::PointsTo;
                a->loc = ast::mkVar(locs[r.range(0, 2)]);
                if (r.coin()) a->value = genInt(r, 1, withV);
                a->perm = r.coin() ? ast::PermExpr{false, 1, 1} : ast::PermExpr{false, 1, r.range(2, 4)};
                return a;
        }
    }
    switch (r.range(0, 2)) {
        case 0: return ast::mkStar({genAssertion(r, depth - 1, withV), genAssertion(r, depth - 1, withV)});
        case 1: return ast::mkImplies(genBool(r, 1, withV), genAssertion(r, depth - 1, withV));
        default: return ast::mkCond(genBool(r, 1, withV), genAssertion(r, depth - 1, withV), genAssertion(r, depth - 1, withV));
    }
}

}  // namespace wmtest
