#include "weakmem/cli/driver.hpp"

#include "weakmem/encoder/executor.hpp"
#include "weakmem/frontend/parser.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace weakmem::cli {

using nlohmann::json;

const char* toString(Status s) {
    switch (s) {
        case Status::Verified: return "verified";
        case Status::Failed: return "failed";
        case Status::Unsupported: return "unsupported";
    }
    return "?";
}

bool supportedFeature(const std::string&) { return false; }

std::vector<Diagnostic> FileVerdict::allDiagnostics() const {
    std::vector<Diagnostic> out = diagnostics;
    for (const auto& p : procedures) out.insert(out.end(), p.diagnostics.begin(), p.diagnostics.end());
    return out;
}

namespace {

std::shared_ptr<const smt::Backend> makeBackend(const RunConfig& cfg) {
    if (cfg.backend == "external") return std::make_shared<smt::ExternalBackend>(cfg.solverCmd, cfg.solverTimeoutMs);
    return std::make_shared<smt::BuiltinBackend>();
}

ProcVerdict verifyProcedure(const ast::Procedure& proc, const ast::Program& prog, const spec::InvariantTable& table,
                            const frontend::ModeInfo& modes, const smt::Solver& solver, const RunConfig& cfg) {
    ProcVerdict v;
    v.name = proc.name;
    auto t0 = std::chrono::steady_clock::now();
    smt::resetSymbolCounter();
    try {
        enc::Encoder encoder(prog, table, modes);
        enc::ProcedurePlan plan = encoder.encodeProcedure(proc);
        if (cfg.dumpPrimitives) v.primitives = enc::dump(plan.prims);

        sym::Engine eng(sym::Context{&table, &prog, &solver});
        sym::SymState init;
        for (const auto& p : proc.params) {
            smt::LinTerm t = init.var(p.name);
            init.locations.push_back(t);
            if (p.ghost) init.ghosts.insert(t.key());
        }
        enc::ExecOptions opts;
        opts.branchCap = cfg.branchCap;
        opts.onCheckpoint = [&](const sym::SymState& s, const enc::Primitive& p) {
            if (!cfg.checkSoundness && !p.final) return;
            monitor::StateReport r = monitor::report(proc.name + ":" + p.rule, p.span.line, s, eng);
            if (cfg.checkSoundness && !r.violations.empty()) {
                if (cfg.strictInvariants) {
                    for (const auto& viol : r.violations) {
                        Diagnostic d;
                        d.kind = DiagKind::SoundnessInvariantViolation;
                        d.span = p.span;
                        d.rule = "state-invariant";
                        d.message = viol.location + ": " + viol.message;
                        enc::addDiagnostic(v.diagnostics, d);
                    }
                }
                v.soundness.push_back(r);
            } else if (p.final && cfg.checkSoundness) {
                v.soundness.push_back(r);
            }
            if (p.final && std::find(v.finalAssertions.begin(), v.finalAssertions.end(), r.assertion) == v.finalAssertions.end())
                v.finalAssertions.push_back(r.assertion);
        };
        if (cfg.trace) opts.trace = [&](const std::string& line) { v.trace.push_back(line); };
        enc::Executor ex(eng, opts);
        enc::ExecResult r = ex.run(plan.prims, std::move(init));
        for (const auto& d : r.diagnostics) enc::addDiagnostic(v.diagnostics, d);
        v.branches = r.branches;
    } catch (const EncodingError& e) {
        enc::addDiagnostic(v.diagnostics, e.diag);
    } catch (const smt::ExternalSolverFailure& e) {
        Diagnostic d;
        d.kind = DiagKind::ExternalSolverError;
        d.span = proc.span;
        d.rule = "solver";
        d.message = e.what();
        enc::addDiagnostic(v.diagnostics, d);
    }
    std::stable_sort(v.diagnostics.begin(), v.diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return a.span.offset < b.span.offset; });
    v.status = v.diagnostics.empty() ? Status::Verified : Status::Failed;
    v.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return v;
}

}  // namespace

FileVerdict verifySource(std::string_view text, const std::string& path, const RunConfig& cfg) {
    FileVerdict fv;
    fv.path = path;
    frontend::ParseResult pr = frontend::parse(text);
    if (!pr.ok()) {
        fv.diagnostics = pr.errors;
        fv.status = Status::Failed;
        return fv;
    }
    const ast::Program& prog = pr.program;
    fv.metrics = frontend::metrics(prog);
    for (const auto& feature : prog.requires_) {
        if (!supportedFeature(feature)) {
            fv.status = Status::Unsupported;
            fv.reason = "needs feature '" + feature + "' (not built)";
            return fv;
        }
    }
    fv.diagnostics = frontend::checkProgram(prog);
    frontend::ModeCheckResult mc = frontend::modeCheck(prog);
    for (const auto& d : mc.diagnostics) fv.diagnostics.push_back(d);
    if (!fv.diagnostics.empty()) {
        fv.status = Status::Failed;
        return fv;
    }
    spec::InvariantTable table;
    try {
        table = spec::buildInvariantTable(prog);
    } catch (const EncodingError& e) {
        fv.diagnostics.push_back(e.diag);
        fv.status = Status::Failed;
        return fv;
    }
    if (cfg.dumpInvariants) fv.invariantTable = table.toJson();

    smt::Solver solver(makeBackend(cfg));
    fv.procedures.resize(prog.procedures.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < prog.procedures.size(); i = next++)
            fv.procedures[i] = verifyProcedure(prog.procedures[i], prog, table, mc.info, solver, cfg);
    };
    int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(prog.procedures.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    fv.status = Status::Verified;
    for (const auto& p : fv.procedures)
        if (p.status != Status::Verified) fv.status = Status::Failed;
    return fv;
}

FileVerdict verifyFile(const std::string& path, const RunConfig& cfg) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        FileVerdict fv;
        fv.path = path;
        fv.status = Status::Failed;
        fv.ioError = true;
        fv.reason = "cannot read " + path;
        return fv;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return verifySource(ss.str(), path, cfg);
}

std::vector<FileVerdict> verifyFiles(const RunConfig& cfg) {
    std::vector<FileVerdict> out;
    for (const auto& p : cfg.inputs) out.push_back(verifyFile(p, cfg));
    return out;
}

json toJson(const Diagnostic& d) {
    return json{{"kind", std::string(toString(d.kind))},
                {"line", d.span.line},
                {"column", d.span.column},
                {"offset", d.span.offset},
                {"length", d.span.length},
                {"rule", d.rule},
                {"message", d.message},
                {"facts", d.facts},
                {"incompleteSolver", d.incompleteSolver}};
}

namespace {

json reportJson(const monitor::StateReport& r) {
    json j{{"obligation", r.obligation}, {"line", r.line}, {"assertion", r.assertion}};
    j["classification"] = json::object();
    for (const auto& [l, c] : r.classification) j["classification"][l] = c;
    j["violations"] = json::array();
    for (const auto& v : r.violations) j["violations"].push_back({{"location", v.location}, {"heap", v.label}, {"message", v.message}});
    return j;
}

}  // namespace

json toJson(const std::vector<FileVerdict>& files, bool includeTiming) {
    json out{{"schema", 1}, {"tool", "weakmem"}};
    int nv = 0, nf = 0, nu = 0;
    out["files"] = json::array();
    for (const auto& f : files) {
        json jf{{"path", f.path}, {"status", toString(f.status)}};
        if (!f.reason.empty()) jf["reason"] = f.reason;
        jf["metrics"] = {{"loc", f.metrics.loc},         {"funcs", f.metrics.funcs},
                         {"loops", f.metrics.loops},     {"prePost", f.metrics.prePost},
                         {"loopInvariants", f.metrics.loopInvariants}, {"other", f.metrics.other}};
        jf["diagnostics"] = json::array();
        for (const auto& d : f.diagnostics) jf["diagnostics"].push_back(toJson(d));
        jf["procedures"] = json::array();
        for (const auto& p : f.procedures) {
            json jp{{"name", p.name}, {"status", toString(p.status)}, {"branches", p.branches}};
            if (includeTiming) jp["seconds"] = p.seconds;
            jp["diagnostics"] = json::array();
            for (const auto& d : p.diagnostics) jp["diagnostics"].push_back(toJson(d));
            json sound{{"finalStates", p.finalAssertions}};
            sound["reports"] = json::array();
            for (const auto& r : p.soundness) sound["reports"].push_back(reportJson(r));
            std::size_t violations = 0;
            for (const auto& r : p.soundness) violations += r.violations.size();
            sound["violations"] = violations;
            jp["soundness"] = sound;
            if (!p.primitives.empty()) jp["primitives"] = p.primitives;
            if (!p.trace.empty()) {
                jp["trace"] = json::array();
                for (const auto& t : p.trace) jp["trace"].push_back(json::parse(t));
            }
            jf["procedures"].push_back(jp);
        }
        if (!f.invariantTable.empty()) jf["invariants"] = json::parse(f.invariantTable);
        (f.status == Status::Verified ? nv : f.status == Status::Failed ? nf : nu)++;
        out["files"].push_back(jf);
    }
    out["summary"] = {{"verified", nv}, {"failed", nf}, {"unsupported", nu}};
    return out;
}

std::string humanReport(const std::vector<FileVerdict>& files) {
    std::ostringstream os;
    auto diag = [&](const std::string& path, const Diagnostic& d) {
        os << path << ":" << d.span.line << ":" << d.span.column << ": error: " << toString(d.kind);
        if (!d.rule.empty()) os << " [" << d.rule << "]";
        os << ": " << d.message;
        if (d.incompleteSolver) os << " (solver gave up)";
        os << "\n";
        for (const auto& f : d.facts) os << "    with " << f << "\n";
    };
    for (const auto& f : files) {
        if (f.ioError) {
            os << f.path << ": error: " << f.reason << "\n";
            continue;
        }
        if (f.status == Status::Unsupported) {
            os << f.path << ": unsupported: " << f.reason << "\n";
            continue;
        }
        for (const auto& d : f.diagnostics) diag(f.path, d);
        for (const auto& p : f.procedures) {
            for (const auto& d : p.diagnostics) diag(f.path, d);
            os << f.path << ": " << p.name << ": " << toString(p.status) << " (" << std::fixed << std::setprecision(2)
               << p.seconds << "s)\n";
        }
        if (f.procedures.empty() && f.status == Status::Verified) os << f.path << ": verified (no procedures)\n";
    }
    return os.str();
}

int exitCode(const std::vector<FileVerdict>& files) {
    for (const auto& f : files)
        if (f.status != Status::Verified) return 1;
    return 0;
}

// ---- corpus

std::vector<CorpusEntry> loadManifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot read manifest " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ManifestError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!j.contains("entries") || !j["entries"].is_array()) throw ManifestError("manifest needs an 'entries' array");
    std::vector<CorpusEntry> out;
    for (const auto& e : j["entries"]) {
        CorpusEntry c;
        try {
            c.name = e.at("name").get<std::string>();
            c.file = e.at("file").get<std::string>();
            c.expected = e.at("expected").get<std::string>();
            c.errorLine = e.value("error_line", 0);
            c.maxPrePost = e.value("max_pre_post", -1);
            c.maxLoopInvariants = e.value("max_loop_invariants", -1);
        } catch (const json::exception& ex) {
            throw ManifestError("bad manifest entry: " + std::string(ex.what()));
        }
        if (c.expected != "verified" && c.expected != "failed" && c.expected != "unsupported")
            throw ManifestError("entry " + c.name + ": unknown expectation '" + c.expected + "'");
        out.push_back(c);
    }
    return out;
}

std::vector<CorpusRow> runCorpus(const std::string& manifestPath, const RunConfig& cfg) {
    auto entries = loadManifest(manifestPath);
    std::filesystem::path base = std::filesystem::path(manifestPath).parent_path();
    std::vector<CorpusRow> rows;
    for (const auto& e : entries) {
        CorpusRow row;
        row.entry = e;
        auto t0 = std::chrono::steady_clock::now();
        FileVerdict fv = verifyFile((base / e.file).string(), cfg);
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        row.metrics = fv.metrics;
        row.actual = fv.ioError ? "io-error" : toString(fv.status);
        row.match = row.actual == e.expected;
        std::vector<std::string> notes;
        if (fv.ioError) notes.push_back(fv.reason);
        if (row.match && e.expected == "failed" && e.errorLine > 0) {
            bool at = false;
            for (const auto& d : fv.allDiagnostics()) at = at || d.span.line == e.errorLine;
            if (!at) {
                row.match = false;
                notes.push_back("no diagnostic at line " + std::to_string(e.errorLine));
            }
        }
        if (e.maxPrePost >= 0 && fv.metrics.prePost > e.maxPrePost) {
            row.match = false;
            notes.push_back("pre/post pairs " + std::to_string(fv.metrics.prePost) + " > " + std::to_string(e.maxPrePost));
        }
        if (e.maxLoopInvariants >= 0 && fv.metrics.loopInvariants > e.maxLoopInvariants) {
            row.match = false;
            notes.push_back("loop invariants " + std::to_string(fv.metrics.loopInvariants) + " > " +
                            std::to_string(e.maxLoopInvariants));
        }
        if (!row.match && row.actual != e.expected) {
            auto diags = fv.allDiagnostics();
            if (!diags.empty())
                notes.push_back("first diagnostic: line " + std::to_string(diags[0].span.line) + " " +
                                std::string(toString(diags[0].kind)) + ": " + diags[0].message);
        }
        for (std::size_t i = 0; i < notes.size(); ++i) row.note += (i ? "; " : "") + notes[i];
        rows.push_back(row);
    }
    return rows;
}

std::string corpusTable(const std::vector<CorpusRow>& rows) {
    std::ostringstream os;
    os << std::left << std::setw(30) << "Example" << std::right << std::setw(5) << "LOC" << std::setw(7) << "funcs"
       << std::setw(7) << "loops" << std::setw(9) << "time(s)" << std::setw(5) << "PP" << std::setw(5) << "LI"
       << std::setw(7) << "Other" << "  " << std::left << std::setw(12) << "expected" << std::setw(12) << "actual"
       << "ok\n";
    int mismatches = 0;
    for (const auto& r : rows) {
        os << std::left << std::setw(30) << r.entry.name << std::right << std::setw(5) << r.metrics.loc << std::setw(7)
           << r.metrics.funcs << std::setw(7) << r.metrics.loops << std::setw(9) << std::fixed << std::setprecision(2)
           << r.seconds << std::setw(5) << r.metrics.prePost << std::setw(5) << r.metrics.loopInvariants << std::setw(7)
           << r.metrics.other << "  " << std::left << std::setw(12) << r.entry.expected << std::setw(12) << r.actual
           << (r.match ? "yes" : "NO");
        if (!r.note.empty()) os << "  (" << r.note << ")";
        os << "\n";
        if (!r.match) ++mismatches;
    }
    os << "mismatches: " << mismatches << "\n";
    return os.str();
}

}  // namespace weakmem::cli
