#pragma once

#include "weakmem/frontend/checks.hpp"
#include "weakmem/monitor/monitor.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace weakmem::cli {

struct RunConfig {
    std::vector<std::string> inputs;
    std::string backend = "builtin";  // builtin | external
    std::string solverCmd;
    int solverTimeoutMs = 10000;
    int jobs = 1;
    int branchCap = 4096;
    bool trace = false;
    bool dumpPrimitives = false;
    bool dumpInvariants = false;
    bool checkSoundness = false;
    bool strictInvariants = false;
};

enum class Status { Verified, Failed, Unsupported };
const char* toString(Status s);

struct ProcVerdict {
    std::string name;
    Status status = Status::Verified;
    std::vector<Diagnostic> diagnostics;
    double seconds = 0;
    int branches = 0;
    std::vector<monitor::StateReport> soundness;  // boundary reports (only when the monitor is on)
    std::vector<std::string> finalAssertions;     // reconstructed end-of-body states
    std::vector<std::string> trace;
    std::string primitives;
};

struct FileVerdict {
    std::string path;
    Status status = Status::Verified;
    std::string reason;                   // unsupported / IO
    std::vector<Diagnostic> diagnostics;  // file-level: syntax, well-formedness, mode checking
    std::vector<ProcVerdict> procedures;
    frontend::Metrics metrics;
    std::string invariantTable;  // JSON text, when requested
    bool ioError = false;

    // Every diagnostic, file-level first.
    std::vector<Diagnostic> allDiagnostics() const;
};

// Feature pragmas this build understands.
bool supportedFeature(const std::string& name);

FileVerdict verifySource(std::string_view text, const std::string& path, const RunConfig& cfg);
FileVerdict verifyFile(const std::string& path, const RunConfig& cfg);
std::vector<FileVerdict> verifyFiles(const RunConfig& cfg);

nlohmann::json toJson(const Diagnostic& d);
nlohmann::json toJson(const std::vector<FileVerdict>& files, bool includeTiming = true);
std::string humanReport(const std::vector<FileVerdict>& files);

// 0 when everything verified, 1 otherwise (IO errors are reported separately by the caller).
int exitCode(const std::vector<FileVerdict>& files);

// ---- corpus

struct CorpusEntry {
    std::string name;
    std::string file;
    std::string expected;  // verified | failed | unsupported
    int errorLine = 0;     // for failed entries: line of the seeded statement
    int maxPrePost = -1;   // annotation budgets (-1: unchecked)
    int maxLoopInvariants = -1;
};

struct CorpusRow {
    CorpusEntry entry;
    std::string actual;
    frontend::Metrics metrics;
    double seconds = 0;
    bool match = false;
    std::string note;
};

struct ManifestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<CorpusEntry> loadManifest(const std::string& path);
std::vector<CorpusRow> runCorpus(const std::string& manifestPath, const RunConfig& cfg);
std::string corpusTable(const std::vector<CorpusRow>& rows);

}  // namespace weakmem::cli
