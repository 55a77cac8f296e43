#include "weakmem/cli/driver.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace weakmem;

int main(int argc, char** argv) {
    CLI::App app{"weakmem: deductive verifier for annotated C11 weak-memory programs"};
    app.require_subcommand(1);

    cli::RunConfig cfg;
    std::string jsonOut;
    bool jsonStdout = false;

    auto* verify = app.add_subcommand("verify", "verify source files");
    verify->add_option("files", cfg.inputs, "input files")->required();
    verify->add_option("--json", jsonOut, "write the JSON report to this file ('-' for stdout)");
    verify->add_option("--backend", cfg.backend, "builtin | external")->check(CLI::IsMember({"builtin", "external"}));
    verify->add_option("--solver-cmd", cfg.solverCmd, "SMT-LIB2 solver command reading a script on stdin");
    verify->add_option("--solver-timeout-ms", cfg.solverTimeoutMs, "per-query timeout for the external solver");
    verify->add_option("--jobs", cfg.jobs, "procedures verified in parallel")->check(CLI::PositiveNumber);
    verify->add_option("--branch-cap", cfg.branchCap, "paths explored per procedure before giving up");
    verify->add_flag("--trace", cfg.trace, "record every executed primitive (JSON report)");
    verify->add_flag("--dump-primitives", cfg.dumpPrimitives, "print the encoded primitive sequences");
    verify->add_flag("--dump-invariants", cfg.dumpInvariants, "print the invariant table");
    verify->add_flag("--check-soundness-invariants", cfg.checkSoundness, "check state invariants at every statement");
    verify->add_flag("--strict-invariants", cfg.strictInvariants, "turn state invariant violations into errors");

    std::string manifest;
    auto* corpus = app.add_subcommand("corpus", "run a corpus manifest and print the results table");
    corpus->add_option("manifest", manifest, "manifest.json")->required();
    corpus->add_flag("--check-soundness-invariants", cfg.checkSoundness, "check state invariants at every statement");
    corpus->add_option("--backend", cfg.backend, "builtin | external")->check(CLI::IsMember({"builtin", "external"}));
    corpus->add_option("--solver-cmd", cfg.solverCmd, "SMT-LIB2 solver command");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (cfg.backend == "external" && cfg.solverCmd.empty()) {
        std::cerr << "weakmem: --backend external needs --solver-cmd\n";
        return 2;
    }
    if (cfg.strictInvariants) cfg.checkSoundness = true;

    if (*corpus) {
        try {
            auto rows = cli::runCorpus(manifest, cfg);
            std::cout << cli::corpusTable(rows);
            for (const auto& r : rows)
                if (!r.match) return 1;
            return 0;
        } catch (const cli::ManifestError& e) {
            std::cerr << "weakmem: " << e.what() << "\n";
            return 2;
        }
    }

    jsonStdout = jsonOut == "-";
    auto files = cli::verifyFiles(cfg);
    bool io = false;
    for (const auto& f : files) io = io || f.ioError;
    if (!jsonStdout) std::cout << cli::humanReport(files);
    if (cfg.dumpInvariants && !jsonStdout)
        for (const auto& f : files)
            if (!f.invariantTable.empty()) std::cout << "invariants of " << f.path << ":\n" << f.invariantTable << "\n";
    if (cfg.dumpPrimitives && !jsonStdout)
        for (const auto& f : files)
            for (const auto& p : f.procedures) std::cout << "procedure " << p.name << ":\n" << p.primitives;
    if (cfg.checkSoundness && !jsonStdout)
        for (const auto& f : files)
            for (const auto& p : f.procedures) {
                std::size_t n = 0;
                for (const auto& r : p.soundness) n += r.violations.size();
                std::cout << f.path << ": " << p.name << ": " << n << " state invariant violation(s)\n";
                for (const auto& r : p.soundness)
                    for (const auto& v : r.violations)
                        std::cout << "    line " << r.line << ": " << v.location << "@" << v.label << ": " << v.message << "\n";
                for (const auto& a : p.finalAssertions) std::cout << "    final: " << a << "\n";
            }
    if (!jsonOut.empty()) {
        std::string text = cli::toJson(files).dump(2) + "\n";
        if (jsonStdout) {
            std::cout << text;
        } else {
            std::ofstream out(jsonOut);
            if (!out) {
                std::cerr << "weakmem: cannot write " << jsonOut << "\n";
                return 2;
            }
            out << text;
        }
    }
    if (io) return 2;
    return cli::exitCode(files);
}
