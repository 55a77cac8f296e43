#include "weakmem/solver/solver.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <set>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

namespace weakmem::smt {

namespace {

std::string intLit(const Integer& v) {
    if (v < 0) return "(- " + Integer(-v).str() + ")";
    return v.str();
}

std::string realLit(const Rational& v) {
    Integer n = boost::multiprecision::numerator(v);
    Integer d = boost::multiprecision::denominator(v);
    std::string num = (n < 0 ? "(- " + Integer(-n).str() + ".0)" : n.str() + ".0");
    if (d == 1) return num;
    return "(/ " + num + " " + d.str() + ".0)";
}

std::string symName(const Atom& a) { return "x" + std::to_string(a.id()); }
std::string tokName(const Atom& a) { return "w" + std::to_string(a.id()); }

struct Emitter {
    std::set<std::string> ints, reals;
    bool bitvectors = false;

    std::string term(const LinTerm& t) {
        std::vector<std::string> parts;
        for (const auto& [a, k] : t.coeffs()) {
            std::string x = atom(a);
            parts.push_back(k == 1 ? x : "(* " + intLit(k) + " " + x + ")");
        }
        if (t.constant() != 0 || parts.empty()) parts.push_back(intLit(t.constant()));
        if (parts.size() == 1) return parts[0];
        std::string s = "(+";
        for (const auto& p : parts) s += " " + p;
        return s + ")";
    }

    std::string bv(const std::string& op, const LinTerm& a, const LinTerm& b) {
        bitvectors = true;
        return "(bv2nat (" + op + " ((_ int2bv 64) " + term(a) + ") ((_ int2bv 64) " + term(b) + ")))";
    }

    std::string atom(const Atom& a) {
        if (a.isSymbol()) {
            ints.insert(symName(a));
            return symName(a);
        }
        const auto& xs = a.args();
        switch (a.op()) {
            case OpaqueOp::Mul: return "(* " + term(xs[0]) + " " + term(xs[1]) + ")";
            case OpaqueOp::Div: return "(div " + term(xs[0]) + " " + term(xs[1]) + ")";
            case OpaqueOp::Mod: return "(mod " + term(xs[0]) + " " + term(xs[1]) + ")";
            case OpaqueOp::BitAnd: return bv("bvand", xs[0], xs[1]);
            case OpaqueOp::BitOr: return bv("bvor", xs[0], xs[1]);
            case OpaqueOp::BitXor: return bv("bvxor", xs[0], xs[1]);
            case OpaqueOp::Shl: return bv("bvshl", xs[0], xs[1]);
            case OpaqueOp::Shr: return bv("bvlshr", xs[0], xs[1]);
        }
        return "?";
    }

    std::string formula(const Formula& f) {
        switch (f.kind()) {
            case Formula::Kind::True: return "true";
            case Formula::Kind::False: return "false";
            case Formula::Kind::Eq: return "(= " + term(f.term()) + " 0)";
            case Formula::Kind::Le: return "(<= " + term(f.term()) + " 0)";
            case Formula::Kind::Ne: return "(not (= " + term(f.term()) + " 0))";
            case Formula::Kind::And:
            case Formula::Kind::Or: {
                std::string s = f.kind() == Formula::Kind::And ? "(and" : "(or";
                for (const auto& p : f.parts()) s += " " + formula(p);
                return s + ")";
            }
        }
        return "true";
    }

    std::string perm(const PermFact& f) {
        std::vector<std::string> parts;
        for (const auto& [w, k] : f.term.tokens()) {
            reals.insert(tokName(w));
            parts.push_back(k == 1 ? tokName(w) : "(* " + realLit(k) + " " + tokName(w) + ")");
        }
        parts.push_back(realLit(f.term.exact()));
        std::string t = parts.size() == 1 ? parts[0] : "(+";
        if (parts.size() > 1) {
            for (const auto& p : parts) t += " " + p;
            t += ")";
        }
        const char* op = f.rel == PermFact::Rel::Le ? "<=" : f.rel == PermFact::Rel::Lt ? "<" : "=";
        return std::string("(") + op + " " + t + " 0.0)";
    }
};

std::string assemble(Emitter& em, const std::vector<std::string>& asserts) {
    std::ostringstream os;
    if (em.bitvectors) os << "; bitwise operations go through 64-bit vectors\n";
    os << "(set-logic ALL)\n";
    for (const auto& n : em.ints) os << "(declare-const " << n << " Int)\n";
    for (const auto& n : em.reals) os << "(declare-const " << n << " Real)\n";
    for (const auto& a : asserts) os << "(assert " << a << ")\n";
    os << "(check-sat)\n";
    return os.str();
}

}  // namespace

std::string emitSmtlib(const Query& q) {
    Emitter em;
    std::vector<std::string> asserts;
    for (const auto& f : q.facts) asserts.push_back(em.formula(f));
    for (const auto& p : q.perms) asserts.push_back(em.perm(p));
    return assemble(em, asserts);
}

std::string emitSmtlib(const std::vector<Formula>& path, const Formula& goal) {
    Query q;
    q.facts = path;
    q.facts.push_back(goal.negate());
    return emitSmtlib(q);
}

Feasibility ExternalBackend::checkSat(const Query& q) const {
    std::string script = emitSmtlib(q);
    int in[2], out[2];
    if (pipe(in) != 0 || pipe(out) != 0) throw ExternalSolverFailure("pipe failed");
    pid_t pid = fork();
    if (pid < 0) throw ExternalSolverFailure("fork failed");
    if (pid == 0) {
        dup2(in[0], 0);
        dup2(out[1], 1);
        int devnull = open("/dev/null", O_WRONLY);
        if (devnull >= 0) dup2(devnull, 2);
        close(in[0]);
        close(in[1]);
        close(out[0]);
        close(out[1]);
        execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(in[0]);
    close(out[1]);
    signal(SIGPIPE, SIG_IGN);
    std::size_t written = 0;
    while (written < script.size()) {
        ssize_t n = write(in[1], script.data() + written, script.size() - written);
        if (n <= 0) break;
        written += static_cast<std::size_t>(n);
    }
    close(in[1]);

    std::string output;
    bool timedOut = false;
    int remaining = timeoutMs_;
    char buf[4096];
    while (true) {
        pollfd pfd{out[0], POLLIN, 0};
        int r = poll(&pfd, 1, remaining > 0 ? std::min(remaining, 100) : 0);
        if (r < 0 && errno == EINTR) continue;
        if (r > 0) {
            ssize_t n = read(out[0], buf, sizeof buf);
            if (n <= 0) break;
            output.append(buf, static_cast<std::size_t>(n));
            continue;
        }
        remaining -= 100;
        if (remaining <= 0) {
            timedOut = true;
            kill(pid, SIGKILL);
            break;
        }
    }
    close(out[0]);
    int status = 0;
    waitpid(pid, &status, 0);
    if (timedOut) return Feasibility::Unknown;

    std::istringstream is(output);
    std::string verdict;
    is >> verdict;
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
        throw ExternalSolverFailure("solver exited with status " + std::to_string(WEXITSTATUS(status)) +
                                    (verdict.empty() ? "" : " (" + verdict + ")"));
    if (verdict == "unsat") return Feasibility::Unsat;
    if (verdict == "sat") return Feasibility::Sat;
    if (verdict == "unknown") return Feasibility::Unknown;
    throw ExternalSolverFailure("unparseable solver output: " + output.substr(0, 80));
}

}  // namespace weakmem::smt
