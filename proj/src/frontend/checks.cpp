#include "weakmem/frontend/checks.hpp"

#include <algorithm>
#include <set>

namespace weakmem::frontend {

using namespace ast;

const char* toString(LocClass c) {
    switch (c) {
        case LocClass::Unknown: return "unknown";
        case LocClass::NonAtomic: return "non-atomic";
        case LocClass::AtomicAcq: return "atomic-acq";
        case LocClass::AtomicRmw: return "atomic-rmw";
        case LocClass::Atomic: return "atomic";
        case LocClass::Ghost: return "ghost";
    }
    return "?";
}

LocClass ModeInfo::classOf(const std::string& proc, const std::string& var) const {
    auto p = classes.find(proc);
    if (p == classes.end()) return LocClass::Unknown;
    auto v = p->second.find(var);
    return v == p->second.end() ? LocClass::Unknown : v->second;
}

std::vector<std::string> assignedVariables(const Block& b) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    forEachStmt(b, [&](const Stmt& s) {
        auto add = [&](const std::string& n) {
            if (!n.empty() && seen.insert(n).second) out.push_back(n);
        };
        switch (s.kind) {
            case SKind::AllocNa:
            case SKind::AllocAcq:
            case SKind::AllocRmw:
            case SKind::AllocGhost:
            case SKind::Read:
            case SKind::Cas:
            case SKind::Faa:
            case SKind::Assign: add(s.target); break;
            case SKind::Call:
                for (const auto& r : s.results) add(r);
                break;
            default: break;
        }
    });
    return out;
}

namespace {

enum class Ty { Int, Bool, Error };

class Checker {
public:
    explicit Checker(const Program& p) : p_(p) {}

    std::vector<Diagnostic> run() {
        for (const auto& inv : p_.invariants) {
            scope_ = nullptr;
            inInvariant_ = true;
            assertion(*inv.body);
        }
        inInvariant_ = false;
        for (const auto& m : p_.macros) {
            std::set<std::string> sc(m.params.begin(), m.params.end());
            scope_ = &sc;
            assertion(*m.body);
        }
        for (const auto& proc : p_.procedures) {
            std::set<std::string> sc;
            for (const auto& q : proc.params) sc.insert(q.name);
            std::set<std::string> pre = sc;
            scope_ = &pre;
            assertion(*proc.pre);
            for (const auto& q : proc.returns) sc.insert(q.name);
            std::set<std::string> post = sc;
            scope_ = &post;
            assertion(*proc.post);
            for (const auto& v : assignedVariables(proc.body)) sc.insert(v);
            scope_ = &sc;
            block(proc.body);
        }
        std::stable_sort(out_.begin(), out_.end(),
                         [](const Diagnostic& a, const Diagnostic& b) { return a.span.offset < b.span.offset; });
        return out_;
    }

private:
    void report(DiagKind k, const SourceSpan& sp, const std::string& msg) {
        Diagnostic d;
        d.kind = k;
        d.span = sp;
        d.rule = "well-formedness";
        d.message = msg;
        out_.push_back(d);
    }

    void useVar(const std::string& n, const SourceSpan& sp) {
        if (n == "V") {
            if (!inInvariant_) report(DiagKind::UndeclaredVariable, sp, "'V' may only appear inside an invariant");
            return;
        }
        if (scope_ && !scope_->count(n)) report(DiagKind::UndeclaredVariable, sp, "undeclared variable '" + n + "'");
    }

    Ty expr(const Expr& e, bool allowAtomic = false) {
        switch (e.kind) {
            case ExprKind::Int: return Ty::Int;
            case ExprKind::Bool: return Ty::Bool;
            case ExprKind::Var: useVar(e.name, e.span); return Ty::Int;
            case ExprKind::Unary: {
                Ty t = expr(*e.args[0], allowAtomic);
                Ty want = e.unop == UnOp::Neg ? Ty::Int : Ty::Bool;
                if (t != Ty::Error && t != want) {
                    report(DiagKind::TypeError, e.span, e.unop == UnOp::Neg ? "negation of a boolean" : "'!' of an integer");
                    return Ty::Error;
                }
                return want;
            }
            case ExprKind::Binary: {
                bool inner = allowAtomic && isComparison(e.binop);
                Ty a = expr(*e.args[0], inner);
                Ty b = expr(*e.args[1], inner);
                if (a == Ty::Error || b == Ty::Error) return Ty::Error;
                if (isBoolOp(e.binop)) {
                    if (a != Ty::Bool || b != Ty::Bool) {
                        report(DiagKind::TypeError, e.span, std::string("operands of '") + toString(e.binop) + "' must be boolean");
                        return Ty::Error;
                    }
                    return Ty::Bool;
                }
                if (e.binop == BinOp::Eq || e.binop == BinOp::Ne) {
                    if (a != b) {
                        report(DiagKind::TypeError, e.span, "comparison of an integer with a boolean");
                        return Ty::Error;
                    }
                    return Ty::Bool;
                }
                if (a != Ty::Int || b != Ty::Int) {
                    report(DiagKind::TypeError, e.span, std::string("operands of '") + toString(e.binop) + "' must be integers");
                    return Ty::Error;
                }
                return isComparison(e.binop) ? Ty::Bool : Ty::Int;
            }
            case ExprKind::Read:
            case ExprKind::Cas:
                if (!allowAtomic) {
                    report(DiagKind::TypeError, e.span, "atomic operations may only appear as the condition of a spin loop");
                    return Ty::Error;
                }
                useVar(e.name, e.span);
                for (const auto& a : e.args)
                    if (expr(*a) != Ty::Int) report(DiagKind::TypeError, a->span, "CAS operands must be integers");
                return Ty::Int;
            case ExprKind::HeapRead:
            case ExprKind::ValsReadContains: return Ty::Int;
        }
        return Ty::Error;
    }

    void want(const Expr& e, Ty t, const char* what, bool allowAtomic = false) {
        Ty got = expr(e, allowAtomic);
        if (got != Ty::Error && got != t) report(DiagKind::TypeError, e.span, std::string(what) + (t == Ty::Int ? " must be an integer" : " must be a boolean"));
    }

    void invRef(const InvRef& r) {
        for (const auto& n : r.names)
            if (!p_.findInvariant(n)) report(DiagKind::UndeclaredVariable, r.span, "unknown invariant '" + n + "'");
    }

    void assertion(const Assertion& a) {
        switch (a.kind) {
            case AKind::Pure: want(*a.expr, Ty::Bool, "pure assertion"); break;
            case AKind::PointsTo:
                want(*a.loc, Ty::Int, "location");
                if (a.value) want(*a.value, Ty::Int, "stored value");
                break;
            case AKind::Star:
                for (const auto& k : a.kids) assertion(*k);
                break;
            case AKind::Implies:
            case AKind::Cond:
                want(*a.expr, Ty::Bool, "guard");
                for (const auto& k : a.kids) assertion(*k);
                break;
            case AKind::Uninit:
            case AKind::Init: want(*a.loc, Ty::Int, "location"); break;
            case AKind::Acq:
            case AKind::Rel:
            case AKind::RMWAcq:
                want(*a.loc, Ty::Int, "location");
                invRef(a.inv);
                break;
            case AKind::Up:
            case AKind::Down: assertion(*a.kids[0]); break;
            case AKind::Macro: {
                const MacroDecl* m = p_.findMacro(a.name);
                if (!m) {
                    report(DiagKind::UndeclaredVariable, a.span, "unknown definition '" + a.name + "'");
                } else if (m->params.size() != a.args.size()) {
                    report(DiagKind::TypeError, a.span, "'" + a.name + "' expects " + std::to_string(m->params.size()) + " arguments");
                }
                for (const auto& e : a.args) want(*e, Ty::Int, "argument");
                break;
            }
            default: break;
        }
    }

    void block(const Block& b) {
        for (const auto& s : b) stmt(*s);
    }

    void stmt(const Stmt& s) {
        switch (s.kind) {
            case SKind::AllocAcq:
            case SKind::AllocRmw: invRef(s.inv); break;
            case SKind::Write:
                useVar(s.loc, s.span);
                want(*s.e1, Ty::Int, "written value");
                break;
            case SKind::Read: useVar(s.loc, s.span); break;
            case SKind::Cas:
                useVar(s.loc, s.span);
                want(*s.e1, Ty::Int, "expected value");
                want(*s.e2, Ty::Int, "new value");
                break;
            case SKind::Faa:
                useVar(s.loc, s.span);
                want(*s.e1, Ty::Int, "increment");
                break;
            case SKind::FenceRel: assertion(*s.annot); break;
            case SKind::Rewrite:
                useVar(s.loc, s.span);
                invRef(s.inv);
                invRef(s.inv2);
                break;
            case SKind::While: {
                bool spin = !s.hasInvariant && s.body.empty();
                want(*s.e1, Ty::Bool, "loop condition", spin);
                if (s.hasInvariant) assertion(*s.annot);
                block(s.body);
                break;
            }
            case SKind::If:
                want(*s.e1, Ty::Bool, "branch condition");
                block(s.body);
                block(s.elseBody);
                break;
            case SKind::Par:
                for (const auto& t : s.threads) {
                    assertion(*t.pre);
                    assertion(*t.post);
                    block(t.body);
                }
                break;
            case SKind::Call: {
                const Procedure* callee = p_.findProcedure(s.callee);
                if (!callee) {
                    report(DiagKind::UndeclaredVariable, s.span, "unknown procedure '" + s.callee + "'");
                } else {
                    if (callee->params.size() != s.args.size())
                        report(DiagKind::TypeError, s.span, "'" + s.callee + "' expects " + std::to_string(callee->params.size()) + " arguments");
                    if (callee->returns.size() != s.results.size())
                        report(DiagKind::TypeError, s.span, "'" + s.callee + "' returns " + std::to_string(callee->returns.size()) + " values");
                }
                for (const auto& a : s.args) want(*a, Ty::Int, "argument");
                break;
            }
            case SKind::Assign: want(*s.e1, Ty::Int, "assigned value"); break;
            case SKind::Free: useVar(s.loc, s.span); break;
            default: break;
        }
    }

    const Program& p_;
    const std::set<std::string>* scope_ = nullptr;
    bool inInvariant_ = false;
    std::vector<Diagnostic> out_;
};

// ---- mode checking

struct Evidence {
    LocClass cls;
    SourceSpan span;
    std::string what;
};

class ModeChecker {
public:
    explicit ModeChecker(const Program& p) : p_(p) {}

    ModeCheckResult run() {
        ModeCheckResult r;
        for (const auto& proc : p_.procedures) {
            std::map<std::string, std::vector<Evidence>> ev;
            std::map<std::string, std::vector<std::pair<const Stmt*, std::string>>> uses;
            std::set<std::string> ghostParams;
            for (const auto& q : proc.params)
                if (q.ghost) ghostParams.insert(q.name);
            for (const auto& q : proc.returns)
                if (q.ghost) ghostParams.insert(q.name);
            for (const auto& g : ghostParams) ev[g].push_back({LocClass::Ghost, proc.span, "ghost declaration"});
            collectAssertion(*proc.pre, ev, ghostParams);
            collectAssertion(*proc.post, ev, ghostParams);
            forEachStmt(proc.body, [&](const Stmt& s) {
                switch (s.kind) {
                    case SKind::AllocNa: ev[s.target].push_back({LocClass::NonAtomic, s.span, "alloc_na"}); break;
                    case SKind::AllocAcq: ev[s.target].push_back({LocClass::AtomicAcq, s.span, "alloc_acq"}); break;
                    case SKind::AllocRmw: ev[s.target].push_back({LocClass::AtomicRmw, s.span, "alloc_rmw"}); break;
                    case SKind::AllocGhost: ev[s.target].push_back({LocClass::Ghost, s.span, "alloc_ghost"}); break;
                    case SKind::FenceRel: collectAssertion(*s.annot, ev, ghostParams); break;
                    case SKind::Rewrite: ev[s.loc].push_back({LocClass::AtomicAcq, s.span, "rewrite"}); break;
                    case SKind::While:
                        if (s.hasInvariant) collectAssertion(*s.annot, ev, ghostParams);
                        break;
                    default: break;
                }
                for (const auto& t : s.threads) {
                    collectAssertion(*t.pre, ev, ghostParams);
                    collectAssertion(*t.post, ev, ghostParams);
                }
            });

            // resolve one class per variable from declarations and specifications
            auto& classes = r.info.classes[proc.name];
            std::vector<std::string> names;
            for (const auto& [n, es] : ev) names.push_back(n);
            for (const auto& n : names) {
                LocClass c = LocClass::Unknown;
                for (const auto& e : ev[n]) {
                    LocClass m = merge(c, e.cls);
                    if (m == LocClass::Unknown && c != LocClass::Unknown) {
                        diag(r, DiagKind::MixedModeAccess, e.span,
                             "location '" + n + "' used as " + toString(e.cls) + " (" + e.what + ") but is " + toString(c));
                        continue;
                    }
                    c = m;
                }
                classes[n] = c;
            }

            // accesses
            forEachStmt(proc.body, [&](const Stmt& s) { checkAccess(r, classes, s); });
        }
        std::stable_sort(r.diagnostics.begin(), r.diagnostics.end(),
                         [](const Diagnostic& a, const Diagnostic& b) { return a.span.offset < b.span.offset; });
        return r;
    }

private:
    static LocClass merge(LocClass a, LocClass b) {
        if (a == LocClass::Unknown) return b;
        if (b == LocClass::Unknown || a == b) return a;
        if (a == LocClass::Atomic && (b == LocClass::AtomicAcq || b == LocClass::AtomicRmw)) return b;
        if (b == LocClass::Atomic && (a == LocClass::AtomicAcq || a == LocClass::AtomicRmw)) return a;
        // ghosts are non-atomic locations
        if ((a == LocClass::Ghost && b == LocClass::NonAtomic) || (b == LocClass::Ghost && a == LocClass::NonAtomic))
            return LocClass::Ghost;
        return LocClass::Unknown;
    }

    void collectAssertion(const Assertion& a, std::map<std::string, std::vector<Evidence>>& ev,
                          const std::set<std::string>& ghosts) {
        auto locName = [](const ExprPtr& e) -> std::string {
            return e && e->kind == ExprKind::Var ? e->name : std::string();
        };
        std::string n = locName(a.loc);
        switch (a.kind) {
            case AKind::PointsTo:
            case AKind::Uninit:
                if (!n.empty())
                    ev[n].push_back({ghosts.count(n) ? LocClass::Ghost : LocClass::NonAtomic, a.span, "points-to"});
                break;
            case AKind::Acq:
                if (!n.empty()) ev[n].push_back({LocClass::AtomicAcq, a.span, "Acq"});
                break;
            case AKind::RMWAcq:
                if (!n.empty()) ev[n].push_back({LocClass::AtomicRmw, a.span, "RMWAcq"});
                break;
            case AKind::Rel:
                if (!n.empty()) ev[n].push_back({LocClass::Atomic, a.span, "Rel"});
                break;
            case AKind::Macro: {
                const MacroDecl* m = p_.findMacro(a.name);
                if (!m || m->params.size() != a.args.size()) break;
                // map macro parameters back to argument variables
                std::map<std::string, std::vector<Evidence>> inner;
                collectAssertion(*m->body, inner, {});
                for (std::size_t i = 0; i < m->params.size(); ++i) {
                    std::string arg = locName(a.args[i]);
                    if (arg.empty()) continue;
                    for (auto e : inner[m->params[i]]) {
                        if (e.cls == LocClass::NonAtomic && ghosts.count(arg)) e.cls = LocClass::Ghost;
                        e.span = a.span;
                        ev[arg].push_back(e);
                    }
                }
                break;
            }
            default:
                for (const auto& k : a.kids) collectAssertion(*k, ev, ghosts);
                break;
        }
    }

    void diag(ModeCheckResult& r, DiagKind k, const SourceSpan& sp, const std::string& msg) {
        Diagnostic d;
        d.kind = k;
        d.span = sp;
        d.rule = "mode-check";
        d.message = msg;
        r.diagnostics.push_back(d);
    }

    void checkAccess(ModeCheckResult& r, const std::map<std::string, LocClass>& classes, const Stmt& s) {
        auto cls = [&](const std::string& n) {
            auto it = classes.find(n);
            return it == classes.end() ? LocClass::Unknown : it->second;
        };
        auto plain = [&](const std::string& loc, AccessMode m, const SourceSpan& sp, bool isRead) {
            LocClass c = cls(loc);
            bool atomicLoc = c == LocClass::AtomicAcq || c == LocClass::AtomicRmw || c == LocClass::Atomic;
            bool naLoc = c == LocClass::NonAtomic || c == LocClass::Ghost;
            if (m == AccessMode::Na && atomicLoc)
                diag(r, DiagKind::MixedModeAccess, sp, "non-atomic access to atomic location '" + loc + "'");
            else if (m != AccessMode::Na && naLoc)
                diag(r, DiagKind::MixedModeAccess, sp, std::string(toString(m)) + " access to non-atomic location '" + loc + "'");
            else if (isRead && m != AccessMode::Na && c == LocClass::AtomicRmw)
                diag(r, DiagKind::ReadOnRMWLocation, sp, "atomic read of '" + loc + "', which was allocated for read-modify-write access");
        };
        auto rmw = [&](const std::string& loc, const SourceSpan& sp) {
            LocClass c = cls(loc);
            if (c == LocClass::NonAtomic || c == LocClass::Ghost)
                diag(r, DiagKind::AtomicAccessToNonAtomic, sp, "read-modify-write on non-atomic location '" + loc + "'");
            else if (c == LocClass::AtomicAcq)
                diag(r, DiagKind::CASOnAcqLocation, sp, "read-modify-write on '" + loc + "', which was allocated for acquire reads");
        };
        switch (s.kind) {
            case SKind::Write: plain(s.loc, s.mode, s.span, false); break;
            case SKind::Read: plain(s.loc, s.mode, s.span, true); break;
            case SKind::Cas:
            case SKind::Faa: rmw(s.loc, s.span); break;
            case SKind::Free:
                if (cls(s.loc) != LocClass::NonAtomic && cls(s.loc) != LocClass::Unknown && cls(s.loc) != LocClass::Ghost)
                    diag(r, DiagKind::MixedModeAccess, s.span, "free of atomic location '" + s.loc + "'");
                break;
            case SKind::While: {
                std::function<void(const Expr&)> walk = [&](const Expr& e) {
                    if (e.kind == ExprKind::Read) plain(e.name, e.mode, s.span, true);
                    if (e.kind == ExprKind::Cas) rmw(e.name, s.span);
                    for (const auto& a : e.args) walk(*a);
                };
                walk(*s.e1);
                break;
            }
            default: break;
        }
    }

    const Program& p_;
};

}  // namespace

std::vector<Diagnostic> checkProgram(const Program& p) { return Checker(p).run(); }

ModeCheckResult modeCheck(const Program& p) { return ModeChecker(p).run(); }

Metrics metrics(const Program& p) {
    Metrics m;
    std::set<int> lines;
    for (const auto& proc : p.procedures) {
        m.funcs++;
        m.prePost++;
        forEachStmt(proc.body, [&](const Stmt& s) {
            lines.insert(s.span.line);
            switch (s.kind) {
                case SKind::While:
                    m.loops++;
                    if (s.hasInvariant) m.loopInvariants++;
                    break;
                case SKind::Par:
                    m.funcs += static_cast<int>(s.threads.size());
                    m.prePost += static_cast<int>(s.threads.size());
                    break;
                case SKind::AllocAcq:
                case SKind::AllocRmw:
                case SKind::FenceRel:
                case SKind::Rewrite:
                case SKind::AllocGhost: m.other++; break;
                default: break;
            }
        });
    }
    m.loc = static_cast<int>(lines.size());
    return m;
}

}  // namespace weakmem::frontend
