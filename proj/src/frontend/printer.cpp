#include "weakmem/frontend/parser.hpp"

namespace weakmem::frontend {

using namespace ast;

namespace {

std::string exprText(const Expr& e, bool top);

std::string indexText(const IndexRef& i) { return i.bound ? "i" : std::to_string(i.index); }

std::string labelSuffix(HeapLabel l) { return l == HeapLabel::Real ? "" : std::string("@") + toString(l); }

std::string locText(const ExprPtr& e) {
    if (e->kind == ExprKind::Var) return e->name;
    return "(" + exprText(*e, true) + ")";
}

std::string exprText(const Expr& e, bool top) {
    switch (e.kind) {
        case ExprKind::Int: return std::to_string(e.value);
        case ExprKind::Bool: return e.flag ? "true" : "false";
        case ExprKind::Var: return e.name;
        case ExprKind::Unary: {
            const Expr& a = *e.args[0];
            std::string inner = exprText(a, false);
            if (e.unop == UnOp::Neg && a.kind == ExprKind::Int) inner = "(" + inner + ")";
            return (e.unop == UnOp::Neg ? "-" : "!") + inner;
        }
        case ExprKind::Binary: {
            std::string s = exprText(*e.args[0], false) + " " + toString(e.binop) + " " + exprText(*e.args[1], false);
            return top ? s : "(" + s + ")";
        }
        case ExprKind::Read: return "[" + e.name + "]_" + toString(e.mode);
        case ExprKind::Cas:
            return std::string("CAS_") + toString(e.mode) + "(" + e.name + ", " + exprText(*e.args[0], true) + ", " +
                   exprText(*e.args[1], true) + ")";
        case ExprKind::HeapRead: return locText(e.args[0]) + "." + toString(e.field) + labelSuffix(e.label);
        case ExprKind::ValsReadContains:
            return "(" + exprText(*e.args[1], false) + " in valsRead(" + locText(e.args[0]) + ", " +
                   indexText(e.index) + ")" + labelSuffix(e.label) + ")";
    }
    return "?";
}

// Top-level multiplication would be read back as a separating conjunction.
std::string pureText(const Expr& e) {
    std::string s = exprText(e, true);
    if (e.kind == ExprKind::Binary && e.binop == BinOp::Mul) return "(" + s + ")";
    return s;
}

std::string permText(const PermExpr& p) {
    if (p.wildcard) return "wildcard";
    if (p.den == 1) return std::to_string(p.num);
    return std::to_string(p.num) + "/" + std::to_string(p.den);
}

std::string assertionText(const Assertion& a);

std::string wrapped(const Assertion& a) {
    if (a.kind == AKind::Star || a.kind == AKind::Implies || a.kind == AKind::Cond) return "(" + assertionText(a) + ")";
    return assertionText(a);
}

std::string assertionText(const Assertion& a) {
    switch (a.kind) {
        case AKind::Pure: return pureText(*a.expr);
        case AKind::PointsTo: {
            std::string s = locText(a.loc) + " |->";
            if (!(a.perm.num == 1 && a.perm.den == 1)) s += "[" + permText(a.perm) + "]";
            return s + " " + (a.value ? pureText(*a.value) : "_");
        }
        case AKind::Star: {
            std::string s;
            for (std::size_t i = 0; i < a.kids.size(); ++i) {
                if (i) s += " * ";
                s += wrapped(*a.kids[i]);
            }
            return s;
        }
        case AKind::Implies: return pureText(*a.expr) + " ==> " + assertionText(*a.kids[0]);
        case AKind::Cond:
            return pureText(*a.expr) + " ? " + wrapped(*a.kids[0]) + " : " + wrapped(*a.kids[1]);
        case AKind::Uninit: return "Uninit(" + exprText(*a.loc, true) + ")";
        case AKind::Init: return "Init(" + exprText(*a.loc, true) + ")";
        case AKind::Acq: return "Acq(" + exprText(*a.loc, true) + ", " + a.inv.key() + ")";
        case AKind::Rel: return "Rel(" + exprText(*a.loc, true) + ", " + a.inv.key() + ")";
        case AKind::RMWAcq: return "RMWAcq(" + exprText(*a.loc, true) + ", " + a.inv.key() + ")";
        case AKind::Up: return "Up(" + assertionText(*a.kids[0]) + ")";
        case AKind::Down: return "Down(" + assertionText(*a.kids[0]) + ")";
        case AKind::Macro: {
            std::string s = a.name + "(";
            for (std::size_t i = 0; i < a.args.size(); ++i) {
                if (i) s += ", ";
                s += exprText(*a.args[i], true);
            }
            return s + ")";
        }
        case AKind::Acc:
            return "acc(" + locText(a.loc) + "." + toString(a.field) + labelSuffix(a.label) + ", " + permText(a.perm) +
                   ")";
        case AKind::Pred:
            return "acc(AcqConjunct(" + locText(a.loc) + ", " + indexText(a.index) + ")" + labelSuffix(a.label) + ", " +
                   permText(a.perm) + ")";
        case AKind::ValsReadEmpty:
            return "valsRead(" + locText(a.loc) + ", " + indexText(a.index) + ")" + labelSuffix(a.label) + " == {}";
        case AKind::InvInstance:
            return "inv(" + (a.loc ? exprText(*a.loc, true) : indexText(a.index)) + ")[V := " + exprText(*a.value, true) + "]" + labelSuffix(a.label);
    }
    return "?";
}

std::string pad(int n) { return std::string(static_cast<std::size_t>(n) * 4, ' '); }

std::string blockText(const Block& b, int indent) {
    std::string s = "{\n";
    for (const auto& st : b) s += print(*st, indent + 1);
    return s + pad(indent) + "}";
}

std::string paramsText(const std::vector<Param>& ps) {
    std::string s = "(";
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (i) s += ", ";
        if (ps[i].ghost) s += "ghost ";
        s += ps[i].name;
    }
    return s + ")";
}

}  // namespace

std::string print(const Expr& e) { return exprText(e, true); }
std::string print(const Assertion& a) { return assertionText(a); }

std::string print(const Stmt& s, int indent) {
    std::string p = pad(indent);
    switch (s.kind) {
        case SKind::AllocNa: return p + "alloc_na(" + s.target + ");\n";
        case SKind::AllocGhost: return p + "alloc_ghost(" + s.target + ");\n";
        case SKind::AllocAcq: return p + "alloc_acq(" + s.target + ", " + s.inv.key() + ");\n";
        case SKind::AllocRmw: return p + "alloc_rmw(" + s.target + ", " + s.inv.key() + ");\n";
        case SKind::Write: return p + "[" + s.loc + "]_" + toString(s.mode) + " := " + print(*s.e1) + ";\n";
        case SKind::Read: return p + s.target + " := [" + s.loc + "]_" + toString(s.mode) + ";\n";
        case SKind::Cas:
            return p + s.target + " := CAS_" + toString(s.mode) + "(" + s.loc + ", " + print(*s.e1) + ", " +
                   print(*s.e2) + ");\n";
        case SKind::Faa: return p + s.target + " := FAA_" + toString(s.mode) + "(" + s.loc + ", " + print(*s.e1) + ");\n";
        case SKind::FenceAcq: return p + "fence_acq;\n";
        case SKind::FenceRel: return p + "fence_rel(" + print(*s.annot) + ");\n";
        case SKind::Rewrite:
            return p + "rewrite Acq(" + s.loc + ", " + s.inv.key() + ") to Acq(" + s.loc + ", " + s.inv2.key() + ");\n";
        case SKind::While: {
            std::string r = p + "while (" + print(*s.e1) + ")";
            if (s.hasInvariant) r += " invariant " + print(*s.annot);
            if (s.body.empty()) return r + ";\n";
            return r + " " + blockText(s.body, indent) + "\n";
        }
        case SKind::If: {
            std::string r = p + "if (" + print(*s.e1) + ") " + blockText(s.body, indent);
            if (s.hasElse) r += " else " + blockText(s.elseBody, indent);
            return r + "\n";
        }
        case SKind::Par: {
            std::string r = p + "par {\n";
            for (const auto& t : s.threads) {
                r += pad(indent + 1) + "thread requires " + print(*t.pre) + " ensures " + print(*t.post) + " " +
                     blockText(t.body, indent + 1) + "\n";
            }
            return r + p + "}\n";
        }
        case SKind::Call: {
            std::string r = p + "call ";
            if (!s.results.empty()) {
                r += "(";
                for (std::size_t i = 0; i < s.results.size(); ++i) r += (i ? ", " : "") + s.results[i];
                r += ") := ";
            }
            r += s.callee + "(";
            for (std::size_t i = 0; i < s.args.size(); ++i) r += (i ? ", " : "") + print(*s.args[i]);
            return r + ");\n";
        }
        case SKind::Assign: return p + s.target + " := " + print(*s.e1) + ";\n";
        case SKind::Free: return p + "free(" + s.loc + ");\n";
    }
    return "";
}

std::string print(const Program& prog) {
    std::string s;
    for (const auto& r : prog.requires_) s += "require " + r + ";\n";
    for (const auto& i : prog.invariants) s += "invariant " + i.name + "(V) = " + print(*i.body) + ";\n";
    for (const auto& m : prog.macros) {
        s += "define " + m.name + "(";
        for (std::size_t i = 0; i < m.params.size(); ++i) s += (i ? ", " : "") + m.params[i];
        s += ") = " + print(*m.body) + ";\n";
    }
    for (const auto& p : prog.procedures) {
        s += "\nproc " + p.name + paramsText(p.params);
        if (!p.returns.empty()) s += " returns " + paramsText(p.returns);
        s += "\n    requires " + print(*p.pre) + "\n    ensures " + print(*p.post) + "\n" + blockText(p.body, 0) + "\n";
    }
    return s;
}

}  // namespace weakmem::frontend
