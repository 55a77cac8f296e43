#include "weakmem/frontend/ast.hpp"

namespace weakmem {

const char* toString(AccessMode m) {
    switch (m) {
        case AccessMode::Na: return "na";
        case AccessMode::Acq: return "acq";
        case AccessMode::Rel: return "rel";
        case AccessMode::RelAcq: return "rel_acq";
        case AccessMode::Rlx: return "rlx";
    }
    return "?";
}

const char* toString(HeapLabel l) {
    switch (l) {
        case HeapLabel::Real: return "real";
        case HeapLabel::Up: return "up";
        case HeapLabel::Down: return "down";
        case HeapLabel::Tmp: return "tmp";
    }
    return "?";
}

const char* toString(Field f) {
    switch (f) {
        case Field::Val: return "val";
        case Field::Init: return "init";
        case Field::Rel: return "rel";
        case Field::Acq: return "acq";
    }
    return "?";
}

std::optional<AccessMode> parseMode(const std::string& s) {
    if (s == "na") return AccessMode::Na;
    if (s == "acq") return AccessMode::Acq;
    if (s == "rel") return AccessMode::Rel;
    if (s == "rel_acq") return AccessMode::RelAcq;
    if (s == "rlx") return AccessMode::Rlx;
    return std::nullopt;
}

}  // namespace weakmem

namespace weakmem::ast {

const char* toString(BinOp op) {
    switch (op) {
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Div: return "/";
        case BinOp::Mod: return "%";
        case BinOp::BitAnd: return "&";
        case BinOp::BitOr: return "|";
        case BinOp::BitXor: return "^";
        case BinOp::Shl: return "<<";
        case BinOp::Shr: return ">>";
        case BinOp::Eq: return "==";
        case BinOp::Ne: return "!=";
        case BinOp::Lt: return "<";
        case BinOp::Le: return "<=";
        case BinOp::Gt: return ">";
        case BinOp::Ge: return ">=";
        case BinOp::And: return "&&";
        case BinOp::Or: return "||";
    }
    return "?";
}

bool isComparison(BinOp op) {
    return op == BinOp::Eq || op == BinOp::Ne || op == BinOp::Lt || op == BinOp::Le || op == BinOp::Gt ||
           op == BinOp::Ge;
}

bool isBoolOp(BinOp op) { return op == BinOp::And || op == BinOp::Or; }

ExprPtr mkInt(std::int64_t v, SourceSpan sp) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Int;
    e->value = v;
    e->span = sp;
    return e;
}

ExprPtr mkBool(bool b, SourceSpan sp) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Bool;
    e->flag = b;
    e->span = sp;
    return e;
}

ExprPtr mkVar(const std::string& n, SourceSpan sp) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Var;
    e->name = n;
    e->span = sp;
    return e;
}

ExprPtr mkUnary(UnOp op, ExprPtr a, SourceSpan sp) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Unary;
    e->unop = op;
    e->args = {std::move(a)};
    e->span = sp;
    return e;
}

ExprPtr mkBinary(BinOp op, ExprPtr a, ExprPtr b, SourceSpan sp) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Binary;
    e->binop = op;
    e->args = {std::move(a), std::move(b)};
    e->span = sp;
    return e;
}

ExprPtr mkHeapRead(ExprPtr loc, Field f, HeapLabel l) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::HeapRead;
    e->field = f;
    e->label = l;
    e->args = {std::move(loc)};
    return e;
}

ExprPtr mkValsReadContains(ExprPtr loc, IndexRef idx, HeapLabel l, ExprPtr value) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::ValsReadContains;
    e->index = idx;
    e->label = l;
    e->args = {std::move(loc), std::move(value)};
    return e;
}

bool sameExpr(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case ExprKind::Int:
            if (a.value != b.value) return false;
            break;
        case ExprKind::Bool:
            if (a.flag != b.flag) return false;
            break;
        case ExprKind::Var:
            if (a.name != b.name) return false;
            break;
        case ExprKind::Unary:
            if (a.unop != b.unop) return false;
            break;
        case ExprKind::Binary:
            if (a.binop != b.binop) return false;
            break;
        case ExprKind::Read:
        case ExprKind::Cas:
            if (a.name != b.name || a.mode != b.mode) return false;
            break;
        case ExprKind::HeapRead:
            if (a.field != b.field || a.label != b.label) return false;
            break;
        case ExprKind::ValsReadContains:
            if (a.label != b.label || a.index.index != b.index.index || a.index.bound != b.index.bound)
                return false;
            break;
    }
    if (a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!sameExpr(*a.args[i], *b.args[i])) return false;
    return true;
}

std::string InvRef::key() const {
    std::string s;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) s += "*";
        s += names[i];
    }
    return s;
}

AssertionPtr mkPure(ExprPtr e, SourceSpan sp) {
    auto a = std::make_shared<Assertion>();
    a->kind = AKind::Pure;
    a->expr = std::move(e);
    a->span = sp;
    return a;
}

AssertionPtr mkTrue() { return mkPure(mkBool(true)); }

AssertionPtr mkStar(std::vector<AssertionPtr> kids, SourceSpan sp) {
    std::vector<AssertionPtr> flat;
    for (auto& k : kids) {
        if (k->kind == AKind::Star)
            flat.insert(flat.end(), k->kids.begin(), k->kids.end());
        else
            flat.push_back(k);
    }
    if (flat.empty()) return mkTrue();
    if (flat.size() == 1) return flat[0];
    auto a = std::make_shared<Assertion>();
    a->kind = AKind::Star;
    a->kids = std::move(flat);
    a->span = sp;
    return a;
}

AssertionPtr mkImplies(ExprPtr guard, AssertionPtr body, SourceSpan sp) {
    auto a = std::make_shared<Assertion>();
    a->kind = AKind::Implies;
    a->expr = std::move(guard);
    a->kids = {std::move(body)};
    a->span = sp;
    return a;
}

AssertionPtr mkCond(ExprPtr guard, AssertionPtr t, AssertionPtr f, SourceSpan sp) {
    auto a = std::make_shared<Assertion>();
    a->kind = AKind::Cond;
    a->expr = std::move(guard);
    a->kids = {std::move(t), std::move(f)};
    a->span = sp;
    return a;
}

AssertionPtr mkAcc(ExprPtr loc, Field f, HeapLabel l, PermExpr p) {
    auto a = std::make_shared<Assertion>();
    a->kind = AKind::Acc;
    a->loc = std::move(loc);
    a->field = f;
    a->label = l;
    a->perm = p;
    return a;
}

AssertionPtr mkPred(ExprPtr loc, IndexRef idx, HeapLabel l, PermExpr p) {
    auto a = std::make_shared<Assertion>();
    a->kind = AKind::Pred;
    a->loc = std::move(loc);
    a->index = idx;
    a->label = l;
    a->perm = p;
    return a;
}

AssertionPtr mkValsReadEmpty(ExprPtr loc, IndexRef idx, HeapLabel l) {
    auto a = std::make_shared<Assertion>();
    a->kind = AKind::ValsReadEmpty;
    a->loc = std::move(loc);
    a->index = idx;
    a->label = l;
    return a;
}

AssertionPtr mkInvInstance(IndexRef idx, ExprPtr value, HeapLabel l) {
    auto a = std::make_shared<Assertion>();
    a->kind = AKind::InvInstance;
    a->index = idx;
    a->value = std::move(value);
    a->label = l;
    return a;
}

namespace {
bool sameOpt(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    return sameExpr(*a, *b);
}
bool sameOpt(const AssertionPtr& a, const AssertionPtr& b) {
    if (!a || !b) return !a && !b;
    return sameAssertion(*a, *b);
}
}  // namespace

bool sameAssertion(const Assertion& a, const Assertion& b) {
    if (a.kind != b.kind) return false;
    if (!sameOpt(a.expr, b.expr) || !sameOpt(a.loc, b.loc) || !sameOpt(a.value, b.value)) return false;
    if (!(a.perm == b.perm) || a.inv.names != b.inv.names || a.name != b.name) return false;
    if (a.field != b.field || a.label != b.label || a.index.index != b.index.index || a.index.bound != b.index.bound)
        return false;
    if (a.args.size() != b.args.size() || a.kids.size() != b.kids.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!sameExpr(*a.args[i], *b.args[i])) return false;
    for (std::size_t i = 0; i < a.kids.size(); ++i)
        if (!sameAssertion(*a.kids[i], *b.kids[i])) return false;
    return true;
}

bool isTrivial(const Assertion& a) {
    return a.kind == AKind::Pure && a.expr && a.expr->kind == ExprKind::Bool && a.expr->flag;
}

namespace {
bool sameBlock(const Block& a, const Block& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!sameStmt(*a[i], *b[i])) return false;
    return true;
}
}  // namespace

bool sameStmt(const Stmt& a, const Stmt& b) {
    if (a.kind != b.kind || a.target != b.target || a.loc != b.loc || a.mode != b.mode) return false;
    if (!sameOpt(a.e1, b.e1) || !sameOpt(a.e2, b.e2)) return false;
    if (a.inv.names != b.inv.names || a.inv2.names != b.inv2.names) return false;
    if (!sameOpt(a.annot, b.annot) || a.hasInvariant != b.hasInvariant || a.hasElse != b.hasElse) return false;
    if (!sameBlock(a.body, b.body) || !sameBlock(a.elseBody, b.elseBody)) return false;
    if (a.threads.size() != b.threads.size()) return false;
    for (std::size_t i = 0; i < a.threads.size(); ++i) {
        const auto& x = a.threads[i];
        const auto& y = b.threads[i];
        if (!sameOpt(x.pre, y.pre) || !sameOpt(x.post, y.post) || !sameBlock(x.body, y.body)) return false;
    }
    if (a.callee != b.callee || a.results != b.results || a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!sameExpr(*a.args[i], *b.args[i])) return false;
    return true;
}

bool sameProgram(const Program& a, const Program& b) {
    if (a.requires_ != b.requires_) return false;
    if (a.invariants.size() != b.invariants.size() || a.macros.size() != b.macros.size() ||
        a.procedures.size() != b.procedures.size())
        return false;
    for (std::size_t i = 0; i < a.invariants.size(); ++i)
        if (a.invariants[i].name != b.invariants[i].name ||
            !sameAssertion(*a.invariants[i].body, *b.invariants[i].body))
            return false;
    for (std::size_t i = 0; i < a.macros.size(); ++i)
        if (a.macros[i].name != b.macros[i].name || a.macros[i].params != b.macros[i].params ||
            !sameAssertion(*a.macros[i].body, *b.macros[i].body))
            return false;
    for (std::size_t i = 0; i < a.procedures.size(); ++i) {
        const auto& p = a.procedures[i];
        const auto& q = b.procedures[i];
        if (p.name != q.name || p.params.size() != q.params.size() || p.returns.size() != q.returns.size())
            return false;
        for (std::size_t j = 0; j < p.params.size(); ++j)
            if (p.params[j].name != q.params[j].name || p.params[j].ghost != q.params[j].ghost) return false;
        for (std::size_t j = 0; j < p.returns.size(); ++j)
            if (p.returns[j].name != q.returns[j].name || p.returns[j].ghost != q.returns[j].ghost) return false;
        if (!sameAssertion(*p.pre, *q.pre) || !sameAssertion(*p.post, *q.post) || !sameBlock(p.body, q.body))
            return false;
    }
    return true;
}

const InvariantDecl* Program::findInvariant(const std::string& n) const {
    for (const auto& d : invariants)
        if (d.name == n) return &d;
    return nullptr;
}

const MacroDecl* Program::findMacro(const std::string& n) const {
    for (const auto& d : macros)
        if (d.name == n) return &d;
    return nullptr;
}

const Procedure* Program::findProcedure(const std::string& n) const {
    for (const auto& d : procedures)
        if (d.name == n) return &d;
    return nullptr;
}

void forEachStmt(const Block& b, const std::function<void(const Stmt&)>& f) {
    for (const auto& s : b) {
        f(*s);
        forEachStmt(s->body, f);
        forEachStmt(s->elseBody, f);
        for (const auto& t : s->threads) forEachStmt(t.body, f);
    }
}

}  // namespace weakmem::ast
