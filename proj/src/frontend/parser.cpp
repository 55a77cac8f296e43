#include "weakmem/frontend/parser.hpp"

#include <map>
#include <set>

namespace weakmem::frontend {

using namespace ast;

namespace {

const std::set<std::string> kKeywords = {
    "invariant", "define", "require",  "proc",      "returns", "requires", "ensures", "alloc_na",
    "alloc_acq", "alloc_rmw", "alloc_ghost", "fence_acq", "fence_rel", "rewrite", "to", "while",
    "if",        "else",   "par",      "thread",    "call",    "free",     "true",    "false",
    "Acq",       "Rel",    "RMWAcq",   "Init",      "Uninit",  "Up",       "Down",    "ghost",
    "emp"};

struct ParseError {
    SourceSpan span;
    std::string message;
};

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text), toks_(lex(text)) {}

    ParseResult program() {
        ParseResult r;
        while (!at(Token::Kind::End)) {
            std::size_t start = pos_;
            try {
                item(r.program);
            } catch (const ParseError& e) {
                Diagnostic d;
                d.kind = DiagKind::SyntaxError;
                d.span = e.span;
                d.rule = "parse";
                d.message = e.message;
                r.errors.push_back(d);
                if (pos_ == start) ++pos_;
                recover();
            }
        }
        checkDuplicates(r);
        return r;
    }

    ParseResult assertionOnly(AssertionPtr& out) {
        ParseResult r;
        try {
            out = assertion();
            if (!at(Token::Kind::End)) fail("end of input");
        } catch (const ParseError& e) {
            Diagnostic d;
            d.kind = DiagKind::SyntaxError;
            d.span = e.span;
            d.rule = "parse";
            d.message = e.message;
            r.errors.push_back(d);
        }
        return r;
    }

private:
    // ---- token helpers
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at(Token::Kind k) const { return peek().kind == k; }
    bool isP(const std::string& p, std::size_t k = 0) const {
        return peek(k).kind == Token::Kind::Punct && peek(k).text == p;
    }
    bool isKw(const std::string& w, std::size_t k = 0) const {
        return peek(k).kind == Token::Kind::Ident && peek(k).text == w;
    }
    const Token& take() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        last_ = t.span;
        return t;
    }
    [[noreturn]] void fail(const std::string& expected) const {
        const Token& t = peek();
        std::string found = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
        if (t.kind == Token::Kind::Bad) found = "unexpected character '" + t.text + "'";
        throw ParseError{t.span, "expected " + expected + ", found " + found};
    }
    void expectP(const std::string& p) {
        if (!isP(p)) fail("'" + p + "'");
        take();
    }
    void expectKw(const std::string& w) {
        if (!isKw(w)) fail("'" + w + "'");
        take();
    }
    std::string ident(const std::string& what = "identifier") {
        if (!at(Token::Kind::Ident) || kKeywords.count(peek().text)) fail(what);
        return take().text;
    }
    SourceSpan from(const SourceSpan& start) const {
        SourceSpan s = start;
        s.length = last_.offset + last_.length >= start.offset ? last_.offset + last_.length - start.offset : 0;
        return s;
    }

    void recover() {
        while (!at(Token::Kind::End)) {
            if (isKw("proc") || isKw("invariant") || isKw("define") || isKw("require")) return;
            take();
        }
    }

    // ---- items
    void item(Program& p) {
        if (isKw("invariant")) {
            SourceSpan s = take().span;
            InvariantDecl d;
            d.name = ident("invariant name");
            expectP("(");
            if (!isKw("V") && !(at(Token::Kind::Ident) && peek().text == "V")) fail("'V'");
            take();
            expectP(")");
            expectP("=");
            d.body = assertion();
            expectP(";");
            d.span = from(s);
            p.invariants.push_back(d);
        } else if (isKw("define")) {
            SourceSpan s = take().span;
            MacroDecl d;
            d.name = ident("macro name");
            expectP("(");
            if (!isP(")")) {
                d.params.push_back(ident("parameter"));
                while (isP(",")) {
                    take();
                    d.params.push_back(ident("parameter"));
                }
            }
            expectP(")");
            expectP("=");
            d.body = assertion();
            expectP(";");
            d.span = from(s);
            p.macros.push_back(d);
        } else if (isKw("require")) {
            take();
            if (!at(Token::Kind::Ident)) fail("feature name");
            p.requires_.push_back(take().text);
            expectP(";");
        } else if (isKw("proc")) {
            p.procedures.push_back(procedure());
        } else {
            fail("'proc', 'invariant', 'define' or 'require'");
        }
    }

    std::vector<Param> params() {
        std::vector<Param> ps;
        expectP("(");
        if (!isP(")")) {
            while (true) {
                Param q;
                q.span = peek().span;
                if (isKw("ghost")) {
                    take();
                    q.ghost = true;
                }
                q.name = ident("parameter name");
                q.span = from(q.span);
                ps.push_back(q);
                if (!isP(",")) break;
                take();
            }
        }
        expectP(")");
        return ps;
    }

    Procedure procedure() {
        SourceSpan s = take().span;
        Procedure p;
        p.name = ident("procedure name");
        p.params = params();
        if (isKw("returns")) {
            take();
            p.returns = params();
        }
        p.pre = mkTrue();
        p.post = mkTrue();
        if (isKw("requires")) {
            take();
            SourceSpan a = peek().span;
            p.pre = assertion();
            p.preSpan = from(a);
        }
        if (isKw("ensures")) {
            take();
            SourceSpan a = peek().span;
            p.post = assertion();
            p.postSpan = from(a);
        }
        if (p.preSpan.line == 0) p.preSpan = s;
        p.body = block();
        p.span = from(s);
        if (p.postSpan.line == 0) p.postSpan = p.span;
        return p;
    }

    // ---- statements
    Block block() {
        expectP("{");
        Block b;
        while (!isP("}")) {
            if (at(Token::Kind::End)) fail("'}'");
            b.push_back(statement());
        }
        take();
        return b;
    }

    AccessMode modeSuffix(const std::string& what) {
        if (!at(Token::Kind::Ident) || peek().text.size() < 2 || peek().text[0] != '_')
            fail("access mode suffix for " + what);
        const Token& t = take();
        auto m = parseMode(t.text.substr(1));
        if (!m) throw ParseError{t.span, "unknown access mode '" + t.text.substr(1) + "'"};
        return *m;
    }

    static std::optional<std::pair<std::string, std::string>> rmwName(const std::string& s) {
        for (const char* pre : {"CAS_", "FAA_"})
            if (s.rfind(pre, 0) == 0) return std::make_pair(std::string(pre, 3), s.substr(4));
        return std::nullopt;
    }

    AccessMode rmwMode(const Token& t, const std::string& suffix) {
        auto m = parseMode(suffix);
        if (!m) throw ParseError{t.span, "unknown access mode '" + suffix + "'"};
        if (*m == AccessMode::Na) throw ParseError{t.span, "read-modify-write operations need an atomic mode"};
        return *m;
    }

    InvRef invRef() {
        InvRef r;
        SourceSpan s = peek().span;
        r.names.push_back(ident("invariant name"));
        while (isP("*")) {
            take();
            r.names.push_back(ident("invariant name"));
        }
        r.span = from(s);
        return r;
    }

    StmtPtr statement() {
        auto st = std::make_shared<Stmt>();
        SourceSpan s = peek().span;
        if (isKw("alloc_na") || isKw("alloc_ghost")) {
            st->kind = take().text == "alloc_na" ? SKind::AllocNa : SKind::AllocGhost;
            expectP("(");
            st->target = ident("location variable");
            expectP(")");
            expectP(";");
        } else if (isKw("alloc_acq") || isKw("alloc_rmw")) {
            st->kind = take().text == "alloc_acq" ? SKind::AllocAcq : SKind::AllocRmw;
            expectP("(");
            st->target = ident("location variable");
            expectP(",");
            st->inv = invRef();
            expectP(")");
            expectP(";");
        } else if (isP("[")) {
            take();
            st->kind = SKind::Write;
            st->loc = ident("location variable");
            expectP("]");
            SourceSpan ms = peek().span;
            st->mode = modeSuffix("write");
            if (st->mode == AccessMode::Acq) throw ParseError{ms, "acquire mode is not allowed for writes"};
            expectP(":=");
            st->e1 = expr();
            expectP(";");
        } else if (isKw("fence_acq")) {
            take();
            st->kind = SKind::FenceAcq;
            expectP(";");
        } else if (isKw("fence_rel")) {
            take();
            st->kind = SKind::FenceRel;
            expectP("(");
            st->annot = assertion();
            expectP(")");
            expectP(";");
        } else if (isKw("rewrite")) {
            take();
            st->kind = SKind::Rewrite;
            expectKw("Acq");
            expectP("(");
            st->loc = ident("location variable");
            expectP(",");
            st->inv = invRef();
            expectP(")");
            expectKw("to");
            expectKw("Acq");
            expectP("(");
            std::string l2 = ident("location variable");
            if (l2 != st->loc) throw ParseError{last_, "rewrite must name the same location on both sides"};
            expectP(",");
            st->inv2 = invRef();
            expectP(")");
            expectP(";");
        } else if (isKw("while")) {
            take();
            st->kind = SKind::While;
            expectP("(");
            st->e1 = expr();
            expectP(")");
            if (isKw("invariant")) {
                take();
                st->hasInvariant = true;
                st->annot = assertion();
            }
            if (isP(";"))
                take();
            else
                st->body = block();
        } else if (isKw("if")) {
            return ifStatement();
        } else if (isKw("par")) {
            take();
            st->kind = SKind::Par;
            expectP("{");
            while (isKw("thread")) st->threads.push_back(thread());
            if (st->threads.empty()) fail("'thread'");
            expectP("}");
        } else if (isKw("call")) {
            take();
            st->kind = SKind::Call;
            if (isP("(")) {
                take();
                if (!isP(")")) {
                    st->results.push_back(ident("result variable"));
                    while (isP(",")) {
                        take();
                        st->results.push_back(ident("result variable"));
                    }
                }
                expectP(")");
                expectP(":=");
            }
            st->callee = ident("procedure name");
            st->args = exprList();
            expectP(";");
        } else if (isKw("free")) {
            take();
            st->kind = SKind::Free;
            expectP("(");
            st->loc = ident("location variable");
            expectP(")");
            expectP(";");
        } else if (at(Token::Kind::Ident) && !kKeywords.count(peek().text) && isP(":=", 1)) {
            st->target = take().text;
            take();
            if (isP("[")) {
                take();
                st->kind = SKind::Read;
                st->loc = ident("location variable");
                expectP("]");
                SourceSpan ms = peek().span;
                st->mode = modeSuffix("read");
                if (st->mode == AccessMode::Rel) throw ParseError{ms, "release mode is not allowed for reads"};
            } else if (at(Token::Kind::Ident) && rmwName(peek().text) && isP("(", 1)) {
                const Token& t = take();
                auto [op, suffix] = *rmwName(t.text);
                st->mode = rmwMode(t, suffix);
                expectP("(");
                st->loc = ident("location variable");
                expectP(",");
                st->e1 = expr();
                if (op == "CAS") {
                    st->kind = SKind::Cas;
                    expectP(",");
                    st->e2 = expr();
                } else {
                    st->kind = SKind::Faa;
                }
                expectP(")");
            } else {
                st->kind = SKind::Assign;
                st->e1 = expr();
            }
            expectP(";");
        } else {
            fail("statement");
        }
        st->span = from(s);
        return st;
    }

    StmtPtr ifStatement() {
        auto st = std::make_shared<Stmt>();
        SourceSpan s = take().span;
        st->kind = SKind::If;
        expectP("(");
        st->e1 = expr();
        expectP(")");
        st->body = block();
        if (isKw("else")) {
            take();
            st->hasElse = true;
            if (isKw("if"))
                st->elseBody.push_back(ifStatement());
            else
                st->elseBody = block();
        }
        st->span = from(s);
        return st;
    }

    Thread thread() {
        Thread t;
        SourceSpan s = take().span;
        t.pre = mkTrue();
        t.post = mkTrue();
        t.preSpan = s;
        if (isKw("requires")) {
            take();
            SourceSpan a = peek().span;
            t.pre = assertion();
            t.preSpan = from(a);
        }
        bool hasPost = false;
        if (isKw("ensures")) {
            take();
            SourceSpan a = peek().span;
            t.post = assertion();
            t.postSpan = from(a);
            hasPost = true;
        }
        t.body = block();
        t.span = from(s);
        if (!hasPost) t.postSpan = t.span;
        return t;
    }

    std::vector<ExprPtr> exprList() {
        std::vector<ExprPtr> out;
        expectP("(");
        if (!isP(")")) {
            out.push_back(expr());
            while (isP(",")) {
                take();
                out.push_back(expr());
            }
        }
        expectP(")");
        return out;
    }

    // ---- expressions; `noStar` disables `*` as multiplication (assertion context)
    ExprPtr expr(bool noStar = false) { return binary(0, noStar); }

    struct OpInfo {
        const char* text;
        BinOp op;
        int prec;
    };

    static const std::vector<OpInfo>& ops() {
        static const std::vector<OpInfo> v = {
            {"||", BinOp::Or, 1},     {"&&", BinOp::And, 2},    {"|", BinOp::BitOr, 3},   {"^", BinOp::BitXor, 4},
            {"&", BinOp::BitAnd, 5},  {"==", BinOp::Eq, 6},     {"!=", BinOp::Ne, 6},     {"<", BinOp::Lt, 7},
            {"<=", BinOp::Le, 7},     {">", BinOp::Gt, 7},      {">=", BinOp::Ge, 7},     {"<<", BinOp::Shl, 8},
            {">>", BinOp::Shr, 8},    {"+", BinOp::Add, 9},     {"-", BinOp::Sub, 9},     {"*", BinOp::Mul, 10},
            {"/", BinOp::Div, 10},    {"%", BinOp::Mod, 10},
        };
        return v;
    }

    const OpInfo* currentOp(bool noStar) const {
        if (peek().kind != Token::Kind::Punct) return nullptr;
        for (const auto& o : ops())
            if (peek().text == o.text) {
                if (noStar && o.op == BinOp::Mul) return nullptr;
                return &o;
            }
        return nullptr;
    }

    ExprPtr binary(int minPrec, bool noStar) {
        SourceSpan s = peek().span;
        ExprPtr lhs = unary(noStar);
        while (true) {
            const OpInfo* o = currentOp(noStar);
            if (!o || o->prec <= minPrec) break;
            take();
            ExprPtr rhs = binary(o->prec, noStar);
            lhs = mkBinary(o->op, lhs, rhs, from(s));
        }
        return lhs;
    }

    ExprPtr unary(bool noStar) {
        SourceSpan s = peek().span;
        if (isP("-")) {
            take();
            ExprPtr a = unary(noStar);
            // fold negative literals so that printing round-trips
            if (a->kind == ExprKind::Int && s.offset + 1 == a->span.offset) return mkInt(-a->value, from(s));
            return mkUnary(UnOp::Neg, a, from(s));
        }
        if (isP("!")) {
            take();
            ExprPtr a = unary(noStar);
            return mkUnary(UnOp::Not, a, from(s));
        }
        return primary();
    }

    ExprPtr primary() {
        SourceSpan s = peek().span;
        if (at(Token::Kind::Int)) {
            const Token& t = take();
            if (t.text.size() > 18) throw ParseError{t.span, "integer literal too large"};
            return mkInt(std::stoll(t.text), t.span);
        }
        if (isKw("true") || isKw("false")) return mkBool(take().text == "true", s);
        if (isP("(")) {
            take();
            ExprPtr e = expr(false);
            expectP(")");
            return e;
        }
        if (isP("[")) {
            take();
            auto e = std::make_shared<Expr>();
            e->kind = ExprKind::Read;
            e->name = ident("location variable");
            expectP("]");
            SourceSpan ms = peek().span;
            e->mode = modeSuffix("read");
            if (e->mode == AccessMode::Rel) throw ParseError{ms, "release mode is not allowed for reads"};
            e->span = from(s);
            return e;
        }
        if (at(Token::Kind::Ident) && rmwName(peek().text) && isP("(", 1)) {
            const Token& t = take();
            auto [op, suffix] = *rmwName(t.text);
            if (op != "CAS") throw ParseError{t.span, "FAA may only appear as an assignment"};
            auto e = std::make_shared<Expr>();
            e->kind = ExprKind::Cas;
            e->mode = rmwMode(t, suffix);
            expectP("(");
            e->name = ident("location variable");
            expectP(",");
            ExprPtr a = expr();
            expectP(",");
            ExprPtr b = expr();
            expectP(")");
            e->args = {a, b};
            e->span = from(s);
            return e;
        }
        if (at(Token::Kind::Ident) && !kKeywords.count(peek().text)) return mkVar(take().text, s);
        fail("expression");
    }

    // ---- assertions
    AssertionPtr assertion() {
        SourceSpan s = peek().span;
        std::vector<AssertionPtr> parts{assertion1()};
        while (isP("*")) {
            take();
            parts.push_back(assertion1());
        }
        if (parts.size() == 1) return parts[0];
        return mkStar(std::move(parts), from(s));
    }

    PermExpr fraction() {
        PermExpr p;
        expectP("[");
        if (!at(Token::Kind::Int)) fail("fraction");
        const Token& n = take();
        p.num = std::stoll(n.text.size() > 18 ? "0" : n.text);
        if (isP("/")) {
            take();
            if (!at(Token::Kind::Int)) fail("denominator");
            const Token& d = take();
            p.den = std::stoll(d.text.size() > 18 ? "0" : d.text);
        }
        expectP("]");
        if (p.den <= 0 || p.num <= 0 || p.num > p.den)
            throw ParseError{n.span, "fraction must satisfy 0 < k <= 1"};
        return p;
    }

    // Everything that binds tighter than `*`.
    AssertionPtr assertion1() {
        SourceSpan s = peek().span;
        static const std::map<std::string, AKind> locForms = {
            {"Uninit", AKind::Uninit}, {"Init", AKind::Init}};
        static const std::map<std::string, AKind> invForms = {
            {"Acq", AKind::Acq}, {"Rel", AKind::Rel}, {"RMWAcq", AKind::RMWAcq}};
        if (at(Token::Kind::Ident)) {
            const std::string& w = peek().text;
            if (w == "emp") {
                take();
                return mkPure(mkBool(true, s), s);
            }
            if (locForms.count(w)) {
                auto a = std::make_shared<Assertion>();
                a->kind = locForms.at(take().text);
                expectP("(");
                a->loc = expr();
                expectP(")");
                a->span = from(s);
                return a;
            }
            if (invForms.count(w)) {
                auto a = std::make_shared<Assertion>();
                a->kind = invForms.at(take().text);
                expectP("(");
                a->loc = expr();
                expectP(",");
                a->inv = invRef();
                expectP(")");
                a->span = from(s);
                return a;
            }
            if (w == "Up" || w == "Down") {
                auto a = std::make_shared<Assertion>();
                a->kind = take().text == "Up" ? AKind::Up : AKind::Down;
                expectP("(");
                a->kids = {assertion()};
                expectP(")");
                a->span = from(s);
                return a;
            }
            if (!kKeywords.count(w) && !rmwName(w) && isP("(", 1)) {
                auto a = std::make_shared<Assertion>();
                a->kind = AKind::Macro;
                a->name = take().text;
                a->args = exprList();
                a->span = from(s);
                return a;
            }
        }
        if (isP("(")) {
            // Either a parenthesised assertion or the start of an expression. A star of pure facts
            // also parses as a product, so the assertion reading wins when it is not a single fact.
            std::size_t save = pos_;
            SourceSpan saveLast = last_;
            bool asAssertion = false;
            try {
                take();
                AssertionPtr inner = assertion();
                expectP(")");
                if (inner->kind != AKind::Pure && atAssertionEnd()) return inner;
                asAssertion = true;
            } catch (const ParseError&) {
            }
            pos_ = save;
            last_ = saveLast;
            try {
                return afterExpr(s, expr(true));
            } catch (const ParseError&) {
                if (!asAssertion) throw;
                pos_ = save;
                last_ = saveLast;
            }
            take();
            AssertionPtr inner = assertion();
            expectP(")");
            return inner;
        }
        return afterExpr(s, expr(true));
    }

    AssertionPtr afterExpr(const SourceSpan& s, ExprPtr e) {
        if (isP("==>")) {
            take();
            AssertionPtr body = assertion();  // extends as far as possible
            return mkImplies(e, body, from(s));
        }
        if (isP("?")) {
            take();
            AssertionPtr a = assertion1();
            expectP(":");
            AssertionPtr b = assertion1();
            return mkCond(e, a, b, from(s));
        }
        if (isP("|->")) {
            take();
            auto a = std::make_shared<Assertion>();
            a->kind = AKind::PointsTo;
            a->loc = e;
            if (isP("[")) a->perm = fraction();
            if (at(Token::Kind::Ident) && peek().text == "_") {
                take();
            } else {
                a->value = expr(true);
            }
            a->span = from(s);
            return a;
        }
        if (atAssertionEnd()) return mkPure(e, from(s));
        fail("'*', '==>', '?', '|->' or end of assertion");
    }

    bool atAssertionEnd() const {
        return isP(")") || isP("*") || isP(";") || isP(":") || isP(",") || at(Token::Kind::End) || isKw("ensures") ||
               isP("{") || isKw("invariant");
    }

    void checkDuplicates(ParseResult& r) {
        auto dup = [&](const std::string& what, const std::string& name, const SourceSpan& sp) {
            Diagnostic d;
            d.kind = DiagKind::DuplicateName;
            d.span = sp;
            d.rule = "parse";
            d.message = "duplicate " + what + " '" + name + "'";
            r.errors.push_back(d);
        };
        std::set<std::string> seen;
        for (const auto& p : r.program.procedures) {
            if (!seen.insert("p:" + p.name).second) dup("procedure", p.name, p.span);
            std::set<std::string> ps;
            for (const auto& q : p.params)
                if (!ps.insert(q.name).second) dup("parameter", q.name, q.span);
            for (const auto& q : p.returns)
                if (!ps.insert(q.name).second) dup("parameter", q.name, q.span);
        }
        for (const auto& i : r.program.invariants)
            if (!seen.insert("i:" + i.name).second) dup("invariant", i.name, i.span);
        for (const auto& m : r.program.macros) {
            if (!seen.insert("m:" + m.name).second) dup("definition", m.name, m.span);
            std::set<std::string> ps;
            for (const auto& q : m.params)
                if (!ps.insert(q).second) dup("parameter", q, m.span);
        }
    }

    std::string_view text_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    SourceSpan last_;
};

}  // namespace

ParseResult parse(std::string_view text) {
    Parser p(text);
    return p.program();
}

ParseResult parseAssertionOnly(std::string_view text, AssertionPtr& out) {
    Parser p(text);
    return p.assertionOnly(out);
}

}  // namespace weakmem::frontend
