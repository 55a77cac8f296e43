#pragma once

#include "weakmem/frontend/ast.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace weakmem::frontend {

struct Token {
    enum class Kind { Ident, Int, Punct, End, Bad };
    Kind kind = Kind::End;
    std::string text;
    SourceSpan span;
};

// Lexes the whole input; a Bad token is produced for characters outside the language.
std::vector<Token> lex(std::string_view text);

struct ParseResult {
    ast::Program program;
    std::vector<Diagnostic> errors;
    bool ok() const { return errors.empty(); }
};

// Total: always returns, reporting syntax errors with line/column.
ParseResult parse(std::string_view text);

// Parse a single assertion (used by tests and the rewrite checker's helpers).
ParseResult parseAssertionOnly(std::string_view text, ast::AssertionPtr& out);

std::string print(const ast::Program& p);
std::string print(const ast::Assertion& a);
std::string print(const ast::Expr& e);
std::string print(const ast::Stmt& s, int indent = 0);

}  // namespace weakmem::frontend
