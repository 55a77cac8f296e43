#include "weakmem/frontend/parser.hpp"

#include <cctype>

namespace weakmem::frontend {

namespace {

const char* const kPuncts[] = {"|->", "==>", ":=", "==", "!=", "<=", ">=", "&&", "||", "<<", ">>", "(", ")",
                               "{",   "}",   "[",  "]",  ",",  ";",  "*",  "+",  "-",  "/",  "%",  "&",  "|",
                               "^",   "<",   ">",  "!",  "?",  ":",  "="};

bool identStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool identChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<Token> lex(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    int line = 1, col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
            Token t;
            t.span = {i, 2, line, col};
            advance(2);
            bool closed = false;
            while (i < text.size()) {
                if (text[i] == '*' && i + 1 < text.size() && text[i + 1] == '/') {
                    advance(2);
                    closed = true;
                    break;
                }
                advance(1);
            }
            if (!closed) {
                t.kind = Token::Kind::Bad;
                t.text = "unterminated comment";
                out.push_back(t);
            }
            continue;
        }
        Token t;
        t.span.offset = i;
        t.span.line = line;
        t.span.column = col;
        if (identStart(c)) {
            std::size_t j = i;
            while (j < text.size() && identChar(text[j])) ++j;
            t.kind = Token::Kind::Ident;
            t.text = std::string(text.substr(i, j - i));
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            t.kind = Token::Kind::Int;
            t.text = std::string(text.substr(i, j - i));
        } else {
            t.kind = Token::Kind::Bad;
            for (const char* p : kPuncts) {
                std::string_view pv(p);
                if (text.substr(i, pv.size()) == pv) {
                    t.kind = Token::Kind::Punct;
                    t.text = std::string(pv);
                    break;
                }
            }
            if (t.kind == Token::Kind::Bad) {
                // swallow a whole UTF-8 sequence so the error points at one character
                std::size_t n = 1;
                unsigned char u = static_cast<unsigned char>(c);
                if (u >= 0xF0) n = 4;
                else if (u >= 0xE0) n = 3;
                else if (u >= 0xC0) n = 2;
                t.text = std::string(text.substr(i, std::min(n, text.size() - i)));
            }
        }
        t.span.length = std::max<std::size_t>(t.text.size(), 1);
        advance(t.text.empty() ? 1 : t.text.size());
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Token::Kind::End;
    end.span = {text.size(), 0, line, col};
    out.push_back(end);
    return out;
}

}  // namespace weakmem::frontend
