#pragma once

#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "homectx/error.hpp"
#include "homectx/term.hpp"

// Tokenizer shared by the Turtle-subset and query parsers.
namespace homectx::detail {

// A name reference as written: either `prefix:local` or `<iri>`.
struct NameRef {
    bool is_iri = false;
    std::string prefix;
    std::string local;
    std::string iri;
};

struct Token {
    enum class Kind {
        kEnd,
        kWord,      // bare identifier: SELECT, filter, datatype, ...
        kAtWord,    // @prefix
        kName,      // prefixed name or <iri>, see `name`
        kLiteral,   // "lexical" with optional ^^datatype
        kVariable,  // ?v or $v, text holds the name without sigil
        kPunct,     // one of . { } ( ) = , ; * and friends
    };

    Kind kind = Kind::kEnd;
    std::string text;
    NameRef name;
    bool has_datatype = false;
    NameRef datatype;
    std::size_t line = 1;
    std::size_t column = 1;

    bool is_punct(char c) const { return kind == Kind::kPunct && text.size() == 1 && text[0] == c; }
};

inline std::string upper(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

inline std::string describe(const Token& t) {
    switch (t.kind) {
        case Token::Kind::kEnd: return "end of input";
        case Token::Kind::kWord: return "'" + t.text + "'";
        case Token::Kind::kAtWord: return "'@" + t.text + "'";
        case Token::Kind::kName:
            return t.name.is_iri ? "<" + t.name.iri + ">" : "'" + t.name.prefix + ":" + t.name.local + "'";
        case Token::Kind::kLiteral: return "literal \"" + t.text + "\"";
        case Token::Kind::kVariable: return "variable ?" + t.text;
        case Token::Kind::kPunct: return "'" + t.text + "'";
    }
    return "token";
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> tokenize() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.line = line_;
            t.column = col_;
            if (pos_ >= src_.size()) {
                out.push_back(std::move(t));
                return out;
            }
            const char c = src_[pos_];
            if (c == '"') {
                lex_literal(t);
            } else if (c == '<' && looks_like_iri()) {
                t.kind = Token::Kind::kName;
                t.name = lex_iri();
            } else if (c == '?' || c == '$') {
                advance();
                t.kind = Token::Kind::kVariable;
                t.text = take_while([](char ch) {
                    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
                });
                if (t.text.empty()) fail(t.line, t.column, "empty variable name");
            } else if (c == '@') {
                advance();
                t.kind = Token::Kind::kAtWord;
                t.text = take_while([](char ch) { return std::isalpha(static_cast<unsigned char>(ch)) != 0; });
                if (t.text.empty()) fail(t.line, t.column, "expected keyword after '@'");
            } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':') {
                lex_word_or_name(t);
            } else if (std::string_view(".{}()=,;*!<>&|+/[]^").find(c) != std::string_view::npos) {
                t.kind = Token::Kind::kPunct;
                t.text = std::string(1, c);
                advance();
            } else {
                fail(t.line, t.column, std::string("unexpected character '") + c + "'");
            }
            out.push_back(std::move(t));
        }
    }

private:
    [[noreturn]] static void fail(std::size_t line, std::size_t col, const std::string& msg) {
        throw ParseError(line, col, msg);
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    bool at(char c, std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() && src_[pos_ + ahead] == c;
    }

    template <typename Pred>
    std::string take_while(Pred pred) {
        std::string out;
        while (pos_ < src_.size() && pred(src_[pos_])) {
            out += src_[pos_];
            advance();
        }
        return out;
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                return;
            }
        }
    }

    // `<` opens an IRI only when a `>` follows with no whitespace in between;
    // otherwise it is a comparison operator.
    bool looks_like_iri() const {
        for (std::size_t i = pos_ + 1; i < src_.size(); ++i) {
            const char c = src_[i];
            if (c == '>') return i > pos_ + 1;
            if (std::isspace(static_cast<unsigned char>(c)) || c == '<' || c == '"') return false;
        }
        return false;
    }

    NameRef lex_iri() {
        const std::size_t line = line_, col = col_;
        advance();  // '<'
        NameRef ref;
        ref.is_iri = true;
        while (pos_ < src_.size() && src_[pos_] != '>') {
            const char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c)) || c == '<' || c == '"')
                fail(line_, col_, "invalid character in IRI");
            ref.iri += c;
            advance();
        }
        if (pos_ >= src_.size()) fail(line, col, "unterminated IRI");
        advance();  // '>'
        if (ref.iri.empty()) fail(line, col, "empty IRI");
        return ref;
    }

    // Reads `prefix:local` with pos_ at the first character, or a bare word.
    void lex_word_or_name(Token& t) {
        std::string head = take_while([](char ch) {
            return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-';
        });
        if (!at(':')) {
            t.kind = Token::Kind::kWord;
            t.text = std::move(head);
            return;
        }
        if (!valid_prefix_name(head)) fail(t.line, t.column, "invalid prefix '" + head + "'");
        advance();  // ':'
        t.kind = Token::Kind::kName;
        t.name.prefix = std::move(head);
        t.name.local = lex_local();
    }

    std::string lex_local() {
        std::string local;
        if (pos_ < src_.size() && is_name_start(src_[pos_])) {
            while (pos_ < src_.size() && is_name_char(src_[pos_])) {
                // A '.' belongs to the name only if more name characters follow it.
                if (src_[pos_] == '.' && !(pos_ + 1 < src_.size() && is_name_char(src_[pos_ + 1]) &&
                                           src_[pos_ + 1] != '.'))
                    break;
                local += src_[pos_];
                advance();
            }
        }
        return local;
    }

    void lex_literal(Token& t) {
        advance();  // opening quote
        t.kind = Token::Kind::kLiteral;
        for (;;) {
            if (pos_ >= src_.size() || src_[pos_] == '\n') fail(t.line, t.column, "unterminated string literal");
            const char c = src_[pos_];
            if (c == '"') {
                advance();
                break;
            }
            if (c == '\\') {
                const std::size_t line = line_, col = col_;
                advance();
                if (pos_ >= src_.size()) fail(line, col, "unterminated escape");
                switch (src_[pos_]) {
                    case '"': t.text += '"'; break;
                    case '\\': t.text += '\\'; break;
                    case 'n': t.text += '\n'; break;
                    case 'r': t.text += '\r'; break;
                    case 't': t.text += '\t'; break;
                    default: fail(line, col, std::string("unknown escape '\\") + src_[pos_] + "'");
                }
                advance();
                continue;
            }
            t.text += c;
            advance();
        }
        if (at('^') && at('^', 1)) {
            advance();
            advance();
            t.has_datatype = true;
            if (at('<')) {
                t.datatype = lex_iri();
                return;
            }
            const std::size_t line = line_, col = col_;
            std::string prefix = take_while([](char ch) {
                return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-';
            });
            if (!at(':') || !valid_prefix_name(prefix)) fail(line, col, "expected datatype after '^^'");
            advance();
            t.datatype.prefix = std::move(prefix);
            t.datatype.local = lex_local();
            if (t.datatype.local.empty()) fail(line, col, "expected datatype after '^^'");
        }
    }

    static bool is_name_start(char c) { return detail::is_name_start(c); }
    static bool is_name_char(char c) { return detail::is_name_char(c); }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

// Prefix table with `:` and `xsd:` built in.
class PrefixMap {
public:
    PrefixMap() {
        map_[""] = std::string(kHomeNamespace);
        map_["xsd"] = std::string(kXsdNamespace);
    }

    void declare(const std::string& prefix, const std::string& ns) { map_[prefix] = ns; }

    std::string resolve(const NameRef& ref, std::size_t line, std::size_t col) const {
        if (ref.is_iri) return ref.iri;
        auto it = map_.find(ref.prefix);
        if (it == map_.end()) throw ParseError(line, col, "undeclared prefix '" + ref.prefix + ":'");
        if (ref.local.empty()) throw ParseError(line, col, "empty local name after '" + ref.prefix + ":'");
        return it->second + ref.local;
    }

private:
    std::map<std::string, std::string> map_;
};

// Resolves a typed-literal token into a Term, validating datatype and lexical form.
inline Term literal_from_token(const Token& t, const PrefixMap& prefixes) {
    if (!t.has_datatype) throw ParseError(t.line, t.column, "literal \"" + t.text + "\" needs a ^^xsd: datatype");
    const std::string iri = prefixes.resolve(t.datatype, t.line, t.column);
    auto dt = datatype_from_iri(iri);
    if (!dt) throw ParseError(t.line, t.column, "unsupported datatype <" + iri + ">");
    if (!valid_lexical(*dt, t.text))
        throw ParseError(t.line, t.column,
                         "invalid lexical form \"" + t.text + "\" for xsd:" + std::string(local_name(*dt)));
    return Term::literal(t.text, *dt);
}

}  // namespace homectx::detail
