#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "homectx/detail/lexer.hpp"
#include "homectx/error.hpp"
#include "homectx/term.hpp"
#include "homectx/triple_store.hpp"

namespace homectx {

// Parses the Turtle subset: `@prefix p: <ns> .` lines and one
// `subject predicate object .` statement each. Subjects and predicates are
// prefixed names or <iri>; objects may also be "lexical"^^xsd:type literals.
// Triples come back in document order.
inline std::vector<Triple> parse_data(std::string_view text) {
    using detail::Token;
    const std::vector<Token> tokens = detail::Lexer(text).tokenize();
    detail::PrefixMap prefixes;
    std::vector<Triple> out;
    std::size_t i = 0;

    auto fail = [](const Token& t, const std::string& msg) -> ParseError {
        return ParseError(t.line, t.column, msg + ", found " + detail::describe(t));
    };
    auto expect_dot = [&] {
        if (!tokens[i].is_punct('.')) throw fail(tokens[i], "expected '.'");
        ++i;
    };
    auto iri = [&](const char* role) {
        const Token& t = tokens[i];
        if (t.kind != Token::Kind::kName) throw fail(t, std::string("expected ") + role);
        ++i;
        return Term::iri(prefixes.resolve(t.name, t.line, t.column));
    };

    while (tokens[i].kind != Token::Kind::kEnd) {
        const Token& t = tokens[i];
        if (t.kind == Token::Kind::kAtWord) {
            if (t.text != "prefix") throw fail(t, "unknown directive");
            ++i;
            const Token& name = tokens[i];
            if (name.kind != Token::Kind::kName || name.name.is_iri || !name.name.local.empty())
                throw fail(name, "expected prefix name like 'ex:'");
            ++i;
            const Token& ns = tokens[i];
            if (ns.kind != Token::Kind::kName || !ns.name.is_iri) throw fail(ns, "expected <namespace IRI>");
            ++i;
            expect_dot();
            prefixes.declare(name.name.prefix, ns.name.iri);
            continue;
        }
        Term subject = iri("subject");
        Term predicate = iri("predicate");
        const Token& o = tokens[i];
        Term object;
        if (o.kind == Token::Kind::kLiteral) {
            object = detail::literal_from_token(o, prefixes);
            ++i;
        } else if (o.kind == Token::Kind::kName) {
            object = iri("object");
        } else {
            throw fail(o, "expected object");
        }
        expect_dot();
        out.emplace_back(std::move(subject), std::move(predicate), std::move(object));
    }
    return out;
}

inline std::vector<Triple> load_data_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_data(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(e.line(), e.column(), path + ": " + e.detail());
    }
}

namespace detail {

// Splits an IRI after its last '#' or '/' into (namespace, local).
inline std::pair<std::string, std::string> split_iri(const std::string& iri) {
    const auto cut = iri.find_last_of("#/");
    if (cut == std::string::npos) return {"", iri};
    return {iri.substr(0, cut + 1), iri.substr(cut + 1)};
}

}  // namespace detail

// Canonical text: the two built-in prefixes, generated `nsN:` prefixes for
// any other namespace in use, then one statement per line in triple order.
inline std::string serialize(const TripleStore& store) {
    std::map<std::string, std::string> extra;  // namespace -> prefix
    auto note = [&](const Term& t) {
        if (!t.is_iri()) return;
        if (to_turtle(t).front() != '<') return;
        auto [ns, local] = detail::split_iri(t.value());
        if (!ns.empty() && valid_local_name(local)) extra.emplace(ns, "");
    };
    for (const Triple& t : store) {
        note(t.subject);
        note(t.predicate);
        note(t.object);
    }
    int n = 0;
    for (auto& [ns, prefix] : extra) prefix = "ns" + std::to_string(++n);

    auto write = [&](const Term& t) {
        std::string s = to_turtle(t);
        if (s.front() != '<') return s;
        auto [ns, local] = detail::split_iri(t.value());
        auto it = extra.find(ns);
        if (it != extra.end() && valid_local_name(local)) return it->second + ":" + local;
        return s;
    };

    std::string out;
    out += "@prefix : <" + std::string(kHomeNamespace) + "> .\n";
    out += "@prefix xsd: <" + std::string(kXsdNamespace) + "> .\n";
    for (const auto& [ns, prefix] : extra) out += "@prefix " + prefix + ": <" + ns + "> .\n";
    for (const Triple& t : store) {
        out += write(t.subject);
        out += ' ';
        out += write(t.predicate);
        out += ' ';
        out += write(t.object);
        out += " .\n";
    }
    return out;
}

}  // namespace homectx
