#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "homectx/detail/lexer.hpp"
#include "homectx/error.hpp"
#include "homectx/term.hpp"
#include "homectx/triple_store.hpp"

namespace homectx {

enum class Direction { kAsc, kDesc };

struct OrderKey {
    Variable variable;
    Direction direction = Direction::kAsc;

    friend bool operator==(const OrderKey&, const OrderKey&) = default;
};

// filter(datatype(?v) = <datatype>)
struct FilterExpr {
    Variable variable;
    std::string datatype;  // full IRI

    bool accepts(const Term* bound) const {
        return bound && bound->is_literal() && datatype_iri(bound->datatype()) == datatype;
    }

    friend bool operator==(const FilterExpr&, const FilterExpr&) = default;
};

struct Query {
    bool distinct = false;
    std::vector<Variable> projection;
    std::vector<TriplePattern> patterns;
    std::vector<FilterExpr> filters;
    std::vector<OrderKey> order_keys;
};

// Partial map from variable name to term.
class Binding {
public:
    const Term* get(const std::string& name) const {
        auto it = values_.find(name);
        return it == values_.end() ? nullptr : &it->second;
    }

    // Binds `name`, or checks agreement if already bound.
    bool bind(const std::string& name, const Term& value) {
        auto [it, inserted] = values_.emplace(name, value);
        return inserted || it->second == value;
    }

    const std::map<std::string, Term>& values() const { return values_; }

    friend bool operator==(const Binding&, const Binding&) = default;

private:
    std::map<std::string, Term> values_;
};

// Union of two bindings when they agree on every shared variable.
inline std::optional<Binding> merge(const Binding& a, const Binding& b) {
    Binding out = a;
    for (const auto& [name, value] : b.values())
        if (!out.bind(name, value)) return std::nullopt;
    return out;
}

struct ResultTable {
    std::vector<Variable> header;
    std::vector<std::vector<Term>> rows;
};

namespace detail {

inline const std::set<std::string>& unsupported_keywords() {
    static const std::set<std::string> kWords{
        "OPTIONAL", "UNION",   "MINUS",     "GRAPH",  "SERVICE",  "BIND",     "VALUES",  "LIMIT",
        "OFFSET",   "GROUP",   "HAVING",    "CONSTRUCT", "ASK",   "DESCRIBE", "FROM",    "NAMED",
        "INSERT",   "DELETE",  "LOAD",      "CLEAR",  "REDUCED",  "COUNT",    "SUM",     "MIN",
        "MAX",      "AVG",     "SAMPLE",    "GROUP_CONCAT", "EXISTS", "NOT",  "BASE",    "AS",
        "REGEX",    "BOUND",   "STR",       "LANG",   "LANGMATCHES", "ISIRI", "ISURI",  "ISLITERAL",
        "SAMETERM", "WITH",    "UNDEF",
    };
    return kWords;
}

class QueryParser {
public:
    explicit QueryParser(std::string_view text) : tokens_(Lexer(text).tokenize()) {}

    Query parse() {
        for (const Token& t : tokens_)
            if (t.kind == Token::Kind::kWord && unsupported_keywords().contains(upper(t.text)))
                throw UnsupportedFeature(t.line, t.column, upper(t.text));

        while (is_word("PREFIX")) {
            ++i_;
            const Token& name = take();
            if (name.kind != Token::Kind::kName || name.name.is_iri || !name.name.local.empty())
                throw error(name, "expected prefix name like 'ex:'");
            const Token& ns = take();
            if (ns.kind != Token::Kind::kName || !ns.name.is_iri) throw error(ns, "expected <namespace IRI>");
            prefixes_.declare(name.name.prefix, ns.name.iri);
        }

        Query q;
        expect_word("SELECT");
        if (is_word("DISTINCT")) {
            ++i_;
            q.distinct = true;
        }
        if (peek().is_punct('*')) throw UnsupportedFeature(peek().line, peek().column, "SELECT *");
        std::vector<const Token*> projected;
        while (peek().kind == Token::Kind::kVariable) {
            projected.push_back(&peek());
            q.projection.push_back(Variable{take().text});
        }
        if (q.projection.empty()) throw error(peek(), "expected at least one projected variable");
        if (is_word("WHERE")) ++i_;
        expect_punct('{');

        std::vector<std::pair<const Token*, Variable>> referenced;
        while (!peek().is_punct('}')) {
            const Token& t = peek();
            if (t.kind == Token::Kind::kEnd) throw error(t, "expected '}'");
            if (t.kind == Token::Kind::kWord && upper(t.text) == "FILTER") {
                ++i_;
                q.filters.push_back(parse_filter(referenced));
                if (peek().is_punct('.')) ++i_;
                continue;
            }
            if (t.is_punct('{')) throw UnsupportedFeature(t.line, t.column, "nested group pattern");
            TriplePattern p;
            p.subject = parse_slot("subject");
            p.predicate = parse_slot("predicate");
            p.object = parse_slot("object");
            q.patterns.push_back(std::move(p));
            const Token& after = peek();
            if (after.is_punct(';') || after.is_punct(','))
                throw UnsupportedFeature(after.line, after.column, "predicate-object list '" + after.text + "'");
            if (after.is_punct('.')) {
                ++i_;
            } else if (!after.is_punct('}') && !is_word("FILTER")) {
                throw error(after, "expected '.' after triple pattern");
            }
        }
        ++i_;  // '}'

        if (is_word("ORDER")) {
            ++i_;
            expect_word("BY");
            while (peek().kind == Token::Kind::kVariable || is_word("ASC") || is_word("DESC")) {
                OrderKey key;
                if (peek().kind == Token::Kind::kVariable) {
                    referenced.emplace_back(&peek(), Variable{peek().text});
                    key.variable = Variable{take().text};
                } else {
                    key.direction = upper(take().text) == "DESC" ? Direction::kDesc : Direction::kAsc;
                    expect_punct('(');
                    const Token& v = take();
                    if (v.kind != Token::Kind::kVariable) throw error(v, "expected variable in ORDER BY");
                    referenced.emplace_back(&v, Variable{v.text});
                    key.variable = Variable{v.text};
                    expect_punct(')');
                }
                q.order_keys.push_back(std::move(key));
            }
            if (q.order_keys.empty()) throw error(peek(), "expected ORDER BY key");
        }
        if (peek().kind != Token::Kind::kEnd) throw error(peek(), "unexpected trailing input");

        std::set<std::string> bound;
        for (const TriplePattern& p : q.patterns)
            for (const PatternSlot* s : {&p.subject, &p.predicate, &p.object})
                if (const Variable* v = as_variable(*s)) bound.insert(v->name);
        for (std::size_t k = 0; k < projected.size(); ++k)
            if (!bound.contains(q.projection[k].name))
                throw ParseError(projected[k]->line, projected[k]->column,
                                 "variable ?" + q.projection[k].name + " is projected but never bound");
        for (const auto& [tok, v] : referenced)
            if (!bound.contains(v.name))
                throw ParseError(tok->line, tok->column, "variable ?" + v.name + " is never bound");
        return q;
    }

private:
    const Token& peek() const { return tokens_[i_]; }
    const Token& take() {
        const Token& t = tokens_[i_];
        if (t.kind != Token::Kind::kEnd) ++i_;
        return t;
    }

    bool is_word(std::string_view w) const {
        return peek().kind == Token::Kind::kWord && upper(peek().text) == w;
    }

    static ParseError error(const Token& t, const std::string& msg) {
        return ParseError(t.line, t.column, msg + ", found " + describe(t));
    }

    void expect_word(std::string_view w) {
        if (!is_word(w)) throw error(peek(), "expected " + std::string(w));
        ++i_;
    }

    void expect_punct(char c) {
        if (!peek().is_punct(c)) throw error(peek(), std::string("expected '") + c + "'");
        ++i_;
    }

    PatternSlot parse_slot(const std::string& role) {
        const Token& t = peek();
        switch (t.kind) {
            case Token::Kind::kVariable:
                ++i_;
                return Variable{t.text};
            case Token::Kind::kName:
                ++i_;
                return Term::iri(prefixes_.resolve(t.name, t.line, t.column));
            case Token::Kind::kLiteral:
                if (role != "object") throw error(t, "literal not allowed in " + role + " position");
                ++i_;
                return literal_from_token(t, prefixes_);
            case Token::Kind::kWord:
                if (t.text == "a") throw UnsupportedFeature(t.line, t.column, "'a' (rdf:type shorthand)");
                break;
            case Token::Kind::kPunct:
                if (t.is_punct('[')) throw UnsupportedFeature(t.line, t.column, "blank node");
                break;
            default:
                break;
        }
        throw error(t, "expected " + role);
    }

    FilterExpr parse_filter(std::vector<std::pair<const Token*, Variable>>& referenced) {
        const Token& open = peek();
        expect_punct('(');
        if (!is_word("DATATYPE")) throw UnsupportedFeature(open.line, open.column, "FILTER expression");
        ++i_;
        expect_punct('(');
        const Token& v = take();
        if (v.kind != Token::Kind::kVariable) throw error(v, "expected variable in datatype()");
        expect_punct(')');
        if (!peek().is_punct('=')) throw UnsupportedFeature(open.line, open.column, "FILTER expression");
        ++i_;
        const Token& dt = take();
        if (dt.kind != Token::Kind::kName) throw error(dt, "expected datatype IRI");
        FilterExpr f{Variable{v.text}, prefixes_.resolve(dt.name, dt.line, dt.column)};
        if (!peek().is_punct(')')) throw UnsupportedFeature(open.line, open.column, "FILTER expression");
        ++i_;
        referenced.emplace_back(&v, f.variable);
        return f;
    }

    std::vector<Token> tokens_;
    std::size_t i_ = 0;
    PrefixMap prefixes_;
};

inline std::optional<Term> lookup(const Binding& b, const PatternSlot& slot) {
    if (const Term* t = as_term(slot)) return *t;
    if (const Term* t = b.get(std::get<Variable>(slot).name)) return *t;
    return std::nullopt;
}

inline bool extend(Binding& b, const PatternSlot& slot, const Term& value) {
    if (const Variable* v = as_variable(slot)) return b.bind(v->name, value);
    return true;
}

// Left-to-right index nested-loop join. Already-bound variables are
// substituted before each lookup.
inline void join(const TripleStore& store, const std::vector<TriplePattern>& patterns, std::size_t depth,
                 const Binding& current, std::vector<Binding>& out) {
    if (depth == patterns.size()) {
        out.push_back(current);
        return;
    }
    const TriplePattern& p = patterns[depth];
    for (const Triple& t : store.match(lookup(current, p.subject), lookup(current, p.predicate),
                                       lookup(current, p.object))) {
        Binding next = current;
        if (extend(next, p.subject, t.subject) && extend(next, p.predicate, t.predicate) &&
            extend(next, p.object, t.object))
            join(store, patterns, depth + 1, next, out);
    }
}

// Total order on doubles with NaN after every number.
inline std::weak_ordering compare_numbers(double x, double y) {
    const bool nx = std::isnan(x), ny = std::isnan(y);
    if (nx || ny) return nx == ny ? std::weak_ordering::equivalent : (nx ? std::weak_ordering::greater : std::weak_ordering::less);
    return x < y ? std::weak_ordering::less : x > y ? std::weak_ordering::greater : std::weak_ordering::equivalent;
}

// Numerics, then other terms, then unbound. Direction flips order inside a
// group only.
inline std::weak_ordering compare_key(const Term* a, const Term* b, Direction dir) {
    auto group = [](const Term* t) { return !t ? 2 : t->is_numeric() ? 0 : 1; };
    const int ga = group(a), gb = group(b);
    if (ga != gb) return ga <=> gb;
    if (ga == 2) return std::weak_ordering::equivalent;
    std::weak_ordering c = ga == 0 ? compare_numbers(*a->as_double(), *b->as_double()) : std::weak_ordering(*a <=> *b);
    if (dir == Direction::kDesc) c = 0 <=> c;
    return c;
}

}  // namespace detail

inline Query parse_query(std::string_view text) { return detail::QueryParser(text).parse(); }

// All solutions of the basic graph pattern that pass every filter, in
// enumeration order, before projection.
inline std::vector<Binding> solve(const TripleStore& store, const Query& q) {
    std::vector<Binding> solutions;
    detail::join(store, q.patterns, 0, Binding{}, solutions);
    std::erase_if(solutions, [&](const Binding& b) {
        return std::any_of(q.filters.begin(), q.filters.end(),
                           [&](const FilterExpr& f) { return !f.accepts(b.get(f.variable.name)); });
    });
    return solutions;
}

// Rows are sorted by the ORDER BY keys, ties broken by canonical term order
// on the projected columns left to right; DISTINCT keeps the first of equal rows.
inline ResultTable evaluate(const TripleStore& store, const Query& q) {
    std::vector<Binding> solutions = solve(store, q);

    auto project = [&](const Binding& b) {
        std::vector<Term> row;
        row.reserve(q.projection.size());
        for (const Variable& v : q.projection) row.push_back(*b.get(v.name));
        return row;
    };

    struct Entry {
        const Binding* binding;
        std::vector<Term> row;
    };
    std::vector<Entry> entries;
    entries.reserve(solutions.size());
    for (const Binding& b : solutions) entries.push_back({&b, project(b)});

    std::stable_sort(entries.begin(), entries.end(), [&](const Entry& x, const Entry& y) {
        for (const OrderKey& k : q.order_keys) {
            auto c = detail::compare_key(x.binding->get(k.variable.name), y.binding->get(k.variable.name),
                                         k.direction);
            if (c != 0) return c < 0;
        }
        return x.row < y.row;
    });

    ResultTable rt;
    rt.header = q.projection;
    std::set<std::vector<Term>> seen;
    for (Entry& e : entries) {
        if (q.distinct && !seen.insert(e.row).second) continue;
        rt.rows.push_back(std::move(e.row));
    }
    return rt;
}

enum class OutputMode { kTable, kTsv };

// Fixed-width table (columns padded, two spaces apart) or tab-separated
// rows; both start with a header line of variable names.
inline std::string format_results(const ResultTable& rt, OutputMode mode = OutputMode::kTable) {
    std::vector<std::vector<std::string>> lines;
    {
        std::vector<std::string> header;
        for (const Variable& v : rt.header) header.push_back(v.name);
        lines.push_back(std::move(header));
    }
    for (const auto& row : rt.rows) {
        std::vector<std::string> cells;
        for (const Term& t : row) cells.push_back(display(t));
        lines.push_back(std::move(cells));
    }

    std::string out;
    if (mode == OutputMode::kTsv) {
        for (const auto& cells : lines) {
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (c) out += '\t';
                out += cells[c];
            }
            out += '\n';
        }
        return out;
    }

    std::vector<std::size_t> width(rt.header.size(), 0);
    for (const auto& cells : lines)
        for (std::size_t c = 0; c < cells.size(); ++c) width[c] = std::max(width[c], cells[c].size());
    for (const auto& cells : lines) {
        std::string line;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c) line += "  ";
            line += cells[c];
            if (c + 1 < cells.size()) line.append(width[c] - cells[c].size(), ' ');
        }
        out += line + '\n';
    }
    return out;
}

}  // namespace homectx
