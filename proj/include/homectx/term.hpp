#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace homectx {

inline constexpr std::string_view kHomeNamespace = "http://example.org/home#";
inline constexpr std::string_view kXsdNamespace = "http://www.w3.org/2001/XMLSchema#";

// Supported literal datatypes. Enumerator order matches the lexicographic order
// of their xsd IRIs, which the canonical term order relies on.
enum class Datatype : std::uint8_t {
    kBoolean,
    kDate,
    kDouble,
    kPositiveInteger,
    kString,
    kTime,
};

inline constexpr std::array<std::pair<Datatype, std::string_view>, 6> kDatatypeNames{{
    {Datatype::kBoolean, "boolean"},
    {Datatype::kDate, "date"},
    {Datatype::kDouble, "double"},
    {Datatype::kPositiveInteger, "positiveInteger"},
    {Datatype::kString, "string"},
    {Datatype::kTime, "time"},
}};

inline std::string_view local_name(Datatype dt) {
    return kDatatypeNames[static_cast<std::size_t>(dt)].second;
}

inline std::string datatype_iri(Datatype dt) {
    return std::string(kXsdNamespace) + std::string(local_name(dt));
}

inline std::optional<Datatype> datatype_from_iri(std::string_view iri) {
    if (!iri.starts_with(kXsdNamespace)) return std::nullopt;
    iri.remove_prefix(kXsdNamespace.size());
    for (const auto& [dt, name] : kDatatypeNames)
        if (name == iri) return dt;
    return std::nullopt;
}

namespace detail {

inline bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

inline int to_int(std::string_view s) {
    int v = 0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
}

inline bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

inline int days_in_month(int y, int m) {
    static constexpr std::array<int, 12> kDays{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : kDays[static_cast<std::size_t>(m - 1)];
}

inline bool valid_double(std::string_view s) {
    if (s == "INF" || s == "-INF" || s == "+INF" || s == "NaN") return true;
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t mantissa = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++mantissa;
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++mantissa;
    }
    if (mantissa == 0) return false;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
        std::size_t exp = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++exp;
        if (exp == 0) return false;
    }
    return i == s.size();
}

inline bool valid_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    if (!all_digits(s.substr(0, 4)) || !all_digits(s.substr(5, 2)) || !all_digits(s.substr(8, 2)))
        return false;
    const int y = to_int(s.substr(0, 4));
    const int m = to_int(s.substr(5, 2));
    const int d = to_int(s.substr(8, 2));
    return m >= 1 && m <= 12 && d >= 1 && d <= days_in_month(y, m);
}

inline bool valid_time(std::string_view s) {
    if (s.size() != 8 || s[2] != ':' || s[5] != ':') return false;
    if (!all_digits(s.substr(0, 2)) || !all_digits(s.substr(3, 2)) || !all_digits(s.substr(6, 2)))
        return false;
    return to_int(s.substr(0, 2)) < 24 && to_int(s.substr(3, 2)) < 60 && to_int(s.substr(6, 2)) < 60;
}

inline bool valid_positive_integer(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (!all_digits(s)) return false;
    return s.find_first_not_of('0') != std::string_view::npos;
}

inline bool is_name_start(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

inline bool is_name_char(char c) { return is_name_start(c) || c == '-' || c == '.'; }

}  // namespace detail

inline bool valid_lexical(Datatype dt, std::string_view lexical) {
    switch (dt) {
        case Datatype::kBoolean:
            return lexical == "true" || lexical == "false";
        case Datatype::kDate:
            return detail::valid_date(lexical);
        case Datatype::kDouble:
            return detail::valid_double(lexical);
        case Datatype::kPositiveInteger:
            return detail::valid_positive_integer(lexical);
        case Datatype::kString:
            return true;
        case Datatype::kTime:
            return detail::valid_time(lexical);
    }
    return false;
}

// Local part of a prefixed name: starts with [A-Za-z0-9_], continues with
// [A-Za-z0-9_.-], and never ends in '.' (that dot terminates the statement).
inline bool valid_local_name(std::string_view s) {
    if (s.empty() || !detail::is_name_start(s.front()) || s.back() == '.') return false;
    return std::all_of(s.begin(), s.end(), detail::is_name_char);
}

inline bool valid_prefix_name(std::string_view s) {
    if (s.empty()) return true;
    if (!std::isalpha(static_cast<unsigned char>(s.front()))) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    });
}

// An RDF term: an IRI or a typed literal. Equality is structural.
class Term {
public:
    enum class Kind : std::uint8_t { kIri, kLiteral };

    Term() = default;

    static Term iri(std::string full) {
        if (full.empty()) throw std::invalid_argument("IRI must be non-empty");
        if (full.find_first_of(" \t\r\n<>\"") != std::string::npos)
            throw std::invalid_argument("IRI contains a forbidden character: " + full);
        return Term(Kind::kIri, Datatype::kBoolean, std::move(full));
    }

    // IRI in the home namespace, i.e. what `:local` denotes.
    static Term home(std::string_view local) {
        if (local.empty()) throw std::invalid_argument("local name must be non-empty");
        return iri(std::string(kHomeNamespace) + std::string(local));
    }

    static Term literal(std::string lexical, Datatype dt) {
        if (!valid_lexical(dt, lexical))
            throw std::invalid_argument("invalid lexical form \"" + lexical + "\" for xsd:" +
                                        std::string(local_name(dt)));
        return Term(Kind::kLiteral, dt, std::move(lexical));
    }

    static Term boolean(bool v) { return literal(v ? "true" : "false", Datatype::kBoolean); }

    static Term number(double v) {
        std::array<char, 64> buf{};
        auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
        (void)ec;
        return literal(std::string(buf.data(), end), Datatype::kDouble);
    }

    static Term string(std::string v) { return literal(std::move(v), Datatype::kString); }

    Kind kind() const noexcept { return kind_; }
    bool is_iri() const noexcept { return kind_ == Kind::kIri; }
    bool is_literal() const noexcept { return kind_ == Kind::kLiteral; }

    // Full IRI for IRIs, lexical form for literals.
    const std::string& value() const noexcept { return text_; }
    Datatype datatype() const noexcept { return datatype_; }

    // Local name when the IRI lies in the home namespace.
    std::optional<std::string_view> home_local() const {
        if (!is_iri() || !std::string_view(text_).starts_with(kHomeNamespace)) return std::nullopt;
        return std::string_view(text_).substr(kHomeNamespace.size());
    }

    bool is_numeric() const noexcept {
        return is_literal() &&
               (datatype_ == Datatype::kDouble || datatype_ == Datatype::kPositiveInteger);
    }

    std::optional<double> as_double() const {
        if (!is_numeric()) return std::nullopt;
        if (text_ == "INF" || text_ == "+INF") return std::numeric_limits<double>::infinity();
        if (text_ == "-INF") return -std::numeric_limits<double>::infinity();
        if (text_ == "NaN") return std::numeric_limits<double>::quiet_NaN();
        std::string_view s = text_;
        if (s.front() == '+') s.remove_prefix(1);
        double v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{}) return std::nullopt;
        return v;
    }

    std::optional<bool> as_bool() const {
        if (!is_literal() || datatype_ != Datatype::kBoolean) return std::nullopt;
        return text_ == "true";
    }

    // Canonical order: IRIs first (by IRI), then literals by (datatype IRI, lexical).
    friend auto operator<=>(const Term&, const Term&) = default;
    friend bool operator==(const Term&, const Term&) = default;

private:
    Term(Kind k, Datatype dt, std::string text) : kind_(k), datatype_(dt), text_(std::move(text)) {}

    Kind kind_ = Kind::kIri;
    Datatype datatype_ = Datatype::kBoolean;
    std::string text_;
};

struct Triple {
    Term subject;
    Term predicate;
    Term object;

    Triple() = default;
    Triple(Term s, Term p, Term o) : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {
        if (!subject.is_iri()) throw std::invalid_argument("triple subject must be an IRI");
        if (!predicate.is_iri()) throw std::invalid_argument("triple predicate must be an IRI");
    }

    friend auto operator<=>(const Triple&, const Triple&) = default;
    friend bool operator==(const Triple&, const Triple&) = default;
};

inline std::string escape_string(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

// Written form using the two built-in prefixes, `<...>` otherwise.
inline std::string to_turtle(const Term& t) {
    if (t.is_literal())
        return "\"" + escape_string(t.value()) + "\"^^xsd:" + std::string(local_name(t.datatype()));
    std::string_view v = t.value();
    if (v.starts_with(kHomeNamespace) && valid_local_name(v.substr(kHomeNamespace.size())))
        return ":" + std::string(v.substr(kHomeNamespace.size()));
    if (v.starts_with(kXsdNamespace) && valid_local_name(v.substr(kXsdNamespace.size())))
        return "xsd:" + std::string(v.substr(kXsdNamespace.size()));
    return "<" + std::string(v) + ">";
}

// Human-facing form: home IRIs by local name, literals by lexical form.
inline std::string display(const Term& t) {
    if (t.is_literal()) return t.value();
    if (auto local = t.home_local(); local && !local->empty()) return std::string(*local);
    return to_turtle(t);
}

}  // namespace homectx
