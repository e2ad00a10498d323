#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "homectx/error.hpp"
#include "homectx/term.hpp"
#include "homectx/triple_store.hpp"

namespace homectx {

// Property names of the home vocabulary.
namespace vocab {
inline Term humidity() { return Term::home("Humidity"); }
inline Term temperature() { return Term::home("Temperature"); }
inline Term illumination() { return Term::home("Illumination"); }
inline Term date() { return Term::home("Date"); }
inline Term has_time() { return Term::home("hasTime"); }
inline Term person_in() { return Term::home("personIn"); }
inline Term name() { return Term::home("name"); }
inline Term has_priority() { return Term::home("hasPriority"); }
inline Term when() { return Term::home("When"); }
inline Term who() { return Term::home("Who"); }
inline Term does() { return Term::home("Do"); }
}  // namespace vocab

struct TimeOfDay {
    int hours = 0;
    int minutes = 0;
    int seconds = 0;

    bool valid() const {
        return hours >= 0 && hours < 24 && minutes >= 0 && minutes < 60 && seconds >= 0 && seconds < 60;
    }

    int seconds_of_day() const { return hours * 3600 + minutes * 60 + seconds; }

    static TimeOfDay from_seconds(int s) { return {s / 3600, s / 60 % 60, s % 60}; }

    // Six-digit HHMMSS form.
    static TimeOfDay parse_compact(std::string_view s) {
        if (s.size() != 6 || !detail::all_digits(s))
            throw std::invalid_argument("time must be HHMMSS, got \"" + std::string(s) + "\"");
        TimeOfDay t{detail::to_int(s.substr(0, 2)), detail::to_int(s.substr(2, 2)), detail::to_int(s.substr(4, 2))};
        if (!t.valid()) throw std::invalid_argument("time out of range: " + std::string(s));
        return t;
    }

    std::string compact() const {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%02d%02d%02d", hours, minutes, seconds);
        return buf;
    }

    // The `:_HHMMSS` resource that stands for this time of day.
    Term to_term() const { return Term::home("_" + compact()); }

    static std::optional<TimeOfDay> from_term(const Term& t) {
        auto local = t.home_local();
        if (!local || local->size() != 7 || local->front() != '_') return std::nullopt;
        try {
            return parse_compact(local->substr(1));
        } catch (const std::invalid_argument&) {
            return std::nullopt;
        }
    }

    friend auto operator<=>(const TimeOfDay&, const TimeOfDay&) = default;
};

struct Date {
    int year = 2000;
    int month = 1;
    int day = 1;

    static Date parse(std::string_view s) {
        if (!detail::valid_date(s)) throw std::invalid_argument("date must be YYYY-MM-DD, got \"" + std::string(s) + "\"");
        return {detail::to_int(s.substr(0, 4)), detail::to_int(s.substr(5, 2)), detail::to_int(s.substr(8, 2))};
    }

    std::string lexical() const {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
        return buf;
    }

    bool valid() const { return year >= 0 && year <= 9999 && detail::valid_date(lexical()); }

    friend auto operator<=>(const Date&, const Date&) = default;
};

inline bool valid_stream_id(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    });
}

// One timestamped sensor snapshot. `stream` names the sensor stream; it is
// empty for readings that do not belong to a named stream.
struct EnvironmentReading {
    std::string stream;
    double humidity = 0;      // %
    double temperature = 0;   // degrees C
    double illumination = 0;  // lux
    Date date;
    TimeOfDay time;
    std::set<Term> persons_present;

    // `_YYMMDDHHMMSS`, suffixed with `-stream` for named streams.
    Term id() const {
        char buf[16];
        std::snprintf(buf, sizeof buf, "_%02d%02d%02d", date.year % 100, date.month, date.day);
        std::string local = buf + time.compact();
        if (!stream.empty()) local += "-" + stream;
        return Term::home(local);
    }

    void validate() const {
        auto bad = [](const std::string& msg) { return std::invalid_argument(msg); };
        if (!std::isfinite(humidity) || humidity < 0 || humidity > 100)
            throw bad("humidity must be within [0, 100]");
        if (!std::isfinite(temperature)) throw bad("temperature must be finite");
        if (!std::isfinite(illumination) || illumination < 0) throw bad("illumination must be >= 0");
        if (!date.valid()) throw bad("invalid date " + date.lexical());
        if (!time.valid()) throw bad("invalid time");
        if (!valid_stream_id(stream)) throw bad("invalid stream id \"" + stream + "\"");
        for (const Term& p : persons_present)
            if (!p.is_iri()) throw bad("present person must be an IRI");
    }

    // (date, time) ordering key.
    std::pair<Date, TimeOfDay> timestamp() const { return {date, time}; }

    friend bool operator==(const EnvironmentReading&, const EnvironmentReading&) = default;
};

inline std::vector<Triple> reading_to_triples(const EnvironmentReading& r) {
    const Term id = r.id();
    std::vector<Triple> out;
    out.reserve(5 + r.persons_present.size());
    out.emplace_back(id, vocab::humidity(), Term::number(r.humidity));
    out.emplace_back(id, vocab::temperature(), Term::number(r.temperature));
    out.emplace_back(id, vocab::illumination(), Term::number(r.illumination));
    out.emplace_back(id, vocab::date(), Term::literal(r.date.lexical(), Datatype::kDate));
    out.emplace_back(id, vocab::has_time(), r.time.to_term());
    for (const Term& p : r.persons_present) out.emplace_back(id, vocab::person_in(), p);
    return out;
}

namespace detail {

inline std::string short_name(const Term& t) { return display(t); }

inline Term single_value(const TripleStore& store, const Term& subject, const Term& property) {
    auto found = store.match(subject, property, std::nullopt);
    if (found.empty())
        throw ModelError("missing property " + short_name(property) + " on " + short_name(subject));
    if (found.size() > 1)
        throw ModelError("ambiguous property " + short_name(property) + " on " + short_name(subject));
    return found.front().object;
}

inline double double_value(const TripleStore& store, const Term& subject, const Term& property) {
    const Term v = single_value(store, subject, property);
    if (!v.is_literal() || v.datatype() != Datatype::kDouble)
        throw ModelError("malformed literal for " + short_name(property) + " on " + short_name(subject));
    return *v.as_double();
}

}  // namespace detail

// Rebuilds the reading stored under `id`; inverse of reading_to_triples.
inline EnvironmentReading triples_to_reading(const TripleStore& store, const Term& id) {
    if (store.match(id, std::nullopt, std::nullopt).empty())
        throw ModelError("environment record not found: " + display(id));
    auto local = id.home_local();
    if (!local || local->size() < 13 || local->front() != '_' || !detail::all_digits(local->substr(1, 12)) ||
        (local->size() > 13 && (local->at(13) != '-' || local->size() == 14)))
        throw ModelError("malformed environment id " + display(id));

    EnvironmentReading r;
    if (local->size() > 13) r.stream = std::string(local->substr(14));
    r.humidity = detail::double_value(store, id, vocab::humidity());
    r.temperature = detail::double_value(store, id, vocab::temperature());
    r.illumination = detail::double_value(store, id, vocab::illumination());

    const Term date = detail::single_value(store, id, vocab::date());
    if (!date.is_literal() || date.datatype() != Datatype::kDate)
        throw ModelError("malformed literal for Date on " + display(id));
    r.date = Date::parse(date.value());

    auto time = TimeOfDay::from_term(detail::single_value(store, id, vocab::has_time()));
    if (!time) throw ModelError("malformed hasTime on " + display(id));
    r.time = *time;

    for (const Triple& t : store.match(id, vocab::person_in(), std::nullopt)) {
        if (!t.object.is_iri()) throw ModelError("personIn must reference a person on " + display(id));
        r.persons_present.insert(t.object);
    }
    try {
        r.validate();
    } catch (const std::invalid_argument& e) {
        throw ModelError("malformed environment record " + display(id) + ": " + e.what());
    }
    if (r.id() != id) throw ModelError("id " + display(id) + " does not match its Date/hasTime");
    return r;
}

struct Person {
    Term id;
    std::string name;
    std::int64_t priority = 1;  // higher wins

    friend bool operator==(const Person&, const Person&) = default;
};

struct Activity {
    Term id;
    TimeOfDay when;
    Term who;
    Term does;

    friend bool operator==(const Activity&, const Activity&) = default;
};

struct PreferenceProfile {
    Term id;
    std::map<Term, bool> appliance_states;

    friend bool operator==(const PreferenceProfile&, const PreferenceProfile&) = default;
};

struct HomeModel {
    std::map<Term, Person> persons;
    std::map<Term, Activity> activities;
    std::map<Term, PreferenceProfile> preferences;

    friend bool operator==(const HomeModel&, const HomeModel&) = default;
};

// Collects persons (:name + :hasPriority), activities (:When/:Who/:Do) and
// the preference profiles those activities point at, then checks that every
// activity references a known person and a profile with boolean settings.
inline HomeModel load_home_model(const TripleStore& store) {
    HomeModel model;

    for (const Triple& t : store.match(std::nullopt, vocab::has_priority(), std::nullopt)) {
        auto names = store.match(t.subject, vocab::name(), std::nullopt);
        if (names.empty()) continue;
        if (model.persons.contains(t.subject))
            throw ModelError("person " + display(t.subject) + " has more than one priority");
        auto value = t.object.as_double();
        if (!value || *value != std::floor(*value))
            throw ModelError("malformed priority for " + display(t.subject));
        if (*value < 1) throw ModelError("non-positive priority for " + display(t.subject));
        model.persons.emplace(t.subject,
                              Person{t.subject, names.front().object.value(), static_cast<std::int64_t>(*value)});
    }

    std::set<Term> activity_ids;
    for (const Term& prop : {vocab::when(), vocab::who(), vocab::does()})
        for (const Triple& t : store.match(std::nullopt, prop, std::nullopt)) activity_ids.insert(t.subject);

    for (const Term& id : activity_ids) {
        Activity a;
        a.id = id;
        try {
            auto when = TimeOfDay::from_term(detail::single_value(store, id, vocab::when()));
            if (!when) throw ModelError("malformed When on activity " + display(id));
            a.when = *when;
            a.who = detail::single_value(store, id, vocab::who());
            a.does = detail::single_value(store, id, vocab::does());
        } catch (const ModelError& e) {
            throw ModelError(std::string("incomplete activity: ") + e.what());
        }
        if (!model.persons.contains(a.who))
            throw ModelError("dangling reference: activity " + display(id) + " names unknown person " +
                             display(a.who));
        if (!model.preferences.contains(a.does)) {
            PreferenceProfile p{a.does, {}};
            if (a.does.is_iri())
                for (const Triple& t : store.match(a.does, std::nullopt, std::nullopt))
                    if (auto b = t.object.as_bool()) p.appliance_states.emplace(t.predicate, *b);
            if (p.appliance_states.empty())
                throw ModelError("dangling reference: activity " + display(id) + " does unknown preference " +
                                 display(a.does));
            model.preferences.emplace(a.does, std::move(p));
        }
        model.activities.emplace(id, std::move(a));
    }
    return model;
}

}  // namespace homectx
