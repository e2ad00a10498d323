#pragma once

#include <istream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "homectx/dedup.hpp"
#include "homectx/error.hpp"
#include "homectx/ontology.hpp"
#include "homectx/sparql.hpp"
#include "homectx/triple_store.hpp"

namespace homectx {

// Reasoner output: desired appliance state and the solution row that won.
struct ApplianceCommand {
    Term appliance;
    bool state = false;
    Term person;
    Term activity;  // the preference profile the person's activity selects
    std::int64_t priority = 0;

    friend bool operator==(const ApplianceCommand&, const ApplianceCommand&) = default;
};

// The appliance-status query, with its time resource bound to `t`.
inline std::string appliance_query_text(const TimeOfDay& t) {
    const std::string time = ":_" + t.compact();
    return "SELECT DISTINCT ?person ?what ?appliance ?status ?priority\n"
           "WHERE\n{\n"
           "?work :When " + time + ".\n"
           "?environment :hasTime " + time + ".\n"
           "?environment :personIn ?person.\n"
           "?work :Who ?person.\n"
           "?work :Do ?what.\n"
           "?person :hasPriority ?priority.\n"
           "?what ?appliance ?status.\n"
           "filter(datatype(?status)=xsd:boolean)\n"
           "}\n"
           "ORDER BY DESC(?priority)\n";
}

// One command per appliance seen in the appliance-status query at `t`. Per
// appliance the highest priority wins; on a tie `true` wins, then the lower
// person IRI, then the lower activity IRI. Commands come in appliance order.
inline std::vector<ApplianceCommand> reason_at(const TripleStore& store, const TimeOfDay& t) {
    (void)load_home_model(store);
    const ResultTable rt = evaluate(store, parse_query(appliance_query_text(t)));

    std::map<Term, ApplianceCommand> best;
    auto better = [](const ApplianceCommand& a, const ApplianceCommand& b) {
        if (a.priority != b.priority) return a.priority > b.priority;
        if (a.state != b.state) return a.state;
        if (a.person != b.person) return a.person < b.person;
        return a.activity < b.activity;
    };
    for (const auto& row : rt.rows) {
        auto priority = row[4].as_double();
        if (!priority) throw ModelError("non-numeric priority for " + display(row[0]));
        ApplianceCommand c{row[2], *row[3].as_bool(), row[0], row[1], static_cast<std::int64_t>(*priority)};
        auto [it, inserted] = best.emplace(c.appliance, c);
        if (!inserted && better(c, it->second)) it->second = c;
    }
    std::vector<ApplianceCommand> out;
    out.reserve(best.size());
    for (auto& [appliance, c] : best) out.push_back(std::move(c));
    return out;
}

// --- wire format: one JSON object per line -------------------------------

// The peer broke the protocol; the connection is closed after an error line.
class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A reading whose payload cannot be turned into a valid EnvironmentReading.
class PayloadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace wire {

struct Hello {
    std::string stream;
};

struct Reading {
    EnvironmentReading reading;
    bool has_stream = false;
};

struct Tick {
    TimeOfDay time;
};

struct Ack {
    bool accepted = true;
    bool stored = false;
    double distance = 0;
    std::string error;  // set when rejected

    friend bool operator==(const Ack&, const Ack&) = default;
};

using Inbound = std::variant<Hello, Reading, Tick>;

namespace detail {

inline double number_field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw PayloadError(std::string("missing field '") + key + "'");
    const auto& v = j.at(key);
    if (!v.is_number()) throw PayloadError(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

inline std::string string_field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw PayloadError(std::string("missing field '") + key + "'");
    const auto& v = j.at(key);
    if (!v.is_string()) throw PayloadError(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

inline Term person_term(const std::string& name) {
    if (!valid_local_name(name)) throw PayloadError("invalid person name \"" + name + "\"");
    return Term::home(name);
}

inline std::string local_or_full(const Term& t) { return display(t); }

}  // namespace detail

inline Inbound decode(std::string_view line) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ProtocolError("message is not a JSON object");
    if (!j.contains("type") || !j["type"].is_string()) throw ProtocolError("message has no \"type\"");
    const std::string type = j["type"].get<std::string>();

    if (type == "hello") {
        if (!j.contains("stream") || !j["stream"].is_string()) throw ProtocolError("hello needs a \"stream\"");
        Hello h{j["stream"].get<std::string>()};
        if (h.stream.empty() || !valid_stream_id(h.stream)) throw ProtocolError("invalid stream id in hello");
        return h;
    }
    if (type == "tick") {
        if (!j.contains("time") || !j["time"].is_string()) throw ProtocolError("tick needs a \"time\"");
        try {
            return Tick{TimeOfDay::parse_compact(j["time"].get<std::string>())};
        } catch (const std::invalid_argument& e) {
            throw ProtocolError(std::string("bad tick: ") + e.what());
        }
    }
    if (type != "reading") throw ProtocolError("unexpected message type \"" + type + "\"");

    Reading m;
    EnvironmentReading& r = m.reading;
    if (j.contains("stream")) {
        r.stream = detail::string_field(j, "stream");
        if (r.stream.empty() || !valid_stream_id(r.stream)) throw PayloadError("invalid stream id");
        m.has_stream = true;
    }
    try {
        r.date = Date::parse(detail::string_field(j, "date"));
        r.time = TimeOfDay::parse_compact(detail::string_field(j, "time"));
    } catch (const std::invalid_argument& e) {
        throw PayloadError(e.what());
    }
    r.temperature = detail::number_field(j, "temperature");
    r.humidity = detail::number_field(j, "humidity");
    r.illumination = detail::number_field(j, "illumination");
    if (j.contains("present")) {
        const auto& present = j["present"];
        if (!present.is_array()) throw PayloadError("field 'present' must be an array");
        for (const auto& p : present) {
            if (!p.is_string()) throw PayloadError("field 'present' must hold strings");
            r.persons_present.insert(detail::person_term(p.get<std::string>()));
        }
    }
    try {
        r.validate();
    } catch (const std::invalid_argument& e) {
        throw PayloadError(e.what());
    }
    return m;
}

inline std::string encode(const Ack& a) {
    nlohmann::ordered_json j{{"type", "ack"}, {"accepted", a.accepted}, {"stored", a.stored}, {"distance", a.distance}};
    if (!a.accepted) j["error"] = a.error;
    return j.dump();
}

inline std::string encode(const ApplianceCommand& c) {
    nlohmann::ordered_json j{{"type", "command"},
                             {"appliance", detail::local_or_full(c.appliance)},
                             {"state", c.state},
                             {"person", detail::local_or_full(c.person)},
                             {"activity", detail::local_or_full(c.activity)},
                             {"priority", c.priority}};
    return j.dump();
}

inline std::string encode(const Hello& h) {
    return nlohmann::ordered_json{{"type", "hello"}, {"stream", h.stream}}.dump();
}

inline std::string encode(const Tick& t) {
    return nlohmann::ordered_json{{"type", "tick"}, {"time", t.time.compact()}}.dump();
}

// Person IRIs outside the home namespace cannot be written on the wire.
inline std::string encode(const EnvironmentReading& r) {
    nlohmann::ordered_json j{{"type", "reading"}};
    if (!r.stream.empty()) j["stream"] = r.stream;
    j["date"] = r.date.lexical();
    j["time"] = r.time.compact();
    j["temperature"] = r.temperature;
    j["humidity"] = r.humidity;
    j["illumination"] = r.illumination;
    auto present = nlohmann::ordered_json::array();
    for (const Term& p : r.persons_present) present.push_back(std::string(p.home_local().value_or(p.value())));
    j["present"] = std::move(present);
    return j.dump();
}

inline std::string encode_error(std::string_view message) {
    return nlohmann::ordered_json{{"type", "error"}, {"message", message}}.dump();
}

}  // namespace wire

struct IngestStats {
    std::size_t input_count = 0;
    std::size_t stored_count = 0;
    std::size_t commands_emitted = 0;

    double reduction_factor() const { return homectx::reduction_factor(input_count, stored_count); }
};

// The store-side pipeline: dedup, triple insertion and reasoning.
//
// Store mutations and dedup state changes take the writer lock; reasoning
// takes the reader lock. Safe to share between connection handlers.
class Engine {
public:
    struct ReadingOutcome {
        wire::Ack ack;
        std::vector<ApplianceCommand> commands;
    };

    explicit Engine(DedupConfig cfg = {}) : filter_(std::move(cfg)) {}

    void load(const std::vector<Triple>& triples) {
        std::unique_lock lock(mu_);
        store_.insert_all(triples);
    }

    // Throws OrderError if the reading is older than its stream's last one.
    ReadingOutcome handle_reading(const EnvironmentReading& r) {
        ReadingOutcome out;
        bool presence_changed = false;
        {
            std::unique_lock lock(mu_);
            const EnvironmentReading* base = filter_.baseline(r.stream);
            const std::set<Term> before = base ? base->persons_present : std::set<Term>{};
            const DedupDecision d = filter_.offer(r);
            ++stats_.input_count;
            out.ack = {true, d.store, d.distance, {}};
            if (d.store) {
                ++stats_.stored_count;
                store_.insert_all(reading_to_triples(r));
                presence_changed = before != r.persons_present;
            }
        }
        if (presence_changed) out.commands = reason(r.time);
        return out;
    }

    std::vector<ApplianceCommand> handle_tick(const TimeOfDay& t) { return reason(t); }

    TripleStore snapshot() const {
        std::shared_lock lock(mu_);
        return store_;
    }

    IngestStats stats() const {
        std::shared_lock lock(mu_);
        return stats_;
    }

    const DedupConfig& config() const { return filter_.config(); }

private:
    std::vector<ApplianceCommand> reason(const TimeOfDay& t) {
        std::vector<ApplianceCommand> cmds;
        {
            std::shared_lock lock(mu_);
            cmds = reason_at(store_, t);
        }
        std::unique_lock lock(mu_);
        stats_.commands_emitted += cmds.size();
        return cmds;
    }

    mutable std::shared_mutex mu_;
    TripleStore store_;
    DedupFilter filter_;
    IngestStats stats_;
};

// Per-connection protocol state: optional single hello, then readings and
// ticks. Every reading yields exactly one ack, followed by any commands.
class Connection {
public:
    struct Failure {
        std::string message;
    };
    using Reply = std::variant<wire::Ack, ApplianceCommand, Failure>;

    explicit Connection(Engine& engine) : engine_(engine) {}

    bool closed() const { return closed_; }

    std::vector<Reply> process(std::string_view line) {
        std::vector<Reply> out;
        if (closed_) return out;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) return out;
        try {
            wire::Inbound msg = wire::decode(line);
            if (auto* hello = std::get_if<wire::Hello>(&msg)) {
                if (default_stream_) throw ProtocolError("duplicate hello");
                default_stream_ = hello->stream;
            } else if (auto* tick = std::get_if<wire::Tick>(&msg)) {
                for (auto& c : engine_.handle_tick(tick->time)) out.emplace_back(std::move(c));
            } else {
                auto& reading = std::get<wire::Reading>(msg);
                if (!reading.has_stream && default_stream_) reading.reading.stream = *default_stream_;
                accept(reading.reading, out);
            }
        } catch (const PayloadError& e) {
            out.emplace_back(wire::Ack{false, false, 0, e.what()});
        } catch (const ProtocolError& e) {
            fail(out, e.what());
        } catch (const std::exception& e) {
            fail(out, std::string("internal error: ") + e.what());
        }
        return out;
    }

    static std::string encode(const Reply& r) {
        return std::visit(
            [](const auto& v) -> std::string {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, Failure>)
                    return wire::encode_error(v.message);
                else
                    return wire::encode(v);
            },
            r);
    }

private:
    void accept(const EnvironmentReading& r, std::vector<Reply>& out) {
        try {
            auto outcome = engine_.handle_reading(r);
            out.emplace_back(outcome.ack);
            for (auto& c : outcome.commands) out.emplace_back(std::move(c));
        } catch (const OrderError& e) {
            out.emplace_back(wire::Ack{false, false, 0, e.what()});
        }
    }

    void fail(std::vector<Reply>& out, std::string message) {
        out.emplace_back(Failure{std::move(message)});
        closed_ = true;
    }

    Engine& engine_;
    std::optional<std::string> default_stream_;
    bool closed_ = false;
};

class TraceError : public std::runtime_error {
public:
    TraceError(std::size_t line, const std::string& what)
        : std::runtime_error("trace line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct ReplayResult {
    IngestStats stats;
    std::vector<ApplianceCommand> commands;
};

// Offline equivalent of serving one connection: feeds every trace line
// through a Connection and fails on the first rejected line.
inline ReplayResult replay(std::istream& trace, Engine& engine) {
    Connection conn(engine);
    ReplayResult out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(trace, line)) {
        ++lineno;
        for (auto& reply : conn.process(line)) {
            if (auto* f = std::get_if<Connection::Failure>(&reply)) throw TraceError(lineno, f->message);
            if (auto* a = std::get_if<wire::Ack>(&reply); a && !a->accepted) throw TraceError(lineno, a->error);
            if (auto* c = std::get_if<ApplianceCommand>(&reply)) out.commands.push_back(std::move(*c));
        }
    }
    out.stats = engine.stats();
    return out;
}

}  // namespace homectx
