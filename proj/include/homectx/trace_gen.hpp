#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "homectx/dedup.hpp"
#include "homectx/error.hpp"
#include "homectx/ingest.hpp"
#include "homectx/ontology.hpp"

namespace homectx {

// Synthetic sensor workload: `streams` sensors each reporting `rate` times a
// second for `duration` seconds. Numeric values sit at a per-stream level with
// relative noise level*(1+U[0,noise]); noise below the threshold keeps every
// such reading a duplicate. Injected events are persistent level steps (or
// presence toggles) that exceed their factor's threshold against any
// noisy baseline, so replay stores exactly streams + events readings.
struct TraceParams {
    std::size_t streams = 10;
    std::size_t duration = 3600;  // seconds
    std::size_t rate = 1;         // readings per second per stream
    std::size_t events = 20;      // injected at random positions
    std::size_t drift_period = 0; // if > 0, every stream also steps each `drift_period` seconds
    double temperature_noise = 0.05;
    double humidity_noise = 0.1;
    double illumination_noise = 0.2;
    std::uint64_t seed = 42;
    Date date{2007, 4, 11};
    TimeOfDay start{8, 0, 0};
    DedupConfig thresholds;
};

struct InjectedEvent {
    std::size_t line = 0;  // 1-based line number in the trace
    std::string stream;
    Factor factor = Factor::kTemperature;
};

struct TraceManifest {
    std::size_t lines = 0;
    std::size_t streams = 0;
    std::vector<InjectedEvent> events;

    std::size_t expected_stored() const { return streams + events.size(); }

    std::string to_json() const {
        nlohmann::ordered_json j{{"lines", lines}, {"streams", streams}, {"expected_stored", expected_stored()}};
        auto ev = nlohmann::ordered_json::array();
        for (const auto& e : events)
            ev.push_back({{"line", e.line}, {"stream", e.stream}, {"factor", std::string(factor_name(e.factor))}});
        j["events"] = std::move(ev);
        return j.dump(2) + "\n";
    }
};

namespace detail {

inline constexpr double kBaseTemperature = 20.0;
inline constexpr double kBaseHumidity = 30.0;
inline constexpr double kBaseIllumination = 400.0;

// Step multiplier for a numeric factor so that a step in either direction
// beats the threshold even against the noisiest baseline.
struct StepPlan {
    double multiplier = 2.0;
    bool alternate = true;
};

inline StepPlan step_plan(const FactorSpec* spec, double noise) {
    if (!spec || spec->is_categorical()) return {2.0, true};
    const double thr = spec->threshold;
    if (thr >= 1.0) return {(1 + noise) * (1 + thr) * 1.1, false};
    return {(1 + noise) * (1 + thr) / (1 - thr) * 1.1, true};
}

inline double noise_for(const TraceParams& p, Factor f) {
    switch (f) {
        case Factor::kTemperature: return p.temperature_noise;
        case Factor::kHumidity: return p.humidity_noise;
        case Factor::kIllumination: return p.illumination_noise;
        default: return 0;
    }
}

}  // namespace detail

inline void validate(const TraceParams& p) {
    p.thresholds.validate();
    if (p.streams == 0 || p.duration == 0 || p.rate == 0)
        throw ConfigError("streams, duration and rate must be positive");
    if (!p.date.valid()) throw ConfigError("invalid trace date");
    if (!p.start.valid() || p.start.seconds_of_day() + p.duration > 86400)
        throw ConfigError("trace must not cross midnight (start + duration > 24 h)");
    for (Factor f : {Factor::kTemperature, Factor::kHumidity, Factor::kIllumination}) {
        const double a = detail::noise_for(p, f);
        const FactorSpec* spec = p.thresholds.find(f);
        const std::string name(factor_name(f));
        if (!std::isfinite(a) || a < 0) throw ConfigError(name + " noise must be finite and >= 0");
        if (spec && spec->is_categorical() && a != 0)
            throw ConfigError(name + " is categorical, its noise must be 0");
        if (spec && !spec->is_categorical() && !(a < spec->threshold))
            throw ConfigError(name + " noise must be strictly below its threshold");
    }
    const auto hum = detail::step_plan(p.thresholds.find(Factor::kHumidity), p.humidity_noise);
    if (detail::kBaseHumidity * hum.multiplier * (1 + p.humidity_noise) > 100 || !hum.alternate)
        throw ConfigError("humidity threshold/noise too large: stepped humidity would exceed 100%");
    const std::size_t ticks = p.duration * p.rate;
    const std::size_t drift_per_stream = p.drift_period ? (p.duration - 1) / p.drift_period : 0;
    const std::size_t eligible = (ticks - 1) * p.streams - drift_per_stream * p.streams;
    if (p.events > eligible) throw ConfigError("more events than eligible trace positions");
}

// Writes the trace (one reading per line) and returns the manifest of
// injected events. Deterministic for a given parameter set.
inline TraceManifest generate_trace(const TraceParams& p, std::ostream& out) {
    validate(p);
    std::mt19937_64 rng(p.seed);

    std::vector<Factor> pool;
    for (Factor f : {Factor::kTemperature, Factor::kHumidity, Factor::kIllumination, Factor::kPresence})
        if (p.thresholds.find(f)) pool.push_back(f);
    const bool need_events = p.events > 0 || (p.drift_period > 0 && p.duration - 1 >= p.drift_period);
    if (need_events && pool.empty()) throw ConfigError("no configured factor can carry an event");

    const std::size_t ticks = p.duration * p.rate;
    auto position = [&](std::size_t tick, std::size_t stream) { return tick * p.streams + stream; };

    // position -> factor
    std::map<std::size_t, Factor> events;
    std::uniform_int_distribution<std::size_t> pick(0, pool.empty() ? 0 : pool.size() - 1);
    if (p.drift_period > 0)
        for (std::size_t sec = p.drift_period; sec < p.duration; sec += p.drift_period)
            for (std::size_t s = 0; s < p.streams; ++s) events.emplace(position(sec * p.rate, s), pool[pick(rng)]);

    std::vector<std::size_t> eligible;
    eligible.reserve((ticks - 1) * p.streams);
    for (std::size_t pos = p.streams; pos < ticks * p.streams; ++pos)
        if (!events.contains(pos)) eligible.push_back(pos);
    std::vector<std::size_t> chosen;
    chosen.reserve(p.events);
    std::sample(eligible.begin(), eligible.end(), std::back_inserter(chosen), p.events, rng);
    for (std::size_t pos : chosen) events.emplace(pos, pool[pick(rng)]);

    struct Level {
        double value;
        detail::StepPlan plan;
        bool up = true;

        void step() {
            value = plan.alternate && !up ? value / plan.multiplier : value * plan.multiplier;
            if (plan.alternate) up = !up;
        }
    };
    struct StreamState {
        Level temperature, humidity, illumination;
        bool present = false;
    };
    std::vector<StreamState> states(p.streams);
    for (auto& s : states) {
        s.temperature = {detail::kBaseTemperature,
                         detail::step_plan(p.thresholds.find(Factor::kTemperature), p.temperature_noise)};
        s.humidity = {detail::kBaseHumidity, detail::step_plan(p.thresholds.find(Factor::kHumidity), p.humidity_noise)};
        s.illumination = {detail::kBaseIllumination,
                          detail::step_plan(p.thresholds.find(Factor::kIllumination), p.illumination_noise)};
    }

    auto noisy = [&](double level, double a) {
        std::uniform_real_distribution<double> u(0.0, a);
        return a > 0 ? level * (1 + u(rng)) : level;
    };

    TraceManifest manifest;
    manifest.streams = p.streams;
    for (std::size_t tick = 0; tick < ticks; ++tick) {
        const TimeOfDay time = TimeOfDay::from_seconds(p.start.seconds_of_day() + static_cast<int>(tick / p.rate));
        for (std::size_t s = 0; s < p.streams; ++s) {
            StreamState& st = states[s];
            const std::string stream = "s" + std::to_string(s + 1);
            if (auto ev = events.find(position(tick, s)); ev != events.end()) {
                switch (ev->second) {
                    case Factor::kTemperature: st.temperature.step(); break;
                    case Factor::kHumidity: st.humidity.step(); break;
                    case Factor::kIllumination: st.illumination.step(); break;
                    default: st.present = !st.present; break;
                }
                manifest.events.push_back({position(tick, s) + 1, stream, ev->second});
            }
            EnvironmentReading r;
            r.stream = stream;
            r.date = p.date;
            r.time = time;
            r.temperature = noisy(st.temperature.value, p.temperature_noise);
            r.humidity = noisy(st.humidity.value, p.humidity_noise);
            r.illumination = noisy(st.illumination.value, p.illumination_noise);
            if (st.present) r.persons_present.insert(Term::home("Father"));
            out << wire::encode(r) << '\n';
        }
    }
    manifest.lines = ticks * p.streams;
    return manifest;
}

}  // namespace homectx
