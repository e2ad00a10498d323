#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "homectx/error.hpp"
#include "homectx/ontology.hpp"

namespace homectx {

enum class Factor { kTemperature, kIllumination, kHumidity, kPresence, kDate };

inline std::string_view factor_name(Factor f) {
    switch (f) {
        case Factor::kTemperature: return "temperature";
        case Factor::kIllumination: return "illumination";
        case Factor::kHumidity: return "humidity";
        case Factor::kPresence: return "presence";
        case Factor::kDate: return "date";
    }
    return "?";
}

inline std::optional<Factor> factor_from_name(std::string_view s) {
    for (Factor f : {Factor::kTemperature, Factor::kIllumination, Factor::kHumidity, Factor::kPresence,
                     Factor::kDate})
        if (factor_name(f) == s) return f;
    return std::nullopt;
}

inline bool is_numeric_factor(Factor f) {
    return f == Factor::kTemperature || f == Factor::kIllumination || f == Factor::kHumidity;
}

// A numeric factor is significant when its relative change exceeds
// `threshold`; a categorical one when it changes at all.
struct FactorSpec {
    enum class Kind { kNumeric, kCategorical };

    Factor factor = Factor::kTemperature;
    Kind kind = Kind::kNumeric;
    double threshold = 0;

    static FactorSpec numeric(Factor f, double threshold) { return {f, Kind::kNumeric, threshold}; }
    static FactorSpec categorical(Factor f) { return {f, Kind::kCategorical, 0}; }

    bool is_categorical() const { return kind == Kind::kCategorical; }
};

struct DedupConfig {
    std::vector<FactorSpec> factors{
        FactorSpec::numeric(Factor::kTemperature, 0.1),
        FactorSpec::numeric(Factor::kIllumination, 0.5),
        FactorSpec::numeric(Factor::kHumidity, 0.35),
        FactorSpec::categorical(Factor::kPresence),
        FactorSpec::categorical(Factor::kDate),
    };
    double epsilon = 1e-9;

    void validate() const {
        if (factors.empty()) throw ConfigError("at least one factor is required");
        if (!(epsilon > 0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be positive and finite");
        std::vector<Factor> seen;
        for (const FactorSpec& f : factors) {
            if (std::find(seen.begin(), seen.end(), f.factor) != seen.end())
                throw ConfigError("duplicate factor " + std::string(factor_name(f.factor)));
            seen.push_back(f.factor);
            if (!f.is_categorical() && (!std::isfinite(f.threshold) || f.threshold < 0))
                throw ConfigError("threshold for " + std::string(factor_name(f.factor)) +
                                  " must be finite and >= 0");
            if (!f.is_categorical() && !is_numeric_factor(f.factor))
                throw ConfigError(std::string(factor_name(f.factor)) + " is categorical only");
        }
    }

    const FactorSpec* find(Factor f) const {
        for (const FactorSpec& s : factors)
            if (s.factor == f) return &s;
        return nullptr;
    }
};

// Parses `name = value` lines (value: a threshold or "categorical"), `#`
// comments allowed. Unlisted factors keep their default thresholds.
inline DedupConfig parse_dedup_config(std::string_view text) {
    DedupConfig cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = "thresholds line " + std::to_string(lineno) + ": ";
        if (eq == std::string::npos) throw ConfigError(where + "expected 'name = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "epsilon") {
            try {
                std::size_t used = 0;
                cfg.epsilon = std::stod(value, &used);
                if (used != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                throw ConfigError(where + "bad epsilon '" + value + "'");
            }
            continue;
        }
        auto factor = factor_from_name(key);
        if (!factor) throw ConfigError(where + "unknown factor '" + key + "'");
        FactorSpec spec = FactorSpec::categorical(*factor);
        if (value != "categorical") {
            try {
                std::size_t used = 0;
                spec = FactorSpec::numeric(*factor, std::stod(value, &used));
                if (used != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                throw ConfigError(where + "bad threshold '" + value + "'");
            }
        }
        auto it = std::find_if(cfg.factors.begin(), cfg.factors.end(),
                               [&](const FactorSpec& f) { return f.factor == *factor; });
        if (it == cfg.factors.end())
            cfg.factors.push_back(spec);
        else
            *it = spec;
    }
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("thresholds: ") + e.what());
    }
    return cfg;
}

inline DedupConfig load_dedup_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open thresholds file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_dedup_config(buf.str());
}

// Per-factor change |curr - prev| / max(|prev|, epsilon); 0 or 1 when the
// factor is configured categorical.
inline double normalized_delta(double prev, double curr, const FactorSpec& spec, double epsilon) {
    if (!std::isfinite(prev) || !std::isfinite(curr))
        throw std::domain_error("non-finite value for " + std::string(factor_name(spec.factor)));
    if (spec.is_categorical()) return prev == curr ? 0.0 : 1.0;
    return std::abs(curr - prev) / std::max(std::abs(prev), epsilon);
}

// Categorical factors (presence set, date): 0 when equal, 1 otherwise.
template <std::equality_comparable T>
    requires(!std::floating_point<T>)
double normalized_delta(const T& prev, const T& curr, const FactorSpec& /*spec*/) {
    return prev == curr ? 0.0 : 1.0;
}

struct FactorDelta {
    Factor factor = Factor::kTemperature;
    double d = 0;
    bool exceeded = false;
};

struct DedupDecision {
    bool store = true;
    double distance = 0;
    std::vector<FactorDelta> deltas;
    std::optional<Term> reference;  // id of the baseline compared against
};

inline std::vector<FactorDelta> factor_deltas(const EnvironmentReading& prev, const EnvironmentReading& curr,
                                              const DedupConfig& cfg) {
    std::vector<FactorDelta> out;
    out.reserve(cfg.factors.size());
    for (const FactorSpec& spec : cfg.factors) {
        double d = 0;
        switch (spec.factor) {
            case Factor::kTemperature:
                d = normalized_delta(prev.temperature, curr.temperature, spec, cfg.epsilon);
                break;
            case Factor::kIllumination:
                d = normalized_delta(prev.illumination, curr.illumination, spec, cfg.epsilon);
                break;
            case Factor::kHumidity:
                d = normalized_delta(prev.humidity, curr.humidity, spec, cfg.epsilon);
                break;
            case Factor::kPresence:
                d = normalized_delta(prev.persons_present, curr.persons_present, spec);
                break;
            case Factor::kDate:
                d = normalized_delta(prev.date, curr.date, spec);
                break;
        }
        const bool exceeded = spec.is_categorical() ? d == 1.0 : d > spec.threshold;
        out.push_back({spec.factor, d, exceeded});
    }
    return out;
}

// Euclidean aggregate of the normalized per-factor changes. Numeric changes
// are relative to `prev`, so the distance is baseline-relative, not symmetric.
inline double distance(const EnvironmentReading& prev, const EnvironmentReading& curr, const DedupConfig& cfg) {
    double sum = 0;
    for (const FactorDelta& f : factor_deltas(prev, curr, cfg)) sum += f.d * f.d;
    return std::sqrt(sum);
}

// Store when there is no baseline or any factor exceeds its threshold. The
// aggregate distance is reported but does not decide.
inline DedupDecision should_store(const std::optional<EnvironmentReading>& baseline, const EnvironmentReading& curr,
                                  const DedupConfig& cfg) {
    DedupDecision out;
    if (!baseline) return out;
    out.reference = baseline->id();
    out.deltas = factor_deltas(*baseline, curr, cfg);
    double sum = 0;
    out.store = false;
    for (const FactorDelta& f : out.deltas) {
        sum += f.d * f.d;
        out.store = out.store || f.exceeded;
    }
    out.distance = std::sqrt(sum);
    return out;
}

// Streaming filter holding one baseline (the last stored reading) per stream.
class DedupFilter {
public:
    explicit DedupFilter(DedupConfig cfg = {}) : cfg_(std::move(cfg)) { cfg_.validate(); }

    const DedupConfig& config() const { return cfg_; }

    const EnvironmentReading* baseline(const std::string& stream) const {
        auto it = baselines_.find(stream);
        return it == baselines_.end() ? nullptr : &it->second;
    }

    // Throws OrderError, leaving state untouched, if `r` is older than the
    // latest reading seen on its stream.
    DedupDecision offer(const EnvironmentReading& r) {
        auto last = latest_.find(r.stream);
        if (last != latest_.end() && r.timestamp() < last->second)
            throw OrderError("reading at " + r.date.lexical() + " " + r.time.compact() +
                             " is older than the previous reading on stream '" + r.stream + "'");
        auto base = baselines_.find(r.stream);
        DedupDecision d = should_store(base == baselines_.end() ? std::nullopt
                                                                : std::optional<EnvironmentReading>(base->second),
                                       r, cfg_);
        latest_[r.stream] = r.timestamp();
        if (d.store) baselines_[r.stream] = r;
        return d;
    }

private:
    DedupConfig cfg_;
    std::map<std::string, EnvironmentReading> baselines_;
    std::map<std::string, std::pair<Date, TimeOfDay>> latest_;
};

struct FilterStats {
    std::size_t input_count = 0;
    std::size_t stored_count = 0;
    double reduction_factor = 0;
};

struct FilterResult {
    std::vector<EnvironmentReading> stored;
    FilterStats stats;
};

inline double reduction_factor(std::size_t input, std::size_t stored) {
    return static_cast<double>(input) / static_cast<double>(std::max<std::size_t>(stored, 1));
}

// Batch form of DedupFilter: per-stream baselines, order enforced per stream.
inline FilterResult filter_stream(const std::vector<EnvironmentReading>& readings, const DedupConfig& cfg) {
    DedupFilter filter(cfg);
    FilterResult out;
    for (std::size_t i = 0; i < readings.size(); ++i) {
        try {
            if (filter.offer(readings[i]).store) out.stored.push_back(readings[i]);
        } catch (const OrderError& e) {
            throw OrderError("reading " + std::to_string(i) + ": " + e.what());
        }
    }
    out.stats.input_count = readings.size();
    out.stats.stored_count = out.stored.size();
    out.stats.reduction_factor = reduction_factor(out.stats.input_count, out.stats.stored_count);
    return out;
}

}  // namespace homectx
