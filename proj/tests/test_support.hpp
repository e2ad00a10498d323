#pragma once

// Random generators and fixture helpers shared by the test suites.

#include <random>
#include <string>
#include <vector>

#include "homectx/homectx.hpp"

namespace homectx::testing {

inline std::string fixture_path() { return std::string(HOMECTX_DATA_DIR) + "/home_fixture.ttl"; }
inline std::string appliance_query_path() { return std::string(HOMECTX_DATA_DIR) + "/appliance_query.rq"; }

inline TripleStore fixture_store() { return TripleStore(load_data_file(fixture_path())); }

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::mt19937_64& rng() { return rng_; }

    std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[below(v.size())];
    }

    // IRIs from a small vocabulary so random patterns actually hit.
    Term iri(std::size_t vocabulary = 6) {
        static const std::vector<std::string> kNamespaces{std::string(kHomeNamespace), "http://other.example/ns/",
                                                          "urn:x-test:"};
        const std::size_t i = below(vocabulary);
        const std::string& ns = kNamespaces[i % kNamespaces.size()];
        return Term::iri(ns + (i % 2 ? "Item" : "item-") + std::to_string(i));
    }

    Term literal() {
        switch (below(6)) {
            case 0: return Term::boolean(coin());
            case 1: return Term::number(static_cast<double>(below(5)) * (coin() ? 1.5 : 1));
            case 2: return Term::literal(std::to_string(1 + below(9)), Datatype::kPositiveInteger);
            case 3: {
                static const std::vector<std::string> kStrings{"John", "Tom", "a \"quoted\" word", "back\\slash",
                                                               "tab\there", "line\nbreak", ""};
                return Term::string(pick(kStrings));
            }
            case 4: return Term::literal("2007-04-1" + std::to_string(below(3)), Datatype::kDate);
            default: return Term::literal("1" + std::to_string(below(4)) + ":00:00", Datatype::kTime);
        }
    }

    Term object() { return coin() ? iri() : literal(); }

    Triple triple() { return Triple(iri(), iri(4), object()); }

    std::vector<Triple> triples(std::size_t max_count) {
        std::vector<Triple> out;
        const std::size_t n = below(max_count + 1);
        for (std::size_t i = 0; i < n; ++i) out.push_back(triple());
        return out;
    }

    EnvironmentReading reading() {
        static const std::vector<std::string> kPeople{"Father", "Son", "Mother", "Guest-1"};
        EnvironmentReading r;
        r.stream = coin() ? "" : "s" + std::to_string(below(12));
        r.humidity = real(0, 100);
        r.temperature = real(-30, 45);
        r.illumination = coin(0.1) ? 0.0 : real(0, 5000);
        r.date = Date{1990 + static_cast<int>(below(40)), 1 + static_cast<int>(below(12)),
                      1 + static_cast<int>(below(28))};
        r.time = TimeOfDay::from_seconds(static_cast<int>(below(86400)));
        for (const auto& p : kPeople)
            if (coin(0.3)) r.persons_present.insert(Term::home(p));
        return r;
    }

private:
    std::mt19937_64 rng_;
};

}  // namespace homectx::testing
