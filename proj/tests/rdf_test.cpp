#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace homectx {
namespace {

using testing::Gen;

const Term kFather = Term::home("Father");
const Term kSon = Term::home("Son");
const Term kHasPriority = Term::home("hasPriority");

Term priority(const char* v) { return Term::literal(v, Datatype::kPositiveInteger); }

TEST(Term, LiteralValidationPerDatatype) {
    EXPECT_NO_THROW(Term::literal("true", Datatype::kBoolean));
    EXPECT_THROW(Term::literal("True", Datatype::kBoolean), std::invalid_argument);
    EXPECT_NO_THROW(Term::literal("2007-04-11", Datatype::kDate));
    EXPECT_THROW(Term::literal("2007-02-30", Datatype::kDate), std::invalid_argument);
    EXPECT_THROW(Term::literal("07-04-11", Datatype::kDate), std::invalid_argument);
    EXPECT_NO_THROW(Term::literal("30", Datatype::kDouble));
    EXPECT_NO_THROW(Term::literal("-1.5e3", Datatype::kDouble));
    EXPECT_THROW(Term::literal("abc", Datatype::kDouble), std::invalid_argument);
    EXPECT_THROW(Term::literal("1e", Datatype::kDouble), std::invalid_argument);
    EXPECT_NO_THROW(Term::literal("8", Datatype::kPositiveInteger));
    EXPECT_THROW(Term::literal("0", Datatype::kPositiveInteger), std::invalid_argument);
    EXPECT_THROW(Term::literal("-3", Datatype::kPositiveInteger), std::invalid_argument);
    EXPECT_NO_THROW(Term::literal("18:00:00", Datatype::kTime));
    EXPECT_THROW(Term::literal("24:00:00", Datatype::kTime), std::invalid_argument);
}

TEST(Term, StructuralEqualityAndOrder) {
    EXPECT_EQ(Term::home("TV"), Term::iri(std::string(kHomeNamespace) + "TV"));
    EXPECT_NE(Term::literal("5", Datatype::kPositiveInteger), Term::literal("5", Datatype::kDouble));
    EXPECT_NE(Term::string("x"), Term::home("x"));
    // IRIs before literals; literals by datatype IRI, then lexical form.
    EXPECT_LT(Term::home("zzz"), Term::boolean(false));
    EXPECT_LT(Term::boolean(true), Term::literal("2000-01-01", Datatype::kDate));
    EXPECT_LT(Term::literal("10", Datatype::kDouble), Term::literal("9", Datatype::kDouble));
}

TEST(Term, TripleRejectsLiteralSubjectOrPredicate) {
    EXPECT_THROW(Triple(Term::string("x"), kHasPriority, priority("1")), std::invalid_argument);
    EXPECT_THROW(Triple(kFather, Term::string("p"), priority("1")), std::invalid_argument);
}

TEST(TripleStore, InsertReportsNovelty) {
    TripleStore store;
    const Triple t(kFather, kHasPriority, priority("8"));
    EXPECT_TRUE(store.insert(t));
    EXPECT_FALSE(store.insert(t));
    EXPECT_EQ(store.size(), 1u);

    const auto found = store.match(TriplePattern{kFather, kHasPriority, Variable{"x"}});
    ASSERT_EQ(found.size(), 1u);
    EXPECT_EQ(found.front(), t);
}

TEST(TripleStore, MatchOverPersonFixture) {
    const TripleStore store = testing::fixture_store();
    const auto found = store.match(TriplePattern{Variable{"s"}, kHasPriority, Variable{"o"}});
    ASSERT_EQ(found.size(), 2u);
    EXPECT_EQ(found[0], Triple(kFather, kHasPriority, priority("8")));
    EXPECT_EQ(found[1], Triple(kSon, kHasPriority, priority("5")));

    EXPECT_TRUE(store.match(TriplePattern{kSon, kHasPriority, priority("8")}).empty());

    const auto all = store.match(TriplePattern{Variable{"s"}, Variable{"p"}, Variable{"o"}});
    EXPECT_EQ(all, store.triples());
    EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
}

TEST(TripleStore, RepeatedVariableMustAgree) {
    TripleStore store;
    store.insert(Triple(kFather, kFather, kFather));
    store.insert(Triple(kFather, kHasPriority, kSon));
    EXPECT_EQ(store.match(TriplePattern{Variable{"x"}, Variable{"x"}, Variable{"x"}}).size(), 1u);
    EXPECT_EQ(store.match(TriplePattern{Variable{"x"}, Variable{"p"}, Variable{"x"}}).size(), 1u);
    EXPECT_EQ(store.match(TriplePattern{Variable{"x"}, Variable{"p"}, Variable{"y"}}).size(), 2u);
}

TEST(TripleStore, CopyHasIndependentIndexes) {
    TripleStore a;
    a.insert(Triple(kFather, kHasPriority, priority("8")));
    TripleStore b = a;
    b.insert(Triple(kSon, kHasPriority, priority("5")));
    a = TripleStore{};
    EXPECT_EQ(b.match(std::nullopt, kHasPriority, std::nullopt).size(), 2u);
    TripleStore c = std::move(b);
    EXPECT_EQ(c.match(kSon, std::nullopt, std::nullopt).size(), 1u);
}

// Brute-force reference for match(): linear scan with per-position unification.
std::vector<Triple> scan(const std::vector<Triple>& triples, const TriplePattern& p) {
    std::set<Triple> out;
    for (const Triple& t : triples) {
        std::map<std::string, Term> b;
        bool ok = true;
        auto unify = [&](const PatternSlot& slot, const Term& v) {
            if (const Term* c = as_term(slot)) {
                ok = ok && *c == v;
            } else {
                auto [it, fresh] = b.emplace(std::get<Variable>(slot).name, v);
                ok = ok && (fresh || it->second == v);
            }
        };
        unify(p.subject, t.subject);
        unify(p.predicate, t.predicate);
        unify(p.object, t.object);
        if (ok) out.insert(t);
    }
    return {out.begin(), out.end()};
}

TEST(TripleStoreProperty, IndexAnswerEqualsLinearScan) {
    Gen gen(7);
    const std::vector<std::string> vars{"a", "b", "c"};
    for (int round = 0; round < 300; ++round) {
        const auto triples = gen.triples(200);
        const TripleStore store(triples);
        for (int q = 0; q < 20; ++q) {
            auto slot = [&](auto make_term) -> PatternSlot {
                if (gen.coin(0.45)) return Variable{gen.pick(vars)};
                if (!triples.empty() && gen.coin(0.6)) return make_term(gen.pick(triples));
                return make_term(gen.triple());
            };
            TriplePattern p{slot([](const Triple& t) { return t.subject; }),
                            slot([](const Triple& t) { return t.predicate; }),
                            slot([](const Triple& t) { return t.object; })};
            ASSERT_EQ(store.match(p), scan(triples, p)) << "round " << round;
        }
    }
}

TEST(TripleStoreProperty, SizeEqualsDistinctCount) {
    Gen gen(11);
    for (int round = 0; round < 100; ++round) {
        auto triples = gen.triples(200);
        // Force duplicates.
        const std::size_t n = triples.size();
        for (std::size_t i = 0; i < n / 3; ++i) triples.push_back(triples[gen.below(n)]);
        TripleStore store;
        std::size_t inserted = 0;
        for (const auto& t : triples) inserted += store.insert(t) ? 1 : 0;
        const std::set<Triple> distinct(triples.begin(), triples.end());
        EXPECT_EQ(store.size(), distinct.size());
        EXPECT_EQ(inserted, distinct.size());
    }
}

TEST(TripleStoreProperty, OutputIndependentOfInsertionOrder) {
    Gen gen(3);
    for (int round = 0; round < 50; ++round) {
        auto triples = gen.triples(120);
        const TripleStore a(triples);
        std::shuffle(triples.begin(), triples.end(), gen.rng());
        const TripleStore b(triples);
        EXPECT_EQ(a.triples(), b.triples());
        EXPECT_EQ(serialize(a), serialize(b));
        const TriplePattern p{Variable{"s"}, gen.iri(4), Variable{"o"}};
        EXPECT_EQ(a.match(p), b.match(p));
    }
}

}  // namespace
}  // namespace homectx
