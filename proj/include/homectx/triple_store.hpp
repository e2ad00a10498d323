#pragma once

#include <algorithm>
#include <concepts>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "homectx/term.hpp"

namespace homectx {

// Query variable, written `?name`. The stored name excludes the sigil.
struct Variable {
    std::string name;

    friend auto operator<=>(const Variable&, const Variable&) = default;
    friend bool operator==(const Variable&, const Variable&) = default;
};

using PatternSlot = std::variant<Term, Variable>;

// A triple whose positions may be variables. Predicate variables are allowed.
struct TriplePattern {
    PatternSlot subject;
    PatternSlot predicate;
    PatternSlot object;

    friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

inline const Variable* as_variable(const PatternSlot& slot) { return std::get_if<Variable>(&slot); }
inline const Term* as_term(const PatternSlot& slot) { return std::get_if<Term>(&slot); }

// In-memory triple set with (S), (P), (O), (S,P) and (P,O) indexes.
//
// Every index bucket is kept in canonical triple order, so lookups return
// sorted results without a post-sort. Reads are const and may run
// concurrently; any insert requires exclusive access.
class TripleStore {
public:
    TripleStore() = default;
    TripleStore(const TripleStore& other) { insert_all(other.triples_); }
    TripleStore& operator=(const TripleStore& other) {
        if (this != &other) {
            TripleStore copy(other);
            *this = std::move(copy);
        }
        return *this;
    }
    // Node-based set: element addresses survive a move, so the indexes stay valid.
    TripleStore(TripleStore&&) noexcept = default;
    TripleStore& operator=(TripleStore&&) noexcept = default;

    template <typename Range>
        requires(!std::same_as<Range, TripleStore>)
    explicit TripleStore(const Range& triples) {
        insert_all(triples);
    }

    // Returns true iff the triple was not present before.
    bool insert(const Triple& t) {
        auto [it, inserted] = triples_.insert(t);
        if (!inserted) return false;
        const Triple* p = &*it;
        add(by_s_[t.subject], p);
        add(by_p_[t.predicate], p);
        add(by_o_[t.object], p);
        add(by_sp_[{t.subject, t.predicate}], p);
        add(by_po_[{t.predicate, t.object}], p);
        return true;
    }

    template <typename Range>
    std::size_t insert_all(const Range& triples) {
        std::size_t n = 0;
        for (const auto& t : triples) n += insert(t) ? 1 : 0;
        return n;
    }

    bool contains(const Triple& t) const { return triples_.contains(t); }
    std::size_t size() const noexcept { return triples_.size(); }
    bool empty() const noexcept { return triples_.empty(); }

    // Canonical (subject, predicate, object) order.
    auto begin() const { return triples_.begin(); }
    auto end() const { return triples_.end(); }

    std::vector<Triple> triples() const { return {triples_.begin(), triples_.end()}; }

    // Lookup with each position either fixed or a wildcard.
    std::vector<Triple> match(const std::optional<Term>& s, const std::optional<Term>& p,
                              const std::optional<Term>& o) const {
        std::vector<Triple> out;
        if (s && p && o) {
            if (s->is_iri() && p->is_iri()) {
                Triple t(*s, *p, *o);
                if (triples_.contains(t)) out.push_back(std::move(t));
            }
            return out;
        }
        auto filter = [&](const Bucket* bucket) {
            if (!bucket) return;
            for (const Triple* t : *bucket)
                if ((!s || t->subject == *s) && (!p || t->predicate == *p) && (!o || t->object == *o))
                    out.push_back(*t);
        };
        if (s && p) {
            filter(find(by_sp_, std::pair{*s, *p}));
        } else if (p && o) {
            filter(find(by_po_, std::pair{*p, *o}));
        } else if (s) {
            filter(find(by_s_, *s));
        } else if (o) {
            filter(find(by_o_, *o));
        } else if (p) {
            filter(find(by_p_, *p));
        } else {
            out.assign(triples_.begin(), triples_.end());
        }
        return out;
    }

    // Triples unifying with the pattern. A variable repeated across positions
    // must bind the same term in each of them.
    std::vector<Triple> match(const TriplePattern& pattern) const {
        auto fixed = [](const PatternSlot& slot) -> std::optional<Term> {
            if (const Term* t = as_term(slot)) return *t;
            return std::nullopt;
        };
        auto out = match(fixed(pattern.subject), fixed(pattern.predicate), fixed(pattern.object));
        const Variable* vs = as_variable(pattern.subject);
        const Variable* vp = as_variable(pattern.predicate);
        const Variable* vo = as_variable(pattern.object);
        const bool sp = vs && vp && *vs == *vp;
        const bool so = vs && vo && *vs == *vo;
        const bool po = vp && vo && *vp == *vo;
        if (sp || so || po) {
            std::erase_if(out, [&](const Triple& t) {
                return (sp && t.subject != t.predicate) || (so && t.subject != t.object) ||
                       (po && t.predicate != t.object);
            });
        }
        return out;
    }

private:
    using Bucket = std::vector<const Triple*>;

    static void add(Bucket& bucket, const Triple* t) {
        auto pos = std::lower_bound(bucket.begin(), bucket.end(), t,
                                    [](const Triple* a, const Triple* b) { return *a < *b; });
        bucket.insert(pos, t);
    }

    template <typename Map, typename Key>
    static const Bucket* find(const Map& index, const Key& key) {
        auto it = index.find(key);
        return it == index.end() ? nullptr : &it->second;
    }

    std::set<Triple> triples_;
    std::map<Term, Bucket> by_s_;
    std::map<Term, Bucket> by_p_;
    std::map<Term, Bucket> by_o_;
    std::map<std::pair<Term, Term>, Bucket> by_sp_;
    std::map<std::pair<Term, Term>, Bucket> by_po_;
};

}  // namespace homectx
