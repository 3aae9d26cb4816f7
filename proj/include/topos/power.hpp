#ifndef TOPOS_POWER_HPP
#define TOPOS_POWER_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "topos/presheaf.hpp"

namespace topos {

// Element of the power object PX at a stage: a restriction-closed family of
// fiber subsets over the stages below `at`. Entries above `at` are unused.
struct RelSub {
    const Presheaf* of = nullptr;
    int at = -1;
    std::vector<Bits> members;

    bool operator==(const RelSub& o) const { return at == o.at && members == o.members; }

    // canonical comparison key: member sets by ascending stage index
    bool operator<(const RelSub& o) const;
};

ValidationReport relsub_validate(const RelSub& s);
RelSub relsub_create(const Presheaf& of, int at, std::vector<Bits> members);  // validates
RelSub relsub_full(const Presheaf& of, int at);
RelSub relsub_empty(const Presheaf& of, int at);
RelSub relsub_restrict(const RelSub& s, int d);  // truncation to stages <= d

// member-wise containment over all stages below the common stage
bool px_leq(const RelSub& s, const RelSub& t);  // throws StageMismatch

RelSub px_meet(const RelSub& s, const RelSub& t);
RelSub px_join(const RelSub& s, const RelSub& t);

// { d <= c : a.d in s.members(d) }
Sieve membership(int a, const RelSub& s);

// Internal relation on a presheaf: a per-stage adjacency table that must be a
// subobject of X*X (closed under restriction). Reflexivity, transitivity and
// symmetry are reported per stage, not assumed.
struct InternalRelation {
    const Presheaf* on = nullptr;
    std::vector<std::vector<Bits>> adj;  // adj[c][a] = { b : (a, b) in graph(c) }

    bool related(int c, int a, int b) const { return adj[c][a].test(b); }
};

ValidationReport relation_validate(const InternalRelation& r);
InternalRelation relation_create(const Presheaf& on,
                                 std::vector<std::vector<Bits>> adj);  // throws InvalidRelation
InternalRelation diagonal_relation(const Presheaf& x);
InternalRelation relation_from_sub(const SubPresheaf& graph, const Product& xx);
SubPresheaf relation_to_sub(const InternalRelation& r, const Product& xx);

struct RelationFlags {
    std::vector<bool> reflexive, transitive, symmetric;  // per stage
    bool all_reflexive = false, all_transitive = false, all_symmetric = false;
    bool preorder() const { return all_reflexive && all_transitive; }
    bool equivalence() const { return preorder() && all_symmetric; }
    // first transitivity counterexample, if any: (stage, a, b, c)
    std::optional<std::array<int, 4>> transitivity_witness;
};

RelationFlags relation_flags(const InternalRelation& r);

// segment families: members(d) = { a : (a, b.d) in graph(d) } resp. (b.d, a)
RelSub downarrow(const InternalRelation& r, int c, int b);
RelSub uparrow(const InternalRelation& r, int c, int b);

// members(d) = { a : f_d(a) in t.members(d) }
RelSub inverse_image(const NatTrans& f, const RelSub& t);
// members(d) = { f_d(a) : a in s.members(d) }
RelSub direct_image(const NatTrans& f, const RelSub& s);

// name of a proposition X -> Omega: the compatible family whose stage-c entry
// collects the elements forced below c
std::vector<RelSub> name_of(const NatTrans& phi, const Omega& om);

struct PowerEnum {
    std::vector<RelSub> elements;  // canonical order
    bool truncated = false;
};

// All of PX(c), canonically ordered; stops with truncated=true past `limit`
// (limit <= 0 means unbounded).
PowerEnum power_elements(const Presheaf& x, int c, long limit = 0);

// PX materialized as a presheaf (fibers = enumerations, restriction =
// truncation). Throws BudgetExceeded if any stage passes the limit.
struct PowerPresheaf {
    Presheaf ps;
    const Presheaf* of = nullptr;
    std::vector<std::vector<RelSub>> elems;

    int index_of(int c, const RelSub& s) const;  // -1 if absent
};

PowerPresheaf materialize_power(const Presheaf& x, long limit);

// segment arrows packaged as morphisms into the materialized power object
NatTrans downarrow_map(const InternalRelation& r, const PowerPresheaf& px);
NatTrans uparrow_map(const InternalRelation& r, const PowerPresheaf& px);

// least upper bound of a stage-indexed family: T is a RelSub over px.ps, and
// the result collects pointwise unions of the members it names
RelSub join_family(const PowerPresheaf& px, const RelSub& T);

// quantifiers along the projection dropping Y; gy is the product Gamma x Y
SubPresheaf internal_forall(const Product& gy, const SubPresheaf& phi);
SubPresheaf internal_exists(const Product& gy, const SubPresheaf& phi);

}  // namespace topos

#endif
