#ifndef TOPOS_PRESHEAF_HPP
#define TOPOS_PRESHEAF_HPP

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "topos/order.hpp"

namespace topos {

struct ValidationIssue {
    std::string where;
    std::string what;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    void add(std::string where, std::string what) { issues.push_back({std::move(where), std::move(what)}); }
    std::string to_string() const;
};

// Raw construction data. Restriction maps may be given on any comparable
// pair (c, d) with d <= c; missing pairs are completed by composing along
// covers before validation, so the usual input is one map per Hasse cover.
struct PresheafData {
    const FinPoset* base = nullptr;
    std::string label;
    std::vector<std::vector<std::string>> fibers;
    std::map<std::pair<int, int>, std::vector<int>> maps;  // (c, d) -> fiber(c) -> fiber(d)
};

// Finite presheaf on a FinPoset: per-object carriers with restriction maps,
// functoriality validated eagerly so downstream code may assume it.
class Presheaf {
public:
    Presheaf() = default;  // empty shell; real instances come from create()

    static ValidationReport validate(const PresheafData& data);
    static Presheaf create(PresheafData data);  // throws InvalidPresheaf

    const FinPoset& base() const { return *base_; }
    const std::string& label() const { return label_; }

    int fiber_size(int c) const { return int(elems_[c].size()); }
    const std::string& elem_name(int c, int a) const { return elems_[c][a]; }
    int elem_index(int c, const std::string& name) const;  // throws UnknownElement
    int elem_find(int c, const std::string& name) const;   // -1 if absent

    // a . (d <= c) for a in X(c)
    int restricted(int c, int a, int d) const { return maps_[c][d][a]; }

private:
    const FinPoset* base_ = nullptr;
    std::string label_;
    std::vector<std::vector<std::string>> elems_;
    std::vector<std::vector<std::vector<int>>> maps_;  // maps_[c][d], valid iff d <= c
};

// Constant one-point presheaf.
Presheaf terminal_presheaf(const FinPoset& p);

// Representable presheaf of c: one point at every d <= c, empty elsewhere.
Presheaf yoneda(const FinPoset& p, int c);

struct NatTrans {
    const Presheaf* src = nullptr;
    const Presheaf* dst = nullptr;
    std::vector<std::vector<int>> comp;  // comp[c][a] in dst fiber at c

    static ValidationReport validate(const NatTrans& t);
    static NatTrans create(const Presheaf& src, const Presheaf& dst,
                           std::vector<std::vector<int>> comp);  // throws NotNatural

    int apply(int c, int a) const { return comp[c][a]; }
    bool operator==(const NatTrans& o) const { return comp == o.comp; }
};

NatTrans identity_nat(const Presheaf& x);
NatTrans compose(const NatTrans& g, const NatTrans& f);  // g after f
NatTrans to_terminal(const Presheaf& x, const Presheaf& one);

// Pointwise subsets closed under restriction.
struct SubPresheaf {
    const Presheaf* of = nullptr;
    std::vector<Bits> members;

    static ValidationReport validate(const SubPresheaf& s);
    static SubPresheaf create(const Presheaf& of, std::vector<Bits> members);  // throws InvalidSubobject
    static SubPresheaf full(const Presheaf& of);
    static SubPresheaf none(const Presheaf& of);

    bool contains(int c, int a) const { return members[c].test(a); }
    bool operator==(const SubPresheaf& o) const { return members == o.members; }
};

bool sub_leq(const SubPresheaf& a, const SubPresheaf& b);
SubPresheaf heyting_sub(HeytingOp op, const SubPresheaf& a, const SubPresheaf& b);
SubPresheaf sub_meet(const SubPresheaf& a, const SubPresheaf& b);
SubPresheaf sub_join(const SubPresheaf& a, const SubPresheaf& b);
SubPresheaf sub_implies(const SubPresheaf& a, const SubPresheaf& b);
SubPresheaf sub_neg(const SubPresheaf& a);

// The subobject classifier: carrier at c is the full sieve list on c.
struct Omega {
    Presheaf ps;
    std::vector<std::vector<Sieve>> sieves;  // canonical order, matching ps fibers

    const Sieve& sieve(int c, int k) const { return sieves[c][k]; }
    int index_of(int c, const Bits& members) const;
};

Omega omega(const FinPoset& p);

// Finite products with pairing/projection helpers. Factors must outlive the
// product; fibers are tuples in mixed-radix order (first factor most
// significant).
struct Product {
    Presheaf ps;
    std::vector<const Presheaf*> factors;

    int encode(int c, const std::vector<int>& tuple) const;
    std::vector<int> decode(int c, int t) const;
    NatTrans projection(int k) const;
};

Product product(std::vector<const Presheaf*> factors, std::string label);
Product product(const Presheaf& x, const Presheaf& y);
// allows an empty factor list (the terminal presheaf)
Product product_over(const FinPoset& base, std::vector<const Presheaf*> factors, std::string label);

NatTrans pairing(const NatTrans& f, const NatTrans& g, const Product& xy);

// chi_c(a) = { d <= c : a.d in members(d) }
NatTrans classify(const SubPresheaf& s, const Omega& om);
// members(c) = { a : chi_c(a) total }; mutually inverse with classify
SubPresheaf subobject_of(const NatTrans& chi, const Omega& om);

// (a = b) at c = { d <= c : a.d == b.d }, as a map X*X -> Omega
NatTrans equality_predicate(const Product& xx, const Omega& om);
SubPresheaf diagonal_sub(const Product& xx);

// pairs identified by tau, as a subobject of X*X
SubPresheaf kernel_relation(const NatTrans& tau, const Product& xx);

struct Forcing {
    bool forced = false;
    Sieve value;
};

Forcing forces(const NatTrans& phi, const Omega& om, int c, int a);

}  // namespace topos

#endif
