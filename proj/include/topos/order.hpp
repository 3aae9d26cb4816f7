#ifndef TOPOS_ORDER_HPP
#define TOPOS_ORDER_HPP

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "topos/bits.hpp"
#include "topos/error.hpp"

namespace topos {

// Finite poset stored as a full reflexive-transitive boolean matrix, built
// from Hasse covers. Object order is declaration order; every enumeration
// downstream follows it. A preorder mode (antisymmetry unchecked) exists only
// for the Set-level Alexandrov operators; presheaf bases are always genuine
// posets.
class FinPoset {
public:
    static FinPoset from_covers(const std::vector<std::string>& objects,
                                const std::vector<std::pair<std::string, std::string>>& covers,
                                bool allow_preorder = false);

    int size() const { return int(names_.size()); }
    bool leq(int a, int b) const { return leq_[a].test(b); }
    bool preorder_mode() const { return preorder_; }

    const std::string& name(int i) const { return names_[i]; }
    int index(const std::string& name) const;       // throws UnknownObject
    int find(const std::string& name) const;        // -1 if absent

    // { d : d <= c }, in canonical order
    std::vector<int> downset(int c) const;
    Bits downset_bits(int c) const { return down_[c]; }
    std::vector<int> upset(int c) const;

    std::vector<int> maximal_elements() const;

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
    std::vector<Bits> leq_;   // leq_[a].test(b)  <=>  a <= b
    std::vector<Bits> down_;  // down_[c].test(d) <=>  d <= c
    bool preorder_ = false;
};

// Down-closed subset of the principal downset of `base`: a truth value at
// that stage.
struct Sieve {
    int base = -1;
    Bits members;

    bool operator==(const Sieve&) const = default;
};

bool sieve_is_total(const FinPoset& p, const Sieve& s);
Sieve sieve_total(const FinPoset& p, int base);
Sieve sieve_empty(const FinPoset& p, int base);

// All sieves on c, canonically ordered (ascending by member set).
std::vector<Sieve> sieves_on(const FinPoset& p, int c);

// Omega's restriction action: intersect with the principal downset of d.
Sieve sieve_pullback(const FinPoset& p, const Sieve& s, int d);

enum class HeytingOp { Meet, Join, Implies, Neg };

Sieve sieve_meet(const FinPoset& p, const Sieve& a, const Sieve& b);
Sieve sieve_join(const FinPoset& p, const Sieve& a, const Sieve& b);
Sieve sieve_implies(const FinPoset& p, const Sieve& a, const Sieve& b);
Sieve sieve_neg(const FinPoset& p, const Sieve& a);
Sieve sieve_heyting(const FinPoset& p, HeytingOp op, const Sieve& a, const Sieve* b = nullptr);

// Set-level Alexandrov operators on a (pre)ordered carrier:
//   interior(S) = { s : s <= x implies x in S }
//   closure(S)  = { s : s <= x for some x in S }
Bits alexandrov_interior(const FinPoset& p, const Bits& s);
Bits alexandrov_closure(const FinPoset& p, const Bits& s);

}  // namespace topos

#endif
