#include "topos/order.hpp"

#include <algorithm>

namespace topos {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::UnknownObject: return "UnknownObject";
        case ErrorKind::UnknownElement: return "UnknownElement";
        case ErrorKind::UnknownAtom: return "UnknownAtom";
        case ErrorKind::UnknownSort: return "UnknownSort";
        case ErrorKind::UnknownRelation: return "UnknownRelation";
        case ErrorKind::UnknownFormula: return "UnknownFormula";
        case ErrorKind::CycleError: return "CycleError";
        case ErrorKind::NotBelow: return "NotBelow";
        case ErrorKind::BaseMismatch: return "BaseMismatch";
        case ErrorKind::StageMismatch: return "StageMismatch";
        case ErrorKind::NotNatural: return "NotNatural";
        case ErrorKind::InvalidSubobject: return "InvalidSubobject";
        case ErrorKind::InvalidPresheaf: return "InvalidPresheaf";
        case ErrorKind::InvalidRelation: return "InvalidRelation";
        case ErrorKind::InvalidModel: return "InvalidModel";
        case ErrorKind::EmptyWorld: return "EmptyWorld";
        case ErrorKind::WrongBase: return "WrongBase";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::SortError: return "SortError";
        case ErrorKind::AmbiguousModality: return "AmbiguousModality";
        case ErrorKind::UnboundVariable: return "UnboundVariable";
        case ErrorKind::BudgetExceeded: return "BudgetExceeded";
        case ErrorKind::Capacity: return "Capacity";
        case ErrorKind::Io: return "Io";
    }
    return "Error";
}

FinPoset FinPoset::from_covers(const std::vector<std::string>& objects,
                               const std::vector<std::pair<std::string, std::string>>& covers,
                               bool allow_preorder) {
    FinPoset p;
    p.preorder_ = allow_preorder;
    for (const auto& name : objects) {
        if (p.index_.count(name)) fail(ErrorKind::InvalidModel, "duplicate object '" + name + "'");
        p.index_[name] = int(p.names_.size());
        p.names_.push_back(name);
    }
    int n = p.size();
    p.leq_.assign(n, Bits(n));
    for (int i = 0; i < n; ++i) p.leq_[i].set(i);
    for (const auto& [lo, hi] : covers) {
        auto it = p.index_.find(lo);
        if (it == p.index_.end()) fail(ErrorKind::UnknownObject, "unknown object '" + lo + "' in cover");
        auto jt = p.index_.find(hi);
        if (jt == p.index_.end()) fail(ErrorKind::UnknownObject, "unknown object '" + hi + "' in cover");
        p.leq_[it->second].set(jt->second);
    }
    // reflexive-transitive closure (Warshall)
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (p.leq_[i].test(k)) p.leq_[i] |= p.leq_[k];
    if (!allow_preorder) {
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (p.leq_[a].test(b) && p.leq_[b].test(a))
                    fail(ErrorKind::CycleError, "antisymmetry violated: " + p.names_[a] + " <= " +
                                                    p.names_[b] + " <= " + p.names_[a]);
    }
    p.down_.assign(n, Bits(n));
    for (int d = 0; d < n; ++d)
        for (int c = 0; c < n; ++c)
            if (p.leq_[d].test(c)) p.down_[c].set(d);
    return p;
}

int FinPoset::index(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) fail(ErrorKind::UnknownObject, "unknown object '" + name + "'");
    return it->second;
}

int FinPoset::find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

std::vector<int> FinPoset::downset(int c) const {
    std::vector<int> out;
    for (int d = 0; d < size(); ++d)
        if (leq(d, c)) out.push_back(d);
    return out;
}

std::vector<int> FinPoset::upset(int c) const {
    std::vector<int> out;
    for (int d = 0; d < size(); ++d)
        if (leq(c, d)) out.push_back(d);
    return out;
}

std::vector<int> FinPoset::maximal_elements() const {
    std::vector<int> out;
    for (int a = 0; a < size(); ++a) {
        bool maximal = true;
        for (int b = 0; b < size(); ++b)
            if (b != a && leq(a, b)) {
                maximal = false;
                break;
            }
        if (maximal) out.push_back(a);
    }
    return out;
}

bool sieve_is_total(const FinPoset& p, const Sieve& s) { return s.members == p.downset_bits(s.base); }

Sieve sieve_total(const FinPoset& p, int base) { return Sieve{base, p.downset_bits(base)}; }

Sieve sieve_empty(const FinPoset& p, int base) { return Sieve{base, Bits(p.size())}; }

static bool down_closed(const FinPoset& p, const Bits& members) {
    for (int d = members.first(); d >= 0; d = members.next(d))
        for (int e = 0; e < p.size(); ++e)
            if (p.leq(e, d) && !members.test(e)) return false;
    return true;
}

std::vector<Sieve> sieves_on(const FinPoset& p, int c) {
    if (c < 0 || c >= p.size()) fail(ErrorKind::UnknownObject, "stage index out of range");
    std::vector<int> down = p.downset(c);
    if (down.size() > 22)
        fail(ErrorKind::Capacity, "principal downset too large to enumerate sieves on " + p.name(c));
    std::vector<Sieve> out;
    std::uint64_t total = std::uint64_t(1) << down.size();
    for (std::uint64_t m = 0; m < total; ++m) {
        Bits members(p.size());
        for (std::size_t i = 0; i < down.size(); ++i)
            if ((m >> i) & 1) members.set(down[i]);
        if (down_closed(p, members)) out.push_back(Sieve{c, members});
    }
    std::sort(out.begin(), out.end(),
              [](const Sieve& a, const Sieve& b) { return a.members < b.members; });
    return out;
}

Sieve sieve_pullback(const FinPoset& p, const Sieve& s, int d) {
    if (!p.leq(d, s.base))
        fail(ErrorKind::NotBelow, p.name(d) + " is not below " + p.name(s.base));
    return Sieve{d, s.members & p.downset_bits(d)};
}

static void check_same_base(const Sieve& a, const Sieve& b) {
    if (a.base != b.base) fail(ErrorKind::BaseMismatch, "sieve operands live at different stages");
}

Sieve sieve_meet(const FinPoset&, const Sieve& a, const Sieve& b) {
    check_same_base(a, b);
    return Sieve{a.base, a.members & b.members};
}

Sieve sieve_join(const FinPoset&, const Sieve& a, const Sieve& b) {
    check_same_base(a, b);
    return Sieve{a.base, a.members | b.members};
}

Sieve sieve_implies(const FinPoset& p, const Sieve& a, const Sieve& b) {
    check_same_base(a, b);
    Sieve out = sieve_empty(p, a.base);
    for (int d = 0; d < p.size(); ++d) {
        if (!p.leq(d, a.base)) continue;
        bool ok = true;
        for (int e = 0; e < p.size(); ++e)
            if (p.leq(e, d) && a.members.test(e) && !b.members.test(e)) {
                ok = false;
                break;
            }
        if (ok) out.members.set(d);
    }
    return out;
}

Sieve sieve_neg(const FinPoset& p, const Sieve& a) { return sieve_implies(p, a, sieve_empty(p, a.base)); }

Sieve sieve_heyting(const FinPoset& p, HeytingOp op, const Sieve& a, const Sieve* b) {
    switch (op) {
        case HeytingOp::Meet: return sieve_meet(p, a, *b);
        case HeytingOp::Join: return sieve_join(p, a, *b);
        case HeytingOp::Implies: return sieve_implies(p, a, *b);
        case HeytingOp::Neg: return sieve_neg(p, a);
    }
    fail(ErrorKind::InvalidModel, "bad Heyting op");
}

Bits alexandrov_interior(const FinPoset& p, const Bits& s) {
    if (s.size() != p.size()) fail(ErrorKind::UnknownObject, "carrier set does not match the order");
    Bits out(p.size());
    for (int a = 0; a < p.size(); ++a) {
        bool in = true;
        for (int x = 0; x < p.size(); ++x)
            if (p.leq(a, x) && !s.test(x)) {
                in = false;
                break;
            }
        if (in) out.set(a);
    }
    return out;
}

Bits alexandrov_closure(const FinPoset& p, const Bits& s) {
    if (s.size() != p.size()) fail(ErrorKind::UnknownObject, "carrier set does not match the order");
    Bits out(p.size());
    for (int a = 0; a < p.size(); ++a)
        for (int x = s.first(); x >= 0; x = s.next(x))
            if (p.leq(a, x)) {
                out.set(a);
                break;
            }
    return out;
}

}  // namespace topos
