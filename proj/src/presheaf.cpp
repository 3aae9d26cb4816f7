#include "topos/presheaf.hpp"

#include <algorithm>
#include <sstream>

namespace topos {

std::string ValidationReport::to_string() const {
    if (issues.empty()) return "valid";
    std::ostringstream os;
    for (const auto& i : issues) os << i.where << ": " << i.what << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Presheaf

namespace {

// Fill in identities and cover-composites without overwriting given maps.
// Returns the completed table; structural problems are reported, not thrown.
std::map<std::pair<int, int>, std::vector<int>> complete_maps(const PresheafData& d,
                                                              ValidationReport& rep) {
    const FinPoset& p = *d.base;
    int n = p.size();
    auto maps = d.maps;
    auto fiber = [&](int c) { return int(d.fibers[c].size()); };

    for (int c = 0; c < n; ++c) {
        if (!maps.count({c, c})) {
            std::vector<int> id(fiber(c));
            for (int a = 0; a < fiber(c); ++a) id[a] = a;
            maps[{c, c}] = std::move(id);
        }
    }
    // Repeatedly compose known maps until every comparable pair is covered.
    bool grew = true;
    while (grew) {
        grew = false;
        for (int c = 0; c < n; ++c)
            for (int e = 0; e < n; ++e) {
                if (e == c || !p.leq(e, c) || !maps.count({c, e})) continue;
                for (int dd = 0; dd < n; ++dd) {
                    if (!p.leq(dd, e) || maps.count({c, dd}) || !maps.count({e, dd})) continue;
                    const auto& f = maps[{c, e}];
                    const auto& g = maps[{e, dd}];
                    if (int(f.size()) != fiber(c) || int(g.size()) != fiber(e)) continue;
                    std::vector<int> h(fiber(c));
                    bool ok = true;
                    for (int a = 0; a < fiber(c); ++a) {
                        if (f[a] < 0 || f[a] >= fiber(e)) { ok = false; break; }
                        h[a] = g[f[a]];
                    }
                    if (ok) {
                        maps[{c, dd}] = std::move(h);
                        grew = true;
                    }
                }
            }
    }
    for (int c = 0; c < n; ++c)
        for (int dd = 0; dd < n; ++dd)
            if (p.leq(dd, c) && !maps.count({c, dd}))
                rep.add(d.label, "missing restriction map " + p.name(c) + " -> " + p.name(dd));
    return maps;
}

}  // namespace

ValidationReport Presheaf::validate(const PresheafData& data) {
    ValidationReport rep;
    const FinPoset& p = *data.base;
    int n = p.size();
    if (int(data.fibers.size()) != n) {
        rep.add(data.label, "carrier table does not match poset size");
        return rep;
    }
    for (int c = 0; c < n; ++c) {
        std::unordered_map<std::string, int> seen;
        for (const auto& e : data.fibers[c])
            if (++seen[e] == 2) rep.add(data.label, "duplicate element '" + e + "' at " + p.name(c));
    }
    for (const auto& [key, m] : data.maps) {
        auto [c, dd] = key;
        if (c < 0 || c >= n || dd < 0 || dd >= n || !p.leq(dd, c)) {
            rep.add(data.label, "restriction map on a non-comparable pair");
            continue;
        }
        if (int(m.size()) != int(data.fibers[c].size()))
            rep.add(data.label, "restriction " + p.name(c) + " -> " + p.name(dd) + " is not total");
    }
    if (!rep.ok()) return rep;

    auto maps = complete_maps(data, rep);

    // totality (range check)
    for (const auto& [key, m] : maps) {
        auto [c, dd] = key;
        for (int a = 0; a < int(m.size()); ++a)
            if (m[a] < 0 || m[a] >= int(data.fibers[dd].size()))
                rep.add(data.label, "restriction " + p.name(c) + " -> " + p.name(dd) +
                                        " maps '" + data.fibers[c][a] + "' out of range");
    }
    if (!rep.ok()) return rep;

    // identity
    for (int c = 0; c < n; ++c) {
        const auto& id = maps[{c, c}];
        for (int a = 0; a < int(id.size()); ++a)
            if (id[a] != a)
                rep.add(data.label, "restriction along " + p.name(c) + " <= " + p.name(c) +
                                        " is not the identity at '" + data.fibers[c][a] + "'");
    }
    // composition: for every d <= e <= c, (c->d) == (e->d) o (c->e)
    for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e) {
            if (!p.leq(e, c)) continue;
            for (int dd = 0; dd < n; ++dd) {
                if (!p.leq(dd, e)) continue;
                auto ic = maps.find({c, dd});
                auto f = maps.find({c, e});
                auto g = maps.find({e, dd});
                if (ic == maps.end() || f == maps.end() || g == maps.end()) continue;
                for (int a = 0; a < int(f->second.size()); ++a)
                    if (ic->second[a] != g->second[f->second[a]]) {
                        rep.add(data.label, "restriction composite " + p.name(c) + " -> " + p.name(e) +
                                                " -> " + p.name(dd) + " disagrees with " + p.name(c) +
                                                " -> " + p.name(dd) + " at '" + data.fibers[c][a] + "'");
                        break;
                    }
            }
        }
    return rep;
}

Presheaf Presheaf::create(PresheafData data) {
    ValidationReport rep = validate(data);
    if (!rep.ok())
        fail(ErrorKind::InvalidPresheaf, "presheaf '" + data.label + "' invalid:\n" + rep.to_string());
    Presheaf x;
    x.base_ = data.base;
    x.label_ = std::move(data.label);
    x.elems_ = std::move(data.fibers);
    int n = x.base_->size();
    ValidationReport dummy;
    PresheafData view;
    view.base = x.base_;
    view.label = x.label_;
    view.fibers = x.elems_;
    view.maps = std::move(data.maps);
    auto maps = complete_maps(view, dummy);
    x.maps_.assign(n, std::vector<std::vector<int>>(n));
    for (auto& [key, m] : maps) x.maps_[key.first][key.second] = std::move(m);
    return x;
}

int Presheaf::elem_index(int c, const std::string& name) const {
    int i = elem_find(c, name);
    if (i < 0)
        fail(ErrorKind::UnknownElement,
             "no element '" + name + "' in " + label_ + "(" + base_->name(c) + ")");
    return i;
}

int Presheaf::elem_find(int c, const std::string& name) const {
    for (int i = 0; i < fiber_size(c); ++i)
        if (elems_[c][i] == name) return i;
    return -1;
}

Presheaf terminal_presheaf(const FinPoset& p) {
    PresheafData d;
    d.base = &p;
    d.label = "1";
    d.fibers.assign(p.size(), {"*"});
    for (int c = 0; c < p.size(); ++c)
        for (int dd = 0; dd < p.size(); ++dd)
            if (p.leq(dd, c)) d.maps[{c, dd}] = {0};
    return Presheaf::create(std::move(d));
}

Presheaf yoneda(const FinPoset& p, int c) {
    if (c < 0 || c >= p.size()) fail(ErrorKind::UnknownObject, "yoneda stage out of range");
    PresheafData d;
    d.base = &p;
    d.label = "y(" + p.name(c) + ")";
    d.fibers.resize(p.size());
    for (int dd = 0; dd < p.size(); ++dd)
        if (p.leq(dd, c)) d.fibers[dd] = {"*"};
    for (int e = 0; e < p.size(); ++e)
        for (int dd = 0; dd < p.size(); ++dd)
            if (p.leq(dd, e)) d.maps[{e, dd}] = p.leq(e, c) ? std::vector<int>{0} : std::vector<int>{};
    return Presheaf::create(std::move(d));
}

// ---------------------------------------------------------------------------
// NatTrans

ValidationReport NatTrans::validate(const NatTrans& t) {
    ValidationReport rep;
    const FinPoset& p = t.src->base();
    if (&t.src->base() != &t.dst->base()) {
        rep.add("nat", "source and target live over different posets");
        return rep;
    }
    if (int(t.comp.size()) != p.size()) {
        rep.add("nat", "component table does not match poset size");
        return rep;
    }
    for (int c = 0; c < p.size(); ++c) {
        if (int(t.comp[c].size()) != t.src->fiber_size(c)) {
            rep.add("nat", "component at " + p.name(c) + " is not total");
            continue;
        }
        for (int a = 0; a < t.src->fiber_size(c); ++a)
            if (t.comp[c][a] < 0 || t.comp[c][a] >= t.dst->fiber_size(c))
                rep.add("nat", "component at " + p.name(c) + " maps out of range");
    }
    if (!rep.ok()) return rep;
    for (int c = 0; c < p.size(); ++c)
        for (int dd = 0; dd < p.size(); ++dd) {
            if (dd == c || !p.leq(dd, c)) continue;
            for (int a = 0; a < t.src->fiber_size(c); ++a) {
                int lhs = t.dst->restricted(c, t.comp[c][a], dd);
                int rhs = t.comp[dd][t.src->restricted(c, a, dd)];
                if (lhs != rhs)
                    rep.add("nat", "naturality fails at '" + t.src->elem_name(c, a) + "' along " +
                                       p.name(dd) + " <= " + p.name(c));
            }
        }
    return rep;
}

NatTrans NatTrans::create(const Presheaf& src, const Presheaf& dst,
                          std::vector<std::vector<int>> comp) {
    NatTrans t;
    t.src = &src;
    t.dst = &dst;
    t.comp = std::move(comp);
    ValidationReport rep = validate(t);
    if (!rep.ok()) fail(ErrorKind::NotNatural, "not a natural transformation:\n" + rep.to_string());
    return t;
}

NatTrans identity_nat(const Presheaf& x) {
    std::vector<std::vector<int>> comp(x.base().size());
    for (int c = 0; c < x.base().size(); ++c) {
        comp[c].resize(x.fiber_size(c));
        for (int a = 0; a < x.fiber_size(c); ++a) comp[c][a] = a;
    }
    return NatTrans::create(x, x, std::move(comp));
}

NatTrans compose(const NatTrans& g, const NatTrans& f) {
    std::vector<std::vector<int>> comp(f.comp.size());
    for (std::size_t c = 0; c < f.comp.size(); ++c) {
        comp[c].resize(f.comp[c].size());
        for (std::size_t a = 0; a < f.comp[c].size(); ++a) comp[c][a] = g.comp[c][f.comp[c][a]];
    }
    return NatTrans::create(*f.src, *g.dst, std::move(comp));
}

NatTrans to_terminal(const Presheaf& x, const Presheaf& one) {
    std::vector<std::vector<int>> comp(x.base().size());
    for (int c = 0; c < x.base().size(); ++c) comp[c].assign(x.fiber_size(c), 0);
    return NatTrans::create(x, one, std::move(comp));
}

// ---------------------------------------------------------------------------
// SubPresheaf

ValidationReport SubPresheaf::validate(const SubPresheaf& s) {
    ValidationReport rep;
    const Presheaf& x = *s.of;
    const FinPoset& p = x.base();
    if (int(s.members.size()) != p.size()) {
        rep.add(x.label(), "member table does not match poset size");
        return rep;
    }
    for (int c = 0; c < p.size(); ++c)
        for (int dd = 0; dd < p.size(); ++dd) {
            if (dd == c || !p.leq(dd, c)) continue;
            for (int a = s.members[c].first(); a >= 0; a = s.members[c].next(a))
                if (!s.members[dd].test(x.restricted(c, a, dd)))
                    rep.add(x.label(), "subobject not closed under restriction: '" +
                                           x.elem_name(c, a) + "' at " + p.name(c) +
                                           " escapes at " + p.name(dd));
        }
    return rep;
}

SubPresheaf SubPresheaf::create(const Presheaf& of, std::vector<Bits> members) {
    SubPresheaf s;
    s.of = &of;
    s.members = std::move(members);
    ValidationReport rep = validate(s);
    if (!rep.ok()) fail(ErrorKind::InvalidSubobject, "invalid subobject:\n" + rep.to_string());
    return s;
}

SubPresheaf SubPresheaf::full(const Presheaf& of) {
    SubPresheaf s;
    s.of = &of;
    for (int c = 0; c < of.base().size(); ++c) s.members.push_back(Bits::full(of.fiber_size(c)));
    return s;
}

SubPresheaf SubPresheaf::none(const Presheaf& of) {
    SubPresheaf s;
    s.of = &of;
    for (int c = 0; c < of.base().size(); ++c) s.members.push_back(Bits(of.fiber_size(c)));
    return s;
}

static void check_same_ambient(const SubPresheaf& a, const SubPresheaf& b) {
    if (a.of != b.of) fail(ErrorKind::BaseMismatch, "subobjects of different presheaves");
}

bool sub_leq(const SubPresheaf& a, const SubPresheaf& b) {
    check_same_ambient(a, b);
    for (std::size_t c = 0; c < a.members.size(); ++c)
        if (!a.members[c].subset_of(b.members[c])) return false;
    return true;
}

SubPresheaf sub_meet(const SubPresheaf& a, const SubPresheaf& b) {
    check_same_ambient(a, b);
    SubPresheaf r = a;
    for (std::size_t c = 0; c < r.members.size(); ++c) r.members[c] &= b.members[c];
    return r;
}

SubPresheaf sub_join(const SubPresheaf& a, const SubPresheaf& b) {
    check_same_ambient(a, b);
    SubPresheaf r = a;
    for (std::size_t c = 0; c < r.members.size(); ++c) r.members[c] |= b.members[c];
    return r;
}

SubPresheaf sub_implies(const SubPresheaf& a, const SubPresheaf& b) {
    check_same_ambient(a, b);
    const Presheaf& x = *a.of;
    const FinPoset& p = x.base();
    SubPresheaf r = SubPresheaf::none(x);
    for (int c = 0; c < p.size(); ++c)
        for (int e = 0; e < x.fiber_size(c); ++e) {
            bool in = true;
            for (int dd = 0; dd < p.size() && in; ++dd) {
                if (!p.leq(dd, c)) continue;
                int ed = x.restricted(c, e, dd);
                if (a.members[dd].test(ed) && !b.members[dd].test(ed)) in = false;
            }
            if (in) r.members[c].set(e);
        }
    return r;
}

SubPresheaf sub_neg(const SubPresheaf& a) { return sub_implies(a, SubPresheaf::none(*a.of)); }

SubPresheaf heyting_sub(HeytingOp op, const SubPresheaf& a, const SubPresheaf& b) {
    switch (op) {
        case HeytingOp::Meet: return sub_meet(a, b);
        case HeytingOp::Join: return sub_join(a, b);
        case HeytingOp::Implies: return sub_implies(a, b);
        case HeytingOp::Neg: return sub_neg(a);
    }
    fail(ErrorKind::InvalidModel, "bad Heyting op");
}

// ---------------------------------------------------------------------------
// Omega

static std::string sieve_label(const FinPoset& p, const Sieve& s) {
    std::string out = "{";
    bool first = true;
    for (int d = s.members.first(); d >= 0; d = s.members.next(d)) {
        if (!first) out += ",";
        out += p.name(d);
        first = false;
    }
    return out + "}";
}

Omega omega(const FinPoset& p) {
    Omega om;
    om.sieves.resize(p.size());
    PresheafData d;
    d.base = &p;
    d.label = "Omega";
    d.fibers.resize(p.size());
    for (int c = 0; c < p.size(); ++c) {
        om.sieves[c] = sieves_on(p, c);
        for (const Sieve& s : om.sieves[c]) d.fibers[c].push_back(sieve_label(p, s));
    }
    for (int c = 0; c < p.size(); ++c)
        for (int dd = 0; dd < p.size(); ++dd) {
            if (!p.leq(dd, c)) continue;
            std::vector<int> m(om.sieves[c].size());
            for (std::size_t k = 0; k < om.sieves[c].size(); ++k) {
                Sieve pulled = sieve_pullback(p, om.sieves[c][k], dd);
                m[k] = -1;
                for (std::size_t j = 0; j < om.sieves[dd].size(); ++j)
                    if (om.sieves[dd][j].members == pulled.members) {
                        m[k] = int(j);
                        break;
                    }
            }
            d.maps[{c, dd}] = std::move(m);
        }
    om.ps = Presheaf::create(std::move(d));
    return om;
}

int Omega::index_of(int c, const Bits& members) const {
    for (std::size_t k = 0; k < sieves[c].size(); ++k)
        if (sieves[c][k].members == members) return int(k);
    fail(ErrorKind::InvalidModel, "set is not a sieve at stage " + ps.base().name(c));
}

// ---------------------------------------------------------------------------
// Products

Product product(std::vector<const Presheaf*> factors, std::string label) {
    if (factors.empty()) fail(ErrorKind::InvalidModel, "product needs a base; use product_over");
    const FinPoset& base = factors[0]->base();
    return product_over(base, std::move(factors), std::move(label));
}

Product product_over(const FinPoset& p, std::vector<const Presheaf*> factors, std::string label) {
    for (auto* f : factors)
        if (&f->base() != &p) fail(ErrorKind::BaseMismatch, "product factors over different posets");
    PresheafData d;
    d.base = &p;
    d.label = std::move(label);
    d.fibers.resize(p.size());
    int n = int(factors.size());
    for (int c = 0; c < p.size(); ++c) {
        long long count = 1;
        for (auto* f : factors) count *= f->fiber_size(c);
        for (long long t = 0; t < count; ++t) {
            long long rest = t;
            std::vector<int> tuple(n);
            for (int k = n - 1; k >= 0; --k) {
                int sz = factors[k]->fiber_size(c);
                tuple[k] = int(rest % sz);
                rest /= sz;
            }
            std::string nm = "(";
            for (int k = 0; k < n; ++k) {
                if (k) nm += ",";
                nm += factors[k]->elem_name(c, tuple[k]);
            }
            d.fibers[c].push_back(nm + ")");
        }
    }
    for (int c = 0; c < p.size(); ++c)
        for (int dd = 0; dd < p.size(); ++dd) {
            if (!p.leq(dd, c)) continue;
            std::vector<int> m(d.fibers[c].size());
            for (int t = 0; t < int(d.fibers[c].size()); ++t) {
                long long rest = t, down = 0;
                std::vector<int> tuple(n);
                for (int k = n - 1; k >= 0; --k) {
                    int sz = factors[k]->fiber_size(c);
                    tuple[k] = int(rest % sz);
                    rest /= sz;
                }
                for (int k = 0; k < n; ++k)
                    down = down * factors[k]->fiber_size(dd) + factors[k]->restricted(c, tuple[k], dd);
                m[t] = int(down);
            }
            d.maps[{c, dd}] = std::move(m);
        }
    Product pr;
    pr.factors = std::move(factors);
    pr.ps = Presheaf::create(std::move(d));
    return pr;
}

Product product(const Presheaf& x, const Presheaf& y) {
    return product({&x, &y}, x.label() + "*" + y.label());
}

int Product::encode(int c, const std::vector<int>& tuple) const {
    long long t = 0;
    for (std::size_t k = 0; k < factors.size(); ++k) t = t * factors[k]->fiber_size(c) + tuple[k];
    return int(t);
}

std::vector<int> Product::decode(int c, int t) const {
    std::vector<int> tuple(factors.size());
    long long rest = t;
    for (int k = int(factors.size()) - 1; k >= 0; --k) {
        int sz = factors[k]->fiber_size(c);
        tuple[k] = int(rest % sz);
        rest /= sz;
    }
    return tuple;
}

NatTrans Product::projection(int k) const {
    std::vector<std::vector<int>> comp(ps.base().size());
    for (int c = 0; c < ps.base().size(); ++c) {
        comp[c].resize(ps.fiber_size(c));
        for (int t = 0; t < ps.fiber_size(c); ++t) comp[c][t] = decode(c, t)[k];
    }
    return NatTrans::create(ps, *factors[k], std::move(comp));
}

NatTrans pairing(const NatTrans& f, const NatTrans& g, const Product& xy) {
    if (f.src != g.src) fail(ErrorKind::BaseMismatch, "pairing of maps with different sources");
    std::vector<std::vector<int>> comp(f.comp.size());
    for (std::size_t c = 0; c < f.comp.size(); ++c) {
        comp[c].resize(f.comp[c].size());
        for (std::size_t a = 0; a < f.comp[c].size(); ++a)
            comp[c][a] = xy.encode(int(c), {f.comp[c][a], g.comp[c][a]});
    }
    return NatTrans::create(*f.src, xy.ps, std::move(comp));
}

// ---------------------------------------------------------------------------
// Classifier

NatTrans classify(const SubPresheaf& s, const Omega& om) {
    ValidationReport rep = SubPresheaf::validate(s);
    if (!rep.ok()) fail(ErrorKind::InvalidSubobject, "cannot classify:\n" + rep.to_string());
    const Presheaf& x = *s.of;
    const FinPoset& p = x.base();
    std::vector<std::vector<int>> comp(p.size());
    for (int c = 0; c < p.size(); ++c) {
        comp[c].resize(x.fiber_size(c));
        for (int a = 0; a < x.fiber_size(c); ++a) {
            Bits sieve(p.size());
            for (int dd = 0; dd < p.size(); ++dd)
                if (p.leq(dd, c) && s.members[dd].test(x.restricted(c, a, dd))) sieve.set(dd);
            comp[c][a] = om.index_of(c, sieve);
        }
    }
    return NatTrans::create(x, om.ps, std::move(comp));
}

SubPresheaf subobject_of(const NatTrans& chi, const Omega& om) {
    ValidationReport rep = NatTrans::validate(chi);
    if (!rep.ok()) fail(ErrorKind::NotNatural, "cannot take subobject:\n" + rep.to_string());
    const Presheaf& x = *chi.src;
    const FinPoset& p = x.base();
    std::vector<Bits> members;
    for (int c = 0; c < p.size(); ++c) {
        Bits m(x.fiber_size(c));
        for (int a = 0; a < x.fiber_size(c); ++a)
            if (sieve_is_total(p, om.sieve(c, chi.comp[c][a]))) m.set(a);
        members.push_back(m);
    }
    return SubPresheaf::create(x, std::move(members));
}

SubPresheaf diagonal_sub(const Product& xx) {
    const Presheaf& prod = xx.ps;
    std::vector<Bits> members;
    for (int c = 0; c < prod.base().size(); ++c) {
        Bits m(prod.fiber_size(c));
        for (int t = 0; t < prod.fiber_size(c); ++t) {
            auto tuple = xx.decode(c, t);
            if (tuple[0] == tuple[1]) m.set(t);
        }
        members.push_back(m);
    }
    return SubPresheaf::create(prod, std::move(members));
}

NatTrans equality_predicate(const Product& xx, const Omega& om) {
    return classify(diagonal_sub(xx), om);
}

SubPresheaf kernel_relation(const NatTrans& tau, const Product& xx) {
    const Presheaf& prod = xx.ps;
    std::vector<Bits> members;
    for (int c = 0; c < prod.base().size(); ++c) {
        Bits m(prod.fiber_size(c));
        for (int t = 0; t < prod.fiber_size(c); ++t) {
            auto tuple = xx.decode(c, t);
            if (tau.comp[c][tuple[0]] == tau.comp[c][tuple[1]]) m.set(t);
        }
        members.push_back(m);
    }
    return SubPresheaf::create(prod, std::move(members));
}

Forcing forces(const NatTrans& phi, const Omega& om, int c, int a) {
    if (c < 0 || c >= phi.src->base().size()) fail(ErrorKind::UnknownObject, "stage out of range");
    if (a < 0 || a >= phi.src->fiber_size(c)) fail(ErrorKind::UnknownElement, "element out of range");
    Sieve v = om.sieve(c, phi.comp[c][a]);
    return Forcing{sieve_is_total(phi.src->base(), v), v};
}

}  // namespace topos
