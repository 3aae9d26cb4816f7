#include "topos/power.hpp"

#include <algorithm>
#include <map>

namespace topos {

bool RelSub::operator<(const RelSub& o) const {
    for (std::size_t c = 0; c < members.size(); ++c) {
        if (members[c] == o.members[c]) continue;
        return members[c] < o.members[c];
    }
    return false;
}

ValidationReport relsub_validate(const RelSub& s) {
    ValidationReport rep;
    const Presheaf& x = *s.of;
    const FinPoset& p = x.base();
    if (s.at < 0 || s.at >= p.size()) {
        rep.add("relsub", "stage out of range");
        return rep;
    }
    if (int(s.members.size()) != p.size()) {
        rep.add("relsub", "member table does not match poset size");
        return rep;
    }
    for (int c = 0; c < p.size(); ++c) {
        if (!p.leq(c, s.at)) {
            if (s.members[c].any()) rep.add("relsub", "members above the stage at " + p.name(c));
            continue;
        }
        for (int dd = 0; dd < p.size(); ++dd) {
            if (dd == c || !p.leq(dd, c)) continue;
            for (int a = s.members[c].first(); a >= 0; a = s.members[c].next(a))
                if (!s.members[dd].test(x.restricted(c, a, dd)))
                    rep.add("relsub", "not closed under restriction: '" + x.elem_name(c, a) +
                                          "' at " + p.name(c) + " escapes at " + p.name(dd));
        }
    }
    return rep;
}

RelSub relsub_create(const Presheaf& of, int at, std::vector<Bits> members) {
    RelSub s;
    s.of = &of;
    s.at = at;
    s.members = std::move(members);
    ValidationReport rep = relsub_validate(s);
    if (!rep.ok()) fail(ErrorKind::InvalidSubobject, "invalid power element:\n" + rep.to_string());
    return s;
}

RelSub relsub_full(const Presheaf& of, int at) {
    RelSub s;
    s.of = &of;
    s.at = at;
    const FinPoset& p = of.base();
    for (int c = 0; c < p.size(); ++c)
        s.members.push_back(p.leq(c, at) ? Bits::full(of.fiber_size(c)) : Bits(of.fiber_size(c)));
    return s;
}

RelSub relsub_empty(const Presheaf& of, int at) {
    RelSub s;
    s.of = &of;
    s.at = at;
    for (int c = 0; c < of.base().size(); ++c) s.members.push_back(Bits(of.fiber_size(c)));
    return s;
}

RelSub relsub_restrict(const RelSub& s, int d) {
    const FinPoset& p = s.of->base();
    if (!p.leq(d, s.at)) fail(ErrorKind::NotBelow, p.name(d) + " is not below " + p.name(s.at));
    RelSub r;
    r.of = s.of;
    r.at = d;
    r.members.resize(s.members.size());
    for (int c = 0; c < p.size(); ++c)
        r.members[c] = p.leq(c, d) ? s.members[c] : Bits(s.of->fiber_size(c));
    return r;
}

static void check_same_stage(const RelSub& s, const RelSub& t) {
    if (s.of != t.of || s.at != t.at)
        fail(ErrorKind::StageMismatch, "power elements at different stages or presheaves");
}

bool px_leq(const RelSub& s, const RelSub& t) {
    check_same_stage(s, t);
    for (std::size_t c = 0; c < s.members.size(); ++c)
        if (!s.members[c].subset_of(t.members[c])) return false;
    return true;
}

RelSub px_meet(const RelSub& s, const RelSub& t) {
    check_same_stage(s, t);
    RelSub r = s;
    for (std::size_t c = 0; c < r.members.size(); ++c) r.members[c] &= t.members[c];
    return r;
}

RelSub px_join(const RelSub& s, const RelSub& t) {
    check_same_stage(s, t);
    RelSub r = s;
    for (std::size_t c = 0; c < r.members.size(); ++c) r.members[c] |= t.members[c];
    return r;
}

Sieve membership(int a, const RelSub& s) {
    const Presheaf& x = *s.of;
    const FinPoset& p = x.base();
    if (a < 0 || a >= x.fiber_size(s.at)) fail(ErrorKind::StageMismatch, "element not at the stage");
    Sieve v = sieve_empty(p, s.at);
    for (int d = 0; d < p.size(); ++d)
        if (p.leq(d, s.at) && s.members[d].test(x.restricted(s.at, a, d))) v.members.set(d);
    return v;
}

// ---------------------------------------------------------------------------
// InternalRelation

ValidationReport relation_validate(const InternalRelation& r) {
    ValidationReport rep;
    const Presheaf& x = *r.on;
    const FinPoset& p = x.base();
    if (int(r.adj.size()) != p.size()) {
        rep.add("relation", "stage table does not match poset size");
        return rep;
    }
    for (int c = 0; c < p.size(); ++c)
        if (int(r.adj[c].size()) != x.fiber_size(c)) {
            rep.add("relation", "adjacency at " + p.name(c) + " does not match the fiber");
            return rep;
        }
    for (int c = 0; c < p.size(); ++c)
        for (int dd = 0; dd < p.size(); ++dd) {
            if (dd == c || !p.leq(dd, c)) continue;
            for (int a = 0; a < x.fiber_size(c); ++a)
                for (int b = r.adj[c][a].first(); b >= 0; b = r.adj[c][a].next(b))
                    if (!r.adj[dd][x.restricted(c, a, dd)].test(x.restricted(c, b, dd)))
                        rep.add("relation", "graph not closed under restriction: (" +
                                                x.elem_name(c, a) + "," + x.elem_name(c, b) +
                                                ") at " + p.name(c) + " escapes at " + p.name(dd));
        }
    return rep;
}

InternalRelation relation_create(const Presheaf& on, std::vector<std::vector<Bits>> adj) {
    InternalRelation r;
    r.on = &on;
    r.adj = std::move(adj);
    ValidationReport rep = relation_validate(r);
    if (!rep.ok()) fail(ErrorKind::InvalidRelation, "invalid relation:\n" + rep.to_string());
    return r;
}

InternalRelation diagonal_relation(const Presheaf& x) {
    std::vector<std::vector<Bits>> adj(x.base().size());
    for (int c = 0; c < x.base().size(); ++c) {
        adj[c].assign(x.fiber_size(c), Bits(x.fiber_size(c)));
        for (int a = 0; a < x.fiber_size(c); ++a) adj[c][a].set(a);
    }
    return relation_create(x, std::move(adj));
}

InternalRelation relation_from_sub(const SubPresheaf& graph, const Product& xx) {
    const Presheaf& x = *xx.factors[0];
    std::vector<std::vector<Bits>> adj(x.base().size());
    for (int c = 0; c < x.base().size(); ++c) {
        adj[c].assign(x.fiber_size(c), Bits(x.fiber_size(c)));
        for (int t = graph.members[c].first(); t >= 0; t = graph.members[c].next(t)) {
            auto tuple = xx.decode(c, t);
            adj[c][tuple[0]].set(tuple[1]);
        }
    }
    return relation_create(x, std::move(adj));
}

SubPresheaf relation_to_sub(const InternalRelation& r, const Product& xx) {
    const Presheaf& prod = xx.ps;
    std::vector<Bits> members;
    for (int c = 0; c < prod.base().size(); ++c) {
        Bits m(prod.fiber_size(c));
        for (int t = 0; t < prod.fiber_size(c); ++t) {
            auto tuple = xx.decode(c, t);
            if (r.related(c, tuple[0], tuple[1])) m.set(t);
        }
        members.push_back(m);
    }
    return SubPresheaf::create(prod, std::move(members));
}

RelationFlags relation_flags(const InternalRelation& r) {
    const Presheaf& x = *r.on;
    const FinPoset& p = x.base();
    RelationFlags f;
    f.all_reflexive = f.all_transitive = f.all_symmetric = true;
    for (int c = 0; c < p.size(); ++c) {
        int n = x.fiber_size(c);
        bool refl = true, trans = true, sym = true;
        for (int a = 0; a < n && refl; ++a)
            if (!r.related(c, a, a)) refl = false;
        for (int a = 0; a < n && sym; ++a)
            for (int b = 0; b < n && sym; ++b)
                if (r.related(c, a, b) != r.related(c, b, a)) sym = false;
        for (int a = 0; a < n && trans; ++a)
            for (int b = r.adj[c][a].first(); b >= 0 && trans; b = r.adj[c][a].next(b))
                for (int e = r.adj[c][b].first(); e >= 0; e = r.adj[c][b].next(e))
                    if (!r.related(c, a, e)) {
                        trans = false;
                        if (!f.transitivity_witness) f.transitivity_witness = {{c, a, b, e}};
                        break;
                    }
        f.reflexive.push_back(refl);
        f.transitive.push_back(trans);
        f.symmetric.push_back(sym);
        f.all_reflexive &= refl;
        f.all_transitive &= trans;
        f.all_symmetric &= sym;
    }
    return f;
}

RelSub downarrow(const InternalRelation& r, int c, int b) {
    const Presheaf& x = *r.on;
    const FinPoset& p = x.base();
    RelSub s = relsub_empty(x, c);
    for (int d = 0; d < p.size(); ++d) {
        if (!p.leq(d, c)) continue;
        int bd = x.restricted(c, b, d);
        for (int a = 0; a < x.fiber_size(d); ++a)
            if (r.related(d, a, bd)) s.members[d].set(a);
    }
    return s;
}

RelSub uparrow(const InternalRelation& r, int c, int b) {
    const Presheaf& x = *r.on;
    const FinPoset& p = x.base();
    RelSub s = relsub_empty(x, c);
    for (int d = 0; d < p.size(); ++d) {
        if (!p.leq(d, c)) continue;
        int bd = x.restricted(c, b, d);
        for (int a = 0; a < x.fiber_size(d); ++a)
            if (r.related(d, bd, a)) s.members[d].set(a);
    }
    return s;
}

RelSub inverse_image(const NatTrans& f, const RelSub& t) {
    const Presheaf& x = *f.src;
    if (f.dst != t.of) fail(ErrorKind::StageMismatch, "inverse image along a map into another object");
    const FinPoset& p = x.base();
    RelSub s = relsub_empty(x, t.at);
    for (int d = 0; d < p.size(); ++d) {
        if (!p.leq(d, t.at)) continue;
        for (int a = 0; a < x.fiber_size(d); ++a)
            if (t.members[d].test(f.comp[d][a])) s.members[d].set(a);
    }
    return s;
}

RelSub direct_image(const NatTrans& f, const RelSub& s) {
    const Presheaf& y = *f.dst;
    if (f.src != s.of) fail(ErrorKind::StageMismatch, "direct image along a map from another object");
    const FinPoset& p = y.base();
    RelSub t = relsub_empty(y, s.at);
    for (int d = 0; d < p.size(); ++d) {
        if (!p.leq(d, s.at)) continue;
        for (int a = s.members[d].first(); a >= 0; a = s.members[d].next(a))
            t.members[d].set(f.comp[d][a]);
    }
    return t;
}

std::vector<RelSub> name_of(const NatTrans& phi, const Omega& om) {
    ValidationReport rep = NatTrans::validate(phi);
    if (!rep.ok()) fail(ErrorKind::NotNatural, "cannot take the name:\n" + rep.to_string());
    SubPresheaf sub = subobject_of(phi, om);
    const Presheaf& x = *phi.src;
    std::vector<RelSub> fam;
    for (int c = 0; c < x.base().size(); ++c) {
        RelSub s = relsub_empty(x, c);
        for (int d = 0; d < x.base().size(); ++d)
            if (x.base().leq(d, c)) s.members[d] = sub.members[d];
        fam.push_back(std::move(s));
    }
    return fam;
}

// ---------------------------------------------------------------------------
// Power object enumeration

PowerEnum power_elements(const Presheaf& x, int c, long limit) {
    const FinPoset& p = x.base();
    if (c < 0 || c >= p.size()) fail(ErrorKind::UnknownObject, "stage out of range");
    std::vector<int> stages = p.downset(c);
    PowerEnum out;

    // DFS over stages in canonical order, ascending subsets within a stage;
    // closure is checked against every decided comparable stage.
    std::vector<Bits> chosen(p.size());
    for (int d = 0; d < p.size(); ++d) chosen[d] = Bits(x.fiber_size(d));

    auto consistent = [&](int upto) {
        int d = stages[upto];
        for (int k = 0; k <= upto; ++k) {
            int e = stages[k];
            if (p.leq(e, d) && e != d)
                for (int a = chosen[d].first(); a >= 0; a = chosen[d].next(a))
                    if (!chosen[e].test(x.restricted(d, a, e))) return false;
            if (p.leq(d, e) && e != d)
                for (int a = chosen[e].first(); a >= 0; a = chosen[e].next(a))
                    if (!chosen[d].test(x.restricted(e, a, d))) return false;
        }
        return true;
    };

    // subsets of fiber(d) in ascending canonical order
    auto subsets = [&](int d) {
        std::vector<Bits> out_sets;
        int n = x.fiber_size(d);
        if (n > 20) fail(ErrorKind::Capacity, "fiber too large to enumerate power elements");
        for (std::uint64_t m = 0; m < (std::uint64_t(1) << n); ++m) {
            Bits b(n);
            for (int i = 0; i < n; ++i)
                if ((m >> i) & 1) b.set(i);
            out_sets.push_back(b);
        }
        return out_sets;
    };

    std::vector<std::vector<Bits>> stage_subsets;
    for (int d : stages) stage_subsets.push_back(subsets(d));

    bool stop = false;
    auto rec = [&](auto&& self, std::size_t k) -> void {
        if (stop) return;
        if (k == stages.size()) {
            RelSub s;
            s.of = &x;
            s.at = c;
            s.members = chosen;
            out.elements.push_back(std::move(s));
            // only flag truncation once an element beyond the limit shows up
            if (limit > 0 && long(out.elements.size()) > limit) {
                out.elements.pop_back();
                out.truncated = true;
                stop = true;
            }
            return;
        }
        for (const Bits& b : stage_subsets[k]) {
            chosen[stages[k]] = b;
            if (consistent(int(k))) self(self, k + 1);
            if (stop) return;
        }
        chosen[stages[k]] = Bits(x.fiber_size(stages[k]));
    };
    rec(rec, 0);
    return out;
}

int PowerPresheaf::index_of(int c, const RelSub& s) const {
    auto it = std::lower_bound(elems[c].begin(), elems[c].end(), s);
    if (it != elems[c].end() && *it == s) return int(it - elems[c].begin());
    return -1;
}

PowerPresheaf materialize_power(const Presheaf& x, long limit) {
    const FinPoset& p = x.base();
    PowerPresheaf px;
    px.of = &x;
    px.elems.resize(p.size());
    PresheafData d;
    d.base = &p;
    d.label = "P(" + x.label() + ")";
    d.fibers.resize(p.size());
    for (int c = 0; c < p.size(); ++c) {
        PowerEnum en = power_elements(x, c, limit);
        if (en.truncated)
            fail(ErrorKind::BudgetExceeded, "power object of " + x.label() + " at " + p.name(c) +
                                                " exceeds the enumeration limit");
        px.elems[c] = std::move(en.elements);
        for (std::size_t k = 0; k < px.elems[c].size(); ++k)
            d.fibers[c].push_back("s" + std::to_string(k));
    }
    for (int c = 0; c < p.size(); ++c)
        for (int dd = 0; dd < p.size(); ++dd) {
            if (!p.leq(dd, c)) continue;
            std::vector<int> m(px.elems[c].size());
            for (std::size_t k = 0; k < px.elems[c].size(); ++k) {
                int idx = px.index_of(dd, relsub_restrict(px.elems[c][k], dd));
                if (idx < 0)
                    fail(ErrorKind::InvalidModel, "power enumeration is not restriction-complete");
                m[k] = idx;
            }
            d.maps[{c, dd}] = std::move(m);
        }
    px.ps = Presheaf::create(std::move(d));
    return px;
}

NatTrans downarrow_map(const InternalRelation& r, const PowerPresheaf& px) {
    const Presheaf& x = *r.on;
    std::vector<std::vector<int>> comp(x.base().size());
    for (int c = 0; c < x.base().size(); ++c) {
        comp[c].resize(x.fiber_size(c));
        for (int b = 0; b < x.fiber_size(c); ++b) {
            int idx = px.index_of(c, downarrow(r, c, b));
            if (idx < 0) fail(ErrorKind::InvalidModel, "downarrow image missing from power object");
            comp[c][b] = idx;
        }
    }
    return NatTrans::create(x, px.ps, std::move(comp));
}

NatTrans uparrow_map(const InternalRelation& r, const PowerPresheaf& px) {
    const Presheaf& x = *r.on;
    std::vector<std::vector<int>> comp(x.base().size());
    for (int c = 0; c < x.base().size(); ++c) {
        comp[c].resize(x.fiber_size(c));
        for (int b = 0; b < x.fiber_size(c); ++b) {
            int idx = px.index_of(c, uparrow(r, c, b));
            if (idx < 0) fail(ErrorKind::InvalidModel, "uparrow image missing from power object");
            comp[c][b] = idx;
        }
    }
    return NatTrans::create(x, px.ps, std::move(comp));
}

RelSub join_family(const PowerPresheaf& px, const RelSub& T) {
    if (T.of != &px.ps) fail(ErrorKind::StageMismatch, "family does not live over the power object");
    const Presheaf& x = *px.of;
    const FinPoset& p = x.base();
    RelSub out = relsub_empty(x, T.at);
    for (int d = 0; d < p.size(); ++d) {
        if (!p.leq(d, T.at)) continue;
        for (int k = T.members[d].first(); k >= 0; k = T.members[d].next(k))
            out.members[d] |= px.elems[d][k].members[d];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Quantifiers along projections

SubPresheaf internal_forall(const Product& gy, const SubPresheaf& phi) {
    if (phi.of != &gy.ps) fail(ErrorKind::BaseMismatch, "formula does not live over the product");
    const Presheaf& gamma = *gy.factors[0];
    const Presheaf& y = *gy.factors[1];
    const FinPoset& p = gamma.base();
    SubPresheaf out = SubPresheaf::none(gamma);
    for (int c = 0; c < p.size(); ++c)
        for (int g = 0; g < gamma.fiber_size(c); ++g) {
            bool in = true;
            for (int dd = 0; dd < p.size() && in; ++dd) {
                if (!p.leq(dd, c)) continue;
                int gd = gamma.restricted(c, g, dd);
                for (int b = 0; b < y.fiber_size(dd); ++b)
                    if (!phi.members[dd].test(gy.encode(dd, {gd, b}))) {
                        in = false;
                        break;
                    }
            }
            if (in) out.members[c].set(g);
        }
    return out;
}

SubPresheaf internal_exists(const Product& gy, const SubPresheaf& phi) {
    if (phi.of != &gy.ps) fail(ErrorKind::BaseMismatch, "formula does not live over the product");
    const Presheaf& gamma = *gy.factors[0];
    const Presheaf& y = *gy.factors[1];
    const FinPoset& p = gamma.base();
    SubPresheaf out = SubPresheaf::none(gamma);
    for (int c = 0; c < p.size(); ++c)
        for (int g = 0; g < gamma.fiber_size(c); ++g)
            for (int b = 0; b < y.fiber_size(c); ++b)
                if (phi.members[c].test(gy.encode(c, {g, b}))) {
                    out.members[c].set(g);
                    break;
                }
    return out;
}

}  // namespace topos
