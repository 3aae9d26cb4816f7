#include "topos/modal.hpp"

#include <algorithm>
#include <memory>
#include <random>

namespace topos {

RelSub interior(const ModalContext& ctx, const RelSub& s) {
    if (s.of != ctx.x) fail(ErrorKind::StageMismatch, "power element of a different presheaf");
    const Presheaf& x = *ctx.x;
    const InternalRelation& r = *ctx.r;
    const FinPoset& p = x.base();
    RelSub out = relsub_empty(x, s.at);
    for (int d = 0; d < p.size(); ++d) {
        if (!p.leq(d, s.at)) continue;
        for (int a = 0; a < x.fiber_size(d); ++a) {
            bool in = true;
            for (int dd = 0; dd < p.size() && in; ++dd) {
                if (!p.leq(dd, d)) continue;
                int ad = x.restricted(d, a, dd);
                for (int b = r.adj[dd][ad].first(); b >= 0; b = r.adj[dd][ad].next(b))
                    if (!s.members[dd].test(b)) {
                        in = false;
                        break;
                    }
            }
            if (in) out.members[d].set(a);
        }
    }
    return out;
}

RelSub closure(const ModalContext& ctx, const RelSub& s) {
    if (s.of != ctx.x) fail(ErrorKind::StageMismatch, "power element of a different presheaf");
    const Presheaf& x = *ctx.x;
    const InternalRelation& r = *ctx.r;
    const FinPoset& p = x.base();
    RelSub out = relsub_empty(x, s.at);
    for (int d = 0; d < p.size(); ++d) {
        if (!p.leq(d, s.at)) continue;
        for (int a = 0; a < x.fiber_size(d); ++a) {
            Bits hits = r.adj[d][a] & s.members[d];
            if (hits.any()) out.members[d].set(a);
        }
    }
    return out;
}

RelSub interior_stage_local(const ModalContext& ctx, const RelSub& s) {
    const Presheaf& x = *ctx.x;
    const InternalRelation& r = *ctx.r;
    const FinPoset& p = x.base();
    RelSub out = relsub_empty(x, s.at);
    for (int d = 0; d < p.size(); ++d) {
        if (!p.leq(d, s.at)) continue;
        for (int a = 0; a < x.fiber_size(d); ++a)
            if (r.adj[d][a].subset_of(s.members[d])) out.members[d].set(a);
    }
    return out;
}

OracleOps make_oracle(const ModalContext& ctx) {
    OracleOps ops;
    ops.px = std::make_unique<PowerPresheaf>(materialize_power(*ctx.x, ctx.limit));
    ops.up = uparrow_map(*ctx.r, *ops.px);
    ops.down = downarrow_map(*ctx.r, *ops.px);
    return ops;
}

RelSub interior_oracle(const OracleOps& ops, const RelSub& s) {
    // downsegment of the power order at s: the stage-indexed family of all
    // power elements below the truncation of s
    const PowerPresheaf& px = *ops.px;
    const Presheaf& x = *px.of;
    const FinPoset& p = x.base();
    RelSub family = relsub_empty(px.ps, s.at);
    for (int d = 0; d < p.size(); ++d) {
        if (!p.leq(d, s.at)) continue;
        RelSub cut = relsub_restrict(s, d);
        for (std::size_t k = 0; k < px.elems[d].size(); ++k)
            if (px_leq(px.elems[d][k], cut)) family.members[d].set(int(k));
    }
    return inverse_image(ops.up, family);
}

RelSub closure_oracle(const OracleOps& ops, const RelSub& s) {
    return join_family(*ops.px, direct_image(ops.down, s));
}

RelSub interior_oracle(const ModalContext& ctx, const RelSub& s) {
    return interior_oracle(make_oracle(ctx), s);
}

RelSub closure_oracle(const ModalContext& ctx, const RelSub& s) {
    return closure_oracle(make_oracle(ctx), s);
}

RelationReport check_relation(const InternalRelation& r) {
    return RelationReport{relation_flags(r), relation_validate(r)};
}

// ---------------------------------------------------------------------------
// Law checking

namespace {

struct Ops {
    std::function<RelSub(const RelSub&)> box;
    std::function<RelSub(const RelSub&)> dia;
};

Ops make_ops(const ModalContext& ctx) {
    if (ctx.mode == ModalMode::Fast)
        return Ops{[ctx](const RelSub& s) { return interior(ctx, s); },
                   [ctx](const RelSub& s) { return closure(ctx, s); }};
    auto oracle = std::make_shared<OracleOps>(make_oracle(ctx));
    return Ops{[oracle](const RelSub& s) { return interior_oracle(*oracle, s); },
               [oracle](const RelSub& s) { return closure_oracle(*oracle, s); }};
}

// per-stage pool of power elements: exhaustive below the limit, seeded
// samples above it
struct Pool {
    std::vector<std::vector<RelSub>> per_stage;
    bool exhaustive = true;
};

RelSub random_relsub(const Presheaf& x, int c, std::mt19937_64& rng) {
    const FinPoset& p = x.base();
    RelSub s = relsub_empty(x, c);
    // choose top-down so the downward closure can be added afterwards
    std::vector<int> stages = p.downset(c);
    for (auto it = stages.rbegin(); it != stages.rend(); ++it) {
        int d = *it;
        for (int a = 0; a < x.fiber_size(d); ++a)
            if (rng() & 1) s.members[d].set(a);
    }
    // close downward
    for (int d = 0; d < p.size(); ++d) {
        if (!p.leq(d, c)) continue;
        for (int e = 0; e < p.size(); ++e) {
            if (e == d || !p.leq(e, d)) continue;
            for (int a = s.members[d].first(); a >= 0; a = s.members[d].next(a))
                s.members[e].set(x.restricted(d, a, e));
        }
    }
    return s;
}

Pool make_pool(const ModalContext& ctx, std::uint64_t seed, long samples) {
    const Presheaf& x = *ctx.x;
    const FinPoset& p = x.base();
    Pool pool;
    pool.per_stage.resize(p.size());
    for (int c = 0; c < p.size(); ++c) {
        PowerEnum en = power_elements(x, c, ctx.limit);
        if (!en.truncated) {
            pool.per_stage[c] = std::move(en.elements);
        } else {
            pool.exhaustive = false;
            std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (c + 1)));
            std::vector<RelSub> sampled;
            for (long i = 0; i < samples; ++i) sampled.push_back(random_relsub(x, c, rng));
            std::sort(sampled.begin(), sampled.end());
            sampled.erase(std::unique(sampled.begin(), sampled.end()), sampled.end());
            pool.per_stage[c] = std::move(sampled);
        }
    }
    return pool;
}

std::optional<LawWitness> leq_witness(int stage, const RelSub& s, const std::optional<RelSub>& u,
                                      const RelSub& lhs, const RelSub& rhs) {
    const FinPoset& p = s.of->base();
    for (int d = 0; d < p.size(); ++d) {
        if (!p.leq(d, lhs.at)) continue;
        for (int a = lhs.members[d].first(); a >= 0; a = lhs.members[d].next(a))
            if (!rhs.members[d].test(a)) {
                LawWitness w;
                w.stage = stage;
                w.s = s;
                w.u = u;
                w.fail_stage = d;
                w.fail_elem = a;
                return w;
            }
    }
    return std::nullopt;
}

struct Checker {
    const ModalContext& ctx;
    const Pool& pool;
    const Ops& ops;
    LawReport& report;

    void unary(const std::string& name, const std::string& group,
               const std::function<std::pair<RelSub, RelSub>(const RelSub&)>& sides) {
        LawResult res;
        res.name = name;
        res.group = group;
        const FinPoset& p = ctx.x->base();
        for (int c = 0; c < p.size() && res.holds; ++c)
            for (const RelSub& s : pool.per_stage[c]) {
                auto [lhs, rhs] = sides(s);
                res.vacuous = false;
                ++res.checked;
                if (auto w = leq_witness(c, s, std::nullopt, lhs, rhs)) {
                    res.holds = false;
                    res.witness = std::move(w);
                    break;
                }
            }
        report.laws.push_back(std::move(res));
    }

    void binary(const std::string& name, const std::string& group,
                const std::function<std::pair<RelSub, RelSub>(const RelSub&, const RelSub&)>& sides,
                bool only_ordered_pairs = false) {
        LawResult res;
        res.name = name;
        res.group = group;
        const FinPoset& p = ctx.x->base();
        std::uint64_t h = 1469598103934665603ULL;
        for (char ch : name) h = (h ^ std::uint64_t(ch)) * 1099511628211ULL;
        std::mt19937_64 rng(report.regime.seed ^ h);
        for (int c = 0; c < p.size() && res.holds; ++c) {
            const auto& pool_c = pool.per_stage[c];
            long n = long(pool_c.size());
            bool full = n * n <= report.regime.limit;
            long trials = full ? n * n : std::min<long>(report.regime.samples, n * n);
            if (!full) report.regime.exhaustive = false;
            for (long t = 0; t < trials && res.holds; ++t) {
                const RelSub& s = full ? pool_c[t / n] : pool_c[rng() % n];
                RelSub u = full ? pool_c[t % n] : pool_c[rng() % n];
                if (only_ordered_pairs) {
                    if (full && !px_leq(s, u)) continue;
                    if (!full) u = px_join(s, u);  // sampled pairs are made comparable
                }
                auto [lhs, rhs] = sides(s, u);
                res.vacuous = false;
                ++res.checked;
                if (auto w = leq_witness(c, s, u, lhs, rhs)) {
                    res.holds = false;
                    res.witness = std::move(w);
                }
            }
        }
        report.laws.push_back(std::move(res));
    }
};

void add_is4_laws(Checker& ck) {
    const Ops& ops = ck.ops;
    ck.unary("interior_counit", "IS4",
             [&](const RelSub& s) { return std::pair(ops.box(s), s); });
    ck.unary("interior_comultiplication", "IS4", [&](const RelSub& s) {
        RelSub b = ops.box(s);
        return std::pair(b, ops.box(b));
    });
    ck.unary("closure_unit", "IS4",
             [&](const RelSub& s) { return std::pair(s, ops.dia(s)); });
    ck.unary("closure_multiplication", "IS4", [&](const RelSub& s) {
        RelSub d = ops.dia(s);
        return std::pair(ops.dia(d), d);
    });
    ck.binary("strength", "IS4", [&](const RelSub& s, const RelSub& u) {
        RelSub boxed = ops.box(s);
        return std::pair(px_meet(boxed, ops.dia(u)), ops.dia(px_meet(boxed, u)));
    });
    ck.binary("interior_monotone", "IS4",
              [&](const RelSub& s, const RelSub& u) { return std::pair(ops.box(s), ops.box(u)); },
              /*only_ordered_pairs=*/true);
    ck.binary("closure_monotone", "IS4",
              [&](const RelSub& s, const RelSub& u) { return std::pair(ops.dia(s), ops.dia(u)); },
              /*only_ordered_pairs=*/true);
}

void add_mao_laws(Checker& ck) {
    const Ops& ops = ck.ops;
    ck.unary("adjunction_unit", "MAO",
             [&](const RelSub& s) { return std::pair(s, ops.box(ops.dia(s))); });
    ck.unary("adjunction_counit", "MAO",
             [&](const RelSub& s) { return std::pair(ops.dia(ops.box(s)), s); });
    // equalities split into the two containments so a witness names the side
    ck.unary("interior_idempotent", "MAO", [&](const RelSub& s) {
        RelSub b = ops.box(s);
        RelSub bb = ops.box(b);
        return px_leq(b, bb) ? std::pair(bb, b) : std::pair(b, bb);
    });
    ck.unary("closure_idempotent", "MAO", [&](const RelSub& s) {
        RelSub d = ops.dia(s);
        RelSub dd2 = ops.dia(d);
        return px_leq(dd2, d) ? std::pair(d, dd2) : std::pair(dd2, d);
    });
    ck.binary("frobenius", "MAO", [&](const RelSub& s, const RelSub& u) {
        RelSub boxed = ops.box(u);
        RelSub lhs = ops.dia(px_meet(s, boxed));
        RelSub rhs = px_meet(ops.dia(s), boxed);
        return px_leq(lhs, rhs) ? std::pair(rhs, lhs) : std::pair(lhs, rhs);
    });
    ck.unary("distributive", "distributive",
             [&](const RelSub& s) { return std::pair(ops.dia(ops.box(s)), ops.box(ops.dia(s))); });
}

}  // namespace

const LawResult* LawReport::find(const std::string& name) const {
    for (const auto& l : laws)
        if (l.name == name) return &l;
    return nullptr;
}

bool LawReport::all_hold() const {
    for (const auto& l : laws)
        if (!l.holds) return false;
    return true;
}

static LawReport run_checks(const ModalContext& ctx, std::uint64_t seed, bool is4, bool mao) {
    LawReport report;
    report.regime.limit = ctx.limit;
    report.regime.seed = seed;
    report.flags = relation_flags(*ctx.r);
    Pool pool = make_pool(ctx, seed, report.regime.samples);
    report.regime.exhaustive = pool.exhaustive;
    Ops ops = make_ops(ctx);
    Checker ck{ctx, pool, ops, report};
    if (is4) add_is4_laws(ck);
    if (mao) add_mao_laws(ck);
    return report;
}

LawReport check_is4(const ModalContext& ctx, std::uint64_t seed) {
    return run_checks(ctx, seed, true, false);
}

LawReport check_mao(const ModalContext& ctx, std::uint64_t seed) {
    return run_checks(ctx, seed, false, true);
}

LawReport check_laws(const ModalContext& ctx, std::uint64_t seed) {
    return run_checks(ctx, seed, true, true);
}

std::vector<std::string> law_names() {
    return {"interior_counit",     "interior_comultiplication",
            "closure_unit",        "closure_multiplication",
            "strength",            "interior_monotone",
            "closure_monotone",    "adjunction_unit",
            "adjunction_counit",   "interior_idempotent",
            "closure_idempotent",  "frobenius",
            "distributive"};
}

std::vector<std::string> expected_laws(const RelationFlags& flags) {
    std::vector<std::string> out{"interior_monotone", "closure_monotone"};
    if (flags.all_reflexive) {
        out.push_back("interior_counit");
        out.push_back("closure_unit");
    }
    if (flags.all_transitive) {
        out.push_back("interior_comultiplication");
        out.push_back("closure_multiplication");
        out.push_back("strength");
    }
    if (flags.preorder()) {
        out.push_back("interior_idempotent");
        out.push_back("closure_idempotent");
    }
    if (flags.equivalence()) {
        out.push_back("adjunction_unit");
        out.push_back("adjunction_counit");
        out.push_back("frobenius");
        out.push_back("distributive");
    }
    return out;
}

CounterexampleSearch find_counterexample(const ModalContext& ctx, const std::string& law,
                                         long budget) {
    auto names = law_names();
    if (std::find(names.begin(), names.end(), law) == names.end())
        fail(ErrorKind::InvalidModel, "unknown law '" + law + "'");

    Ops ops = make_ops(ctx);
    const Presheaf& x = *ctx.x;
    const FinPoset& p = x.base();

    CounterexampleSearch out{CounterexampleSearch::Outcome::NoneByExhaustion, std::nullopt, 0};

    auto unary_sides = [&](const RelSub& s) -> std::optional<std::pair<RelSub, RelSub>> {
        if (law == "interior_counit") return std::pair(ops.box(s), s);
        if (law == "interior_comultiplication") {
            RelSub b = ops.box(s);
            return std::pair(b, ops.box(b));
        }
        if (law == "closure_unit") return std::pair(s, ops.dia(s));
        if (law == "closure_multiplication") {
            RelSub d = ops.dia(s);
            return std::pair(ops.dia(d), d);
        }
        if (law == "adjunction_unit") return std::pair(s, ops.box(ops.dia(s)));
        if (law == "adjunction_counit") return std::pair(ops.dia(ops.box(s)), s);
        if (law == "distributive") return std::pair(ops.dia(ops.box(s)), ops.box(ops.dia(s)));
        if (law == "interior_idempotent") {
            RelSub b = ops.box(s);
            RelSub bb = ops.box(b);
            return px_leq(b, bb) ? std::pair(bb, b) : std::pair(b, bb);
        }
        if (law == "closure_idempotent") {
            RelSub d = ops.dia(s);
            RelSub dd2 = ops.dia(d);
            return px_leq(dd2, d) ? std::pair(d, dd2) : std::pair(dd2, d);
        }
        return std::nullopt;
    };

    bool is_binary = law == "strength" || law == "frobenius" || law == "interior_monotone" ||
                     law == "closure_monotone";

    for (int c = 0; c < p.size(); ++c) {
        PowerEnum en = power_elements(x, c, budget > 0 ? budget : 0);
        if (en.truncated) out.outcome = CounterexampleSearch::Outcome::BudgetExceeded;
        if (!is_binary) {
            for (const RelSub& s : en.elements) {
                if (budget > 0 && out.inspected >= budget) {
                    out.outcome = CounterexampleSearch::Outcome::BudgetExceeded;
                    return out;
                }
                ++out.inspected;
                auto sides = unary_sides(s);
                if (auto w = leq_witness(c, s, std::nullopt, sides->first, sides->second)) {
                    out.outcome = CounterexampleSearch::Outcome::Found;
                    out.witness = std::move(w);
                    return out;
                }
            }
        } else {
            for (const RelSub& s : en.elements)
                for (const RelSub& u : en.elements) {
                    if (budget > 0 && out.inspected >= budget) {
                        out.outcome = CounterexampleSearch::Outcome::BudgetExceeded;
                        return out;
                    }
                    bool monotone = law == "interior_monotone" || law == "closure_monotone";
                    if (monotone && !px_leq(s, u)) continue;
                    ++out.inspected;
                    std::pair<RelSub, RelSub> sides = [&] {
                        if (law == "strength") {
                            RelSub boxed = ops.box(s);
                            return std::pair(px_meet(boxed, ops.dia(u)),
                                             ops.dia(px_meet(boxed, u)));
                        }
                        if (law == "frobenius") {
                            RelSub boxed = ops.box(u);
                            RelSub lhs = ops.dia(px_meet(s, boxed));
                            RelSub rhs = px_meet(ops.dia(s), boxed);
                            return px_leq(lhs, rhs) ? std::pair(rhs, lhs) : std::pair(lhs, rhs);
                        }
                        if (law == "interior_monotone") return std::pair(ops.box(s), ops.box(u));
                        return std::pair(ops.dia(s), ops.dia(u));
                    }();
                    if (auto w = leq_witness(c, s, u, sides.first, sides.second)) {
                        out.outcome = CounterexampleSearch::Outcome::Found;
                        out.witness = std::move(w);
                        return out;
                    }
                }
        }
    }
    return out;
}

}  // namespace topos
