#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "gen.hpp"
#include "topos/bst.hpp"
#include "topos/modal.hpp"

using namespace topos;

namespace {

FinPoset w4() {
    return FinPoset::from_covers({"e-1", "e0", "e1", "e2"},
                                 {{"e-1", "e0"}, {"e0", "e1"}, {"e0", "e2"}});
}

FinPoset double_fork() {
    return FinPoset::from_covers(
        {"e", "x", "y", "m1", "m2", "m3"},
        {{"e", "x"}, {"e", "y"}, {"x", "m1"}, {"x", "m2"}, {"y", "m2"}, {"y", "m3"}});
}

FinPoset chain3() {
    return FinPoset::from_covers({"0", "1", "2"}, {{"0", "1"}, {"1", "2"}});
}

bool directed(const FinPoset& p, const Bits& d) {
    for (int a = d.first(); a >= 0; a = d.next(a))
        for (int b = d.first(); b >= 0; b = d.next(b)) {
            bool bounded = false;
            for (int z = d.first(); z >= 0; z = d.next(z))
                if (p.leq(a, z) && p.leq(b, z)) {
                    bounded = true;
                    break;
                }
            if (!bounded) return false;
        }
    return true;
}

// every maximal directed subset, by exhaustive search
std::set<std::vector<int>> brute_force_histories(const FinPoset& p) {
    int n = p.size();
    std::vector<Bits> dirs;
    for (std::uint64_t m = 1; m < (std::uint64_t(1) << n); ++m) {
        Bits d(n);
        for (int i = 0; i < n; ++i)
            if ((m >> i) & 1) d.set(i);
        if (directed(p, d)) dirs.push_back(d);
    }
    std::set<std::vector<int>> out;
    for (const Bits& d : dirs) {
        bool maximal = true;
        for (const Bits& e : dirs)
            if (d != e && d.subset_of(e)) {
                maximal = false;
                break;
            }
        if (maximal) {
            std::vector<int> v;
            for (int i = d.first(); i >= 0; i = d.next(i)) v.push_back(i);
            out.insert(v);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("histories of the four-event world") {
    FinPoset p = w4();
    auto hs = histories(p);
    REQUIRE(hs.size() == 2);
    CHECK(hs[0].id == "h1");
    CHECK(p.name(hs[0].max_event) == "e1");
    Bits h1(p.size());
    h1.set(p.index("e-1"));
    h1.set(p.index("e0"));
    h1.set(p.index("e1"));
    CHECK(hs[0].events == h1);
    CHECK(hs[1].id == "h2");
    Bits h2(p.size());
    h2.set(p.index("e-1"));
    h2.set(p.index("e0"));
    h2.set(p.index("e2"));
    CHECK(hs[1].events == h2);

    CHECK(histories(chain3()).size() == 1);
    CHECK(histories(double_fork()).size() == 3);
    CHECK_THROWS_AS(histories(FinPoset::from_covers({}, {})), Error);
}

TEST_CASE("histories equal maximal directed subsets") {
    std::mt19937_64 rng(79);
    for (int round = 0; round < 100; ++round) {
        FinPoset p = topos_gen::random_poset(rng, 6);
        auto hs = histories(p);
        std::set<std::vector<int>> got;
        for (const auto& h : hs) {
            std::vector<int> v;
            for (int i = h.events.first(); i >= 0; i = h.events.next(i)) v.push_back(i);
            got.insert(v);
        }
        CHECK(got == brute_force_histories(p));
    }
}

TEST_CASE("histories presheaf fibers and restriction") {
    FinPoset p = w4();
    auto hs = histories(p);
    Presheaf h = histories_presheaf(p, hs);
    CHECK(h.fiber_size(p.index("e-1")) == 2);
    CHECK(h.fiber_size(p.index("e0")) == 2);
    CHECK(h.fiber_size(p.index("e1")) == 1);
    CHECK(h.fiber_size(p.index("e2")) == 1);

    // restriction acts as the identity on ids
    int e1 = p.index("e1"), e0 = p.index("e0");
    int at_e1 = h.elem_index(e1, "h1");
    CHECK(h.elem_name(e0, h.restricted(e1, at_e1, e0)) == "h1");

    FinPoset c = chain3();
    Presheaf hc = histories_presheaf(c, histories(c));
    for (int e = 0; e < c.size(); ++e) CHECK(hc.fiber_size(e) == 1);

    // every event lies in some history
    std::mt19937_64 rng(83);
    for (int round = 0; round < 50; ++round) {
        FinPoset q = topos_gen::random_poset(rng, 6);
        Presheaf hq = histories_presheaf(q, histories(q));
        for (int e = 0; e < q.size(); ++e) CHECK(hq.fiber_size(e) >= 1);
    }
}

TEST_CASE("the undivided relation on the four-event world") {
    FinPoset p = w4();
    auto bm = build_model(p);
    int em1 = p.index("e-1"), e0 = p.index("e0"), e1 = p.index("e1"), e2 = p.index("e2");
    // total at the root
    CHECK(bm->undivided.adj[em1][0].count() == 2);
    CHECK(bm->undivided.adj[em1][1].count() == 2);
    // diagonal at the choice point
    CHECK(bm->undivided.related(e0, 0, 0));
    CHECK(!bm->undivided.related(e0, 0, 1));
    CHECK(!bm->undivided.related(e0, 1, 0));
    // vacuity at the maxima
    CHECK(bm->undivided.related(e1, 0, 0));
    CHECK(bm->undivided.related(e2, 0, 0));
}

TEST_CASE("undivided is reflexive, symmetric, restriction-monotone") {
    std::mt19937_64 rng(89);
    for (int round = 0; round < 50; ++round) {
        FinPoset p = topos_gen::random_poset(rng, 6);
        auto bm = build_model(p);
        RelationFlags flags = relation_flags(bm->undivided);
        CHECK(flags.all_reflexive);
        CHECK(flags.all_symmetric);
        CHECK(relation_validate(bm->undivided).ok());  // subobject of H x H
    }
}

TEST_CASE("choice points") {
    FinPoset p = w4();
    auto bm = build_model(p);
    REQUIRE(bm->choices.size() == 1);
    CHECK(p.name(bm->choices[0].event) == "e0");
    CHECK(bm->hs[bm->choices[0].h1].id == "h1");
    CHECK(bm->hs[bm->choices[0].h2].id == "h2");

    CHECK(build_model(chain3())->choices.empty());

    FinPoset fork = double_fork();
    auto fm = build_model(fork);
    REQUIRE(fm->choices.size() == 3);
    std::set<std::pair<std::string, std::pair<std::string, std::string>>> got;
    for (const auto& cp : fm->choices)
        got.insert({fork.name(cp.event), {fm->hs[cp.h1].id, fm->hs[cp.h2].id}});
    std::set<std::pair<std::string, std::pair<std::string, std::string>>> want{
        {"x", {"h1", "h2"}}, {"y", {"h2", "h3"}}, {"e", {"h1", "h3"}}};
    CHECK(got == want);
}

TEST_CASE("build_model flags MAO eligibility") {
    auto wm = build_model(w4());
    CHECK(wm->mao_eligible);
    CHECK(wm->flags.equivalence());

    auto fm = build_model(double_fork());
    CHECK(!fm->mao_eligible);
    REQUIRE(fm->flags.transitivity_witness.has_value());
    CHECK(double_fork().name((*fm->flags.transitivity_witness)[0]) == "e");

    auto cm = build_model(chain3());
    CHECK(cm->mao_eligible);
}

TEST_CASE("equivalence worlds satisfy the MAO laws") {
    std::mt19937_64 rng(97);
    int eligible_seen = 0;
    for (int round = 0; round < 30; ++round) {
        FinPoset p = topos_gen::random_poset(rng, 4);
        auto bm = build_model(p);
        if (!bm->mao_eligible) continue;
        ++eligible_seen;
        ModalContext ctx{bm->h.get(), &bm->undivided};
        CHECK(check_mao(ctx).all_hold());
        CHECK(check_is4(ctx).all_hold());
    }
    CHECK(eligible_seen > 0);
}
