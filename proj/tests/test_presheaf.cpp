#include <random>

#include "doctest.h"
#include "gen.hpp"
#include "topos/bst.hpp"
#include "topos/presheaf.hpp"

using namespace topos;

namespace {

struct W4 {
    FinPoset p;
    std::vector<History> hs;
    Presheaf h;
    Omega om;

    W4()
        : p(FinPoset::from_covers({"e-1", "e0", "e1", "e2"},
                                  {{"e-1", "e0"}, {"e0", "e1"}, {"e0", "e2"}})),
          hs(histories(p)),
          h(histories_presheaf(p, hs)),
          om(omega(p)) {}

    SubPresheaf history_sub(const char* id) const {
        std::vector<Bits> members;
        for (int c = 0; c < p.size(); ++c) {
            Bits b(h.fiber_size(c));
            int i = h.elem_find(c, id);
            if (i >= 0) b.set(i);
            members.push_back(b);
        }
        return SubPresheaf::create(h, std::move(members));
    }
};

}  // namespace

TEST_CASE("validate accepts the histories presheaf and reports breakage") {
    W4 w;
    PresheafData good;
    good.base = &w.p;
    good.label = "H";
    good.fibers = {{"h1", "h2"}, {"h1", "h2"}, {"h1"}, {"h2"}};
    good.maps[{1, 0}] = {0, 1};
    good.maps[{2, 1}] = {0};
    good.maps[{3, 1}] = {1};
    CHECK(Presheaf::validate(good).ok());

    PresheafData bad_id = good;
    bad_id.maps[{0, 0}] = {1, 0};  // identity at e-1 swapped
    ValidationReport rep = Presheaf::validate(bad_id);
    CHECK(!rep.ok());
    CHECK(rep.to_string().find("identity") != std::string::npos);

    // composite mismatch on a 3-chain: the direct a<=c map contradicts b o a
    FinPoset chain = FinPoset::from_covers({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}});
    PresheafData mism;
    mism.base = &chain;
    mism.label = "X";
    mism.fibers = {{"u", "v"}, {"u", "v"}, {"u", "v"}};
    mism.maps[{2, 1}] = {0, 1};
    mism.maps[{1, 0}] = {0, 1};
    mism.maps[{2, 0}] = {1, 0};  // disagrees with the composite
    ValidationReport rep2 = Presheaf::validate(mism);
    CHECK(!rep2.ok());
    CHECK(rep2.to_string().find("composite") != std::string::npos);

    PresheafData notot = good;
    notot.maps[{1, 0}] = {0};  // not total
    CHECK(!Presheaf::validate(notot).ok());
}

TEST_CASE("omega carriers and restriction") {
    W4 w;
    CHECK(w.om.ps.fiber_size(w.p.index("e-1")) == 2);
    CHECK(w.om.ps.fiber_size(w.p.index("e0")) == 3);
    CHECK(w.om.ps.fiber_size(w.p.index("e1")) == 4);
    CHECK(w.om.ps.fiber_size(w.p.index("e2")) == 4);

    FinPoset single = FinPoset::from_covers({"a"}, {});
    CHECK(omega(single).ps.fiber_size(0) == 2);

    // restriction along e0 <= e2 cuts {e-1,e0,e2} down to {e-1,e0}
    int e2 = w.p.index("e2"), e0 = w.p.index("e0");
    int k = w.om.index_of(e2, w.p.downset_bits(e2));
    int k0 = w.om.ps.restricted(e2, k, e0);
    CHECK(w.om.sieve(e0, k0).members == w.p.downset_bits(e0));
}

TEST_CASE("products, terminal, projections") {
    W4 w;
    Product hh = product(w.h, w.h);
    CHECK(hh.ps.fiber_size(w.p.index("e0")) == 4);
    Presheaf one = terminal_presheaf(w.p);
    Product h1 = product(w.h, one);
    for (int c = 0; c < w.p.size(); ++c) CHECK(h1.ps.fiber_size(c) == w.h.fiber_size(c));
    NatTrans pr0 = hh.projection(0);
    NatTrans pr1 = hh.projection(1);
    CHECK(NatTrans::validate(pr0).ok());
    CHECK(NatTrans::validate(pr1).ok());
    NatTrans paired = pairing(pr0, pr1, hh);
    CHECK(paired == identity_nat(hh.ps));
}

TEST_CASE("yoneda presheaves") {
    W4 w;
    Presheaf y2 = yoneda(w.p, w.p.index("e2"));
    CHECK(y2.fiber_size(w.p.index("e-1")) == 1);
    CHECK(y2.fiber_size(w.p.index("e0")) == 1);
    CHECK(y2.fiber_size(w.p.index("e1")) == 0);
    CHECK(y2.fiber_size(w.p.index("e2")) == 1);
    Presheaf ybot = yoneda(w.p, w.p.index("e-1"));
    CHECK(ybot.fiber_size(w.p.index("e-1")) == 1);
    CHECK(ybot.fiber_size(w.p.index("e0")) == 0);
}

// natural families y(c) -> X counted by brute force equal |X(c)|
TEST_CASE("maps out of representables are elements") {
    std::mt19937_64 rng(23);
    for (int round = 0; round < 10; ++round) {
        FinPoset p = topos_gen::random_poset(rng, 4);
        Presheaf x = topos_gen::random_presheaf(rng, p);
        for (int c = 0; c < p.size(); ++c) {
            std::vector<int> stages = p.downset(c);
            bool empty_below = false;
            for (int d : stages)
                if (x.fiber_size(d) == 0) empty_below = true;
            if (empty_below) continue;

            auto natural = [&](const std::vector<int>& choice) {
                for (std::size_t i = 0; i < stages.size(); ++i)
                    for (std::size_t j = 0; j < stages.size(); ++j) {
                        int d = stages[i], e = stages[j];
                        if (!p.leq(e, d)) continue;
                        if (x.restricted(d, choice[i], e) != choice[j]) return false;
                    }
                return true;
            };
            long count = 0;
            std::vector<int> choice(stages.size(), 0);
            while (true) {
                if (natural(choice)) ++count;
                std::size_t i = 0;
                while (i < stages.size() && ++choice[i] == x.fiber_size(stages[i])) {
                    choice[i] = 0;
                    ++i;
                }
                if (i == stages.size()) break;
            }
            CHECK(count == x.fiber_size(c));
        }
    }
}

TEST_CASE("classify computes the expected sieves") {
    W4 w;
    NatTrans phi = classify(w.history_sub("h1"), w.om);
    int em1 = w.p.index("e-1"), e0 = w.p.index("e0"), e1 = w.p.index("e1");

    Forcing f = forces(phi, w.om, em1, w.h.elem_index(em1, "h2"));
    CHECK(!f.forced);
    CHECK(f.value.members.none());

    f = forces(phi, w.om, e0, w.h.elem_index(e0, "h2"));
    CHECK(f.value.members.none());

    f = forces(phi, w.om, e1, w.h.elem_index(e1, "h1"));
    CHECK(f.forced);

    NatTrans top = classify(SubPresheaf::full(w.h), w.om);
    for (int c = 0; c < w.p.size(); ++c)
        for (int a = 0; a < w.h.fiber_size(c); ++a) CHECK(forces(top, w.om, c, a).forced);
}

TEST_CASE("subobject_of inverts classify") {
    W4 w;
    SubPresheaf h1 = w.history_sub("h1");
    CHECK(subobject_of(classify(h1, w.om), w.om) == h1);
    NatTrans top = classify(SubPresheaf::full(w.h), w.om);
    CHECK(subobject_of(top, w.om) == SubPresheaf::full(w.h));
    SubPresheaf back = subobject_of(classify(h1, w.om), w.om);
    int em1 = w.p.index("e-1");
    CHECK(!back.members[em1].test(w.h.elem_index(em1, "h2")));
}

TEST_CASE("classifier bijection on random models") {
    std::mt19937_64 rng(29);
    for (int round = 0; round < 60; ++round) {
        FinPoset p = topos_gen::random_poset(rng, 4);
        Presheaf x = topos_gen::random_presheaf(rng, p);
        Omega om = omega(p);
        SubPresheaf s = topos_gen::random_subpresheaf(rng, x);
        NatTrans chi = classify(s, om);
        CHECK(subobject_of(chi, om) == s);
        CHECK(classify(subobject_of(chi, om), om) == chi);
    }
}

TEST_CASE("equality predicate") {
    W4 w;
    Product hh = product(w.h, w.h);
    NatTrans eq = equality_predicate(hh, w.om);
    int e0 = w.p.index("e0");
    int t = hh.encode(e0, {w.h.elem_index(e0, "h1"), w.h.elem_index(e0, "h2")});
    CHECK(forces(eq, w.om, e0, t).value.members.none());
    for (int c = 0; c < w.p.size(); ++c)
        for (int a = 0; a < w.h.fiber_size(c); ++a)
            CHECK(forces(eq, w.om, c, hh.encode(c, {a, a})).forced);

    // distinct at the top, merged by the restriction below
    FinPoset chain = FinPoset::from_covers({"b", "t"}, {{"b", "t"}});
    PresheafData d;
    d.base = &chain;
    d.label = "M";
    d.fibers = {{"w"}, {"u", "v"}};
    d.maps[{1, 0}] = {0, 0};
    Presheaf merged = Presheaf::create(std::move(d));
    Omega om2 = omega(chain);
    Product mm = product(merged, merged);
    NatTrans eq2 = equality_predicate(mm, om2);
    Forcing f = forces(eq2, om2, 1, mm.encode(1, {0, 1}));
    Bits expect(2);
    expect.set(0);  // exactly the strictly-lower stage
    CHECK(f.value.members == expect);

    // the identity predicate classifies the diagonal
    CHECK(subobject_of(eq2, om2) == diagonal_sub(mm));
}

TEST_CASE("kernel relations") {
    W4 w;
    Product hh = product(w.h, w.h);
    CHECK(kernel_relation(identity_nat(w.h), hh) == diagonal_sub(hh));
    Presheaf one = terminal_presheaf(w.p);
    CHECK(kernel_relation(to_terminal(w.h, one), hh) == SubPresheaf::full(hh.ps));
}

TEST_CASE("Heyting operations on subobjects") {
    W4 w;
    SubPresheaf h1 = w.history_sub("h1"), h2 = w.history_sub("h2");
    CHECK(sub_implies(h1, h1) == SubPresheaf::full(w.h));
    SubPresheaf imp = sub_implies(h1, SubPresheaf::none(w.h));
    CHECK(imp.members[w.p.index("e1")].none());
    SubPresheaf meet = sub_meet(h1, h2);
    for (int c = 0; c < w.p.size(); ++c) CHECK(meet.members[c].none());
}

TEST_CASE("Sub(X) is a Heyting algebra") {
    std::mt19937_64 rng(31);
    for (int round = 0; round < 60; ++round) {
        FinPoset p = topos_gen::random_poset(rng, 4);
        Presheaf x = topos_gen::random_presheaf(rng, p);
        SubPresheaf s = topos_gen::random_subpresheaf(rng, x);
        SubPresheaf a = topos_gen::random_subpresheaf(rng, x);
        SubPresheaf b = topos_gen::random_subpresheaf(rng, x);
        CHECK(sub_leq(sub_meet(s, a), b) == sub_leq(s, sub_implies(a, b)));
    }
}

TEST_CASE("forcing persists under restriction") {
    std::mt19937_64 rng(37);
    for (int round = 0; round < 40; ++round) {
        FinPoset p = topos_gen::random_poset(rng, 4);
        Presheaf x = topos_gen::random_presheaf(rng, p);
        Omega om = omega(p);
        NatTrans phi = classify(topos_gen::random_subpresheaf(rng, x), om);
        for (int c = 0; c < p.size(); ++c)
            for (int a = 0; a < x.fiber_size(c); ++a) {
                if (!forces(phi, om, c, a).forced) continue;
                for (int d = 0; d < p.size(); ++d)
                    if (p.leq(d, c)) CHECK(forces(phi, om, d, x.restricted(c, a, d)).forced);
            }
    }
}
