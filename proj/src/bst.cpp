#include "topos/bst.hpp"

namespace topos {

std::vector<History> histories(const FinPoset& w) {
    if (w.size() == 0) fail(ErrorKind::EmptyWorld, "the world has no point events");
    std::vector<History> out;
    int k = 0;
    for (int m : w.maximal_elements()) {
        History h;
        h.id = "h" + std::to_string(++k);
        h.max_event = m;
        h.events = w.downset_bits(m);
        out.push_back(std::move(h));
    }
    return out;
}

Presheaf histories_presheaf(const FinPoset& w, const std::vector<History>& hs) {
    PresheafData d;
    d.base = &w;
    d.label = "H";
    d.fibers.resize(w.size());
    // fiber(e) lists histories containing e, in id order
    std::vector<std::vector<int>> fiber_hist(w.size());
    for (int e = 0; e < w.size(); ++e)
        for (std::size_t i = 0; i < hs.size(); ++i)
            if (hs[i].events.test(e)) {
                d.fibers[e].push_back(hs[i].id);
                fiber_hist[e].push_back(int(i));
            }
    for (int c = 0; c < w.size(); ++c)
        for (int e = 0; e < w.size(); ++e) {
            if (!w.leq(e, c)) continue;
            std::vector<int> m(fiber_hist[c].size());
            for (std::size_t a = 0; a < fiber_hist[c].size(); ++a) {
                int target = -1;
                for (std::size_t b = 0; b < fiber_hist[e].size(); ++b)
                    if (fiber_hist[e][b] == fiber_hist[c][a]) target = int(b);
                m[a] = target;  // histories are downward-closed, so always found
            }
            d.maps[{c, e}] = std::move(m);
        }
    return Presheaf::create(std::move(d));
}

InternalRelation undivided_relation(const FinPoset& w, const Presheaf& h,
                                    const std::vector<History>& hs) {
    auto history_of = [&](int e, int a) {
        const std::string& id = h.elem_name(e, a);
        for (std::size_t i = 0; i < hs.size(); ++i)
            if (hs[i].id == id) return int(i);
        fail(ErrorKind::InvalidModel, "fiber element is not a declared history");
    };
    std::vector<bool> is_max(w.size(), false);
    for (int m : w.maximal_elements()) is_max[m] = true;

    std::vector<std::vector<Bits>> adj(w.size());
    for (int e = 0; e < w.size(); ++e) {
        int n = h.fiber_size(e);
        adj[e].assign(n, Bits(n));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const History& ha = hs[history_of(e, a)];
                const History& hb = hs[history_of(e, b)];
                bool related = false;
                if (is_max[e]) {
                    related = true;  // no strictly later events exist at all
                } else {
                    for (int ee = 0; ee < w.size(); ++ee)
                        if (ee != e && w.leq(e, ee) && ha.events.test(ee) && hb.events.test(ee)) {
                            related = true;
                            break;
                        }
                }
                if (related) adj[e][a].set(b);
            }
    }
    return relation_create(h, std::move(adj));
}

std::vector<ChoicePoint> choice_points(const FinPoset& w, const std::vector<History>& hs) {
    std::vector<ChoicePoint> out;
    for (int e = 0; e < w.size(); ++e)
        for (std::size_t i = 0; i < hs.size(); ++i)
            for (std::size_t j = i + 1; j < hs.size(); ++j) {
                Bits common = hs[i].events & hs[j].events;
                if (!common.test(e)) continue;
                bool maximal = true;
                for (int ee = common.first(); ee >= 0; ee = common.next(ee))
                    if (ee != e && w.leq(e, ee)) {
                        maximal = false;
                        break;
                    }
                if (maximal) out.push_back(ChoicePoint{e, int(i), int(j)});
            }
    return out;
}

std::unique_ptr<BstModel> build_model(const FinPoset& w) {
    auto m = std::make_unique<BstModel>();
    m->world = &w;
    m->hs = histories(w);
    m->h = std::make_unique<Presheaf>(histories_presheaf(w, m->hs));
    m->undivided = undivided_relation(w, *m->h, m->hs);
    m->choices = choice_points(w, m->hs);
    m->flags = relation_flags(m->undivided);
    m->mao_eligible = m->flags.equivalence();
    return m;
}

}  // namespace topos
