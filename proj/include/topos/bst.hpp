#ifndef TOPOS_BST_HPP
#define TOPOS_BST_HPP

#include <memory>
#include <string>
#include <vector>

#include "topos/power.hpp"

namespace topos {

// Maximal directed downward-closed event set. In a finite world these are
// exactly the principal downsets of maximal events, so each history carries
// its maximal event. Ids run h1, h2, ... following the canonical order of
// the maximal events.
struct History {
    std::string id;
    int max_event = -1;
    Bits events;
};

struct ChoicePoint {
    int event;
    int h1, h2;  // indices into the history list, h1 < h2
};

std::vector<History> histories(const FinPoset& w);  // throws EmptyWorld

// carrier(e) = histories containing e; restriction is identity on ids
Presheaf histories_presheaf(const FinPoset& w, const std::vector<History>& hs);

// (h, h') related at e when they share e and either e is maximal in the
// world or some strictly later event lies in both
InternalRelation undivided_relation(const FinPoset& w, const Presheaf& h,
                                    const std::vector<History>& hs);

// events maximal in the intersection of a pair of distinct histories
std::vector<ChoicePoint> choice_points(const FinPoset& w, const std::vector<History>& hs);

struct BstModel {
    const FinPoset* world = nullptr;
    std::vector<History> hs;
    std::unique_ptr<Presheaf> h;  // heap-held: the relation points into it
    InternalRelation undivided;
    std::vector<ChoicePoint> choices;
    RelationFlags flags;
    bool mao_eligible = false;
};

std::unique_ptr<BstModel> build_model(const FinPoset& w);

}  // namespace topos

#endif
