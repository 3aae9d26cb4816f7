#ifndef TOPOS_MODEL_HPP
#define TOPOS_MODEL_HPP

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "topos/bst.hpp"
#include "topos/formula.hpp"
#include "topos/modal.hpp"

namespace topos {

// A loaded model file: the base poset plus named presheaves, relations,
// subobjects and formulas. With the bst builtin the histories presheaf `H`
// and the relation `undivided` are derived from the poset. Components that
// fail validation are recorded in `issues` and left unregistered, so the
// check command can report them; every other command refuses such a model.
class Model {
public:
    Model() = default;
    Model(const Model&) = delete;
    Model& operator=(const Model&) = delete;

    FinPoset poset;
    bool poset_ok = false;
    std::unique_ptr<Omega> om;

    struct NamedPresheaf {
        std::string name;
        const Presheaf* ps = nullptr;
        std::unique_ptr<Presheaf> owned;  // null when aliasing a derived presheaf
    };
    struct NamedRelation {
        std::string name;
        const InternalRelation* rel = nullptr;
        std::unique_ptr<InternalRelation> owned;
    };
    struct NamedSub {
        std::string name;
        std::unique_ptr<SubPresheaf> sub;
    };

    std::vector<NamedPresheaf> presheaves;
    std::vector<NamedRelation> relations;
    std::vector<NamedSub> subobjects;
    std::vector<std::pair<std::string, std::string>> formulas;

    bool bst = false;
    std::unique_ptr<BstModel> bst_model;

    std::vector<std::pair<std::string, ValidationReport>> issues;

    bool ok() const { return poset_ok && issues.empty(); }
    void require_valid() const;  // throws InvalidModel when !ok()

    const Presheaf* find_presheaf(const std::string& name) const;
    const InternalRelation* find_relation(const std::string& name) const;
    const SubPresheaf* find_subobject(const std::string& name) const;
    const std::string* find_formula(const std::string& name) const;

    EvalModel eval_view() const;
};

std::unique_ptr<Model> load_model_text(const std::string& json_text);  // ParseError on bad JSON
std::unique_ptr<Model> load_model_file(const std::string& path);       // Io / ParseError

}  // namespace topos

#endif
