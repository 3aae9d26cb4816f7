#ifndef TOPOS_FORMULA_HPP
#define TOPOS_FORMULA_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "topos/power.hpp"

namespace topos {

enum class FKind {
    True,
    False,
    Atom,     // atom(term)
    Eq,       // term = term2
    ExistsE,  // E(term), sugar for exists y. term = y
    And,
    Or,
    Implies,
    Not,
    Box,
    Dia,
    Forall,
    Exists,
};

struct SourceSpan {
    int begin = 0, end = 0;
    int line = 1, col = 1;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    FKind kind = FKind::True;
    SourceSpan span;

    std::string atom;          // Atom
    std::string term, term2;   // Atom / Eq / ExistsE arguments
    FormulaPtr lhs, rhs;       // binary; unary ops use lhs
    std::string relation;      // Box/Dia qualifier ([]{R}), may be empty
    std::string modal_var;     // Box/Dia annotation ([]_x), may be empty
    std::string var, sort;     // Forall/Exists
};

FormulaPtr parse_formula(const std::string& text);  // throws ParseError
std::string print_formula(const Formula& f);
bool formula_equal(const Formula& a, const Formula& b);  // spans ignored

// node builders (spans zeroed)
FormulaPtr f_true();
FormulaPtr f_false();
FormulaPtr f_atom(std::string name, std::string term);
FormulaPtr f_eq(std::string t, std::string u);
FormulaPtr f_existse(std::string t);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_or(FormulaPtr a, FormulaPtr b);
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr f_not(FormulaPtr a);
FormulaPtr f_box(FormulaPtr a, std::string relation = "", std::string var = "");
FormulaPtr f_dia(FormulaPtr a, std::string relation = "", std::string var = "");
FormulaPtr f_forall(std::string var, std::string sort, FormulaPtr body);
FormulaPtr f_exists(std::string var, std::string sort, FormulaPtr body);

// What the evaluator needs to know about a model. Pointees must outlive the
// view.
struct EvalModel {
    const FinPoset* poset = nullptr;
    std::map<std::string, const Presheaf*> sorts;
    std::map<std::string, const SubPresheaf*> atoms;  // atom sort = atoms[n]->of
    std::map<std::string, const InternalRelation*> relations;
};

struct Interpretation {
    std::vector<std::string> vars;           // context, first occurrence order
    std::vector<const Presheaf*> sorts;
    std::shared_ptr<const Product> context;  // product of the sorts (terminal if closed)
    SubPresheaf value;                       // subobject of context->ps
};

// Kripke-Joyal interpretation of the formula in the context of its free
// variables. Box is hereditary in the bound coordinate, Dia takes a
// stage-local witness, quantifiers go along the projection dropping the
// bound variable, and a modality whose body is closed in the relation's
// sort acts as the identity.
Interpretation interpret(const Formula& f, const EvalModel& m);

struct ForceResult {
    bool forced = false;
    Sieve value;
};

ForceResult force(const Formula& f, const EvalModel& m, int stage,
                  const std::map<std::string, std::string>& env);

// per-stage truth values of a closed formula
std::vector<Sieve> stage_values(const Formula& f, const EvalModel& m);

struct BarcanRow {
    std::string name;
    std::string text;
    bool valid = false;
    std::vector<Sieve> lhs, rhs, implication;  // per stage
};

struct BarcanReport {
    std::string relation, phi;
    std::vector<BarcanRow> rows;
    const BarcanRow* find(const std::string& name) const;
};

// quantifier/modality exchange schemas for a named relation and unary atom,
// with per-stage evidence sieves
BarcanReport barcan_report(const EvalModel& m, const std::string& relation,
                           const std::string& phi_atom);

struct SetLevelReport {
    std::string relation, phi;
    bool exists_phi = false;
    std::vector<std::string> box_members;  // elements of the box at the only stage
    bool exists_box = false;
};

// the one-object (Set) case: exists x phi, box phi, exists x box phi
SetLevelReport eval_set_level(const EvalModel& m);  // throws WrongBase

}  // namespace topos

#endif
