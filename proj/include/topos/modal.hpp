#ifndef TOPOS_MODAL_HPP
#define TOPOS_MODAL_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "topos/power.hpp"

namespace topos {

enum class ModalMode { Fast, Oracle };

// A presheaf with an internal relation: the data the box/diamond operators
// act on. `limit` caps per-stage power enumerations (law checks fall back to
// seeded sampling past it; the oracle route refuses instead).
struct ModalContext {
    const Presheaf* x = nullptr;
    const InternalRelation* r = nullptr;
    ModalMode mode = ModalMode::Fast;
    long limit = 4096;
};

// Box. Hereditary over lower stages: a survives at d when every relation
// step out of any restriction of a lands inside s. The stage-local variant
// below exists only as a diagnostic; it is not the interior.
RelSub interior(const ModalContext& ctx, const RelSub& s);

// Diamond. Stage-local witness; restriction-closure comes from the graph
// being a subobject.
RelSub closure(const ModalContext& ctx, const RelSub& s);

// Diagnostic: quantifies at the stage itself only. Differs from interior()
// on branching models; kept to make that gap demonstrable.
RelSub interior_stage_local(const ModalContext& ctx, const RelSub& s);

// The composite route: interior as inverse image along the upsegment arrow
// after the downsegment of the power order, closure as join of the direct
// image along the downsegment arrow. Materializes PX, so budget-guarded.
struct OracleOps {
    std::unique_ptr<PowerPresheaf> px;  // heap-held: the segment maps point into it
    NatTrans up;                        // X -> PX
    NatTrans down;                      // X -> PX
};

OracleOps make_oracle(const ModalContext& ctx);  // throws BudgetExceeded
RelSub interior_oracle(const OracleOps& ops, const RelSub& s);
RelSub closure_oracle(const OracleOps& ops, const RelSub& s);
RelSub interior_oracle(const ModalContext& ctx, const RelSub& s);
RelSub closure_oracle(const ModalContext& ctx, const RelSub& s);

// per-stage reflexive/transitive/symmetric flags plus the subobject check
struct RelationReport {
    RelationFlags flags;
    ValidationReport subobject;
};

RelationReport check_relation(const InternalRelation& r);

struct LawWitness {
    int stage = -1;  // stage of the power element(s)
    RelSub s;
    std::optional<RelSub> u;
    int fail_stage = -1;  // where the containment breaks
    int fail_elem = -1;
};

struct LawResult {
    std::string name;
    std::string group;  // "IS4" | "MAO" | "distributive"
    bool holds = true;
    bool vacuous = true;
    long checked = 0;
    std::optional<LawWitness> witness;
};

struct EnumRegime {
    bool exhaustive = true;
    long limit = 4096;
    std::uint64_t seed = 0;
    long samples = 256;  // per stage, when sampling
};

struct LawReport {
    std::vector<LawResult> laws;
    EnumRegime regime;
    RelationFlags flags;

    const LawResult* find(const std::string& name) const;
    bool all_hold() const;
};

// counit/comultiplication of box, unit/multiplication of diamond, strength,
// and monotonicity of both operators
LawReport check_is4(const ModalContext& ctx, std::uint64_t seed = 0);

// adjunction unit/counit, idempotence, Frobenius, distributivity
LawReport check_mao(const ModalContext& ctx, std::uint64_t seed = 0);

// everything the axioms command reports
LawReport check_laws(const ModalContext& ctx, std::uint64_t seed = 0);

// which laws the relation's flags promise (for strict verdicts)
std::vector<std::string> expected_laws(const RelationFlags& flags);

struct CounterexampleSearch {
    enum class Outcome { Found, NoneByExhaustion, BudgetExceeded } outcome;
    std::optional<LawWitness> witness;
    long inspected = 0;
};

// deterministic first-witness search in canonical enumeration order
CounterexampleSearch find_counterexample(const ModalContext& ctx, const std::string& law,
                                         long budget);

std::vector<std::string> law_names();

}  // namespace topos

#endif
