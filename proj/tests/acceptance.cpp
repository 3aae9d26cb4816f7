// Acceptance suite: one pass/fail line per criterion. Fixture-driven
// criteria go through the C API (the same surface the CLI uses); the
// property suites drive the core library directly.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gen.hpp"
#include "json.hpp"
#include "topos/bst.hpp"
#include "topos/commands.hpp"
#include "topos/formula.hpp"
#include "topos/modal.hpp"
#include "topos/topos_c.h"

using namespace topos;
using nlohmann::json;

namespace {

int g_failures = 0;

void report(int criterion, const char* what, bool ok, const std::string& detail = "") {
    std::printf("%s criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", criterion, what,
                detail.empty() ? "" : " — ", detail.c_str());
    if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fixture(const char* name) { return std::string(TOPOS_FIXTURE_DIR) + "/" + name; }

json run_json(topos_model* m, const char* which, topos_options opts,
              topos_status expect = TOPOS_OK) {
    opts.json = 1;
    char* report_text = nullptr;
    topos_status st = TOPOS_OK;
    if (!std::strcmp(which, "eval")) st = topos_cmd_eval(m, &opts, &report_text);
    else if (!std::strcmp(which, "histories")) st = topos_cmd_histories(m, &opts, &report_text);
    else if (!std::strcmp(which, "axioms")) st = topos_cmd_axioms(m, &opts, &report_text);
    else if (!std::strcmp(which, "barcan")) st = topos_cmd_barcan(m, &opts, &report_text);
    else if (!std::strcmp(which, "check")) st = topos_cmd_check(m, &opts, &report_text);
    if (st != expect || !report_text) {
        if (report_text) topos_string_free(report_text);
        return json();
    }
    json out = json::parse(report_text, nullptr, false);
    topos_string_free(report_text);
    return out;
}

// ---- shared random model suite (criterion 4's population, reused by 6, 8, 12)

// heap-held so the internal base/ambient pointers stay valid
struct SuiteModel {
    FinPoset p;
    Presheaf x;
    SubPresheaf phi;
    InternalRelation r;
};

using Suite = std::vector<std::unique_ptr<SuiteModel>>;

Suite make_suite(std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    Suite out;
    while (int(out.size()) < count) {
        auto sm = std::make_unique<SuiteModel>();
        sm->p = topos_gen::random_poset(rng, 4);
        sm->x = topos_gen::random_presheaf(rng, sm->p, 3);
        sm->phi = topos_gen::random_subpresheaf(rng, sm->x);
        sm->r = topos_gen::random_preorder(rng, sm->x);
        out.push_back(std::move(sm));
    }
    return out;
}

bool sieve_members_equal(const json& sieve, std::vector<std::string> names) {
    return sieve["members"] == json(names);
}

void criterion1() {
    auto t0 = std::chrono::steady_clock::now();
    topos_model* m = nullptr;
    if (topos_model_open(fixture("w4.json").c_str(), &m) != TOPOS_OK) {
        report(1, "barcan counter-model fixture", false, "cannot open w4.json");
        return;
    }
    topos_options opts;
    topos_options_init(&opts);
    opts.formula = "forall h:H. phi(h)";
    json all = run_json(m, "eval", opts);
    opts.formula = "forall h:H. <> phi(h)";
    json alldia = run_json(m, "eval", opts);
    topos_model_free(m);

    bool ok = !all.is_null() && !alldia.is_null();
    if (ok) {
        auto row = [](const json& j, const char* stage) -> json {
            for (const auto& r : j["stages"])
                if (r["stage"] == stage) return r["sieve"];
            return json();
        };
        ok = sieve_members_equal(row(all, "e-1"), {}) &&
             row(alldia, "e-1")["total"] == true &&
             sieve_members_equal(row(all, "e2"), {}) &&
             sieve_members_equal(row(alldia, "e2"), {"e-1"}) &&
             row(alldia, "e2")["total"] == false;
    }
    double dt = seconds_since(t0);
    ok = ok && dt < 1.0;
    char buf[128];
    std::snprintf(buf, sizeof buf, "forall/forall-dia sieves at e-1 and e2, %.3fs", dt);
    report(1, "barcan counter-model fixture values", ok, buf);
}

void criterion2() {
    topos_model* m = nullptr;
    if (topos_model_open(fixture("w4.json").c_str(), &m) != TOPOS_OK) {
        report(2, "histories fixture", false, "cannot open w4.json");
        return;
    }
    topos_options opts;
    topos_options_init(&opts);
    json j = run_json(m, "histories", opts);
    topos_model_free(m);
    bool ok = !j.is_null() && j["histories"].size() == 2 &&
              j["histories"][0]["id"] == "h1" &&
              j["histories"][0]["events"] == json::array({"e-1", "e0", "e1"}) &&
              j["histories"][1]["id"] == "h2" &&
              j["histories"][1]["events"] == json::array({"e-1", "e0", "e2"});
    if (ok) {
        std::map<std::string, json> fib;
        for (const auto& f : j["fibers"]) fib[f["stage"]] = f["histories"];
        ok = fib["e-1"] == json::array({"h1", "h2"}) && fib["e0"] == json::array({"h1", "h2"}) &&
             fib["e1"] == json::array({"h1"}) && fib["e2"] == json::array({"h2"});
    }
    ok = ok && j["choice_points"].size() == 1 && j["choice_points"][0]["event"] == "e0" &&
         j["choice_points"][0]["pair"] == json::array({"h1", "h2"});
    report(2, "histories, fibers and the unique choice point on w4", ok);
}

void criterion3() {
    auto t0 = std::chrono::steady_clock::now();
    topos_model* m = nullptr;
    if (topos_model_open(fixture("w4.json").c_str(), &m) != TOPOS_OK) {
        report(3, "MAO suite", false, "cannot open w4.json");
        return;
    }
    topos_options opts;
    topos_options_init(&opts);
    opts.relation = "undivided";
    opts.strict = 1;
    json j = run_json(m, "axioms", opts);
    topos_model_free(m);
    bool ok = !j.is_null() && j["regime"]["kind"] == "exhaustive" && j["status"] == 0;
    if (ok) {
        int seen = 0;
        for (const auto& law : j["laws"]) {
            if (law["holds"] != true) ok = false;
            ++seen;
        }
        ok = ok && seen == 13;  // 7 IS4 + 5 MAO + distributivity
    }
    double dt = seconds_since(t0);
    ok = ok && dt < 10.0;
    char buf[96];
    std::snprintf(buf, sizeof buf, "strict exit 0, exhaustive over PH, %.3fs", dt);
    report(3, "IS4 + MAO + distributivity on (H, undivided)", ok, buf);
}

void criterion4(const Suite& suite) {
    auto t0 = std::chrono::steady_clock::now();
    long checked = 0;
    bool ok = true;
    for (const auto& smp : suite) {
        const SuiteModel& sm = *smp;
        ModalContext ctx{&sm.x, &sm.r};
        for (int c = 0; c < sm.p.size() && ok; ++c) {
            PowerEnum en = power_elements(sm.x, c, 4096);
            std::vector<RelSub> boxed, diad;
            for (const RelSub& s : en.elements) {
                boxed.push_back(interior(ctx, s));
                diad.push_back(closure(ctx, s));
            }
            for (std::size_t i = 0; i < en.elements.size() && ok; ++i) {
                const RelSub& s = en.elements[i];
                ok = px_leq(boxed[i], s) && px_leq(boxed[i], interior(ctx, boxed[i])) &&
                     px_leq(s, diad[i]) && px_leq(closure(ctx, diad[i]), diad[i]);
                ++checked;
                for (std::size_t k = 0; k < en.elements.size() && ok; ++k) {
                    RelSub lhs = px_meet(boxed[i], diad[k]);
                    ok = px_leq(lhs, closure(ctx, px_meet(boxed[i], en.elements[k])));
                }
            }
        }
        if (!ok) break;
    }
    double dt = seconds_since(t0);
    ok = ok && dt < 60.0;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%ld power elements over 200 models, %.1fs", checked, dt);
    report(4, "five IS4 inequalities on seeded random preorder models", ok, buf);
}

void criterion5() {
    const char* model = R"({
      "poset": { "objects": ["pt"], "covers": [] },
      "presheaves": { "X": { "carriers": { "pt": ["x", "y"] } } },
      "relations": { "r": { "sort": "X",
                            "pairs": { "pt": [["x","x"],["y","y"],["x","y"]] } } }
    })";
    topos_model* m = nullptr;
    if (topos_model_from_json(model, &m) != TOPOS_OK) {
        report(5, "symmetry-necessity counterexample", false, "model rejected");
        return;
    }
    topos_options opts;
    topos_options_init(&opts);
    opts.relation = "r";
    json j = run_json(m, "axioms", opts);
    topos_model_free(m);
    bool ok = !j.is_null() && j["flags"]["preorder"] == true &&
              j["flags"]["symmetric"] == false;
    bool found = false;
    if (ok)
        for (const auto& law : j["laws"])
            if (law["name"] == "adjunction_unit") {
                found = true;
                ok = law["holds"] == false && law.contains("witness") &&
                     law["witness"]["stage"] == "pt" &&
                     law["witness"]["s"]["members"]["pt"] == json::array({"x"}) &&
                     law["witness"]["fail_element"] == "x";
            }
    ok = ok && found;
    report(5, "adjunction unit fails on (x <= y) with witness s = {x}, element x", ok);
}

void criterion6(const Suite& suite) {
    bool ok = true;
    long compared = 0;
    // the fixture model of criterion 3
    FinPoset w4 = FinPoset::from_covers({"e-1", "e0", "e1", "e2"},
                                        {{"e-1", "e0"}, {"e0", "e1"}, {"e0", "e2"}});
    auto bm = build_model(w4);
    {
        ModalContext ctx{bm->h.get(), &bm->undivided};
        OracleOps ops = make_oracle(ctx);
        for (int c = 0; c < w4.size() && ok; ++c)
            for (const RelSub& s : ops.px->elems[c]) {
                ok = interior_oracle(ops, s) == interior(ctx, s) &&
                     closure_oracle(ops, s) == closure(ctx, s);
                ++compared;
                if (!ok) break;
            }
    }
    long skipped = 0;
    for (const auto& smp : suite) {
        const SuiteModel& sm = *smp;
        ModalContext ctx{&sm.x, &sm.r};
        try {
            OracleOps ops = make_oracle(ctx);
            for (int c = 0; c < sm.p.size() && ok; ++c)
                for (const RelSub& s : ops.px->elems[c]) {
                    ok = interior_oracle(ops, s) == interior(ctx, s) &&
                         closure_oracle(ops, s) == closure(ctx, s);
                    ++compared;
                    if (!ok) break;
                }
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::BudgetExceeded) {
                ++skipped;
                continue;
            }
            ok = false;
        }
        if (!ok) break;
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%ld elements compared, %ld models over budget", compared,
                  skipped);
    report(6, "composite-route operators equal the direct formulas", ok, buf);
}

void criterion7() {
    bool ok = true;
    std::vector<FinPoset> posets;
    posets.push_back(FinPoset::from_covers({"e-1", "e0", "e1", "e2"},
                                           {{"e-1", "e0"}, {"e0", "e1"}, {"e0", "e2"}}));
    posets.push_back(FinPoset::from_covers(
        {"e", "x", "y", "m1", "m2", "m3"},
        {{"e", "x"}, {"e", "y"}, {"x", "m1"}, {"x", "m2"}, {"y", "m2"}, {"y", "m3"}}));
    posets.push_back(FinPoset::from_covers({"pt"}, {}));
    long checked = 0;
    for (const FinPoset& p : posets) {
        Presheaf one = terminal_presheaf(p);
        Omega om = omega(p);
        InternalRelation diag = diagonal_relation(one);
        ModalContext ctx{&one, &diag};
        for (int c = 0; c < p.size() && ok; ++c) {
            PowerEnum en = power_elements(one, c);
            ok = en.elements.size() == std::size_t(om.ps.fiber_size(c));
            for (const RelSub& s : en.elements) {
                ok = ok && interior(ctx, s) == s && closure(ctx, s) == s;
                ++checked;
            }
        }
        if (!ok) break;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%ld truth-value names over 3 fixture posets", checked);
    report(7, "interior and closure are the identity on the classifier", ok, buf);
}

void criterion8(const Suite& suite) {
    bool ok = true;
    // the five validities across the random suite
    const char* schemas[] = {
        "(forall v:X. []p(v)) -> [](forall v:X. p(v))",
        "(exists v:X. []p(v)) -> [](exists v:X. p(v))",
        "<>(forall v:X. p(v)) -> forall v:X. <>p(v)",
        "<>(exists v:X. p(v)) -> exists v:X. <>p(v)",
        "(exists v:X. <>p(v)) -> exists v:X. p(v)",
    };
    long evaluated = 0;
    for (const auto& smp : suite) {
        const SuiteModel& sm = *smp;
        EvalModel v;
        v.poset = &sm.p;
        v.sorts["X"] = &sm.x;
        v.atoms["p"] = &sm.phi;
        v.relations["R"] = &sm.r;
        for (const char* text : schemas) {
            auto values = stage_values(*parse_formula(text), v);
            for (int c = 0; c < sm.p.size(); ++c)
                if (!sieve_is_total(sm.p, values[c])) ok = false;
            ++evaluated;
        }
        if (!ok) break;
    }
    // the two failures pinned to the branching fixture
    auto m = load_model_file(fixture("w4.json"));
    BarcanReport rep = barcan_report(m->eval_view(), "undivided", "phi");
    bool conv_fails = rep.find("conv_dia_forall") && !rep.find("conv_dia_forall")->valid;
    bool act_fails = rep.find("actualist") && !rep.find("actualist")->valid;
    ok = ok && conv_fails && act_fails;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%ld schema evaluations; conv/actualist fail on w4",
                  evaluated);
    report(8, "barcan validities and the pinned failures", ok, buf);
}

void criterion9() {
    topos_model* m = nullptr;
    bool ok = topos_model_open(fixture("chain6.json").c_str(), &m) == TOPOS_OK;
    json ex, exbox;
    if (ok) {
        topos_options opts;
        topos_options_init(&opts);
        opts.formula = "exists n:N. phi(n)";
        ex = run_json(m, "eval", opts);
        opts.formula = "exists n:N. [] phi(n)";
        exbox = run_json(m, "eval", opts);
        topos_model_free(m);
        ok = !ex.is_null() && !exbox.is_null() && ex["valid"] == true &&
             exbox["valid"] == false;
    }
    // even-top five-chain: the de-re witness exists
    std::string chain5 = R"({
      "poset": { "objects": ["pt"], "covers": [] },
      "presheaves": { "N": { "carriers": { "pt": ["0","1","2","3","4"] } } },
      "relations": { "leq": { "sort": "N", "pairs": { "pt": [)";
    bool first = true;
    for (int i = 0; i < 5; ++i)
        for (int j = i; j < 5; ++j) {
            if (!first) chain5 += ",";
            chain5 += "[\"" + std::to_string(i) + "\",\"" + std::to_string(j) + "\"]";
            first = false;
        }
    chain5 += R"(] } } },
      "subobjects": { "phi": { "sort": "N", "members": { "pt": ["0","2","4"] } } }
    })";
    topos_model* m5 = nullptr;
    ok = ok && topos_model_from_json(chain5.c_str(), &m5) == TOPOS_OK;
    if (m5) {
        topos_options opts;
        topos_options_init(&opts);
        opts.formula = "exists n:N. [] phi(n)";
        json j = run_json(m5, "eval", opts);
        topos_model_free(m5);
        ok = ok && !j.is_null() && j["valid"] == true;
    }
    report(9, "set-level evens: de dicto holds, de re fails, even-top flips it", ok);
}

void criterion10() {
    topos_model* m = nullptr;
    if (topos_model_open(fixture("fork.json").c_str(), &m) != TOPOS_OK) {
        report(10, "transitivity caveat", false, "cannot open fork.json");
        return;
    }
    topos_options opts;
    topos_options_init(&opts);
    json j = run_json(m, "histories", opts);
    topos_model_free(m);
    bool ok = !j.is_null() && j["relation"]["mao_eligible"] == false &&
              j["relation"].contains("transitivity_witness") &&
              j["relation"]["transitivity_witness"]["stage"] == "e" &&
              j["relation"]["transitivity_witness"]["chain"] ==
                  json::array({"h1", "h2", "h3"});
    report(10, "undivided transitivity fails at the fork root with (h1,h2,h3)", ok);
}

void criterion11() {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;

    // classifier <-> subobject, 500 instances
    {
        std::mt19937_64 rng(2024);
        for (int round = 0; round < 500 && ok; ++round) {
            FinPoset p = topos_gen::random_poset(rng, 4);
            Presheaf x = topos_gen::random_presheaf(rng, p, 3);
            Omega om = omega(p);
            SubPresheaf s = topos_gen::random_subpresheaf(rng, x);
            NatTrans chi = classify(s, om);
            ok = subobject_of(chi, om) == s && classify(subobject_of(chi, om), om) == chi;
        }
    }
    // parse <-> print, 500 instances
    {
        std::mt19937_64 rng(2025);
        for (int round = 0; round < 500 && ok; ++round) {
            FormulaPtr f = topos_gen::random_formula(rng, 1 + int(rng() % 4), {}, "X",
                                                     {"p", "q"}, {"R", ""});
            ok = formula_equal(*f, *parse_formula(print_formula(*f)));
        }
    }
    // histories vs maximal directed subsets, 500 instances
    {
        std::mt19937_64 rng(2026);
        auto directed = [](const FinPoset& p, const Bits& d) {
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
        };
        for (int round = 0; round < 500 && ok; ++round) {
            FinPoset p = topos_gen::random_poset(rng, 6);
            std::vector<Bits> dirs;
            for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << p.size()); ++mask) {
                Bits d(p.size());
                for (int i = 0; i < p.size(); ++i)
                    if ((mask >> i) & 1) d.set(i);
                if (directed(p, d)) dirs.push_back(d);
            }
            std::set<std::vector<std::uint64_t>> maximal;
            for (const Bits& d : dirs) {
                bool is_max = true;
                for (const Bits& e : dirs)
                    if (d != e && d.subset_of(e)) {
                        is_max = false;
                        break;
                    }
                if (is_max) maximal.insert(d.words());
            }
            std::set<std::vector<std::uint64_t>> got;
            for (const auto& h : histories(p)) got.insert(h.events.words());
            ok = got == maximal;
        }
    }
    double dt = seconds_since(t0);
    ok = ok && dt < 60.0;
    char buf[96];
    std::snprintf(buf, sizeof buf, "3 x 500 seeded instances, %.1fs", dt);
    report(11, "structural round trips", ok, buf);
}

void criterion12(const Suite& suite) {
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(4242);
    long checked = 0;
    bool ok = true;
    std::size_t at = 0;
    while (checked < 1000 && ok) {
        const SuiteModel& sm = *suite[at++ % suite.size()];
        EvalModel v;
        v.poset = &sm.p;
        v.sorts["X"] = &sm.x;
        v.atoms["p"] = &sm.phi;
        v.relations["R"] = &sm.r;
        FormulaPtr f =
            topos_gen::random_formula(rng, 1 + int(rng() % 3), {}, "X", {"p"}, {"R"});
        Interpretation in;
        try {
            in = interpret(*f, v);
        } catch (const Error&) {
            continue;
        }
        for (int c = 0; c < sm.p.size() && ok; ++c) {
            if (sm.x.fiber_size(c) == 0 && !in.vars.empty()) continue;
            std::map<std::string, std::string> env;
            for (const auto& var : in.vars)
                env[var] = sm.x.elem_name(c, int(rng() % sm.x.fiber_size(c)));
            ForceResult fc = force(*f, v, c, env);
            ++checked;
            if (!fc.forced) continue;
            for (int d = 0; d < sm.p.size() && ok; ++d) {
                if (!sm.p.leq(d, c)) continue;
                std::map<std::string, std::string> envd;
                for (const auto& [var, elem] : env)
                    envd[var] =
                        sm.x.elem_name(d, sm.x.restricted(c, sm.x.elem_index(c, elem), d));
                ok = force(*f, v, d, envd).forced;
            }
        }
    }
    double dt = seconds_since(t0);
    ok = ok && dt < 60.0 && checked >= 1000;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%ld forcing triples, %.1fs", checked, dt);
    report(12, "forcing persists under restriction", ok, buf);
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    auto t0 = std::chrono::steady_clock::now();
    Suite suite = make_suite(0, 200);

    criterion1();
    criterion2();
    criterion3();
    criterion4(suite);
    criterion5();
    criterion6(suite);
    criterion7();
    criterion8(suite);
    criterion9();
    criterion10();
    criterion11();
    criterion12(suite);

    std::printf("%s: %d criterion(s) failed, %.1fs total\n", g_failures ? "FAILURE" : "SUCCESS",
                g_failures, seconds_since(t0));
    return g_failures ? 1 : 0;
}
