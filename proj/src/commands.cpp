#include "topos/commands.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace topos {

using ojson = nlohmann::ordered_json;

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ParseError:
        case ErrorKind::Io: return 3;
        default: return 1;
    }
}

namespace {

std::string sieve_text(const FinPoset& p, const Sieve& s) {
    std::string out = "{";
    bool first = true;
    for (int d = s.members.first(); d >= 0; d = s.members.next(d)) {
        if (!first) out += ",";
        out += p.name(d);
        first = false;
    }
    return out + "}";
}

std::string sieve_cell(const FinPoset& p, const Sieve& s) {
    std::string out = sieve_text(p, s);
    if (sieve_is_total(p, s)) out += " (\u22a4)";
    return out;
}

ojson sieve_json(const FinPoset& p, const Sieve& s) {
    ojson j;
    j["members"] = ojson::array();
    for (int d = s.members.first(); d >= 0; d = s.members.next(d)) j["members"].push_back(p.name(d));
    j["total"] = sieve_is_total(p, s);
    return j;
}

ojson relsub_json(const RelSub& s) {
    const Presheaf& x = *s.of;
    const FinPoset& p = x.base();
    ojson j;
    j["stage"] = p.name(s.at);
    ojson stages = ojson::object();
    for (int d = 0; d < p.size(); ++d) {
        if (!p.leq(d, s.at)) continue;
        ojson elems = ojson::array();
        for (int a = s.members[d].first(); a >= 0; a = s.members[d].next(a))
            elems.push_back(x.elem_name(d, a));
        stages[p.name(d)] = std::move(elems);
    }
    j["members"] = std::move(stages);
    return j;
}

std::string relsub_text(const RelSub& s) {
    const Presheaf& x = *s.of;
    const FinPoset& p = x.base();
    std::string out;
    bool first_stage = true;
    for (int d = 0; d < p.size(); ++d) {
        if (!p.leq(d, s.at)) continue;
        if (!first_stage) out += " ";
        first_stage = false;
        out += p.name(d) + ":{";
        bool first = true;
        for (int a = s.members[d].first(); a >= 0; a = s.members[d].next(a)) {
            if (!first) out += ",";
            out += x.elem_name(d, a);
            first = false;
        }
        out += "}";
    }
    return out;
}

const InternalRelation* pick_relation(const Model& m, const std::string& name) {
    if (!name.empty()) {
        const InternalRelation* r = m.find_relation(name);
        if (!r) fail(ErrorKind::UnknownRelation, "unknown relation '" + name + "'");
        return r;
    }
    if (m.relations.size() == 1) return m.relations[0].rel;
    if (m.find_relation("undivided")) return m.find_relation("undivided");
    fail(ErrorKind::UnknownRelation, "pass --relation: the model declares " +
                                         std::to_string(m.relations.size()) + " relations");
}

std::string relation_name_of(const Model& m, const InternalRelation* r) {
    for (const auto& e : m.relations)
        if (e.rel == r) return e.name;
    return "?";
}

FormulaPtr formula_from_option(const Model& m, const std::string& text_or_name) {
    if (text_or_name.empty()) fail(ErrorKind::InvalidModel, "pass --formula");
    if (const std::string* named = m.find_formula(text_or_name)) return parse_formula(*named);
    return parse_formula(text_or_name);
}

std::map<std::string, std::string> parse_env(const std::string& env) {
    std::map<std::string, std::string> out;
    std::size_t pos = 0;
    while (pos < env.size()) {
        std::size_t comma = env.find(',', pos);
        std::string item = env.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        std::size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            fail(ErrorKind::InvalidModel, "bad --env entry '" + item + "' (want var=element)");
        out[item.substr(0, eq)] = item.substr(eq + 1);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string render(const ojson& j, bool as_json, const std::string& text) {
    return as_json ? j.dump(2) + "\n" : text;
}

}  // namespace

// ---------------------------------------------------------------------------

CmdResult cmd_check(const Model& m, const CmdOptions& opt) {
    ojson j;
    j["command"] = "check";
    std::ostringstream os;
    bool valid = m.ok();

    j["poset"] = ojson::object();
    j["poset"]["valid"] = m.poset_ok;
    if (m.poset_ok) {
        j["poset"]["objects"] = ojson::array();
        for (int i = 0; i < m.poset.size(); ++i) j["poset"]["objects"].push_back(m.poset.name(i));
        os << "poset: valid (" << m.poset.size() << " objects)\n";
    } else {
        os << "poset: INVALID\n";
    }

    j["presheaves"] = ojson::array();
    for (const auto& e : m.presheaves) {
        ojson ps;
        ps["name"] = e.name;
        ps["valid"] = true;
        ojson sizes = ojson::object();
        for (int c = 0; c < m.poset.size(); ++c) sizes[m.poset.name(c)] = e.ps->fiber_size(c);
        ps["fiber_sizes"] = std::move(sizes);
        j["presheaves"].push_back(std::move(ps));
        os << "presheaf " << e.name << ": valid\n";
    }

    j["relations"] = ojson::array();
    for (const auto& e : m.relations) {
        RelationReport rep = check_relation(*e.rel);
        ojson r;
        r["name"] = e.name;
        r["valid"] = rep.subobject.ok();
        r["reflexive"] = rep.flags.all_reflexive;
        r["transitive"] = rep.flags.all_transitive;
        r["symmetric"] = rep.flags.all_symmetric;
        r["preorder"] = rep.flags.preorder();
        r["equivalence"] = rep.flags.equivalence();
        ojson per = ojson::array();
        for (int c = 0; c < m.poset.size(); ++c) {
            ojson st;
            st["stage"] = m.poset.name(c);
            st["reflexive"] = bool(rep.flags.reflexive[c]);
            st["transitive"] = bool(rep.flags.transitive[c]);
            st["symmetric"] = bool(rep.flags.symmetric[c]);
            per.push_back(std::move(st));
        }
        r["per_stage"] = std::move(per);
        j["relations"].push_back(std::move(r));
        os << "relation " << e.name << ": valid;"
           << " reflexive=" << (rep.flags.all_reflexive ? "yes" : "no")
           << " transitive=" << (rep.flags.all_transitive ? "yes" : "no")
           << " symmetric=" << (rep.flags.all_symmetric ? "yes" : "no");
        if (rep.flags.equivalence())
            os << " (equivalence)";
        else if (rep.flags.preorder())
            os << " (preorder)";
        os << "\n";
    }

    j["subobjects"] = ojson::array();
    for (const auto& e : m.subobjects) {
        ojson s;
        s["name"] = e.name;
        s["valid"] = true;
        j["subobjects"].push_back(std::move(s));
        os << "subobject " << e.name << ": valid\n";
    }

    j["issues"] = ojson::array();
    for (const auto& [component, rep] : m.issues) {
        for (const auto& issue : rep.issues) {
            ojson it;
            it["component"] = component;
            it["where"] = issue.where;
            it["what"] = issue.what;
            j["issues"].push_back(std::move(it));
            os << "ISSUE [" << component << "] " << issue.where << ": " << issue.what << "\n";
        }
    }
    j["valid"] = valid;
    os << (valid ? "result: valid\n" : "result: INVALID\n");
    return CmdResult{valid ? 0 : 1, render(j, opt.json, os.str())};
}

CmdResult cmd_histories(const Model& m, const CmdOptions& opt) {
    m.require_valid();
    const BstModel* bm = m.bst_model.get();
    std::unique_ptr<BstModel> local;
    if (!bm) {
        local = build_model(m.poset);
        bm = local.get();
    }
    const FinPoset& w = m.poset;

    ojson j;
    j["command"] = "histories";
    std::ostringstream os;

    j["histories"] = ojson::array();
    os << "histories:\n";
    for (const auto& h : bm->hs) {
        ojson hj;
        hj["id"] = h.id;
        hj["max"] = w.name(h.max_event);
        hj["events"] = ojson::array();
        std::string ev = "{";
        bool first = true;
        for (int e = h.events.first(); e >= 0; e = h.events.next(e)) {
            hj["events"].push_back(w.name(e));
            if (!first) ev += ",";
            ev += w.name(e);
            first = false;
        }
        j["histories"].push_back(std::move(hj));
        os << "  " << h.id << " = " << ev << "}  (max " << w.name(h.max_event) << ")\n";
    }

    j["fibers"] = ojson::array();
    os << "fibers H_e:\n";
    for (int e = 0; e < w.size(); ++e) {
        ojson f;
        f["stage"] = w.name(e);
        f["histories"] = ojson::array();
        std::string row;
        for (int a = 0; a < bm->h->fiber_size(e); ++a) {
            f["histories"].push_back(bm->h->elem_name(e, a));
            if (a) row += ",";
            row += bm->h->elem_name(e, a);
        }
        j["fibers"].push_back(std::move(f));
        os << "  " << w.name(e) << ": {" << row << "}\n";
    }

    j["undivided"] = ojson::array();
    os << "undivided:\n";
    for (int e = 0; e < w.size(); ++e) {
        ojson u;
        u["stage"] = w.name(e);
        u["pairs"] = ojson::array();
        std::string row;
        for (int a = 0; a < bm->h->fiber_size(e); ++a)
            for (int b = 0; b < bm->h->fiber_size(e); ++b)
                if (bm->undivided.related(e, a, b)) {
                    ojson pr = ojson::array();
                    pr.push_back(bm->h->elem_name(e, a));
                    pr.push_back(bm->h->elem_name(e, b));
                    u["pairs"].push_back(std::move(pr));
                    row += " (" + bm->h->elem_name(e, a) + "," + bm->h->elem_name(e, b) + ")";
                }
        j["undivided"].push_back(std::move(u));
        os << "  " << w.name(e) << ":" << row << "\n";
    }

    j["choice_points"] = ojson::array();
    os << "choice points:";
    if (bm->choices.empty()) os << " none";
    os << "\n";
    for (const auto& cp : bm->choices) {
        ojson c;
        c["event"] = w.name(cp.event);
        c["pair"] = ojson::array({bm->hs[cp.h1].id, bm->hs[cp.h2].id});
        j["choice_points"].push_back(std::move(c));
        os << "  " << w.name(cp.event) << " (" << bm->hs[cp.h1].id << "," << bm->hs[cp.h2].id
           << ")\n";
    }

    ojson eq;
    eq["equivalence"] = bm->flags.equivalence();
    eq["mao_eligible"] = bm->mao_eligible;
    if (bm->flags.transitivity_witness) {
        auto [e, a, b, c] = *bm->flags.transitivity_witness;
        ojson wjson;
        wjson["stage"] = w.name(e);
        wjson["chain"] = ojson::array({bm->h->elem_name(e, a), bm->h->elem_name(e, b),
                                       bm->h->elem_name(e, c)});
        eq["transitivity_witness"] = std::move(wjson);
        os << "warning: undivided is not transitive at " << w.name(e) << ": "
           << bm->h->elem_name(e, a) << " ~ " << bm->h->elem_name(e, b) << " ~ "
           << bm->h->elem_name(e, c) << " but not " << bm->h->elem_name(e, a) << " ~ "
           << bm->h->elem_name(e, c)
           << " (events above a stage need not be shared pairwise)\n";
    }
    j["relation"] = std::move(eq);
    os << "undivided is " << (bm->flags.equivalence() ? "an equivalence" : "NOT an equivalence")
       << " at every stage; model is " << (bm->mao_eligible ? "" : "not ") << "MAO-eligible\n";

    return CmdResult{0, render(j, opt.json, os.str())};
}

CmdResult cmd_axioms(const Model& m, const CmdOptions& opt) {
    m.require_valid();
    const InternalRelation* rel = pick_relation(m, opt.relation);
    ModalContext ctx{rel->on, rel, opt.mode, opt.limit};
    LawReport rep = check_laws(ctx, opt.seed);

    std::vector<std::string> expected = expected_laws(rep.flags);
    std::vector<std::string> strict_failures;
    for (const auto& law : rep.laws)
        if (!law.holds &&
            std::find(expected.begin(), expected.end(), law.name) != expected.end())
            strict_failures.push_back(law.name);

    ojson j;
    j["command"] = "axioms";
    j["relation"] = relation_name_of(m, rel);
    j["mode"] = opt.mode == ModalMode::Fast ? "fast" : "oracle";
    ojson flags;
    flags["reflexive"] = rep.flags.all_reflexive;
    flags["transitive"] = rep.flags.all_transitive;
    flags["symmetric"] = rep.flags.all_symmetric;
    flags["preorder"] = rep.flags.preorder();
    flags["equivalence"] = rep.flags.equivalence();
    j["flags"] = std::move(flags);
    ojson regime;
    regime["kind"] = rep.regime.exhaustive ? "exhaustive" : "sampled";
    regime["limit"] = rep.regime.limit;
    regime["seed"] = rep.regime.seed;
    j["regime"] = std::move(regime);

    std::ostringstream os;
    os << "relation " << relation_name_of(m, rel) << ": reflexive="
       << (rep.flags.all_reflexive ? "yes" : "no")
       << " transitive=" << (rep.flags.all_transitive ? "yes" : "no")
       << " symmetric=" << (rep.flags.all_symmetric ? "yes" : "no") << "\n";
    os << "regime: " << (rep.regime.exhaustive ? "exhaustive" : "sampled") << " (limit "
       << rep.regime.limit << ", seed " << rep.regime.seed << ")\n";
    os << "laws (" << (opt.mode == ModalMode::Fast ? "fast" : "oracle") << " operators):\n";

    j["laws"] = ojson::array();
    for (const auto& law : rep.laws) {
        ojson l;
        l["name"] = law.name;
        l["group"] = law.group;
        l["holds"] = law.holds;
        l["vacuous"] = law.vacuous;
        l["checked"] = law.checked;
        bool expected_here =
            std::find(expected.begin(), expected.end(), law.name) != expected.end();
        l["expected"] = expected_here;
        os << "  " << (law.holds ? "holds " : "FAILS ") << law.name << " [" << law.group << "]";
        if (!expected_here) os << " (not promised by the relation's flags)";
        if (law.witness) {
            const LawWitness& w = *law.witness;
            ojson wj;
            wj["stage"] = m.poset.name(w.stage);
            wj["s"] = relsub_json(w.s);
            if (w.u) wj["u"] = relsub_json(*w.u);
            wj["fail_stage"] = m.poset.name(w.fail_stage);
            wj["fail_element"] = rel->on->elem_name(w.fail_stage, w.fail_elem);
            l["witness"] = std::move(wj);
            os << "  witness: stage " << m.poset.name(w.stage) << ", s = [" << relsub_text(w.s)
               << "]";
            if (w.u) os << ", u = [" << relsub_text(*w.u) << "]";
            os << ", element '" << rel->on->elem_name(w.fail_stage, w.fail_elem) << "' at "
               << m.poset.name(w.fail_stage);
        }
        os << "\n";
        j["laws"].push_back(std::move(l));
    }

    j["strict_failures"] = ojson::array();
    for (const auto& n : strict_failures) j["strict_failures"].push_back(n);
    int status = 0;
    if (opt.strict && !strict_failures.empty()) {
        status = 2;
        os << "strict: " << strict_failures.size() << " expected law(s) failed\n";
    } else {
        os << "all expected laws hold\n";
    }
    j["status"] = status;
    return CmdResult{status, render(j, opt.json, os.str())};
}

CmdResult cmd_eval(const Model& m, const CmdOptions& opt) {
    m.require_valid();
    FormulaPtr f = formula_from_option(m, opt.formula);
    EvalModel view = m.eval_view();

    ojson j;
    j["command"] = "eval";
    j["formula"] = print_formula(*f);
    std::ostringstream os;
    os << "formula: " << print_formula(*f) << "\n";

    if (!opt.env.empty()) {
        if (opt.stage.empty()) fail(ErrorKind::InvalidModel, "--env needs --stage");
        int stage = m.poset.index(opt.stage);
        auto env = parse_env(opt.env);
        ForceResult r = force(*f, view, stage, env);
        j["stage"] = opt.stage;
        ojson envj = ojson::object();
        for (const auto& [k, v] : env) envj[k] = v;
        j["env"] = std::move(envj);
        j["sieve"] = sieve_json(m.poset, r.value);
        j["forced"] = r.forced;
        os << "at " << opt.stage << " with " << opt.env << ": "
           << (r.forced ? "forced" : "not forced") << ", sieve " << sieve_cell(m.poset, r.value)
           << "\n";
        return CmdResult{0, render(j, opt.json, os.str())};
    }

    if (!opt.stage.empty()) m.poset.index(opt.stage);  // reject unknown stages
    std::vector<Sieve> values = stage_values(*f, view);
    bool valid = true;
    j["stages"] = ojson::array();
    for (int c = 0; c < m.poset.size(); ++c) {
        if (!opt.stage.empty() && m.poset.name(c) != opt.stage) continue;
        ojson row;
        row["stage"] = m.poset.name(c);
        row["sieve"] = sieve_json(m.poset, values[c]);
        bool total = sieve_is_total(m.poset, values[c]);
        row["forced"] = total;
        valid &= total;
        j["stages"].push_back(std::move(row));
        os << "  " << m.poset.name(c) << ": " << sieve_cell(m.poset, values[c]) << "\n";
    }
    if (opt.stage.empty()) {
        j["valid"] = valid;
        os << "valid (total at every stage): " << (valid ? "yes" : "no") << "\n";
    }
    return CmdResult{0, render(j, opt.json, os.str())};
}

CmdResult cmd_barcan(const Model& m, const CmdOptions& opt) {
    m.require_valid();
    const InternalRelation* rel = pick_relation(m, opt.relation);
    std::string phi = opt.phi;
    if (phi.empty()) {
        if (m.find_subobject("phi"))
            phi = "phi";
        else if (m.subobjects.size() == 1)
            phi = m.subobjects[0].name;
        else
            fail(ErrorKind::UnknownAtom, "pass --phi: the model declares " +
                                             std::to_string(m.subobjects.size()) + " subobjects");
    }
    EvalModel view = m.eval_view();
    BarcanReport rep = barcan_report(view, relation_name_of(m, rel), phi);

    ojson j;
    j["command"] = "barcan";
    j["relation"] = rep.relation;
    j["phi"] = rep.phi;
    std::ostringstream os;
    os << "relation " << rep.relation << ", atom " << rep.phi << "\n";

    j["rows"] = ojson::array();
    for (const auto& row : rep.rows) {
        ojson r;
        r["name"] = row.name;
        r["formula"] = row.text;
        r["valid"] = row.valid;
        ojson stages = ojson::array();
        for (int c = 0; c < m.poset.size(); ++c) {
            ojson st;
            st["stage"] = m.poset.name(c);
            if (!row.lhs.empty()) st["lhs"] = sieve_json(m.poset, row.lhs[c]);
            if (!row.rhs.empty()) st["rhs"] = sieve_json(m.poset, row.rhs[c]);
            st["value"] = sieve_json(m.poset, row.implication[c]);
            stages.push_back(std::move(st));
        }
        r["stages"] = std::move(stages);
        j["rows"].push_back(std::move(r));

        os << (row.valid ? "valid   " : "INVALID ") << row.name << ": " << row.text << "\n";
        if (!row.valid)
            for (int c = 0; c < m.poset.size(); ++c) {
                if (sieve_is_total(m.poset, row.implication[c])) continue;
                os << "    at " << m.poset.name(c) << ": value "
                   << sieve_cell(m.poset, row.implication[c]);
                if (!row.lhs.empty())
                    os << ", lhs " << sieve_cell(m.poset, row.lhs[c]) << ", rhs "
                       << sieve_cell(m.poset, row.rhs[c]);
                os << "\n";
            }
    }
    return CmdResult{0, render(j, opt.json, os.str())};
}

CmdResult cmd_power(const Model& m, const CmdOptions& opt) {
    m.require_valid();
    if (opt.sort.empty()) fail(ErrorKind::UnknownSort, "pass --sort");
    const Presheaf* ps = m.find_presheaf(opt.sort);
    if (!ps) fail(ErrorKind::UnknownSort, "unknown presheaf '" + opt.sort + "'");
    if (!opt.stage.empty()) m.poset.index(opt.stage);

    ojson j;
    j["command"] = "power";
    j["sort"] = opt.sort;
    std::ostringstream os;
    j["stages"] = ojson::array();
    for (int c = 0; c < m.poset.size(); ++c) {
        if (!opt.stage.empty() && m.poset.name(c) != opt.stage) continue;
        PowerEnum en = power_elements(*ps, c, opt.limit);
        ojson st;
        st["stage"] = m.poset.name(c);
        st["count"] = en.elements.size();
        st["truncated"] = en.truncated;
        st["elements"] = ojson::array();
        os << "P(" << opt.sort << ")(" << m.poset.name(c) << "): " << en.elements.size()
           << (en.truncated ? "+ (truncated)" : "") << " elements\n";
        for (const auto& s : en.elements) {
            st["elements"].push_back(relsub_json(s));
            os << "  [" << relsub_text(s) << "]\n";
        }
        j["stages"].push_back(std::move(st));
    }
    return CmdResult{0, render(j, opt.json, os.str())};
}

CmdResult cmd_omega(const Model& m, const CmdOptions& opt) {
    m.require_valid();
    if (!opt.stage.empty()) m.poset.index(opt.stage);
    ojson j;
    j["command"] = "omega";
    std::ostringstream os;
    j["stages"] = ojson::array();
    for (int c = 0; c < m.poset.size(); ++c) {
        if (!opt.stage.empty() && m.poset.name(c) != opt.stage) continue;
        ojson st;
        st["stage"] = m.poset.name(c);
        st["sieves"] = ojson::array();
        os << "Omega(" << m.poset.name(c) << "): " << m.om->sieves[c].size() << " sieves\n";
        for (const auto& s : m.om->sieves[c]) {
            st["sieves"].push_back(sieve_json(m.poset, s));
            os << "  " << sieve_cell(m.poset, s) << "\n";
        }
        j["stages"].push_back(std::move(st));
    }
    return CmdResult{0, render(j, opt.json, os.str())};
}

}  // namespace topos
