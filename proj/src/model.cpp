#include "topos/model.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace topos {

using nlohmann::json;

void Model::require_valid() const {
    if (ok()) return;
    std::string text = "model failed validation:\n";
    for (const auto& [component, rep] : issues) text += "[" + component + "] " + rep.to_string();
    if (!poset_ok && issues.empty()) text += "poset invalid\n";
    fail(ErrorKind::InvalidModel, text);
}

const Presheaf* Model::find_presheaf(const std::string& name) const {
    for (const auto& e : presheaves)
        if (e.name == name) return e.ps;
    return nullptr;
}

const InternalRelation* Model::find_relation(const std::string& name) const {
    for (const auto& e : relations)
        if (e.name == name) return e.rel;
    return nullptr;
}

const SubPresheaf* Model::find_subobject(const std::string& name) const {
    for (const auto& e : subobjects)
        if (e.name == name) return e.sub.get();
    return nullptr;
}

const std::string* Model::find_formula(const std::string& name) const {
    for (const auto& e : formulas)
        if (e.first == name) return &e.second;
    return nullptr;
}

EvalModel Model::eval_view() const {
    EvalModel v;
    v.poset = &poset;
    for (const auto& e : presheaves) v.sorts[e.name] = e.ps;
    for (const auto& e : subobjects) v.atoms[e.name] = e.sub.get();
    for (const auto& e : relations) v.relations[e.name] = e.rel;
    return v;
}

namespace {

[[noreturn]] void bad_file(const std::string& what) { fail(ErrorKind::ParseError, "model file: " + what); }

const json& need(const json& j, const char* key, const char* where) {
    if (!j.is_object()) bad_file(std::string(where) + " must be an object");
    auto it = j.find(key);
    if (it == j.end()) bad_file(std::string(where) + " is missing '" + key + "'");
    return *it;
}

std::string need_string(const json& j, const char* where) {
    if (!j.is_string()) bad_file(std::string(where) + " must be a string");
    return j.get<std::string>();
}

std::vector<std::string> string_list(const json& j, const char* where) {
    if (!j.is_array()) bad_file(std::string(where) + " must be an array");
    std::vector<std::string> out;
    for (const auto& e : j) out.push_back(need_string(e, where));
    return out;
}

void load_poset(Model& m, const json& root) {
    const json& jp = need(root, "poset", "model");
    std::vector<std::string> objects = string_list(need(jp, "objects", "poset"), "poset.objects");
    std::vector<std::pair<std::string, std::string>> covers;
    if (jp.contains("covers")) {
        if (!jp["covers"].is_array()) bad_file("poset.covers must be an array");
        for (const auto& c : jp["covers"]) {
            if (!c.is_array() || c.size() != 2) bad_file("each cover must be a [lower, upper] pair");
            covers.emplace_back(need_string(c[0], "cover"), need_string(c[1], "cover"));
        }
    }
    try {
        m.poset = FinPoset::from_covers(objects, covers);
        m.poset_ok = true;
    } catch (const Error& e) {
        ValidationReport rep;
        rep.add("poset", e.what());
        m.issues.emplace_back("poset", std::move(rep));
    }
}

void load_presheaf(Model& m, const std::string& name, const json& j) {
    PresheafData d;
    d.base = &m.poset;
    d.label = name;
    d.fibers.resize(m.poset.size());
    const json& carriers = need(j, "carriers", ("presheaf '" + name + "'").c_str());
    if (!carriers.is_object()) bad_file("carriers of '" + name + "' must be an object");
    for (auto it = carriers.begin(); it != carriers.end(); ++it) {
        int c = m.poset.find(it.key());
        if (c < 0) {
            ValidationReport rep;
            rep.add(name, "carrier at unknown object '" + it.key() + "'");
            m.issues.emplace_back("presheaf " + name, std::move(rep));
            return;
        }
        d.fibers[c] = string_list(it.value(), "carrier");
    }
    if (j.contains("restrictions")) {
        const json& rs = j["restrictions"];
        if (!rs.is_object()) bad_file("restrictions of '" + name + "' must be an object");
        for (auto it = rs.begin(); it != rs.end(); ++it) {
            std::string key = it.key();
            auto sep = key.find("<=");
            if (sep == std::string::npos)
                bad_file("restriction key '" + key + "' must look like 'lower<=upper'");
            std::string lo_name = key.substr(0, sep), hi_name = key.substr(sep + 2);
            int lo = m.poset.find(lo_name), hi = m.poset.find(hi_name);
            ValidationReport rep;
            if (lo < 0 || hi < 0) {
                rep.add(name, "restriction key '" + key + "' names an unknown object");
                m.issues.emplace_back("presheaf " + name, std::move(rep));
                return;
            }
            if (!it.value().is_object()) bad_file("restriction '" + key + "' must be an object map");
            std::vector<int> map(d.fibers[hi].size(), -1);
            for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) {
                int src = -1, dst = -1;
                for (std::size_t k = 0; k < d.fibers[hi].size(); ++k)
                    if (d.fibers[hi][k] == jt.key()) src = int(k);
                std::string target = need_string(jt.value(), "restriction image");
                for (std::size_t k = 0; k < d.fibers[lo].size(); ++k)
                    if (d.fibers[lo][k] == target) dst = int(k);
                if (src < 0)
                    rep.add(name, "restriction '" + key + "' maps unknown element '" + jt.key() + "'");
                else if (dst < 0)
                    rep.add(name, "restriction '" + key + "' maps to unknown element '" + target + "'");
                else
                    map[src] = dst;
            }
            for (std::size_t k = 0; k < map.size(); ++k)
                if (map[k] < 0)
                    rep.add(name, "restriction '" + key + "' is not total: no image for '" +
                                      d.fibers[hi][k] + "'");
            if (!rep.ok()) {
                m.issues.emplace_back("presheaf " + name, std::move(rep));
                return;
            }
            d.maps[{hi, lo}] = std::move(map);
        }
    }
    ValidationReport rep = Presheaf::validate(d);
    if (!rep.ok()) {
        m.issues.emplace_back("presheaf " + name, std::move(rep));
        return;
    }
    auto owned = std::make_unique<Presheaf>(Presheaf::create(std::move(d)));
    m.presheaves.push_back({name, owned.get(), std::move(owned)});
}

void load_relation(Model& m, const std::string& name, const json& j) {
    std::string sort = need_string(need(j, "sort", ("relation '" + name + "'").c_str()), "sort");
    const Presheaf* ps = m.find_presheaf(sort);
    ValidationReport rep;
    if (!ps) {
        rep.add(name, "unknown sort '" + sort + "'");
        m.issues.emplace_back("relation " + name, std::move(rep));
        return;
    }
    std::vector<std::vector<Bits>> adj(m.poset.size());
    for (int c = 0; c < m.poset.size(); ++c) adj[c].assign(ps->fiber_size(c), Bits(ps->fiber_size(c)));
    if (j.contains("pairs")) {
        const json& pairs = j["pairs"];
        if (!pairs.is_object()) bad_file("pairs of '" + name + "' must be an object");
        for (auto it = pairs.begin(); it != pairs.end(); ++it) {
            int c = m.poset.find(it.key());
            if (c < 0) {
                rep.add(name, "pairs at unknown object '" + it.key() + "'");
                continue;
            }
            if (!it.value().is_array()) bad_file("pairs at '" + it.key() + "' must be an array");
            for (const auto& pr : it.value()) {
                if (!pr.is_array() || pr.size() != 2) bad_file("each pair must be [a, b]");
                int a = ps->elem_find(c, need_string(pr[0], "pair"));
                int b = ps->elem_find(c, need_string(pr[1], "pair"));
                if (a < 0 || b < 0)
                    rep.add(name, "pair at '" + it.key() + "' names an unknown element");
                else
                    adj[c][a].set(b);
            }
        }
    }
    if (!rep.ok()) {
        m.issues.emplace_back("relation " + name, std::move(rep));
        return;
    }
    InternalRelation trial;
    trial.on = ps;
    trial.adj = std::move(adj);
    ValidationReport vrep = relation_validate(trial);
    if (!vrep.ok()) {
        m.issues.emplace_back("relation " + name, std::move(vrep));
        return;
    }
    auto owned = std::make_unique<InternalRelation>(std::move(trial));
    m.relations.push_back({name, owned.get(), std::move(owned)});
}

void load_subobject(Model& m, const std::string& name, const json& j) {
    std::string sort = need_string(need(j, "sort", ("subobject '" + name + "'").c_str()), "sort");
    const Presheaf* ps = m.find_presheaf(sort);
    ValidationReport rep;
    if (!ps) {
        rep.add(name, "unknown sort '" + sort + "'");
        m.issues.emplace_back("subobject " + name, std::move(rep));
        return;
    }
    std::vector<Bits> members;
    for (int c = 0; c < m.poset.size(); ++c) members.push_back(Bits(ps->fiber_size(c)));
    const json& ms = need(j, "members", ("subobject '" + name + "'").c_str());
    if (!ms.is_object()) bad_file("members of '" + name + "' must be an object");
    for (auto it = ms.begin(); it != ms.end(); ++it) {
        int c = m.poset.find(it.key());
        if (c < 0) {
            rep.add(name, "members at unknown object '" + it.key() + "'");
            continue;
        }
        for (const auto& e : string_list(it.value(), "members")) {
            int a = ps->elem_find(c, e);
            if (a < 0)
                rep.add(name, "unknown element '" + e + "' at '" + it.key() + "'");
            else
                members[c].set(a);
        }
    }
    if (!rep.ok()) {
        m.issues.emplace_back("subobject " + name, std::move(rep));
        return;
    }
    SubPresheaf trial;
    trial.of = ps;
    trial.members = std::move(members);
    ValidationReport vrep = SubPresheaf::validate(trial);
    if (!vrep.ok()) {
        m.issues.emplace_back("subobject " + name, std::move(vrep));
        return;
    }
    m.subobjects.push_back({name, std::make_unique<SubPresheaf>(std::move(trial))});
}

}  // namespace

std::unique_ptr<Model> load_model_text(const std::string& text) {
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded()) bad_file("invalid JSON");
    auto m = std::make_unique<Model>();
    load_poset(*m, root);
    if (!m->poset_ok) return m;
    m->om = std::make_unique<Omega>(omega(m->poset));

    if (root.contains("builtins")) {
        const json& b = root["builtins"];
        if (!b.is_object()) bad_file("builtins must be an object");
        if (b.contains("bst") && b["bst"].is_boolean() && b["bst"].get<bool>()) m->bst = true;
    }
    if (m->bst) {
        m->bst_model = build_model(m->poset);
        m->presheaves.push_back({"H", m->bst_model->h.get(), nullptr});
        m->relations.push_back({"undivided", &m->bst_model->undivided, nullptr});
    }
    if (root.contains("presheaves")) {
        const json& js = root["presheaves"];
        if (!js.is_object()) bad_file("presheaves must be an object");
        for (auto it = js.begin(); it != js.end(); ++it) {
            if (m->find_presheaf(it.key())) bad_file("duplicate presheaf '" + it.key() + "'");
            load_presheaf(*m, it.key(), it.value());
        }
    }
    if (root.contains("relations")) {
        const json& js = root["relations"];
        if (!js.is_object()) bad_file("relations must be an object");
        for (auto it = js.begin(); it != js.end(); ++it) {
            if (m->find_relation(it.key())) bad_file("duplicate relation '" + it.key() + "'");
            load_relation(*m, it.key(), it.value());
        }
    }
    if (root.contains("subobjects")) {
        const json& js = root["subobjects"];
        if (!js.is_object()) bad_file("subobjects must be an object");
        for (auto it = js.begin(); it != js.end(); ++it) {
            if (m->find_subobject(it.key())) bad_file("duplicate subobject '" + it.key() + "'");
            load_subobject(*m, it.key(), it.value());
        }
    }
    if (root.contains("formulas")) {
        const json& js = root["formulas"];
        if (!js.is_object()) bad_file("formulas must be an object");
        for (auto it = js.begin(); it != js.end(); ++it)
            m->formulas.emplace_back(it.key(), need_string(it.value(), "formula"));
    }
    return m;
}

std::unique_ptr<Model> load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_model_text(buf.str());
}

}  // namespace topos
