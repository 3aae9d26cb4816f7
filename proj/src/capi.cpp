#include "topos/topos_c.h"

#include <cstring>
#include <string>

#include "topos/commands.hpp"

using namespace topos;

struct topos_model {
    std::unique_ptr<Model> model;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

topos_status status_of(const Error& e) {
    g_last_error = std::string(error_kind_name(e.kind())) + ": " + e.what();
    return exit_code_for(e.kind()) == 3 ? TOPOS_E_PARSE : TOPOS_E_VALIDATION;
}

CmdOptions convert(const topos_options* opts) {
    CmdOptions c;
    if (!opts) return c;
    c.json = opts->json != 0;
    c.strict = opts->strict != 0;
    c.mode = opts->oracle ? ModalMode::Oracle : ModalMode::Fast;
    if (opts->limit > 0) c.limit = opts->limit;
    c.seed = opts->seed;
    if (opts->relation) c.relation = opts->relation;
    if (opts->phi) c.phi = opts->phi;
    if (opts->formula) c.formula = opts->formula;
    if (opts->stage) c.stage = opts->stage;
    if (opts->env) c.env = opts->env;
    if (opts->sort) c.sort = opts->sort;
    return c;
}

template <typename F>
topos_status run_command(topos_model* m, const topos_options* opts, char** report, F&& fn) {
    if (!m || !report) {
        g_last_error = "null argument";
        return TOPOS_E_PARSE;
    }
    *report = nullptr;
    try {
        CmdResult res = fn(*m->model, convert(opts));
        *report = dup_string(res.text);
        switch (res.status) {
            case 0: return TOPOS_OK;
            case 1: return TOPOS_E_VALIDATION;
            case 2: return TOPOS_E_LAW;
            default: return TOPOS_E_PARSE;
        }
    } catch (const Error& e) {
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TOPOS_E_VALIDATION;
    }
}

}  // namespace

extern "C" {

void topos_options_init(topos_options* opts) {
    if (opts) std::memset(opts, 0, sizeof(*opts));
}

topos_status topos_model_open(const char* path, topos_model** out) {
    if (!path || !out) {
        g_last_error = "null argument";
        return TOPOS_E_PARSE;
    }
    *out = nullptr;
    try {
        auto model = load_model_file(path);
        *out = new topos_model{std::move(model)};
        return TOPOS_OK;
    } catch (const Error& e) {
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TOPOS_E_PARSE;
    }
}

topos_status topos_model_from_json(const char* text, topos_model** out) {
    if (!text || !out) {
        g_last_error = "null argument";
        return TOPOS_E_PARSE;
    }
    *out = nullptr;
    try {
        auto model = load_model_text(text);
        *out = new topos_model{std::move(model)};
        return TOPOS_OK;
    } catch (const Error& e) {
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TOPOS_E_PARSE;
    }
}

void topos_model_free(topos_model* m) { delete m; }

topos_status topos_cmd_check(topos_model* m, const topos_options* opts, char** report) {
    return run_command(m, opts, report, [](const Model& mm, const CmdOptions& o) {
        return cmd_check(mm, o);
    });
}

topos_status topos_cmd_histories(topos_model* m, const topos_options* opts, char** report) {
    return run_command(m, opts, report, [](const Model& mm, const CmdOptions& o) {
        return cmd_histories(mm, o);
    });
}

topos_status topos_cmd_axioms(topos_model* m, const topos_options* opts, char** report) {
    return run_command(m, opts, report, [](const Model& mm, const CmdOptions& o) {
        return cmd_axioms(mm, o);
    });
}

topos_status topos_cmd_eval(topos_model* m, const topos_options* opts, char** report) {
    return run_command(m, opts, report, [](const Model& mm, const CmdOptions& o) {
        return cmd_eval(mm, o);
    });
}

topos_status topos_cmd_barcan(topos_model* m, const topos_options* opts, char** report) {
    return run_command(m, opts, report, [](const Model& mm, const CmdOptions& o) {
        return cmd_barcan(mm, o);
    });
}

topos_status topos_cmd_power(topos_model* m, const topos_options* opts, char** report) {
    return run_command(m, opts, report, [](const Model& mm, const CmdOptions& o) {
        return cmd_power(mm, o);
    });
}

topos_status topos_cmd_omega(topos_model* m, const topos_options* opts, char** report) {
    return run_command(m, opts, report, [](const Model& mm, const CmdOptions& o) {
        return cmd_omega(mm, o);
    });
}

const char* topos_last_error(void) { return g_last_error.c_str(); }

void topos_string_free(char* s) { std::free(s); }

}  // extern "C"
