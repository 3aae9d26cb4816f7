// Batch workbench over the C API: load a JSON model, run one command,
// print the report. Exit codes: 0 ok, 1 validation failure, 2 strict law
// failure, 3 parse/IO error.

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "topos/topos_c.h"

namespace {

struct Args {
    std::string model_path;
    topos_options opts;
    std::string relation, phi, formula, stage, env, sort;
    bool json = false, strict = false, oracle = false;
    long limit = 0;
    unsigned long long seed = 0;
};

int run(const char* command, const Args& args) {
    topos_model* model = nullptr;
    topos_status st = topos_model_open(args.model_path.c_str(), &model);
    if (st != TOPOS_OK) {
        std::fprintf(stderr, "topos: %s\n", topos_last_error());
        return int(st);
    }

    topos_options opts;
    topos_options_init(&opts);
    opts.json = args.json ? 1 : 0;
    opts.strict = args.strict ? 1 : 0;
    opts.oracle = args.oracle ? 1 : 0;
    opts.limit = args.limit;
    opts.seed = args.seed;
    if (!args.relation.empty()) opts.relation = args.relation.c_str();
    if (!args.phi.empty()) opts.phi = args.phi.c_str();
    if (!args.formula.empty()) opts.formula = args.formula.c_str();
    if (!args.stage.empty()) opts.stage = args.stage.c_str();
    if (!args.env.empty()) opts.env = args.env.c_str();
    if (!args.sort.empty()) opts.sort = args.sort.c_str();

    char* report = nullptr;
    std::string cmd(command);
    if (cmd == "check")
        st = topos_cmd_check(model, &opts, &report);
    else if (cmd == "histories")
        st = topos_cmd_histories(model, &opts, &report);
    else if (cmd == "axioms")
        st = topos_cmd_axioms(model, &opts, &report);
    else if (cmd == "eval")
        st = topos_cmd_eval(model, &opts, &report);
    else if (cmd == "barcan")
        st = topos_cmd_barcan(model, &opts, &report);
    else if (cmd == "power")
        st = topos_cmd_power(model, &opts, &report);
    else if (cmd == "omega")
        st = topos_cmd_omega(model, &opts, &report);

    if (report) {
        std::fputs(report, stdout);
        topos_string_free(report);
    } else if (st != TOPOS_OK) {
        std::fprintf(stderr, "topos: %s\n", topos_last_error());
    }
    topos_model_free(model);
    return int(st);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite presheaf-topos workbench: sieves, forcing, modal operators"};
    app.require_subcommand(1);

    Args args;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("model", args.model_path, "JSON model file")->required();
        sub->add_flag("--json", args.json, "structured JSON report");
        sub->add_option("--seed", args.seed, "seed for sampled regimes (default 0)");
        sub->add_option("--limit", args.limit, "per-stage enumeration cap (default 4096)");
        return sub;
    };

    add_common(app.add_subcommand("check", "validate the model file"));
    add_common(app.add_subcommand("histories", "histories, fibers, undividedness, choice points"));

    CLI::App* axioms = add_common(app.add_subcommand("axioms", "IS4/MAO/distributivity law report"));
    axioms->add_option("--relation", args.relation, "relation name");
    axioms->add_flag("--strict", args.strict, "exit 2 when a promised law fails");
    std::string mode = "fast";
    axioms->add_option("--mode", mode, "fast|oracle (default fast)")
        ->check(CLI::IsMember({"fast", "oracle"}));

    CLI::App* eval = add_common(app.add_subcommand("eval", "evaluate a formula"));
    eval->add_option("--formula", args.formula, "formula name or source text")->required();
    eval->add_option("--stage", args.stage, "stage name");
    eval->add_option("--env", args.env, "bindings var=element,var=element");

    CLI::App* barcan = add_common(app.add_subcommand("barcan", "quantifier/modality exchange report"));
    barcan->add_option("--relation", args.relation, "relation name");
    barcan->add_option("--phi", args.phi, "atom name");

    CLI::App* power = add_common(app.add_subcommand("power", "enumerate power-object elements"));
    power->add_option("--sort", args.sort, "presheaf name")->required();
    power->add_option("--stage", args.stage, "stage name");

    CLI::App* om = add_common(app.add_subcommand("omega", "sieves of the subobject classifier"));
    om->add_option("--stage", args.stage, "stage name");

    CLI11_PARSE(app, argc, argv);

    args.oracle = mode == "oracle";
    for (const char* name : {"check", "histories", "axioms", "eval", "barcan", "power", "omega"})
        if (app.get_subcommand(name)->parsed()) return run(name, args);
    return 3;
}
