/* The C API header must stay consumable from plain C. */

#include <stdio.h>
#include <string.h>

#include "topos/topos_c.h"

static const char* model_json =
    "{ \"poset\": { \"objects\": [\"a\", \"b\"], \"covers\": [[\"a\", \"b\"]] },"
    "  \"builtins\": { \"bst\": true } }";

int main(void) {
    topos_model* m = NULL;
    if (topos_model_from_json(model_json, &m) != TOPOS_OK) {
        fprintf(stderr, "load: %s\n", topos_last_error());
        return 1;
    }
    topos_options opts;
    topos_options_init(&opts);
    char* report = NULL;
    if (topos_cmd_check(m, &opts, &report) != TOPOS_OK || report == NULL) {
        fprintf(stderr, "check: %s\n", topos_last_error());
        topos_model_free(m);
        return 1;
    }
    int ok = strstr(report, "result: valid") != NULL;
    topos_string_free(report);

    opts.formula = "forall h:H. E(h)";
    if (topos_cmd_eval(m, &opts, &report) != TOPOS_OK) {
        fprintf(stderr, "eval: %s\n", topos_last_error());
        topos_model_free(m);
        return 1;
    }
    ok = ok && strstr(report, "yes") != NULL;
    topos_string_free(report);
    topos_model_free(m);

    if (topos_model_open("/no/such/file.json", &m) != TOPOS_E_PARSE) ok = 0;

    printf(ok ? "c api smoke: ok\n" : "c api smoke: FAILED\n");
    return ok ? 0 : 1;
}
