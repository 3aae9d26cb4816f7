#ifndef TOPOS_C_H
#define TOPOS_C_H

/*
 * C interface to the topos engine. Models are opaque handles loaded from the
 * JSON model format; every command renders a report string (human-readable
 * tables, or structured JSON when opts->json is set) that the caller frees
 * with topos_string_free.
 *
 * Statuses mirror the CLI exit-code contract: 0 success, 1 validation
 * failure, 2 strict law failure, 3 parse or I/O error.
 */

#ifdef __cplusplus
extern "C" {
#endif

typedef struct topos_model topos_model;

typedef enum topos_status {
    TOPOS_OK = 0,
    TOPOS_E_VALIDATION = 1,
    TOPOS_E_LAW = 2,
    TOPOS_E_PARSE = 3
} topos_status;

typedef struct topos_options {
    int json;                /* nonzero: structured JSON report */
    int strict;              /* axioms: fail (status 2) when a promised law breaks */
    int oracle;              /* axioms: compute the operators by the composite route */
    long limit;              /* per-stage enumeration cap; <= 0 keeps the default */
    unsigned long long seed; /* sampling seed */
    const char* relation;    /* axioms / barcan */
    const char* phi;         /* barcan: atom name */
    const char* formula;     /* eval: formula name or source text */
    const char* stage;       /* eval / power / omega: stage name */
    const char* env;         /* eval: comma-separated var=element bindings */
    const char* sort;        /* power: presheaf name */
} topos_options;

/* zero-initialized defaults */
void topos_options_init(topos_options* opts);

topos_status topos_model_open(const char* path, topos_model** out);
topos_status topos_model_from_json(const char* text, topos_model** out);
void topos_model_free(topos_model* m);

topos_status topos_cmd_check(topos_model* m, const topos_options* opts, char** report);
topos_status topos_cmd_histories(topos_model* m, const topos_options* opts, char** report);
topos_status topos_cmd_axioms(topos_model* m, const topos_options* opts, char** report);
topos_status topos_cmd_eval(topos_model* m, const topos_options* opts, char** report);
topos_status topos_cmd_barcan(topos_model* m, const topos_options* opts, char** report);
topos_status topos_cmd_power(topos_model* m, const topos_options* opts, char** report);
topos_status topos_cmd_omega(topos_model* m, const topos_options* opts, char** report);

/* message for the most recent failing call on this thread */
const char* topos_last_error(void);

void topos_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
