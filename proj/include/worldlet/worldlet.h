/* C interface to the worldlet library.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns a wl_status and reports details through the
 * context: wl_last_error() gives the message, wl_last_error_json() a JSON
 * error body. Strings returned through char** are owned by the caller and
 * released with wl_string_free(). A context must not be shared between
 * threads; library calls may use worker threads internally (wl_context_set_threads).
 *
 * Domain elements are 1-based in all JSON documents. Probabilities are exact
 * "p/q" strings.
 */
#ifndef WORLDLET_H
#define WORLDLET_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define WL_API __declspec(dllexport)
#else
#define WL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wl_status {
    WL_OK = 0,
    WL_ERR_DOMAIN = 1,   /* invalid argument or violated precondition */
    WL_ERR_RESOURCE = 2, /* enumeration or permutation budget exceeded */
    WL_ERR_PARSE = 3,    /* malformed JSON or rational */
    WL_ERR_INTERNAL = 4
} wl_status;

typedef enum wl_convention { WL_DIRECTED = 0, WL_UNDIRECTED = 1 } wl_convention;

typedef struct wl_context wl_context;
typedef struct wl_signature wl_signature;
typedef struct wl_world wl_world;
typedef struct wl_distribution wl_distribution;
typedef struct wl_model wl_model;

WL_API const char* wl_version(void);
WL_API const char* wl_status_name(wl_status status);

WL_API wl_context* wl_context_new(void);
WL_API void wl_context_free(wl_context* ctx);
/* 0 = all hardware threads. Results do not depend on the thread count. */
WL_API void wl_context_set_threads(wl_context* ctx, unsigned threads);
/* Caps on enumerated worlds and on permutations per canonical-form search. */
WL_API void wl_context_set_budget(wl_context* ctx, uint64_t max_worlds, uint64_t max_permutations);
WL_API const char* wl_last_error(const wl_context* ctx);
/* {"error":{"status":"domain","code":1,"message":"..."}} or "" after success. */
WL_API const char* wl_last_error_json(const wl_context* ctx);
WL_API void wl_string_free(char* text);

/* --- objects ---------------------------------------------------------------- */

/* NULL json gives the graph signature {"relations":[{"name":"e","arity":2}]}. */
WL_API wl_status wl_signature_parse(wl_context* ctx, const char* json, wl_signature** out);
WL_API wl_status wl_signature_to_json(wl_context* ctx, const wl_signature* signature, char** out);
WL_API void wl_signature_free(wl_signature* signature);

/* A "signature" member in the world JSON overrides `fallback`; NULL fallback
 * means the graph signature. */
WL_API wl_status wl_world_parse(wl_context* ctx, const char* json, const wl_signature* fallback, wl_world** out);
WL_API wl_status wl_world_to_json(wl_context* ctx, const wl_world* world, char** out);
WL_API int wl_world_size(const wl_world* world);
WL_API void wl_world_free(wl_world* world);

WL_API wl_status wl_distribution_parse(wl_context* ctx, const char* json, wl_distribution** out);
WL_API wl_status wl_distribution_to_json(wl_context* ctx, const wl_distribution* dist, char** out);
/* Re-validates the entries under another convention. */
WL_API wl_status wl_distribution_with_convention(wl_context* ctx, const wl_distribution* dist, wl_convention convention,
                                                 wl_distribution** out);
/* Worldlet size k of the entries. */
WL_API int wl_distribution_size(const wl_distribution* dist);
WL_API void wl_distribution_free(wl_distribution* dist);
/* "empty", "complete", "plus", "bipart" (the undirected 3-world rows) or "mixture". */
WL_API wl_status wl_distribution_builtin(wl_context* ctx, const char* name, wl_distribution** out);

WL_API wl_status wl_model_parse(wl_context* ctx, const char* json, wl_model** out);
WL_API wl_status wl_model_to_json(wl_context* ctx, const wl_model* model, char** out);
WL_API int wl_model_has_global_latent(const wl_model* model);
WL_API void wl_model_free(wl_model* model);

/* --- relational core and worldlet statistics --------------------------------- */

/* JSON array of worlds, or with iso_classes != 0 of {"id","class_size","world"}. */
WL_API wl_status wl_enumerate_worlds(wl_context* ctx, const wl_signature* signature, int n, wl_convention convention,
                                     int iso_classes, char** out);
/* JSON array of {"code","cell"} in T_m order. */
WL_API wl_status wl_enumerate_cells(wl_context* ctx, const wl_signature* signature, int m, char** out);
/* P^(k)(.|world), or P^(k) hat with unordered != 0. */
WL_API wl_status wl_frequency(wl_context* ctx, const wl_world* world, int k, wl_convention convention, int unordered,
                              wl_distribution** out);
WL_API wl_status wl_fenstad(wl_context* ctx, const wl_distribution* dist, int k, wl_distribution** out);
WL_API wl_status wl_marginalize(wl_context* ctx, const wl_distribution* dist, int m, wl_distribution** out);
WL_API wl_status wl_iso_average(wl_context* ctx, const wl_distribution* dist, wl_distribution** out);
/* {"exchangeable":bool,"witness":[world,world]|null} */
WL_API wl_status wl_check_exchangeable(wl_context* ctx, const wl_distribution* dist, char** out);

/* --- extendability ----------------------------------------------------------- */

/* Membership of dist in Delta(k, n) with an exactly verified certificate. */
WL_API wl_status wl_check_extendable(wl_context* ctx, const wl_distribution* dist, int n, int iso_average_first,
                                     char** out);
WL_API wl_status wl_check_modularity(wl_context* ctx, const wl_distribution* dist, char** out);
/* CSV "class_id,multiplicity,x,y"; NULL axes select the defaults. */
WL_API wl_status wl_scatter_csv(wl_context* ctx, const wl_signature* signature, int k, int n, wl_convention convention,
                                const char* x_axis, const char* y_axis, char** out);

/* --- AHK models ---------------------------------------------------------------- */

/* Same seed, larger n: the first m elements induce the size-m sample. */
WL_API wl_status wl_ahk_sample(wl_context* ctx, const wl_model* model, int n, uint64_t seed, wl_world** out);
/* Comma-separated subset of equivariance,projectivity,exchangeability,modularity,degree
 * (NULL: all that apply). JSON report with per-check verdicts. */
WL_API wl_status wl_ahk_verify(wl_context* ctx, const wl_model* model, const char* checks, uint64_t samples,
                               uint64_t seed, char** out);

/* --- concentration -------------------------------------------------------------- */

WL_API wl_status wl_worldlet_count(wl_context* ctx, const wl_signature* signature, int k, wl_convention convention,
                                   uint64_t* out);
/* t as an exact rational string. */
WL_API wl_status wl_bound(wl_context* ctx, int n, int k, const char* t, uint64_t worldlets, char** out);
/* target may be NULL (estimated from the model). */
WL_API wl_status wl_deviation(wl_context* ctx, const wl_model* model, int k, int n, uint64_t samples, const char* t,
                              uint64_t seed, const wl_distribution* target, char** out);
/* mode "exhaustive" or "local". */
WL_API wl_status wl_search_realizer(wl_context* ctx, const wl_distribution* dist, int n, const char* mode,
                                    uint64_t restarts, uint64_t seed, char** out);

#ifdef __cplusplus
}
#endif

#endif
