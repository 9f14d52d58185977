/* C ABI for the orientifold holonomy library.
 *
 * Conventions:
 *   - every fallible call returns an OfStatus; OF_STATUS_OK is 0 and the
 *     semantic/input codes match the CLI exit codes (1 and 2);
 *   - on any non-OK return, of_last_error() describes what went wrong
 *     (thread-local, valid until the next failing call on the same thread);
 *   - strings returned through char ** are owned by the caller and must be
 *     released with of_string_free(); scene handles with of_scene_free();
 *   - JSON payloads use the same schemas as the CLI
 *     (orientifold/validation-report/1, orientifold/cohomology-report/1,
 *     orientifold/flat-equivariant/1, orientifold/descend-report/1).
 *
 * Maintained by hand against src/lib.rs; tests/ffi.rs compiles and runs a
 * C program against this header to keep the two in sync.
 */

#ifndef ORIENTIFOLD_H
#define ORIENTIFOLD_H

#include <stdbool.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes shared by every fallible entry point. */
typedef enum OfStatus {
  /* success */
  OF_STATUS_OK = 0,
  /* the inputs were well-formed but the mathematics refused them
   * (validation failure, non-invariant sweep, ...) */
  OF_STATUS_FAIL = 1,
  /* malformed input: missing file, bad JSON, unknown name, bad argument */
  OF_STATUS_INPUT = 2,
  /* a required pointer argument was null */
  OF_STATUS_NULL_ARG = 3,
  /* a char * argument was not valid UTF-8 */
  OF_STATUS_UTF8 = 4,
  /* an internal panic was caught at the boundary */
  OF_STATUS_PANIC = 5,
} OfStatus;

/* Opaque scene handle: a built double cover plus a local datum on it. */
typedef struct OfScene OfScene;

/* Message for the most recent failure on this thread.  Empty until a call
 * fails; the pointer stays valid until the next failing call on the same
 * thread.  Do not free. */
const char *of_last_error(void);

/* Library version as a static string; do not free. */
const char *of_version(void);

/* Releases a string returned through a char ** out-parameter.  Null is a
 * no-op. */
void of_string_free(char *s);

/* Loads a scene file (schema orientifold/scene/1), resolving referenced
 * surface/datum/choice files against the scene's directory and generating
 * a pure-gauge datum when none is referenced.  On OF_STATUS_OK, *out owns
 * the scene and must be released with of_scene_free(). */
OfStatus of_scene_load(const char *path, OfScene **out);

/* Builds a named surface model ("klein", "rp2", "mobius", ...) and
 * generates a rank-`rank` pure-gauge datum on it, optionally twisted by
 * the degree-2 class with constant `twist` (a rational angle like "1/2";
 * pass NULL for the trivial class). */
OfStatus of_scene_generate(const char *surface,
                           uint32_t rank,
                           uint64_t seed,
                           const char *twist,
                           OfScene **out);

/* Releases a scene handle; null is a no-op. */
void of_scene_free(OfScene *scene);

/* Bundle rank of the scene's datum, or 0 if `scene` is null. */
uint32_t of_scene_rank(const OfScene *scene);

/* Runs the full validator at the given tolerance (rank-1 data are exact;
 * 1e-9 is the conventional tolerance for matrix ranks) and sets *clean. */
OfStatus of_validate(const OfScene *scene, double tolerance, bool *clean);

/* Like of_validate() but returns the full validation report as canonical
 * JSON (schema orientifold/validation-report/1). */
OfStatus of_validation_json(const OfScene *scene,
                            double tolerance,
                            char **out);

/* Evaluates holonomy at the scene's domain choice (or the canonical one)
 * and writes the value as a complex number.  Exact rank-1 angles are
 * converted with exp(2 pi i angle). */
OfStatus of_holonomy(const OfScene *scene, double *re, double *im);

/* Evaluates rank-1 holonomy and returns the exact angle as a rational
 * string like "3/4".  Fails with OF_STATUS_FAIL when the value is not
 * exact (rank >= 2). */
OfStatus of_holonomy_angle(const OfScene *scene, char **out);

/* Sweeps the space of domain choices: exhaustively when it has at most
 * 2^20 points, otherwise over `samples` seeded draws.  Sets whether the
 * value was invariant, how many choices were visited, and whether the
 * sweep was exhaustive. */
OfStatus of_holonomy_sweep(const OfScene *scene,
                           uint64_t samples,
                           bool *invariant,
                           uint64_t *swept,
                           bool *exhaustive);

/* Computes twisted group cohomology for a named group ("jandl",
 * "z2z2-projection", "cyclic-N", "reflecting-cyclic-N", ...) or a group
 * file path, in the given degree (1 to 3), and returns the report as
 * canonical JSON (schema orientifold/cohomology-report/1). */
OfStatus of_cohomology_json(const char *group, uint32_t degree, char **out);

/* Quotients a flat equivariant datum (schema orientifold/flat-equivariant/1,
 * passed as a JSON string) down the free kernel action and returns the
 * descent report with the resulting flat Jandl or plain gerbe datum
 * embedded (schema orientifold/descend-report/1).
 *
 * Returns OF_STATUS_FAIL when the input or the quotient fails its
 * validator; OF_STATUS_INPUT for malformed JSON or shape mismatches. */
OfStatus of_descend_json(const char *flat_json, char **out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ORIENTIFOLD_H */
