#ifndef UPO_H
#define UPO_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum UpoStatus {
  UPO_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  UPO_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  UPO_STATUS_INVALID_UTF8 = 2,
  /**
   * The document has lexical or syntax errors.
   */
  UPO_STATUS_PARSE_ERROR = 3,
  /**
   * A name is not declared.
   */
  UPO_STATUS_UNKNOWN_NAME = 4,
  /**
   * A name is declared with a different kind, or an ICE lacks what the
   * operation needs.
   */
  UPO_STATUS_WRONG_KIND = 5,
  /**
   * The individual does not satisfy what the blueprint prescribes.
   */
  UPO_STATUS_NOT_CONFORMANT = 6,
  /**
   * A timestamp is malformed or out of range.
   */
  UPO_STATUS_INVALID_TIMESTAMP = 7,
  /**
   * The document or request is otherwise invalid.
   */
  UPO_STATUS_INVALID = 8,
  /**
   * An internal failure; the library caught a panic.
   */
  UPO_STATUS_INTERNAL = 9,
} UpoStatus;

/**
 * A parsed ontology. Create with [`upo_ontology_parse`], release with
 * [`upo_ontology_free`].
 */
typedef struct UpoOntology UpoOntology;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a document. With `with_prelude` the built-in upper-level
 * vocabulary is loaded first. All parse errors are reported in the last
 * error message, one per line.
 *
 * # Safety
 * `text` is a nul-terminated string and `out` is a valid pointer.
 */
enum UpoStatus upo_ontology_parse(const char *text, bool with_prelude, struct UpoOntology **out);

/**
 * Releases an ontology. Null is ignored.
 *
 * # Safety
 * `ontology` is null or was returned by this library and not yet freed.
 */
void upo_ontology_free(struct UpoOntology *ontology);

/**
 * Writes the document's own content back as canonical text.
 *
 * # Safety
 * `ontology` is a live handle and `out` is a valid pointer.
 */
enum UpoStatus upo_ontology_serialize(const struct UpoOntology *ontology, char **out);

/**
 * Lints the ontology and writes the findings as a JSON array.
 *
 * # Safety
 * `ontology` is a live handle and `out` is a valid pointer.
 */
enum UpoStatus upo_lint_json(const struct UpoOntology *ontology, char **out);

/**
 * Grounds one ICE and writes the grounding summary as a JSON object.
 *
 * # Safety
 * `ontology` is a live handle, `ice` a nul-terminated string and `out` a
 * valid pointer.
 */
enum UpoStatus upo_ground_json(const struct UpoOntology *ontology, const char *ice, char **out);

/**
 * Checks that `individual` conforms to `blueprint` and returns a new
 * ontology recording that it represents the individual. The input handle is
 * unchanged.
 *
 * # Safety
 * `ontology` is a live handle, the names are nul-terminated strings and
 * `out` is a valid pointer.
 */
enum UpoStatus upo_realize(const struct UpoOntology *ontology,
                           const char *blueprint,
                           const char *individual,
                           struct UpoOntology **out);

/**
 * Resolves a temporal expression ICE (one with `Mode:` and `Cycle:`
 * clauses) uttered at `at` (`YYYY-MM-DDThh:mm:ss`, UTC). Writes a JSON
 * object with `first_instant`, `last_instant` and `designated_class`.
 *
 * # Safety
 * `ontology` is a live handle, `ice` and `at` are nul-terminated strings and
 * `out` is a valid pointer.
 */
enum UpoStatus upo_resolve_indexical(const struct UpoOntology *ontology,
                                     const char *ice,
                                     const char *at,
                                     char **out);

/**
 * Message for the most recent failure on this thread, or null if the most
 * recent call succeeded. Valid until the next call into this library on the
 * same thread; do not free it.
 */
const char *upo_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` is null or was returned by this library and not yet freed.
 */
void upo_string_free(char *s);

/**
 * Library version as a static string; do not free it.
 */
const char *upo_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UPO_H */
