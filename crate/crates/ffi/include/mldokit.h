#ifndef MLDOKIT_H
#define MLDOKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum MldokitStatus {
  MLDOKIT_STATUS_OK = 0,
  MLDOKIT_STATUS_NULL_POINTER = 1,
  MLDOKIT_STATUS_INVALID_UTF8 = 2,
  MLDOKIT_STATUS_PARSE = 3,
  MLDOKIT_STATUS_WEIGHT = 4,
  MLDOKIT_STATUS_NOT_MODULAR = 5,
  MLDOKIT_STATUS_MATH = 6,
  MLDOKIT_STATUS_INVALID_ARGUMENT = 7,
  MLDOKIT_STATUS_PANIC = 8,
} MldokitStatus;

// A quasimodular form.
typedef struct MldokitForm MldokitForm;

// A modular linear differential operator.
typedef struct MldokitOperator MldokitOperator;

// Message of the last failed call on this thread, or NULL. The returned
// string is owned by the caller.
char *mldokit_last_error(void);

// Releases a string returned by this library. NULL is ignored.
void mldokit_string_free(char *s);

enum MldokitStatus mldokit_form_parse(const char *src, struct MldokitForm **out);

void mldokit_form_free(struct MldokitForm *f);

enum MldokitStatus mldokit_form_weight(const struct MldokitForm *f, uint32_t *out);

enum MldokitStatus mldokit_form_depth(const struct MldokitForm *f, uint32_t *out);

// Canonical text of a form.
enum MldokitStatus mldokit_form_to_string(const struct MldokitForm *f, char **out);

// `D^n F`.
enum MldokitStatus mldokit_form_derivative(const struct MldokitForm *f,
                                           uint32_t n,
                                           struct MldokitForm **out);

enum MldokitStatus mldokit_form_projection(const struct MldokitForm *f, struct MldokitForm **out);

// Coefficients of `q^0 .. q^n` as a comma separated list of rationals.
enum MldokitStatus mldokit_form_qexp(const struct MldokitForm *f, size_t n, char **out);

enum MldokitStatus mldokit_omega(uint32_t m, struct MldokitForm **out);

// Rankin-Cohen bracket `[F, G]_n` with the weights of the two forms.
enum MldokitStatus mldokit_rc_bracket(const struct MldokitForm *f,
                                      const struct MldokitForm *g,
                                      uint32_t n,
                                      struct MldokitForm **out);

// Parses an operator acting on weight `k` (a rational such as `"1/5"`).
enum MldokitStatus mldokit_operator_parse(const char *src,
                                          const char *k,
                                          struct MldokitOperator **out);

// The operator `L_{F,k}` attached to a quasimodular form.
enum MldokitStatus mldokit_operator_from_form(const struct MldokitForm *f,
                                              const char *k,
                                              struct MldokitOperator **out);

void mldokit_operator_free(struct MldokitOperator *op);

enum MldokitStatus mldokit_operator_to_string(const struct MldokitOperator *op, char **out);

enum MldokitStatus mldokit_operator_is_modular(const struct MldokitOperator *op, bool *out);

// Coefficients in the basis `"d"`, `"serre"`, `"kk"` or `"vz"`, comma
// separated.
enum MldokitStatus mldokit_operator_to_basis(const struct MldokitOperator *op,
                                             const char *basis,
                                             char **out);

enum MldokitStatus mldokit_operator_apply(const struct MldokitOperator *op,
                                          const struct MldokitForm *f,
                                          struct MldokitForm **out);

// Dimension of the operators of weight `gain` and order at most `n`.
enum MldokitStatus mldokit_dim_mldo(uint32_t gain, uint32_t n, size_t *out);

#endif /* MLDOKIT_H */
