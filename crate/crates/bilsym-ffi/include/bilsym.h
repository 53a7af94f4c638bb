#ifndef BILSYM_H
#define BILSYM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BsStatus {
  BS_STATUS_OK = 0,
  BS_STATUS_NULL_POINTER = 1,
  BS_STATUS_INVALID_ARGUMENT = 2,
  BS_STATUS_INVALID_GRID = 3,
  BS_STATUS_GRID_MISMATCH = 4,
  BS_STATUS_X_DEPENDENT = 5,
  BS_STATUS_UNKNOWN_SYMBOL = 6,
  BS_STATUS_NON_FINITE = 7,
  BS_STATUS_PRECONDITION = 8,
  // Buffer passed in is too small.
  BS_STATUS_BUFFER_TOO_SMALL = 9,
  BS_STATUS_INTERNAL = 10,
  // A panic was caught at the boundary.
  BS_STATUS_PANIC = 11,
} BsStatus;

// Complex samples on a grid, in physical space.
typedef struct BsField BsField;

// Periodic lattice.
typedef struct BsGrid BsGrid;

// Bilinear symbol.
typedef struct BsSymbol BsSymbol;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` as a
// NUL-terminated string, truncating to `len − 1` bytes. Returns the full
// message length in bytes, excluding the terminator.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
uintptr_t bs_last_error(char *buf, uintptr_t len);

// Creates a `dim`-dimensional grid with `points` nodes per axis and period `period`.
//
// # Safety
// `out` must be valid for a pointer write.
enum BsStatus bs_grid_new(uintptr_t dim, uintptr_t points, double period, struct BsGrid **out);

// Total number of nodes, `points^dim`; 0 for a null handle.
//
// # Safety
// `grid` must be null or a live handle.
uintptr_t bs_grid_len(const struct BsGrid *grid);

// # Safety
// `grid` must be null or a handle from `bs_grid_new`, not freed before.
void bs_grid_free(struct BsGrid *grid);

// Builds a field from `len` samples in row-major order. `im` may be null
// for real data.
//
// # Safety
// `grid` must be a live handle, `re` (and `im` unless null) must point to
// `len` readable doubles, and `out` must be valid for a pointer write.
enum BsStatus bs_field_from_samples(const struct BsGrid *grid,
                                    const double *re,
                                    const double *im,
                                    uintptr_t len,
                                    struct BsField **out);

// Number of samples of a field; 0 for a null handle.
//
// # Safety
// `field` must be null or a live handle.
uintptr_t bs_field_len(const struct BsField *field);

// Copies the samples into `re` and `im` (either may be null).
//
// # Safety
// `field` must be a live handle; non-null `re`/`im` must point to `len`
// writable doubles.
enum BsStatus bs_field_values(const struct BsField *field, double *re, double *im, uintptr_t len);

// # Safety
// `field` must be null or a handle from this library, not freed before.
void bs_field_free(struct BsField *field);

// `(hⁿ Σ|f|^p)^{1/p}`; `p = INFINITY` gives the sup norm.
//
// # Safety
// `field` must be a live handle and `out` valid for a write.
enum BsStatus bs_lp_norm(const struct BsField *field, double p, double *out);

// Catalogue symbol from its compact label, e.g. `"bracket(-1)"`.
//
// # Safety
// `label` must be a NUL-terminated string and `out` valid for a pointer write.
enum BsStatus bs_symbol_builtin(const char *label, uintptr_t dim, struct BsSymbol **out);

// # Safety
// `symbol` must be null or a handle from this library, not freed before.
void bs_symbol_free(struct BsSymbol *symbol);

// `T_σ(f, g)` for an x-independent symbol; the result is a new field.
//
// # Safety
// All handles must be live and `out` valid for a pointer write.
enum BsStatus bs_apply_fft_diag(const struct BsSymbol *symbol,
                                const struct BsField *f,
                                const struct BsField *g,
                                struct BsField **out);

// Critical order `m(p₁, p₂)` for `S^m_{ρ,δ}` on `n`-dimensional space.
// Exponents are in `[1, ∞]`; pass `INFINITY` for `∞`.
//
// # Safety
// `out` must be valid for a write.
enum BsStatus bs_critical_order(double p1, double p2, double rho, uintptr_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BILSYM_H */
