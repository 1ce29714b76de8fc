#ifndef EVANESCENT_H
#define EVANESCENT_H

#include <stddef.h>
#include <stdint.h>

/*
 Selects the kernel basis of a closed form.
 */
#define EV_BASIS_STANDARD_HANKEL 0

#define EV_BASIS_PAPER_KERNEL 1

/*
 Selects the closed-form variant of `S11`.
 */
#define EV_VARIANT_PRINTED 0

#define EV_VARIANT_REDERIVED 1

/*
 Status codes. `EV_STATUS_OK` is zero.
 */
typedef enum EvStatus {
  EV_STATUS_OK = 0,
  EV_STATUS_NULL_POINTER = 1,
  EV_STATUS_INVALID_ARGUMENT = 2,
  EV_STATUS_INVALID_WAVEGUIDE = 3,
  EV_STATUS_DOMAIN_ERROR = 4,
  EV_STATUS_LIGHTCONE_SINGULAR = 5,
  EV_STATUS_FRAME_REQUIRED = 6,
  EV_STATUS_QUADRATURE_FAILURE = 7,
  EV_STATUS_FIT_FAILURE = 8,
  EV_STATUS_PANIC = 9,
} EvStatus;

/*
 Opaque waveguide handle.
 */
typedef struct EvWaveguide EvWaveguide;

typedef struct EvQuadratureSpec {
  double abs_tol;
  double rel_tol;
  uintptr_t max_subdivisions;
  double tail_bound_tol;
} EvQuadratureSpec;

typedef struct EvComplex {
  double re;
  double im;
} EvComplex;

typedef struct EvDecayFit {
  double amplitude;
  double rate;
  double exponent;
  double r_squared;
  double window_min;
  double window_max;
  uintptr_t n_points;
} EvDecayFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null after a success.
 The pointer stays valid until the next call on the same thread.
 */
const char *ev_last_error_message(void);

/*
 Default quadrature tolerances.

 # Safety
 `out` must be null or valid for writes.
 */
enum EvStatus ev_quadrature_spec_default(struct EvQuadratureSpec *out);

/*
 Creates a waveguide with `0 < b1 <= b2`.

 # Safety
 `out` must be null or valid for writes.
 */
enum EvStatus ev_waveguide_new(double b1, double b2, struct EvWaveguide **out);

/*
 Releases a handle from [`ev_waveguide_new`]. Null is ignored.

 # Safety
 `wg` must be null or a live handle not freed before.
 */
void ev_waveguide_free(struct EvWaveguide *wg);

/*
 `omega_c = pi / b2`.

 # Safety
 `wg` must be null or a live handle; `out` null or valid for writes.
 */
enum EvStatus ev_lowest_cutoff(const struct EvWaveguide *wg, double *out);

/*
 Cutoff of mode `(r, s)`, `s >= 1`.

 # Safety
 As [`ev_lowest_cutoff`].
 */
enum EvStatus ev_cutoff_frequency(const struct EvWaveguide *wg,
                                  uint32_t r,
                                  uint32_t s,
                                  double *out);

/*
 `D(t, r)` by quadrature. `spec` may be null for the defaults.

 # Safety
 Pointers must be null or valid.
 */
enum EvStatus ev_propagator_quadrature(const struct EvWaveguide *wg,
                                       double t,
                                       double r,
                                       const struct EvQuadratureSpec *spec,
                                       struct EvComplex *out);

/*
 Closed-form `D(t, r)` in basis `EV_BASIS_*`.

 # Safety
 Pointers must be null or valid.
 */
enum EvStatus ev_propagator_closed(const struct EvWaveguide *wg,
                                   double t,
                                   double r,
                                   uint32_t basis_code,
                                   const struct EvQuadratureSpec *spec,
                                   double eps_light,
                                   struct EvComplex *out);

/*
 `S11(t, r)` by quadrature.

 # Safety
 Pointers must be null or valid.
 */
enum EvStatus ev_s11_quadrature(const struct EvWaveguide *wg,
                                double t,
                                double r,
                                const struct EvQuadratureSpec *spec,
                                struct EvComplex *out);

/*
 Closed-form `S11(t, r)`: variant `EV_VARIANT_*`, basis `EV_BASIS_*`.

 # Safety
 Pointers must be null or valid.
 */
enum EvStatus ev_s11_closed(const struct EvWaveguide *wg,
                            double t,
                            double r,
                            uint32_t variant_code,
                            uint32_t basis_code,
                            const struct EvQuadratureSpec *spec,
                            double eps_light,
                            struct EvComplex *out);

/*
 `S_ij(t, r)` at transverse offset `x2`, indices in 1..=3.

 # Safety
 Pointers must be null or valid.
 */
enum EvStatus ev_s_ij_quadrature(const struct EvWaveguide *wg,
                                 double t,
                                 double r,
                                 double x2,
                                 uint32_t i,
                                 uint32_t j,
                                 const struct EvQuadratureSpec *spec,
                                 struct EvComplex *out);

/*
 `H_order^(2)(z)` for real `z > 0` or `z = -i x`.

 # Safety
 `out` must be null or valid for writes.
 */
enum EvStatus ev_hankel2(uint32_t order, struct EvComplex z, struct EvComplex *out);

/*
 `J_order(x)`.

 # Safety
 `out` must be null or valid for writes.
 */
enum EvStatus ev_bessel_j(uint32_t order, double x, double *out);

/*
 `Y_order(x)`, `x > 0`.

 # Safety
 `out` must be null or valid for writes.
 */
enum EvStatus ev_bessel_y(uint32_t order, double x, double *out);

/*
 `K_order(x)`, `x > 0`.

 # Safety
 `out` must be null or valid for writes.
 */
enum EvStatus ev_bessel_k(uint32_t order, double x, double *out);

/*
 Fits `A r^p exp(-rate r)` to `n` samples.

 # Safety
 `r` and `modulus` must each point to `n` readable doubles.
 */
enum EvStatus ev_fit_spacelike_decay(const double *r,
                                     const double *modulus,
                                     uintptr_t n,
                                     struct EvDecayFit *out);

/*
 Runs the verification battery for guide `(b1, b2)` with default settings
 and returns the JSON report, to be released with [`ev_string_free`].
 `all_passed` (nullable) receives 1 when every assertable check passed.

 # Safety
 `out` must be valid for writes; `all_passed` null or valid.
 */
enum EvStatus ev_verify_json(double b1, double b2, char **out, int32_t *all_passed);

/*
 Releases a string from this library. Null is ignored.

 # Safety
 `s` must be null or a string returned by this library, not freed before.
 */
void ev_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EVANESCENT_H */
