#ifndef RABIVAR_H
#define RABIVAR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every call.
typedef enum RabivarStatus {
  RABIVAR_STATUS_OK = 0,
  RABIVAR_STATUS_NULL_POINTER = 1,
  RABIVAR_STATUS_INVALID_PARAMETER = 2,
  RABIVAR_STATUS_DIMENSION_MISMATCH = 3,
  // Truncation loss, vanishing norm or a non-Hermitian input.
  RABIVAR_STATUS_NUMERICAL = 4,
  RABIVAR_STATUS_NON_CONVERGENCE = 5,
  RABIVAR_STATUS_INVALID_REGIME = 6,
  RABIVAR_STATUS_INVALID_CONFIG = 7,
  RABIVAR_STATUS_BUFFER_TOO_SMALL = 8,
  RABIVAR_STATUS_PANIC = 9,
  RABIVAR_STATUS_OTHER = 10,
} RabivarStatus;

// Opaque state handle.
typedef struct RabivarState RabivarState;

// Model parameters `(ω_c, ω_q, g)`.
typedef struct RabivarModel {
  double omega_c;
  double omega_q;
  double g;
} RabivarModel;

// NOQ parameters `(α_c, r, φ)` with `φ ∈ [π/2, π]`.
typedef struct RabivarNoq {
  double alpha_c;
  double r;
  double phi;
} RabivarNoq;

// Outcome of an NOQ fit.
typedef struct RabivarFit {
  struct RabivarNoq noq;
  double p_minus;
  // `1 − |⟨trial|exact⟩|` against the exact ground state.
  double infidelity;
  // `⟨trial|H|trial⟩ − E₀`.
  double energy_error;
  size_t generations;
  bool converged;
  size_t dim;
} RabivarFit;

// Schmidt parameters `(p₋, α_c, r)`.
typedef struct RabivarSchmidt {
  double p_minus;
  double alpha_c;
  double r;
} RabivarSchmidt;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *rabivar_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *rabivar_version(void);

// Crossover coupling `g*`; `exact != 0` selects the exact form.
//
// # Safety
// `model` must point to a valid struct and `out` to writable memory.
enum RabivarStatus rabivar_g_star(const struct RabivarModel *model, int32_t exact, double *out);

// Second-order squeezing parameter below `g*`.
//
// # Safety
// As [`rabivar_g_star`].
enum RabivarStatus rabivar_weak_coupling_squeeze(const struct RabivarModel *model, double *out);

// Cavity dimension used for exact diagonalization before convergence checks.
//
// # Safety
// As [`rabivar_g_star`].
enum RabivarStatus rabivar_truncation_dim(const struct RabivarModel *model, size_t *out);

// Converged exact ground state and its energy. `energy` may be null.
//
// # Safety
// `model` must be valid; `out` writable. The returned handle must be
// released with [`rabivar_state_free`].
enum RabivarStatus rabivar_ground_state(const struct RabivarModel *model,
                                        struct RabivarState **out,
                                        double *energy);

// NOQ ground state in a `dim`-level cavity.
//
// # Safety
// As [`rabivar_ground_state`].
enum RabivarStatus rabivar_noq_ground(const struct RabivarNoq *params,
                                      size_t dim,
                                      struct RabivarState **out);

// Entangled cat `(|α⟩|+x⟩ − |−α⟩|−x⟩)/√2` in a `dim`-level cavity.
//
// # Safety
// `out` must be writable; release the handle with [`rabivar_state_free`].
enum RabivarStatus rabivar_ecs_ground(double alpha, size_t dim, struct RabivarState **out);

// Releases a state handle; null is ignored.
//
// # Safety
// `state` must come from this library and not be freed twice.
void rabivar_state_free(struct RabivarState *state);

// Cavity dimension of a state; the state has `2 × dim` amplitudes.
//
// # Safety
// `state` must be a live handle and `out` writable.
enum RabivarStatus rabivar_state_dim(const struct RabivarState *state, size_t *out);

// Copies the amplitudes as interleaved `(re, im)` pairs; `len` is the number
// of doubles available at `buf` and must be at least `4 × dim`. Amplitude
// `s × dim + n` belongs to qubit state `s` (`0 = |+z⟩`) and Fock number `n`.
//
// # Safety
// `state` must be live and `buf` valid for `len` doubles.
enum RabivarStatus rabivar_state_amplitudes(const struct RabivarState *state,
                                            double *buf,
                                            size_t len);

// `⟨ψ|H|ψ⟩`.
//
// # Safety
// Pointers must be valid.
enum RabivarStatus rabivar_state_energy(const struct RabivarState *state,
                                        const struct RabivarModel *model,
                                        double *out);

// Purity of the reduced cavity state.
//
// # Safety
// Pointers must be valid.
enum RabivarStatus rabivar_state_cavity_purity(const struct RabivarState *state, double *out);

// `|⟨a|b⟩|`; the smaller state is zero-padded to the larger dimension.
//
// # Safety
// Pointers must be valid.
enum RabivarStatus rabivar_fidelity(const struct RabivarState *a,
                                    const struct RabivarState *b,
                                    double *out);

// Fidelity-optimized NOQ ground state (default optimizer settings).
//
// # Safety
// `model` must be valid and `out` writable.
enum RabivarStatus rabivar_optimize_noq(const struct RabivarModel *model,
                                        uint64_t seed,
                                        struct RabivarFit *out);

// Energy-minimized NOQ ground state (analytic energy, default optimizer settings).
//
// # Safety
// As [`rabivar_optimize_noq`].
enum RabivarStatus rabivar_minimize_energy(const struct RabivarModel *model,
                                           uint64_t seed,
                                           struct RabivarFit *out);

// Closed-form `⟨H⟩` of the NOQ state in Schmidt form.
//
// # Safety
// Pointers must be valid.
enum RabivarStatus rabivar_energy_analytic(const struct RabivarSchmidt *params,
                                           const struct RabivarModel *model,
                                           double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RABIVAR_H */
