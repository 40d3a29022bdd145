#ifndef POLQEC_H
#define POLQEC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every entry point.
 */
typedef enum PolqecStatus {
  POLQEC_STATUS_OK = 0,
  POLQEC_STATUS_NULL_POINTER = 1,
  POLQEC_STATUS_INVALID_ARGUMENT = 2,
  POLQEC_STATUS_NOT_NORMALIZED = 3,
  POLQEC_STATUS_STRUCTURE = 4,
  POLQEC_STATUS_UNDEFINED_ESTIMATE = 5,
  POLQEC_STATUS_PANIC = 6,
} PolqecStatus;

/**
 * Classical coherent field.
 */
typedef struct PolqecCoherentField PolqecCoherentField;

/**
 * Single-photon state.
 */
typedef struct PolqecPhotonState PolqecPhotonState;

typedef struct PolqecComplex {
  double re;
  double im;
} PolqecComplex;

/**
 * Channel phases `lambda`, `xi` and mixing angle `phi`, in radians.
 */
typedef struct PolqecChannel {
  double lambda;
  double xi;
  double phi;
} PolqecChannel;

typedef struct PolqecBb84Stats {
  uint64_t n_rounds;
  uint64_t n_sifted;
  uint64_t n_errors;
  double sift_rate;
  double qber;
  /**
   * Negative when no eavesdropper was simulated.
   */
  double eve_success;
} PolqecBb84Stats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *polqec_last_error_message(void);

/**
 * Library version, as a static NUL-terminated string.
 */
const char *polqec_version(void);

/**
 * New qubit `h|H> + v|V>` at the encoder input. Must be normalized.
 */
enum PolqecStatus polqec_qubit_new(struct PolqecComplex h,
                                   struct PolqecComplex v,
                                   struct PolqecPhotonState **out);

void polqec_photon_state_free(struct PolqecPhotonState *state);

/**
 * Number of nonzero mode amplitudes.
 */
enum PolqecStatus polqec_photon_state_len(const struct PolqecPhotonState *state, size_t *out);

/**
 * Encoder, channel and the two-interferometer corrector.
 */
enum PolqecStatus polqec_fig1_correct(const struct PolqecPhotonState *input,
                                      struct PolqecChannel channel,
                                      struct PolqecPhotonState **out);

/**
 * Encoder, channel and the simplified corrector.
 */
enum PolqecStatus polqec_fig2_correct(const struct PolqecPhotonState *input,
                                      struct PolqecChannel channel,
                                      struct PolqecPhotonState **out);

/**
 * Probability of finding the photon on receiver output `port` (1 or 2).
 */
enum PolqecStatus polqec_port_probability(const struct PolqecPhotonState *state,
                                          uint8_t port,
                                          double *out);

/**
 * Fidelity between the state conditioned on output `port` and `reference`
 * (a qubit from [`polqec_qubit_new`]). Returns `UndefinedEstimate` when the
 * port is never reached.
 */
enum PolqecStatus polqec_port_fidelity(const struct PolqecPhotonState *state,
                                       uint8_t port,
                                       const struct PolqecPhotonState *reference,
                                       double *out);

/**
 * `|<a|b>|^2` over the full mode labels.
 */
enum PolqecStatus polqec_fidelity(const struct PolqecPhotonState *a,
                                  const struct PolqecPhotonState *b,
                                  double *out);

/**
 * Passive corrector acting on the coherent pulse `(alpha, beta)`.
 */
enum PolqecStatus polqec_passive_correct(struct PolqecComplex alpha,
                                         struct PolqecComplex beta,
                                         struct PolqecChannel channel,
                                         struct PolqecCoherentField **out);

void polqec_coherent_field_free(struct PolqecCoherentField *field);

/**
 * Power in time slot `delay` of `port`: 1 or 2 for the receiver outputs,
 * 0 for the discarded coupler output.
 */
enum PolqecStatus polqec_field_power(const struct PolqecCoherentField *field,
                                     uint8_t delay,
                                     uint8_t port,
                                     double *out);

/**
 * Eve's unconditional guessing probability for disturbance `pe`.
 */
enum PolqecStatus polqec_fpb_eve_success(double pe, double *out);

/**
 * Error rate and Eve's success conditioned on output `port` for Alice state
 * `state` (0 H, 1 V, 2 +, 3 -) sent through the probe and the simplified
 * corrector. Returns `UndefinedEstimate` when the port is never reached.
 */
enum PolqecStatus polqec_fpb_port_stats(uint8_t state,
                                        double pe,
                                        struct PolqecChannel channel,
                                        uint8_t port,
                                        double *qber,
                                        double *eve_success);

/**
 * BB84 Monte Carlo with the default random channel. A negative `pe` runs
 * without an eavesdropper.
 */
enum PolqecStatus polqec_bb84_run(uint64_t n_rounds,
                                  uint64_t seed,
                                  double pe,
                                  bool both_ports,
                                  struct PolqecBb84Stats *out);

/**
 * Mixing angle from the useful-pulse powers on outputs 1 and 2.
 */
enum PolqecStatus polqec_estimate_phi(double power_port1, double power_port2, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLQEC_H */
