/* Minimal C client: corrects a |+> photon and runs a short BB84 batch.
 * Exits 0 when every check holds. */
#include <math.h>
#include <stdio.h>
#include "polqec.h"

#define TRY(call)                                                        \
  do {                                                                   \
    PolqecStatus s_ = (call);                                            \
    if (s_ != POLQEC_STATUS_OK) {                                        \
      fprintf(stderr, "%s failed (%d): %s\n", #call, (int)s_,            \
              polqec_last_error_message());                              \
      return 1;                                                          \
    }                                                                    \
  } while (0)

int main(void) {
  const double r = sqrt(0.5);
  PolqecPhotonState *q = NULL, *out = NULL;
  PolqecChannel ch = {0.3, 1.1, 0.6};
  double p1, p2, f;

  TRY(polqec_qubit_new((PolqecComplex){r, 0}, (PolqecComplex){r, 0}, &q));
  TRY(polqec_fig2_correct(q, ch, &out));
  TRY(polqec_port_probability(out, 1, &p1));
  TRY(polqec_port_probability(out, 2, &p2));
  TRY(polqec_port_fidelity(out, 1, q, &f));
  if (fabs(p1 - cos(0.6) * cos(0.6)) > 1e-12 || fabs(p1 + p2 - 1) > 1e-12 || f < 1 - 1e-12) {
    fprintf(stderr, "unexpected p1=%g p2=%g fidelity=%g\n", p1, p2, f);
    return 1;
  }
  if (polqec_port_probability(out, 7, &p1) != POLQEC_STATUS_INVALID_ARGUMENT) return 1;
  polqec_photon_state_free(out);
  polqec_photon_state_free(q);

  PolqecBb84Stats st;
  TRY(polqec_bb84_run(2000, 7, -1.0, false, &st));
  if (st.n_errors != 0 || st.eve_success >= 0) return 1;

  printf("polqec %s: p1=%.6f fidelity=%.15f sift=%.4f\n", polqec_version(), p1, f,
         st.sift_rate);
  return 0;
}
