#ifndef SDPBRIDGE_H
#define SDPBRIDGE_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  SDPB_SOLVED = 0,
  SDPB_INFEASIBLE = 1,
  SDPB_UNKNOWN = 2,
  SDPB_ALMOST_SOLVED = 3,
  SDPB_BAD_INPUT = -1,
};

/* Linear-objective conic program: minimize q'x subject to b - A x lying in
 * Zero(n_eq) x Nonnegative(n_nonneg) x PSDTriangle(psd_dims...), rows in
 * that order. The PSD rows must be -I selectors with b = 0; the caller
 * applies the sqrt(2) scaling of off-diagonal svec coordinates. q may be
 * NULL (pure feasibility). A is given in triplet form. Returns an SDPB_*
 * code; x_out receives the primal point (length n_vars), stats_out (length
 * 4, may be NULL) receives {iterations, primal residual, dual residual,
 * objective value}. */
int32_t sdpb_solve(uint64_t n_vars, uint64_t nnz, const uint64_t* a_rows,
                   const uint64_t* a_cols, const double* a_vals,
                   const double* b, uint64_t n_rows, uint64_t n_eq,
                   uint64_t n_nonneg, const double* q,
                   const uint64_t* psd_dims, uint64_t n_psd, double eps,
                   uint32_t max_iter, int32_t verbose, double* x_out,
                   double* stats_out);

#ifdef __cplusplus
}
#endif

#endif /* SDPBRIDGE_H */
