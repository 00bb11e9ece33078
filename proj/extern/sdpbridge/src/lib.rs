//! C ABI around the Clarabel conic solver, specialized to linear-objective
//! conic programs over cone products Zero x Nonnegative x PSD...: minimize
//! q'x subject to b - A x lying in the cone product.
//!
//! Row layout expected from the caller: the first `n_eq` rows of (A, b) are
//! equality rows (zero cone), the next `n_nonneg` rows are inequality rows
//! (b - A x >= 0), and the remaining rows select the PSD block coordinates
//! in scaled upper-triangle (svec) order. The caller is responsible for the
//! sqrt(2) scaling of off-diagonal svec coordinates.

use clarabel::algebra::CscMatrix;
use clarabel::solver::*;

pub const SDPB_SOLVED: i32 = 0;
pub const SDPB_INFEASIBLE: i32 = 1;
pub const SDPB_UNKNOWN: i32 = 2;
pub const SDPB_ALMOST_SOLVED: i32 = 3;
pub const SDPB_BAD_INPUT: i32 = -1;

/// Solves the conic program. Returns one of the SDPB_* codes.
/// `x_out` must have room for `n_vars` doubles; `stats_out` for 4 doubles
/// (iterations, primal residual, dual residual, objective value). `q` may
/// be NULL for a pure feasibility problem.
#[no_mangle]
pub unsafe extern "C" fn sdpb_solve(
    n_vars: u64,
    nnz: u64,
    a_rows: *const u64,
    a_cols: *const u64,
    a_vals: *const f64,
    b: *const f64,
    n_rows: u64,
    n_eq: u64,
    n_nonneg: u64,
    q: *const f64,
    psd_dims: *const u64,
    n_psd: u64,
    eps: f64,
    max_iter: u32,
    verbose: i32,
    x_out: *mut f64,
    stats_out: *mut f64,
) -> i32 {
    if n_vars == 0 || a_rows.is_null() || b.is_null() || x_out.is_null() {
        return SDPB_BAD_INPUT;
    }
    let n = n_vars as usize;
    let m = n_rows as usize;
    let nnz = nnz as usize;

    let rows: Vec<usize> = std::slice::from_raw_parts(a_rows, nnz)
        .iter()
        .map(|&r| r as usize)
        .collect();
    let cols: Vec<usize> = std::slice::from_raw_parts(a_cols, nnz)
        .iter()
        .map(|&c| c as usize)
        .collect();
    let vals: Vec<f64> = std::slice::from_raw_parts(a_vals, nnz).to_vec();
    if rows.iter().any(|&r| r >= m) || cols.iter().any(|&c| c >= n) {
        return SDPB_BAD_INPUT;
    }

    let a = CscMatrix::new_from_triplets(m, n, rows, cols, vals);
    let b = std::slice::from_raw_parts(b, m).to_vec();
    let p = CscMatrix::<f64>::zeros((n, n));
    let q = if q.is_null() {
        vec![0.0; n]
    } else {
        std::slice::from_raw_parts(q, n).to_vec()
    };

    let mut cones: Vec<SupportedConeT<f64>> = Vec::new();
    if n_eq > 0 {
        cones.push(ZeroConeT(n_eq as usize));
    }
    if n_nonneg > 0 {
        cones.push(NonnegativeConeT(n_nonneg as usize));
    }
    let dims = std::slice::from_raw_parts(psd_dims, n_psd as usize);
    for &d in dims {
        cones.push(PSDTriangleConeT(d as usize));
    }

    // static regularization keeps the KKT factorization alive on
    // rank-deficient problem data, which these Gram parameterizations
    // produce routinely; tie it to the requested tolerance so tight
    // tolerances are not floored by the regularization itself
    let reg = (eps * 0.1).clamp(1e-11, 1e-7);
    let settings = match DefaultSettingsBuilder::default()
        .verbose(verbose != 0)
        .max_iter(max_iter)
        .tol_gap_abs(eps)
        .tol_gap_rel(eps)
        .tol_feas(eps)
        .static_regularization_constant(reg)
        .build()
    {
        Ok(s) => s,
        Err(_) => return SDPB_BAD_INPUT,
    };

    let mut solver = match DefaultSolver::new(&p, &q, &a, &b, &cones, settings) {
        Ok(s) => s,
        Err(_) => return SDPB_BAD_INPUT,
    };
    solver.solve();

    let sol = &solver.solution;
    let out = std::slice::from_raw_parts_mut(x_out, n);
    for (o, v) in out.iter_mut().zip(sol.x.iter()) {
        *o = *v;
    }
    if !stats_out.is_null() {
        let stats = std::slice::from_raw_parts_mut(stats_out, 4);
        stats[0] = sol.iterations as f64;
        stats[1] = sol.r_prim;
        stats[2] = sol.r_dual;
        stats[3] = sol.obj_val;
    }

    match sol.status {
        SolverStatus::Solved => SDPB_SOLVED,
        SolverStatus::PrimalInfeasible => SDPB_INFEASIBLE,
        SolverStatus::AlmostSolved => SDPB_ALMOST_SOLVED,
        _ => SDPB_UNKNOWN,
    }
}
