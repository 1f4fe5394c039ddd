//! Dense LAPACK wrappers and an iterative operator 2-norm.
//!
//! Dense eigendecompositions and SVDs go through LAPACK (zgeev and friends);
//! large structured operators expose only apply/apply-adjoint closures and
//! their norms are estimated with restarted Golub-Kahan bidiagonalization.

use crate::error::{Error, Result};
use crate::tridiag::{SymTridiag, Tridiag};
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Inverse, Solve, SVD};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn cdot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b.conj()).sum()
}

pub fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenvalues and eigenvectors of a dense complex matrix (LAPACK zgeev).
pub fn eig_dense(m: &Array2<C64>) -> Result<(Vec<C64>, Array2<C64>)> {
    let (vals, vecs) = m
        .eig()
        .map_err(|e| Error::numerical(format!("dense eigensolver failed: {e}")))?;
    Ok((vals.to_vec(), vecs))
}

/// Eigenvalues and eigenvectors of a dense real matrix, complexified output.
pub fn eig_dense_real(m: &Array2<f64>) -> Result<(Vec<C64>, Array2<C64>)> {
    let (vals, vecs) = m
        .eig()
        .map_err(|e| Error::numerical(format!("dense eigensolver failed: {e}")))?;
    Ok((vals.to_vec(), vecs))
}

/// All singular values of a dense complex matrix, descending.
pub fn singular_values(m: &Array2<C64>) -> Result<Vec<f64>> {
    let (_, s, _) = m
        .svd(false, false)
        .map_err(|e| Error::numerical(format!("dense SVD failed: {e}")))?;
    Ok(s.to_vec())
}

pub fn sigma_min_dense(m: &Array2<C64>) -> Result<f64> {
    let s = singular_values(m)?;
    s.last()
        .copied()
        .ok_or_else(|| Error::validation("empty matrix"))
}

pub fn sigma_max_dense(m: &Array2<C64>) -> Result<f64> {
    let s = singular_values(m)?;
    s.first()
        .copied()
        .ok_or_else(|| Error::validation("empty matrix"))
}

/// Dense inverse (for small-scale oracles only).
pub fn inverse_dense(m: &Array2<C64>) -> Result<Array2<C64>> {
    m.inv()
        .map_err(|e| Error::numerical(format!("dense inversion failed: {e}")))
}

pub fn solve_dense(m: &Array2<C64>, b: &Array1<C64>) -> Result<Array1<C64>> {
    m.solve(b)
        .map_err(|e| Error::numerical(format!("dense solve failed: {e}")))
}

/// A linear operator given by matrix-vector products.
pub trait LinearOp: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64]) -> Vec<C64>;
    fn apply_adjoint(&self, x: &[C64]) -> Vec<C64>;
}

#[derive(Debug, Clone, Copy)]
pub struct OpNormOptions {
    pub tol: f64,
    pub max_cycles: usize,
    pub seed: u64,
}

impl Default for OpNormOptions {
    fn default() -> Self {
        OpNormOptions {
            tol: 1e-9,
            max_cycles: 40,
            seed: 0x5eed,
        }
    }
}

/// Largest singular value of `op` by restarted Golub-Kahan bidiagonalization
/// with full reorthogonalization inside each cycle.
pub fn operator_norm(op: &dyn LinearOp, opts: &OpNormOptions) -> Result<f64> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::validation("operator norm of empty operator"));
    }
    let steps_per_cycle = if n > 20_000 { 48 } else { 240.min(n.max(4)) };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    normalize(&mut v)?;

    let mut sigma_prev = 0.0f64;
    let mut stable = 0usize;
    for _cycle in 0..opts.max_cycles {
        let mut vs: Vec<Vec<C64>> = vec![v.clone()];
        let mut us: Vec<Vec<C64>> = Vec::new();
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();

        let mut p = op.apply(&vs[0]);
        let alpha = vec_norm(&p);
        if alpha == 0.0 {
            return Ok(0.0);
        }
        scale(&mut p, 1.0 / alpha);
        alphas.push(alpha);
        us.push(p);

        for k in 0..steps_per_cycle {
            // r = A^H u_k - alpha_k v_k
            let mut r = op.apply_adjoint(&us[k]);
            axpy(&mut r, -C64::new(alphas[k], 0.0), &vs[k]);
            reorthogonalize(&mut r, &vs);
            let beta = vec_norm(&r);
            if beta <= f64::EPSILON * alphas[k] {
                break;
            }
            scale(&mut r, 1.0 / beta);
            betas.push(beta);
            vs.push(r);

            // p = A v_{k+1} - beta_k u_k
            let mut p = op.apply(&vs[k + 1]);
            axpy(&mut p, -C64::new(beta, 0.0), &us[k]);
            reorthogonalize(&mut p, &us);
            let alpha = vec_norm(&p);
            if alpha == 0.0 {
                break;
            }
            scale(&mut p, 1.0 / alpha);
            alphas.push(alpha);
            us.push(p);

            let sigma = bidiagonal_sigma_max(&alphas, &betas);
            if (sigma - sigma_prev).abs() <= opts.tol * sigma {
                stable += 1;
                if stable >= 2 {
                    return Ok(sigma);
                }
            } else {
                stable = 0;
            }
            sigma_prev = sigma;
        }

        // restart from the dominant right Ritz vector
        let y = top_ritz_right(&alphas, &betas);
        let mut vnew = vec![C64::new(0.0, 0.0); n];
        for (j, vj) in vs.iter().enumerate().take(y.len()) {
            for i in 0..n {
                vnew[i] += C64::new(y[j], 0.0) * vj[i];
            }
        }
        v = vnew;
        if normalize(&mut v).is_err() {
            // degenerate restart; reseed
            v = (0..n)
                .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            normalize(&mut v)?;
        }
    }
    Err(Error::NonConvergence {
        what: "operator 2-norm (Golub-Kahan)".into(),
        iterations: opts.max_cycles * steps_per_cycle,
        residual: sigma_prev,
    })
}

fn normalize(v: &mut [C64]) -> Result<()> {
    let n = vec_norm(v);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::numerical("cannot normalize zero/overflowed vector"));
    }
    scale(v, 1.0 / n);
    Ok(())
}

fn scale(v: &mut [C64], c: f64) {
    for z in v.iter_mut() {
        *z *= c;
    }
}

fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x.iter()) {
        *yi += a * xi;
    }
}

fn reorthogonalize(r: &mut [C64], basis: &[Vec<C64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = cdot(r, b);
            axpy(r, -c, b);
        }
    }
}

/// sigma_max of the lower-bidiagonal matrix with diagonal `alphas` and
/// subdiagonal `betas`, via the tridiagonal B^T B.
fn bidiagonal_sigma_max(alphas: &[f64], betas: &[f64]) -> f64 {
    let k = alphas.len();
    let mut diag = vec![0.0; k];
    let mut off = vec![0.0; k.saturating_sub(1)];
    for j in 0..k {
        diag[j] = alphas[j] * alphas[j] + if j < betas.len() { betas[j] * betas[j] } else { 0.0 };
        if j + 1 < k {
            off[j] = alphas[j + 1] * betas[j];
        }
    }
    let t = SymTridiag { diag, off };
    t.largest_eigenvalue().max(0.0).sqrt()
}

/// Dominant right singular vector of the small bidiagonal, in Krylov coords.
fn top_ritz_right(alphas: &[f64], betas: &[f64]) -> Vec<f64> {
    let k = alphas.len();
    let mut diag = vec![0.0; k];
    let mut off = vec![0.0; k.saturating_sub(1)];
    for j in 0..k {
        diag[j] = alphas[j] * alphas[j] + if j < betas.len() { betas[j] * betas[j] } else { 0.0 };
        if j + 1 < k {
            off[j] = alphas[j + 1] * betas[j];
        }
    }
    let t = SymTridiag {
        diag: diag.clone(),
        off: off.clone(),
    };
    let lam = t.largest_eigenvalue();
    // two steps of inverse iteration on (T - lam - eps)
    let shift = lam * (1.0 + 1e-10) + 1e-300;
    let shifted = Tridiag {
        sub: off.iter().map(|&v| C64::new(v, 0.0)).collect(),
        diag: diag.iter().map(|&v| C64::new(v - shift, 0.0)).collect(),
        sup: off.iter().map(|&v| C64::new(v, 0.0)).collect(),
    };
    let mut y: Vec<C64> = (0..k)
        .map(|i| C64::new(1.0 / (1.0 + i as f64), 0.0))
        .collect();
    if let Ok(lu) = shifted.factor() {
        for _ in 0..2 {
            y = lu.solve(&y);
            let nrm = vec_norm(&y);
            if nrm == 0.0 || !nrm.is_finite() {
                break;
            }
            scale(&mut y, 1.0 / nrm);
        }
    }
    let nrm = vec_norm(&y).max(f64::MIN_POSITIVE);
    y.iter().map(|z| z.re / nrm).collect()
}

/// Operator wrapper for a factorized tridiagonal inverse `T^{-1}` with
/// complex-symmetric `T` (adjoint solves via conjugation).
pub struct TridiagInverseOp {
    lu: crate::tridiag::TridiagLu,
}

impl TridiagInverseOp {
    pub fn new(t: &Tridiag) -> Result<Self> {
        debug_assert!(t.is_symmetric(1e-12));
        Ok(TridiagInverseOp { lu: t.factor()? })
    }
}

impl LinearOp for TridiagInverseOp {
    fn dim(&self) -> usize {
        self.lu.len()
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.lu.solve(x)
    }

    fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        self.lu.solve_conj(x)
    }
}

/// `||T^{-1}||_2` for a complex-symmetric tridiagonal `T`.
pub fn tridiag_inverse_norm(t: &Tridiag, opts: &OpNormOptions) -> Result<f64> {
    let op = TridiagInverseOp::new(t)?;
    operator_norm(&op, opts)
}
