//! Discrete damped wave operator and its energy geometry.
//!
//! The block operator
//!
//! ```text
//!       ( 0        I  )
//! A_h = (             )
//!       ( D_h - q   -a )
//! ```
//!
//! acts on pairs `U = (f, v)` of grid functions, with `D_h` the centered
//! second-difference Laplacian under hard Dirichlet truncation.  The energy
//! inner product is `h * (f^H W f + v^H v)` with `W = -D_h + diag(q)`, so the
//! dissipativity identity `Re <A U, U>_G = -h * sum a_i |v_i|^2` holds exactly
//! for the assembled matrices.

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::profile::CoefficientField;
use crate::tridiag::{SymTridiag, Tridiag, TridiagLu};
use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

/// Assemble the FD Laplacian `D_h` (the operator itself, negative definite).
///
/// Dirichlet: tridiagonal `(1, -2, 1)/h^2` on the interior nodes.
/// Neumann: the grid is extended by the two boundary nodes at `x = +-L` and
/// the boundary rows use the one-sided reflection stencil, giving the
/// symmetric matrix with row sums zero (constant kernel).
pub fn assemble_laplacian(grid: &Grid1D, bc: BoundaryCondition) -> SymTridiag {
    let h = grid.spacing();
    let w = 1.0 / (h * h);
    match bc {
        BoundaryCondition::Dirichlet => {
            let n = grid.len();
            SymTridiag {
                diag: vec![-2.0 * w; n],
                off: vec![w; n - 1],
            }
        }
        BoundaryCondition::Neumann => {
            let n = grid.len() + 2;
            let mut diag = vec![-2.0 * w; n];
            diag[0] = -w;
            diag[n - 1] = -w;
            SymTridiag {
                diag,
                off: vec![w; n - 1],
            }
        }
    }
}

/// A state `(f, g)` of position and velocity grid functions.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub f: Vec<C64>,
    pub g: Vec<C64>,
}

impl State {
    pub fn zeros(n: usize) -> Self {
        State {
            f: vec![ZERO; n],
            g: vec![ZERO; n],
        }
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn scaled(&self, c: C64) -> State {
        State {
            f: self.f.iter().map(|z| z * c).collect(),
            g: self.g.iter().map(|z| z * c).collect(),
        }
    }

    pub fn sub(&self, other: &State) -> State {
        State {
            f: self.f.iter().zip(&other.f).map(|(a, b)| a - b).collect(),
            g: self.g.iter().zip(&other.g).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn from_real(f: &[f64], g: &[f64]) -> State {
        State {
            f: f.iter().map(|&x| C64::new(x, 0.0)).collect(),
            g: g.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }
}

/// A state together with an optional witness `G` satisfying `A_h G = F`.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub state: State,
    pub witness: Option<State>,
}

/// The assembled discrete wave operator with its energy Gram data.
#[derive(Debug, Clone)]
pub struct WaveOperator {
    grid: Grid1D,
    a: Vec<f64>,
    q: Vec<f64>,
    /// Cholesky factor of `W = -D_h + diag(q)`: lower bidiagonal `W = L L^T`,
    /// `chol_diag[i] = L[i][i]`, `chol_sub[i] = L[i+1][i]`.
    chol_diag: Vec<f64>,
    chol_sub: Vec<f64>,
}

impl WaveOperator {
    pub fn assemble(grid: &Grid1D, a: &CoefficientField, q: &CoefficientField) -> Result<Self> {
        let n = grid.len();
        if a.values.len() != n || q.values.len() != n {
            return Err(Error::validation(format!(
                "coefficient fields must be sampled on the operator grid (grid {}, a {}, q {})",
                n,
                a.values.len(),
                q.values.len()
            )));
        }
        let w = stiffness(grid, &q.values);
        let (chol_diag, chol_sub) = cholesky_tridiag(&w)?;
        Ok(WaveOperator {
            grid: grid.clone(),
            a: a.values.clone(),
            q: q.values.clone(),
            chol_diag,
            chol_sub,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.len()
    }

    pub fn spacing(&self) -> f64 {
        self.grid.spacing()
    }

    pub fn damping(&self) -> &[f64] {
        &self.a
    }

    pub fn potential(&self) -> &[f64] {
        &self.q
    }

    /// `W = -D_h + diag(q)`, the stiffness realizing the `W`-inner product.
    pub fn stiffness(&self) -> SymTridiag {
        stiffness(&self.grid, &self.q)
    }

    /// Smallest eigenvalue of `W`; the truncation scale `lambda_1`.
    pub fn lambda1(&self) -> f64 {
        self.stiffness().smallest_eigenvalue()
    }

    /// `D_h f` with implicit zero boundary values.
    pub fn apply_laplacian(&self, f: &[C64]) -> Vec<C64> {
        let n = self.n();
        let w = 1.0 / (self.spacing() * self.spacing());
        let mut out = vec![ZERO; n];
        for i in 0..n {
            let left = if i > 0 { f[i - 1] } else { ZERO };
            let right = if i + 1 < n { f[i + 1] } else { ZERO };
            out[i] = (left - 2.0 * f[i] + right) * w;
        }
        out
    }

    /// `A_h (f, g) = (g, (D_h - q) f - a g)`.
    pub fn apply(&self, u: &State) -> State {
        let n = self.n();
        assert_eq!(u.len(), n);
        let lap = self.apply_laplacian(&u.f);
        let mut g_out = vec![ZERO; n];
        for i in 0..n {
            g_out[i] = lap[i] - self.q[i] * u.f[i] - self.a[i] * u.g[i];
        }
        State {
            f: u.g.clone(),
            g: g_out,
        }
    }

    // ----- energy norms ------------------------------------------------

    pub fn l2_inner(&self, x: &[C64], y: &[C64]) -> C64 {
        let h = self.spacing();
        x.iter()
            .zip(y.iter())
            .map(|(a, b)| a * b.conj())
            .sum::<C64>()
            * h
    }

    pub fn norm_l2(&self, x: &[C64]) -> f64 {
        self.l2_inner(x, x).re.max(0.0).sqrt()
    }

    /// `||f||_W^2 = ||grad f||^2 + ||q^{1/2} f||^2`, gradient over all N+1
    /// cell edges with the implicit boundary zeros.
    pub fn w_norm_sq(&self, f: &[C64]) -> f64 {
        let n = self.n();
        let h = self.spacing();
        let mut acc = 0.0;
        let mut prev = ZERO;
        for i in 0..n {
            acc += (f[i] - prev).norm_sqr();
            prev = f[i];
        }
        acc += prev.norm_sqr();
        acc /= h * h;
        for i in 0..n {
            acc += self.q[i] * f[i].norm_sqr();
        }
        acc * h
    }

    pub fn norm_w(&self, f: &[C64]) -> f64 {
        self.w_norm_sq(f).max(0.0).sqrt()
    }

    /// `||f||_{D_t}^2 = ||f||_W^2 + ||a^{1/2} f||^2 + ||f||^2`.
    pub fn norm_dt(&self, f: &[C64]) -> f64 {
        let h = self.spacing();
        let extra: f64 = f
            .iter()
            .enumerate()
            .map(|(i, z)| (self.a[i] + 1.0) * z.norm_sqr())
            .sum::<f64>()
            * h;
        (self.w_norm_sq(f) + extra).sqrt()
    }

    pub fn h_norm_sq(&self, u: &State) -> f64 {
        self.w_norm_sq(&u.f) + self.l2_inner(&u.g, &u.g).re
    }

    /// Energy norm `||U||_H`.
    pub fn norm_h(&self, u: &State) -> f64 {
        self.h_norm_sq(u).max(0.0).sqrt()
    }

    pub fn norm_ahalf(&self, v: &[C64]) -> f64 {
        let h = self.spacing();
        (v.iter()
            .enumerate()
            .map(|(i, z)| self.a[i] * z.norm_sqr())
            .sum::<f64>()
            * h)
            .sqrt()
    }

    pub fn norm_qhalf(&self, v: &[C64]) -> f64 {
        let h = self.spacing();
        (v.iter()
            .enumerate()
            .map(|(i, z)| self.q[i] * z.norm_sqr())
            .sum::<f64>()
            * h)
            .sqrt()
    }

    /// Gradient seminorm alone (forward differences with boundary zeros).
    pub fn norm_grad(&self, f: &[C64]) -> f64 {
        let n = self.n();
        let h = self.spacing();
        let mut acc = 0.0;
        let mut prev = ZERO;
        for i in 0..n {
            acc += (f[i] - prev).norm_sqr();
            prev = f[i];
        }
        acc += prev.norm_sqr();
        (acc / h).sqrt()
    }

    /// Dual norm `||w||_{W*} = ||(D_h - q)^{-1} w||_W = sqrt(h w^H W^{-1} w)`.
    pub fn norm_wstar(&self, w: &[C64]) -> f64 {
        let lu = self.stiffness().to_tridiag().factor().expect("W is SPD");
        let u = lu.solve(w);
        let h = self.spacing();
        let val: C64 = w.iter().zip(u.iter()).map(|(a, b)| b * a.conj()).sum();
        (h * val.re).max(0.0).sqrt()
    }

    /// `(D_h - q) f = -W f`.
    pub fn riesz_apply(&self, f: &[C64]) -> Vec<C64> {
        let lap = self.apply_laplacian(f);
        lap.iter()
            .enumerate()
            .map(|(i, z)| z - self.q[i] * f[i])
            .collect()
    }

    /// `Re <A U, U>_G`; equals `-||a^{1/2} v||^2` exactly.
    pub fn dissipation_pairing(&self, u: &State) -> f64 {
        let au = self.apply(u);
        // <A U, U>_G = h ((A U)_f^H W u_f + (A U)_g^H u_g) with the W-product
        // evaluated through the gradient form for exactness.
        let h = self.spacing();
        let n = self.n();
        let mut acc = C64::new(0.0, 0.0);
        // W-part: sum over edges of d(AU)_f * conj(d u_f) + q-weighted product
        let mut prev_a = ZERO;
        let mut prev_u = ZERO;
        for i in 0..n {
            let da = au.f[i] - prev_a;
            let du = u.f[i] - prev_u;
            acc += da * du.conj();
            prev_a = au.f[i];
            prev_u = u.f[i];
        }
        acc += prev_a * prev_u.conj();
        acc /= h * h;
        for i in 0..n {
            acc += self.q[i] * au.f[i] * u.f[i].conj();
        }
        for i in 0..n {
            acc += au.g[i] * u.g[i].conj();
        }
        (acc * h).re
    }

    // ----- Schur complement and resolvent -------------------------------

    /// `T_lambda = -D_h + q + lambda a + lambda^2` as a complex tridiagonal.
    pub fn schur(&self, lambda: C64) -> SchurComplement {
        let n = self.n();
        let h = self.spacing();
        let w = 1.0 / (h * h);
        let lam2 = lambda * lambda;
        let mut t = Tridiag::zeros(n);
        for i in 0..n {
            t.diag[i] = C64::new(2.0 * w + self.q[i], 0.0) + lambda * self.a[i] + lam2;
        }
        for i in 0..n - 1 {
            t.sub[i] = C64::new(-w, 0.0);
            t.sup[i] = C64::new(-w, 0.0);
        }
        SchurComplement { lambda, matrix: t }
    }

    /// Factorized resolvent `(A_h - lambda)^{-1}` for repeated application.
    pub fn resolvent(&self, lambda: C64) -> Result<ResolventOp<'_>> {
        let schur = self.schur(lambda);
        let lu = schur.matrix.factor()?;
        Ok(ResolventOp {
            op: self,
            lambda,
            lu,
        })
    }

    // ----- dense exports -------------------------------------------------

    /// Dense `2N x 2N` real matrix of `A_h` (for small-scale oracles).
    pub fn dense_matrix(&self) -> Array2<f64> {
        let n = self.n();
        let h = self.spacing();
        let w = 1.0 / (h * h);
        let mut m = Array2::<f64>::zeros((2 * n, 2 * n));
        for i in 0..n {
            m[[i, n + i]] = 1.0;
            m[[n + i, i]] = -2.0 * w - self.q[i];
            if i > 0 {
                m[[n + i, i - 1]] = w;
            }
            if i + 1 < n {
                m[[n + i, i + 1]] = w;
            }
            m[[n + i, n + i]] = -self.a[i];
        }
        m
    }

    /// The energy-congruent matrix `B0 = C A_h C^{-1}` with `C = blockdiag(L^T, I)`
    /// and `W = L L^T`; `B0` is real with blocks `[[0, L^T], [-L, -diag(a)]]`.
    /// Eigenvalues of `B0` equal those of `A_h`, and Euclidean residuals of
    /// `B0` equal G-metric residuals of `A_h`.
    pub fn weighted_base_dense(&self) -> Array2<f64> {
        let n = self.n();
        let mut m = Array2::<f64>::zeros((2 * n, 2 * n));
        for i in 0..n {
            // (1,2) block: L^T, upper bidiagonal
            m[[i, n + i]] = self.chol_diag[i];
            if i + 1 < n {
                m[[i, n + i + 1]] = self.chol_sub[i];
            }
            // (2,1) block: -L, lower bidiagonal
            m[[n + i, i]] = -self.chol_diag[i];
            if i + 1 < n {
                m[[n + i + 1, i]] = -self.chol_sub[i];
            }
            m[[n + i, n + i]] = -self.a[i];
        }
        m
    }

    /// Multiply by the Cholesky weight: `(L^T f, g)`.
    pub fn weight_mul(&self, u: &State) -> State {
        let n = self.n();
        let mut f = vec![ZERO; n];
        for i in 0..n {
            f[i] = self.chol_diag[i] * u.f[i];
            if i + 1 < n {
                f[i] += self.chol_sub[i] * u.f[i + 1];
            }
        }
        State {
            f,
            g: u.g.clone(),
        }
    }

    /// Solve the weight: `(L^{-T} f, g)` (back substitution).
    pub fn weight_solve(&self, u: &State) -> State {
        let n = self.n();
        let mut f = u.f.clone();
        f[n - 1] /= self.chol_diag[n - 1];
        for i in (0..n - 1).rev() {
            f[i] = (f[i] - self.chol_sub[i] * f[i + 1]) / self.chol_diag[i];
        }
        State {
            f,
            g: u.g.clone(),
        }
    }

    /// Multiply by the transposed weight: `(L f, g)`.
    pub fn weight_mul_t(&self, u: &State) -> State {
        let n = self.n();
        let mut f = vec![ZERO; n];
        for i in 0..n {
            f[i] = self.chol_diag[i] * u.f[i];
            if i > 0 {
                f[i] += self.chol_sub[i - 1] * u.f[i - 1];
            }
        }
        State {
            f,
            g: u.g.clone(),
        }
    }

    /// Solve the transposed weight: `(L^{-1} f, g)` (forward substitution).
    pub fn weight_solve_t(&self, u: &State) -> State {
        let n = self.n();
        let mut f = u.f.clone();
        f[0] /= self.chol_diag[0];
        for i in 1..n {
            f[i] = (f[i] - self.chol_sub[i - 1] * f[i - 1]) / self.chol_diag[i];
        }
        State {
            f,
            g: u.g.clone(),
        }
    }
}

/// `lambda`-parameterized Schur complement `T_lambda`.
#[derive(Debug, Clone)]
pub struct SchurComplement {
    pub lambda: C64,
    pub matrix: Tridiag,
}

impl SchurComplement {
    pub fn to_dense(&self) -> Array2<C64> {
        let n = self.matrix.len();
        let mut m = Array2::<C64>::zeros((n, n));
        for i in 0..n {
            m[[i, i]] = self.matrix.diag[i];
            if i > 0 {
                m[[i, i - 1]] = self.matrix.sub[i - 1];
            }
            if i + 1 < n {
                m[[i, i + 1]] = self.matrix.sup[i];
            }
        }
        m
    }
}

pub fn assemble_schur(op: &WaveOperator, lambda: C64) -> SchurComplement {
    op.schur(lambda)
}

/// Factorized `(A_h - lambda)^{-1}` built on the Schur complement.
pub struct ResolventOp<'a> {
    op: &'a WaveOperator,
    lambda: C64,
    lu: TridiagLu,
}

impl ResolventOp<'_> {
    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    /// Apply `(A_h - lambda)^{-1}` via the rearranged Frobenius-Schur form
    /// `-( T^{-1}(a f + g) + la T^{-1} f , la T^{-1}(a f + g) + la^2 T^{-1} f - f )`,
    /// which stays well conditioned as `lambda -> 0`.
    pub fn apply(&self, u: &State) -> State {
        let n = u.len();
        let la = self.lambda;
        let af_g: Vec<C64> = (0..n)
            .map(|i| self.op.a[i] * u.f[i] + u.g[i])
            .collect();
        let t_afg = self.lu.solve(&af_g);
        let t_f = self.lu.solve(&u.f);
        let mut f_out = vec![ZERO; n];
        let mut g_out = vec![ZERO; n];
        for i in 0..n {
            f_out[i] = -(t_afg[i] + la * t_f[i]);
            g_out[i] = -(la * t_afg[i] + la * la * t_f[i] - u.f[i]);
        }
        State { f: f_out, g: g_out }
    }

    /// Apply `((A_h - lambda)^{-1})^H = (A_h^T - conj(lambda))^{-1}`, using
    /// `T_{conj(lambda)} = conj(T_lambda)` through the same factorization.
    pub fn apply_adjoint(&self, u: &State) -> State {
        let n = u.len();
        let mu = self.lambda.conj();
        // (A^T - mu)(x, y) = (f, g): y = -T_mu^{-1}(f + mu g); x = g + (a + mu) y
        let rhs: Vec<C64> = (0..n).map(|i| u.f[i] + mu * u.g[i]).collect();
        let y_neg = self.lu.solve_conj(&rhs); // T_mu^{-1}(f + mu g)
        let mut x = vec![ZERO; n];
        let mut y = vec![ZERO; n];
        for i in 0..n {
            y[i] = -y_neg[i];
            x[i] = u.g[i] + (self.op.a[i] + mu) * y[i];
        }
        State { f: x, g: y }
    }
}

fn stiffness(grid: &Grid1D, q: &[f64]) -> SymTridiag {
    let n = grid.len();
    let h = grid.spacing();
    let w = 1.0 / (h * h);
    SymTridiag {
        diag: (0..n).map(|i| 2.0 * w + q[i]).collect(),
        off: vec![-w; n - 1],
    }
}

fn cholesky_tridiag(w: &SymTridiag) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = w.len();
    let mut d = vec![0.0; n];
    let mut s = vec![0.0; n.saturating_sub(1)];
    for i in 0..n {
        let mut v = w.diag[i];
        if i > 0 {
            v -= s[i - 1] * s[i - 1];
        }
        if v <= 0.0 {
            return Err(Error::numerical(
                "energy Gram matrix is not positive definite",
            ));
        }
        d[i] = v.sqrt();
        if i + 1 < n {
            s[i] = w.off[i] / d[i];
        }
    }
    Ok((d, s))
}

// ----- K-space data ------------------------------------------------------

/// Draw a reproducible pseudo-random `G` and return `F = A_h G` with the
/// witness attached.  `smoothing` Jacobi passes trade roughness for spectral
/// concentration at low frequencies.
pub fn make_k_data(seed: u64, op: &WaveOperator, smoothing: usize) -> StateVector {
    let n = op.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<C64> {
        let mut v: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.gen::<f64>() * 2.0 - 1.0, 0.0))
            .collect();
        for _ in 0..smoothing {
            let mut s = vec![ZERO; n];
            for i in 0..n {
                let left = if i > 0 { v[i - 1] } else { ZERO };
                let right = if i + 1 < n { v[i + 1] } else { ZERO };
                s[i] = 0.25 * left + 0.5 * v[i] + 0.25 * right;
            }
            v = s;
        }
        v
    };
    let g = State {
        f: draw(&mut rng),
        g: draw(&mut rng),
    };
    let f = op.apply(&g);
    StateVector {
        state: f,
        witness: Some(g),
    }
}

/// Range norm through the witness: `sqrt(||F||_H^2 + ||G||_H^2)`.
pub fn k_norm(sv: &StateVector, op: &WaveOperator) -> Result<f64> {
    let w = sv.witness.as_ref().ok_or(Error::MissingWitness)?;
    Ok((op.h_norm_sq(&sv.state) + op.h_norm_sq(w)).sqrt())
}

/// Direct K-norm `sqrt(||F||_H^2 + ||f||^2 + ||a f + g||_{W*}^2)`, no witness.
pub fn k_norm_direct(state: &State, op: &WaveOperator) -> f64 {
    let n = state.len();
    let af_g: Vec<C64> = (0..n)
        .map(|i| op.damping()[i] * state.f[i] + state.g[i])
        .collect();
    let wstar = op.norm_wstar(&af_g);
    (op.h_norm_sq(state) + op.l2_inner(&state.f, &state.f).re + wstar * wstar).sqrt()
}
