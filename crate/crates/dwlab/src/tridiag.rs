//! Tridiagonal kernels: pivoted LU for general complex tridiagonal systems
//! and Sturm-sequence bisection for real symmetric tridiagonal eigenvalues.
//!
//! All large 1D operators in this crate (Schur complements, implicit time
//! steps, shifted oscillators) are tridiagonal, so these O(N) kernels carry
//! most of the numerical load.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

/// General complex tridiagonal matrix, rows `sub[i-1], diag[i], sup[i]`.
#[derive(Debug, Clone)]
pub struct Tridiag {
    pub sub: Vec<C64>,
    pub diag: Vec<C64>,
    pub sup: Vec<C64>,
}

impl Tridiag {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn zeros(n: usize) -> Self {
        Tridiag {
            sub: vec![C64::new(0.0, 0.0); n.saturating_sub(1)],
            diag: vec![C64::new(0.0, 0.0); n],
            sup: vec![C64::new(0.0, 0.0); n.saturating_sub(1)],
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let n = self.len();
        assert_eq!(x.len(), n);
        let mut y = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.sup[i] * x[i + 1];
            }
            y[i] = acc;
        }
        y
    }

    /// Entrywise symmetry check (`T[i][j] == T[j][i]`).
    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.sub
            .iter()
            .zip(self.sup.iter())
            .all(|(a, b)| (a - b).norm() <= tol * (a.norm() + b.norm() + 1.0))
    }

    /// Pivoted LU factorization in the style of LAPACK's gttrf.
    pub fn factor(&self) -> Result<TridiagLu> {
        let n = self.len();
        let mut dl = self.sub.clone();
        let mut d = self.diag.clone();
        let mut du = self.sup.clone();
        let mut du2 = vec![C64::new(0.0, 0.0); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];

        for i in 0..n.saturating_sub(1) {
            if d[i].norm() >= dl[i].norm() {
                // no interchange
                if d[i].norm() == 0.0 {
                    return Err(Error::numerical(format!(
                        "tridiagonal factorization hit an exact zero pivot at row {i}"
                    )));
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
                if i + 2 < n {
                    du2[i] = C64::new(0.0, 0.0);
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if d[n - 1].norm() == 0.0 {
            return Err(Error::numerical(
                "tridiagonal factorization hit an exact zero pivot in the last row",
            ));
        }
        Ok(TridiagLu {
            dl,
            d,
            du,
            du2,
            swapped,
        })
    }
}

/// LU factors of a tridiagonal matrix with partial pivoting.
#[derive(Debug, Clone)]
pub struct TridiagLu {
    dl: Vec<C64>,
    d: Vec<C64>,
    du: Vec<C64>,
    du2: Vec<C64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// Solve `T x = b` in place.
    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.len();
        assert_eq!(b.len(), n);
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                let bi = b[i];
                b[i + 1] -= self.dl[i] * bi;
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Solve `conj(T) x = b`, i.e. `T^H x = b` for complex-symmetric `T`.
    pub fn solve_conj(&self, b: &[C64]) -> Vec<C64> {
        let mut x: Vec<C64> = b.iter().map(|z| z.conj()).collect();
        self.solve_in_place(&mut x);
        for z in &mut x {
            *z = z.conj();
        }
        x
    }
}

/// Real symmetric tridiagonal matrix `diag[i]` / `off[i]`.
#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply_real(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * x[i + 1];
            }
            y[i] = acc;
        }
        y
    }

    pub fn to_tridiag(&self) -> Tridiag {
        Tridiag {
            sub: self.off.iter().map(|&v| C64::new(v, 0.0)).collect(),
            diag: self.diag.iter().map(|&v| C64::new(v, 0.0)).collect(),
            sup: self.off.iter().map(|&v| C64::new(v, 0.0)).collect(),
        }
    }

    /// Gershgorin bounds for the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm count via LDL^T).
    pub fn count_below(&self, x: f64) -> usize {
        let n = self.len();
        let pivmin = f64::MIN_POSITIVE.max(1e-300);
        let mut count = 0usize;
        let mut d = self.diag[0] - x;
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
        for i in 1..n {
            d = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / d;
            if d.abs() < pivmin {
                d = -pivmin;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// k-th eigenvalue (ascending, 0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.len());
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(1.0);
        // Bisect until the interval is at machine resolution.
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * scale.max(mid.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn smallest_eigenvalue(&self) -> f64 {
        self.eigenvalue(0)
    }

    /// The `count` lowest eigenvalues, ascending.
    pub fn lowest_eigenvalues(&self, count: usize) -> Vec<f64> {
        (0..count.min(self.len())).map(|k| self.eigenvalue(k)).collect()
    }

    /// Largest eigenvalue.
    pub fn largest_eigenvalue(&self) -> f64 {
        self.eigenvalue(self.len() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_like(n: usize, h: f64) -> SymTridiag {
        SymTridiag {
            diag: vec![2.0 / (h * h); n],
            off: vec![-1.0 / (h * h); n - 1],
        }
    }

    #[test]
    fn sturm_matches_closed_form_dirichlet() {
        // Eigenvalues of the (negative) FD Laplacian on (-L, L) with N interior
        // nodes: (2/h^2) (1 - cos(k pi h / (2L))), k = 1..N.
        let (l, n) = (3.0, 57usize);
        let h = 2.0 * l / (n as f64 + 1.0);
        let m = laplacian_like(n, h);
        for k in [0usize, 1, 5, 30, 56] {
            let exact =
                2.0 / (h * h) * (1.0 - ((k as f64 + 1.0) * std::f64::consts::PI * h / (2.0 * l)).cos());
            let got = m.eigenvalue(k);
            assert!(
                (got - exact).abs() <= 1e-10 * exact.max(1.0),
                "k={k}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn lu_solves_random_system() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 400;
        let rand_c = |rng: &mut rand_chacha::ChaCha8Rng| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        };
        let t = Tridiag {
            sub: (0..n - 1).map(|_| rand_c(&mut rng)).collect(),
            diag: (0..n).map(|_| rand_c(&mut rng) * 4.0).collect(),
            sup: (0..n - 1).map(|_| rand_c(&mut rng)).collect(),
        };
        let x: Vec<C64> = (0..n).map(|_| rand_c(&mut rng)).collect();
        let b = t.apply(&x);
        let lu = t.factor().unwrap();
        let got = lu.solve(&b);
        let err: f64 = got
            .iter()
            .zip(x.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let nx: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!(err <= 1e-11 * nx, "relative error {}", err / nx);
    }

    #[test]
    fn conj_solve_is_adjoint_solve_for_symmetric() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 50;
        let rand_c = |rng: &mut rand_chacha::ChaCha8Rng| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        };
        let off: Vec<C64> = (0..n - 1).map(|_| rand_c(&mut rng)).collect();
        let t = Tridiag {
            sub: off.clone(),
            diag: (0..n).map(|_| rand_c(&mut rng) * 3.0).collect(),
            sup: off,
        };
        assert!(t.is_symmetric(0.0));
        let lu = t.factor().unwrap();
        let b: Vec<C64> = (0..n).map(|_| rand_c(&mut rng)).collect();
        let x = lu.solve_conj(&b);
        // check T^H x = b, where T^H = conj(T) for symmetric T
        let tx = t.apply(&x.iter().map(|z| z.conj()).collect::<Vec<_>>());
        for i in 0..n {
            assert!((tx[i].conj() - b[i]).norm() < 1e-10);
        }
    }
}
