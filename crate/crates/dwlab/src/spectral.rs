//! Complex spectra, weighted resolvent norms, pseudospectrum sweeps,
//! imaginary-axis scans and low-frequency coercivity fits.
//!
//! The energy metric enters through the congruence `B0 = C A C^{-1}` with
//! `C = blockdiag(L^T, I)`, `W = L L^T`: eigenvalues of `B0` are those of the
//! wave operator and Euclidean residuals/singular values of `B0 - lambda`
//! are exactly the G-metric residuals/resolvent data of `A - lambda`.

use crate::error::{Error, Result};
use crate::fit::{fit_loglog, ExponentFit};
use crate::grid::Grid1D;
use crate::linalg::{self, operator_norm, LinearOp, OpNormOptions};
use crate::operator::{State, WaveOperator};
use crate::profile::{sample_coefficient, Profile};
use crate::tridiag::SymTridiag;
use ndarray::{Array1, Array2};
use ndarray_linalg::Solve;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Hard cap on dense eigenproblem dimension.
pub const EIG_DIM_CAP: usize = 2000;

/// Sentinel threshold: smaller smallest-singular-values count as singular.
const SINGULAR_CUTOFF: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    /// Operator norm in the energy inner product (the default).
    Energy,
    /// Plain Euclidean metric, for comparison with generic pseudospectra tools.
    Euclidean,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ComplexRect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl ComplexRect {
    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }
}

/// Eigenvalues with G-metric residuals, sorted by (Re, Im).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<(C64, f64)>,
    pub half_width: f64,
    pub point_count: usize,
}

impl SpectrumResult {
    /// Nonreal eigenvalues in the upper half-plane, sorted by modulus.
    pub fn upper_nonreal(&self, im_floor: f64) -> Vec<C64> {
        let mut v: Vec<C64> = self
            .eigenvalues
            .iter()
            .map(|&(z, _)| z)
            .filter(|z| z.im > im_floor)
            .collect();
        v.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
        v
    }
}

/// Eigenvalues of a dense complex matrix with residual annotation and
/// inverse-iteration refinement of any pair whose residual is out of spec.
pub fn eig_complex(m: &Array2<C64>) -> Result<Vec<(C64, f64)>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::validation("eigenproblem needs a square matrix"));
    }
    if n > EIG_DIM_CAP {
        return Err(Error::validation(format!(
            "matrix dimension {n} exceeds the dense eigensolver cap {EIG_DIM_CAP}"
        )));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::validation("matrix has non-finite entries"));
    }
    let scale = matrix_inf_norm(m).max(f64::MIN_POSITIVE);
    let (vals, vecs) = linalg::eig_dense(m)?;
    let mut out = Vec::with_capacity(n);
    for (k, &lam) in vals.iter().enumerate() {
        let v: Vec<C64> = vecs.column(k).to_vec();
        let mut lam_k = lam;
        let mut res = eig_residual(m, lam_k, &v);
        if res > 1e-8 * scale {
            let (lam_ref, v_ref) = refine_eigenpair(m, lam_k, &v)?;
            let res_ref = eig_residual(m, lam_ref, &v_ref);
            if res_ref < res {
                lam_k = lam_ref;
                res = res_ref;
            }
        }
        out.push((lam_k, res));
    }
    out.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

fn matrix_inf_norm(m: &Array2<C64>) -> f64 {
    let mut best = 0.0f64;
    for row in m.rows() {
        let s: f64 = row.iter().map(|z| z.norm()).sum();
        best = best.max(s);
    }
    best
}

fn eig_residual(m: &Array2<C64>, lam: C64, v: &[C64]) -> f64 {
    let vv = Array1::from_vec(v.to_vec());
    let mv = m.dot(&vv);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..v.len() {
        num += (mv[i] - lam * v[i]).norm_sqr();
        den += v[i].norm_sqr();
    }
    (num / den.max(f64::MIN_POSITIVE)).sqrt()
}

/// Two steps of inverse iteration plus a Rayleigh-quotient update.
fn refine_eigenpair(m: &Array2<C64>, lam: C64, v: &[C64]) -> Result<(C64, Vec<C64>)> {
    let n = m.nrows();
    let mut shifted = m.clone();
    // small relative shift regularizes an exactly-singular system
    let eps = C64::new(1e-13 * (1.0 + lam.norm()), 0.0);
    for i in 0..n {
        shifted[[i, i]] -= lam + eps;
    }
    let mut w = Array1::from_vec(v.to_vec());
    for _ in 0..2 {
        w = match shifted.solve(&w) {
            Ok(x) => x,
            Err(_) => return Ok((lam, v.to_vec())),
        };
        let nrm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm == 0.0 || !nrm.is_finite() {
            return Ok((lam, v.to_vec()));
        }
        w.mapv_inplace(|z| z / nrm);
    }
    let mw = m.dot(&w);
    let num: C64 = mw.iter().zip(w.iter()).map(|(a, b)| a * b.conj()).sum();
    let den: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    Ok((num / den, w.to_vec()))
}

/// Spectrum of the wave operator, optionally filtered to a rectangle.
pub fn spectrum_wave(op: &WaveOperator, region: Option<ComplexRect>) -> Result<SpectrumResult> {
    let n2 = 2 * op.n();
    if n2 > EIG_DIM_CAP {
        return Err(Error::validation(format!(
            "operator dimension {n2} exceeds the dense eigensolver cap {EIG_DIM_CAP}"
        )));
    }
    let b0 = op.weighted_base_dense();
    let (vals, vecs) = linalg::eig_dense_real(&b0)?;
    let b0c = b0.mapv(|x| C64::new(x, 0.0));
    let scale = matrix_inf_norm(&b0c).max(f64::MIN_POSITIVE);
    let mut out = Vec::new();
    for (k, &lam) in vals.iter().enumerate() {
        if let Some(r) = region {
            if !r.contains(lam) {
                continue;
            }
        }
        let v: Vec<C64> = vecs.column(k).to_vec();
        let mut lam_k = lam;
        let mut res = eig_residual(&b0c, lam_k, &v);
        if res > 1e-8 * scale {
            let (lam_ref, v_ref) = refine_eigenpair(&b0c, lam_k, &v)?;
            let res_ref = eig_residual(&b0c, lam_ref, &v_ref);
            if res_ref < res {
                lam_k = lam_ref;
                res = res_ref;
            }
        }
        out.push((lam_k, res));
    }
    out.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(SpectrumResult {
        eigenvalues: out,
        half_width: op.grid().half_width(),
        point_count: op.n(),
    })
}

/// Worst pairwise defect of conjugation closure among nonreal eigenvalues.
pub fn conjugation_defect(spectrum: &[(C64, f64)], im_floor: f64) -> f64 {
    let mut worst = 0.0f64;
    for &(z, _) in spectrum {
        if z.im.abs() <= im_floor {
            continue;
        }
        let zc = z.conj();
        let best = spectrum
            .iter()
            .map(|&(w, _)| (w - zc).norm())
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(best);
    }
    worst
}

struct WeightedResolventOp<'a> {
    op: &'a WaveOperator,
    res: crate::operator::ResolventOp<'a>,
}

impl LinearOp for WeightedResolventOp<'_> {
    fn dim(&self) -> usize {
        2 * self.op.n()
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        let n = self.op.n();
        let u = State {
            f: x[..n].to_vec(),
            g: x[n..].to_vec(),
        };
        // R = C (A - la)^{-1} C^{-1}
        let v = self.op.weight_mul(&self.res.apply(&self.op.weight_solve(&u)));
        [v.f, v.g].concat()
    }

    fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        let n = self.op.n();
        let u = State {
            f: x[..n].to_vec(),
            g: x[n..].to_vec(),
        };
        // R^H = C^{-T} (A - la)^{-H} C^T   (C real)
        let v = self
            .op
            .weight_solve_t(&self.res.apply_adjoint(&self.op.weight_mul_t(&u)));
        [v.f, v.g].concat()
    }
}

struct EuclideanResolventOp<'a> {
    op: &'a WaveOperator,
    res: crate::operator::ResolventOp<'a>,
}

impl LinearOp for EuclideanResolventOp<'_> {
    fn dim(&self) -> usize {
        2 * self.op.n()
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        let n = self.op.n();
        let u = State {
            f: x[..n].to_vec(),
            g: x[n..].to_vec(),
        };
        let v = self.res.apply(&u);
        [v.f, v.g].concat()
    }

    fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        let n = self.op.n();
        let u = State {
            f: x[..n].to_vec(),
            g: x[n..].to_vec(),
        };
        let v = self.res.apply_adjoint(&u);
        [v.f, v.g].concat()
    }
}

/// Resolvent norm `||(A - lambda)^{-1}||` in the chosen metric.
///
/// Returns `f64::INFINITY` when the shifted operator is numerically singular.
pub fn resolvent_norm(op: &WaveOperator, lambda: C64, metric: Metric) -> Result<f64> {
    if !lambda.re.is_finite() || !lambda.im.is_finite() {
        return Err(Error::validation("resolvent shift must be finite"));
    }
    let scale = operator_scale(op, lambda);
    let dim = 2 * op.n();
    if dim <= 500 {
        // dense route: sigma_min of the shifted congruent matrix
        let base = match metric {
            Metric::Energy => op.weighted_base_dense(),
            Metric::Euclidean => op.dense_matrix(),
        };
        let mut m = base.mapv(|x| C64::new(x, 0.0));
        for i in 0..dim {
            m[[i, i]] -= lambda;
        }
        let smin = linalg::sigma_min_dense(&m)?;
        if smin < SINGULAR_CUTOFF * scale {
            return Ok(f64::INFINITY);
        }
        return Ok(1.0 / smin);
    }
    let res = match op.resolvent(lambda) {
        Ok(r) => r,
        Err(_) => return Ok(f64::INFINITY),
    };
    let opts = OpNormOptions {
        seed: 0xd1a6,
        ..OpNormOptions::default()
    };
    let norm = match metric {
        Metric::Energy => operator_norm(&WeightedResolventOp { op, res }, &opts)?,
        Metric::Euclidean => operator_norm(&EuclideanResolventOp { op, res }, &opts)?,
    };
    if norm > 1.0 / (SINGULAR_CUTOFF * scale) {
        return Ok(f64::INFINITY);
    }
    Ok(norm)
}

fn operator_scale(op: &WaveOperator, lambda: C64) -> f64 {
    let h = op.spacing();
    let a_max = op.damping().iter().cloned().fold(0.0f64, f64::max);
    let q_max = op.potential().iter().cloned().fold(0.0f64, f64::max);
    (4.0 / (h * h) + q_max + a_max + lambda.norm()).max(1.0)
}

/// Rectangular field of resolvent norms over a lambda grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PseudospectrumField {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    /// Row-major: `values[j * re.len() + i]` is the norm at `re[i] + i*im[j]`.
    pub values: Vec<f64>,
}

pub fn pseudospectrum_sweep(
    op: &WaveOperator,
    re_range: (f64, f64, usize),
    im_range: (f64, f64, usize),
    metric: Metric,
) -> Result<PseudospectrumField> {
    let (re0, re1, nre) = re_range;
    let (im0, im1, nim) = im_range;
    if nre < 2 || nim < 2 {
        return Err(Error::validation(
            "pseudospectrum grid needs at least 2 points per axis",
        ));
    }
    let re: Vec<f64> = crate::fit::linear_points(re0, re1, nre);
    let im: Vec<f64> = crate::fit::linear_points(im0, im1, nim);
    let nodes: Vec<(usize, usize)> = (0..nim)
        .flat_map(|j| (0..nre).map(move |i| (j, i)))
        .collect();
    let values: Vec<f64> = nodes
        .par_iter()
        .map(|&(j, i)| resolvent_norm(op, C64::new(re[i], im[j]), metric).unwrap_or(f64::NAN))
        .collect();
    Ok(PseudospectrumField { re, im, values })
}

/// Scan `b -> f(b)` over `[b_min, b_max]`, geometric or linear spacing.
pub fn imaginary_axis_scan<F>(
    norm_at: F,
    b_min: f64,
    b_max: f64,
    samples: usize,
    log_spacing: bool,
) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if !(b_min > 0.0 && b_max > b_min) {
        return Err(Error::validation("scan needs 0 < b_min < b_max"));
    }
    if samples < 2 {
        return Err(Error::validation("scan needs at least 2 samples"));
    }
    let bs = if log_spacing {
        crate::fit::geometric_points(b_min, b_max, samples)
    } else {
        crate::fit::linear_points(b_min, b_max, samples)
    };
    let values: Result<Vec<f64>> = bs.par_iter().map(|&b| norm_at(b)).collect();
    Ok(bs.into_iter().zip(values?).collect())
}

/// Scan of the wave operator resolvent along the imaginary axis.
pub fn axis_scan_wave(
    op: &WaveOperator,
    b_min: f64,
    b_max: f64,
    samples: usize,
    log_spacing: bool,
) -> Result<Vec<(f64, f64)>> {
    imaginary_axis_scan(
        |b| resolvent_norm(op, C64::new(0.0, b), Metric::Energy),
        b_min,
        b_max,
        samples,
        log_spacing,
    )
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundCheck {
    pub b: f64,
    /// Measured `||(A - ib)^{-1}||_H`.
    pub lhs: f64,
    /// `1/|b| + |b| ||T_{ib}^{-1}||`.
    pub rhs: f64,
    pub ratio: f64,
}

/// Compare the measured resolvent norm against the Schur-complement bound.
pub fn schur_resolvent_bound_check(op: &WaveOperator, b: f64) -> Result<BoundCheck> {
    if b == 0.0 {
        return Err(Error::validation("bound check needs b != 0"));
    }
    let lhs = resolvent_norm(op, C64::new(0.0, b), Metric::Energy)?;
    let t = op.schur(C64::new(0.0, b));
    let t_norm = linalg::tridiag_inverse_norm(&t.matrix, &OpNormOptions::default())?;
    let rhs = 1.0 / b.abs() + b.abs() * t_norm;
    Ok(BoundCheck {
        b,
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}

/// Smallest eigenvalue of `-D_h + q + b a` on a Dirichlet-truncated domain
/// sized so that truncation pollutes the value by well under 1%.
/// Returns `(lambda_min, half_width, node_count)`.
pub fn coercivity_eigenvalue(a: Profile, q: Profile, b: f64) -> Result<(f64, f64, usize)> {
    a.validate()?;
    q.validate()?;
    if !(b > 0.0) {
        return Err(Error::validation("coercivity parameter b must be positive"));
    }
    let (l, n) = coercivity_grid(&a, b);
    let grid = Grid1D::new(l, n)?;
    let av = sample_coefficient(a, &grid)?;
    let qv = sample_coefficient(q, &grid)?;
    let h = grid.spacing();
    let w = 1.0 / (h * h);
    let m = SymTridiag {
        diag: (0..n)
            .map(|i| 2.0 * w + qv.values[i] + b * av.values[i])
            .collect(),
        off: vec![-w; n - 1],
    };
    Ok((m.smallest_eigenvalue(), l, n))
}

fn coercivity_grid(a: &Profile, b: f64) -> (f64, usize) {
    match *a {
        // the minimizer concentrates on the scale b^{-1/(2+beta)}
        Profile::Power { beta } | Profile::Bracket { beta } => {
            let l = 8.0 * b.powf(-1.0 / (2.0 + beta));
            let n = ((2.0 * l / 0.02).ceil() as usize).clamp(2000, 12_000);
            (l, n)
        }
        _ => {
            // uniformly positive floor: the Dirichlet gap (pi/2L)^2 must sit
            // well below b * a0
            let floor = a.essential_infimum().max(1e-6);
            let l = (std::f64::consts::PI / 2.0) / (0.004 * b * floor).sqrt();
            let l = l.max(50.0);
            let n = ((2.0 * l / 0.25).ceil() as usize).clamp(2000, 16_000);
            (l, n)
        }
    }
}

/// Fit of `log lambda_min(-D + q + b a)` against `log b`.
pub fn coercivity_exponent(a: Profile, q: Profile, b_range: &[f64]) -> Result<ExponentFit> {
    if b_range.len() < 2 {
        return Err(Error::validation("coercivity fit needs at least 2 samples"));
    }
    if b_range.iter().any(|&b| !(b > 0.0 && b <= 1.0)) {
        return Err(Error::validation("coercivity range must lie in (0, 1]"));
    }
    let vals: Result<Vec<f64>> = b_range
        .par_iter()
        .map(|&b| coercivity_eigenvalue(a, q, b).map(|(v, _, _)| v))
        .collect();
    let vals = vals?;
    let lo = b_range.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = b_range.iter().cloned().fold(0.0f64, f64::max);
    fit_loglog(b_range, &vals, (lo, hi))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KatoResult {
    /// `(b, lambda_0(b)/b)` samples, ascending in `b`.
    pub ratios: Vec<(f64, f64)>,
    /// Ratio at the smallest `b` (the measured expansion slope).
    pub limit: f64,
}

/// Smallest eigenvalue of the Neumann operator `-D^N + b a` on `(-1, 1)`,
/// reported as `lambda_0(b)/b`; the limit recovers the mean of `a`.
pub fn kato_slope(node_count: usize, a: Profile, b_range: &[f64]) -> Result<KatoResult> {
    a.validate()?;
    if node_count < 8 {
        return Err(Error::validation("expansion grid needs at least 8 nodes"));
    }
    if b_range.is_empty() || b_range.iter().any(|&b| !(b > 0.0 && b <= 1e-2)) {
        return Err(Error::validation("expansion range must lie in (0, 1e-2]"));
    }
    // Neumann grid over (-1, 1) including endpoints.
    let h = 2.0 / (node_count as f64 - 1.0);
    let w = 1.0 / (h * h);
    let avals: Vec<f64> = (0..node_count)
        .map(|i| a.eval(-1.0 + i as f64 * h))
        .collect();
    let mut bs: Vec<f64> = b_range.to_vec();
    bs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut ratios = Vec::with_capacity(bs.len());
    for &b in &bs {
        let mut diag: Vec<f64> = (0..node_count).map(|i| 2.0 * w + b * avals[i]).collect();
        diag[0] = w + b * avals[0];
        diag[node_count - 1] = w + b * avals[node_count - 1];
        let m = SymTridiag {
            diag,
            off: vec![-w; node_count - 1],
        };
        ratios.push((b, m.smallest_eigenvalue() / b));
    }
    let limit = ratios[0].1;
    Ok(KatoResult { ratios, limit })
}
