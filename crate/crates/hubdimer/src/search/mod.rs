//! Independent numerical oracles: brute-force constrained search over pure
//! real, pure complex, and ensemble states; discrete lower convex envelopes;
//! and ground-state energy recovery by the conjugate-function construction.

mod hull;
pub mod nelder;

use nalgebra::Matrix3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, FunctionalKind, VanishingAngles};
use crate::error::{DimerError, Result};
use crate::model::{
    build_interaction_matrix, cartesian_from_polar, one_body_energy, rdm_from_state,
    DensityOperator, InteractionParams, OneBodyParams, PolarRdm, RealRdm, Rdm, SingletState, SQRT2,
};
use crate::tol;

const GOLDEN: f64 = 0.381_966_011_250_105_2;

/// Options for the numerical searches. `restarts` and `seed` drive the
/// multistart stages; the 1-D stages are deterministic regardless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iterations: 400,
            tolerance: 1e-10,
            seed: 7,
        }
    }
}

impl SearchOptions {
    pub fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(DimerError::InvalidOptions("restarts must be >= 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(DimerError::InvalidOptions("tolerance must be > 0".into()));
        }
        Ok(())
    }
}

/// Rectangular grid over `(g11, g12)` clipped to the representability disk.
/// Optional off-grid boundary samples anchor envelope construction at the
/// true boundary values.
#[derive(Debug, Clone)]
pub struct GridField<T> {
    resolution: usize,
    data: Vec<Option<T>>,
    pub boundary: Vec<(f64, f64, T)>,
}

impl<T: Copy> GridField<T> {
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (self.resolution - 1) as f64
    }

    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        let h = self.spacing();
        (i as f64 * h, -0.5 + j as f64 * h)
    }

    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        self.data[i * self.resolution + j]
    }

    /// Builds a field by evaluating `f` at every in-disk node.
    pub fn from_fn(resolution: usize, f: impl Fn(f64, f64) -> T + Sync) -> Result<Self>
    where
        T: Send,
    {
        if resolution < 2 {
            return Err(DimerError::InvalidOptions(
                "grid resolution must be >= 2".into(),
            ));
        }
        let h = 1.0 / (resolution - 1) as f64;
        let data: Vec<Option<T>> = (0..resolution * resolution)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / resolution, k % resolution);
                let g11 = i as f64 * h;
                let g12 = -0.5 + j as f64 * h;
                let r = RealRdm { g11, g12 };
                if r.in_disk() {
                    Some(f(g11, g12))
                } else {
                    None
                }
            })
            .collect();
        Ok(Self {
            resolution,
            data,
            boundary: Vec::new(),
        })
    }

    /// Iterates over unmasked nodes as `(i, j, g11, g12, value)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64, f64, T)> + '_ {
        let res = self.resolution;
        self.data.iter().enumerate().filter_map(move |(k, v)| {
            v.map(|val| {
                let (i, j) = (k / res, k % res);
                let (g11, g12) = self.coords(i, j);
                (i, j, g11, g12, val)
            })
        })
    }

    pub fn unmasked_count(&self) -> usize {
        self.data.iter().filter(|v| v.is_some()).count()
    }

    pub fn map_values<U: Copy>(&self, f: impl Fn(T) -> U) -> GridField<U> {
        GridField {
            resolution: self.resolution,
            data: self.data.iter().map(|v| v.map(&f)).collect(),
            boundary: self
                .boundary
                .iter()
                .map(|&(x, y, v)| (x, y, f(v)))
                .collect(),
        }
    }

    /// Assembles a field from per-row data; rows outside the disk must be
    /// `None`.
    pub fn from_rows(resolution: usize, rows: Vec<Vec<Option<T>>>) -> Result<Self> {
        if rows.len() != resolution || rows.iter().any(|r| r.len() != resolution) {
            return Err(DimerError::InvalidOptions(
                "row data does not match the resolution".into(),
            ));
        }
        Ok(Self {
            resolution,
            data: rows.into_iter().flatten().collect(),
            boundary: Vec::new(),
        })
    }
}

/// Samples a functional on the disk grid and on a ring of exact boundary
/// points (4x the resolution), which anchor later envelope construction.
pub fn sample_with_boundary(
    resolution: usize,
    f: impl Fn(f64, f64) -> f64 + Sync,
) -> Result<GridField<f64>> {
    let mut field = GridField::from_fn(resolution, &f)?;
    let m = 4 * resolution;
    field.boundary = (0..m)
        .map(|k| {
            let phi = k as f64 * std::f64::consts::TAU / m as f64;
            let g11 = 0.5 * (1.0 + phi.cos());
            let g12 = 0.5 * phi.sin();
            (g11, g12, f(g11, g12))
        })
        .collect();
    Ok(field)
}

fn check_target(r: &RealRdm) -> Result<()> {
    if !r.in_disk() {
        return Err(DimerError::OutsideDisk {
            g11: r.g11,
            g12: r.g12,
        });
    }
    Ok(())
}

fn golden_min(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    for _ in 0..iters {
        let m1 = lo + GOLDEN * (hi - lo);
        let m2 = hi - GOLDEN * (hi - lo);
        if f(m1) < f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let x = 0.5 * (lo + hi);
    (f(x), x)
}

// ---------------------------------------------------------------------------
// pure real search
// ---------------------------------------------------------------------------

/// Minimum of the interaction expectation over real normalized states with
/// the prescribed 1RDM. The three constraints are eliminated exactly: the
/// doubly-occupied weight is pinned to one of the two candidate branches
/// and the remaining signs are enumerated, so the search space is finite.
pub fn min_pure_real(
    w: &InteractionParams,
    target: &RealRdm,
    _opts: &SearchOptions,
) -> Result<(f64, SingletState)> {
    check_target(target)?;
    let wm = build_interaction_matrix(w);
    let value_of = |s: &SingletState| s.expectation(&wm);

    let x = target.g11 - 0.5;
    let y = target.g12;

    if y.abs() < tol::CENTER_EPS {
        if x.abs() < tol::CENTER_EPS {
            // center: the c = 0 circle and the a = -b segment are feasible
            let s = 1.0 / SQRT2;
            let mut candidates = vec![
                SingletState::from_real(0.0, 0.0, 1.0)?,
                SingletState::from_real(s, s, 0.0)?,
                SingletState::from_real(s, -s, 0.0)?,
            ];
            let mut best = candidates.remove(0);
            let mut best_v = value_of(&best);
            for s in candidates {
                let v = value_of(&s);
                if v < best_v {
                    best_v = v;
                    best = s;
                }
            }
            return Ok((best_v, best));
        }
        // g12 = 0 off-center: c = 0, only the relative sign of (a, b) is free
        let am = target.g11.max(0.0).sqrt();
        let bm = (1.0 - target.g11).max(0.0).sqrt();
        let s1 = SingletState::normalized(
            Complex64::new(am, 0.0),
            Complex64::new(bm, 0.0),
            Complex64::new(0.0, 0.0),
        )?;
        let s2 = SingletState::normalized(
            Complex64::new(am, 0.0),
            Complex64::new(-bm, 0.0),
            Complex64::new(0.0, 0.0),
        )?;
        let (v1, v2) = (value_of(&s1), value_of(&s2));
        return Ok(if v1 <= v2 { (v1, s1) } else { (v2, s2) });
    }

    let (c2p, c2m) = analytic::c2_candidates(target)?;
    let mut best: Option<(f64, SingletState)> = None;
    let mut branches = vec![c2p];
    if (c2p - c2m).abs() > 1e-15 {
        branches.push(c2m);
    }
    for c2 in branches {
        let c = c2.sqrt();
        if c < 1e-12 {
            continue;
        }
        let ssum = SQRT2 * y / c;
        let am = (target.g11 - 0.5 * c2).max(0.0).sqrt();
        let bm = (1.0 - target.g11 - 0.5 * c2).max(0.0).sqrt();
        // pick the sign pair reproducing a + b; magnitudes are already exact
        let mut pick = (f64::INFINITY, 1.0, 1.0);
        for sa in [1.0, -1.0] {
            for sb in [1.0, -1.0] {
                let res = (sa * am + sb * bm - ssum).abs();
                if res < pick.0 {
                    pick = (res, sa, sb);
                }
            }
        }
        if pick.0 > 1e-6 * ssum.abs().max(1.0) {
            continue;
        }
        let state = SingletState::normalized(
            Complex64::new(pick.1 * am, 0.0),
            Complex64::new(pick.2 * bm, 0.0),
            Complex64::new(c, 0.0),
        )?;
        let v = value_of(&state);
        if best.as_ref().map_or(true, |(bv, _)| v < *bv) {
            best = Some((v, state));
        }
    }
    best.ok_or_else(|| {
        DimerError::InvalidArgument("no feasible real state for this 1RDM".into())
    })
}

// ---------------------------------------------------------------------------
// pure complex search
// ---------------------------------------------------------------------------

/// Interaction minimum over the two feasible states at a fixed
/// doubly-occupied weight `c2`, with the global phase gauged so `c` is real.
/// `None` when the weight is infeasible for the target.
fn complex_value_at_c2(
    w: &InteractionParams,
    g11: f64,
    x12: f64,
    y12: f64,
    c2: f64,
) -> Option<f64> {
    if c2 <= 0.0 {
        return None;
    }
    let c = c2.sqrt();
    let a2 = g11 - 0.5 * c2;
    let b2 = 1.0 - g11 - 0.5 * c2;
    if a2 < -1e-13 || b2 < -1e-13 {
        return None;
    }
    let a2 = a2.max(0.0);
    let b2 = b2.max(0.0);
    let sr = SQRT2 * x12 / c;
    let di = SQRT2 * y12 / c;
    let nn = sr * sr + di * di;
    let base = w.u * (1.0 - c2) + 2.0 * SQRT2 * w.x * x12;
    if nn < 1e-28 {
        // target g12 = 0 with c > 0 requires |a| = |b|
        if (a2 - b2).abs() > 1e-12 {
            return None;
        }
        return Some(base - 2.0 * w.v.abs() * a2);
    }
    // constraints reduce to a line-circle intersection for (Re a, Im a)
    let k = nn + a2 - b2;
    let d = k / (2.0 * nn.sqrt());
    if d * d > a2 * (1.0 + 5e-14) + 1e-15 {
        return None;
    }
    let t = (a2 - d * d).max(0.0).sqrt();
    let (ux, uy) = (sr / nn.sqrt(), di / nn.sqrt());
    let mut best = f64::INFINITY;
    for s in [1.0, -1.0] {
        let ar = d * ux - s * t * uy;
        let ai = d * uy + s * t * ux;
        let br = sr - ar;
        let bi = ai - di;
        best = best.min(base + 2.0 * w.v * (ar * br + ai * bi));
    }
    Some(best)
}

/// Minimum of the interaction expectation over complex normalized states
/// with the prescribed complex 1RDM. After gauge fixing, the feasible
/// doubly-occupied weights form the exact interval between the two
/// candidate branches; a 1-D scan with golden refinement plus the interval
/// edges covers every basin.
pub fn min_pure_complex(w: &InteractionParams, target: &Rdm, _opts: &SearchOptions) -> Result<f64> {
    let real_view = RealRdm {
        g11: target.g11,
        g12: target.g12.norm(),
    };
    check_target(&real_view)?;
    let g11 = target.g11;
    let (x12, y12) = (target.g12.re, target.g12.im);
    let rho2 = target.g12.norm_sqr();

    if rho2 < 1e-28 {
        let ab = (g11 * (1.0 - g11)).max(0.0).sqrt();
        if (g11 - 0.5).abs() < tol::CENTER_EPS {
            return Ok((w.u - w.v.abs()).min(0.0));
        }
        return Ok(w.u - 2.0 * w.v.abs() * ab);
    }

    let (c2hi, c2lo) = analytic::c2_candidates(&real_view)?;
    let cap = (2.0 * g11).min(2.0 * (1.0 - g11)).min(1.0);
    let lo = c2lo.max(0.0);
    let hi = c2hi.min(cap).max(lo);

    let eval = |c2: f64| complex_value_at_c2(w, g11, x12, y12, c2);
    let mut best = f64::INFINITY;
    // interval edges, nudged inward when rounding makes them infeasible
    for edge in [lo, hi] {
        let mut v = eval(edge);
        if v.is_none() {
            for eps in [1e-14, 1e-12, 1e-10, 1e-8] {
                let towards = 0.5 * (lo + hi);
                let e = edge + (towards - edge).signum() * eps * edge.abs().max(1e-3);
                v = eval(e.clamp(lo, hi));
                if v.is_some() {
                    break;
                }
            }
        }
        if let Some(v) = v {
            best = best.min(v);
        }
    }
    if hi - lo > 1e-14 {
        let n = 256;
        let vals: Vec<f64> = (0..n)
            .map(|k| {
                let c2 = lo + (hi - lo) * k as f64 / (n - 1) as f64;
                eval(c2).unwrap_or(f64::INFINITY)
            })
            .collect();
        for j in 0..n {
            let here = vals[j];
            if !here.is_finite() {
                continue;
            }
            let left_ok = j == 0 || here <= vals[j - 1];
            let right_ok = j == n - 1 || here <= vals[j + 1];
            if left_ok && right_ok {
                let a = lo + (hi - lo) * j.saturating_sub(1) as f64 / (n - 1) as f64;
                let b = lo + (hi - lo) * (j + 1).min(n - 1) as f64 / (n - 1) as f64;
                let (v, _) = golden_min(|c2| eval(c2).unwrap_or(f64::INFINITY), a, b, 80);
                if v.is_finite() {
                    best = best.min(v);
                }
                best = best.min(here);
            }
        }
    }
    if !best.is_finite() {
        return Err(DimerError::InvalidArgument(
            "no feasible complex state for this 1RDM".into(),
        ));
    }
    Ok(best)
}

/// Reduced complex-pure functional: minimum of [`min_pure_complex`] over
/// the imaginary part of `g12`. Conjugation symmetry of the real
/// interaction makes the scan over nonnegative imaginary parts sufficient.
pub fn min_pure_complex_reduced(
    w: &InteractionParams,
    target: &RealRdm,
    opts: &SearchOptions,
) -> Result<f64> {
    check_target(target)?;
    let ymax2 = 0.25 - (target.g11 - 0.5).powi(2) - target.g12 * target.g12;
    let at = |y: f64| -> f64 {
        let rdm = Rdm {
            g11: target.g11,
            g12: Complex64::new(target.g12, y),
        };
        min_pure_complex(w, &rdm, opts).unwrap_or(f64::INFINITY)
    };
    if ymax2 <= 0.0 {
        return Ok(at(0.0));
    }
    let ymax = ymax2.sqrt();
    let n = 33;
    let vals: Vec<f64> = (0..n)
        .map(|k| at(ymax * k as f64 / (n - 1) as f64))
        .collect();
    let mut best = f64::INFINITY;
    for j in 0..n {
        if !vals[j].is_finite() {
            continue;
        }
        let left_ok = j == 0 || vals[j] <= vals[j - 1];
        let right_ok = j == n - 1 || vals[j] <= vals[j + 1];
        if left_ok && right_ok {
            let a = ymax * j.saturating_sub(1) as f64 / (n - 1) as f64;
            let b = ymax * (j + 1).min(n - 1) as f64 / (n - 1) as f64;
            let (v, _) = golden_min(&at, a, b, 70);
            best = best.min(v).min(vals[j]);
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// ensemble search
// ---------------------------------------------------------------------------

/// Extreme off-diagonal weight of the doubly-occupied block over the free
/// transfer asymmetry, at fixed `tau`, via the Schur complement of the
/// `Phi3` entry. Returns the extreme value and its asymmetry, or `None`
/// when no positive-semidefinite completion exists.
fn beta_extreme(
    tau: f64,
    g11: f64,
    g12: f64,
    want_min: bool,
) -> Option<(f64, f64)> {
    let a11 = g11 - 0.5 * tau;
    let a22 = 1.0 - g11 - 0.5 * tau;
    if a11 < -1e-15 || a22 < -1e-15 {
        return None;
    }
    let a11 = a11.max(0.0);
    let a22 = a22.max(0.0);
    let s = g12 / SQRT2;
    let r1 = (a11 * tau).max(0.0).sqrt();
    let r2 = (a22 * tau).max(0.0).sqrt();
    let mut lo = (-s - r1).max(s - r2);
    let mut hi = (-s + r1).min(s + r2);
    if lo > hi {
        // rounding can pinch a genuinely feasible interval shut; anything
        // beyond rounding scale is a real infeasibility
        if lo - hi > 2e-16 * (1.0 + s.abs() + r1 + r2) {
            return None;
        }
        let mid = 0.5 * (lo + hi);
        lo = mid;
        hi = mid;
    }
    let g = |d: f64| -> f64 {
        let m11 = (a11 - (s + d) * (s + d) / tau).max(0.0);
        let m22 = (a22 - (s - d) * (s - d) / tau).max(0.0);
        let root = (m11 * m22).sqrt();
        let base = (s * s - d * d) / tau;
        if want_min {
            base - root
        } else {
            base + root
        }
    };
    let sign = if want_min { 1.0 } else { -1.0 };
    let n = 65;
    let mut best = (f64::INFINITY, lo);
    let vals: Vec<f64> = (0..n)
        .map(|k| sign * g(lo + (hi - lo) * k as f64 / (n - 1) as f64))
        .collect();
    for j in 0..n {
        let left_ok = j == 0 || vals[j] <= vals[j - 1];
        let right_ok = j == n - 1 || vals[j] <= vals[j + 1];
        if left_ok && right_ok {
            let a = lo + (hi - lo) * j.saturating_sub(1) as f64 / (n - 1) as f64;
            let b = lo + (hi - lo) * (j + 1).min(n - 1) as f64 / (n - 1) as f64;
            let (v, d) = golden_min(|d| sign * g(d), a, b, 70);
            if v < best.0 {
                best = (v, d);
            }
        }
    }
    Some((sign * best.0, best.1))
}

/// Ensemble objective at fixed `tau`, minimized exactly over the free
/// parameters; `None` when `tau` is infeasible.
fn ensemble_value_at_tau(
    tau: f64,
    w: &InteractionParams,
    g11: f64,
    g12: f64,
) -> Option<(f64, f64, f64)> {
    if tau < 1e-14 {
        if g12.abs() > 1e-12 {
            return None;
        }
        let bmax = (g11 * (1.0 - g11)).max(0.0).sqrt();
        let beta = if w.v > 0.0 { -bmax } else { bmax };
        return Some((w.u + 2.0 * w.v * beta, beta, 0.0));
    }
    let (beta, delta) = if w.v >= 0.0 {
        beta_extreme(tau, g11, g12, true)?
    } else {
        beta_extreme(tau, g11, g12, false)?
    };
    Some((w.u * (1.0 - tau) + 2.0 * w.v * beta, beta, delta))
}

fn ensemble_density(tau: f64, delta: f64, beta: f64, g11: f64, g12: f64) -> Result<DensityOperator> {
    let s = g12 / SQRT2;
    let m = Matrix3::new(
        g11 - 0.5 * tau,
        beta,
        s + delta,
        beta,
        1.0 - g11 - 0.5 * tau,
        s - delta,
        s + delta,
        s - delta,
        tau,
    );
    DensityOperator::from_real(m)
}

/// Minimum of the interaction energy over density operators with the
/// prescribed 1RDM. For real targets the three linear constraints are
/// eliminated, leaving a three-parameter family whose semidefiniteness is
/// resolved by a Schur complement; the objective is convex along the
/// remaining direction and solved by nested 1-D searches. Complex targets
/// use the Hermitian variant with a multistart over the transfer asymmetry.
pub fn min_ensemble(
    w: &InteractionParams,
    target: &Rdm,
    opts: &SearchOptions,
) -> Result<(f64, DensityOperator)> {
    let real_view = RealRdm {
        g11: target.g11,
        g12: target.g12.norm(),
    };
    check_target(&real_view)?;
    if target.g12.im.abs() < 1e-14 {
        let (v, g) = min_ensemble_real(w, &target.real_part())?;
        return Ok((v, g));
    }
    min_ensemble_hermitian(w, target, opts)
}

fn min_ensemble_real(
    w: &InteractionParams,
    target: &RealRdm,
) -> Result<(f64, DensityOperator)> {
    let g11 = target.g11;
    let g12 = target.g12;
    let cap = (2.0 * g11).min(2.0 * (1.0 - g11)).min(1.0);
    let shift = 2.0 * SQRT2 * w.x * g12;
    let value = |tau: f64| ensemble_value_at_tau(tau, w, g11, g12);

    // the pure-state branches give guaranteed-feasible weights
    let mut feas_seed = Vec::new();
    if let Ok((c2p, c2m)) = analytic::c2_candidates(target) {
        feas_seed.push(c2m.clamp(0.0, cap));
        feas_seed.push(c2p.clamp(0.0, cap));
        feas_seed.push((0.5 * (c2p + c2m)).clamp(0.0, cap));
    } else {
        feas_seed.push(0.0);
        feas_seed.push(cap);
    }

    let n = 161;
    let mut taus: Vec<f64> = (0..n).map(|k| cap * k as f64 / (n - 1) as f64).collect();
    taus.extend_from_slice(&feas_seed);
    let evals: Vec<(f64, Option<(f64, f64, f64)>)> =
        taus.iter().map(|&t| (t, value(t))).collect();

    let mut lo_f = f64::INFINITY;
    let mut hi_f = f64::NEG_INFINITY;
    for (t, v) in &evals {
        if v.is_some() {
            lo_f = lo_f.min(*t);
            hi_f = hi_f.max(*t);
        }
    }
    if !lo_f.is_finite() {
        return Err(DimerError::InvalidArgument(
            "no feasible density operator for this 1RDM".into(),
        ));
    }
    // refine the feasible interval edges
    let feasible = |t: f64| value(t).is_some();
    let mut lo_edge = lo_f;
    if lo_f > 0.0 {
        let (mut a, mut b) = (0.0, lo_f);
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if feasible(m) {
                b = m;
            } else {
                a = m;
            }
        }
        lo_edge = b;
    }
    let mut hi_edge = hi_f;
    if hi_f < cap {
        let (mut a, mut b) = (hi_f, cap);
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if feasible(m) {
                a = m;
            } else {
                b = m;
            }
        }
        hi_edge = a;
    }

    // the per-tau exact minimum is convex over the feasible interval
    let obj = |t: f64| value(t).map(|(v, _, _)| v).unwrap_or(f64::INFINITY);
    let mut best = (f64::INFINITY, lo_edge);
    for t in [lo_edge, hi_edge] {
        let v = obj(t);
        if v < best.0 {
            best = (v, t);
        }
    }
    if hi_edge - lo_edge > 1e-15 {
        let (v, t) = golden_min(obj, lo_edge, hi_edge, 90);
        if v < best.0 {
            best = (v, t);
        }
    }
    let (v, beta, delta) = value(best.1).ok_or_else(|| {
        DimerError::InvalidArgument("ensemble optimum lost feasibility".into())
    })?;
    let gamma = ensemble_density(best.1, delta, beta, g11, g12)?;
    Ok((v + shift, gamma))
}

fn min_ensemble_hermitian(
    w: &InteractionParams,
    target: &Rdm,
    opts: &SearchOptions,
) -> Result<(f64, DensityOperator)> {
    use rand::prelude::*;
    opts.validate()?;
    let g11 = target.g11;
    let z = target.g12 / SQRT2;
    let cap = (2.0 * g11).min(2.0 * (1.0 - g11)).min(1.0);
    let shift = 2.0 * SQRT2 * w.x * target.g12.re;

    // at fixed (tau, wc) the PSD-feasible real off-diagonal weight is an
    // interval; take its extreme according to the sign of V
    let value_at = |tau: f64, wr: f64, wi: f64| -> Option<(f64, Complex64)> {
        if tau < 1e-14 {
            if target.g12.norm() > 1e-12 {
                return None;
            }
            let bmax = (g11 * (1.0 - g11)).max(0.0).sqrt();
            let b = if w.v > 0.0 { -bmax } else { bmax };
            return Some((w.u + 2.0 * w.v * b, Complex64::new(b, 0.0)));
        }
        let wc = Complex64::new(wr, wi);
        let u1 = z + wc;
        let u2 = (z - wc).conj();
        let a11 = g11 - 0.5 * tau - u1.norm_sqr() / tau;
        let a22 = 1.0 - g11 - 0.5 * tau - u2.norm_sqr() / tau;
        if a11 < -2e-16 || a22 < -2e-16 {
            return None;
        }
        let (a11, a22) = (a11.max(0.0), a22.max(0.0));
        let cross = u1 * u2.conj() / tau;
        let root = (a11 * a22).max(0.0).sqrt();
        let re = if w.v >= 0.0 {
            cross.re - root
        } else {
            cross.re + root
        };
        let beta = Complex64::new(re, cross.im);
        Some((w.u * (1.0 - tau) + 2.0 * w.v * beta.re, beta))
    };

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);
    let mut random_w: Vec<(f64, f64)> = Vec::new();
    for _ in 0..opts.restarts.min(32) {
        random_w.push((rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)));
    }

    // minimum over the transfer asymmetry at fixed tau: a deterministic
    // coarse grid locates the basin, cascaded simplex runs polish it
    let inner = |tau: f64| -> Option<(f64, f64, f64)> {
        if tau < 1e-14 {
            return value_at(tau, 0.0, 0.0).map(|(v, _)| (v, 0.0, 0.0));
        }
        let mut coarse: Vec<(f64, f64, f64)> = Vec::new();
        let nw = 17;
        let wmax = 0.55;
        let mut consider = |v: Option<(f64, Complex64)>, wr: f64, wi: f64,
                            out: &mut Vec<(f64, f64, f64)>| {
            if let Some((val, _)) = v {
                out.push((val, wr, wi));
            }
        };
        for a in 0..nw {
            for b in 0..nw {
                let wr = -wmax + 2.0 * wmax * a as f64 / (nw - 1) as f64;
                let wi = -wmax + 2.0 * wmax * b as f64 / (nw - 1) as f64;
                consider(value_at(tau, wr, wi), wr, wi, &mut coarse);
            }
        }
        // the feasible w-region is the lens of two disks centered at -z and
        // +z; it can pinch to one of these points at the tau edges, so seed
        // the centers and the lens midpoint exactly
        let r1c = ((g11 - 0.5 * tau).max(0.0) * tau).sqrt();
        let r2c = ((1.0 - g11 - 0.5 * tau).max(0.0) * tau).sqrt();
        let mut seeds = vec![
            Complex64::new(0.0, 0.0),
            -z,
            z,
        ];
        if r1c + r2c > 0.0 {
            seeds.push((z * r1c - z * r2c) / (r1c + r2c));
        }
        for s in seeds {
            consider(value_at(tau, s.re, s.im), s.re, s.im, &mut coarse);
        }
        for &(wr, wi) in &random_w {
            consider(value_at(tau, wr, wi), wr, wi, &mut coarse);
        }
        if coarse.is_empty() {
            return None;
        }
        // polish from a handful of well-separated basin candidates
        coarse.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut starts: Vec<(f64, f64)> = Vec::new();
        for &(_, wr, wi) in &coarse {
            if starts.len() >= 5 {
                break;
            }
            if starts.iter().all(|&(r, i)| (r - wr).hypot(i - wi) > 0.12) {
                starts.push((wr, wi));
            }
        }
        let mut best: Option<(f64, f64, f64)> = None;
        for (mut wr, mut wi) in starts {
            let mut best_v = f64::INFINITY;
            for scale in [0.1, 0.01, 1e-3, 1e-4] {
                let (v, p) = nelder::minimize(
                    |p| value_at(tau, p[0], p[1]).map(|(v, _)| v).unwrap_or(f64::INFINITY),
                    &[wr, wi],
                    &[scale, scale],
                    300,
                );
                if v < best_v {
                    best_v = v;
                    wr = p[0];
                    wi = p[1];
                }
            }
            if best.map_or(true, |(bv, ..)| best_v < bv) {
                best = Some((best_v, wr, wi));
            }
        }
        best
    };
    let obj = |tau: f64| inner(tau).map(|(v, _, _)| v).unwrap_or(f64::INFINITY);

    // feasible tau interval: scan plus the guaranteed pure-state weights
    let real_view = RealRdm {
        g11,
        g12: target.g12.norm(),
    };
    let nt = 81;
    let mut taus: Vec<f64> = (0..nt).map(|k| cap * k as f64 / (nt - 1) as f64).collect();
    if let Ok((c2p, c2m)) = analytic::c2_candidates(&real_view) {
        taus.push(c2m.clamp(0.0, cap));
        taus.push(c2p.clamp(0.0, cap));
        taus.push((0.5 * (c2p + c2m)).clamp(0.0, cap));
    }
    let feas: Vec<(f64, bool)> = taus
        .iter()
        .map(|&t| (t, inner(t).is_some()))
        .collect();
    let lo_f = feas
        .iter()
        .filter(|(_, ok)| *ok)
        .map(|(t, _)| *t)
        .fold(f64::INFINITY, f64::min);
    let hi_f = feas
        .iter()
        .filter(|(_, ok)| *ok)
        .map(|(t, _)| *t)
        .fold(f64::NEG_INFINITY, f64::max);
    if !lo_f.is_finite() {
        return Err(DimerError::InvalidArgument(
            "no feasible density operator for this 1RDM".into(),
        ));
    }
    let feasible = |t: f64| inner(t).is_some();
    let mut lo_edge = lo_f;
    if lo_f > 0.0 {
        let (mut a, mut b) = (0.0, lo_f);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if feasible(m) {
                b = m;
            } else {
                a = m;
            }
        }
        lo_edge = b;
    }
    let mut hi_edge = hi_f;
    if hi_f < cap {
        let (mut a, mut b) = (hi_f, cap);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if feasible(m) {
                a = m;
            } else {
                b = m;
            }
        }
        hi_edge = a;
    }
    let mut final_best = (f64::INFINITY, lo_edge);
    for t in [lo_edge, hi_edge] {
        let v = obj(t);
        if v < final_best.0 {
            final_best = (v, t);
        }
    }
    if hi_edge - lo_edge > 1e-15 {
        let (v, t) = golden_min(obj, lo_edge, hi_edge, 70);
        if v < final_best.0 {
            final_best = (v, t);
        }
    }
    let (val, tau) = final_best;
    let (_, wr, wi) = inner(tau).ok_or_else(|| {
        DimerError::InvalidArgument("ensemble optimum lost feasibility".into())
    })?;
    let (_, beta) = value_at(tau, wr, wi).ok_or_else(|| {
        DimerError::InvalidArgument("ensemble optimum lost feasibility".into())
    })?;
    let wc = Complex64::new(wr, wi);
    let u1 = z + wc;
    let u2 = (z - wc).conj();
    let m = Matrix3::new(
        Complex64::new(g11 - 0.5 * tau, 0.0),
        beta,
        u1,
        beta.conj(),
        Complex64::new(1.0 - g11 - 0.5 * tau, 0.0),
        u2,
        u1.conj(),
        u2.conj(),
        Complex64::new(tau, 0.0),
    );
    let gamma = DensityOperator::new(m)?;
    Ok((val + shift, gamma))
}

// ---------------------------------------------------------------------------
// lower convex envelope
// ---------------------------------------------------------------------------

/// Discrete lower convex envelope of a grid field, from the lower facets of
/// the convex hull of the lifted samples. Boundary samples are always
/// included as hull candidates. The output never exceeds the input and is
/// exact at nodes where the input already equals its envelope.
pub fn lower_convex_envelope(field: &GridField<f64>) -> Result<GridField<f64>> {
    let nodes: Vec<(usize, usize, f64, f64, f64)> = field.iter().collect();
    if nodes.len() < 3 {
        return Err(DimerError::TooFewNodes(nodes.len()));
    }
    let mut pts: Vec<[f64; 3]> = nodes.iter().map(|&(_, _, x, y, v)| [x, y, v]).collect();
    pts.extend(field.boundary.iter().map(|&(x, y, v)| [x, y, v]));

    let planes = match hull::lower_hull(&pts) {
        Some(p) if !p.is_empty() => p,
        // coplanar input: the function is affine and is its own envelope
        _ => return Ok(field.clone()),
    };

    let res = field.resolution();
    let h = field.spacing();
    let mut env: Vec<Option<f64>> = vec![None; res * res];

    // rasterize each lower facet over the grid nodes in its projection
    for plane in &planes {
        let (v0, v1, v2) = (
            pts[plane.verts[0]],
            pts[plane.verts[1]],
            pts[plane.verts[2]],
        );
        let min_x = v0[0].min(v1[0]).min(v2[0]);
        let max_x = v0[0].max(v1[0]).max(v2[0]);
        let min_y = v0[1].min(v1[1]).min(v2[1]);
        let max_y = v0[1].max(v1[1]).max(v2[1]);
        let i_lo = ((min_x / h).floor().max(0.0)) as usize;
        let i_hi = ((max_x / h).ceil() as usize).min(res - 1);
        let j_lo = (((min_y + 0.5) / h).floor().max(0.0)) as usize;
        let j_hi = (((max_y + 0.5) / h).ceil() as usize).min(res - 1);
        let det = (v1[0] - v0[0]) * (v2[1] - v0[1]) - (v2[0] - v0[0]) * (v1[1] - v0[1]);
        if det.abs() < 1e-300 {
            continue;
        }
        for i in i_lo..=i_hi {
            for j in j_lo..=j_hi {
                let k = i * res + j;
                if field.data[k].is_none() {
                    continue;
                }
                let (x, y) = field.coords(i, j);
                let l1 = ((x - v0[0]) * (v2[1] - v0[1]) - (v2[0] - v0[0]) * (y - v0[1])) / det;
                let l2 = ((v1[0] - v0[0]) * (y - v0[1]) - (x - v0[0]) * (v1[1] - v0[1])) / det;
                let eps = 1e-9;
                if l1 >= -eps && l2 >= -eps && l1 + l2 <= 1.0 + eps {
                    let z = plane.height(x, y);
                    let cur = env[k];
                    if cur.map_or(true, |c| z > c) {
                        env[k] = Some(z);
                    }
                }
            }
        }
    }

    // fall back to the supporting-plane maximum for any node the
    // rasterization missed, then clamp at the sample values
    let data: Vec<Option<f64>> = (0..res * res)
        .into_par_iter()
        .map(|k| {
            field.data[k].map(|f_val| {
                let z = match env[k] {
                    Some(z) => z,
                    None => {
                        let (i, j) = (k / res, k % res);
                        let (x, y) = field.coords(i, j);
                        planes
                            .iter()
                            .map(|p| p.height(x, y))
                            .fold(f64::NEG_INFINITY, f64::max)
                    }
                };
                z.min(f_val)
            })
        })
        .collect();

    Ok(GridField {
        resolution: res,
        data,
        boundary: field.boundary.clone(),
    })
}

// ---------------------------------------------------------------------------
// ground-state energy by conjugate-function construction
// ---------------------------------------------------------------------------

fn functional_evaluator<'a>(
    kind: FunctionalKind,
    w: &'a InteractionParams,
    opts: &'a SearchOptions,
) -> impl Fn(f64, f64) -> f64 + Sync + 'a {
    // the imaginary part of the variable minimizes out against a real
    // one-particle Hamiltonian, so complex-variable kinds reduce to their
    // real-variable counterparts here
    let kind = match kind {
        FunctionalKind::FctPure => FunctionalKind::FcPure,
        FunctionalKind::FctEns => FunctionalKind::FcEns,
        other => other,
    };
    move |g11: f64, g12: f64| {
        let r = RealRdm { g11, g12 };
        let res = match kind {
            FunctionalKind::FrPure => analytic::f_r_pure_general_cartesian(w, &r),
            _ => {
                if w.is_on_site() {
                    analytic::f_c_pure_onsite(w.u, &r)
                } else {
                    min_ensemble(w, &r.into(), opts).map(|(v, _)| v)
                }
            }
        };
        res.unwrap_or(f64::INFINITY)
    }
}

/// Ground-state energy recovered from a universal functional: minimizes
/// `2 Tr[h1 gamma] + F(gamma)` over the disk by a grid scan followed by a
/// simplex polish in square-root polar coordinates, which resolves the
/// `sqrt(R)` boundary structure. Returns every minimizer within `1e-8` of
/// the optimum (degenerate support points).
pub fn legendre_fenchel_energy(
    p: &OneBodyParams,
    kind: FunctionalKind,
    w: &InteractionParams,
    resolution: usize,
    opts: &SearchOptions,
) -> Result<(f64, Vec<RealRdm>)> {
    if resolution < 51 {
        return Err(DimerError::InvalidOptions(
            "energy grid resolution must be >= 51".into(),
        ));
    }
    let f = functional_evaluator(kind, w, opts);
    let objective_cart = |g11: f64, g12: f64| -> f64 {
        let r = RealRdm { g11, g12 };
        if !r.in_disk() {
            return f64::INFINITY;
        }
        one_body_energy(p, &r) + f(g11, g12)
    };

    // coarse scan
    let h = 1.0 / (resolution - 1) as f64;
    let scanned: Vec<(f64, f64, f64)> = (0..resolution * resolution)
        .into_par_iter()
        .filter_map(|k| {
            let (i, j) = (k / resolution, k % resolution);
            let g11 = i as f64 * h;
            let g12 = -0.5 + j as f64 * h;
            let v = objective_cart(g11, g12);
            v.is_finite().then_some((v, g11, g12))
        })
        .collect();
    let coarse_best = scanned
        .iter()
        .fold(f64::INFINITY, |acc, &(v, _, _)| acc.min(v));

    // cluster near-optimal nodes into polish candidates
    let window = 1e-3 * (1.0 + coarse_best.abs());
    let mut reps: Vec<(f64, f64)> = Vec::new();
    let mut near: Vec<&(f64, f64, f64)> = scanned
        .iter()
        .filter(|(v, _, _)| *v <= coarse_best + window)
        .collect();
    near.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for (_, x, y) in near {
        if reps.len() >= 24 {
            break;
        }
        if reps
            .iter()
            .all(|(rx, ry)| (rx - x).hypot(ry - y) > 4.0 * h)
        {
            reps.push((*x, *y));
        }
    }

    // polish in (u, phi) with R = u^2
    let obj_upol = |q: &[f64]| -> f64 {
        let u = q[0].abs();
        if u > std::f64::consts::FRAC_1_SQRT_2 {
            return f64::INFINITY;
        }
        let r = (u * u).min(0.5);
        let cart = cartesian_from_polar(&PolarRdm { r, phi: q[1] });
        objective_cart(cart.g11, cart.g12)
    };
    let mut starts: Vec<[f64; 2]> = Vec::new();
    for (x, y) in &reps {
        let rho = (x - 0.5).hypot(*y);
        let r = (0.5 - rho).max(0.0);
        starts.push([r.sqrt(), y.atan2(x - 0.5)]);
    }
    if let VanishingAngles::Angles(angles) = analytic::vanishing_angles(w) {
        for phi in angles {
            starts.push([0.01, phi]);
            starts.push([0.08, phi]);
        }
    }
    for u0 in [0.05, 0.3, 0.6] {
        for k in 0..4 {
            starts.push([u0, k as f64 * std::f64::consts::FRAC_PI_2 + 0.4]);
        }
    }

    let mut best = coarse_best;
    let mut minima: Vec<(f64, RealRdm)> = Vec::new();
    for s in starts {
        let (v1, p1) = nelder::minimize(obj_upol, &s, &[0.02, 0.05], 400);
        let (v2, p2) = nelder::minimize(obj_upol, &p1, &[0.002, 0.01], 400);
        let (v, q) = if v2 < v1 { (v2, p2) } else { (v1, p1) };
        if !v.is_finite() {
            continue;
        }
        let u = q[0].abs().min(std::f64::consts::FRAC_1_SQRT_2);
        let cart = cartesian_from_polar(&PolarRdm {
            r: (u * u).min(0.5),
            phi: q[1],
        });
        best = best.min(v);
        minima.push((v, cart));
    }

    let mut minimizers: Vec<RealRdm> = Vec::new();
    minima.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for (v, cart) in minima {
        if v > best + 1e-8 {
            break;
        }
        if minimizers
            .iter()
            .all(|m| (m.g11 - cart.g11).hypot(m.g12 - cart.g12) > 1e-6)
        {
            minimizers.push(cart);
        }
    }
    Ok((best, minimizers))
}

// ---------------------------------------------------------------------------

/// Feasibility residual between a state's 1RDM and a real target.
pub fn feasibility_residual(state: &SingletState, target: &RealRdm) -> f64 {
    let r = rdm_from_state(state);
    ((r.g11 - target.g11).powi(2) + (r.g12 - Complex64::new(target.g12, 0.0)).norm_sqr()).sqrt()
}
