//! Classification of 1RDMs by representability as ground-state reduced
//! densities: pointwise verdicts, whole-disk maps, Hamiltonian sweeps of
//! attained 1RDMs, the degenerate state families filling the excluded
//! ellipses, and fits of the boundary force divergence.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, FunctionalKind};
use crate::error::{DimerError, Result};
use crate::model::{
    ground_state, polar_from_cartesian, rdm_from_state, InteractionParams, OneBodyParams,
    PolarRdm, RealRdm, Rdm, SingletState,
};
use crate::search::{self, GridField, SearchOptions};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VrepStatus {
    Representable,
    NotRepresentable,
    BoundaryExcluded,
    BoundaryTouchpoint,
}

impl VrepStatus {
    /// Integer code used in delimited exports.
    pub fn code(&self) -> i32 {
        match self {
            VrepStatus::Representable => 0,
            VrepStatus::NotRepresentable => 1,
            VrepStatus::BoundaryExcluded => 2,
            VrepStatus::BoundaryTouchpoint => 3,
        }
    }
}

/// Verdict for one point: the status and the raw pure-ensemble gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VrepVerdict {
    pub status: VrepStatus,
    pub gap: f64,
}

/// Classifies one interior point by comparing the pure and ensemble
/// functional values; points within the boundary band are classified by the
/// exchange-force prefactor instead (nonzero prefactor excludes the point,
/// a vanishing prefactor marks a touch point).
pub fn classify_point(
    kind_pure: FunctionalKind,
    kind_ens: FunctionalKind,
    w: &InteractionParams,
    r: &RealRdm,
    gap_tol: f64,
    opts: &SearchOptions,
) -> Result<VrepVerdict> {
    if !r.in_disk() {
        return Err(DimerError::OutsideDisk {
            g11: r.g11,
            g12: r.g12,
        });
    }
    let bd = r.boundary_distance();
    if bd < tol::BOUNDARY_BAND {
        let polar = polar_from_cartesian(r)?;
        let c = analytic::force_prefactor(w, polar.phi);
        let status = if c > tol::FORCE_ZERO_TOL {
            VrepStatus::BoundaryExcluded
        } else {
            VrepStatus::BoundaryTouchpoint
        };
        return Ok(VrepVerdict { status, gap: 0.0 });
    }
    let rdm: Rdm = (*r).into();
    let fp = analytic::evaluate(kind_pure, w, &rdm, opts)?;
    let fe = analytic::evaluate(kind_ens, w, &rdm, opts)?;
    let gap = fp - fe;
    let status = if gap > gap_tol * fe.abs().max(1.0) {
        VrepStatus::NotRepresentable
    } else {
        VrepStatus::Representable
    };
    Ok(VrepVerdict { status, gap })
}

/// Classification field over the disk. The pure values come from closed
/// forms where available and the constrained search otherwise; the ensemble
/// values come from the closed piecewise form on-site and from the discrete
/// lower convex envelope of the pure field for generic interactions, which
/// is exact at nodes where the pure functional already equals its envelope.
pub fn vrep_map(
    kind_pure: FunctionalKind,
    kind_ens: FunctionalKind,
    w: &InteractionParams,
    resolution: usize,
    opts: &SearchOptions,
) -> Result<GridField<VrepVerdict>> {
    let _ = kind_ens;
    if resolution < 101 {
        return Err(DimerError::InvalidOptions(
            "vrep map resolution must be >= 101".into(),
        ));
    }
    let pure_field = match kind_pure {
        FunctionalKind::FrPure => search::sample_with_boundary(resolution, |x, y| {
            analytic::f_r_pure_general_cartesian(w, &RealRdm { g11: x, g12: y })
                .unwrap_or(f64::INFINITY)
        })?,
        _ => search::sample_with_boundary(resolution, |x, y| {
            let rdm: Rdm = RealRdm { g11: x, g12: y }.into();
            analytic::evaluate(kind_pure, w, &rdm, opts).unwrap_or(f64::INFINITY)
        })?,
    };
    let ens_field = if w.is_on_site() {
        GridField::from_fn(resolution, |x, y| {
            analytic::f_c_pure_onsite(w.u, &RealRdm { g11: x, g12: y }).unwrap_or(f64::INFINITY)
        })?
    } else {
        // the ensemble functional is the envelope of the real-pure one for
        // every ensemble kind over the real variable
        let fr_field = if matches!(kind_pure, FunctionalKind::FrPure) {
            pure_field.clone()
        } else {
            search::sample_with_boundary(resolution, |x, y| {
                analytic::f_r_pure_general_cartesian(w, &RealRdm { g11: x, g12: y })
                    .unwrap_or(f64::INFINITY)
            })?
        };
        search::lower_convex_envelope(&fr_field)?
    };

    let res = resolution;
    let verdicts: Vec<Vec<Option<VrepVerdict>>> = (0..res)
        .into_par_iter()
        .map(|i| {
            (0..res)
                .map(|j| {
                    let fp = pure_field.get(i, j)?;
                    let fe = ens_field.get(i, j)?;
                    let h = 1.0 / (res - 1) as f64;
                    let r = RealRdm {
                        g11: i as f64 * h,
                        g12: -0.5 + j as f64 * h,
                    };
                    let bd = r.boundary_distance();
                    if bd < tol::BOUNDARY_BAND {
                        let phi = polar_from_cartesian(&r).ok()?.phi;
                        let c = analytic::force_prefactor(w, phi);
                        let status = if c > tol::FORCE_ZERO_TOL {
                            VrepStatus::BoundaryExcluded
                        } else {
                            VrepStatus::BoundaryTouchpoint
                        };
                        return Some(VrepVerdict { status, gap: 0.0 });
                    }
                    let gap = fp - fe;
                    let status = if gap > tol::VERDICT_GAP_TOL * fe.abs().max(1.0) {
                        VrepStatus::NotRepresentable
                    } else {
                        VrepStatus::Representable
                    };
                    Some(VrepVerdict { status, gap })
                })
                .collect()
        })
        .collect();
    GridField::from_rows(res, verdicts)
}

/// Number of 4-connected components of not-representable nodes.
pub fn region_count(map: &GridField<VrepVerdict>) -> usize {
    let res = map.resolution();
    let not_rep = |i: usize, j: usize| {
        map.get(i, j)
            .map(|v| v.status == VrepStatus::NotRepresentable)
            .unwrap_or(false)
    };
    let mut seen = vec![false; res * res];
    let mut count = 0;
    for i in 0..res {
        for j in 0..res {
            if seen[i * res + j] || !not_rep(i, j) {
                continue;
            }
            count += 1;
            let mut stack = vec![(i, j)];
            while let Some((a, b)) = stack.pop() {
                if seen[a * res + b] || !not_rep(a, b) {
                    continue;
                }
                seen[a * res + b] = true;
                if a + 1 < res {
                    stack.push((a + 1, b));
                }
                if a > 0 {
                    stack.push((a - 1, b));
                }
                if b + 1 < res {
                    stack.push((a, b + 1));
                }
                if b > 0 {
                    stack.push((a, b - 1));
                }
            }
        }
    }
    count
}

/// One row of a ground-state sweep.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SweepSample {
    pub t: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub g11: f64,
    pub g12: f64,
    pub energy: f64,
    pub degeneracy: usize,
}

/// Maps Hamiltonians to ground-state 1RDMs over a scope of real
/// one-particle parts: hopping log-spaced over `t_range` with both signs,
/// potential asymmetry linear over `eps_range`. Degenerate ground spaces
/// contribute one row per ground state. The grid is rounded up so at least
/// `samples` Hamiltonians are diagonalized.
pub fn ground_state_sweep(
    w: &InteractionParams,
    t_range: (f64, f64),
    eps_range: (f64, f64),
    samples: usize,
) -> Result<Vec<SweepSample>> {
    if samples < 1000 {
        return Err(DimerError::InvalidOptions(
            "sweep needs at least 1000 samples".into(),
        ));
    }
    if !(t_range.0 > 0.0 && t_range.1 > t_range.0) {
        return Err(DimerError::InvalidOptions(
            "t range must satisfy 0 < lo < hi (log spacing, both signs used)".into(),
        ));
    }
    // allocation ratio tuned so the attained set covers the representable
    // region about uniformly
    let nt = ((samples as f64 / 2.0 * 0.72).sqrt().round() as usize).max(8);
    let mut ne = (samples.div_ceil(2 * nt)).max(9);
    if ne % 2 == 0 {
        ne += 1; // odd count keeps the symmetric-dimer column in the grid
    }
    let log_lo = t_range.0.ln();
    let log_hi = t_range.1.ln();
    let rows: Vec<SweepSample> = (0..nt)
        .into_par_iter()
        .flat_map_iter(|it| {
            let tmag = (log_lo + (log_hi - log_lo) * it as f64 / (nt - 1) as f64).exp();
            [tmag, -tmag].into_iter().flat_map(move |t| {
                (0..ne).flat_map(move |ie| {
                    let de = eps_range.0 + (eps_range.1 - eps_range.0) * ie as f64 / (ne - 1) as f64;
                    let p = OneBodyParams {
                        t,
                        eps1: de,
                        eps2: 0.0,
                    };
                    let gs = ground_state(&p, w);
                    let deg = gs.degeneracy;
                    let energy = gs.energy;
                    gs.states.into_iter().map(move |s| {
                        let r = rdm_from_state(&s);
                        SweepSample {
                            t,
                            eps1: de,
                            eps2: 0.0,
                            g11: r.g11,
                            g12: r.g12.re,
                            energy,
                            degeneracy: deg,
                        }
                    })
                })
            })
        })
        .collect();
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyBranch {
    /// Degenerate pair built on the site-2 double occupation (`g11 <= 1/2`).
    Left,
    /// Degenerate pair built on the site-1 double occupation (`g11 >= 1/2`).
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilySign {
    Plus,
    Minus,
}

/// Superposition family of the two degenerate ground states at the located
/// degeneracy: `x` times the doubly occupied state plus
/// `sqrt(1-|x|^2)` times the singly occupied singlet. With a real `x` the
/// 1RDM traces the ellipse; a complex phase moves its real part strictly
/// inside.
pub fn degenerate_family(
    x_modulus: f64,
    x_phase: f64,
    sign: FamilySign,
    branch: FamilyBranch,
) -> Result<(SingletState, Rdm)> {
    if !(0.0..=1.0).contains(&x_modulus) {
        return Err(DimerError::InvalidArgument(format!(
            "family modulus |x| = {x_modulus} outside [0, 1]"
        )));
    }
    let x = Complex64::from_polar(x_modulus, x_phase);
    let c = (1.0 - x_modulus * x_modulus).max(0.0).sqrt();
    let c = match sign {
        FamilySign::Plus => c,
        FamilySign::Minus => -c,
    };
    let zero = Complex64::new(0.0, 0.0);
    let cc = Complex64::new(c, 0.0);
    let state = match branch {
        FamilyBranch::Left => SingletState::new(zero, x, cc)?,
        FamilyBranch::Right => SingletState::new(x, zero, cc)?,
    };
    let rdm = rdm_from_state(&state);
    Ok((state, rdm))
}

/// Locates the one-particle parameters where the two lowest singlet levels
/// cross on the zero-hopping line, by scanning the potential asymmetry and
/// refining the gap minimum. Requires repulsive on-site coupling.
pub fn locate_degenerate_h(u: f64, branch: FamilyBranch) -> Result<OneBodyParams> {
    if u <= 0.0 {
        return Err(DimerError::InvalidArgument(
            "degeneracy construction requires repulsive on-site coupling".into(),
        ));
    }
    let w = InteractionParams::on_site(u);
    let gap_at = |de: f64| -> f64 {
        let p = OneBodyParams {
            t: 0.0,
            eps1: de,
            eps2: 0.0,
        };
        let h = crate::model::build_hamiltonian(&p, &w);
        let eig = nalgebra::SymmetricEigen::new(h);
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev[1] - ev[0]
    };
    let hi = 3.0 * u.max(1.0);
    let n = 2001;
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..n {
        let de = hi * k as f64 / (n - 1) as f64;
        let g = gap_at(de);
        if g < best.0 {
            best = (g, de);
        }
    }
    let step = hi / (n - 1) as f64;
    let (mut lo, mut hi) = (best.1 - step, best.1 + step);
    for _ in 0..80 {
        let m1 = lo + 0.381_966 * (hi - lo);
        let m2 = hi - 0.381_966 * (hi - lo);
        if gap_at(m1) < gap_at(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let de = 0.5 * (lo + hi);
    Ok(match branch {
        FamilyBranch::Left => OneBodyParams {
            t: 0.0,
            eps1: de,
            eps2: 0.0,
        },
        FamilyBranch::Right => OneBodyParams {
            t: 0.0,
            eps1: 0.0,
            eps2: de,
        },
    })
}

/// Power-law fit of the radial derivative of the real-pure functional.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ForceFit {
    pub prefactor: f64,
    pub exponent: f64,
    pub residual: f64,
    pub phi: f64,
}

impl ForceFit {
    /// Whether the fit itself is trustworthy (finite, small residual).
    pub fn reliable(&self) -> bool {
        self.residual.is_finite() && self.residual < 1e-2
    }
}

/// Central-difference radial derivative of the real-pure functional along a
/// fixed angle, fitted as `log|dF/dR| = log C + e log R` by weighted least
/// squares with weights `R^-2`, which anchors the fit at the asymptotic end
/// of the window. A derivative that vanishes over the whole window yields a
/// zero prefactor and an undefined (NaN) exponent.
pub fn force_fit(
    w: &InteractionParams,
    phi: f64,
    r_min: f64,
    r_max: f64,
    points: usize,
) -> Result<ForceFit> {
    if !(r_min > 0.0 && r_min < r_max && r_max <= 0.05) {
        return Err(DimerError::InvalidOptions(
            "force fit window must satisfy 0 < r_min < r_max <= 0.05".into(),
        ));
    }
    if points < 8 {
        return Err(DimerError::InvalidOptions(
            "force fit needs at least 8 points".into(),
        ));
    }
    let mut rs = Vec::with_capacity(points);
    for k in 0..points {
        let f = k as f64 / (points - 1) as f64;
        rs.push((r_min.ln() + (r_max.ln() - r_min.ln()) * f).exp());
    }
    let df: Vec<f64> = rs
        .iter()
        .map(|&r| {
            let h = r * 1e-3;
            let fp = analytic::f_r_pure_general(w, &PolarRdm { r: r + h, phi }).unwrap_or(f64::NAN);
            let fm = analytic::f_r_pure_general(w, &PolarRdm { r: r - h, phi }).unwrap_or(f64::NAN);
            (fp - fm) / (2.0 * h)
        })
        .collect();
    if df.iter().map(|d| d.abs()).fold(0.0, f64::max) < 1e-9 {
        return Ok(ForceFit {
            prefactor: 0.0,
            exponent: f64::NAN,
            residual: 0.0,
            phi,
        });
    }
    let xs: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = df.iter().map(|d| d.abs().max(1e-300).ln()).collect();
    let mut wsum = 0.0;
    let weights: Vec<f64> = rs.iter().map(|r| r.powi(-2)).collect();
    for w in &weights {
        wsum += w;
    }
    let xm: f64 = xs.iter().zip(&weights).map(|(x, w)| x * w).sum::<f64>() / wsum;
    let ym: f64 = ys.iter().zip(&weights).map(|(y, w)| y * w).sum::<f64>() / wsum;
    let mut num = 0.0;
    let mut den = 0.0;
    for ((x, y), w) in xs.iter().zip(&ys).zip(&weights) {
        num += w * (x - xm) * (y - ym);
        den += w * (x - xm) * (x - xm);
    }
    let slope = num / den;
    let intercept = ym - slope * xm;
    let mut residual = 0.0;
    for ((x, y), w) in xs.iter().zip(&ys).zip(&weights) {
        residual += w * (y - (slope * x + intercept)).powi(2);
    }
    residual = (residual / wsum).sqrt();
    Ok(ForceFit {
        prefactor: intercept.exp(),
        exponent: slope,
        residual,
        phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rr(g11: f64, g12: f64) -> RealRdm {
        RealRdm { g11, g12 }
    }

    fn opts() -> SearchOptions {
        SearchOptions::default()
    }

    #[test]
    fn classify_witness_points() {
        let w = InteractionParams::on_site(1.0);
        // inside the left ellipse: not representable for the real-pure pair
        let v = classify_point(
            FunctionalKind::FrPure,
            FunctionalKind::FrEns,
            &w,
            &rr(0.25, 0.25),
            tol::VERDICT_GAP_TOL,
            &opts(),
        )
        .unwrap();
        assert_eq!(v.status, VrepStatus::NotRepresentable);
        assert!(v.gap > 0.05);
        // same point, complex-pure pair: representable
        let v = classify_point(
            FunctionalKind::FcPure,
            FunctionalKind::FcEns,
            &w,
            &rr(0.25, 0.25),
            tol::VERDICT_GAP_TOL,
            &opts(),
        )
        .unwrap();
        assert_eq!(v.status, VrepStatus::Representable);
        // outside both ellipses (between them): representable either way
        let v = classify_point(
            FunctionalKind::FrPure,
            FunctionalKind::FrEns,
            &w,
            &rr(0.5, 0.25),
            tol::VERDICT_GAP_TOL,
            &opts(),
        )
        .unwrap();
        assert_eq!(v.status, VrepStatus::Representable);
    }

    #[test]
    fn classify_boundary_points() {
        let w = InteractionParams::on_site(1.0);
        let v = classify_point(
            FunctionalKind::FrPure,
            FunctionalKind::FrEns,
            &w,
            &rr(1.0, 0.0),
            tol::VERDICT_GAP_TOL,
            &opts(),
        )
        .unwrap();
        assert_eq!(v.status, VrepStatus::BoundaryTouchpoint);
        let v = classify_point(
            FunctionalKind::FrPure,
            FunctionalKind::FrEns,
            &w,
            &rr(0.5, 0.5),
            tol::VERDICT_GAP_TOL,
            &opts(),
        )
        .unwrap();
        assert_eq!(v.status, VrepStatus::BoundaryExcluded);
    }

    #[test]
    fn map_on_site_regions() {
        let w = InteractionParams::on_site(1.0);
        let map = vrep_map(
            FunctionalKind::FrPure,
            FunctionalKind::FrEns,
            &w,
            101,
            &opts(),
        )
        .unwrap();
        assert_eq!(region_count(&map), 2);
        let map = vrep_map(
            FunctionalKind::FcPure,
            FunctionalKind::FcEns,
            &w,
            101,
            &opts(),
        )
        .unwrap();
        assert_eq!(region_count(&map), 0);
    }

    #[test]
    fn degenerate_family_reference_points() {
        // |x| = 1: the doubly occupied basis state, gamma = (0, 0)
        let (s, r) = degenerate_family(1.0, 0.0, FamilySign::Plus, FamilyBranch::Left).unwrap();
        assert_relative_eq!(s.b.norm(), 1.0);
        assert_relative_eq!(r.g11, 0.0);
        assert_relative_eq!(r.g12.norm(), 0.0);

        // |x| = 1/sqrt2, phase 0, plus sign
        let (_, r) =
            degenerate_family(1.0 / 2f64.sqrt(), 0.0, FamilySign::Plus, FamilyBranch::Left)
                .unwrap();
        assert_relative_eq!(r.g11, 0.25, epsilon = 1e-12);
        assert_relative_eq!(r.g12.re, 1.0 / (2.0 * 2f64.sqrt()), epsilon = 1e-12);

        assert!(degenerate_family(1.2, 0.0, FamilySign::Plus, FamilyBranch::Left).is_err());
    }

    #[test]
    fn degenerate_family_traces_curve_and_interior() {
        // real members lie on the curve; a quarter phase moves the real
        // part strictly inside
        for k in 0..=64 {
            let m = k as f64 / 64.0;
            for branch in [FamilyBranch::Left, FamilyBranch::Right] {
                let (_, r) = degenerate_family(m, 0.0, FamilySign::Plus, branch).unwrap();
                let form = analytic::onsite_curve_form(&r.real_part());
                assert!((form - 0.25).abs() < 1e-10, "|x|={m} {branch:?}: {form}");
            }
        }
        let (_, r) = degenerate_family(
            0.7,
            std::f64::consts::FRAC_PI_2,
            FamilySign::Plus,
            FamilyBranch::Left,
        )
        .unwrap();
        assert!(analytic::onsite_curve_form(&r.real_part()) < 0.25 - 1e-3);
    }

    #[test]
    fn degenerate_h_location() {
        let p = locate_degenerate_h(1.0, FamilyBranch::Left).unwrap();
        assert_relative_eq!(p.eps1 - p.eps2, 1.0, epsilon = 1e-9);
        assert_eq!(p.t, 0.0);
        // all family members share the energy expectation at that h
        let w = InteractionParams::on_site(1.0);
        let h = crate::model::build_hamiltonian(&p, &w);
        let mut values = Vec::new();
        for k in 0..8 {
            let (s, _) = degenerate_family(
                k as f64 / 7.0,
                0.3 * k as f64,
                FamilySign::Plus,
                FamilyBranch::Left,
            )
            .unwrap();
            let v = s.coeffs();
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..3 {
                for j in 0..3 {
                    acc += v[i].conj() * h[(i, j)] * v[j];
                }
            }
            values.push(acc.re);
        }
        for v in &values {
            assert!((v - values[0]).abs() < 1e-10);
        }
    }

    #[test]
    fn sweep_noninteracting_reaches_boundary() {
        let w = InteractionParams::on_site(0.0);
        let rows = ground_state_sweep(&w, (1e-2, 10.0), (-4.0, 4.0), 1000).unwrap();
        assert!(rows.len() >= 900);
        // noninteracting ground states are single Slater configurations:
        // idempotent per-spin blocks on the disk boundary
        let on_boundary = rows
            .iter()
            .filter(|s| {
                let r = rr(s.g11, s.g12);
                r.boundary_distance().abs() < 1e-9
            })
            .count();
        assert_eq!(on_boundary, rows.len());
    }

    #[test]
    fn sweep_respects_ellipse_exclusion() {
        let w = InteractionParams::on_site(1.0);
        let rows = ground_state_sweep(&w, (1e-3, 100.0), (-5.0, 5.0), 2000).unwrap();
        for s in &rows {
            let form = analytic::onsite_curve_form(&rr(s.g11, s.g12));
            assert!(
                form >= 0.25 - 1e-9,
                "attained point ({}, {}) inside the excluded region",
                s.g11,
                s.g12
            );
        }
    }

    #[test]
    fn force_fit_reference_angles() {
        let w = InteractionParams::on_site(1.0);
        let fit = force_fit(&w, std::f64::consts::FRAC_PI_2, 1e-4, 1e-2, 16).unwrap();
        assert!((fit.exponent + 0.5).abs() < 0.02, "exponent {}", fit.exponent);
        assert!(
            (fit.prefactor - 0.5).abs() / 0.5 < 0.01,
            "prefactor {}",
            fit.prefactor
        );
        assert!(fit.reliable());

        // vanishing-angle case: no divergence at all
        let w = InteractionParams::new(1.0, -1.0, 0.0).unwrap();
        let fit = force_fit(&w, std::f64::consts::FRAC_PI_2, 1e-4, 1e-2, 16).unwrap();
        assert!(fit.prefactor < 1e-6);

        // phi = 0 probes the pair-transfer coupling alone
        let w = InteractionParams::new(1.0, -0.5, 0.0).unwrap();
        let fit = force_fit(&w, 0.0, 1e-4, 1e-2, 16).unwrap();
        assert!((fit.prefactor - 0.5).abs() / 0.5 < 0.01);

        assert!(force_fit(&w, 0.0, 1e-4, 0.2, 16).is_err());
        assert!(force_fit(&w, 0.0, 1e-4, 1e-2, 4).is_err());
    }
}
