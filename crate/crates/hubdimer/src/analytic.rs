//! Closed-form evaluation of the universal functionals and of the derived
//! geometry: candidate minimizer branches, non-representable ellipses, the
//! exchange-force prefactor with its vanishing angles, and the
//! finite-difference Hessian determinant.

use serde::{Deserialize, Serialize};

use crate::error::{DimerError, Result};
use crate::model::{
    polar_from_cartesian, InteractionParams, PolarRdm, RealRdm, Rdm, SQRT2,
};
use crate::search::{self, SearchOptions};
use crate::tol;

/// The six universal functionals: real/complex constrained search, pure or
/// ensemble, over the reduced variable `gamma` or the full complex `gamma~`
/// (the `Fct*` kinds).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FunctionalKind {
    FrPure,
    FrEns,
    FcPure,
    FcEns,
    FctPure,
    FctEns,
}

impl FunctionalKind {
    pub const ALL: [FunctionalKind; 6] = [
        FunctionalKind::FrPure,
        FunctionalKind::FrEns,
        FunctionalKind::FcPure,
        FunctionalKind::FcEns,
        FunctionalKind::FctPure,
        FunctionalKind::FctEns,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FunctionalKind::FrPure => "fr-pure",
            FunctionalKind::FrEns => "fr-ens",
            FunctionalKind::FcPure => "fc-pure",
            FunctionalKind::FcEns => "fc-ens",
            FunctionalKind::FctPure => "fct-pure",
            FunctionalKind::FctEns => "fct-ens",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| DimerError::InvalidArgument(format!("unknown functional kind `{s}`")))
    }

    /// Whether the constrained search behind this kind is over pure states.
    pub fn is_pure(&self) -> bool {
        matches!(
            self,
            FunctionalKind::FrPure | FunctionalKind::FcPure | FunctionalKind::FctPure
        )
    }

    /// Whether the kind takes the full complex 1RDM as its variable.
    pub fn takes_complex_variable(&self) -> bool {
        matches!(self, FunctionalKind::FctPure | FunctionalKind::FctEns)
    }
}

impl std::fmt::Display for FunctionalKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn check_in_disk(r: &RealRdm) -> Result<()> {
    if !r.in_disk() {
        return Err(DimerError::OutsideDisk {
            g11: r.g11,
            g12: r.g12,
        });
    }
    Ok(())
}

/// Value of every functional at the disk center, where the constrained
/// search minimum over the two feasible state families is `min(0, U - |V|)`.
fn center_value(w: &InteractionParams) -> f64 {
    (w.u - w.v.abs()).min(0.0)
}

/// Pure functional of the on-site dimer over real states, with the
/// sign-of-coupling branch. Lower semi-continuous value at the disk center.
pub fn f_r_pure_onsite(u: f64, r: &RealRdm) -> Result<f64> {
    check_in_disk(r)?;
    let x = r.g11 - 0.5;
    let y = r.g12;
    let q = x * x + y * y;
    if q < tol::CENTER_EPS * tol::CENTER_EPS {
        return Ok(u.min(0.0));
    }
    let root = (1.0 - 4.0 * q).max(0.0).sqrt();
    let sgn = if u >= 0.0 { 1.0 } else { -1.0 };
    Ok(u * (x * x + 0.5 * y * y * (1.0 - sgn * root)) / q)
}

/// Phase-invariant pure functional over complex states for the on-site
/// dimer; depends on `g12` only through its modulus.
pub fn f_ctilde_pure_onsite(u: f64, r: &Rdm) -> Result<f64> {
    f_r_pure_onsite(
        u,
        &RealRdm {
            g11: r.g11,
            g12: r.g12.norm(),
        },
    )
}

/// Piecewise form of the complex-pure (equivalently real-ensemble)
/// functional for the on-site dimer. The two linear branches are the flat
/// facets of the lower convex envelope; for attractive coupling the pure
/// functional is already convex and is returned unchanged.
pub fn f_c_pure_onsite(u: f64, r: &RealRdm) -> Result<f64> {
    check_in_disk(r)?;
    if u >= 0.0 {
        let y2 = r.g12 * r.g12;
        if y2 <= r.g11 * (1.0 - 2.0 * r.g11) {
            return Ok(u * (1.0 - 2.0 * r.g11));
        }
        if y2 <= r.g11 * (3.0 - 2.0 * r.g11) - 1.0 {
            return Ok(u * (2.0 * r.g11 - 1.0));
        }
    }
    f_r_pure_onsite(u, r)
}

/// Real-pure functional for the generic reflection-symmetric interaction,
/// in polar coordinates:
/// `U + sqrt2 X (1-2R) sin(phi) + (V-U) sin^2(phi)/2
///  - sqrt(1-(1-2R)^2) |(V-U) sin^2(phi) - 2V| / 2`.
pub fn f_r_pure_general(w: &InteractionParams, p: &PolarRdm) -> Result<f64> {
    if !(0.0..=0.5 + tol::DISK_TOL).contains(&p.r) {
        return Err(DimerError::InvalidPolarRadius(p.r));
    }
    let rho = 1.0 - 2.0 * p.r.min(0.5);
    let s = p.phi.sin();
    let s2 = s * s;
    let kink = (w.v - w.u) * s2 - 2.0 * w.v;
    Ok(w.u + SQRT2 * w.x * rho * s + 0.5 * (w.v - w.u) * s2
        - 0.5 * (1.0 - rho * rho).max(0.0).sqrt() * kink.abs())
}

/// Cartesian closed form of [`f_r_pure_general`]. At the disk center the
/// polar angle is undefined and the infimum of the radial limit over all
/// angles is returned, which evaluates to `min(0, U - |V|)`.
pub fn f_r_pure_general_cartesian(w: &InteractionParams, r: &RealRdm) -> Result<f64> {
    check_in_disk(r)?;
    let x = r.g11 - 0.5;
    let y = r.g12;
    let q = x * x + y * y;
    if q < tol::CENTER_EPS * tol::CENTER_EPS {
        return Ok(center_value(w));
    }
    let root = (0.25 - q).max(0.0).sqrt();
    let kink = y * y * (w.v - w.u) / q - 2.0 * w.v;
    Ok(w.u + 2.0 * SQRT2 * w.x * y + 0.5 * (w.v - w.u) * y * y / q - root * kink.abs())
}

/// The two candidate squared coefficients of the doubly-occupied-free basis
/// state that solve the constrained-search elimination. Selecting `c2_plus`
/// minimizes the on-site interaction for repulsive coupling, `c2_minus` for
/// attractive coupling.
pub fn c2_candidates(r: &RealRdm) -> Result<(f64, f64)> {
    check_in_disk(r)?;
    let x = r.g11 - 0.5;
    let y = r.g12;
    let q = x * x + y * y;
    if q < tol::CENTER_EPS * tol::CENTER_EPS {
        return Err(DimerError::CenterUndefined);
    }
    let disc = (0.25 - q).max(0.0).sqrt();
    let plus = (y * y * (0.5 + disc) / q).clamp(0.0, 1.0);
    let minus = (y * y * (0.5 - disc) / q).clamp(0.0, 1.0);
    Ok((plus, minus))
}

/// Which coordinate the two branches of an ellipse pair are offset along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitAxis {
    G11,
    G12,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EllipseBranch {
    Left,
    Right,
    Upper,
    Lower,
}

/// Axis-aligned ellipse bounding one branch of the non-representable set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseSpec {
    pub center: RealRdm,
    pub semi_g11: f64,
    pub semi_g12: f64,
    pub branch: EllipseBranch,
    pub split_axis: SplitAxis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Inside,
    On,
    Outside,
}

impl EllipseSpec {
    /// Normalized quadratic form minus one; zero on the curve, negative
    /// inside.
    pub fn normalized_form(&self, r: &RealRdm) -> f64 {
        let dx = (r.g11 - self.center.g11) / self.semi_g11;
        let dy = (r.g12 - self.center.g12) / self.semi_g12;
        dx * dx + dy * dy - 1.0
    }

    pub fn membership(&self, r: &RealRdm, tolerance: f64) -> Membership {
        let f = self.normalized_form(r);
        if f.abs() <= tolerance {
            Membership::On
        } else if f < 0.0 {
            Membership::Inside
        } else {
            Membership::Outside
        }
    }

    /// Point on the curve at parameter angle `theta`.
    pub fn point(&self, theta: f64) -> RealRdm {
        RealRdm {
            g11: self.center.g11 + self.semi_g11 * theta.cos(),
            g12: self.center.g12 + self.semi_g12 * theta.sin(),
        }
    }
}

/// The pair of ellipses bounding the non-representable set of the repulsive
/// on-site real-pure functional: `2 g12^2 + (2|g11-1/2| - 1/2)^2 = 1/4`.
/// Empty for `U = 0`.
pub fn ellipse_onsite(u: f64) -> Vec<EllipseSpec> {
    if u == 0.0 {
        return Vec::new();
    }
    let ax = 0.25;
    let ay = 1.0 / (2.0 * SQRT2);
    vec![
        EllipseSpec {
            center: RealRdm { g11: 0.25, g12: 0.0 },
            semi_g11: ax,
            semi_g12: ay,
            branch: EllipseBranch::Left,
            split_axis: SplitAxis::G11,
        },
        EllipseSpec {
            center: RealRdm { g11: 0.75, g12: 0.0 },
            semi_g11: ax,
            semi_g12: ay,
            branch: EllipseBranch::Right,
            split_axis: SplitAxis::G11,
        },
    ]
}

/// Quadratic form of the on-site curve, `2 g12^2 + (2|g11-1/2| - 1/2)^2`;
/// equal to 1/4 on the curve.
pub fn onsite_curve_form(r: &RealRdm) -> f64 {
    2.0 * r.g12 * r.g12 + (2.0 * (r.g11 - 0.5).abs() - 0.5).powi(2)
}

/// Membership of a point relative to the on-site curve, with tolerance on
/// the quadratic form.
pub fn onsite_membership(r: &RealRdm, tolerance: f64) -> Membership {
    let f = onsite_curve_form(r) - 0.25;
    if f.abs() <= tolerance {
        Membership::On
    } else if f < 0.0 {
        Membership::Inside
    } else {
        Membership::Outside
    }
}

/// Analytic ellipses for general `(U, V)` with `X = 0`.
///
/// For `U > V` the two branches split along `g11` with
/// `g12^2/(2(1-V/U)) + (|g11-1/2| - c)^2/(1-(V/U)^2) = 1/16`,
/// `c = sqrt(1-(V/U)^2)/4`. For `U < V` they split along `g12` with
/// center `y0 = sqrt(8(1-U/V))/(4(3-U/V))`, semi-axes `y0` and
/// `sqrt((1-U/V)/(3-U/V))/2`. Interactions outside these regimes have no
/// analytic form here and classification falls back to numerics.
pub fn ellipses_general(w: &InteractionParams) -> Result<Vec<EllipseSpec>> {
    if w.x != 0.0 {
        return Err(DimerError::UnsupportedAnalytic(format!(
            "X = {} != 0",
            w.x
        )));
    }
    if w.u == w.v {
        return Err(DimerError::UnsupportedAnalytic("U = V".into()));
    }
    if w.u > w.v {
        if w.u <= 0.0 || w.v <= -w.u {
            return Err(DimerError::UnsupportedAnalytic(format!(
                "U > V branch needs U > 0 and |V| < U, got U={}, V={}",
                w.u, w.v
            )));
        }
        let ratio = w.v / w.u;
        let cx = 0.25 * (1.0 - ratio * ratio).sqrt();
        let ax = cx;
        let ay = 0.25 * (2.0 * (1.0 - ratio)).sqrt();
        Ok(vec![
            EllipseSpec {
                center: RealRdm { g11: 0.5 - cx, g12: 0.0 },
                semi_g11: ax,
                semi_g12: ay,
                branch: EllipseBranch::Left,
                split_axis: SplitAxis::G11,
            },
            EllipseSpec {
                center: RealRdm { g11: 0.5 + cx, g12: 0.0 },
                semi_g11: ax,
                semi_g12: ay,
                branch: EllipseBranch::Right,
                split_axis: SplitAxis::G11,
            },
        ])
    } else {
        if w.v <= 0.0 {
            return Err(DimerError::UnsupportedAnalytic(format!(
                "U < V branch needs V > 0, got V={}",
                w.v
            )));
        }
        let ratio = w.u / w.v;
        let y0 = (8.0 * (1.0 - ratio)).sqrt() / (4.0 * (3.0 - ratio));
        let ay = y0;
        let ax = 0.5 * ((1.0 - ratio) / (3.0 - ratio)).sqrt();
        Ok(vec![
            EllipseSpec {
                center: RealRdm { g11: 0.5, g12: y0 },
                semi_g11: ax,
                semi_g12: ay,
                branch: EllipseBranch::Upper,
                split_axis: SplitAxis::G12,
            },
            EllipseSpec {
                center: RealRdm { g11: 0.5, g12: -y0 },
                semi_g11: ax,
                semi_g12: ay,
                branch: EllipseBranch::Lower,
                split_axis: SplitAxis::G12,
            },
        ])
    }
}

/// Coefficient of the repulsive `-C/sqrt(R)` divergence of the radial
/// derivative at the boundary: `C = |sin^2(phi)(V-U) - 2V| / 2`.
pub fn force_prefactor(w: &InteractionParams, phi: f64) -> f64 {
    let s2 = phi.sin().powi(2);
    0.5 * (s2 * (w.v - w.u) - 2.0 * w.v).abs()
}

/// Angles where the exchange-force prefactor vanishes.
#[derive(Debug, Clone, PartialEq)]
pub enum VanishingAngles {
    /// The prefactor vanishes identically (only for `W = 0` up to the
    /// `Phi3` projector shift).
    AllAngles,
    /// Finite set of angles in `[0, 2pi)`, possibly empty.
    Angles(Vec<f64>),
}

impl VanishingAngles {
    pub fn as_slice(&self) -> &[f64] {
        match self {
            VanishingAngles::AllAngles => &[],
            VanishingAngles::Angles(v) => v,
        }
    }
}

/// Solves `sin^2(phi)(V-U) = 2V` on `[0, 2pi)`. Empty when `2V/(V-U)` lies
/// outside `[0, 1]`; the degenerate case `V = U` has a constant prefactor
/// `|V|` and yields no angles unless `V = 0`, where every angle qualifies.
pub fn vanishing_angles(w: &InteractionParams) -> VanishingAngles {
    use std::f64::consts::{PI, TAU};
    if w.v == w.u {
        if w.v == 0.0 {
            return VanishingAngles::AllAngles;
        }
        return VanishingAngles::Angles(Vec::new());
    }
    let s2 = 2.0 * w.v / (w.v - w.u);
    if !(0.0..=1.0).contains(&s2) {
        return VanishingAngles::Angles(Vec::new());
    }
    let phi0 = s2.sqrt().asin();
    let mut angles: Vec<f64> = [phi0, PI - phi0, PI + phi0, TAU - phi0]
        .iter()
        .map(|&a| a.rem_euclid(TAU))
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    angles.dedup_by(|a, b| (*a - *b).abs() < tol::ANGLE_DEDUP_TOL);
    // 2pi duplicates of 0
    if angles.len() > 1 && (TAU - angles[angles.len() - 1]).abs() < tol::ANGLE_DEDUP_TOL
        && angles[0].abs() < tol::ANGLE_DEDUP_TOL
    {
        angles.pop();
    }
    VanishingAngles::Angles(angles)
}

/// Determinant of the Hessian of the real-pure functional in the shifted
/// coordinates `(g11 - 1/2, g12)`, by central differences with step `1e-5`
/// and one Richardson refinement. Sign changes trace the ellipse curves.
///
/// Rejected near the boundary (the `1/sqrt(R)` divergence), on the
/// coordinate axes and inside a `1e-4` tube around the absolute-value kink
/// locus, where differencing is meaningless.
pub fn hessian_det_f_r(w: &InteractionParams, r: &RealRdm) -> Result<f64> {
    check_in_disk(r)?;
    let bd = r.boundary_distance();
    if bd < tol::HESSIAN_MIN_R {
        return Err(DimerError::TooCloseToBoundary {
            r: bd,
            min_r: tol::HESSIAN_MIN_R,
        });
    }
    let x = r.g11 - 0.5;
    let y = r.g12;
    let h = tol::HESSIAN_STEP;
    if x.abs() < 2.0 * h || y.abs() < 2.0 * h {
        return Err(DimerError::HessianExcluded("coordinate axis"));
    }
    let polar = polar_from_cartesian(r)?;
    let kink = (w.v - w.u) * polar.phi.sin().powi(2) - 2.0 * w.v;
    if kink.abs() < tol::KINK_TUBE {
        return Err(DimerError::HessianExcluded("absolute-value kink locus"));
    }
    let f = |g11: f64, g12: f64| -> Result<f64> {
        f_r_pure_general_cartesian(w, &RealRdm { g11, g12 })
    };
    let det_at = |h: f64| -> Result<f64> {
        let f0 = f(r.g11, r.g12)?;
        let fxx = (f(r.g11 + h, r.g12)? - 2.0 * f0 + f(r.g11 - h, r.g12)?) / (h * h);
        let fyy = (f(r.g11, r.g12 + h)? - 2.0 * f0 + f(r.g11, r.g12 - h)?) / (h * h);
        let fxy = (f(r.g11 + h, r.g12 + h)? - f(r.g11 + h, r.g12 - h)?
            - f(r.g11 - h, r.g12 + h)?
            + f(r.g11 - h, r.g12 - h)?)
            / (4.0 * h * h);
        Ok(fxx * fyy - fxy * fxy)
    };
    let d1 = det_at(h)?;
    let d2 = det_at(0.5 * h)?;
    Ok((4.0 * d2 - d1) / 3.0)
}

/// Evaluates any of the six universal functionals at a (possibly complex)
/// 1RDM, routing to a closed form when one exists and to the numerical
/// constrained search otherwise. Kinds over the reduced real variable
/// reject inputs with a nonzero imaginary part.
pub fn evaluate(
    kind: FunctionalKind,
    w: &InteractionParams,
    rdm: &Rdm,
    opts: &SearchOptions,
) -> Result<f64> {
    let real = rdm.real_part();
    if !kind.takes_complex_variable() && !rdm.is_real() {
        return Err(DimerError::KindMismatch(
            kind.name(),
            "requires a real 1RDM (zero imaginary part)",
        ));
    }
    match kind {
        FunctionalKind::FrPure => f_r_pure_general_cartesian(w, &real),
        FunctionalKind::FctPure => {
            if w.is_on_site() {
                f_ctilde_pure_onsite(w.u, rdm)
            } else {
                search::min_pure_complex(w, rdm, opts)
            }
        }
        FunctionalKind::FcPure | FunctionalKind::FrEns | FunctionalKind::FcEns => {
            if w.is_on_site() {
                f_c_pure_onsite(w.u, &real)
            } else {
                search::min_ensemble(w, rdm, opts).map(|(v, _)| v)
            }
        }
        FunctionalKind::FctEns => {
            if w.is_on_site() {
                f_c_pure_onsite(
                    w.u,
                    &RealRdm {
                        g11: rdm.g11,
                        g12: rdm.g12.norm(),
                    },
                )
            } else {
                search::min_ensemble(w, rdm, opts).map(|(v, _)| v)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::cartesian_from_polar;
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn rr(g11: f64, g12: f64) -> RealRdm {
        RealRdm { g11, g12 }
    }

    #[test]
    fn f_r_onsite_reference_points() {
        assert_relative_eq!(f_r_pure_onsite(1.0, &rr(0.5, 0.0)).unwrap(), 0.0);
        assert_relative_eq!(f_r_pure_onsite(1.0, &rr(0.0, 0.0)).unwrap(), 1.0);
        assert_relative_eq!(f_r_pure_onsite(1.0, &rr(0.5, 0.5)).unwrap(), 0.5);
        // attractive coupling: the center value is attained by c = 0 states
        assert_relative_eq!(f_r_pure_onsite(-1.0, &rr(0.5, 0.0)).unwrap(), -1.0);
        assert!(f_r_pure_onsite(1.0, &rr(1.0, 0.5)).is_err());
    }

    #[test]
    fn f_ctilde_phase_invariance_points() {
        let v = f_ctilde_pure_onsite(
            1.0,
            &Rdm {
                g11: 0.5,
                g12: Complex64::new(0.0, 0.5),
            },
        )
        .unwrap();
        assert_relative_eq!(v, 0.5);
        let v = f_ctilde_pure_onsite(
            1.0,
            &Rdm {
                g11: 0.0,
                g12: Complex64::new(0.0, 0.0),
            },
        )
        .unwrap();
        assert_relative_eq!(v, 1.0);
    }

    #[test]
    fn f_c_onsite_branches() {
        // first branch: g12^2 = 0.01 <= g11(1-2 g11) = 0.08
        assert_relative_eq!(f_c_pure_onsite(1.0, &rr(0.4, 0.1)).unwrap(), 0.2);
        assert_relative_eq!(f_c_pure_onsite(1.0, &rr(0.5, 0.0)).unwrap(), 0.0);
        // outside both flat branches the pure value is returned
        let r = rr(0.5, 0.25);
        assert_relative_eq!(
            f_c_pure_onsite(1.0, &r).unwrap(),
            f_r_pure_onsite(1.0, &r).unwrap()
        );
    }

    #[test]
    fn f_r_general_boundary_points() {
        let w = InteractionParams::new(0.8, -0.4, 0.3).unwrap();
        // R=0, phi=0 is the doubly-occupied site-1 state with <W> = U
        let v = f_r_pure_general(&w, &PolarRdm { r: 0.0, phi: 0.0 }).unwrap();
        assert_relative_eq!(v, w.u, epsilon = 1e-14);
        // R=0, phi=pi/2: <W> = (U+V)/2 + sqrt2 X
        let v = f_r_pure_general(
            &w,
            &PolarRdm {
                r: 0.0,
                phi: std::f64::consts::FRAC_PI_2,
            },
        )
        .unwrap();
        assert_relative_eq!(v, 0.5 * (w.u + w.v) + SQRT2 * w.x, epsilon = 1e-14);
    }

    proptest! {
        #[test]
        fn polar_cartesian_forms_agree(r in 1e-6..0.5f64, phi in 0.0..std::f64::consts::TAU,
                                       u in -2.0..2.0f64, v in -2.0..2.0f64, x in -2.0..2.0f64) {
            let w = InteractionParams::new(u, v, x).unwrap();
            let p = PolarRdm { r, phi };
            let cart = cartesian_from_polar(&p);
            let f1 = f_r_pure_general(&w, &p).unwrap();
            let f2 = f_r_pure_general_cartesian(&w, &cart).unwrap();
            prop_assert!((f1 - f2).abs() < 1e-12, "{f1} vs {f2}");
        }

        #[test]
        fn specialization_chain(r in 0.0..0.5f64, phi in 0.0..std::f64::consts::TAU, u in -2.0..2.0f64) {
            let w = InteractionParams::on_site(u);
            let p = PolarRdm { r, phi };
            let cart = cartesian_from_polar(&p);
            let f_gen = f_r_pure_general(&w, &p).unwrap();
            let f_onsite = f_r_pure_onsite(u, &cart).unwrap();
            let f_ct = f_ctilde_pure_onsite(u, &cart.into()).unwrap();
            prop_assert!((f_gen - f_onsite).abs() < 1e-12);
            prop_assert!((f_ct - f_onsite).abs() < 1e-12);
        }

        #[test]
        fn envelope_ordering(g11 in 0.0..1.0f64, g12 in -0.5..0.5f64, u in -2.0..2.0f64) {
            let r = rr(g11, g12);
            prop_assume!(r.in_disk());
            let fc = f_c_pure_onsite(u, &r).unwrap();
            let fr = f_r_pure_onsite(u, &r).unwrap();
            prop_assert!(fc <= fr + 1e-12);
        }

        #[test]
        fn force_prefactor_nonnegative(u in -3.0..3.0f64, v in -3.0..3.0f64,
                                       phi in 0.0..std::f64::consts::TAU) {
            let w = InteractionParams::new(u, v, 0.0).unwrap();
            prop_assert!(force_prefactor(&w, phi) >= 0.0);
        }
    }

    #[test]
    fn c2_reference_points() {
        let (p, m) = c2_candidates(&rr(0.5, 0.5)).unwrap();
        assert_relative_eq!(p, 0.5, epsilon = 1e-12);
        assert_relative_eq!(m, 0.5, epsilon = 1e-12);
        let (p, m) = c2_candidates(&rr(0.0, 0.0)).unwrap();
        assert_relative_eq!(p, 0.0);
        assert_relative_eq!(m, 0.0);
        assert!(c2_candidates(&rr(0.5, 0.0)).is_err());
    }

    #[test]
    fn c2_reproduces_functional() {
        // U(1 - c2_plus) equals the repulsive on-site functional
        for (g11, g12) in [(0.3, 0.2), (0.6, -0.1), (0.45, 0.33)] {
            let r = rr(g11, g12);
            let (p, m) = c2_candidates(&r).unwrap();
            assert_relative_eq!(
                1.0 - p,
                f_r_pure_onsite(1.0, &r).unwrap(),
                epsilon = 1e-12
            );
            assert_relative_eq!(
                -(1.0 - m),
                f_r_pure_onsite(-1.0, &r).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn onsite_curve_reference_points() {
        for p in [rr(0.5, 0.0), rr(0.0, 0.0), rr(1.0, 0.0)] {
            assert!((onsite_curve_form(&p) - 0.25).abs() < 1e-12);
        }
        let p = rr(0.75, 1.0 / 8.0f64.sqrt());
        assert!((onsite_curve_form(&p) - 0.25).abs() < 1e-12);
        // (1/4, 1/4) has form 1/8 and lies inside; (1/2, 1/4) has form 3/8
        assert_relative_eq!(onsite_curve_form(&rr(0.25, 0.25)), 0.125);
        assert_eq!(onsite_membership(&rr(0.25, 0.25), 1e-10), Membership::Inside);
        assert_relative_eq!(onsite_curve_form(&rr(0.5, 0.25)), 0.375);
        assert_eq!(onsite_membership(&rr(0.5, 0.25), 1e-10), Membership::Outside);
    }

    #[test]
    fn ellipse_onsite_matches_curve_form() {
        let ells = ellipse_onsite(1.0);
        assert_eq!(ells.len(), 2);
        for e in &ells {
            for k in 0..64 {
                let p = e.point(k as f64 * std::f64::consts::TAU / 64.0);
                assert!(
                    (onsite_curve_form(&p) - 0.25).abs() < 1e-12,
                    "branch {:?} theta index {k}",
                    e.branch
                );
            }
        }
        assert!(ellipse_onsite(0.0).is_empty());
    }

    #[test]
    fn ellipses_general_specializes_to_onsite() {
        let ells = ellipses_general(&InteractionParams::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        let onsite = ellipse_onsite(1.0);
        for (a, b) in ells.iter().zip(onsite.iter()) {
            for k in 0..64 {
                let th = k as f64 * std::f64::consts::TAU / 64.0;
                let pa = a.point(th);
                let pb = b.point(th);
                assert!((pa.g11 - pb.g11).abs() < 1e-10 && (pa.g12 - pb.g12).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn ellipses_general_self_consistency() {
        for (u, v) in [(1.0, 0.5), (0.5, 1.0), (1.0, -0.5)] {
            let w = InteractionParams::new(u, v, 0.0).unwrap();
            let ells = ellipses_general(&w).unwrap();
            assert_eq!(ells.len(), 2);
            for e in &ells {
                for k in 0..64 {
                    let p = e.point(k as f64 * std::f64::consts::TAU / 64.0);
                    assert!(e.normalized_form(&p).abs() < 1e-10);
                    assert!(p.in_disk(), "curve point outside disk: {p:?}");
                }
            }
        }
    }

    #[test]
    fn ellipses_general_unsupported() {
        assert!(ellipses_general(&InteractionParams::new(1.0, 1.0, 0.0).unwrap()).is_err());
        assert!(ellipses_general(&InteractionParams::new(1.0, 0.5, 0.2).unwrap()).is_err());
        assert!(ellipses_general(&InteractionParams::new(-1.0, -2.0, 0.0).unwrap()).is_err());
    }

    #[test]
    fn force_prefactor_reference_points() {
        let onsite = InteractionParams::on_site(1.0);
        assert_relative_eq!(
            force_prefactor(&onsite, std::f64::consts::FRAC_PI_2),
            0.5
        );
        let w = InteractionParams::new(1.0, -1.0, 0.0).unwrap();
        assert_relative_eq!(
            force_prefactor(&w, std::f64::consts::FRAC_PI_2),
            0.0,
            epsilon = 1e-15
        );
        for v in [-0.7, 0.3, 1.4] {
            let w = InteractionParams::new(0.9, v, 0.0).unwrap();
            assert_relative_eq!(force_prefactor(&w, 0.0), v.abs(), epsilon = 1e-15);
        }
    }

    #[test]
    fn vanishing_angles_reference_sets() {
        use std::f64::consts::PI;
        let w = InteractionParams::new(1.0, 0.0, 0.0).unwrap();
        match vanishing_angles(&w) {
            VanishingAngles::Angles(a) => {
                assert_eq!(a.len(), 2);
                assert_relative_eq!(a[0], 0.0, epsilon = 1e-12);
                assert_relative_eq!(a[1], PI, epsilon = 1e-12);
            }
            _ => panic!("expected angle set"),
        }

        let w = InteractionParams::new(1.0, -0.5, 0.0).unwrap();
        match vanishing_angles(&w) {
            VanishingAngles::Angles(a) => {
                let phi0 = (2.0f64 / 3.0).sqrt().asin();
                let expect = [phi0, PI - phi0, PI + phi0, std::f64::consts::TAU - phi0];
                assert_eq!(a.len(), 4);
                for (got, want) in a.iter().zip(expect.iter()) {
                    assert_relative_eq!(got, want, epsilon = 1e-12);
                }
                for &phi in &a {
                    assert!(force_prefactor(&w, phi) < 1e-12);
                }
            }
            _ => panic!("expected angle set"),
        }

        let w = InteractionParams::new(-1.0, -0.5, 0.0).unwrap();
        assert_eq!(vanishing_angles(&w), VanishingAngles::Angles(Vec::new()));

        assert_eq!(
            vanishing_angles(&InteractionParams::on_site(0.0)),
            VanishingAngles::AllAngles
        );
        assert_eq!(
            vanishing_angles(&InteractionParams::new(0.5, 0.5, 0.0).unwrap()),
            VanishingAngles::Angles(Vec::new())
        );
    }

    #[test]
    fn hessian_sign_inside_and_outside() {
        let w = InteractionParams::on_site(1.0);
        // inside the left ellipse: locally non-convex
        let d = hessian_det_f_r(&w, &rr(0.25, 0.1)).unwrap();
        assert!(d < 0.0, "det {d}");
        // far outside both ellipses: locally convex
        let d = hessian_det_f_r(&w, &rr(0.45, 0.32)).unwrap();
        assert!(d > 0.0, "det {d}");
        let d = hessian_det_f_r(&w, &rr(0.2, 0.35)).unwrap();
        assert!(d > 0.0, "det {d}");
    }

    #[test]
    fn hessian_guards() {
        let w = InteractionParams::on_site(1.0);
        assert!(matches!(
            hessian_det_f_r(&w, &rr(0.5 + 0.4999, 0.0)),
            Err(DimerError::TooCloseToBoundary { .. })
        ));
        assert!(matches!(
            hessian_det_f_r(&w, &rr(0.3, 0.0)),
            Err(DimerError::HessianExcluded(_))
        ));
    }
}
