//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured figure next to its bound. Run with `--nocapture` to see the
//! lines for passing criteria as well.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use hubdimer::analytic::{
    ellipse_onsite, ellipses_general, f_c_pure_onsite, f_ctilde_pure_onsite,
    f_r_pure_general_cartesian, f_r_pure_onsite, force_prefactor, onsite_curve_form,
    vanishing_angles, EllipseSpec, FunctionalKind, VanishingAngles,
};
use hubdimer::model::{ground_state, InteractionParams, OneBodyParams, RealRdm, Rdm};
use hubdimer::search::{
    legendre_fenchel_energy, lower_convex_envelope, min_ensemble, min_pure_complex,
    min_pure_complex_reduced, min_pure_real, sample_with_boundary, SearchOptions,
};
use hubdimer::varrep::{
    degenerate_family, force_fit, ground_state_sweep, locate_degenerate_h, vrep_map, FamilyBranch,
    FamilySign, VrepStatus,
};

fn opts() -> SearchOptions {
    SearchOptions::default()
}

fn disk_grid(n: usize) -> Vec<RealRdm> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let r = RealRdm {
                g11: i as f64 / (n - 1) as f64,
                g12: -0.5 + j as f64 / (n - 1) as f64,
            };
            if r.in_disk() {
                out.push(r);
            }
        }
    }
    out
}

fn report(criterion: &str, passed: bool, detail: &str) {
    println!(
        "{}: criterion {criterion} — {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "criterion {criterion}: {detail}");
}

/// Criterion 1: the closed-form real-pure functional agrees with the
/// constrained-search oracle to 1e-8 on a 41x41 disk grid for five
/// interactions.
#[test]
fn acceptance_01_analytic_vs_oracle_real_pure() {
    let cases = [
        (1.0, 0.0, 0.0),
        (-1.0, 0.0, 0.0),
        (1.0, -0.5, 0.0),
        (1.0, 0.5, 0.25),
        (0.5, 1.0, 0.0),
    ];
    let grid = disk_grid(41);
    let mut worst: f64 = 0.0;
    for (u, v, x) in cases {
        let w = InteractionParams::new(u, v, x).unwrap();
        for r in &grid {
            let closed = f_r_pure_general_cartesian(&w, r).unwrap();
            let (searched, _) = min_pure_real(&w, r, &opts()).unwrap();
            worst = worst.max((closed - searched).abs());
        }
    }
    report(
        "1 (analytic vs oracle, real pure)",
        worst < 1e-8,
        &format!("max |closed - search| = {worst:.3e} over 5 interactions x 41x41 grid (bound 1e-8)"),
    );
}

/// Criterion 2: phase invariance of the complex-pure search against the
/// phase-invariant closed form, 50 random points x 8 phases.
#[test]
fn acceptance_02_phase_invariance() {
    let w = InteractionParams::on_site(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_dev: f64 = 0.0;
    let mut worst_spread: f64 = 0.0;
    for _ in 0..50 {
        let (g11, rho) = loop {
            let g11: f64 = rng.random_range(0.01..0.99);
            let rho: f64 = rng.random_range(0.0..0.5);
            if (g11 - 0.5).powi(2) + rho * rho < 0.2499 {
                break (g11, rho);
            }
        };
        let reference = f_ctilde_pure_onsite(
            1.0,
            &Rdm {
                g11,
                g12: Complex64::new(rho, 0.0),
            },
        )
        .unwrap();
        let mut values = Vec::with_capacity(8);
        for k in 0..8 {
            let theta = k as f64 * std::f64::consts::TAU / 8.0;
            let target = Rdm {
                g11,
                g12: Complex64::from_polar(rho, theta),
            };
            values.push(min_pure_complex(&w, &target, &opts()).unwrap());
        }
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        worst_spread = worst_spread.max(hi - lo);
        for v in values {
            worst_dev = worst_dev.max((v - reference).abs());
        }
    }
    report(
        "2 (phase invariance)",
        worst_dev < 1e-6 && worst_spread < 1e-10,
        &format!(
            "max |search - closed form| = {worst_dev:.3e} (bound 1e-6), max spread over phases = {worst_spread:.3e} (bound 1e-10)"
        ),
    );
}

/// Criterion 3: the discrete lower convex envelope at 201^2 matches the
/// piecewise closed form within 2e-3, and the ensemble search matches the
/// reduced complex search within 1e-6 at 21^2 points for two interactions.
#[test]
fn acceptance_03_envelope_identity() {
    let w = InteractionParams::on_site(1.0);
    let field = sample_with_boundary(201, |x, y| {
        f_r_pure_general_cartesian(&w, &RealRdm { g11: x, g12: y }).unwrap()
    })
    .unwrap();
    let env = lower_convex_envelope(&field).unwrap();
    let mut worst_env: f64 = 0.0;
    for (_, _, x, y, v) in env.iter() {
        let expect = f_c_pure_onsite(1.0, &RealRdm { g11: x, g12: y }).unwrap();
        worst_env = worst_env.max((v - expect).abs());
    }

    let mut worst_eq: f64 = 0.0;
    for (u, v, x) in [(1.0, 0.0, 0.0), (1.0, -0.5, 0.0)] {
        let w = InteractionParams::new(u, v, x).unwrap();
        for r in disk_grid(21) {
            let (ens, _) = min_ensemble(&w, &r.into(), &opts()).unwrap();
            let red = min_pure_complex_reduced(&w, &r, &opts()).unwrap();
            worst_eq = worst_eq.max((ens - red).abs());
        }
    }
    report(
        "3 (envelope identity)",
        worst_env < 2e-3 && worst_eq < 1e-6,
        &format!(
            "max |envelope - piecewise form| = {worst_env:.3e} at 201^2 (bound 2e-3); max |ensemble - reduced complex| = {worst_eq:.3e} at 21^2 x 2 interactions (bound 1e-6)"
        ),
    );
}

/// Criterion 4: conjugate-function energies from the real-ensemble
/// functional match exact diagonalization to 1e-6 for 100 random
/// Hamiltonians.
#[test]
fn acceptance_04_legendre_fenchel_duality() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = OneBodyParams::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        )
        .unwrap();
        let w = InteractionParams::on_site(rng.random_range(-2.0..2.0));
        let exact = ground_state(&p, &w).energy;
        let (e, _) = legendre_fenchel_energy(&p, FunctionalKind::FrEns, &w, 801, &opts()).unwrap();
        worst = worst.max((e - exact).abs());
    }
    report(
        "4 (conjugate-function duality)",
        worst < 1e-6,
        &format!("max |E_functional - E_diag| = {worst:.3e} over 100 random Hamiltonians at resolution 801 (bound 1e-6)"),
    );
}

fn curve_samples(ells: &[EllipseSpec]) -> Vec<RealRdm> {
    ells.iter()
        .flat_map(|e| (0..2048).map(move |k| e.point(k as f64 * std::f64::consts::TAU / 2048.0)))
        .collect()
}

fn worst_misclassification_distance(
    map: &hubdimer::GridField<hubdimer::varrep::VrepVerdict>,
    ells: &[EllipseSpec],
) -> f64 {
    let curve = curve_samples(ells);
    let mut worst: f64 = 0.0;
    for (_, _, x, y, v) in map.iter() {
        if matches!(
            v.status,
            VrepStatus::BoundaryExcluded | VrepStatus::BoundaryTouchpoint
        ) {
            continue;
        }
        let r = RealRdm { g11: x, g12: y };
        let inside = ells.iter().any(|e| e.normalized_form(&r) < 0.0);
        let flagged = v.status == VrepStatus::NotRepresentable;
        if inside != flagged {
            let d = curve
                .iter()
                .map(|c| (c.g11 - x).hypot(c.g12 - y))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
    }
    worst
}

/// Criterion 5: the on-site excluded region at resolution 401 reproduces
/// the analytic pair of ellipses within two grid cells, and the three axis
/// points satisfy the curve equation to 1e-12.
#[test]
fn acceptance_05_ellipse_reproduction() {
    let w = InteractionParams::on_site(1.0);
    let map = vrep_map(FunctionalKind::FrPure, FunctionalKind::FrEns, &w, 401, &opts()).unwrap();
    let ells = ellipse_onsite(1.0);
    let worst = worst_misclassification_distance(&map, &ells);
    let cells = 2.0 * (1.0 / 400.0) * std::f64::consts::SQRT_2;

    let mut axis_worst: f64 = 0.0;
    for p in [
        RealRdm { g11: 0.0, g12: 0.0 },
        RealRdm { g11: 0.5, g12: 0.0 },
        RealRdm { g11: 1.0, g12: 0.0 },
    ] {
        axis_worst = axis_worst.max((onsite_curve_form(&p) - 0.25).abs());
    }
    report(
        "5 (ellipse reproduction)",
        worst <= cells && axis_worst < 1e-12,
        &format!(
            "worst misclassified-node distance to curve = {worst:.3e} (allowed {cells:.3e}); axis-point residual = {axis_worst:.3e} (bound 1e-12)"
        ),
    );
}

/// Criterion 6: for (U,V) = (1, 1/2) and (1/2, 1) the numeric region
/// boundaries match the generalized analytic ellipses within two grid
/// cells, exhibiting the resizing and 90-degree rotation.
#[test]
fn acceptance_06_generalized_ellipses() {
    let mut details = Vec::new();
    let mut ok = true;
    for (u, v) in [(1.0, 0.5), (0.5, 1.0)] {
        let w = InteractionParams::new(u, v, 0.0).unwrap();
        let map =
            vrep_map(FunctionalKind::FrPure, FunctionalKind::FrEns, &w, 201, &opts()).unwrap();
        let ells = ellipses_general(&w).unwrap();
        let worst = worst_misclassification_distance(&map, &ells);
        let cells = 2.0 * (1.0 / 200.0) * std::f64::consts::SQRT_2;
        ok &= worst <= cells;
        // the two cases split along different axes: size change + rotation
        let split = ells[0].split_axis;
        details.push(format!(
            "(U,V)=({u},{v}): worst misclassified distance {worst:.3e} (allowed {cells:.3e}), branches split along {split:?}"
        ));
    }
    report("6 (generalized ellipses)", ok, &details.join("; "));
}

/// Criterion 7: force fits over R in [1e-4, 1e-2] recover the exponent
/// -1/2 within 0.02 and the analytic prefactor within 1% at 8 angles for 3
/// interactions; fitted prefactors vanish at every vanishing angle, and the
/// attractive case returns none.
#[test]
fn acceptance_07_exchange_force() {
    let interactions = [(1.0, 0.0), (1.0, -0.5), (0.5, 1.0)];
    let mut worst_expo: f64 = 0.0;
    let mut worst_pref: f64 = 0.0;
    for (u, v) in interactions {
        let w = InteractionParams::new(u, v, 0.0).unwrap();
        let mut used = 0;
        let mut k = 0;
        while used < 8 {
            let phi = (2 * k + 1) as f64 * std::f64::consts::PI / 16.0 + 0.05;
            k += 1;
            let c = force_prefactor(&w, phi);
            if c < 0.05 {
                continue;
            }
            used += 1;
            let fit = force_fit(&w, phi, 1e-4, 1e-2, 16).unwrap();
            worst_expo = worst_expo.max((fit.exponent + 0.5).abs());
            worst_pref = worst_pref.max((fit.prefactor - c).abs() / c);
        }
    }

    let mut vanishing_ok = true;
    for (u, v) in [(1.0, 0.0), (1.0, -0.5)] {
        let w = InteractionParams::new(u, v, 0.0).unwrap();
        match vanishing_angles(&w) {
            VanishingAngles::Angles(angles) => {
                assert!(!angles.is_empty());
                for phi in angles {
                    let fit = force_fit(&w, phi, 1e-4, 1e-2, 16).unwrap();
                    vanishing_ok &= fit.prefactor < 1e-6;
                }
            }
            _ => vanishing_ok = false,
        }
    }
    let empty_ok = matches!(
        vanishing_angles(&InteractionParams::new(-1.0, -0.5, 0.0).unwrap()),
        VanishingAngles::Angles(a) if a.is_empty()
    );
    report(
        "7 (exchange force)",
        worst_expo <= 0.02 && worst_pref <= 0.01 && vanishing_ok && empty_ok,
        &format!(
            "max |exponent + 1/2| = {worst_expo:.3e} (bound 0.02); max relative prefactor error = {worst_pref:.3e} (bound 0.01); vanishing-angle prefactors < 1e-6: {vanishing_ok}; empty set for (-1,-1/2): {empty_ok}"
        ),
    );
}

/// Criterion 8: at the numerically located degenerate Hamiltonian all
/// family states share the energy expectation to 1e-10; real members trace
/// the curve to 1e-10 and a quarter-phase member moves strictly inside.
#[test]
fn acceptance_08_degenerate_family() {
    let u = 1.0;
    let w = InteractionParams::on_site(u);
    let mut energy_spread: f64 = 0.0;
    let mut curve_worst: f64 = 0.0;
    let mut interior_ok = true;
    for branch in [FamilyBranch::Left, FamilyBranch::Right] {
        let p = locate_degenerate_h(u, branch).unwrap();
        let h = hubdimer::model::build_hamiltonian(&p, &w);
        let mut values = Vec::new();
        for k in 0..=16 {
            let modulus = k as f64 / 16.0;
            for (phase, sign) in [
                (0.0, FamilySign::Plus),
                (0.0, FamilySign::Minus),
                (1.1, FamilySign::Plus),
                (std::f64::consts::FRAC_PI_2, FamilySign::Plus),
            ] {
                let (state, rdm) = degenerate_family(modulus, phase, sign, branch).unwrap();
                values.push(state.expectation(&h));
                if phase == 0.0 {
                    curve_worst =
                        curve_worst.max((onsite_curve_form(&rdm.real_part()) - 0.25).abs());
                }
            }
        }
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        energy_spread = energy_spread.max(hi - lo);
        // quarter phase at interior modulus: strictly inside the curve
        let (_, rdm) = degenerate_family(
            0.7,
            std::f64::consts::FRAC_PI_2,
            FamilySign::Plus,
            branch,
        )
        .unwrap();
        interior_ok &= onsite_curve_form(&rdm.real_part()) < 0.25 - 1e-3;
    }
    report(
        "8 (degenerate family)",
        energy_spread < 1e-10 && curve_worst < 1e-10 && interior_ok,
        &format!(
            "energy spread over family = {energy_spread:.3e} (bound 1e-10); curve residual of real members = {curve_worst:.3e} (bound 1e-10); quarter-phase member strictly inside: {interior_ok}"
        ),
    );
}

/// Criterion 9: ordering and sandwich invariants at every evaluated point:
/// the envelope never exceeds the pure functional, and the three searches
/// are ordered, violations below 1e-8.
#[test]
fn acceptance_09_ordering_sandwich() {
    // closed-form ordering over a dense grid for several couplings
    let mut worst_order: f64 = 0.0;
    for u in [-1.5, -0.3, 0.4, 1.0, 2.0] {
        for r in disk_grid(101) {
            let fc = f_c_pure_onsite(u, &r).unwrap();
            let fr = f_r_pure_onsite(u, &r).unwrap();
            worst_order = worst_order.max(fc - fr);
        }
    }

    // search sandwich at sampled points for two interactions
    let mut worst_sandwich: f64 = 0.0;
    let mut worst_eq: f64 = 0.0;
    for (u, v, x) in [(1.0, 0.0, 0.0), (1.0, -0.5, 0.0)] {
        let w = InteractionParams::new(u, v, x).unwrap();
        for r in disk_grid(11) {
            let (ens, _) = min_ensemble(&w, &r.into(), &opts()).unwrap();
            let red = min_pure_complex_reduced(&w, &r, &opts()).unwrap();
            let (pure, _) = min_pure_real(&w, &r, &opts()).unwrap();
            worst_sandwich = worst_sandwich.max(ens - red).max(red - pure);
            worst_eq = worst_eq.max((ens - red).abs());
        }
    }
    report(
        "9 (ordering and sandwich)",
        worst_order < 1e-8 && worst_sandwich < 1e-8,
        &format!(
            "max F_C - F_R = {worst_order:.3e}; max sandwich violation = {worst_sandwich:.3e} (bounds 1e-8); max |ensemble - reduced| = {worst_eq:.3e}"
        ),
    );
}

/// Criterion 10: a 10^4-sample sweep attains no point inside the open
/// ellipse interiors and covers the representable region away from the
/// ellipses and boundary with gaps below 0.02.
#[test]
fn acceptance_10_sweep_exclusion_and_coverage() {
    let w = InteractionParams::on_site(1.0);
    let rows = ground_state_sweep(&w, (1e-3, 100.0), (-5.0, 5.0), 10_000).unwrap();

    // exclusion: minimum distance of attained points into the interior
    let mut min_form: f64 = f64::INFINITY;
    for s in &rows {
        min_form = min_form.min(onsite_curve_form(&RealRdm {
            g11: s.g11,
            g12: s.g12,
        }));
    }
    let exclusion_ok = min_form >= 0.25 - 1e-9;

    // coverage: probes away from the boundary and the ellipses
    let margin = 0.05;
    let ells = ellipse_onsite(1.0);
    let curve = curve_samples(&ells);
    let mut worst_gap: f64 = 0.0;
    let mut worst_at = (0.0, 0.0);
    for i in 0..81 {
        for j in 0..81 {
            let x = i as f64 / 80.0;
            let y = -0.5 + j as f64 / 80.0;
            let rho = (x - 0.5).hypot(y);
            if rho > 0.5 - margin {
                continue;
            }
            let r = RealRdm { g11: x, g12: y };
            if onsite_curve_form(&r) < 0.25 {
                continue;
            }
            let dcurve = curve
                .iter()
                .map(|c| (c.g11 - x).hypot(c.g12 - y))
                .fold(f64::INFINITY, f64::min);
            if dcurve < margin {
                continue;
            }
            let nearest = rows
                .iter()
                .map(|s| (s.g11 - x).hypot(s.g12 - y))
                .fold(f64::INFINITY, f64::min);
            if nearest > worst_gap {
                worst_gap = nearest;
                worst_at = (x, y);
            }
        }
    }
    report(
        "10 (sweep exclusion and coverage)",
        exclusion_ok && worst_gap < 0.02,
        &format!(
            "min curve form over attained set = {min_form:.6} (exclusion needs >= 0.25); coverage gap = {worst_gap:.4} at ({}, {}) with margins {margin} (bound 0.02); samples = {}",
            worst_at.0, worst_at.1, rows.len()
        ),
    );
}
