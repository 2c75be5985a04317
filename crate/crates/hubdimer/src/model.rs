//! Singlet-subspace model of the two-site, two-fermion system.
//!
//! Everything lives in the three-dimensional singlet sector spanned by
//! `Phi1` (both fermions on site 1), `Phi2` (both on site 2) and `Phi3`
//! (the spin-singlet combination with one fermion per site). The 1RDM is
//! the per-spin 2x2 block with trace 1; its two independent entries
//! `(g11, g12)` range over the closed disk `(g11-1/2)^2 + |g12|^2 <= 1/4`.

use nalgebra::{Matrix2, Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DimerError, Result};
use crate::tol;

pub const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Hopping amplitude and on-site potentials of the variable one-particle part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneBodyParams {
    pub t: f64,
    pub eps1: f64,
    pub eps2: f64,
}

impl OneBodyParams {
    pub fn new(t: f64, eps1: f64, eps2: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(DimerError::NonFiniteParameter("t"));
        }
        if !eps1.is_finite() {
            return Err(DimerError::NonFiniteParameter("eps1"));
        }
        if !eps2.is_finite() {
            return Err(DimerError::NonFiniteParameter("eps2"));
        }
        Ok(Self { t, eps1, eps2 })
    }

    /// The 2x2 one-particle block `[[eps1, -t], [-t, eps2]]`.
    pub fn block(&self) -> Matrix2<f64> {
        Matrix2::new(self.eps1, -self.t, -self.t, self.eps2)
    }
}

/// Coupling constants of the fixed pair interaction. The on-site dimer is
/// `V = X = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionParams {
    pub u: f64,
    pub v: f64,
    pub x: f64,
}

impl InteractionParams {
    pub fn new(u: f64, v: f64, x: f64) -> Result<Self> {
        if !u.is_finite() {
            return Err(DimerError::NonFiniteParameter("U"));
        }
        if !v.is_finite() {
            return Err(DimerError::NonFiniteParameter("V"));
        }
        if !x.is_finite() {
            return Err(DimerError::NonFiniteParameter("X"));
        }
        Ok(Self { u, v, x })
    }

    pub fn on_site(u: f64) -> Self {
        Self { u, v: 0.0, x: 0.0 }
    }

    pub fn is_on_site(&self) -> bool {
        self.v == 0.0 && self.x == 0.0
    }
}

/// Normalized coefficient triple over the singlet basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingletState {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

impl SingletState {
    pub fn new(a: Complex64, b: Complex64, c: Complex64) -> Result<Self> {
        let norm = a.norm_sqr() + b.norm_sqr() + c.norm_sqr();
        if (norm - 1.0).abs() > tol::NORM_TOL {
            return Err(DimerError::NotNormalized { norm });
        }
        Ok(Self { a, b, c })
    }

    pub fn from_real(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(
            Complex64::new(a, 0.0),
            Complex64::new(b, 0.0),
            Complex64::new(c, 0.0),
        )
    }

    /// Rescales an arbitrary nonzero triple to unit norm.
    pub fn normalized(a: Complex64, b: Complex64, c: Complex64) -> Result<Self> {
        let norm = (a.norm_sqr() + b.norm_sqr() + c.norm_sqr()).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(DimerError::NotNormalized { norm });
        }
        Ok(Self {
            a: a / norm,
            b: b / norm,
            c: c / norm,
        })
    }

    pub fn coeffs(&self) -> Vector3<Complex64> {
        Vector3::new(self.a, self.b, self.c)
    }

    pub fn is_real(&self) -> bool {
        self.a.im.abs() < tol::NORM_TOL
            && self.b.im.abs() < tol::NORM_TOL
            && self.c.im.abs() < tol::NORM_TOL
    }

    /// Expectation value of a real symmetric operator in the singlet basis.
    pub fn expectation(&self, op: &Matrix3<f64>) -> f64 {
        let v = self.coeffs();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                acc += v[i].conj() * op[(i, j)] * v[j];
            }
        }
        acc.re
    }
}

/// Per-spin 1RDM block in complex Cartesian form; `g22 = 1 - g11` is implied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rdm {
    pub g11: f64,
    pub g12: Complex64,
}

impl Rdm {
    pub fn new(g11: f64, g12: Complex64) -> Result<Self> {
        let r = Self { g11, g12 };
        r.check_disk()?;
        Ok(r)
    }

    fn check_disk(&self) -> Result<()> {
        let q = (self.g11 - 0.5).powi(2) + self.g12.norm_sqr();
        if !q.is_finite() || q > 0.25 + tol::DISK_TOL {
            return Err(DimerError::OutsideDisk {
                g11: self.g11,
                g12: self.g12.norm(),
            });
        }
        Ok(())
    }

    pub fn is_real(&self) -> bool {
        self.g12.im.abs() < tol::DISK_TOL
    }

    pub fn real_part(&self) -> RealRdm {
        RealRdm {
            g11: self.g11,
            g12: self.g12.re,
        }
    }
}

impl From<RealRdm> for Rdm {
    fn from(r: RealRdm) -> Self {
        Rdm {
            g11: r.g11,
            g12: Complex64::new(r.g12, 0.0),
        }
    }
}

/// Real part of the 1RDM, the natural variable for real one-particle
/// Hamiltonians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealRdm {
    pub g11: f64,
    pub g12: f64,
}

impl RealRdm {
    pub fn new(g11: f64, g12: f64) -> Result<Self> {
        let r = Self { g11, g12 };
        if r.disk_form() > 0.25 + tol::DISK_TOL {
            return Err(DimerError::OutsideDisk { g11, g12 });
        }
        Ok(r)
    }

    /// `(g11-1/2)^2 + g12^2`; at most 1/4 inside the disk.
    pub fn disk_form(&self) -> f64 {
        (self.g11 - 0.5).powi(2) + self.g12 * self.g12
    }

    /// Distance to the disk boundary.
    pub fn boundary_distance(&self) -> f64 {
        0.5 - self.disk_form().sqrt()
    }

    pub fn in_disk(&self) -> bool {
        self.disk_form() <= 0.25 + tol::DISK_TOL
    }
}

/// 1RDM in polar form: `R` is the distance to the disk boundary, `phi` the
/// polar angle around the center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarRdm {
    pub r: f64,
    pub phi: f64,
}

impl PolarRdm {
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !(0.0..=0.5 + tol::DISK_TOL).contains(&r) {
            return Err(DimerError::InvalidPolarRadius(r));
        }
        Ok(Self {
            r: r.min(0.5),
            phi,
        })
    }
}

/// `g11 = [1 + (1-2R) cos(phi)]/2`, `g12 = (1-2R) sin(phi)/2`.
pub fn cartesian_from_polar(p: &PolarRdm) -> RealRdm {
    let rho = 1.0 - 2.0 * p.r;
    RealRdm {
        g11: 0.5 * (1.0 + rho * p.phi.cos()),
        g12: 0.5 * rho * p.phi.sin(),
    }
}

/// Inverse of [`cartesian_from_polar`]; rejects out-of-disk input. At the
/// disk center the angle is undefined and `phi = 0` is returned with
/// `R = 1/2`.
pub fn polar_from_cartesian(r: &RealRdm) -> Result<PolarRdm> {
    if !r.in_disk() {
        return Err(DimerError::OutsideDisk {
            g11: r.g11,
            g12: r.g12,
        });
    }
    let x = r.g11 - 0.5;
    let y = r.g12;
    let rho = x.hypot(y);
    if rho < tol::CENTER_EPS {
        return Ok(PolarRdm { r: 0.5, phi: 0.0 });
    }
    let mut phi = y.atan2(x);
    if phi < 0.0 {
        phi += std::f64::consts::TAU;
    }
    Ok(PolarRdm {
        r: (0.5 - rho).max(0.0),
        phi,
    })
}

/// 3x3 Hermitian, positive-semidefinite, trace-one operator on the singlet
/// basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    mat: Matrix3<Complex64>,
}

impl DensityOperator {
    pub fn new(mat: Matrix3<Complex64>) -> Result<Self> {
        for i in 0..3 {
            for j in 0..3 {
                let d = (mat[(i, j)] - mat[(j, i)].conj()).norm();
                if d > tol::HERMITICITY_TOL {
                    return Err(DimerError::InvalidDensityOperator(format!(
                        "not Hermitian: |G[{i}{j}] - conj(G[{j}{i}])| = {d:e}"
                    )));
                }
            }
        }
        let tr = (mat[(0, 0)] + mat[(1, 1)] + mat[(2, 2)]).re;
        if (tr - 1.0).abs() > tol::TRACE_TOL {
            return Err(DimerError::InvalidDensityOperator(format!(
                "trace = {tr}, expected 1"
            )));
        }
        let op = Self { mat };
        let lmin = op.eigenvalues()[0];
        if lmin < tol::PSD_TOL {
            return Err(DimerError::InvalidDensityOperator(format!(
                "smallest eigenvalue {lmin:e} below tolerance"
            )));
        }
        Ok(op)
    }

    pub fn from_real(mat: Matrix3<f64>) -> Result<Self> {
        Self::new(mat.map(|x| Complex64::new(x, 0.0)))
    }

    /// Rank-one projector onto a pure state.
    pub fn from_pure(state: &SingletState) -> Self {
        let v = state.coeffs();
        let mut mat = Matrix3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                mat[(i, j)] = v[i] * v[j].conj();
            }
        }
        Self { mat }
    }

    /// Convex combination `sum(w_i G_i)`; weights must be a probability vector.
    pub fn mixture(parts: &[(f64, DensityOperator)]) -> Result<Self> {
        let wsum: f64 = parts.iter().map(|(w, _)| *w).sum();
        if parts.is_empty() || (wsum - 1.0).abs() > tol::TRACE_TOL || parts.iter().any(|(w, _)| *w < 0.0) {
            return Err(DimerError::InvalidDensityOperator(
                "mixture weights must be nonnegative and sum to 1".into(),
            ));
        }
        let mut mat = Matrix3::zeros();
        for (w, g) in parts {
            mat += g.mat.map(|x| x * *w);
        }
        Self::new(mat)
    }

    pub fn matrix(&self) -> &Matrix3<Complex64> {
        &self.mat
    }

    /// Ascending eigenvalues, via the real-symmetric embedding
    /// `[[Re, -Im], [Im, Re]]` whose spectrum doubles the Hermitian one.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut emb = nalgebra::DMatrix::<f64>::zeros(6, 6);
        for i in 0..3 {
            for j in 0..3 {
                emb[(i, j)] = self.mat[(i, j)].re;
                emb[(i + 3, j + 3)] = self.mat[(i, j)].re;
                emb[(i, j + 3)] = -self.mat[(i, j)].im;
                emb[(i + 3, j)] = self.mat[(i, j)].im;
            }
        }
        let mut ev: Vec<f64> = emb.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // keep one of each doubled pair
        vec![ev[0], ev[2], ev[4]]
    }

    pub fn trace_with(&self, op: &Matrix3<f64>) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                acc += self.mat[(i, j)] * op[(j, i)];
            }
        }
        acc.re
    }
}

/// Singlet-basis matrix of the one-body part. Derived from the
/// second-quantized action of hopping and on-site potentials on the basis
/// states: double occupations carry twice the site potential, and hopping
/// couples `Phi1, Phi2` to `Phi3` with amplitude `-sqrt(2) t`.
pub fn build_one_body_matrix(p: &OneBodyParams) -> Matrix3<f64> {
    let s = -SQRT2 * p.t;
    Matrix3::new(
        2.0 * p.eps1,
        0.0,
        s,
        0.0,
        2.0 * p.eps2,
        s,
        s,
        s,
        p.eps1 + p.eps2,
    )
}

/// Singlet-basis matrix of the pair interaction:
/// `[[U, V, X], [V, U, X], [X, X, 0]]`.
pub fn build_interaction_matrix(w: &InteractionParams) -> Matrix3<f64> {
    Matrix3::new(w.u, w.v, w.x, w.v, w.u, w.x, w.x, w.x, 0.0)
}

/// Full singlet-space Hamiltonian `h + W`.
pub fn build_hamiltonian(p: &OneBodyParams, w: &InteractionParams) -> Matrix3<f64> {
    build_one_body_matrix(p) + build_interaction_matrix(w)
}

/// Singlet-space matrix of the number operator `n_{1,up}`.
fn occupation_operator() -> Matrix3<f64> {
    Matrix3::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5)
}

/// Singlet-space matrix of the hop operator whose expectation is `g12`.
fn transfer_operator() -> Matrix3<f64> {
    let s = 1.0 / SQRT2;
    Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, s, s, 0.0, 0.0)
}

/// Per-spin 1RDM of a pure state, from the second-quantized operators.
/// Invariant under a global phase of the state.
pub fn rdm_from_state(state: &SingletState) -> Rdm {
    let v = state.coeffs();
    let occ = occupation_operator();
    let hop = transfer_operator();
    let mut g11 = Complex64::new(0.0, 0.0);
    let mut g12 = Complex64::new(0.0, 0.0);
    for i in 0..3 {
        for j in 0..3 {
            g11 += v[i].conj() * occ[(i, j)] * v[j];
            g12 += v[i].conj() * hop[(i, j)] * v[j];
        }
    }
    Rdm {
        g11: g11.re,
        g12,
    }
}

/// Linear extension of [`rdm_from_state`] to mixed states.
pub fn rdm_from_density(gamma: &DensityOperator) -> Rdm {
    let occ = occupation_operator();
    let hop = transfer_operator();
    let g11 = gamma.trace_with(&occ);
    let mut g12 = Complex64::new(0.0, 0.0);
    for i in 0..3 {
        for j in 0..3 {
            g12 += gamma.matrix()[(i, j)] * hop[(j, i)];
        }
    }
    Rdm { g11, g12 }
}

/// Total one-body energy `2 Tr[h1 gamma_block]` of a real 1RDM.
pub fn one_body_energy(p: &OneBodyParams, r: &RealRdm) -> f64 {
    2.0 * (p.eps1 * r.g11 + p.eps2 * (1.0 - r.g11)) - 4.0 * p.t * r.g12
}

/// Ground-state data of the singlet-space Hamiltonian.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub states: Vec<SingletState>,
    pub degeneracy: usize,
}

/// Diagonalizes `h + W` and returns the ground energy together with an
/// orthonormal basis of the ground space. Eigenvalues within a relative gap
/// of `1e-9` times the spectral range count as degenerate.
pub fn ground_state(p: &OneBodyParams, w: &InteractionParams) -> GroundState {
    let h = build_hamiltonian(p, w);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let evs: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let range = (evs[2] - evs[0]).abs();
    let gap_tol = tol::DEGENERACY_REL_GAP * range.max(1.0);
    let mut states = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        if evs[k] - evs[0] <= gap_tol {
            let col = eig.eigenvectors.column(i);
            states.push(
                SingletState::normalized(
                    Complex64::new(col[0], 0.0),
                    Complex64::new(col[1], 0.0),
                    Complex64::new(col[2], 0.0),
                )
                .expect("eigenvector has unit norm"),
            );
        }
    }
    GroundState {
        energy: evs[0],
        degeneracy: states.len(),
        states,
    }
}
