//! Exact 4x4 algebra of the free Dirac problem in natural units
//! (hbar = c = m0 = 1), standard Dirac-Pauli representation.

use std::sync::OnceLock;

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Mat4 = Matrix4<Complex64>;
pub type Spinor = Vector4<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// The alpha matrices, beta, and the spin matrices Sigma = diag(sigma, sigma).
#[derive(Debug, Clone, PartialEq)]
pub struct DiracMatrices {
    pub alpha: [Mat4; 3],
    pub beta: Mat4,
    pub sigma: [Mat4; 3],
}

fn pauli() -> [Matrix2<Complex64>; 3] {
    [
        Matrix2::new(ZERO, ONE, ONE, ZERO),
        Matrix2::new(ZERO, -I, I, ZERO),
        Matrix2::new(ONE, ZERO, ZERO, -ONE),
    ]
}

fn blocks(tl: &Matrix2<Complex64>, tr: &Matrix2<Complex64>, bl: &Matrix2<Complex64>, br: &Matrix2<Complex64>) -> Mat4 {
    let mut m = Mat4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(tl);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(tr);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(bl);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(br);
    m
}

/// Builds the standard representation: beta = diag(1, 1, -1, -1) and alpha_i
/// with the Pauli matrices on the off-diagonal blocks.
pub fn make_dirac_matrices() -> DiracMatrices {
    let s = pauli();
    let z = Matrix2::zeros();
    let id = Matrix2::identity();
    DiracMatrices {
        alpha: [0, 1, 2].map(|i| blocks(&z, &s[i], &s[i], &z)),
        beta: blocks(&id, &z, &z, &(-id)),
        sigma: [0, 1, 2].map(|i| blocks(&s[i], &z, &z, &s[i])),
    }
}

/// Shared instance of [`make_dirac_matrices`].
pub fn dirac() -> &'static DiracMatrices {
    static MATRICES: OnceLock<DiracMatrices> = OnceLock::new();
    MATRICES.get_or_init(make_dirac_matrices)
}

/// Free Dirac Hamiltonian of a single momentum mode, h = alpha.k + beta.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMatrix {
    pub k: [f64; 3],
    pub h: Mat4,
    /// E(k) = sqrt(k^2 + 1), always >= 1.
    pub energy: f64,
}

impl ModeMatrix {
    pub fn new(k: [f64; 3]) -> Result<Self> {
        if k.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("momentum component"));
        }
        Ok(Self::from_finite(k))
    }

    /// Hot-path constructor for lattice momenta, which are finite by construction.
    pub(crate) fn from_finite(k: [f64; 3]) -> Self {
        let d = dirac();
        let mut h = d.beta;
        for (a, &ki) in d.alpha.iter().zip(&k) {
            if ki != 0.0 {
                h += a * Complex64::from(ki);
            }
        }
        let k2: f64 = k.iter().map(|c| c * c).sum();
        Self { k, h, energy: (k2 + 1.0).sqrt() }
    }

    /// Exact inverse h / E^2.
    pub fn inverse(&self) -> Mat4 {
        self.h.unscale(self.energy * self.energy)
    }

    /// Sign operator h / E, the difference of the two energy projectors.
    pub fn sign(&self) -> Mat4 {
        self.h.unscale(self.energy)
    }

    pub fn projectors(&self) -> (Mat4, Mat4) {
        let half_id = Mat4::identity().scale(0.5);
        let half_sign = self.sign().scale(0.5);
        (half_id + half_sign, half_id - half_sign)
    }

    /// exp(-i h t) in closed form: cos(Et) I - i sin(Et) h / E.
    pub fn propagator(&self, t: f64) -> Mat4 {
        let (s, c) = (self.energy * t).sin_cos();
        Mat4::identity() * Complex64::from(c) - self.sign() * Complex64::new(0.0, s)
    }
}

pub fn mode_hamiltonian(k: [f64; 3]) -> Result<ModeMatrix> {
    ModeMatrix::new(k)
}

/// Positive- and negative-energy projectors (E I +- h) / 2E.
pub fn energy_projectors(m: &ModeMatrix) -> (Mat4, Mat4) {
    m.projectors()
}

pub fn mode_propagator(m: &ModeMatrix, t: f64) -> Mat4 {
    m.propagator(t)
}

/// Normalized positive-energy spinor at momentum `k`, spin up or down along z
/// in the rest frame. Useful as a packet seed that is already on the particle
/// branch at the packet's mean momentum.
pub fn positive_spinor(k: [f64; 3], spin_up: bool) -> Result<Spinor> {
    let m = ModeMatrix::new(k)?;
    let rest = if spin_up {
        Spinor::new(ONE, ZERO, ZERO, ZERO)
    } else {
        Spinor::new(ZERO, ONE, ZERO, ZERO)
    };
    let (plus, _) = m.projectors();
    let u = plus * rest;
    // (E + 1) / 2E >= 1/2, so the projection never vanishes
    Ok(u.unscale(u.norm()))
}

/// Conjugate-linear inner product <a|b>.
#[inline]
pub fn braket(a: &Spinor, b: &Spinor) -> Complex64 {
    a.dotc(b)
}
