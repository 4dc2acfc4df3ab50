//! Expectation values, variances and commutators of the time operator
//! T = alpha.r + beta tau0 and the free Dirac Hamiltonian (natural units).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dirac::{dirac, Mat4, ModeMatrix, Spinor};
use crate::error::{Error, Result};
use crate::grid::{transform, Components, Direction};
use crate::numeric::{fmt17, variance, CompensatedSum, ComplexSum};
use crate::units::PLANCK;
use crate::wavepacket::{inner, set_spinor, spinor_at, SpinorField};

/// De Broglie period h / m0c^2 for a rest energy in natural units (h = 2 pi).
pub fn de_broglie_period(mass_energy: f64) -> Result<f64> {
    if !(mass_energy.is_finite() && mass_energy > 0.0) {
        return Err(Error::InvalidArgument(format!("mass_energy must be positive, got {mass_energy}")));
    }
    Ok(2.0 * PI / mass_energy)
}

/// De Broglie period in seconds for a rest energy in joules.
pub fn de_broglie_period_si(mass_energy_joules: f64) -> Result<f64> {
    if !(mass_energy_joules.is_finite() && mass_energy_joules > 0.0) {
        return Err(Error::InvalidArgument(format!("mass_energy must be positive, got {mass_energy_joules}")));
    }
    Ok(PLANCK / mass_energy_joules)
}

/// tau0 in natural units for m0 = 1.
pub const TAU0: f64 = 2.0 * PI;

/// Matrix part of T at position r: alpha.r + beta tau0.
#[inline]
pub(crate) fn time_operator_matrix(r: &[f64; 3], tau0: f64) -> Mat4 {
    let d = dirac();
    let mut m = d.beta * Complex64::from(tau0);
    for (a, &x) in d.alpha.iter().zip(r) {
        if x != 0.0 {
            m += a * Complex64::from(x);
        }
    }
    m
}

fn apply_in_position<F>(f: &SpinorField, op: F) -> Components
where
    F: Fn(&[f64; 3]) -> Mat4,
{
    let g = f.grid();
    let pos = f.position_view();
    let mut out = g.zeros();
    for i in 0..g.sites() {
        let s = op(&g.position(i)) * spinor_at(pos, i);
        set_spinor(&mut out, i, &s);
    }
    out
}

/// (alpha.r + beta tau0) psi, unnormalized.
pub fn time_operator_apply(f: &SpinorField, tau0: f64) -> Result<SpinorField> {
    f.check_localized()?;
    let out = apply_in_position(f, |r| time_operator_matrix(r, tau0));
    Ok(SpinorField::from_position_unchecked(*f.grid(), out))
}

/// Free Dirac Hamiltonian applied mode by mode, unnormalized.
pub fn hamiltonian_apply(f: &SpinorField) -> SpinorField {
    f.apply_modewise(|m| m.h)
}

/// <psi| T H - H T |psi> from explicit operator products.
pub fn commutator_th_direct(f: &SpinorField, tau0: f64) -> Result<Complex64> {
    f.require_normalized()?;
    let t_psi = time_operator_apply(f, tau0)?;
    let h_psi = hamiltonian_apply(f);
    let th = inner(t_psi.position_view(), h_psi.position_view());
    Ok(th - th.conj())
}

/// Closed form of the same commutator,
/// i <(d-2) I + 2 beta K> + 2 <beta (tau0 H - T)>, with K = beta (Sigma.L + 1).
/// In three dimensions the first term is i <I + 2 beta K>; a 1D lattice has a
/// single alpha.r alpha.p pair and contributes i alone.
pub fn commutator_th_closed_form(f: &SpinorField, tau0: f64) -> Result<Complex64> {
    f.require_normalized()?;
    let dim = f.grid().dim() as f64;
    let beta_k = 1.0 + 2.0 * spin_orbit_or_zero(f)?;
    let d = dirac();
    let beta_h = f.modewise_expectation(|m| d.beta * m.h);
    let t_psi = time_operator_apply(f, tau0)?;
    let beta_t = position_expectation_with(f.position_view(), t_psi.position_view(), &d.beta);
    Ok(Complex64::new(0.0, dim - 2.0 + 2.0 * beta_k) + (beta_h * tau0 - beta_t) * 2.0)
}

/// <a| M |b> with a constant matrix M, in the position view.
fn position_expectation_with(a: &Components, b: &Components, m: &Mat4) -> Complex64 {
    let mut acc = ComplexSum::default();
    for i in 0..a[0].len() {
        acc.add(spinor_at(a, i).dotc(&(m * spinor_at(b, i))));
    }
    acc.value()
}

/// <[T, V(r)]> for a scalar potential. Both act pointwise in the position
/// view, so the per-site matrix commutator T(r) V(r) - V(r) T(r) is formed
/// and sandwiched between the local spinors.
pub fn commutator_tv<V>(f: &SpinorField, tau0: f64, potential: V) -> Result<Complex64>
where
    V: Fn(&[f64; 3]) -> f64,
{
    f.check_localized()?;
    let g = f.grid();
    let pos = f.position_view();
    let mut acc = ComplexSum::default();
    for i in 0..g.sites() {
        let r = g.position(i);
        let v = potential(&r);
        let s = spinor_at(pos, i);
        if !v.is_finite() {
            if s.norm_squared() > 1e-30 {
                return Err(Error::SingularPotential);
            }
            continue;
        }
        let t = time_operator_matrix(&r, tau0);
        let vm = Mat4::identity() * Complex64::from(v);
        acc.add(s.dotc(&((t * vm - vm * t) * s)));
    }
    Ok(acc.value())
}

/// -z / sqrt(r^2 + a^2).
pub fn softened_coulomb(z: f64, a: f64) -> impl Fn(&[f64; 3]) -> f64 + Copy {
    move |r| -z / (r.iter().map(|x| x * x).sum::<f64>() + a * a).sqrt()
}

/// -F x, the dipole term of a static field along x.
pub fn dipole(field: f64) -> impl Fn(&[f64; 3]) -> f64 + Copy {
    move |r| -field * r[0]
}

/// Momentum component `axis` applied spectrally, returned in the position view.
fn momentum_component_in_position(f: &SpinorField, axis: usize) -> Components {
    let g = f.grid();
    let mut out = f.momentum_view().clone();
    for i in 0..g.sites() {
        let k = g.momentum(i)[axis];
        for plane in out.iter_mut() {
            plane[i] *= k;
        }
    }
    transform(g, &out, Direction::ToPosition)
}

/// <s.l> / hbar^2 = <Sigma.(r x p)> / 2. Only defined on a 3D grid.
pub fn spin_orbit_expect(f: &SpinorField) -> Result<f64> {
    let g = f.grid();
    if g.dim() != 3 {
        return Err(Error::UnsupportedDimension { operation: "spin_orbit_expect" });
    }
    f.check_localized()?;
    let d = dirac();
    let pos = f.position_view();
    let p: Vec<Components> = (0..3).map(|a| momentum_component_in_position(f, a)).collect();
    let mut acc = ComplexSum::default();
    for i in 0..g.sites() {
        let r = g.position(i);
        let pv: [Spinor; 3] = std::array::from_fn(|a| spinor_at(&p[a], i));
        let l = [
            pv[2] * Complex64::from(r[1]) - pv[1] * Complex64::from(r[2]),
            pv[0] * Complex64::from(r[2]) - pv[2] * Complex64::from(r[0]),
            pv[1] * Complex64::from(r[0]) - pv[0] * Complex64::from(r[1]),
        ];
        let sl: Spinor = (0..3).map(|a| d.sigma[a] * l[a]).sum();
        acc.add(spinor_at(pos, i).dotc(&sl));
    }
    Ok(0.5 * acc.value().re / (f.norm() * f.norm()))
}

/// <s.l> in 3D; zero on a 1D lattice, which has no orbital angular momentum.
fn spin_orbit_or_zero(f: &SpinorField) -> Result<f64> {
    if f.grid().dim() == 3 {
        spin_orbit_expect(f)
    } else {
        Ok(0.0)
    }
}

/// All first and second moments used by the uncertainty relations.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationReport {
    pub norm: f64,
    pub tau0: f64,
    pub r_mean: [f64; 3],
    /// <x_i^2> per axis.
    pub r2_axis: [f64; 3],
    /// <r^2>.
    pub r2_mean: f64,
    pub p_mean: [f64; 3],
    pub p2_axis: [f64; 3],
    pub p2_mean: f64,
    pub alpha_mean: [f64; 3],
    pub beta_mean: f64,
    pub alpha_r_mean: f64,
    pub alpha_p_mean: f64,
    pub h_mean: f64,
    pub h2_mean: f64,
    /// <|H|> = sum_k E(k) |psi(k)|^2; sets the Zitterbewegung frequency 2<|H|>.
    pub energy_magnitude_mean: f64,
    pub t_mean: f64,
    pub t2_mean: f64,
    /// <s.l> / hbar^2 (zero in 1D).
    pub spin_orbit_mean: f64,
    /// <beta K> = 1 + 2 <s.l>.
    pub beta_k_mean: f64,
    /// <[T, H]> from direct operator products.
    pub commutator_th: Complex64,
}

pub const EXPECTATION_CSV_HEADER: &str = "norm,x_mean,y_mean,z_mean,r2_mean,px_mean,py_mean,pz_mean,p2_mean,beta_mean,alpha_r_mean,alpha_p_mean,h_mean,h2_mean,energy_magnitude_mean,t_mean,t2_mean,spin_orbit_mean,beta_k_mean,commutator_th_re,commutator_th_im";

impl ExpectationReport {
    fn fields(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("norm", self.norm),
            ("x_mean", self.r_mean[0]),
            ("y_mean", self.r_mean[1]),
            ("z_mean", self.r_mean[2]),
            ("r2_mean", self.r2_mean),
            ("px_mean", self.p_mean[0]),
            ("py_mean", self.p_mean[1]),
            ("pz_mean", self.p_mean[2]),
            ("p2_mean", self.p2_mean),
            ("beta_mean", self.beta_mean),
            ("alpha_r_mean", self.alpha_r_mean),
            ("alpha_p_mean", self.alpha_p_mean),
            ("h_mean", self.h_mean),
            ("h2_mean", self.h2_mean),
            ("energy_magnitude_mean", self.energy_magnitude_mean),
            ("t_mean", self.t_mean),
            ("t2_mean", self.t2_mean),
            ("spin_orbit_mean", self.spin_orbit_mean),
            ("beta_k_mean", self.beta_k_mean),
            ("commutator_th_re", self.commutator_th.re),
            ("commutator_th_im", self.commutator_th.im),
        ]
    }

    /// One `key=value` line per field, in [`EXPECTATION_CSV_HEADER`] order.
    pub fn to_key_value(&self) -> String {
        self.fields().into_iter().map(|(k, v)| format!("{k}={}\n", fmt17(v))).collect()
    }

    pub fn csv_row(&self) -> String {
        self.fields().into_iter().map(|(_, v)| fmt17(v)).collect::<Vec<_>>().join(",")
    }

    pub fn delta_t(&self) -> f64 {
        variance(self.t2_mean, self.t_mean).sqrt()
    }

    pub fn delta_h(&self) -> f64 {
        variance(self.h2_mean, self.h_mean).sqrt()
    }

    pub fn delta_r(&self) -> f64 {
        let m2: f64 = self.r_mean.iter().map(|x| x * x).sum();
        (self.r2_mean - m2).max(0.0).sqrt()
    }

    pub fn delta_p(&self) -> f64 {
        let m2: f64 = self.p_mean.iter().map(|x| x * x).sum();
        (self.p2_mean - m2).max(0.0).sqrt()
    }

    pub fn delta_x(&self) -> f64 {
        variance(self.r2_axis[0], self.r_mean[0]).sqrt()
    }
}

/// Evaluates every moment of [`ExpectationReport`] on a normalized field.
pub fn expect_all(f: &SpinorField, tau0: f64) -> Result<ExpectationReport> {
    f.require_normalized()?;
    f.check_localized()?;
    let g = f.grid();
    let d = dirac();
    let pos = f.position_view();
    let mom = f.momentum_view();

    let mut r = [CompensatedSum::new(); 3];
    let mut r2 = [CompensatedSum::new(); 3];
    let mut alpha_r = CompensatedSum::new();
    for i in 0..g.sites() {
        let x = g.position(i);
        let s = spinor_at(pos, i);
        let w = s.norm_squared();
        for a in 0..3 {
            r[a].add(x[a] * w);
            r2[a].add(x[a] * x[a] * w);
        }
        let ar: Mat4 = (0..3).map(|a| d.alpha[a] * Complex64::from(x[a])).sum();
        alpha_r.add(s.dotc(&(ar * s)).re);
    }

    let t_psi = time_operator_apply(f, tau0)?;
    let t_mean = inner(pos, t_psi.position_view()).re;
    let t2_mean = t_psi.norm() * t_psi.norm();

    let mut p = [CompensatedSum::new(); 3];
    let mut p2 = [CompensatedSum::new(); 3];
    let mut alpha = [CompensatedSum::new(); 3];
    let (mut beta, mut alpha_p, mut h, mut h2, mut e_abs) =
        (CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new());
    let mut h_psi = g.zeros();
    for i in 0..g.sites() {
        let m = ModeMatrix::from_finite(g.momentum(i));
        let s = spinor_at(mom, i);
        let w = s.norm_squared();
        for a in 0..3 {
            p[a].add(m.k[a] * w);
            p2[a].add(m.k[a] * m.k[a] * w);
            alpha[a].add(s.dotc(&(d.alpha[a] * s)).re);
        }
        let bs = d.beta * s;
        beta.add(s.dotc(&bs).re);
        let hs = m.h * s;
        alpha_p.add(s.dotc(&(hs - bs)).re);
        h.add(s.dotc(&hs).re);
        h2.add(hs.norm_squared());
        e_abs.add(m.energy * w);
        set_spinor(&mut h_psi, i, &hs);
    }
    let h_pos = transform(g, &h_psi, Direction::ToPosition);
    let th = inner(t_psi.position_view(), &h_pos);
    let spin_orbit = spin_orbit_or_zero(f)?;

    let r_mean = r.map(|s| s.value());
    let r2_axis = r2.map(|s| s.value());
    let p2_axis = p2.map(|s| s.value());
    Ok(ExpectationReport {
        norm: f.norm(),
        tau0,
        r_mean,
        r2_axis,
        r2_mean: r2_axis.iter().sum(),
        p_mean: p.map(|s| s.value()),
        p2_axis,
        p2_mean: p2_axis.iter().sum(),
        alpha_mean: alpha.map(|s| s.value()),
        beta_mean: beta.value(),
        alpha_r_mean: alpha_r.value(),
        alpha_p_mean: alpha_p.value(),
        h_mean: h.value(),
        h2_mean: h2.value(),
        energy_magnitude_mean: e_abs.value(),
        t_mean,
        t2_mean,
        spin_orbit_mean: spin_orbit,
        beta_k_mean: 1.0 + 2.0 * spin_orbit,
        commutator_th: th - th.conj(),
    })
}

/// Time-energy uncertainty figures for one state.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyReport {
    pub expectation: ExpectationReport,
    pub delta_t: f64,
    pub delta_h: f64,
    pub delta_r: f64,
    pub delta_p: f64,
    pub product_th: f64,
    /// Half the modulus of the directly computed <[T, H]>.
    pub robertson_bound: f64,
    /// (3/2) |1 + (4/3) <s.l>|, reported next to the Robertson bound but never asserted.
    pub paper_bound: f64,
    /// Closed-form commutator, for comparison with `expectation.commutator_th`.
    pub commutator_closed_form: Complex64,
    /// Filled in from an evolved series by [`crate::evolution::mt_from_series`].
    pub mt_time: Option<f64>,
    pub satisfied_robertson: bool,
}

pub const UNCERTAINTY_CSV_HEADER: &str = "delta_t,delta_h,delta_r,delta_p,product_th,robertson_bound,paper_bound,satisfied_robertson,beta_mean,alpha_r_mean,alpha_p_mean,spin_orbit_mean,commutator_th_im,commutator_closed_form_im";

impl UncertaintyReport {
    fn fields(&self) -> Vec<(&'static str, String)> {
        let e = &self.expectation;
        vec![
            ("delta_t", fmt17(self.delta_t)),
            ("delta_h", fmt17(self.delta_h)),
            ("delta_r", fmt17(self.delta_r)),
            ("delta_p", fmt17(self.delta_p)),
            ("product_th", fmt17(self.product_th)),
            ("robertson_bound", fmt17(self.robertson_bound)),
            ("paper_bound", fmt17(self.paper_bound)),
            ("satisfied_robertson", self.satisfied_robertson.to_string()),
            ("beta_mean", fmt17(e.beta_mean)),
            ("alpha_r_mean", fmt17(e.alpha_r_mean)),
            ("alpha_p_mean", fmt17(e.alpha_p_mean)),
            ("spin_orbit_mean", fmt17(e.spin_orbit_mean)),
            ("commutator_th_im", fmt17(e.commutator_th.im)),
            ("commutator_closed_form_im", fmt17(self.commutator_closed_form.im)),
        ]
    }

    pub fn csv_row(&self) -> String {
        self.fields().into_iter().map(|(_, v)| v).collect::<Vec<_>>().join(",")
    }

    pub fn to_key_value(&self) -> String {
        let mut s: String = self.fields().into_iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        if let Some(mt) = self.mt_time {
            s.push_str(&format!("mt_time={}\n", fmt17(mt)));
        }
        s
    }
}

pub fn uncertainty_report(f: &SpinorField, tau0: f64) -> Result<UncertaintyReport> {
    let e = expect_all(f, tau0)?;
    let closed = commutator_th_closed_form(f, tau0)?;
    let (delta_t, delta_h, delta_r, delta_p) = (e.delta_t(), e.delta_h(), e.delta_r(), e.delta_p());
    let product_th = delta_t * delta_h;
    let robertson_bound = 0.5 * e.commutator_th.norm();
    let paper_bound = 1.5 * (1.0 + 4.0 / 3.0 * e.spin_orbit_mean).abs();
    Ok(UncertaintyReport {
        delta_t,
        delta_h,
        delta_r,
        delta_p,
        product_th,
        robertson_bound,
        paper_bound,
        commutator_closed_form: closed,
        mt_time: None,
        satisfied_robertson: product_th >= robertson_bound - 1e-9,
        expectation: e,
    })
}
