//! Free Dirac time evolution in both pictures.
//!
//! The Schrödinger picture propagates every momentum mode with the exact
//! 4x4 propagator. The Heisenberg picture evaluates the closed-form operator
//! solutions on the initial state, mode by mode:
//!
//! ```text
//! alpha(t) = p/H + eta W            eta  = alpha - p/H
//! beta(t)  = 1/H + zeta W           zeta = beta - 1/H
//! r(t)     = r + (p/H) t + (i/2) eta H^-1 (W - 1)
//! T(t)     = alpha(t).r(t) + beta(t) tau0
//! ```
//!
//! with W = exp(-2iHt). The two pictures must agree; that agreement is the
//! main correctness check of the crate.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dirac::{dirac, Mat4, ModeMatrix};
use crate::error::{Error, Result};
use crate::fit::{dominant_oscillation, linear_fit};
use crate::grid::{transform, Components, Direction, GridSpec};
use crate::numeric::{fmt17, variance, CompensatedSum, ComplexSum};
use crate::observables::{expect_all, ExpectationReport};
use crate::wavepacket::{inner, set_spinor, spinor_at, PacketSpec, SpinorField};

/// Environment variable holding the worker count for series evaluation.
pub const WORKERS_ENV: &str = "TIMEOP_WORKERS";

/// Propagates a normalized field by time `t`.
pub fn evolve(f: &SpinorField, t: f64) -> Result<SpinorField> {
    if !t.is_finite() {
        return Err(Error::NonFinite("evolution time"));
    }
    f.require_normalized()?;
    if t == 0.0 {
        return Ok(f.clone());
    }
    let out = f.apply_modewise(|m| m.propagator(t));
    out.check_localized()?;
    Ok(out)
}

/// Drift coefficient <p/H> (the group velocity, c = 1).
pub fn group_velocity(f: &SpinorField) -> [f64; 3] {
    let n2 = f.norm() * f.norm();
    std::array::from_fn(|a| f.modewise_expectation(|m| m.inverse() * Complex64::from(m.k[a])).re / n2)
}

/// <(p/H)^2> over the active axes; the slope of <T(t)> for positive-energy states.
pub fn drift_coefficient(f: &SpinorField) -> f64 {
    let g = f.grid();
    let mut acc = CompensatedSum::new();
    for i in 0..g.sites() {
        let k = g.momentum(i);
        let k2: f64 = k.iter().map(|x| x * x).sum();
        acc.add(k2 / (k2 + 1.0) * f.spinor_at_mode(i).norm_squared());
    }
    acc.value() / (f.norm() * f.norm())
}

/// Components of a Heisenberg-picture position expectation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionTerms {
    pub initial: [f64; 3],
    pub drift: [f64; 3],
    pub oscillating: [f64; 3],
}

impl PositionTerms {
    pub fn total(&self) -> [f64; 3] {
        std::array::from_fn(|a| self.initial[a] + self.drift[a] + self.oscillating[a])
    }
}

/// Components of a Heisenberg-picture time-operator expectation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeOperatorTerms {
    /// <T(0)> = <alpha.r> + tau0 <beta>.
    pub initial: f64,
    /// <(p/H)^2> t.
    pub linear: f64,
    /// Everything else: Zitterbewegung and branch-interference terms.
    pub oscillating: f64,
}

impl TimeOperatorTerms {
    pub fn total(&self) -> f64 {
        self.initial + self.linear + self.oscillating
    }
}

/// Heisenberg-picture expectations on a fixed initial state. The position
/// operator applied to the initial state is computed once and reused for
/// every time.
pub struct HeisenbergEvaluator {
    f0: SpinorField,
    /// r_a psi0 in the momentum view, one entry per active axis.
    r_psi: Vec<Components>,
    r0: [f64; 3],
    alpha_r0: f64,
    beta0: f64,
}

struct ModeOps {
    hinv: Mat4,
    w: Mat4,
    a: [Mat4; 3],
    eta: [Mat4; 3],
}

impl ModeOps {
    fn new(m: &ModeMatrix, t: f64) -> Self {
        let d = dirac();
        let hinv = m.inverse();
        let a: [Mat4; 3] = std::array::from_fn(|i| hinv * Complex64::from(m.k[i]));
        let eta = std::array::from_fn(|i| d.alpha[i] - a[i]);
        Self { hinv, w: m.propagator(2.0 * t), a, eta }
    }
}

impl HeisenbergEvaluator {
    pub fn new(f0: &SpinorField) -> Result<Self> {
        f0.require_normalized()?;
        f0.check_localized()?;
        let g = *f0.grid();
        let pos = f0.position_view();
        let mut r_psi = Vec::with_capacity(g.dim());
        let mut r0 = [0.0; 3];
        for a in 0..g.dim() {
            let mut x = pos.clone();
            for i in 0..g.sites() {
                let xa = g.position(i)[a];
                for plane in x.iter_mut() {
                    plane[i] *= xa;
                }
            }
            r0[a] = inner(pos, &x).re;
            r_psi.push(transform(&g, &x, Direction::ToMomentum));
        }
        let d = dirac();
        let mut alpha_r0 = 0.0;
        for (a, rp) in r_psi.iter().enumerate() {
            let mut alpha_rp = g.zeros();
            for i in 0..g.sites() {
                set_spinor(&mut alpha_rp, i, &(d.alpha[a] * spinor_at(rp, i)));
            }
            alpha_r0 += inner(f0.momentum_view(), &alpha_rp).re;
        }
        let beta0 = f0.modewise_expectation(|_| d.beta).re;
        Ok(Self { f0: f0.clone(), r_psi, r0, alpha_r0, beta0 })
    }

    fn grid(&self) -> &GridSpec {
        self.f0.grid()
    }

    fn modewise<F>(&self, t: f64, mut body: F)
    where
        F: FnMut(usize, &ModeMatrix, &ModeOps),
    {
        let g = self.grid();
        for i in 0..g.sites() {
            let m = ModeMatrix::from_finite(g.momentum(i));
            let ops = ModeOps::new(&m, t);
            body(i, &m, &ops);
        }
    }

    /// <alpha_a(t)> for every axis.
    pub fn alpha(&self, t: f64) -> [f64; 3] {
        let mut acc = [ComplexSum::default(); 3];
        self.modewise(t, |i, _, o| {
            let s = self.f0.spinor_at_mode(i);
            for a in 0..3 {
                acc[a].add(s.dotc(&((o.a[a] + o.eta[a] * o.w) * s)));
            }
        });
        acc.map(|c| c.value().re)
    }

    /// <beta(t)>.
    pub fn beta(&self, t: f64) -> f64 {
        let d = dirac();
        let mut acc = ComplexSum::default();
        self.modewise(t, |i, _, o| {
            let s = self.f0.spinor_at_mode(i);
            acc.add(s.dotc(&((o.hinv + (d.beta - o.hinv) * o.w) * s)));
        });
        acc.value().re
    }

    /// <r(t)> split into initial value, linear drift, and oscillating term.
    pub fn position_terms(&self, t: f64) -> PositionTerms {
        let dim = self.grid().dim();
        let mut drift = [CompensatedSum::new(); 3];
        let mut osc = [ComplexSum::default(); 3];
        let half_i = Complex64::new(0.0, 0.5);
        self.modewise(t, |i, _, o| {
            let s = self.f0.spinor_at_mode(i);
            let wm1 = o.w - Mat4::identity();
            for a in 0..dim {
                drift[a].add(s.dotc(&(o.a[a] * s)).re * t);
                osc[a].add(s.dotc(&(o.eta[a] * o.hinv * wm1 * s)) * half_i);
            }
        });
        PositionTerms {
            initial: self.r0,
            drift: drift.map(|c| c.value()),
            oscillating: osc.map(|c| c.value().re),
        }
    }

    pub fn position(&self, t: f64) -> [f64; 3] {
        self.position_terms(t).total()
    }

    /// <T(t)> split into <T(0)>, the linear term <(p/H)^2> t, and the rest.
    pub fn time_operator_terms(&self, t: f64, tau0: f64) -> TimeOperatorTerms {
        let dim = self.grid().dim();
        let d = dirac();
        let half_i = Complex64::new(0.0, 0.5);
        let mut alpha_r = ComplexSum::default();
        let mut beta = ComplexSum::default();
        let mut slope = CompensatedSum::new();
        self.modewise(t, |i, m, o| {
            let s = self.f0.spinor_at_mode(i);
            let wm1 = o.w - Mat4::identity();
            for a in 0..dim {
                let u = (o.a[a] + o.eta[a] * o.w) * s;
                let v = spinor_at(&self.r_psi[a], i) + (o.a[a] * Complex64::from(t) + o.eta[a] * o.hinv * wm1 * half_i) * s;
                alpha_r.add(u.dotc(&v));
            }
            beta.add(s.dotc(&((o.hinv + (d.beta - o.hinv) * o.w) * s)));
            let k2: f64 = m.k[..dim].iter().map(|x| x * x).sum();
            slope.add(k2 / (m.energy * m.energy) * s.norm_squared());
        });
        let total = alpha_r.value().re + tau0 * beta.value().re;
        let initial = self.alpha_r0 + tau0 * self.beta0;
        let linear = slope.value() * t;
        TimeOperatorTerms { initial, linear, oscillating: total - initial - linear }
    }

    pub fn time_operator(&self, t: f64, tau0: f64) -> f64 {
        self.time_operator_terms(t, tau0).total()
    }
}

/// Heisenberg-picture <r(t)> evaluated on the initial state.
pub fn heisenberg_position(f0: &SpinorField, t: f64) -> Result<[f64; 3]> {
    Ok(HeisenbergEvaluator::new(f0)?.position(t))
}

/// Heisenberg-picture <T(t)> evaluated on the initial state.
pub fn heisenberg_time_operator(f0: &SpinorField, t: f64, tau0: f64) -> Result<f64> {
    Ok(HeisenbergEvaluator::new(f0)?.time_operator(t, tau0))
}

/// Expectations sampled along a free evolution.
#[derive(Debug, Clone)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    pub reports: Vec<ExpectationReport>,
    /// Heisenberg <x(t)> minus the Schrödinger value, per sample.
    pub picture_diff_x: Vec<f64>,
    /// Heisenberg <T(t)> minus the Schrödinger value, per sample.
    pub picture_diff_t: Vec<f64>,
    pub grid: GridSpec,
    pub tau0: f64,
    pub packet: Option<PacketSpec>,
    /// Set when a guard fired mid-series; the vectors then hold the samples
    /// before the failure.
    pub aborted: Option<String>,
}

pub const SERIES_CSV_HEADER: &str =
    "t,norm,x_mean,p_mean,h_mean,h2_mean,beta_mean,t_mean,t2_mean,delta_t,delta_h,picture_diff_x,picture_diff_t";

impl ObservableSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn with_packet(mut self, spec: PacketSpec) -> Self {
        self.packet = Some(spec);
        self
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(256 * (self.len() + 1));
        out.push_str(SERIES_CSV_HEADER);
        out.push('\n');
        for (i, (t, r)) in self.times.iter().zip(&self.reports).enumerate() {
            let cols = [
                *t,
                r.norm,
                r.r_mean[0],
                r.p_mean[0],
                r.h_mean,
                r.h2_mean,
                r.beta_mean,
                r.t_mean,
                r.t2_mean,
                r.delta_t(),
                r.delta_h(),
                self.picture_diff_x[i],
                self.picture_diff_t[i],
            ];
            let row: Vec<String> = cols.iter().map(|&v| fmt17(v)).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

fn worker_count() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Samples `samples` uniformly spaced times in [0, horizon], each a fresh
/// propagation from t = 0.
pub fn run_series(f0: &SpinorField, horizon: f64, samples: usize, tau0: f64) -> Result<ObservableSeries> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
    }
    if samples < 8 {
        return Err(Error::InvalidArgument(format!("samples must be >= 8, got {samples}")));
    }
    let heis = HeisenbergEvaluator::new(f0)?;
    let times: Vec<f64> = (0..samples).map(|j| horizon * j as f64 / (samples - 1) as f64).collect();
    let sample = |&t: &f64| -> Result<(ExpectationReport, f64, f64)> {
        let ft = evolve(f0, t)?;
        let rep = expect_all(&ft, tau0)?;
        let dx = heis.position(t)[0] - rep.r_mean[0];
        let dt = heis.time_operator(t, tau0) - rep.t_mean;
        Ok((rep, dx, dt))
    };
    let results: Vec<Result<(ExpectationReport, f64, f64)>> = match worker_count() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("{WORKERS_ENV}: {e}")))?
            .install(|| times.par_iter().map(sample).collect()),
        None => times.par_iter().map(sample).collect(),
    };

    let mut series = ObservableSeries {
        times: Vec::with_capacity(samples),
        reports: Vec::with_capacity(samples),
        picture_diff_x: Vec::with_capacity(samples),
        picture_diff_t: Vec::with_capacity(samples),
        grid: *f0.grid(),
        tau0,
        packet: None,
        aborted: None,
    };
    for (t, r) in times.iter().zip(results) {
        match r {
            Ok((rep, dx, dt)) => {
                series.times.push(*t);
                series.reports.push(rep);
                series.picture_diff_x.push(dx);
                series.picture_diff_t.push(dt);
            }
            Err(e) if e.is_numerical_guard() => {
                series.aborted = Some(format!("t = {t}: {e}"));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(series)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftTarget {
    PositionX,
    TimeOperator,
}

/// Straight-line drift plus the dominant oscillation left in the residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftAnalysis {
    pub slope: f64,
    pub intercept: f64,
    pub oscillation_amplitude: f64,
    /// Angular frequency.
    pub oscillation_frequency: f64,
    /// RMS of the line-fit residual.
    pub fit_residual: f64,
}

impl DriftAnalysis {
    pub fn to_key_value(&self) -> String {
        format!(
            "slope={}\nintercept={}\noscillation_amplitude={}\noscillation_frequency={}\nfit_residual={}\n",
            fmt17(self.slope),
            fmt17(self.intercept),
            fmt17(self.oscillation_amplitude),
            fmt17(self.oscillation_frequency),
            fmt17(self.fit_residual)
        )
    }
}

/// Zitterbewegung angular frequency 2<|H|> of a series.
pub fn zitterbewegung_frequency(s: &ObservableSeries) -> f64 {
    2.0 * s.reports.first().map_or(1.0, |r| r.energy_magnitude_mean)
}

pub fn analyze_drift(s: &ObservableSeries, which: DriftTarget) -> Result<DriftAnalysis> {
    let n = s.len();
    if n < 64 {
        return Err(Error::InsufficientSampling(format!("need >= 64 samples, have {n}")));
    }
    let dt = s.times[1] - s.times[0];
    let span = s.times[n - 1] - s.times[0];
    let omega_zb = zitterbewegung_frequency(s);
    let period = 2.0 * std::f64::consts::PI / omega_zb;
    if span < 5.0 * period {
        return Err(Error::InsufficientSampling(format!(
            "series spans {span:.4} but 5 Zitterbewegung periods need {:.4}",
            5.0 * period
        )));
    }
    let nyquist = std::f64::consts::PI / dt;
    if nyquist <= omega_zb {
        return Err(Error::InsufficientSampling(format!(
            "Nyquist frequency {nyquist:.4} does not exceed the Zitterbewegung frequency {omega_zb:.4}"
        )));
    }
    let y: Vec<f64> = match which {
        DriftTarget::PositionX => s.reports.iter().map(|r| r.r_mean[0]).collect(),
        DriftTarget::TimeOperator => s.reports.iter().map(|r| r.t_mean).collect(),
    };
    let fit = linear_fit(&s.times, &y);
    let rms = (fit.residuals.iter().map(|r| r * r).sum::<f64>() / n as f64).sqrt();
    let osc = dominant_oscillation(dt, &fit.residuals);
    Ok(DriftAnalysis {
        slope: fit.slope,
        intercept: fit.intercept,
        oscillation_amplitude: osc.amplitude,
        oscillation_frequency: osc.frequency,
        fit_residual: rms,
    })
}

/// Observable columns available to [`mt_from_series`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    PositionX,
    TimeOperator,
    Energy,
}

impl Observable {
    pub fn mean(&self, r: &ExpectationReport) -> f64 {
        match self {
            Observable::PositionX => r.r_mean[0],
            Observable::TimeOperator => r.t_mean,
            Observable::Energy => r.h_mean,
        }
    }

    pub fn spread(&self, r: &ExpectationReport) -> f64 {
        match self {
            Observable::PositionX => variance(r.r2_axis[0], r.r_mean[0]).sqrt(),
            Observable::TimeOperator => r.delta_t(),
            Observable::Energy => r.delta_h(),
        }
    }
}

/// Mandelstam-Tamm time Delta A / |d<A>/dt| at the series midpoint, with a
/// central-difference derivative.
pub fn mt_from_series(s: &ObservableSeries, which: Observable) -> Result<f64> {
    let n = s.len();
    if n < 3 {
        return Err(Error::InsufficientSampling(format!("need >= 3 samples, have {n}")));
    }
    let mid = n / 2;
    let deriv = (which.mean(&s.reports[mid + 1]) - which.mean(&s.reports[mid - 1])) / (s.times[mid + 1] - s.times[mid - 1]);
    if deriv.abs() < 1e-12 {
        return Err(Error::StationaryObservable { derivative: deriv });
    }
    Ok(which.spread(&s.reports[mid]) / deriv.abs())
}
