//! Invariant suites run by `timeop selfcheck`, one per module.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Tolerances;
use crate::dirac::{dirac, Mat4, ModeMatrix};
use crate::error::{Error, Result};
use crate::evolution::{analyze_drift, drift_coefficient, evolve, run_series, DriftTarget, HeisenbergEvaluator};
use crate::grid::GridSpec;
use crate::observables::{
    commutator_th_closed_form, commutator_tv, dipole, expect_all, softened_coulomb, uncertainty_report, TAU0,
};
use crate::tunneling::{barrier_points, barrier_width, calibrate_velocity, lab_time, Calibration, TunnelingScenario};
use crate::units::seconds_to_as;
use crate::wavepacket::{build_packet, positive_energy_fraction, random_seed, read_snapshot, write_snapshot, PacketSpec, SpinorField};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SelfcheckReport {
    pub checks: Vec<Check>,
}

impl SelfcheckReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    /// Fixed-width pass/fail table, one line per check.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<12} {:<34} {:<6} detail", "suite", "check", "result");
        for c in &self.checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{:<12} {:<34} {:<6} {}", c.suite, c.name, verdict, c.detail);
        }
        let _ = writeln!(out, "{} checks, {} failed", self.checks.len(), self.failures());
        out
    }
}

struct Suite {
    name: &'static str,
    checks: Vec<Check>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self { name, checks: Vec::new() }
    }

    /// Records `err <= tol`; an error from the measurement fails the check.
    fn within(&mut self, name: &'static str, measured: Result<f64>, tol: f64) {
        let (passed, detail) = match measured {
            Ok(err) => (err <= tol, format!("error {err:.3e} (tolerance {tol:.1e})")),
            Err(e) => (false, e.to_string()),
        };
        self.checks.push(Check { suite: self.name, name, passed, detail });
    }

    fn holds(&mut self, name: &'static str, outcome: Result<(bool, String)>) {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, e.to_string()));
        self.checks.push(Check { suite: self.name, name, passed, detail });
    }
}

fn max_abs(m: &Mat4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Grid used by the lattice suites: coarse enough to run in well under a second.
fn check_grid() -> GridSpec {
    GridSpec::new(1, 1024, 400.0).expect("valid grid")
}

fn random_packet(rng: &mut ChaCha8Rng, project: bool) -> Result<SpinorField> {
    let spec = PacketSpec {
        center: [rng.random_range(-20.0..20.0), 0.0, 0.0],
        width: rng.random_range(5.0..12.0),
        mean_momentum: [rng.random_range(-1.0..1.0), 0.0, 0.0],
        spinor_seed: random_seed(rng),
        project_positive: project,
        ..PacketSpec::default()
    };
    build_packet(&spec, &check_grid())
}

fn dirac_suite(tol: &Tolerances) -> Suite {
    let mut s = Suite::new("dirac");
    let d = dirac();
    let id = Mat4::identity();
    let mut err: f64 = max_abs(&(d.beta * d.beta - id));
    for i in 0..3 {
        err = err.max(max_abs(&(d.alpha[i] * d.beta + d.beta * d.alpha[i])));
        for j in 0..3 {
            let delta = if i == j { 2.0 } else { 0.0 };
            err = err.max(max_abs(&(d.alpha[i] * d.alpha[j] + d.alpha[j] * d.alpha[i] - id * Complex64::from(delta))));
        }
    }
    s.within("anticommutators", Ok(err), tol.identity);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let modes: Vec<ModeMatrix> = (0..200)
        .map(|_| ModeMatrix::new(std::array::from_fn(|_| rng.random_range(-50.0..50.0))).expect("finite"))
        .collect();
    let scaled = |f: &dyn Fn(&ModeMatrix) -> f64| modes.iter().map(f).fold(0.0, f64::max);
    s.within(
        "h^2 = E^2",
        Ok(scaled(&|m| max_abs(&(m.h * m.h - id * Complex64::from(m.energy * m.energy))) / (m.energy * m.energy))),
        tol.identity,
    );
    s.within(
        "projector identities",
        Ok(scaled(&|m| {
            let (p, q) = m.projectors();
            max_abs(&(p * p - p)).max(max_abs(&(p * q))).max(max_abs(&(p + q - id)))
        })),
        tol.identity,
    );
    s.within(
        "propagator unitary",
        Ok(scaled(&|m| {
            let u = m.propagator(10.0 / m.energy);
            max_abs(&(u.adjoint() * u - id))
        })),
        tol.identity,
    );
    s
}

fn wavepacket_suite() -> Suite {
    let mut s = Suite::new("wavepacket");
    let grid = check_grid();
    let packet = build_packet(&PacketSpec::default(), &grid);
    s.within("normalized", packet.as_ref().map(|f| (f.norm() - 1.0).abs()).map_err(clone_err), 1e-12);
    s.within(
        "parseval",
        packet
            .as_ref()
            .map(|f| {
                let pos: f64 = f.position_view().iter().flatten().map(|z| z.norm_sqr()).sum();
                (pos - 1.0).abs()
            })
            .map_err(clone_err),
        1e-12,
    );
    s.within(
        "positive projection",
        packet.as_ref().map(|f| (1.0 - positive_energy_fraction(f)).abs()).map_err(clone_err),
        1e-12,
    );
    s.within(
        "snapshot round trip",
        packet.as_ref().map_err(clone_err).and_then(|f| {
            let mut buf = Vec::new();
            write_snapshot(f, &mut buf)?;
            let back = read_snapshot(buf.as_slice())?;
            let diff = f
                .position_view()
                .iter()
                .flatten()
                .zip(back.position_view().iter().flatten())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            Ok(diff)
        }),
        0.0,
    );
    s
}

fn clone_err(e: &Error) -> Error {
    Error::InvalidArgument(e.to_string())
}

fn observables_suite(tol: &Tolerances) -> Suite {
    let mut s = Suite::new("observables");
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let fields: Result<Vec<SpinorField>> = (0..6).map(|i| random_packet(&mut rng, i % 2 == 0)).collect();
    let fields = match fields {
        Ok(f) => f,
        Err(e) => {
            s.holds("build packets", Err(e));
            return s;
        }
    };
    let over = |f: &dyn Fn(&SpinorField) -> Result<f64>| -> Result<f64> {
        fields.iter().try_fold(0.0f64, |acc, x| Ok(acc.max(f(x)?)))
    };
    s.within(
        "T^2 = r^2 + tau0^2",
        over(&|f| {
            let e = expect_all(f, TAU0)?;
            Ok((e.t2_mean - e.r2_mean - TAU0 * TAU0).abs())
        }),
        tol.identity,
    );
    s.within(
        "H^2 = p^2 + 1",
        over(&|f| {
            let e = expect_all(f, TAU0)?;
            Ok((e.h2_mean - e.p2_mean - 1.0).abs())
        }),
        tol.identity,
    );
    s.within(
        "[T, V] = 0",
        over(&|f| {
            let a = commutator_tv(f, TAU0, softened_coulomb(1.0, 0.5))?.norm();
            let b = commutator_tv(f, TAU0, dipole(0.05))?.norm();
            Ok(a.max(b))
        }),
        tol.identity,
    );
    s.within(
        "closed-form [T, H]",
        over(&|f| {
            let direct = expect_all(f, TAU0)?.commutator_th;
            let closed = commutator_th_closed_form(f, TAU0)?;
            Ok((direct - closed).norm() / direct.norm())
        }),
        tol.commutator,
    );
    s.holds(
        "Robertson inequality",
        fields.iter().try_fold((true, f64::INFINITY), |(ok, worst), f| {
            let r = uncertainty_report(f, TAU0)?;
            let slack = r.product_th - r.robertson_bound;
            Ok((ok && slack >= -tol.robertson, worst.min(slack)))
        })
        .map(|(ok, worst)| (ok, format!("minimum slack {worst:.3e}"))),
    );
    s
}

fn evolution_suite(tol: &Tolerances) -> Suite {
    let mut s = Suite::new("evolution");
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    s.within(
        "Heisenberg = Schrödinger",
        (|| {
            let f0 = random_packet(&mut rng, false)?;
            let h = HeisenbergEvaluator::new(&f0)?;
            let mut err: f64 = 0.0;
            for t in [0.3, 1.7, 5.0, 12.5, 30.0] {
                let e = expect_all(&evolve(&f0, t)?, TAU0)?;
                err = err
                    .max((h.alpha(t)[0] - e.alpha_mean[0]).abs())
                    .max((h.beta(t) - e.beta_mean).abs())
                    .max((h.position(t)[0] - e.r_mean[0]).abs())
                    .max((h.time_operator(t, TAU0) - e.t_mean).abs());
            }
            Ok(err)
        })(),
        tol.picture,
    );
    s.within(
        "norm conserved",
        (|| {
            let f0 = random_packet(&mut rng, false)?;
            Ok((evolve(&f0, 25.0)?.norm() - 1.0).abs())
        })(),
        1e-12,
    );
    s.within(
        "<T> slope = <p^2/E^2>",
        (|| {
            let spec = PacketSpec { width: 8.0, mean_momentum: [0.5, 0.0, 0.0], ..PacketSpec::default() };
            let f0 = build_packet(&spec, &check_grid())?;
            let series = run_series(&f0, 40.0, 128, TAU0)?;
            let fit = analyze_drift(&series, DriftTarget::TimeOperator)?;
            let c = drift_coefficient(&f0);
            Ok((fit.slope - c).abs() / c)
        })(),
        1e-3,
    );
    s
}

fn tunneling_suite(tol: &Tolerances) -> Suite {
    let mut s = Suite::new("tunneling");
    let cal = Calibration::default();
    let ratio = calibrate_velocity(cal.lab_time, cal.width_au);
    s.within("inverse velocity ratio", ratio.as_ref().map(|r| (1.0 / r / 304.22 - 1.0).abs()).map_err(clone_err), tol.regression);
    for (name, width, expected) in [("lab time at 20 a.u.", 20.0, 85.4), ("lab time at 8 a.u.", 8.0, 34.2)] {
        s.within(
            name,
            ratio
                .as_ref()
                .map_err(clone_err)
                .and_then(|&r| Ok((seconds_to_as(lab_time(width, r)?) / expected - 1.0).abs())),
            tol.regression,
        );
    }
    s.within(
        "width = root difference",
        (|| {
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            let mut err: f64 = 0.0;
            for _ in 0..1000 {
                let ip = rng.random_range(0.1..2.0);
                let z = rng.random_range(0.5..3.0);
                let f = ip * ip / (4.0 * z) * rng.random_range(0.01..0.99);
                let sc = TunnelingScenario::new(ip, z, f)?;
                let (a, b) = barrier_points(&sc)?;
                let w = barrier_width(&sc)?;
                err = err.max(((b - a) - w).abs() / w);
            }
            Ok(err)
        })(),
        1e-12,
    );
    s.holds(
        "over-barrier error",
        Ok(match TunnelingScenario::new(0.5, 1.0, 0.1) {
            Err(Error::OverBarrier { ratio }) => (true, format!("4 z F / ip^2 = {ratio}")),
            other => (false, format!("{other:?}")),
        }),
    );
    s.within(
        "lab time proportional to width",
        ratio.as_ref().map_err(clone_err).and_then(|&r| {
            let base = lab_time(1.0, r)?;
            [0.0, 8.0, 13.0, 20.0].iter().try_fold(0.0f64, |acc, &w| {
                let lab = lab_time(w, r)?;
                Ok(acc.max((lab - w * base).abs() / lab.max(f64::MIN_POSITIVE)))
            })
        }),
        1e-12,
    );
    s
}

/// Runs every suite with the given tolerances.
pub fn run_selfcheck(tol: &Tolerances) -> SelfcheckReport {
    let suites = [dirac_suite(tol), wavepacket_suite(), observables_suite(tol), evolution_suite(tol), tunneling_suite(tol)];
    SelfcheckReport { checks: suites.into_iter().flat_map(|s| s.checks).collect() }
}
