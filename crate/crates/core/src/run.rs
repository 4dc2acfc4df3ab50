//! Orchestration behind the `timeop` subcommands.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::{FieldSelection, Mode, RunConfig};
use crate::error::{Error, Result};
use crate::evolution::{
    analyze_drift, drift_coefficient, group_velocity, mt_from_series, run_series, DriftTarget, Observable,
};
use crate::numeric::fmt17;
use crate::observables::{uncertainty_report, UNCERTAINTY_CSV_HEADER};
use crate::selfcheck::run_selfcheck;
use crate::tunneling::{
    calibrated_group_velocity, field_for_width, intensity_sweep, sweep_csv, sweep_fields,
};
use crate::wavepacket::{build_packet, packet_family};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_GUARD: u8 = 2;
pub const EXIT_SELFCHECK: u8 = 3;

/// Exit status for an error: numerical guards map to 2, everything else to 1.
pub fn exit_code(err: &Error) -> u8 {
    if err.is_numerical_guard() {
        EXIT_GUARD
    } else {
        EXIT_INVALID
    }
}

/// What a run produced. Files are already written when the config names an
/// output path; otherwise the caller prints `primary` and `summary`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub exit_code: u8,
    /// CSV table, or the pass/fail table in selfcheck mode.
    pub primary: String,
    /// key=value summary.
    pub summary: String,
    pub written: Vec<PathBuf>,
}

/// Path of the summary written next to `out`.
pub fn summary_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".summary");
    PathBuf::from(s)
}

pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    let (exit, primary, summary) = match cfg.mode {
        Mode::Evolve => run_evolve(cfg)?,
        Mode::Uncertainty => run_uncertainty(cfg)?,
        Mode::Tunneling => run_tunneling(cfg)?,
        Mode::Selfcheck => {
            let report = run_selfcheck(&cfg.tolerances);
            let code = if report.all_passed() { EXIT_OK } else { EXIT_SELFCHECK };
            let summary = format!("checks={}\nfailed={}\n", report.checks.len(), report.failures());
            (code, report.table(), summary)
        }
    };
    let mut written = Vec::new();
    if let Some(out) = &cfg.out {
        std::fs::write(out, &primary)?;
        written.push(out.clone());
        let sp = summary_path(out);
        std::fs::write(&sp, &summary)?;
        written.push(sp);
    }
    Ok(RunOutput { exit_code: exit, primary, summary, written })
}

/// Evolution horizon and sample count for an evolve run.
///
/// Without an explicit horizon the run lasts 40 pi or until the packet's
/// leading 5-sigma edge would reach the central half of the box, whichever is
/// shorter. Without an explicit sample count the series gets at least 512
/// samples and enough to put the Zitterbewegung frequency below half the
/// Nyquist frequency.
pub fn evolve_schedule(cfg: &RunConfig, speed: f64, zb_frequency: f64) -> (f64, usize) {
    let horizon = cfg.horizon.unwrap_or_else(|| {
        let room = cfg.grid.central_half_width() - cfg.packet.center[0].abs() - 5.0 * cfg.packet.width;
        let limit = if speed > 0.0 { room / speed } else { f64::INFINITY };
        (40.0 * PI).min(limit.max(0.0))
    });
    let samples = cfg.samples.unwrap_or_else(|| {
        let needed = (horizon * 2.0 * zb_frequency / PI).ceil() as usize + 1;
        needed.max(512)
    });
    (horizon, samples)
}

fn kv(s: &mut String, k: &str, v: String) {
    let _ = writeln!(s, "{k}={v}");
}

fn run_evolve(cfg: &RunConfig) -> Result<(u8, String, String)> {
    let f0 = build_packet(&cfg.packet, &cfg.grid).map_err(|e| e.in_module("wavepacket"))?;
    let v = group_velocity(&f0);
    let speed = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let e_abs = f0.modewise_expectation(|m| m.sign() * m.h).re;
    let (horizon, samples) = evolve_schedule(cfg, speed, 2.0 * e_abs);
    if horizon <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "packet at center {} with width {} leaves no room to evolve; move it or enlarge the box",
            cfg.packet.center[0], cfg.packet.width
        )));
    }
    log::info!("evolve: horizon {horizon}, {samples} samples");
    let series = run_series(&f0, horizon, samples, cfg.tau0)
        .map_err(|e| e.in_module("evolution"))?
        .with_packet(cfg.packet.clone());

    let mut summary = String::new();
    kv(&mut summary, "mode", "evolve".into());
    kv(&mut summary, "horizon", fmt17(horizon));
    kv(&mut summary, "samples", samples.to_string());
    kv(&mut summary, "group_velocity", fmt17(v[0]));
    kv(&mut summary, "velocity_ratio", fmt17(speed * speed));
    kv(&mut summary, "drift_coefficient", fmt17(drift_coefficient(&f0)));
    kv(&mut summary, "zitterbewegung_frequency", fmt17(2.0 * e_abs));
    let mut code = EXIT_OK;
    if let Some(why) = &series.aborted {
        kv(&mut summary, "aborted", why.clone());
        code = EXIT_GUARD;
    }
    match analyze_drift(&series, DriftTarget::TimeOperator) {
        Ok(a) => summary.push_str(&a.to_key_value()),
        Err(e) => kv(&mut summary, "drift_error", e.to_string()),
    }
    match analyze_drift(&series, DriftTarget::PositionX) {
        Ok(a) => {
            kv(&mut summary, "position_slope", fmt17(a.slope));
            kv(&mut summary, "position_oscillation_amplitude", fmt17(a.oscillation_amplitude));
            kv(&mut summary, "position_oscillation_frequency", fmt17(a.oscillation_frequency));
        }
        Err(e) => kv(&mut summary, "position_drift_error", e.to_string()),
    }
    let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    kv(&mut summary, "max_picture_diff_x", fmt17(max_abs(&series.picture_diff_x)));
    kv(&mut summary, "max_picture_diff_t", fmt17(max_abs(&series.picture_diff_t)));
    match mt_from_series(&series, Observable::TimeOperator) {
        Ok(t) => kv(&mut summary, "mt_time_t", fmt17(t)),
        Err(e) => kv(&mut summary, "mt_time_t", format!("undefined ({e})")),
    }
    Ok((code, series.to_csv(), summary))
}

fn run_uncertainty(cfg: &RunConfig) -> Result<(u8, String, String)> {
    let family = packet_family(&cfg.packet, &cfg.grid, cfg.family_size, cfg.rng_seed);
    let mut csv = format!("member,{UNCERTAINTY_CSV_HEADER}\n");
    let mut all = true;
    let mut min_slack = f64::INFINITY;
    for (i, spec) in family.iter().enumerate() {
        let f = build_packet(spec, &cfg.grid).map_err(|e| e.in_module("wavepacket"))?;
        let r = uncertainty_report(&f, cfg.tau0).map_err(|e| e.in_module("observables"))?;
        all &= r.satisfied_robertson;
        min_slack = min_slack.min(r.product_th - r.robertson_bound);
        let _ = writeln!(csv, "{i},{}", r.csv_row());
    }
    let summary = format!(
        "mode=uncertainty\nfamily_size={}\nrng_seed={}\nall_satisfy_robertson={all}\nmin_robertson_slack={}\n",
        family.len(),
        cfg.rng_seed,
        fmt17(min_slack)
    );
    Ok((EXIT_OK, csv, summary))
}

fn run_tunneling(cfg: &RunConfig) -> Result<(u8, String, String)> {
    let t = &cfg.tunneling;
    let ratio = match t.velocity_ratio {
        Some(r) => r,
        None => t.calibration.velocity_ratio().map_err(|e| e.in_module("tunneling"))?,
    };
    let rows = match &t.fields {
        FieldSelection::Single(f) => sweep_fields(t.ip, t.z_eff, ratio, &[*f], &t.model),
        FieldSelection::Range(r) => intensity_sweep(t.ip, t.z_eff, ratio, *r, &t.model),
        FieldSelection::Widths(ws) => {
            let fields = ws.iter().map(|&w| field_for_width(t.ip, t.z_eff, w)).collect::<Result<Vec<_>>>();
            fields.and_then(|fs| sweep_fields(t.ip, t.z_eff, ratio, &fs, &t.model))
        }
    }
    .map_err(|e| e.in_module("tunneling"))?;
    let flagged = rows.iter().filter(|r| r.result.is_none()).count();

    let mut summary = String::new();
    let _ = writeln!(summary, "mode=tunneling");
    let _ = writeln!(summary, "velocity_ratio={}", fmt17(ratio));
    let _ = writeln!(summary, "inverse_velocity_ratio={}", fmt17(1.0 / ratio));
    if t.velocity_ratio.is_none() {
        let v = calibrated_group_velocity(t.calibration.lab_time, t.calibration.width_au)?;
        let _ = writeln!(summary, "group_velocity_m_per_s={}", fmt17(v));
    }
    let _ = writeln!(summary, "direction_factor={}", fmt17(t.model.direction_factor));
    let _ = writeln!(summary, "rows={}", rows.len());
    let _ = writeln!(summary, "over_barrier_rows={flagged}");
    Ok((EXIT_OK, sweep_csv(&rows), summary))
}
