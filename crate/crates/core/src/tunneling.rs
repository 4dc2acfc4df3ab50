//! Attoclock tunneling model in atomic units (e = hbar = m_e = 1).
//!
//! The barrier is the stretch of the effective potential -Z/x - F x lying
//! above the bound-state energy -Ip. Its width sets an internal (time
//! operator) tunneling time, width / c scaled by a single-direction factor,
//! and dividing by (v_gp / c)^2 turns that into a laboratory time.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::numeric::fmt17;
use crate::units::{au_to_angstrom, au_to_meters, seconds_to_as, ATTOSECOND, C_SI};

/// Measured reference point used to calibrate the tunneling velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    /// Laboratory tunneling time, seconds.
    pub lab_time: f64,
    /// Barrier width, atomic units of length.
    pub width_au: f64,
}

impl Default for Calibration {
    /// 40 as at a 13 a.u. barrier.
    fn default() -> Self {
        Self { lab_time: 40.0 * ATTOSECOND, width_au: 13.0 }
    }
}

impl Calibration {
    pub fn velocity_ratio(&self) -> Result<f64> {
        calibrate_velocity(self.lab_time, self.width_au)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunnelingScenario {
    /// Ionization potential, Hartree.
    pub ip: f64,
    pub z_eff: f64,
    /// Peak field strength, atomic units.
    pub field: f64,
    pub calibration: Calibration,
}

impl TunnelingScenario {
    pub fn new(ip: f64, z_eff: f64, field: f64) -> Result<Self> {
        let sc = Self { ip, z_eff, field, calibration: Calibration::default() };
        sc.validate()?;
        Ok(sc)
    }

    /// 4 z_eff F / ip^2; the barrier exists while this stays <= 1.
    pub fn barrier_parameter(&self) -> f64 {
        4.0 * self.z_eff * self.field / (self.ip * self.ip)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("ip", self.ip), ("z_eff", self.z_eff), ("field", self.field)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        let q = self.barrier_parameter();
        if q > 1.0 {
            return Err(Error::OverBarrier { ratio: q });
        }
        Ok(())
    }
}

/// Entrance and exit points: the roots of F x^2 - Ip x + Z = 0.
pub fn barrier_points(sc: &TunnelingScenario) -> Result<(f64, f64)> {
    sc.validate()?;
    let disc = (sc.ip * sc.ip - 4.0 * sc.field * sc.z_eff).max(0.0);
    let big = sc.ip + disc.sqrt();
    let exit = big / (2.0 * sc.field);
    // product of roots is Z / F; avoids cancellation in the small root
    let entrance = 2.0 * sc.z_eff / big;
    Ok((entrance, exit))
}

/// Closed-form width (Ip / F) sqrt(1 - 4 Z F / Ip^2), atomic units.
pub fn barrier_width(sc: &TunnelingScenario) -> Result<f64> {
    sc.validate()?;
    Ok(sc.ip / sc.field * (1.0 - sc.barrier_parameter()).max(0.0).sqrt())
}

/// Field strength at which the barrier has the given width (a.u.).
pub fn field_for_width(ip: f64, z_eff: f64, width_au: f64) -> Result<f64> {
    if !(ip > 0.0 && z_eff > 0.0 && width_au >= 0.0) || !(ip.is_finite() && z_eff.is_finite() && width_au.is_finite()) {
        return Err(Error::InvalidArgument("field_for_width needs ip > 0, z_eff > 0, width >= 0".into()));
    }
    if width_au == 0.0 {
        return Ok(ip * ip / (4.0 * z_eff));
    }
    // width^2 F^2 + 4 Z F - Ip^2 = 0, positive root in the stable form
    let d2 = width_au * width_au;
    let root = (4.0 * z_eff * z_eff + d2 * ip * ip).sqrt();
    Ok(ip * ip / (2.0 * z_eff + root))
}

/// Velocity ratio (v_gp / c)^2 with v_gp = width / time at the reference point.
pub fn calibrate_velocity(lab_time: f64, width_au: f64) -> Result<f64> {
    let v = calibrated_group_velocity(lab_time, width_au)?;
    Ok((v / C_SI).powi(2))
}

/// Tunneling velocity width / time at the reference point, m/s.
pub fn calibrated_group_velocity(lab_time: f64, width_au: f64) -> Result<f64> {
    if !(lab_time.is_finite() && lab_time > 0.0 && width_au.is_finite() && width_au > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "calibration needs positive time and width, got {lab_time} s and {width_au} a.u."
        )));
    }
    Ok(au_to_meters(width_au) / lab_time)
}

/// Model constants of the time estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeModel {
    /// Share of the isotropic time uncertainty assigned to one direction.
    pub direction_factor: f64,
}

impl Default for TimeModel {
    fn default() -> Self {
        Self { direction_factor: 1.0 / (4.0 * PI) }
    }
}

impl TimeModel {
    /// Internal time factor * width / c, seconds.
    pub fn internal_time(&self, width_au: f64) -> Result<f64> {
        if !(width_au.is_finite() && width_au >= 0.0) {
            return Err(Error::InvalidArgument(format!("width must be non-negative, got {width_au}")));
        }
        Ok(self.direction_factor * au_to_meters(width_au) / C_SI)
    }

    /// Laboratory time internal_time / (v_gp / c)^2, seconds.
    pub fn lab_time(&self, width_au: f64, velocity_ratio: f64) -> Result<f64> {
        if !(velocity_ratio > 0.0 && velocity_ratio <= 1.0) {
            return Err(Error::InvalidArgument(format!("velocity ratio must lie in (0, 1], got {velocity_ratio}")));
        }
        Ok(self.internal_time(width_au)? / velocity_ratio)
    }
}

pub fn internal_time(width_au: f64) -> Result<f64> {
    TimeModel::default().internal_time(width_au)
}

pub fn lab_time(width_au: f64, velocity_ratio: f64) -> Result<f64> {
    TimeModel::default().lab_time(width_au, velocity_ratio)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunnelingResult {
    pub x_entrance: f64,
    pub x_exit: f64,
    pub width_au: f64,
    pub width_angstrom: f64,
    /// Seconds.
    pub internal_time: f64,
    /// Seconds.
    pub lab_time: f64,
    pub velocity_ratio: f64,
}

/// Barrier geometry and both times for one scenario. The velocity ratio comes
/// from the scenario's calibration point.
pub fn solve(sc: &TunnelingScenario, model: &TimeModel) -> Result<TunnelingResult> {
    solve_with_ratio(sc, model, sc.calibration.velocity_ratio()?)
}

pub fn solve_with_ratio(sc: &TunnelingScenario, model: &TimeModel, velocity_ratio: f64) -> Result<TunnelingResult> {
    let (x_entrance, x_exit) = barrier_points(sc)?;
    let width_au = barrier_width(sc)?;
    Ok(TunnelingResult {
        x_entrance,
        x_exit,
        width_au,
        width_angstrom: au_to_angstrom(width_au),
        internal_time: model.internal_time(width_au)?,
        lab_time: model.lab_time(width_au, velocity_ratio)?,
        velocity_ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

/// One sweep row; `result` is `None` when the field is over the barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub field: f64,
    pub result: Option<TunnelingResult>,
}

/// Evaluates the model at `count` evenly spaced fields (inclusive). Over-barrier
/// fields produce flagged rows instead of aborting the sweep.
pub fn intensity_sweep(ip: f64, z_eff: f64, velocity_ratio: f64, range: FieldRange, model: &TimeModel) -> Result<Vec<SweepRow>> {
    if range.count == 0 || !(range.min > 0.0 && range.max >= range.min && range.max.is_finite()) {
        return Err(Error::InvalidArgument(format!("bad field range {range:?}")));
    }
    let fields: Vec<f64> = if range.count == 1 {
        vec![range.min]
    } else {
        (0..range.count)
            .map(|i| range.min + (range.max - range.min) * i as f64 / (range.count - 1) as f64)
            .collect()
    };
    sweep_fields(ip, z_eff, velocity_ratio, &fields, model)
}

/// Like [`intensity_sweep`] for an explicit list of fields.
pub fn sweep_fields(ip: f64, z_eff: f64, velocity_ratio: f64, fields: &[f64], model: &TimeModel) -> Result<Vec<SweepRow>> {
    fields
        .iter()
        .map(|&field| {
            let sc = TunnelingScenario { ip, z_eff, field, calibration: Calibration::default() };
            match solve_with_ratio(&sc, model, velocity_ratio) {
                Ok(r) => Ok(SweepRow { field, result: Some(r) }),
                Err(Error::OverBarrier { .. }) => {
                    log::warn!("field {field} is over the barrier; row flagged");
                    Ok(SweepRow { field, result: None })
                }
                Err(e) => Err(e),
            }
        })
        .collect()
}

pub const SWEEP_CSV_HEADER: &str = "F_au,width_au,width_angstrom,internal_time_as,lab_time_as";

/// Sweep table with a single header row; flagged rows carry `nan`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        match &row.result {
            Some(r) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    fmt17(row.field),
                    fmt17(r.width_au),
                    fmt17(r.width_angstrom),
                    fmt17(seconds_to_as(r.internal_time)),
                    fmt17(seconds_to_as(r.lab_time))
                );
            }
            None => {
                let _ = writeln!(out, "{},nan,nan,nan,nan", fmt17(row.field));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_root_at_threshold() {
        let (ip, z) = (0.5792, 1.0);
        let sc = TunnelingScenario::new(ip, z, ip * ip / (4.0 * z)).unwrap();
        let (a, b) = barrier_points(&sc).unwrap();
        let x = ip / (2.0 * sc.field);
        assert!((a - x).abs() < 1e-12 * x && (b - x).abs() < 1e-12 * x);
        assert_eq!(barrier_width(&sc).unwrap(), 0.0);
    }

    #[test]
    fn vieta() {
        let sc = TunnelingScenario::new(0.5792, 1.0, 0.04).unwrap();
        let (a, b) = barrier_points(&sc).unwrap();
        assert!((a * b - 1.0 / 0.04).abs() < 1e-12 * a * b);
        assert!((a + b - 0.5792 / 0.04).abs() < 1e-12 * (a + b));
    }

    #[test]
    fn over_barrier_is_typed() {
        let err = TunnelingScenario::new(0.5, 1.0, 0.1).unwrap_err();
        assert!(matches!(err, Error::OverBarrier { .. }));
    }

    #[test]
    fn field_for_width_inverts_width() {
        for w in [0.5, 8.0, 13.0, 20.0, 300.0] {
            let f = field_for_width(0.5792, 1.0, w).unwrap();
            let sc = TunnelingScenario::new(0.5792, 1.0, f).unwrap();
            assert!((barrier_width(&sc).unwrap() - w).abs() < 1e-12 * w);
        }
    }

    #[test]
    fn internal_time_values() {
        assert_eq!(internal_time(0.0).unwrap(), 0.0);
        let t13 = internal_time(13.0).unwrap();
        let direct = 6.8793e-10 / (4.0 * PI * 2.997_924_58e8);
        assert!((t13 - direct).abs() < 1e-4 * direct);
        assert!((seconds_to_as(t13) - 0.1826).abs() < 1e-4);
        assert_eq!(internal_time(26.0).unwrap(), 2.0 * t13);
        assert!(internal_time(-1.0).is_err());
    }

    #[test]
    fn lab_time_limits() {
        assert_eq!(lab_time(13.0, 1.0).unwrap(), internal_time(13.0).unwrap());
        assert!(lab_time(13.0, 0.0).is_err());
        assert!(lab_time(13.0, 1.5).is_err());
    }

    #[test]
    fn calibration_inverse_proportional() {
        let r1 = calibrate_velocity(40e-18, 13.0).unwrap();
        let r2 = calibrate_velocity(80e-18, 13.0).unwrap();
        assert!((r1 / r2 - 4.0).abs() < 1e-12);
        assert!(calibrate_velocity(0.0, 13.0).is_err());
        assert!(calibrate_velocity(40e-18, -1.0).is_err());
    }

    #[test]
    fn sweep_flags_over_barrier_rows() {
        let rows = intensity_sweep(0.5, 1.0, 1e-3, FieldRange { min: 0.03, max: 0.09, count: 4 }, &TimeModel::default()).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows[0].result.is_some());
        assert!(rows[3].result.is_none());
        let csv = sweep_csv(&rows);
        assert!(csv.starts_with("F_au,width_au,width_angstrom,internal_time_as,lab_time_as\n"));
        assert!(csv.lines().last().unwrap().ends_with(",nan,nan,nan,nan"));
    }
}
