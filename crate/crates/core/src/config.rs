//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment. Keys that only make sense
//! for another mode are rejected rather than silently ignored, as are keys
//! whose meanings overlap (a single `field` together with a sweep range, or a
//! fixed `velocity_ratio` together with a calibration point).

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::observables::TAU0;
use crate::tunneling::{Calibration, FieldRange, TimeModel, TunnelingScenario};
use crate::units::as_to_seconds;
use crate::wavepacket::{Envelope, PacketSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Evolve,
    Uncertainty,
    Tunneling,
    Selfcheck,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Evolve, Mode::Uncertainty, Mode::Tunneling, Mode::Selfcheck];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Evolve => "evolve",
            Mode::Uncertainty => "uncertainty",
            Mode::Tunneling => "tunneling",
            Mode::Selfcheck => "selfcheck",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::config("mode", format!("expected one of evolve, uncertainty, tunneling, selfcheck; got `{s}`")))
    }
}

/// Tolerances used by the self-check suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Heisenberg vs Schrödinger expectations, absolute.
    pub picture: f64,
    /// Operator identities, absolute.
    pub identity: f64,
    /// Allowed negative slack in the Robertson inequality.
    pub robertson: f64,
    /// Closed-form vs direct commutator, relative.
    pub commutator: f64,
    /// Regression against reference tunneling numbers, relative.
    pub regression: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { picture: 1e-8, identity: 1e-10, robertson: 1e-9, commutator: 1e-6, regression: 1e-2 }
    }
}

/// Which fields a tunneling run evaluates.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldSelection {
    Single(f64),
    Range(FieldRange),
    /// Fields chosen so the barrier has these widths (atomic units).
    Widths(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TunnelingConfig {
    pub ip: f64,
    pub z_eff: f64,
    pub fields: FieldSelection,
    pub calibration: Calibration,
    /// Fixed (v_gp / c)^2; overrides the calibration point when set.
    pub velocity_ratio: Option<f64>,
    pub model: TimeModel,
}

impl Default for TunnelingConfig {
    fn default() -> Self {
        Self {
            ip: 0.5792,
            z_eff: 1.0,
            fields: FieldSelection::Single(0.04),
            calibration: Calibration::default(),
            velocity_ratio: None,
            model: TimeModel::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub grid: GridSpec,
    pub packet: PacketSpec,
    pub tau0: f64,
    /// Evolution horizon; chosen from the packet velocity when unset.
    pub horizon: Option<f64>,
    /// Series length; raised as needed to resolve the Zitterbewegung when unset.
    pub samples: Option<usize>,
    pub family_size: usize,
    pub rng_seed: u64,
    pub tunneling: TunnelingConfig,
    pub out: Option<PathBuf>,
    pub tolerances: Tolerances,
}

impl RunConfig {
    pub fn defaults(mode: Mode) -> Self {
        Self {
            mode,
            grid: GridSpec::default_1d(),
            packet: PacketSpec::default(),
            tau0: TAU0,
            horizon: None,
            samples: None,
            family_size: 16,
            rng_seed: 1,
            tunneling: TunnelingConfig::default(),
            out: None,
            tolerances: Tolerances::default(),
        }
    }
}

use Mode::{Evolve as E, Selfcheck as S, Tunneling as T, Uncertainty as U};

/// Every accepted key with the modes that use it.
const KEYS: &[(&str, &[Mode])] = &[
    ("mode", &[E, U, T, S]),
    ("out", &[E, U, T, S]),
    ("dim", &[E, U]),
    ("n", &[E, U]),
    ("box_length", &[E, U]),
    ("width", &[E, U]),
    ("center_x", &[E, U]),
    ("center_y", &[E, U]),
    ("center_z", &[E, U]),
    ("p0", &[E, U]),
    ("p0_y", &[E, U]),
    ("p0_z", &[E, U]),
    ("seed", &[E, U]),
    ("project_positive", &[E, U]),
    ("vortex_charge", &[E, U]),
    ("tau0", &[E, U]),
    ("horizon", &[E]),
    ("samples", &[E]),
    ("family_size", &[U]),
    ("rng_seed", &[U]),
    ("ip", &[T]),
    ("zeff", &[T]),
    ("field", &[T]),
    ("f_min", &[T]),
    ("f_max", &[T]),
    ("f_count", &[T]),
    ("widths", &[T]),
    ("ups_ref_as", &[T]),
    ("d_ref_au", &[T]),
    ("velocity_ratio", &[T]),
    ("direction_factor", &[T]),
    ("tol_picture", &[S]),
    ("tol_identity", &[S]),
    ("tol_robertson", &[S]),
    ("tol_commutator", &[S]),
    ("tol_regression", &[S]),
];

/// Parses a document that names its own mode.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, None, &[])
}

/// Parses a document, with the mode optionally fixed by the caller and
/// `key=value` overrides applied on top of the document.
pub fn parse_config_with(text: &str, mode: Option<Mode>, overrides: &[String]) -> Result<RunConfig> {
    let mut entries: BTreeMap<String, String> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = split_assignment(line)
            .ok_or_else(|| Error::config(format!("line {}", lineno + 1), format!("expected `key = value`, got `{line}`")))?;
        if entries.insert(k.clone(), v).is_some() {
            return Err(Error::config(k, "given more than once"));
        }
    }
    for o in overrides {
        let (k, v) = split_assignment(o).ok_or_else(|| Error::config(o.clone(), "override must look like key=value"))?;
        entries.insert(k, v);
    }

    for key in entries.keys() {
        if !KEYS.iter().any(|(k, _)| k == key) {
            return Err(Error::config(key.clone(), "unknown key"));
        }
    }

    let doc_mode = entries.get("mode").map(|v| v.parse::<Mode>()).transpose()?;
    let mode = match (mode, doc_mode) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::config("mode", format!("document says `{b}` but `{a}` was requested")));
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => return Err(Error::config("mode", "missing; expected evolve, uncertainty, tunneling or selfcheck")),
    };

    for key in entries.keys() {
        let (_, modes) = KEYS.iter().find(|(k, _)| k == key).expect("checked above");
        if !modes.contains(&mode) {
            let users: Vec<&str> = modes.iter().map(|m| m.name()).collect();
            return Err(Error::config(key.clone(), format!("not used by mode {mode} (only by {})", users.join(", "))));
        }
    }

    let mut cfg = RunConfig::defaults(mode);
    let vals = Values(&entries);
    if let Some(p) = entries.get("out") {
        cfg.out = Some(PathBuf::from(p));
    }
    match mode {
        Mode::Evolve | Mode::Uncertainty => packet_section(&mut cfg, &vals)?,
        Mode::Tunneling => tunneling_section(&mut cfg, &vals)?,
        Mode::Selfcheck => {
            let t = &mut cfg.tolerances;
            for (key, slot) in [
                ("tol_picture", &mut t.picture),
                ("tol_identity", &mut t.identity),
                ("tol_robertson", &mut t.robertson),
                ("tol_commutator", &mut t.commutator),
                ("tol_regression", &mut t.regression),
            ] {
                if let Some(v) = vals.f64(key)? {
                    if !(v > 0.0 && v.is_finite()) {
                        return Err(Error::config(key, "must be a positive tolerance"));
                    }
                    *slot = v;
                }
            }
        }
    }
    Ok(cfg)
}

fn split_assignment(s: &str) -> Option<(String, String)> {
    let (k, v) = s.split_once('=')?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() || v.is_empty() {
        return None;
    }
    Some((k.to_string(), v.to_string()))
}

struct Values<'a>(&'a BTreeMap<String, String>);

impl Values<'_> {
    fn has(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    fn parsed<V: FromStr>(&self, key: &str, what: &str) -> Result<Option<V>> {
        self.0
            .get(key)
            .map(|v| v.parse::<V>().map_err(|_| Error::config(key, format!("expected {what}, got `{v}`"))))
            .transpose()
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        let v: Option<f64> = self.parsed(key, "a number")?;
        match v {
            Some(x) if !x.is_finite() => Err(Error::config(key, "must be finite")),
            v => Ok(v),
        }
    }

    fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.parsed(key, "a non-negative integer")
    }

    fn list_f64(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(v) = self.0.get(key) else { return Ok(None) };
        v.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::config(key, format!("expected a comma-separated list of numbers, got `{v}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }
}

fn positive(key: &str, v: Option<f64>) -> Result<Option<f64>> {
    match v {
        Some(x) if x <= 0.0 => Err(Error::config(key, format!("must be > 0, got {x}"))),
        v => Ok(v),
    }
}

fn packet_section(cfg: &mut RunConfig, vals: &Values) -> Result<()> {
    let dim = vals.usize("dim")?.unwrap_or(1);
    if dim != 1 && dim != 3 {
        return Err(Error::config("dim", format!("dim must be 1 or 3, got {dim}")));
    }
    let default_grid = if dim == 1 { GridSpec::default_1d() } else { GridSpec::default_3d() };
    let n = vals.usize("n")?.unwrap_or(default_grid.n());
    if n < 16 || !n.is_power_of_two() {
        return Err(Error::config("n", format!("n must be a power of two ≥ 16, got {n}")));
    }
    let box_length = positive("box_length", vals.f64("box_length")?)?.unwrap_or(default_grid.box_length());
    cfg.grid = GridSpec::new(dim, n, box_length).map_err(|e| Error::config("n", e.to_string()))?;

    let p = &mut cfg.packet;
    if let Some(w) = vals.f64("width")? {
        p.width = w;
    }
    let (lo, hi) = (4.0 * cfg.grid.spacing(), cfg.grid.box_length() / 8.0);
    if !(p.width >= lo && p.width <= hi) {
        return Err(Error::config("width", format!("must lie in [4 * spacing, box_length / 8] = [{lo}, {hi}], got {}", p.width)));
    }
    for (axis, key) in ["center_x", "center_y", "center_z"].iter().enumerate() {
        if let Some(v) = vals.f64(key)? {
            p.center[axis] = v;
        }
    }
    for (axis, key) in ["p0", "p0_y", "p0_z"].iter().enumerate() {
        if let Some(v) = vals.f64(key)? {
            p.mean_momentum[axis] = v;
        }
    }
    if dim == 1 {
        for key in ["center_y", "center_z", "p0_y", "p0_z"] {
            if vals.has(key) && vals.f64(key)? != Some(0.0) {
                return Err(Error::config(key, "must be 0 on a 1D grid"));
            }
        }
    }
    if let Some(s) = vals.0.get("seed") {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let parsed: Option<Vec<Complex64>> = parts.iter().map(|x| x.parse::<Complex64>().ok()).collect();
        match parsed {
            Some(v) if v.len() == 4 && v.iter().all(|z| z.is_finite()) && v.iter().any(|z| z.norm() > 0.0) => {
                p.spinor_seed = [v[0], v[1], v[2], v[3]];
            }
            _ => {
                return Err(Error::config("seed", format!("expected four comma-separated complex numbers, not all zero (e.g. 1,0,0,1+2i), got `{s}`")));
            }
        }
    }
    if let Some(v) = vals.0.get("project_positive") {
        p.project_positive = match v.as_str() {
            "true" | "yes" | "1" => true,
            "false" | "no" | "0" => false,
            _ => return Err(Error::config("project_positive", format!("expected true or false, got `{v}`"))),
        };
    }
    if let Some(q) = vals.parsed::<i32>("vortex_charge", "an integer")? {
        if q != 0 {
            if dim != 3 {
                return Err(Error::config("vortex_charge", "vortex envelopes need dim = 3"));
            }
            p.envelope = Envelope::Vortex { charge: q };
        }
    }
    p.validate(&cfg.grid).map_err(|e| Error::config("packet", e.to_string()))?;

    if let Some(t) = vals.f64("tau0")? {
        cfg.tau0 = t;
    }
    cfg.horizon = positive("horizon", vals.f64("horizon")?)?;
    if let Some(s) = vals.usize("samples")? {
        if s < 8 {
            return Err(Error::config("samples", format!("must be >= 8, got {s}")));
        }
        cfg.samples = Some(s);
    }
    if let Some(f) = vals.usize("family_size")? {
        if f == 0 {
            return Err(Error::config("family_size", "must be >= 1"));
        }
        cfg.family_size = f;
    }
    if let Some(s) = vals.parsed::<u64>("rng_seed", "an unsigned integer")? {
        cfg.rng_seed = s;
    }
    Ok(())
}

fn tunneling_section(cfg: &mut RunConfig, vals: &Values) -> Result<()> {
    let t = &mut cfg.tunneling;
    if let Some(v) = positive("ip", vals.f64("ip")?)? {
        t.ip = v;
    }
    if let Some(v) = positive("zeff", vals.f64("zeff")?)? {
        t.z_eff = v;
    }

    let range_keys = ["f_min", "f_max", "f_count"];
    let has_range = range_keys.iter().any(|k| vals.has(k));
    let selectors = [vals.has("field"), has_range, vals.has("widths")];
    if selectors.iter().filter(|&&b| b).count() > 1 {
        let key = if vals.has("field") { "field" } else { "widths" };
        return Err(Error::config(key, "choose one of field, f_min/f_max/f_count, or widths"));
    }
    if let Some(f) = positive("field", vals.f64("field")?)? {
        t.fields = FieldSelection::Single(f);
    } else if has_range {
        let min = positive("f_min", vals.f64("f_min")?)?.ok_or_else(|| Error::config("f_min", "required with f_max"))?;
        let max = positive("f_max", vals.f64("f_max")?)?.ok_or_else(|| Error::config("f_max", "required with f_min"))?;
        if max < min {
            return Err(Error::config("f_max", format!("must be >= f_min = {min}")));
        }
        let count = vals.usize("f_count")?.unwrap_or(100);
        if count == 0 {
            return Err(Error::config("f_count", "must be >= 1"));
        }
        t.fields = FieldSelection::Range(FieldRange { min, max, count });
    } else if let Some(ws) = vals.list_f64("widths")? {
        if let Some(w) = ws.iter().find(|&&w| w < 0.0) {
            return Err(Error::config("widths", format!("widths must be >= 0, got {w}")));
        }
        t.fields = FieldSelection::Widths(ws);
    }

    let has_cal = vals.has("ups_ref_as") || vals.has("d_ref_au");
    if has_cal && vals.has("velocity_ratio") {
        return Err(Error::config("velocity_ratio", "conflicts with the calibration point ups_ref_as/d_ref_au"));
    }
    if let Some(v) = positive("ups_ref_as", vals.f64("ups_ref_as")?)? {
        t.calibration.lab_time = as_to_seconds(v);
    }
    if let Some(v) = positive("d_ref_au", vals.f64("d_ref_au")?)? {
        t.calibration.width_au = v;
    }
    if let Some(r) = vals.f64("velocity_ratio")? {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::config("velocity_ratio", format!("must lie in (0, 1], got {r}")));
        }
        t.velocity_ratio = Some(r);
    }
    if let Some(v) = positive("direction_factor", vals.f64("direction_factor")?)? {
        t.model.direction_factor = v;
    }

    if let FieldSelection::Single(f) = t.fields {
        TunnelingScenario { ip: t.ip, z_eff: t.z_eff, field: f, calibration: t.calibration }
            .validate()
            .map_err(|e| Error::config("field", e.to_string()))?;
    }
    Ok(())
}
