//! Spinor fields on periodic lattices and Gaussian packet construction.

use std::io::{BufRead, Write};
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dirac::{Mat4, ModeMatrix, Spinor};
use crate::error::{Error, Result};
use crate::grid::{transform, Components, Direction, GridSpec};
use crate::numeric::{fmt17, CompensatedSum, ComplexSum};

/// Minimum share of probability that must sit inside the central half of the box.
pub const LOCALIZATION_THRESHOLD: f64 = 0.9999;

/// Tolerance on |norm - 1| for operations that require a normalized field.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// A four-component field. The momentum view is canonical; the position view
/// is computed on first use and cached.
#[derive(Debug, Clone)]
pub struct SpinorField {
    grid: GridSpec,
    momentum: Components,
    position: OnceLock<Components>,
    norm: f64,
}

#[inline]
pub(crate) fn spinor_at(c: &Components, i: usize) -> Spinor {
    Spinor::new(c[0][i], c[1][i], c[2][i], c[3][i])
}

#[inline]
pub(crate) fn set_spinor(c: &mut Components, i: usize, s: &Spinor) {
    for (plane, v) in c.iter_mut().zip(s.iter()) {
        plane[i] = *v;
    }
}

/// <a|b> summed over every site and component.
pub(crate) fn inner(a: &Components, b: &Components) -> Complex64 {
    let mut acc = ComplexSum::default();
    for (pa, pb) in a.iter().zip(b) {
        for (x, y) in pa.iter().zip(pb) {
            acc.add(x.conj() * y);
        }
    }
    acc.value()
}

pub(crate) fn norm_sq(a: &Components) -> f64 {
    a.iter().flat_map(|p| p.iter().map(|z| z.norm_sqr())).collect::<CompensatedSum>().value()
}

fn scale(c: &mut Components, s: f64) {
    for z in c.iter_mut().flat_map(|p| p.iter_mut()) {
        *z *= s;
    }
}

fn check_finite(c: &Components) -> Result<()> {
    if c.iter().flat_map(|p| p.iter()).all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("field amplitude"))
    }
}

impl SpinorField {
    /// Wraps momentum amplitudes without checks; used for intermediate,
    /// unnormalized results such as an operator applied to a state.
    pub(crate) fn from_momentum_unchecked(grid: GridSpec, momentum: Components) -> Self {
        let norm = norm_sq(&momentum).sqrt();
        Self { grid, momentum, position: OnceLock::new(), norm }
    }

    pub(crate) fn from_position_unchecked(grid: GridSpec, position: Components) -> Self {
        let momentum = transform(&grid, &position, Direction::ToMomentum);
        let f = Self::from_momentum_unchecked(grid, momentum);
        let _ = f.position.set(position);
        f
    }

    /// Field from momentum-lattice amplitudes (FFT index order). The
    /// localization guard is enforced; normalization is not.
    pub fn from_momentum(grid: GridSpec, momentum: Components) -> Result<Self> {
        Self::check_len(&grid, &momentum)?;
        check_finite(&momentum)?;
        let f = Self::from_momentum_unchecked(grid, momentum);
        f.check_localized()?;
        Ok(f)
    }

    /// Field from position-lattice amplitudes; the inverse of [`Self::to_position`].
    pub fn from_position(grid: GridSpec, position: Components) -> Result<Self> {
        Self::check_len(&grid, &position)?;
        check_finite(&position)?;
        let f = Self::from_position_unchecked(grid, position);
        f.check_localized()?;
        Ok(f)
    }

    fn check_len(grid: &GridSpec, c: &Components) -> Result<()> {
        if c.iter().all(|p| p.len() == grid.sites()) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("component planes must have {} sites", grid.sites())))
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn momentum_view(&self) -> &Components {
        &self.momentum
    }

    pub fn position_view(&self) -> &Components {
        self.position.get_or_init(|| transform(&self.grid, &self.momentum, Direction::ToPosition))
    }

    pub fn has_position_view(&self) -> bool {
        self.position.get().is_some()
    }

    /// Returns the field with its position view materialized.
    pub fn to_position(&self) -> SpinorField {
        let _ = self.position_view();
        self.clone()
    }

    /// Copy scaled to unit norm.
    pub fn normalized(&self) -> Result<SpinorField> {
        if self.norm == 0.0 {
            return Err(Error::InvalidArgument("cannot normalize a zero field".into()));
        }
        let mut momentum = self.momentum.clone();
        scale(&mut momentum, 1.0 / self.norm);
        let position = self.position.get().map(|p| {
            let mut p = p.clone();
            scale(&mut p, 1.0 / self.norm);
            p
        });
        let f = Self::from_momentum_unchecked(self.grid, momentum);
        if let Some(p) = position {
            let _ = f.position.set(p);
        }
        Ok(f)
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm - 1.0).abs() <= NORM_TOLERANCE
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::Unnormalized { norm: self.norm })
        }
    }

    /// Share of the probability inside the central half of the box.
    pub fn central_probability(&self) -> f64 {
        let pos = self.position_view();
        let mut inside = CompensatedSum::new();
        let mut total = CompensatedSum::new();
        for i in 0..self.grid.sites() {
            let w: f64 = pos.iter().map(|p| p[i].norm_sqr()).sum();
            total.add(w);
            if self.grid.in_central_region(&self.grid.position(i)) {
                inside.add(w);
            }
        }
        let total = total.value();
        if total == 0.0 {
            1.0
        } else {
            inside.value() / total
        }
    }

    pub fn check_localized(&self) -> Result<()> {
        let inside = self.central_probability();
        if inside >= LOCALIZATION_THRESHOLD {
            Ok(())
        } else {
            Err(Error::LocalizationGuard { inside })
        }
    }

    pub fn spinor_at_mode(&self, i: usize) -> Spinor {
        spinor_at(&self.momentum, i)
    }

    /// Applies a per-mode 4x4 matrix to the momentum view.
    pub fn apply_modewise<F>(&self, op: F) -> SpinorField
    where
        F: Fn(&ModeMatrix) -> Mat4,
    {
        let mut out = self.grid.zeros();
        for i in 0..self.grid.sites() {
            let m = ModeMatrix::from_finite(self.grid.momentum(i));
            let s = op(&m) * spinor_at(&self.momentum, i);
            set_spinor(&mut out, i, &s);
        }
        SpinorField::from_momentum_unchecked(self.grid, out)
    }

    /// <self|other> in the momentum view.
    pub fn inner(&self, other: &SpinorField) -> Complex64 {
        inner(&self.momentum, &other.momentum)
    }

    /// Mode-wise expectation sum_k psi(k)^dagger M(k) psi(k), unnormalized.
    pub fn modewise_expectation<F>(&self, op: F) -> Complex64
    where
        F: Fn(&ModeMatrix) -> Mat4,
    {
        let mut acc = ComplexSum::default();
        for i in 0..self.grid.sites() {
            let m = ModeMatrix::from_finite(self.grid.momentum(i));
            let s = spinor_at(&self.momentum, i);
            acc.add(s.dotc(&(op(&m) * s)));
        }
        acc.value()
    }
}

/// Envelope shape multiplying the spinor seed.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Envelope {
    #[default]
    Gaussian,
    /// Gaussian times ((x - cx) + i (y - cy))^charge, an eigenstate of l_z
    /// with eigenvalue `charge` about the packet center. 3D only.
    Vortex { charge: i32 },
}

/// Initial Gaussian packet: exp(-(r - c)^2 / 4 sigma^2 + i p0 . r) times a
/// spinor seed, so sigma^2 is the position variance per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketSpec {
    pub center: [f64; 3],
    pub width: f64,
    pub mean_momentum: [f64; 3],
    pub spinor_seed: [Complex64; 4],
    pub project_positive: bool,
    pub envelope: Envelope,
}

impl Default for PacketSpec {
    fn default() -> Self {
        Self {
            center: [0.0; 3],
            width: 10.0,
            mean_momentum: [0.1, 0.0, 0.0],
            spinor_seed: [1.0, 0.0, 0.0, 0.0].map(Complex64::from),
            project_positive: true,
            envelope: Envelope::Gaussian,
        }
    }
}

impl PacketSpec {
    pub fn seed_spinor(&self) -> Spinor {
        Spinor::from(self.spinor_seed)
    }

    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidPacket(m));
        if self.center.iter().chain(&self.mean_momentum).any(|v| !v.is_finite()) || !self.width.is_finite() {
            return Err(Error::NonFinite("packet parameter"));
        }
        if self.spinor_seed.iter().all(|z| z.norm() == 0.0) {
            return bad("spinor_seed must be non-zero".into());
        }
        let dx = grid.spacing();
        if self.width < 4.0 * dx {
            return bad(format!("width {} under-resolved: must be >= 4 * spacing = {}", self.width, 4.0 * dx));
        }
        if self.width > grid.box_length() / 8.0 {
            return bad(format!("width {} exceeds box_length / 8 = {}", self.width, grid.box_length() / 8.0));
        }
        if grid.dim() == 1 && (self.center[1..].iter().chain(&self.mean_momentum[1..]).any(|&v| v != 0.0)) {
            return bad("a 1D packet must have zero y and z components".into());
        }
        if grid.dim() == 1 && self.envelope != Envelope::Gaussian {
            return bad("vortex envelopes need a 3D grid".into());
        }
        Ok(())
    }
}

/// Builds, optionally projects onto positive energy, and normalizes a packet.
pub fn build_packet(spec: &PacketSpec, grid: &GridSpec) -> Result<SpinorField> {
    spec.validate(grid)?;
    let dim = grid.dim();
    let seed = spec.seed_spinor();
    let inv4s2 = 1.0 / (4.0 * spec.width * spec.width);
    let mut pos = grid.zeros();
    for i in 0..grid.sites() {
        let r = grid.position(i);
        let mut d2 = 0.0;
        let mut phase = 0.0;
        for a in 0..dim {
            let d = r[a] - spec.center[a];
            d2 += d * d;
            phase += spec.mean_momentum[a] * r[a];
        }
        let mut amp = Complex64::from_polar((-d2 * inv4s2).exp(), phase);
        if let Envelope::Vortex { charge } = spec.envelope {
            let w = Complex64::new(r[0] - spec.center[0], r[1] - spec.center[1]);
            let w = if charge >= 0 { w } else { w.conj() };
            amp *= w.powu(charge.unsigned_abs());
        }
        set_spinor(&mut pos, i, &(seed * amp));
    }
    let mut field = SpinorField::from_position_unchecked(*grid, pos);
    let before = field.norm;
    if spec.project_positive {
        field = field.apply_modewise(|m| m.projectors().0);
        if field.norm <= 1e-7 * before {
            return Err(Error::ZeroAfterProjection);
        }
    }
    let field = field.normalized()?;
    field.check_localized()?;
    Ok(field)
}

/// Spinor seed with real and imaginary parts uniform in [-1, 1].
pub fn random_seed<R: Rng>(rng: &mut R) -> [Complex64; 4] {
    std::array::from_fn(|_| Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
}

/// `size` packets around `base`, reproducible from `seed`. The first member is
/// `base`; the others get a random spinor seed, the mean momentum scaled by a
/// factor in [0, 2] and the width scaled by a factor in [0.75, 1.25], kept
/// inside the grid's resolvable range.
pub fn packet_family(base: &PacketSpec, grid: &GridSpec, size: usize, seed: u64) -> Vec<PacketSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (4.0 * grid.spacing(), grid.box_length() / 8.0);
    let mut out = Vec::with_capacity(size);
    if size > 0 {
        out.push(base.clone());
    }
    while out.len() < size {
        let mut spec = base.clone();
        spec.spinor_seed = random_seed(&mut rng);
        let scale = rng.random_range(0.0..=2.0);
        spec.mean_momentum = base.mean_momentum.map(|p| p * scale);
        spec.width = (base.width * rng.random_range(0.75..=1.25)).clamp(lo, hi);
        out.push(spec);
    }
    out
}

/// Probability weight on the positive-energy branch, sum_k |Lambda+ psi(k)|^2 / |psi|^2.
pub fn positive_energy_fraction(f: &SpinorField) -> f64 {
    let w = f.modewise_expectation(|m| m.projectors().0).re;
    w / (f.norm() * f.norm())
}

/// Writes the position view: a header line `dim=<d> n=<n> box_length=<L>`,
/// then one line per site with the flat index and the real and imaginary
/// parts of the four components.
pub fn write_snapshot<W: Write>(f: &SpinorField, mut out: W) -> Result<()> {
    let g = f.grid();
    writeln!(out, "dim={} n={} box_length={}", g.dim(), g.n(), fmt17(g.box_length()))?;
    let pos = f.position_view();
    let mut line = String::new();
    for i in 0..g.sites() {
        line.clear();
        line.push_str(&i.to_string());
        for p in pos.iter() {
            line.push(' ');
            line.push_str(&fmt17(p[i].re));
            line.push(' ');
            line.push_str(&fmt17(p[i].im));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Reads a dump produced by [`write_snapshot`].
pub fn read_snapshot<R: BufRead>(input: R) -> Result<SpinorField> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::InvalidArgument("empty snapshot".into()))??;
    let mut dim = None;
    let mut n = None;
    let mut len = None;
    for tok in header.split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(|| Error::InvalidArgument(format!("bad header token {tok}")))?;
        let parse_err = |_| Error::InvalidArgument(format!("bad header value {tok}"));
        match k {
            "dim" => dim = Some(v.parse::<usize>().map_err(parse_err)?),
            "n" => n = Some(v.parse::<usize>().map_err(parse_err)?),
            "box_length" => len = Some(v.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad header value {tok}")))?),
            _ => return Err(Error::InvalidArgument(format!("unknown header key {k}"))),
        }
    }
    let missing = || Error::InvalidArgument("snapshot header needs dim, n and box_length".into());
    let grid = GridSpec::new(dim.ok_or_else(missing)?, n.ok_or_else(missing)?, len.ok_or_else(missing)?)?;
    let mut pos = grid.zeros();
    let mut seen = 0;
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<&str> = line.split_whitespace().collect();
        if vals.len() != 9 {
            return Err(Error::InvalidArgument(format!("snapshot row needs 9 fields, got {}", vals.len())));
        }
        let idx: usize = vals[0].parse().map_err(|_| Error::InvalidArgument(format!("bad index {}", vals[0])))?;
        if idx >= grid.sites() {
            return Err(Error::InvalidArgument(format!("index {idx} out of range")));
        }
        let mut nums = [0.0; 8];
        for (x, s) in nums.iter_mut().zip(&vals[1..]) {
            *x = s.parse().map_err(|_| Error::InvalidArgument(format!("bad number {s}")))?;
        }
        for c in 0..4 {
            pos[c][idx] = Complex64::new(nums[2 * c], nums[2 * c + 1]);
        }
        seen += 1;
    }
    if seen != grid.sites() {
        return Err(Error::InvalidArgument(format!("snapshot has {seen} rows, expected {}", grid.sites())));
    }
    SpinorField::from_position(grid, pos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::positive_spinor;

    fn c(re: f64) -> Complex64 {
        Complex64::from(re)
    }

    fn rest_spec(project: bool) -> PacketSpec {
        PacketSpec {
            center: [0.0; 3],
            width: 10.0,
            mean_momentum: [0.0; 3],
            spinor_seed: [c(1.0), c(0.0), c(0.0), c(0.0)],
            project_positive: project,
            envelope: Envelope::Gaussian,
        }
    }

    #[test]
    fn built_packet_is_normalized_and_parseval_holds() {
        let f = build_packet(&rest_spec(true), &GridSpec::default_1d()).unwrap();
        assert!((f.norm() - 1.0).abs() < 1e-12);
        let pos_norm = norm_sq(f.position_view()).sqrt();
        assert!((pos_norm - f.norm()).abs() < 1e-12);
    }

    #[test]
    fn projected_packet_fully_positive() {
        let f = build_packet(&rest_spec(true), &GridSpec::default_1d()).unwrap();
        assert!((positive_energy_fraction(&f) - 1.0).abs() < 1e-12);
        let again = f.apply_modewise(|m| m.projectors().0);
        for i in 0..f.grid().sites() {
            let a = f.spinor_at_mode(i);
            let b = spinor_at(again.momentum_view(), i);
            assert!((a - b).norm() <= 1e-10 * a.norm().max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn negative_projection_has_zero_fraction() {
        let g = GridSpec::default_1d();
        let f = build_packet(&rest_spec(false), &g).unwrap();
        let neg = f.apply_modewise(|m| m.projectors().1).normalized().unwrap();
        assert!(positive_energy_fraction(&neg).abs() < 1e-12);
    }

    #[test]
    fn symmetric_packet_has_zero_mean_momentum() {
        let f = build_packet(&rest_spec(false), &GridSpec::default_1d()).unwrap();
        let p: f64 = (0..f.grid().sites())
            .map(|i| f.grid().momentum(i)[0] * f.spinor_at_mode(i).norm_squared())
            .sum();
        assert!(p.abs() < 1e-14);
    }

    #[test]
    fn boosted_packet_mean_momentum() {
        let seed = positive_spinor([0.1, 0.0, 0.0], true).unwrap();
        let spec = PacketSpec {
            mean_momentum: [0.1, 0.0, 0.0],
            spinor_seed: [seed[0], seed[1], seed[2], seed[3]],
            ..rest_spec(true)
        };
        let f = build_packet(&spec, &GridSpec::default_1d()).unwrap();
        // independent first moment straight from the momentum lattice
        let mut p = 0.0;
        for i in 0..f.grid().sites() {
            p += f.grid().momentum(i)[0] * f.spinor_at_mode(i).norm_squared();
        }
        assert!((p - 0.1).abs() < 1e-4, "{p}");
    }

    #[test]
    fn width_checks() {
        let g = GridSpec::default_1d();
        let mut s = rest_spec(false);
        s.width = 0.2;
        assert!(matches!(build_packet(&s, &g), Err(Error::InvalidPacket(_))));
        s.width = 60.0;
        assert!(matches!(build_packet(&s, &g), Err(Error::InvalidPacket(_))));
        s.width = 10.0;
        s.spinor_seed = [c(0.0); 4];
        assert!(matches!(build_packet(&s, &g), Err(Error::InvalidPacket(_))));
    }

    #[test]
    fn guard_rejects_off_center_packet() {
        let mut s = rest_spec(false);
        s.center = [95.0, 0.0, 0.0];
        let err = build_packet(&s, &GridSpec::default_1d()).unwrap_err();
        assert!(matches!(err, Error::LocalizationGuard { .. }));
    }

    #[test]
    fn wide_packet_fails_guard_before_width_cap() {
        // sigma = L/10 passes the width cap but leaves > 1e-4 outside |x| < L/4
        let mut s = rest_spec(false);
        s.width = 40.0;
        assert!(matches!(build_packet(&s, &GridSpec::default_1d()), Err(Error::LocalizationGuard { .. })));
    }

    #[test]
    fn snapshot_round_trip() {
        let g = GridSpec::new(1, 64, 40.0).unwrap();
        let mut s = rest_spec(true);
        s.width = 2.5;
        s.mean_momentum = [0.3, 0.0, 0.0];
        let f = build_packet(&s, &g).unwrap();
        let mut buf = Vec::new();
        write_snapshot(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("dim=1 n=64 box_length=4.0000000000000000e1\n"));
        let back = read_snapshot(buf.as_slice()).unwrap();
        for i in 0..64 {
            assert!((back.spinor_at_mode(i) - f.spinor_at_mode(i)).norm() < 1e-15);
        }
    }
}
