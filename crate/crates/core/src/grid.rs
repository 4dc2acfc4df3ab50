//! Uniform periodic lattices and the unitary transform between the position
//! and momentum views.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Four spinor components stored as separate planes (structure of arrays).
pub type Components = [Vec<Complex64>; 4];

/// Largest lattice (in sites) accepted unless a caller raises the cap.
pub const DEFAULT_MAX_SITES: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dim: usize,
    n: usize,
    box_length: f64,
}

impl GridSpec {
    pub fn new(dim: usize, n: usize, box_length: f64) -> Result<Self> {
        Self::with_cap(dim, n, box_length, DEFAULT_MAX_SITES)
    }

    pub fn with_cap(dim: usize, n: usize, box_length: f64, max_sites: usize) -> Result<Self> {
        if dim != 1 && dim != 3 {
            return Err(Error::InvalidGrid(format!("dim must be 1 or 3, got {dim}")));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("n must be a power of two >= 16, got {n}")));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!("box_length must be positive, got {box_length}")));
        }
        let sites = n.checked_pow(dim as u32).filter(|&s| s <= max_sites).ok_or_else(|| {
            Error::InvalidGrid(format!("n^dim = {n}^{dim} exceeds the memory cap of {max_sites} sites"))
        })?;
        debug_assert!(sites > 0);
        Ok(Self { dim, n, box_length })
    }

    /// Desk-scale 1D default: n = 4096, L = 400.
    pub fn default_1d() -> Self {
        Self { dim: 1, n: 4096, box_length: 400.0 }
    }

    /// Desk-scale 3D default: n = 64, L = 60.
    pub fn default_3d() -> Self {
        Self { dim: 3, n: 64, box_length: 60.0 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn sites(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    pub fn momentum_step(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Coordinate of lattice index `j` along one axis; the box is [-L/2, L/2).
    #[inline]
    pub fn axis_position(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.spacing()
    }

    /// Signed lattice frequency of index `m` along one axis, in [-pi n / L, pi n / L).
    #[inline]
    pub fn axis_momentum(&self, m: usize) -> f64 {
        let signed = if m < self.n / 2 { m as f64 } else { m as f64 - self.n as f64 };
        signed * self.momentum_step()
    }

    #[inline]
    fn axis_indices(&self, idx: usize) -> [usize; 3] {
        if self.dim == 1 {
            [idx, 0, 0]
        } else {
            let n = self.n;
            [idx / (n * n), (idx / n) % n, idx % n]
        }
    }

    /// Position 3-vector of a flat site index (unused axes are zero in 1D).
    #[inline]
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let a = self.axis_indices(idx);
        if self.dim == 1 {
            [self.axis_position(a[0]), 0.0, 0.0]
        } else {
            a.map(|j| self.axis_position(j))
        }
    }

    /// Momentum 3-vector of a flat mode index (unused axes are zero in 1D).
    #[inline]
    pub fn momentum(&self, idx: usize) -> [f64; 3] {
        let a = self.axis_indices(idx);
        if self.dim == 1 {
            [self.axis_momentum(a[0]), 0.0, 0.0]
        } else {
            a.map(|m| self.axis_momentum(m))
        }
    }

    /// Half side of the centered cube holding half of the box volume; the
    /// localization guard measures probability inside it.
    pub fn central_half_width(&self) -> f64 {
        0.5 * self.box_length * 0.5f64.powf(1.0 / self.dim as f64)
    }

    #[inline]
    pub(crate) fn in_central_region(&self, r: &[f64; 3]) -> bool {
        let h = self.central_half_width();
        r[..self.dim].iter().all(|x| x.abs() <= h)
    }

    /// (-1)^(sum of axis indices); maps the index-origin DFT onto the centered box.
    #[inline]
    fn checker(&self, idx: usize) -> f64 {
        let a = self.axis_indices(idx);
        if (a[0] + a[1] + a[2]).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn zeros(&self) -> Components {
        std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); self.sites()])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    ToMomentum,
    ToPosition,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unitary DFT of one component plane, consistent with the centered
/// coordinates: phi(k) = N^{-1/2} sum_x psi(x) exp(-i k x).
pub(crate) fn transform_plane(grid: &GridSpec, data: &mut [Complex64], dir: Direction) {
    let n = grid.n;
    let sites = grid.sites();
    debug_assert_eq!(data.len(), sites);
    let fft = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        match dir {
            Direction::ToMomentum => p.plan_fft_forward(n),
            Direction::ToPosition => p.plan_fft_inverse(n),
        }
    });
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];

    if dir == Direction::ToPosition {
        for (i, z) in data.iter_mut().enumerate() {
            *z *= grid.checker(i);
        }
    }

    // last axis is contiguous
    fft.process_with_scratch(data, &mut scratch);
    if grid.dim == 3 {
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for stride in [n, n * n] {
            for block in 0..sites / (n * stride) {
                for offset in 0..stride {
                    let base = block * n * stride + offset;
                    for (j, v) in line.iter_mut().enumerate() {
                        *v = data[base + j * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (j, v) in line.iter().enumerate() {
                        data[base + j * stride] = *v;
                    }
                }
            }
        }
    }

    let scale = 1.0 / (sites as f64).sqrt();
    match dir {
        Direction::ToMomentum => {
            for (i, z) in data.iter_mut().enumerate() {
                *z *= scale * grid.checker(i);
            }
        }
        Direction::ToPosition => {
            for z in data.iter_mut() {
                *z *= scale;
            }
        }
    }
}

pub(crate) fn transform(grid: &GridSpec, comps: &Components, dir: Direction) -> Components {
    let mut out = comps.clone();
    for plane in out.iter_mut() {
        transform_plane(grid, plane, dir);
    }
    out
}
