//! Oracles shared by the integration tests. The Dirac matrices here are built
//! independently of the library so that expectation values computed from raw
//! lattice views can be compared against the library's own reports.

#![allow(dead_code)]

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;
use rand::Rng;

use dirac_timeop::grid::{Components, GridSpec};
use dirac_timeop::wavepacket::{build_packet, PacketSpec, SpinorField};

pub type M4 = Matrix4<Complex64>;
pub type V4 = Vector4<Complex64>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn pauli(i: usize) -> Matrix2<Complex64> {
    let (o, z, im) = (c(1.0), c(0.0), Complex64::i());
    match i {
        0 => Matrix2::new(z, o, o, z),
        1 => Matrix2::new(z, -im, im, z),
        _ => Matrix2::new(o, z, z, -o),
    }
}

pub fn alpha(i: usize) -> M4 {
    let mut m = M4::zeros();
    let s = pauli(i);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&s);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&s);
    m
}

pub fn beta() -> M4 {
    M4::from_diagonal(&V4::new(c(1.0), c(1.0), c(-1.0), c(-1.0)))
}

pub fn site(v: &Components, i: usize) -> V4 {
    V4::new(v[0][i], v[1][i], v[2][i], v[3][i])
}

/// sum_i psi_i^dagger M(r_i) psi_i over the position view.
pub fn position_expect(f: &SpinorField, m: impl Fn([f64; 3]) -> M4) -> Complex64 {
    let g = f.grid();
    let v = f.position_view();
    (0..g.sites()).map(|i| site(v, i).dotc(&(m(g.position(i)) * site(v, i)))).sum()
}

/// sum_k psi_k^dagger M(k) psi_k over the momentum view.
pub fn momentum_expect(f: &SpinorField, m: impl Fn([f64; 3]) -> M4) -> Complex64 {
    let g = f.grid();
    let v = f.momentum_view();
    (0..g.sites()).map(|i| site(v, i).dotc(&(m(g.momentum(i)) * site(v, i)))).sum()
}

pub fn random_spinor<R: Rng>(rng: &mut R) -> [Complex64; 4] {
    std::array::from_fn(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Random 1D packet that stays well inside the box for |t| <= 30.
pub fn random_packet_1d<R: Rng>(rng: &mut R, grid: &GridSpec) -> SpinorField {
    let spec = PacketSpec {
        center: [rng.random_range(-20.0..20.0), 0.0, 0.0],
        width: rng.random_range(5.0..12.0),
        mean_momentum: [rng.random_range(-0.5..0.5), 0.0, 0.0],
        spinor_seed: random_spinor(rng),
        project_positive: rng.random_bool(0.5),
        ..PacketSpec::default()
    };
    build_packet(&spec, grid).expect("random packet is valid")
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
