mod common;

use nalgebra::SymmetricEigen;
use proptest::prelude::*;

use common::{alpha, beta, c, M4};
use dirac_timeop::dirac::{dirac, mode_hamiltonian};

fn max_abs(m: &M4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn oracle_h(k: [f64; 3]) -> M4 {
    alpha(0) * c(k[0]) + alpha(1) * c(k[1]) + alpha(2) * c(k[2]) + beta()
}

/// exp(-i h t) by a 50-term Taylor series.
fn taylor_propagator(h: &M4, t: f64) -> M4 {
    let step = h * num_complex::Complex64::new(0.0, -t);
    let mut term = M4::identity();
    let mut sum = M4::identity();
    for n in 1..50 {
        term = term * step / c(n as f64);
        sum += term;
    }
    sum
}

fn momentum() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-100.0..100.0f64)
}

#[test]
fn library_matrices_match_oracle() {
    let d = dirac();
    for i in 0..3 {
        assert_eq!(d.alpha[i], alpha(i));
    }
    assert_eq!(d.beta, beta());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn alpha_dot_anticommutator(a in momentum(), b in momentum()) {
        let (ha, hb) = (oracle_h(a) - beta(), oracle_h(b) - beta());
        let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        let err = max_abs(&(ha * hb + hb * ha - M4::identity() * c(2.0 * dot)));
        prop_assert!(err <= 1e-12 * (1.0 + dot.abs()));
    }

    #[test]
    fn h_squared_is_energy_squared(k in momentum()) {
        let m = mode_hamiltonian(k).unwrap();
        let k2: f64 = k.iter().map(|x| x * x).sum();
        prop_assert!(max_abs(&(m.h - oracle_h(k))) == 0.0);
        prop_assert!(max_abs(&(m.h * m.h - M4::identity() * c(k2 + 1.0))) <= 1e-12 * (k2 + 1.0));
        prop_assert!((m.energy - (k2 + 1.0).sqrt()).abs() <= 1e-14 * m.energy);
    }

    #[test]
    fn propagator_matches_series(k in prop::array::uniform3(-5.0..5.0f64), s in -1.0..1.0f64) {
        let m = mode_hamiltonian(k).unwrap();
        let t = 10.0 * s / m.energy;
        let err = max_abs(&(m.propagator(t) - taylor_propagator(&m.h, t)));
        prop_assert!(err <= 1e-10, "err {err}");
    }

    #[test]
    fn projector_identities(k in momentum()) {
        let m = mode_hamiltonian(k).unwrap();
        let (p, q) = m.projectors();
        let id = M4::identity();
        prop_assert!(max_abs(&(p * p - p)) <= 1e-12);
        prop_assert!(max_abs(&(q * q - q)) <= 1e-12);
        prop_assert!(max_abs(&(p * q)) <= 1e-12);
        prop_assert!(max_abs(&(p + q - id)) <= 1e-12);
        prop_assert!(max_abs(&(m.h * p - p * c(m.energy))) <= 1e-12 * m.energy);
    }

    #[test]
    fn spectrum_from_eigensolver(k in momentum()) {
        let m = mode_hamiltonian(k).unwrap();
        let mut ev: Vec<f64> = SymmetricEigen::new(m.h).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let e = m.energy;
        for (got, want) in ev.iter().zip([-e, -e, e, e]) {
            prop_assert!((got - want).abs() <= 1e-10 * e);
        }
    }
}
