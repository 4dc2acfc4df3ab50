//! Mode-level Dirac algebra: spectrum, projectors and the free propagator.

use dirac_timeop::dirac::{dirac, mode_hamiltonian, positive_spinor, Mat4};

fn max_abs(m: &Mat4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn main() -> dirac_timeop::Result<()> {
    let d = dirac();
    println!("beta =\n{}", d.beta.map(|z| z.re));

    let m = mode_hamiltonian([1.0, 2.0, 2.0])?;
    println!("k = (1, 2, 2): E = {:.12} (sqrt 10 = {:.12})", m.energy, 10f64.sqrt());

    let (plus, minus) = m.projectors();
    println!("|L+^2 - L+|  = {:.2e}", max_abs(&(plus * plus - plus)));
    println!("|L+ L-|      = {:.2e}", max_abs(&(plus * minus)));

    let u = m.propagator(3.7);
    println!("|U^+ U - I|  = {:.2e}", max_abs(&(u.adjoint() * u - Mat4::identity())));

    let u_spinor = positive_spinor([1.0, 2.0, 2.0], true)?;
    let hu = m.h * u_spinor;
    println!("|h u - E u|  = {:.2e}", (hu - u_spinor * num_complex::Complex64::from(m.energy)).norm());
    Ok(())
}
