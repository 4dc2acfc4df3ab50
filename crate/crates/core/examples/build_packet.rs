//! Build a positive-energy Gaussian packet and print its first moments.

use dirac_timeop::grid::GridSpec;
use dirac_timeop::observables::{expect_all, TAU0};
use dirac_timeop::wavepacket::{build_packet, positive_energy_fraction, PacketSpec};

fn main() -> dirac_timeop::Result<()> {
    let grid = GridSpec::default_1d();
    let spec = PacketSpec { mean_momentum: [0.3, 0.0, 0.0], ..PacketSpec::default() };
    let psi = build_packet(&spec, &grid)?;
    let e = expect_all(&psi, TAU0)?;

    println!("grid: n = {}, L = {}, dx = {:.4}", grid.n(), grid.box_length(), grid.spacing());
    println!("positive-energy fraction  {:.15}", positive_energy_fraction(&psi));
    println!("probability in central half {:.15}", psi.central_probability());
    println!("<x> = {:.6}  <p> = {:.6}  <H> = {:.6}", e.r_mean[0], e.p_mean[0], e.h_mean);
    println!("dx = {:.6}  dp = {:.6}  dT = {:.6}  dH = {:.6}", e.delta_x(), e.delta_p(), e.delta_t(), e.delta_h());
    Ok(())
}
