//! <s.l> for vortex packets on a 3D grid, and its effect on the commutator.

use dirac_timeop::grid::GridSpec;
use dirac_timeop::observables::{uncertainty_report, TAU0};
use dirac_timeop::wavepacket::{build_packet, Envelope, PacketSpec};
use num_complex::Complex64;

fn main() -> dirac_timeop::Result<()> {
    let grid = GridSpec::default_3d();
    for (charge, label) in [(0, "s-wave"), (1, "l_z = +1"), (-1, "l_z = -1")] {
        let envelope = if charge == 0 { Envelope::Gaussian } else { Envelope::Vortex { charge } };
        let spec = PacketSpec {
            width: 4.0,
            mean_momentum: [0.0; 3],
            spinor_seed: [1.0, 0.0, 0.0, 0.0].map(Complex64::from),
            project_positive: false,
            envelope,
            ..PacketSpec::default()
        };
        let psi = build_packet(&spec, &grid)?;
        let r = uncertainty_report(&psi, TAU0)?;
        println!(
            "{label:>9}: <s.l> = {:+.6}  <beta K> = {:+.6}  dT dH = {:.4}  Robertson = {:.4}  spin-orbit bound = {:.4}",
            r.expectation.spin_orbit_mean, r.expectation.beta_k_mean, r.product_th, r.robertson_bound, r.paper_bound
        );
    }
    Ok(())
}
