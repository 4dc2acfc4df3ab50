//! Time-energy uncertainty for a small family of random packets.

use dirac_timeop::grid::GridSpec;
use dirac_timeop::observables::{uncertainty_report, TAU0};
use dirac_timeop::wavepacket::{build_packet, packet_family, PacketSpec};

fn main() -> dirac_timeop::Result<()> {
    let grid = GridSpec::default_1d();
    let base = PacketSpec { mean_momentum: [0.4, 0.0, 0.0], ..PacketSpec::default() };
    println!("{:>3} {:>12} {:>12} {:>12} {:>12}", "#", "dT dH", "Robertson", "|i<[T,H]>|", "closed form");
    for (i, spec) in packet_family(&base, &grid, 8, 42).iter().enumerate() {
        let r = uncertainty_report(&build_packet(spec, &grid)?, TAU0)?;
        println!(
            "{i:>3} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            r.product_th,
            r.robertson_bound,
            r.expectation.commutator_th.norm(),
            r.commutator_closed_form.norm()
        );
    }
    Ok(())
}
