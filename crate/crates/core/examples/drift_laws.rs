//! The mean of T drifts at <p^2/H^2> = (v/c)^2 for slow packets and at
//! close to 1 for ultrarelativistic ones.

use dirac_timeop::evolution::{analyze_drift, drift_coefficient, group_velocity, run_series, DriftTarget};
use dirac_timeop::grid::GridSpec;
use dirac_timeop::observables::TAU0;
use dirac_timeop::wavepacket::{build_packet, PacketSpec};

fn main() -> dirac_timeop::Result<()> {
    println!("{:>6} {:>12} {:>12} {:>12}", "p0", "slope", "<p2/H2>", "v^2");
    for (p0, grid, width, horizon) in [
        (0.05, GridSpec::new(1, 4096, 4000.0)?, 200.0, 200.0),
        (1.0, GridSpec::default_1d(), 10.0, 40.0),
        (20.0, GridSpec::default_1d(), 10.0, 40.0),
    ] {
        let spec = PacketSpec { width, mean_momentum: [p0, 0.0, 0.0], ..PacketSpec::default() };
        let psi = build_packet(&spec, &grid)?;
        let samples = ((horizon * 4.0 * (p0 * p0 + 1.0f64).sqrt() / std::f64::consts::PI) as usize).max(128);
        let series = run_series(&psi, horizon, samples, TAU0)?;
        let fit = analyze_drift(&series, DriftTarget::TimeOperator)?;
        let v = group_velocity(&psi)[0];
        println!("{p0:>6} {:>12.8} {:>12.8} {:>12.8}", fit.slope, drift_coefficient(&psi), v * v);
    }
    Ok(())
}
