//! A packet mixing both energy branches trembles at 2<|H|>; projecting onto
//! positive energy removes the tremble.

use num_complex::Complex64;

use dirac_timeop::evolution::{analyze_drift, run_series, zitterbewegung_frequency, DriftTarget};
use dirac_timeop::grid::GridSpec;
use dirac_timeop::observables::TAU0;
use dirac_timeop::wavepacket::{build_packet, PacketSpec};

fn main() -> dirac_timeop::Result<()> {
    let grid = GridSpec::new(1, 2048, 400.0)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for project in [false, true] {
        let spec = PacketSpec {
            mean_momentum: [0.0; 3],
            spinor_seed: [s, 0.0, 0.0, s].map(Complex64::from),
            project_positive: project,
            ..PacketSpec::default()
        };
        let psi = build_packet(&spec, &grid)?;
        let series = run_series(&psi, 40.0, 512, TAU0)?;
        let fit = analyze_drift(&series, DriftTarget::PositionX)?;
        println!(
            "projected = {project:5}: 2<|H|> = {:.5}, fitted frequency = {:.5}, amplitude = {:.3e}",
            zitterbewegung_frequency(&series),
            fit.oscillation_frequency,
            fit.oscillation_amplitude
        );
    }
    Ok(())
}
