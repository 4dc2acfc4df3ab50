//! Mandelstam-Tamm time of the T observable next to its spread.

use dirac_timeop::evolution::{group_velocity, mt_from_series, run_series, Observable};
use dirac_timeop::grid::GridSpec;
use dirac_timeop::observables::{expect_all, TAU0};
use dirac_timeop::wavepacket::{build_packet, PacketSpec};

fn main() -> dirac_timeop::Result<()> {
    let grid = GridSpec::new(1, 4096, 4000.0)?;
    for p0 in [0.05, 0.1] {
        let spec = PacketSpec { width: 200.0, mean_momentum: [p0, 0.0, 0.0], ..PacketSpec::default() };
        let psi = build_packet(&spec, &grid)?;
        let series = run_series(&psi, 20.0, 64, TAU0)?;
        let mid = &series.reports[series.len() / 2];
        let mt = mt_from_series(&series, Observable::TimeOperator)?;
        let v = group_velocity(&psi)[0];
        let e = expect_all(&psi, TAU0)?;
        println!(
            "p0 = {p0}: T_mt = {mt:.4}, T_mt / dT = {:.4}, (c/v)^2 = {:.4}, T_mt dH = {:.4}",
            mt / mid.delta_t(),
            1.0 / (v * v),
            mt * e.delta_h()
        );
    }
    Ok(())
}
