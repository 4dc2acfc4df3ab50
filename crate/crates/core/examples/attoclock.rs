//! Barrier widths and tunneling times for a helium-like target, calibrated
//! on the 40 as / 13 a.u. attoclock point.

use dirac_timeop::tunneling::{
    calibrated_group_velocity, field_for_width, sweep_csv, sweep_fields, Calibration, TimeModel,
};

fn main() -> dirac_timeop::Result<()> {
    let (ip, z) = (0.5792, 1.0);
    let cal = Calibration::default();
    let ratio = cal.velocity_ratio()?;
    println!("1 / (v/c)^2 = {:.2}", 1.0 / ratio);
    println!("v_gp = {:.4e} m/s", calibrated_group_velocity(cal.lab_time, cal.width_au)?);

    let fields: Vec<f64> = [20.0, 13.0, 8.0].iter().map(|&w| field_for_width(ip, z, w)).collect::<Result<_, _>>()?;
    let rows = sweep_fields(ip, z, ratio, &fields, &TimeModel::default())?;
    print!("{}", sweep_csv(&rows));
    Ok(())
}
