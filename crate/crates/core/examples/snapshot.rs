//! Dump a packet to a text snapshot, read it back, and compare.

use std::io::BufReader;

use dirac_timeop::grid::GridSpec;
use dirac_timeop::wavepacket::{build_packet, read_snapshot, write_snapshot, PacketSpec};

fn main() -> dirac_timeop::Result<()> {
    let grid = GridSpec::new(1, 256, 100.0)?;
    let spec = PacketSpec { width: 5.0, ..PacketSpec::default() };
    let psi = build_packet(&spec, &grid)?;

    let path = std::env::temp_dir().join("timeop_snapshot.txt");
    write_snapshot(&psi, std::fs::File::create(&path)?)?;
    let back = read_snapshot(BufReader::new(std::fs::File::open(&path)?))?;
    let diff = psi
        .position_view()
        .iter()
        .flatten()
        .zip(back.position_view().iter().flatten())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    println!("wrote {}, max difference after reload: {diff:e}", path.display());
    std::fs::remove_file(&path)?;
    Ok(())
}
