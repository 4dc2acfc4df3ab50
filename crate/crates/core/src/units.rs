//! Physical constants and unit conversions. Everything outside this module
//! and [`crate::tunneling`] works in natural units (hbar = c = m0 = 1).

/// Bohr radius in angstrom.
pub const BOHR_IN_ANGSTROM: f64 = 0.529_177_21;
/// Speed of light, m/s (exact).
pub const C_SI: f64 = 2.997_924_58e8;
pub const ATTOSECOND: f64 = 1e-18;
pub const ANGSTROM: f64 = 1e-10;
/// Planck constant, J s (exact).
pub const PLANCK: f64 = 6.626_070_15e-34;
pub const ELECTRON_MASS_KG: f64 = 9.109_383_701_5e-31;
pub const HARTREE_EV: f64 = 27.211_386_245_988;
/// Atomic unit of electric field, V/m.
pub const ATOMIC_FIELD_V_PER_M: f64 = 5.142_206_747_63e11;

/// The conversion factors above gathered into one value, for code that wants
/// to pass them around or print them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitTable {
    pub bohr_in_angstrom: f64,
    pub c_si: f64,
    pub attosecond: f64,
    pub hartree_ev: f64,
    pub atomic_field_v_per_m: f64,
}

impl Default for UnitTable {
    fn default() -> Self {
        Self {
            bohr_in_angstrom: BOHR_IN_ANGSTROM,
            c_si: C_SI,
            attosecond: ATTOSECOND,
            hartree_ev: HARTREE_EV,
            atomic_field_v_per_m: ATOMIC_FIELD_V_PER_M,
        }
    }
}

pub fn au_to_angstrom(len_au: f64) -> f64 {
    len_au * BOHR_IN_ANGSTROM
}

pub fn angstrom_to_au(len_a: f64) -> f64 {
    len_a / BOHR_IN_ANGSTROM
}

pub fn au_to_meters(len_au: f64) -> f64 {
    au_to_angstrom(len_au) * ANGSTROM
}

pub fn seconds_to_as(t: f64) -> f64 {
    t / ATTOSECOND
}

pub fn as_to_seconds(t: f64) -> f64 {
    t * ATTOSECOND
}
