//! Physical constants, CODATA 2018. Every module pulls from this table;
//! no constant is redefined elsewhere.

/// Speed of light in vacuum (m/s, exact).
pub const C0: f64 = 299_792_458.0;

/// Vacuum permeability (H/m).
pub const MU0: f64 = 1.256_637_062_12e-6;

/// Vacuum permittivity (F/m).
pub const EPS0: f64 = 8.854_187_812_8e-12;

/// Boltzmann constant (J/K, exact).
pub const K_B: f64 = 1.380_649e-23;

/// Planck constant (J s, exact).
pub const PLANCK_H: f64 = 6.626_070_15e-34;

/// Wave impedance of free space (ohm).
pub const ETA0: f64 = 376.730_313_668;
