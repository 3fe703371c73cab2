//! Decibel and power-unit conversions shared across the simulator.
//!
//! Gains and losses are composed in the dB domain; powers are added only in
//! the linear (milliwatt) domain, where summation is physically meaningful.

/// Speed of light in vacuum (m/s), exact by definition.
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Thermal noise power spectral density at 290 K, in dBm per Hz.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

/// Converts a decibel quantity to its linear ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear ratio to decibels. Zero maps to negative infinity.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Converts dBm to milliwatts.
pub fn dbm_to_milliwatts(dbm: f64) -> f64 {
    db_to_linear(dbm)
}

/// Converts milliwatts to dBm. Zero maps to negative infinity.
pub fn milliwatts_to_dbm(mw: f64) -> f64 {
    linear_to_db(mw)
}

/// Converts dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    dbm_to_milliwatts(dbm) / 1000.0
}

/// Converts watts to dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    milliwatts_to_dbm(watts * 1000.0)
}
