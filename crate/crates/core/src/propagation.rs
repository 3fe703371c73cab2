//! Millimeter-wave link budget primitives: free-space path loss, atmospheric
//! absorption, received power, thermal noise, and Shannon throughput.
//!
//! The 57-64 GHz region sits under the oxygen absorption peak (about
//! 15 dB/km) while 71-95 GHz crosses it in a low valley (about 0.4 dB/km);
//! that differential drives every band trade-off in the simulator, so the
//! absorption model is kept explicit and configurable rather than folded
//! into a path loss exponent.

use crate::error::{Error, Result};
use crate::units::{db_to_linear, SPEED_OF_LIGHT_M_S, THERMAL_NOISE_DBM_PER_HZ};

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Carrier frequency in Hz, restricted to the simulator's 57-95 GHz scope.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FrequencyHz(f64);

impl FrequencyHz {
    pub const MIN_HZ: f64 = 57e9;
    pub const MAX_HZ: f64 = 95e9;

    /// Rejects frequencies outside [57 GHz, 95 GHz].
    pub fn new(hz: f64) -> Result<Self> {
        if !hz.is_finite() || !(Self::MIN_HZ..=Self::MAX_HZ).contains(&hz) {
            return Err(Error::Domain(format!(
                "carrier frequency {:.3} GHz outside the supported 57-95 GHz range",
                hz / 1e9
            )));
        }
        Ok(Self(hz))
    }

    pub fn from_ghz(ghz: f64) -> Result<Self> {
        Self::new(ghz * 1e9)
    }

    pub fn hz(self) -> f64 {
        self.0
    }

    pub fn ghz(self) -> f64 {
        self.0 / 1e9
    }
}

/// Piecewise-linear specific attenuation (dB/km) over frequency anchors.
///
/// Anchors are (GHz, dB/km) pairs, strictly increasing in frequency with
/// nonnegative values. Queries interpolate linearly between the surrounding
/// anchors and are exact at anchor frequencies; queries outside the anchored
/// range are errors, not extrapolations.
#[derive(Debug, Clone, PartialEq)]
pub struct AttenuationTable {
    anchors: Vec<(f64, f64)>,
}

impl AttenuationTable {
    pub fn new(anchors: Vec<(f64, f64)>) -> Result<Self> {
        if anchors.len() < 2 {
            return Err(Error::Domain(
                "attenuation table needs at least two anchors".into(),
            ));
        }
        for w in anchors.windows(2) {
            // Written so that a NaN frequency also fails the check.
            let strictly_increasing = w[1].0 > w[0].0;
            if !strictly_increasing {
                return Err(Error::Domain(format!(
                    "attenuation anchors must be strictly increasing in frequency \
                     ({} GHz then {} GHz)",
                    w[0].0, w[1].0
                )));
            }
        }
        for &(f, v) in &anchors {
            if !f.is_finite() || !v.is_finite() || v < 0.0 {
                return Err(Error::Domain(format!(
                    "attenuation anchor ({f} GHz, {v} dB/km) must be finite and nonnegative"
                )));
            }
        }
        Ok(Self { anchors })
    }

    /// Oxygen-dominated defaults: 15 dB/km peak at 60 GHz falling to a
    /// 0.4-0.6 dB/km valley across 71-95 GHz.
    pub fn oxygen_default() -> Self {
        Self::new(vec![
            (57.0, 8.0),
            (60.0, 15.0),
            (64.0, 8.0),
            (66.0, 1.5),
            (71.0, 0.45),
            (76.0, 0.4),
            (81.0, 0.4),
            (86.0, 0.45),
            (92.0, 0.5),
            (95.0, 0.6),
        ])
        .expect("default anchors are valid")
    }

    pub fn anchors(&self) -> &[(f64, f64)] {
        &self.anchors
    }

    /// Specific attenuation at `freq`, in dB/km.
    pub fn specific_attenuation_db_per_km(&self, freq: FrequencyHz) -> Result<f64> {
        let f = freq.ghz();
        for w in self.anchors.windows(2) {
            let (f0, v0) = w[0];
            let (f1, v1) = w[1];
            if f >= f0 && f <= f1 {
                let t = (f - f0) / (f1 - f0);
                // Lerp form that is exact at both endpoints.
                return Ok(v0 * (1.0 - t) + v1 * t);
            }
        }
        Err(Error::Domain(format!(
            "frequency {f} GHz outside attenuation table range {}-{} GHz",
            self.anchors[0].0,
            self.anchors[self.anchors.len() - 1].0
        )))
    }
}

impl Default for AttenuationTable {
    fn default() -> Self {
        Self::oxygen_default()
    }
}

/// Transmitter-receiver separation plus blockage state for one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    distance_m: f64,
    shadowed: bool,
    shadow_loss_db: f64,
}

impl LinkGeometry {
    /// Distance must be strictly positive; shadow loss nonnegative.
    pub fn new(distance_m: f64, shadowed: bool, shadow_loss_db: f64) -> Result<Self> {
        if !distance_m.is_finite() || distance_m <= 0.0 {
            return Err(Error::Domain(format!(
                "link distance {distance_m} m must be positive"
            )));
        }
        if !shadow_loss_db.is_finite() || shadow_loss_db < 0.0 {
            return Err(Error::Domain(format!(
                "shadow loss {shadow_loss_db} dB must be nonnegative"
            )));
        }
        Ok(Self {
            distance_m,
            shadowed,
            shadow_loss_db,
        })
    }

    pub fn distance_m(self) -> f64 {
        self.distance_m
    }

    pub fn shadowed(self) -> bool {
        self.shadowed
    }

    pub fn shadow_loss_db(self) -> f64 {
        self.shadow_loss_db
    }
}

/// Everything needed to evaluate received power over one directional link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub tx_power_dbm: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub freq: FrequencyHz,
    pub geometry: LinkGeometry,
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Friis free-space path loss in dB: 20 * log10(4 * pi * d * f / c).
pub fn free_space_path_loss_db(freq: FrequencyHz, distance_m: f64) -> Result<f64> {
    if !distance_m.is_finite() || distance_m <= 0.0 {
        return Err(Error::Domain(format!(
            "path loss distance {distance_m} m must be positive"
        )));
    }
    let arg = 4.0 * std::f64::consts::PI * distance_m * freq.hz() / SPEED_OF_LIGHT_M_S;
    Ok(20.0 * arg.log10())
}

/// Received power in dBm: transmit power plus antenna gains, minus free-space
/// path loss, absorption over the path, and shadowing loss when shadowed.
pub fn received_power_dbm(budget: &LinkBudget, table: &AttenuationTable) -> Result<f64> {
    let fspl = free_space_path_loss_db(budget.freq, budget.geometry.distance_m())?;
    let absorption = table.specific_attenuation_db_per_km(budget.freq)?
        * (budget.geometry.distance_m() / 1000.0);
    let shadow = if budget.geometry.shadowed() {
        budget.geometry.shadow_loss_db()
    } else {
        0.0
    };
    Ok(budget.tx_power_dbm + budget.tx_gain_dbi + budget.rx_gain_dbi - fspl - absorption - shadow)
}

/// Thermal noise power in dBm: -174 dBm/Hz + 10 * log10(B) + noise figure.
pub fn noise_power_dbm(bandwidth_hz: f64, noise_figure_db: f64) -> Result<f64> {
    if !bandwidth_hz.is_finite() || bandwidth_hz <= 0.0 {
        return Err(Error::Domain(format!(
            "noise bandwidth {bandwidth_hz} Hz must be positive"
        )));
    }
    if !noise_figure_db.is_finite() || noise_figure_db < 0.0 {
        return Err(Error::Domain(format!(
            "noise figure {noise_figure_db} dB must be nonnegative"
        )));
    }
    Ok(THERMAL_NOISE_DBM_PER_HZ + 10.0 * bandwidth_hz.log10() + noise_figure_db)
}

/// Shannon throughput in bit/s: B * log2(1 + 10^(SINR/10)).
///
/// An SINR of negative infinity (zero linear SINR) yields exactly zero.
pub fn shannon_throughput_bps(sinr_db: f64, bandwidth_hz: f64) -> Result<f64> {
    if !bandwidth_hz.is_finite() || bandwidth_hz <= 0.0 {
        return Err(Error::Domain(format!(
            "channel bandwidth {bandwidth_hz} Hz must be positive"
        )));
    }
    if sinr_db.is_nan() {
        return Err(Error::Domain("SINR is NaN".into()));
    }
    Ok(bandwidth_hz * (1.0 + db_to_linear(sinr_db)).log2())
}
