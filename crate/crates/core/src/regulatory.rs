//! Spectrum bands and the regulatory rules that constrain radio configs.
//!
//! The V-band (57-64 GHz) is unlicensed with a 27 dBm transmit ceiling and no
//! antenna requirement; the E-band (71-76, 81-86, 92-95 GHz) is lightly
//! licensed with a 35 dBm ceiling and a 43 dBi minimum antenna gain.
//! Violations are reported as data so callers can decide whether a rule is
//! binding or explicitly waived for a study.

use crate::error::{Error, Result};
use crate::propagation::FrequencyHz;
use std::fmt;

// ---------------------------------------------------------------------------
// Bands
// ---------------------------------------------------------------------------

/// The two millimeter-wave bands the simulator models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band {
    V,
    E,
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Band::V => write!(f, "V"),
            Band::E => write!(f, "E"),
        }
    }
}

/// A set of bands, used for allocation targets and transceiver states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BandSet {
    v: bool,
    e: bool,
}

impl BandSet {
    pub const EMPTY: BandSet = BandSet { v: false, e: false };
    pub const V_ONLY: BandSet = BandSet { v: true, e: false };
    pub const E_ONLY: BandSet = BandSet { v: false, e: true };
    pub const BOTH: BandSet = BandSet { v: true, e: true };

    pub fn single(band: Band) -> BandSet {
        match band {
            Band::V => Self::V_ONLY,
            Band::E => Self::E_ONLY,
        }
    }

    pub fn contains(self, band: Band) -> bool {
        match band {
            Band::V => self.v,
            Band::E => self.e,
        }
    }

    pub fn intersects(self, other: BandSet) -> bool {
        (self.v && other.v) || (self.e && other.e)
    }

    pub fn is_empty(self) -> bool {
        !self.v && !self.e
    }

    pub fn len(self) -> usize {
        usize::from(self.v) + usize::from(self.e)
    }

    pub fn iter(self) -> impl Iterator<Item = Band> {
        [(Band::V, self.v), (Band::E, self.e)]
            .into_iter()
            .filter_map(|(b, present)| present.then_some(b))
    }
}

impl fmt::Display for BandSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.v, self.e) {
            (false, false) => write!(f, "{{}}"),
            (true, false) => write!(f, "{{V}}"),
            (false, true) => write!(f, "{{E}}"),
            (true, true) => write!(f, "{{V,E}}"),
        }
    }
}

// ---------------------------------------------------------------------------
// Rules
// ---------------------------------------------------------------------------

/// Regulatory constraints for one band.
#[derive(Debug, Clone, PartialEq)]
pub struct RegulatoryRule {
    pub band: Band,
    /// Allocated spectrum as disjoint contiguous (low, high) ranges in GHz.
    pub freq_ranges_ghz: Vec<(f64, f64)>,
    pub licensed: bool,
    pub max_tx_power_dbm: f64,
    /// Minimum antenna gain, where the regulator imposes one.
    pub min_antenna_gain_dbi: Option<f64>,
}

/// Built-in rule set for both bands.
pub fn default_rules() -> Vec<RegulatoryRule> {
    vec![
        RegulatoryRule {
            band: Band::V,
            freq_ranges_ghz: vec![(57.0, 64.0)],
            licensed: false,
            max_tx_power_dbm: 27.0,
            min_antenna_gain_dbi: None,
        },
        RegulatoryRule {
            band: Band::E,
            freq_ranges_ghz: vec![(71.0, 76.0), (81.0, 86.0), (92.0, 95.0)],
            licensed: true,
            max_tx_power_dbm: 35.0,
            min_antenna_gain_dbi: Some(43.0),
        },
    ]
}

/// Maps a frequency to the unique band whose allocation contains it, if any.
/// Frequencies in the gaps (64-71, 76-81, 86-92 GHz) map to `None`.
pub fn band_of(rules: &[RegulatoryRule], freq: FrequencyHz) -> Option<Band> {
    let ghz = freq.ghz();
    rules
        .iter()
        .find(|r| {
            r.freq_ranges_ghz
                .iter()
                .any(|&(lo, hi)| ghz >= lo && ghz <= hi)
        })
        .map(|r| r.band)
}

// ---------------------------------------------------------------------------
// Radio configuration and validation
// ---------------------------------------------------------------------------

/// One radio chain's spectrum occupancy and power/gain settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConfig {
    pub band: Band,
    pub carrier: FrequencyHz,
    pub bandwidth_hz: f64,
    pub tx_power_dbm: f64,
    pub antenna_gain_dbi: f64,
}

/// A single violated rule, with the offending value in the message.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub band: Band,
    /// Stable identifier: "spectrum-occupancy", "max-tx-power", or
    /// "min-antenna-gain".
    pub rule: &'static str,
    pub message: String,
}

/// Outcome of validating one or more radio configs. Violations are data, not
/// errors; waivers record rules that were deliberately not enforced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub waivers: Vec<String>,
}

impl ValidationReport {
    pub fn is_compliant(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
        self.waivers.extend(other.waivers);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "violation [{}-band {}]: {}", v.band, v.rule, v.message)?;
        }
        for w in &self.waivers {
            writeln!(f, "waiver: {w}")?;
        }
        Ok(())
    }
}

/// Checks `config` against the rule for its band.
///
/// Total over finite inputs: every problem becomes a report entry rather than
/// an error or panic. With `enforce_min_gain` false, a gain shortfall is
/// recorded as a waiver instead of a violation.
pub fn validate_radio_config(
    config: &RadioConfig,
    rules: &[RegulatoryRule],
    enforce_min_gain: bool,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let Some(rule) = rules.iter().find(|r| r.band == config.band) else {
        report.violations.push(Violation {
            band: config.band,
            rule: "spectrum-occupancy",
            message: format!("no regulatory rule defined for the {} band", config.band),
        });
        return report;
    };

    let lo = config.carrier.ghz() - config.bandwidth_hz / 2.0 / 1e9;
    let hi = config.carrier.ghz() + config.bandwidth_hz / 2.0 / 1e9;
    let fits = config.bandwidth_hz > 0.0
        && rule
            .freq_ranges_ghz
            .iter()
            .any(|&(rlo, rhi)| lo >= rlo && hi <= rhi);
    if !fits {
        let ranges = rule
            .freq_ranges_ghz
            .iter()
            .map(|(a, b)| format!("{a}-{b}"))
            .collect::<Vec<_>>()
            .join(", ");
        report.violations.push(Violation {
            band: config.band,
            rule: "spectrum-occupancy",
            message: format!(
                "occupied spectrum {lo:.3}-{hi:.3} GHz does not fit inside one \
                 allocated {}-band range ({ranges} GHz)",
                config.band
            ),
        });
    }

    if config.tx_power_dbm > rule.max_tx_power_dbm {
        report.violations.push(Violation {
            band: config.band,
            rule: "max-tx-power",
            message: format!(
                "transmit power {} dBm exceeds the {}-band limit of {} dBm",
                config.tx_power_dbm, config.band, rule.max_tx_power_dbm
            ),
        });
    }

    if let Some(min_gain) = rule.min_antenna_gain_dbi {
        if config.antenna_gain_dbi < min_gain {
            if enforce_min_gain {
                report.violations.push(Violation {
                    band: config.band,
                    rule: "min-antenna-gain",
                    message: format!(
                        "antenna gain {} dBi below the {}-band minimum of {} dBi",
                        config.antenna_gain_dbi, config.band, min_gain
                    ),
                });
            } else {
                report.waivers.push(format!(
                    "{}-band minimum antenna gain {} dBi not enforced \
                     (configured gain {} dBi)",
                    config.band, min_gain, config.antenna_gain_dbi
                ));
            }
        }
    }

    report
}

/// Effective isotropic radiated power: transmit power plus antenna gain.
pub fn eirp_dbm(tx_power_dbm: f64, antenna_gain_dbi: f64) -> f64 {
    tx_power_dbm + antenna_gain_dbi
}

/// Convenience constructor used by scenario assembly.
pub fn radio_config(
    band: Band,
    carrier_ghz: f64,
    bandwidth_hz: f64,
    tx_power_dbm: f64,
    antenna_gain_dbi: f64,
) -> Result<RadioConfig> {
    Ok(RadioConfig {
        band,
        carrier: FrequencyHz::from_ghz(carrier_ghz).map_err(|e| match e {
            Error::Domain(msg) => Error::Domain(format!("{band}-band carrier: {msg}")),
            other => other,
        })?,
        bandwidth_hz,
        tx_power_dbm,
        antenna_gain_dbi,
    })
}
