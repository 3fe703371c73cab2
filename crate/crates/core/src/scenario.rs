//! Scenario files: flat `key = value` text describing the world to simulate.
//!
//! Lines are independent; `#` starts a comment (inline allowed); keys are
//! dotted paths like `radio.v.tx_power_dbm`. Unknown and duplicate keys are
//! hard errors so a misspelled override can never silently fall back to a
//! default. An empty file is the reference scenario: a macrocell plus a
//! femtocell, ten users, 5 GHz in each band, 30 dBi combined mainlobe gain,
//! 10 dB blockage shadowing, and the built-in regulatory rules.
//!
//! Parsing ends with regulatory validation of both radios. Violations abort
//! with a validation error; rules that are deliberately not enforced (the
//! E-band minimum antenna gain, by default) surface as waivers instead.

use crate::error::{Error, Result};
use crate::network::{Node, NodeRole, Point, SectorAntenna};
use crate::policy::Thresholds;
use crate::propagation::AttenuationTable;
use crate::regulatory::{self, default_rules, Band, RadioConfig, RegulatoryRule, ValidationReport};
use crate::transceiver::{Architecture, HandoverCostModel};
use std::collections::HashMap;
use std::path::Path;

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

/// Immutable world description consumed by the sweep driver.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub user_count: usize,
    /// Probability that a user's serving path is blocked in a given trial.
    pub blockage_prob: f64,
    pub shadow_loss_db: f64,

    pub macro_pos: Point,
    pub femto_enabled: bool,
    pub femto_pos: Point,
    pub extra_bs: Vec<Point>,

    pub radio_v: RadioConfig,
    pub radio_e: RadioConfig,
    /// Antenna pattern used by every node, boresight left at 0.
    pub antenna_template: SectorAntenna,
    pub noise_figure_db: f64,
    pub attenuation: AttenuationTable,

    pub thresholds: Thresholds,
    pub handover: HandoverCostModel,
    pub architecture: Architecture,

    pub interference_enabled: bool,
    /// Extra standalone co-channel links dropped inside the region below.
    pub interferer_count: usize,
    pub region_center: Point,
    pub region_radius_m: f64,

    pub rules: Vec<RegulatoryRule>,
    pub enforce_min_gain: bool,
    /// Outcome of the parse-time regulatory check; violations never reach a
    /// constructed Scenario, so this carries waivers only.
    pub validation: ValidationReport,

    pub trials: usize,
    pub master_seed: u64,

    pub sweep_distances_m: Vec<f64>,
    pub sweep_densities: Vec<usize>,
    /// Mean BS-user distance used while sweeping interferer count.
    pub density_fixed_distance_m: f64,
}

/// The built-in mean-distance sweep: 15 log-spaced points from 10 to 500 m.
pub fn default_distance_sweep() -> Vec<f64> {
    (0..15)
        .map(|k| 10.0 * 50f64.powf(k as f64 / 14.0))
        .collect()
}

impl Scenario {
    /// The all-defaults scenario, identical to parsing an empty file.
    pub fn defaults() -> Scenario {
        parse_scenario("").expect("built-in defaults are a valid scenario")
    }

    /// Base stations in id order: macro, then femto (when enabled), then any
    /// extra tiers. Every BS carries both radios and the shared architecture.
    pub fn base_stations(&self) -> Vec<Node> {
        let mut positions = vec![(NodeRole::MacroBs, self.macro_pos)];
        if self.femto_enabled {
            positions.push((NodeRole::FemtoBs, self.femto_pos));
        }
        positions.extend(self.extra_bs.iter().map(|&p| (NodeRole::PicoBs, p)));
        positions
            .into_iter()
            .enumerate()
            .map(|(id, (role, position))| {
                Node::base_station(
                    id,
                    role,
                    position,
                    Some(self.radio_v),
                    Some(self.radio_e),
                    self.architecture,
                )
                .expect("scenario base stations always carry both radios")
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct Builder {
    user_count: usize,
    blockage_prob: f64,
    shadow_loss_db: f64,
    macro_pos: Point,
    femto_enabled: bool,
    femto_pos: Point,
    extra_bs: Vec<Point>,
    v_carrier_ghz: f64,
    v_bandwidth_hz: f64,
    v_tx_power_dbm: f64,
    e_carrier_ghz: f64,
    e_bandwidth_hz: f64,
    e_tx_power_dbm: f64,
    mainlobe_dbi: f64,
    sidelobe_dbi: f64,
    beamwidth_deg: f64,
    noise_figure_db: f64,
    anchors: Vec<(f64, f64)>,
    snr_threshold_db: f64,
    density_inr_db: f64,
    hysteresis_db: f64,
    demand_bps: Option<f64>,
    sync_delay_s: f64,
    feedback_factor: f64,
    architecture: Architecture,
    interference_enabled: bool,
    interferer_count: usize,
    region_center: Point,
    region_radius_m: f64,
    enforce_min_gain: bool,
    v_max_power_dbm: f64,
    e_max_power_dbm: f64,
    e_min_gain_dbi: Option<f64>,
    v_ranges_ghz: Vec<(f64, f64)>,
    e_ranges_ghz: Vec<(f64, f64)>,
    trials: usize,
    master_seed: u64,
    sweep_distances_m: Vec<f64>,
    sweep_densities: Vec<usize>,
    density_fixed_distance_m: f64,
    /// key -> line it was set on; doubles as the duplicate detector.
    seen: HashMap<String, usize>,
}

impl Builder {
    fn new() -> Builder {
        Builder {
            user_count: 10,
            blockage_prob: 0.2,
            shadow_loss_db: 10.0,
            macro_pos: Point::new(0.0, 0.0),
            femto_enabled: true,
            femto_pos: Point::new(120.0, 0.0),
            extra_bs: Vec::new(),
            v_carrier_ghz: 60.0,
            v_bandwidth_hz: 5e9,
            v_tx_power_dbm: 27.0,
            e_carrier_ghz: 73.5,
            e_bandwidth_hz: 5e9,
            e_tx_power_dbm: 35.0,
            mainlobe_dbi: 15.0,
            sidelobe_dbi: -10.0,
            beamwidth_deg: 20.0,
            noise_figure_db: 7.0,
            anchors: AttenuationTable::oxygen_default().anchors().to_vec(),
            snr_threshold_db: 10.0,
            density_inr_db: 0.0,
            hysteresis_db: 2.0,
            demand_bps: None,
            sync_delay_s: 0.01,
            feedback_factor: 0.5,
            architecture: Architecture::DualChain,
            interference_enabled: true,
            interferer_count: 0,
            region_center: Point::new(0.0, 0.0),
            region_radius_m: 50.0,
            enforce_min_gain: false,
            v_max_power_dbm: 27.0,
            e_max_power_dbm: 35.0,
            e_min_gain_dbi: Some(43.0),
            v_ranges_ghz: vec![(57.0, 64.0)],
            e_ranges_ghz: vec![(71.0, 76.0), (81.0, 86.0), (92.0, 95.0)],
            trials: 500,
            master_seed: 1,
            sweep_distances_m: default_distance_sweep(),
            sweep_densities: vec![0, 1, 2, 4, 8, 16],
            density_fixed_distance_m: 25.0,
            seen: HashMap::new(),
        }
    }

    /// Line a key was set on; 0 means "built-in default".
    fn line_of(&self, keys: &[&str]) -> usize {
        keys.iter()
            .filter_map(|k| self.seen.get(*k).copied())
            .next()
            .unwrap_or(0)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_f64(value: &str, line: usize, key: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("{key}: expected a number, got '{value}'")))
}

fn parse_usize(value: &str, line: usize, key: &str) -> Result<usize> {
    value.parse::<usize>().map_err(|_| {
        parse_err(
            line,
            format!("{key}: expected a nonnegative integer, got '{value}'"),
        )
    })
}

fn parse_u64(value: &str, line: usize, key: &str) -> Result<u64> {
    value.parse::<u64>().map_err(|_| {
        parse_err(
            line,
            format!("{key}: expected an unsigned integer, got '{value}'"),
        )
    })
}

fn parse_bool(value: &str, line: usize, key: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(parse_err(
            line,
            format!("{key}: expected 'true' or 'false', got '{value}'"),
        )),
    }
}

/// "x,y" -> Point.
fn parse_point(value: &str, line: usize, key: &str) -> Result<Point> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(parse_err(
            line,
            format!("{key}: expected 'x,y' coordinates, got '{value}'"),
        ));
    }
    Ok(Point::new(
        parse_f64(parts[0], line, key)?,
        parse_f64(parts[1], line, key)?,
    ))
}

/// "x,y; x,y; ..." -> points. An empty value is an empty list.
fn parse_point_list(value: &str, line: usize, key: &str) -> Result<Vec<Point>> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(';')
        .map(|part| parse_point(part.trim(), line, key))
        .collect()
}

/// Comma-separated floats.
fn parse_f64_list(value: &str, line: usize, key: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|part| parse_f64(part.trim(), line, key))
        .collect()
}

fn parse_usize_list(value: &str, line: usize, key: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(|part| parse_usize(part.trim(), line, key))
        .collect()
}

/// "a:b, a:b, ..." -> pairs, shared by attenuation anchors and rule ranges.
fn parse_pair_list(value: &str, line: usize, key: &str) -> Result<Vec<(f64, f64)>> {
    value
        .split(',')
        .map(|part| {
            let halves: Vec<&str> = part.trim().split(':').map(str::trim).collect();
            if halves.len() != 2 {
                return Err(parse_err(
                    line,
                    format!("{key}: expected 'a:b' pairs, got '{part}'"),
                ));
            }
            Ok((
                parse_f64(halves[0], line, key)?,
                parse_f64(halves[1], line, key)?,
            ))
        })
        .collect()
}

/// A float or the literal "none".
fn parse_opt_f64(value: &str, line: usize, key: &str) -> Result<Option<f64>> {
    if value == "none" {
        Ok(None)
    } else {
        parse_f64(value, line, key).map(Some)
    }
}

fn apply_key(b: &mut Builder, key: &str, value: &str, line: usize) -> Result<()> {
    match key {
        "users.count" => b.user_count = parse_usize(value, line, key)?,
        "users.blockage_prob" => b.blockage_prob = parse_f64(value, line, key)?,
        "users.shadow_loss_db" => b.shadow_loss_db = parse_f64(value, line, key)?,
        "topology.macro_pos_m" => b.macro_pos = parse_point(value, line, key)?,
        "topology.femto_enabled" => b.femto_enabled = parse_bool(value, line, key)?,
        "topology.femto_pos_m" => b.femto_pos = parse_point(value, line, key)?,
        "topology.extra_bs_pos_m" => b.extra_bs = parse_point_list(value, line, key)?,
        "radio.v.carrier_ghz" => b.v_carrier_ghz = parse_f64(value, line, key)?,
        "radio.v.bandwidth_ghz" => b.v_bandwidth_hz = parse_f64(value, line, key)? * 1e9,
        "radio.v.tx_power_dbm" => b.v_tx_power_dbm = parse_f64(value, line, key)?,
        "radio.e.carrier_ghz" => b.e_carrier_ghz = parse_f64(value, line, key)?,
        "radio.e.bandwidth_ghz" => b.e_bandwidth_hz = parse_f64(value, line, key)? * 1e9,
        "radio.e.tx_power_dbm" => b.e_tx_power_dbm = parse_f64(value, line, key)?,
        "antenna.mainlobe_dbi" => b.mainlobe_dbi = parse_f64(value, line, key)?,
        "antenna.sidelobe_dbi" => b.sidelobe_dbi = parse_f64(value, line, key)?,
        "antenna.beamwidth_deg" => b.beamwidth_deg = parse_f64(value, line, key)?,
        "noise.figure_db" => b.noise_figure_db = parse_f64(value, line, key)?,
        "attenuation.anchors_ghz_dbkm" => b.anchors = parse_pair_list(value, line, key)?,
        "policy.snr_threshold_db" => b.snr_threshold_db = parse_f64(value, line, key)?,
        "policy.density_inr_threshold_db" => b.density_inr_db = parse_f64(value, line, key)?,
        "policy.hysteresis_db" => b.hysteresis_db = parse_f64(value, line, key)?,
        "policy.demand_bps" => b.demand_bps = parse_opt_f64(value, line, key)?,
        "handover.sync_delay_s" => b.sync_delay_s = parse_f64(value, line, key)?,
        "handover.feedback_factor" => b.feedback_factor = parse_f64(value, line, key)?,
        "transceiver.architecture" => {
            b.architecture = match value {
                "dual" => Architecture::DualChain,
                "single" => Architecture::SingleChain,
                _ => {
                    return Err(parse_err(
                        line,
                        format!("{key}: expected 'dual' or 'single', got '{value}'"),
                    ))
                }
            }
        }
        "interference.enabled" => b.interference_enabled = parse_bool(value, line, key)?,
        "interference.extra_count" => b.interferer_count = parse_usize(value, line, key)?,
        "interference.region_center_m" => b.region_center = parse_point(value, line, key)?,
        "interference.region_radius_m" => b.region_radius_m = parse_f64(value, line, key)?,
        "regulatory.enforce_min_gain" => b.enforce_min_gain = parse_bool(value, line, key)?,
        "regulatory.v.max_tx_power_dbm" => b.v_max_power_dbm = parse_f64(value, line, key)?,
        "regulatory.e.max_tx_power_dbm" => b.e_max_power_dbm = parse_f64(value, line, key)?,
        "regulatory.e.min_antenna_gain_dbi" => b.e_min_gain_dbi = parse_opt_f64(value, line, key)?,
        "regulatory.v.ranges_ghz" => b.v_ranges_ghz = parse_pair_list(value, line, key)?,
        "regulatory.e.ranges_ghz" => b.e_ranges_ghz = parse_pair_list(value, line, key)?,
        "sim.trials" => b.trials = parse_usize(value, line, key)?,
        "sim.master_seed" => b.master_seed = parse_u64(value, line, key)?,
        "sweep.distance_values_m" => b.sweep_distances_m = parse_f64_list(value, line, key)?,
        "sweep.density_values" => b.sweep_densities = parse_usize_list(value, line, key)?,
        "sweep.fixed_mean_distance_m" => b.density_fixed_distance_m = parse_f64(value, line, key)?,
        _ => return Err(parse_err(line, format!("unknown key '{key}'"))),
    }
    Ok(())
}

/// Re-attributes a domain error from a constructor to the offending line.
fn at_line(result: Result<impl Sized>, line: usize) -> Result<()> {
    match result {
        Ok(_) => Ok(()),
        Err(Error::Domain(message)) => Err(parse_err(line, message)),
        Err(other) => Err(other),
    }
}

fn check(condition: bool, line: usize, message: impl Into<String>) -> Result<()> {
    if condition {
        Ok(())
    } else {
        Err(parse_err(line, message))
    }
}

fn strictly_increasing<T: PartialOrd>(values: &[T]) -> bool {
    values.windows(2).all(|w| w[0] < w[1])
}

fn assemble(b: Builder) -> Result<Scenario> {
    // Structural invariants, attributed to the line that set the value.
    let line = |keys: &[&str]| b.line_of(keys);
    check(
        b.user_count >= 1,
        line(&["users.count"]),
        "users.count must be at least 1",
    )?;
    check(
        (0.0..=1.0).contains(&b.blockage_prob),
        line(&["users.blockage_prob"]),
        format!(
            "blockage probability must be in [0, 1], got {}",
            b.blockage_prob
        ),
    )?;
    check(
        b.shadow_loss_db >= 0.0,
        line(&["users.shadow_loss_db"]),
        format!("shadow loss must be >= 0 dB, got {}", b.shadow_loss_db),
    )?;
    check(
        b.noise_figure_db >= 0.0,
        line(&["noise.figure_db"]),
        format!("noise figure must be >= 0 dB, got {}", b.noise_figure_db),
    )?;
    check(
        b.hysteresis_db >= 0.0,
        line(&["policy.hysteresis_db"]),
        format!("hysteresis must be >= 0 dB, got {}", b.hysteresis_db),
    )?;
    check(
        b.snr_threshold_db.is_finite() && b.density_inr_db.is_finite(),
        line(&["policy.snr_threshold_db", "policy.density_inr_threshold_db"]),
        "policy thresholds must be finite",
    )?;
    if let Some(demand) = b.demand_bps {
        check(
            demand > 0.0,
            line(&["policy.demand_bps"]),
            format!("demand must be positive, got {demand}"),
        )?;
    }
    check(
        b.region_radius_m > 0.0,
        line(&["interference.region_radius_m"]),
        format!(
            "interferer region radius must be positive, got {}",
            b.region_radius_m
        ),
    )?;
    check(
        b.trials >= 1,
        line(&["sim.trials"]),
        "sim.trials must be at least 1",
    )?;
    check(
        !b.sweep_distances_m.is_empty()
            && strictly_increasing(&b.sweep_distances_m)
            && b.sweep_distances_m
                .iter()
                .all(|&d| d > 0.0 && d.is_finite()),
        line(&["sweep.distance_values_m"]),
        "sweep distances must be a nonempty, strictly increasing list of positive values",
    )?;
    check(
        !b.sweep_densities.is_empty() && strictly_increasing(&b.sweep_densities),
        line(&["sweep.density_values"]),
        "sweep densities must be a nonempty, strictly increasing list",
    )?;
    check(
        b.density_fixed_distance_m > 0.0 && b.density_fixed_distance_m.is_finite(),
        line(&["sweep.fixed_mean_distance_m"]),
        format!(
            "fixed mean distance must be positive, got {}",
            b.density_fixed_distance_m
        ),
    )?;
    check(
        b.v_bandwidth_hz > 0.0,
        line(&["radio.v.bandwidth_ghz"]),
        format!("V bandwidth must be positive, got {} Hz", b.v_bandwidth_hz),
    )?;
    check(
        b.e_bandwidth_hz > 0.0,
        line(&["radio.e.bandwidth_ghz"]),
        format!("E bandwidth must be positive, got {} Hz", b.e_bandwidth_hz),
    )?;
    for (ranges, key) in [
        (&b.v_ranges_ghz, "regulatory.v.ranges_ghz"),
        (&b.e_ranges_ghz, "regulatory.e.ranges_ghz"),
    ] {
        check(
            !ranges.is_empty() && ranges.iter().all(|&(lo, hi)| lo < hi),
            line(&[key]),
            format!("{key}: ranges must be nonempty 'low:high' pairs with low < high"),
        )?;
    }

    // Constructed components, with domain errors mapped back to their lines.
    let antenna_template = {
        let l = line(&[
            "antenna.mainlobe_dbi",
            "antenna.sidelobe_dbi",
            "antenna.beamwidth_deg",
        ]);
        at_line(
            SectorAntenna::new(b.mainlobe_dbi, b.sidelobe_dbi, b.beamwidth_deg),
            l,
        )?;
        SectorAntenna::new(b.mainlobe_dbi, b.sidelobe_dbi, b.beamwidth_deg)?
    };
    let handover = {
        let l = line(&["handover.sync_delay_s", "handover.feedback_factor"]);
        at_line(HandoverCostModel::new(b.sync_delay_s, b.feedback_factor), l)?;
        HandoverCostModel::new(b.sync_delay_s, b.feedback_factor)?
    };
    let attenuation = {
        let l = line(&["attenuation.anchors_ghz_dbkm"]);
        at_line(AttenuationTable::new(b.anchors.clone()), l)?;
        AttenuationTable::new(b.anchors.clone())?
    };
    let radio_v = {
        let l = line(&["radio.v.carrier_ghz"]);
        at_line(
            regulatory::radio_config(
                Band::V,
                b.v_carrier_ghz,
                b.v_bandwidth_hz,
                b.v_tx_power_dbm,
                b.mainlobe_dbi,
            ),
            l,
        )?;
        regulatory::radio_config(
            Band::V,
            b.v_carrier_ghz,
            b.v_bandwidth_hz,
            b.v_tx_power_dbm,
            b.mainlobe_dbi,
        )?
    };
    let radio_e = {
        let l = line(&["radio.e.carrier_ghz"]);
        at_line(
            regulatory::radio_config(
                Band::E,
                b.e_carrier_ghz,
                b.e_bandwidth_hz,
                b.e_tx_power_dbm,
                b.mainlobe_dbi,
            ),
            l,
        )?;
        regulatory::radio_config(
            Band::E,
            b.e_carrier_ghz,
            b.e_bandwidth_hz,
            b.e_tx_power_dbm,
            b.mainlobe_dbi,
        )?
    };

    let mut rules = default_rules();
    for rule in &mut rules {
        match rule.band {
            Band::V => {
                rule.max_tx_power_dbm = b.v_max_power_dbm;
                rule.freq_ranges_ghz = b.v_ranges_ghz.clone();
            }
            Band::E => {
                rule.max_tx_power_dbm = b.e_max_power_dbm;
                rule.min_antenna_gain_dbi = b.e_min_gain_dbi;
                rule.freq_ranges_ghz = b.e_ranges_ghz.clone();
            }
        }
    }

    let mut validation = ValidationReport::default();
    validation.merge(regulatory::validate_radio_config(
        &radio_v,
        &rules,
        b.enforce_min_gain,
    ));
    validation.merge(regulatory::validate_radio_config(
        &radio_e,
        &rules,
        b.enforce_min_gain,
    ));
    if !validation.is_compliant() {
        return Err(Error::Validation(validation));
    }

    Ok(Scenario {
        user_count: b.user_count,
        blockage_prob: b.blockage_prob,
        shadow_loss_db: b.shadow_loss_db,
        macro_pos: b.macro_pos,
        femto_enabled: b.femto_enabled,
        femto_pos: b.femto_pos,
        extra_bs: b.extra_bs,
        radio_v,
        radio_e,
        antenna_template,
        noise_figure_db: b.noise_figure_db,
        attenuation,
        thresholds: Thresholds {
            snr_low_high_db: b.snr_threshold_db,
            density_inr_db: b.density_inr_db,
            hysteresis_db: b.hysteresis_db,
            demand_bps: b.demand_bps,
        },
        handover,
        architecture: b.architecture,
        interference_enabled: b.interference_enabled,
        interferer_count: b.interferer_count,
        region_center: b.region_center,
        region_radius_m: b.region_radius_m,
        rules,
        enforce_min_gain: b.enforce_min_gain,
        validation,
        trials: b.trials,
        master_seed: b.master_seed,
        sweep_distances_m: b.sweep_distances_m,
        sweep_densities: b.sweep_densities,
        density_fixed_distance_m: b.density_fixed_distance_m,
    })
}

/// Parses scenario text. Every diagnostic carries the 1-based line number of
/// the offending key (0 when a built-in default is at fault, which only
/// happens through cross-key constraints).
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut builder = Builder::new();
    for (index, raw_line) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(parse_err(
                line,
                format!("expected 'key = value', got '{content}'"),
            ));
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(parse_err(line, "missing key before '='"));
        }
        if let Some(first) = builder.seen.get(key) {
            return Err(parse_err(
                line,
                format!("duplicate key '{key}' (first set at line {first})"),
            ));
        }
        apply_key(&mut builder, key, value, line)?;
        builder.seen.insert(key.to_string(), line);
    }
    assemble(builder)
}

/// Reads and parses a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn empty_file_is_the_reference_scenario() {
        let s = parse_scenario("").unwrap();
        assert_eq!(s, Scenario::defaults());
        assert_eq!(s.user_count, 10);
        assert_eq!(s.trials, 500);
        assert_eq!(s.master_seed, 1);
        assert!(s.femto_enabled);
        assert_eq!(s.base_stations().len(), 2);
        assert_eq!(s.radio_v.tx_power_dbm, 27.0);
        assert_eq!(s.radio_e.tx_power_dbm, 35.0);
        assert_eq!(s.radio_v.bandwidth_hz, 5e9);
        assert_eq!(s.radio_e.carrier.ghz(), 73.5);
        assert_eq!(s.architecture, Architecture::DualChain);
        assert!(s.validation.is_compliant());
    }

    #[test]
    fn default_sweep_is_15_log_points_from_10_to_500() {
        let d = default_distance_sweep();
        assert_eq!(d.len(), 15);
        assert!(approx_eq(d[0], 10.0, 1e-9));
        assert!(approx_eq(d[14], 500.0, 1e-9));
        assert!(
            d.windows(2).all(|w| w[0] < w[1]),
            "must be strictly increasing"
        );
        // Log spacing: constant ratio between consecutive points.
        let r0 = d[1] / d[0];
        for w in d.windows(2) {
            assert!(approx_eq(w[1] / w[0], r0, 1e-9), "ratio drift at {w:?}");
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "\n# full-line comment\n  users.count = 4   # inline comment\n\n";
        let s = parse_scenario(text).unwrap();
        assert_eq!(s.user_count, 4);
    }

    #[test]
    fn unknown_key_is_an_error_with_its_line() {
        let err = parse_scenario("users.count = 4\nusers.cuont = 5\n").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("users.cuont"), "message: {message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_key_is_an_error() {
        let err = parse_scenario("sim.trials = 10\n\nsim.trials = 20\n").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("duplicate"), "message: {message}");
                assert!(message.contains("line 1"), "message: {message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_equals_is_an_error() {
        let err = parse_scenario("users.count 4\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "got {err:?}");
    }

    #[test]
    fn malformed_number_is_an_error() {
        let err = parse_scenario("users.blockage_prob = often\n").unwrap_err();
        match err {
            Error::Parse { line: 1, message } => {
                assert!(message.contains("often"), "message: {message}")
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn overpowered_v_radio_fails_validation() {
        let err = parse_scenario("radio.v.tx_power_dbm = 30\n").unwrap_err();
        match &err {
            Error::Validation(report) => {
                assert!(!report.is_compliant());
                assert!(
                    report.violations.iter().any(|v| v.rule == "max-tx-power"),
                    "report: {report}"
                );
            }
            other => panic!("expected validation error, got {other:?}"),
        }
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn reference_scenario_carries_the_min_gain_waiver() {
        let s = Scenario::defaults();
        assert!(s.validation.is_compliant());
        assert_eq!(s.validation.waivers.len(), 1, "E-band gain waiver expected");
        assert!(s.validation.waivers[0].contains("43"));
    }

    #[test]
    fn enforcing_min_gain_rejects_the_reference_antenna() {
        let err = parse_scenario("regulatory.enforce_min_gain = true\n").unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "got {err:?}");
    }

    #[test]
    fn compliant_gain_passes_enforcement() {
        let text = "regulatory.enforce_min_gain = true\nantenna.mainlobe_dbi = 43\n";
        let s = parse_scenario(text).unwrap();
        assert_eq!(
            s.radio_e.antenna_gain_dbi, 43.0,
            "radio gain follows the antenna"
        );
        assert!(s.validation.waivers.is_empty());
    }

    #[test]
    fn regulatory_overrides_change_the_rules() {
        let text = "radio.v.tx_power_dbm = 30\nregulatory.v.max_tx_power_dbm = 31\n";
        let s = parse_scenario(text).unwrap();
        assert_eq!(s.radio_v.tx_power_dbm, 30.0);

        let text = "regulatory.e.min_antenna_gain_dbi = none\n";
        let s = parse_scenario(text).unwrap();
        assert!(s.validation.waivers.is_empty(), "no minimum, no waiver");

        let text = "radio.v.carrier_ghz = 62\nradio.v.bandwidth_ghz = 1\n\
                    regulatory.v.ranges_ghz = 57:60\n";
        let err = parse_scenario(text).unwrap_err();
        assert!(
            matches!(err, Error::Validation(_)),
            "carrier outside override range"
        );
    }

    #[test]
    fn carrier_gap_fails_validation() {
        let err = parse_scenario("radio.e.carrier_ghz = 78.5\n").unwrap_err();
        assert!(
            matches!(err, Error::Validation(_)),
            "78.5 GHz is between E segments"
        );
    }

    #[test]
    fn carrier_outside_model_range_is_a_parse_error() {
        let err = parse_scenario("radio.v.carrier_ghz = 50\n").unwrap_err();
        assert!(
            matches!(err, Error::Parse { line: 1, .. }),
            "50 GHz is outside the modeled range: {err:?}"
        );
    }

    #[test]
    fn structural_invariants_are_enforced() {
        for (text, needle) in [
            ("users.count = 0\n", "users.count"),
            ("users.blockage_prob = 1.5\n", "[0, 1]"),
            ("users.shadow_loss_db = -1\n", ">= 0"),
            ("sim.trials = 0\n", "sim.trials"),
            (
                "sweep.distance_values_m = 10, 10, 20\n",
                "strictly increasing",
            ),
            ("sweep.distance_values_m = 10, 5\n", "strictly increasing"),
            ("sweep.density_values = 4, 2\n", "strictly increasing"),
            ("sweep.fixed_mean_distance_m = 0\n", "positive"),
            ("interference.region_radius_m = -3\n", "positive"),
            ("policy.hysteresis_db = -2\n", ">= 0"),
            ("radio.v.bandwidth_ghz = 0\n", "positive"),
            ("antenna.beamwidth_deg = 0\n", "beamwidth"),
            ("handover.feedback_factor = 0\n", "factor"),
            ("regulatory.v.ranges_ghz = 64:57\n", "low < high"),
        ] {
            let err = parse_scenario(text).unwrap_err();
            match err {
                Error::Parse { line: 1, message } => assert!(
                    message.contains(needle),
                    "for '{}', message '{message}' should mention '{needle}'",
                    text.trim()
                ),
                other => panic!("for '{}': expected parse error, got {other:?}", text.trim()),
            }
        }
    }

    #[test]
    fn lists_and_points_parse() {
        let text = "topology.extra_bs_pos_m = 200,0; 0,200\n\
                    sweep.distance_values_m = 10, 25, 60, 250, 500\n\
                    sweep.density_values = 0, 2, 8\n\
                    attenuation.anchors_ghz_dbkm = 57:8, 60:15, 95:0.6\n\
                    policy.demand_bps = none\n\
                    transceiver.architecture = single\n";
        let s = parse_scenario(text).unwrap();
        assert_eq!(
            s.extra_bs,
            vec![Point::new(200.0, 0.0), Point::new(0.0, 200.0)]
        );
        assert_eq!(s.base_stations().len(), 4, "macro + femto + 2 extras");
        assert_eq!(s.sweep_distances_m, vec![10.0, 25.0, 60.0, 250.0, 500.0]);
        assert_eq!(s.sweep_densities, vec![0, 2, 8]);
        assert_eq!(s.attenuation.anchors().len(), 3);
        assert_eq!(s.thresholds.demand_bps, None);
        assert_eq!(s.architecture, Architecture::SingleChain);
    }

    #[test]
    fn base_station_roles_and_ids_are_ordered() {
        let s = Scenario::defaults();
        let bs = s.base_stations();
        assert_eq!(bs[0].id, 0);
        assert_eq!(bs[0].role, NodeRole::MacroBs);
        assert_eq!(bs[1].id, 1);
        assert_eq!(bs[1].role, NodeRole::FemtoBs);
        assert_eq!(bs[1].position, Point::new(120.0, 0.0));

        let s = parse_scenario("topology.femto_enabled = false\n").unwrap();
        assert_eq!(s.base_stations().len(), 1);
    }
}
