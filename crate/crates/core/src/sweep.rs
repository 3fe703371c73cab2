//! Monte-Carlo driver: deterministic per-trial seeding, the trial itself
//! (placement, association, interference draw, classification, handover,
//! sharing), sweep aggregation, and CSV emission.
//!
//! Seeding contract: the RNG for a trial is ChaCha8 seeded with a 64-bit
//! value derived by chaining the SplitMix64 finalizer:
//!
//!   s0 = mix(master_seed)
//!   s1 = mix(s0 ^ point_index)
//!   s2 = mix(s1 ^ mode_tag)        mode_tag: v = 0, e = 1, hybrid = 2
//!   seed = mix(s2 ^ trial_index)
//!
//! where mix(x) = SplitMix64 finalizer of (x + 0x9E3779B97F4A7C15). The
//! derivation is pure, so any (scenario, point, mode, trial) tuple can be
//! recomputed in isolation, in any order, on any number of threads, and the
//! aggregated output bytes never change.

use crate::error::{Error, Result};
use crate::network::{
    compute_link_state, place_users, BandEnv, Interferer, LinkState, Node, PlacedUser, Point,
    ServingLink,
};
use crate::policy::{classify_link, evaluate_triggers, PredictedRates};
use crate::propagation::{noise_power_dbm, received_power_dbm, shannon_throughput_bps};
use crate::propagation::{LinkBudget, LinkGeometry};
use crate::regulatory::{Band, BandSet};
use crate::scenario::Scenario;
use crate::transceiver::HandoverState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::io::Write as _;
use std::path::Path;

// ---------------------------------------------------------------------------
// Sweep configuration
// ---------------------------------------------------------------------------

/// Which scenario quantity the sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    MeanDistanceM,
    InterfererCount,
}

/// Which band policy the curves are generated under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    VOnly,
    EOnly,
    Hybrid,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::VOnly, Mode::EOnly, Mode::Hybrid];

    /// Seed-derivation tag; part of the reproducibility contract.
    pub fn seed_tag(self) -> u64 {
        match self {
            Mode::VOnly => 0,
            Mode::EOnly => 1,
            Mode::Hybrid => 2,
        }
    }

    /// Column value in the CSV output.
    pub fn csv_name(self) -> &'static str {
        match self {
            Mode::VOnly => "v",
            Mode::EOnly => "e",
            Mode::Hybrid => "hybrid",
        }
    }
}

/// One sweep: a variable, its ordered values, and the mode to run.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub mode: Mode,
}

impl SweepConfig {
    pub fn distance(scenario: &Scenario, mode: Mode) -> SweepConfig {
        SweepConfig {
            variable: SweepVariable::MeanDistanceM,
            values: scenario.sweep_distances_m.clone(),
            mode,
        }
    }

    pub fn density(scenario: &Scenario, mode: Mode) -> SweepConfig {
        SweepConfig {
            variable: SweepVariable::InterfererCount,
            values: scenario.sweep_densities.iter().map(|&c| c as f64).collect(),
            mode,
        }
    }
}

// ---------------------------------------------------------------------------
// Seeding
// ---------------------------------------------------------------------------

/// SplitMix64 finalizer step.
fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable 64-bit trial seed; see the module docs for the chain definition.
pub fn derive_seed(master_seed: u64, point_index: u64, mode_tag: u64, trial_index: u64) -> u64 {
    let s0 = splitmix64(master_seed);
    let s1 = splitmix64(s0 ^ point_index);
    let s2 = splitmix64(s1 ^ mode_tag);
    splitmix64(s2 ^ trial_index)
}

// ---------------------------------------------------------------------------
// Trial
// ---------------------------------------------------------------------------

/// One user's allocation outcome inside a trial, for the audit log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionRecord {
    pub user: usize,
    pub bands: BandSet,
    /// Allocation reason token, or "forced" under VOnly/EOnly.
    pub reason: &'static str,
}

/// Everything a single trial produces.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub per_user_throughput_bps: Vec<f64>,
    /// Total handover events across all users (band acquisitions included).
    pub handovers: usize,
    pub decisions: Vec<DecisionRecord>,
    pub links: Vec<LinkState>,
}

/// Association metric: unshadowed received power from `bs` at `position`,
/// mainlobe to mainlobe, preferring the E radio (the longer-range tier).
fn association_rx_dbm(scenario: &Scenario, bs: &Node, position: Point) -> Result<f64> {
    let radio = bs
        .radio(Band::E)
        .or_else(|| bs.radio(Band::V))
        .expect("base stations carry at least one radio");
    let distance_m = bs.position.distance_to(position);
    if distance_m <= 0.0 {
        // A user exactly on top of a BS: the strongest candidate by fiat.
        return Ok(f64::INFINITY);
    }
    let budget = LinkBudget {
        tx_power_dbm: radio.tx_power_dbm,
        tx_gain_dbi: scenario.antenna_template.mainlobe_gain_dbi(),
        rx_gain_dbi: scenario.antenna_template.mainlobe_gain_dbi(),
        freq: radio.carrier,
        geometry: LinkGeometry::new(distance_m, false, 0.0)?,
    };
    received_power_dbm(&budget, &scenario.attenuation)
}

/// Co-channel transmitters seen by a user served by `serving_id` on `band`:
/// every other BS (radiating along its drawn boresight) plus every extra
/// interferer. Empty when interference is disabled.
fn interferers_for(
    scenario: &Scenario,
    base_stations: &[Node],
    bs_boresights: &[f64],
    extras: &[(Point, f64)],
    serving_id: usize,
    band: Band,
) -> Vec<Interferer> {
    if !scenario.interference_enabled {
        return Vec::new();
    }
    let mut list = Vec::with_capacity(base_stations.len() - 1 + extras.len());
    for bs in base_stations {
        if bs.id == serving_id {
            continue;
        }
        let Some(radio) = bs.radio(band) else {
            continue;
        };
        list.push(Interferer {
            position: bs.position,
            tx_power_dbm: radio.tx_power_dbm,
            antenna: scenario
                .antenna_template
                .with_boresight(bs_boresights[bs.id]),
        });
    }
    let radio = match band {
        Band::V => &scenario.radio_v,
        Band::E => &scenario.radio_e,
    };
    for &(position, boresight) in extras {
        list.push(Interferer {
            position,
            tx_power_dbm: radio.tx_power_dbm,
            antenna: scenario.antenna_template.with_boresight(boresight),
        });
    }
    list
}

/// Runs one trial: placement, association, interference geometry, blockage,
/// measurement, allocation (or the forced band), the handover FSM to steady
/// state, equal bandwidth sharing, and the final per-link states.
///
/// Bit-identical for identical arguments; trials never share state.
pub fn run_trial(
    scenario: &Scenario,
    variable: SweepVariable,
    sweep_value: f64,
    point_index: usize,
    mode: Mode,
    trial_index: usize,
) -> Result<TrialResult> {
    let seed = derive_seed(
        scenario.master_seed,
        point_index as u64,
        mode.seed_tag(),
        trial_index as u64,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let (mean_distance_m, extra_count) = match variable {
        SweepVariable::MeanDistanceM => (sweep_value, scenario.interferer_count),
        SweepVariable::InterfererCount => (
            scenario.density_fixed_distance_m,
            sweep_value.round() as usize,
        ),
    };

    let base_stations = scenario.base_stations();
    let bs_positions: Vec<Point> = base_stations.iter().map(|b| b.position).collect();

    // Random draws happen in a fixed order: user placement, per-BS boresight,
    // extra interferers, then blockage. Nothing after this block touches rng.
    let mut users: Vec<PlacedUser> = place_users(
        &bs_positions,
        scenario.user_count,
        mean_distance_m,
        &mut rng,
    )?;

    let mut serving: Vec<usize> = Vec::with_capacity(users.len());
    for user in &users {
        let mut best = (0usize, f64::NEG_INFINITY);
        for bs in &base_stations {
            let rx = association_rx_dbm(scenario, bs, user.position)?;
            if rx > best.1 {
                best = (bs.id, rx);
            }
        }
        serving.push(best.0);
    }

    let bs_boresights: Vec<f64> = base_stations
        .iter()
        .map(|bs| {
            let own: Vec<usize> = (0..users.len()).filter(|&u| serving[u] == bs.id).collect();
            if own.is_empty() {
                rng.random_range(0.0..360.0)
            } else {
                let chosen = own[rng.random_range(0..own.len())];
                bs.position.bearing_deg_to(users[chosen].position)
            }
        })
        .collect();

    let extras: Vec<(Point, f64)> = (0..extra_count)
        .map(|_| {
            let radius = scenario.region_radius_m * rng.random::<f64>().sqrt();
            let angle = rng.random_range(0.0..std::f64::consts::TAU);
            let position = Point::new(
                scenario.region_center.x_m + radius * angle.cos(),
                scenario.region_center.y_m + radius * angle.sin(),
            );
            (position, rng.random_range(0.0..360.0))
        })
        .collect();

    let shadowed: Vec<bool> = (0..users.len())
        .map(|_| rng.random_bool(scenario.blockage_prob))
        .collect();

    // A user landing exactly on its serving BS has no defined link geometry;
    // nudge it a millimeter (probability-zero event, kept deterministic).
    for (u, user) in users.iter_mut().enumerate() {
        if user.position == base_stations[serving[u]].position {
            user.position.x_m += 1e-3;
        }
    }

    let noise_v_dbm = noise_power_dbm(scenario.radio_v.bandwidth_hz, scenario.noise_figure_db)?;
    let mainlobe = scenario.antenna_template.mainlobe_gain_dbi();

    // Measurement pass: full-bandwidth per-band quality, nothing assigned yet.
    let mut interference_sets: Vec<(Vec<Interferer>, Vec<Interferer>)> = Vec::new();
    let mut measured: Vec<LinkState> = Vec::new();
    for (u, user) in users.iter().enumerate() {
        let v_int = interferers_for(
            scenario,
            &base_stations,
            &bs_boresights,
            &extras,
            serving[u],
            Band::V,
        );
        let e_int = interferers_for(
            scenario,
            &base_stations,
            &bs_boresights,
            &extras,
            serving[u],
            Band::E,
        );
        let link = ServingLink {
            serving_id: serving[u],
            user_id: base_stations.len() + u,
            serving_position: base_stations[serving[u]].position,
            user_position: user.position,
            shadowed: shadowed[u],
            shadow_loss_db: scenario.shadow_loss_db,
            noise_figure_db: scenario.noise_figure_db,
            architecture: scenario.architecture,
        };
        let v_env = BandEnv {
            radio: &scenario.radio_v,
            tx_gain_dbi: mainlobe,
            interferers: &v_int,
            bandwidth_share: 1.0,
        };
        let e_env = BandEnv {
            radio: &scenario.radio_e,
            tx_gain_dbi: mainlobe,
            interferers: &e_int,
            bandwidth_share: 1.0,
        };
        measured.push(compute_link_state(
            &link,
            &scenario.antenna_template,
            Some(&v_env),
            Some(&e_env),
            BandSet::EMPTY,
            &scenario.attenuation,
        )?);
        interference_sets.push((v_int, e_int));
    }

    // Allocation and handover: every user starts Idle and acquires its
    // target band set through the FSM (one handover event per change).
    let mut handovers = 0usize;
    let mut decisions: Vec<DecisionRecord> = Vec::with_capacity(users.len());
    let mut assignments: Vec<BandSet> = Vec::with_capacity(users.len());
    for (u, state) in measured.iter().enumerate() {
        let v = state.v.expect("measurement populates V quality");
        let e = state.e.expect("measurement populates E quality");
        let (target, reason) = match mode {
            Mode::VOnly => (BandSet::V_ONLY, "forced"),
            Mode::EOnly => (BandSet::E_ONLY, "forced"),
            Mode::Hybrid => {
                let class = classify_link(
                    v.snr_db,
                    e.snr_db,
                    v.interference_dbm - noise_v_dbm,
                    &scenario.thresholds,
                    None,
                );
                let predicted = PredictedRates {
                    v_bps: shannon_throughput_bps(v.sinr_db, scenario.radio_v.bandwidth_hz)?,
                    e_bps: shannon_throughput_bps(e.sinr_db, scenario.radio_e.bandwidth_hz)?,
                };
                let event = evaluate_triggers(
                    BandSet::EMPTY,
                    class,
                    scenario.architecture,
                    &scenario.thresholds,
                    predicted,
                )
                .expect("idle links always acquire a nonempty target");
                (event.target, event.reason.token())
            }
        };

        let mut fsm = HandoverState::Idle;
        let next = fsm.request_bands(scenario.architecture, target, &scenario.handover)?;
        if next != fsm {
            handovers += 1;
        }
        fsm = next;
        // One full sync delay always completes the switch (assisted switches
        // finish sooner). Afterwards the state must sit on the target.
        fsm = fsm.advance(scenario.handover.sync_delay_s())?;
        debug_assert_eq!(fsm.transmittable_bands(), target);

        decisions.push(DecisionRecord {
            user: u,
            bands: fsm.transmittable_bands(),
            reason,
        });
        assignments.push(fsm.transmittable_bands());
    }

    // Equal sharing: each (BS, band) splits its bandwidth across the users
    // assigned to it on that band.
    let mut load = vec![[0usize; 2]; base_stations.len()];
    for (u, bands) in assignments.iter().enumerate() {
        if bands.contains(Band::V) {
            load[serving[u]][0] += 1;
        }
        if bands.contains(Band::E) {
            load[serving[u]][1] += 1;
        }
    }
    let share = |count: usize| if count == 0 { 1.0 } else { 1.0 / count as f64 };

    let mut links: Vec<LinkState> = Vec::with_capacity(users.len());
    let mut per_user_throughput_bps: Vec<f64> = Vec::with_capacity(users.len());
    for (u, user) in users.iter().enumerate() {
        let (v_int, e_int) = &interference_sets[u];
        let link = ServingLink {
            serving_id: serving[u],
            user_id: base_stations.len() + u,
            serving_position: base_stations[serving[u]].position,
            user_position: user.position,
            shadowed: shadowed[u],
            shadow_loss_db: scenario.shadow_loss_db,
            noise_figure_db: scenario.noise_figure_db,
            architecture: scenario.architecture,
        };
        let v_env = BandEnv {
            radio: &scenario.radio_v,
            tx_gain_dbi: mainlobe,
            interferers: v_int,
            bandwidth_share: share(load[serving[u]][0]),
        };
        let e_env = BandEnv {
            radio: &scenario.radio_e,
            tx_gain_dbi: mainlobe,
            interferers: e_int,
            bandwidth_share: share(load[serving[u]][1]),
        };
        let state = compute_link_state(
            &link,
            &scenario.antenna_template,
            Some(&v_env),
            Some(&e_env),
            assignments[u],
            &scenario.attenuation,
        )?;
        per_user_throughput_bps.push(state.throughput_bps);
        links.push(state);
    }

    Ok(TrialResult {
        per_user_throughput_bps,
        handovers,
        decisions,
        links,
    })
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

/// One aggregated sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub sweep_value: f64,
    pub mean_throughput_bps: f64,
    pub ci95_bps: f64,
    pub mean_handovers: f64,
}

/// Mean per-user throughput vs the swept variable, one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateCurve {
    pub mode: Mode,
    pub points: Vec<CurvePoint>,
}

/// One user's allocation in one trial, for the decision audit log.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionRow {
    pub sweep_value: f64,
    pub mode: Mode,
    pub trial: usize,
    pub user: usize,
    pub bands: BandSet,
    pub reason: &'static str,
}

/// A finished sweep: the curve plus the per-trial decision log.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRun {
    pub curve: AggregateCurve,
    pub decisions: Vec<DecisionRow>,
}

/// Mean and 95% confidence half-width (normal approximation) of a sample.
/// A single observation has zero half-width by convention.
fn mean_and_ci95(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, 1.96 * (var / n as f64).sqrt())
}

/// Runs every (point, trial) of one sweep. Trials execute in parallel but
/// land in a fixed-order buffer, and the reduction runs sequentially over
/// trial indices, so the result is identical on any thread count.
pub fn run_sweep(scenario: &Scenario, config: &SweepConfig) -> Result<SweepRun> {
    if config.values.is_empty() {
        return Err(Error::Domain("sweep must have at least one value".into()));
    }
    if !config.values.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Domain(
            "sweep values must be strictly increasing".into(),
        ));
    }

    let mut points = Vec::with_capacity(config.values.len());
    let mut decisions = Vec::new();
    for (point_index, &sweep_value) in config.values.iter().enumerate() {
        let trials: Vec<TrialResult> = (0..scenario.trials)
            .into_par_iter()
            .map(|trial_index| {
                run_trial(
                    scenario,
                    config.variable,
                    sweep_value,
                    point_index,
                    config.mode,
                    trial_index,
                )
            })
            .collect::<Result<Vec<_>>>()?;

        let throughput: Vec<f64> = trials
            .iter()
            .map(|t| {
                t.per_user_throughput_bps.iter().sum::<f64>()
                    / t.per_user_throughput_bps.len() as f64
            })
            .collect();
        let handovers: Vec<f64> = trials
            .iter()
            .map(|t| t.handovers as f64 / t.per_user_throughput_bps.len() as f64)
            .collect();
        let (mean, ci95) = mean_and_ci95(&throughput);
        let (mean_handovers, _) = mean_and_ci95(&handovers);
        points.push(CurvePoint {
            sweep_value,
            mean_throughput_bps: mean,
            ci95_bps: ci95,
            mean_handovers,
        });

        for (trial_index, trial) in trials.iter().enumerate() {
            decisions.extend(trial.decisions.iter().map(|d| DecisionRow {
                sweep_value,
                mode: config.mode,
                trial: trial_index,
                user: d.user,
                bands: d.bands,
                reason: d.reason,
            }));
        }
    }

    Ok(SweepRun {
        curve: AggregateCurve {
            mode: config.mode,
            points,
        },
        decisions,
    })
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

/// Compact band-set token safe for unquoted CSV fields.
fn band_set_token(bands: BandSet) -> &'static str {
    match (bands.contains(Band::V), bands.contains(Band::E)) {
        (true, true) => "v+e",
        (true, false) => "v",
        (false, true) => "e",
        (false, false) => "none",
    }
}

/// All numeric fields use scientific notation with 6 significant digits,
/// e.g. 13.66 Gbps renders as `1.36600e10`.
fn fmt(x: f64) -> String {
    format!("{x:.5e}")
}

/// Renders the aggregate curves as CSV, rows sorted by (sweep value, mode).
pub fn render_csv(curves: &[AggregateCurve]) -> String {
    let mut rows: Vec<(f64, &'static str, String)> = curves
        .iter()
        .flat_map(|curve| {
            curve.points.iter().map(|p| {
                (
                    p.sweep_value,
                    curve.mode.csv_name(),
                    format!(
                        "{},{},{},{},{}",
                        fmt(p.sweep_value),
                        curve.mode.csv_name(),
                        fmt(p.mean_throughput_bps),
                        fmt(p.ci95_bps),
                        fmt(p.mean_handovers),
                    ),
                )
            })
        })
        .collect();
    rows.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("sweep values are finite")
            .then(a.1.cmp(b.1))
    });

    let mut out = String::from("sweep_value,mode,mean_throughput_bps,ci95_bps,mean_handovers\n");
    for (_, _, row) in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

/// Renders the per-trial decision log as CSV, in run order.
pub fn render_decisions_csv(decisions: &[DecisionRow]) -> String {
    let mut out = String::from("sweep_value,mode,trial,user,bands,reason\n");
    for d in decisions {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt(d.sweep_value),
            d.mode.csv_name(),
            d.trial,
            d.user,
            band_set_token(d.bands),
            d.reason,
        ));
    }
    out
}

/// Writes `content` to a file or standard output.
pub fn emit(content: &str, destination: Option<&Path>) -> Result<()> {
    match destination {
        Some(path) => std::fs::write(path, content).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(content.as_bytes())
                .and_then(|()| lock.flush())
                .map_err(|source| Error::Io {
                    path: "<stdout>".to_string(),
                    source,
                })
        }
    }
}
