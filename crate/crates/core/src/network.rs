//! Topology, sector antennas, interference aggregation, and per-link SINR.
//!
//! Base stations and users live on a 2-D plane. Every link is served
//! mainlobe-to-mainlobe (the BS steers its beam per user slot), while
//! interference couples through whatever sector gains the geometry gives:
//! the interferer's gain toward the victim times the victim's gain toward
//! the interferer, which is sidelobe-dominated unless beams happen to align.
//! All interference is summed in linear milliwatts.

use crate::error::{Error, Result};
use crate::propagation::{self, AttenuationTable, FrequencyHz, LinkBudget, LinkGeometry};
use crate::regulatory::{Band, BandSet, RadioConfig};
use crate::transceiver::Architecture;
use crate::units::{dbm_to_milliwatts, milliwatts_to_dbm};
use rand::Rng;

// ---------------------------------------------------------------------------
// Geometry and nodes
// ---------------------------------------------------------------------------

/// A point on the simulation plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x_m: f64,
    pub y_m: f64,
}

impl Point {
    pub fn new(x_m: f64, y_m: f64) -> Point {
        Point { x_m, y_m }
    }

    pub fn distance_to(&self, other: Point) -> f64 {
        (self.x_m - other.x_m).hypot(self.y_m - other.y_m)
    }

    /// Bearing from `self` to `other` in degrees, in [0, 360).
    pub fn bearing_deg_to(&self, other: Point) -> f64 {
        let deg = (other.y_m - self.y_m)
            .atan2(other.x_m - self.x_m)
            .to_degrees();
        deg.rem_euclid(360.0)
    }
}

/// Role of a node in the two-tier layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    MacroBs,
    PicoBs,
    FemtoBs,
    User,
}

impl NodeRole {
    pub fn is_base_station(self) -> bool {
        !matches!(self, NodeRole::User)
    }
}

/// A network node. Base stations carry at least one radio; users carry none
/// (their radio parameters come from the serving BS's configuration).
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: usize,
    pub role: NodeRole,
    pub position: Point,
    pub radio_v: Option<RadioConfig>,
    pub radio_e: Option<RadioConfig>,
    pub architecture: Architecture,
}

impl Node {
    pub fn base_station(
        id: usize,
        role: NodeRole,
        position: Point,
        radio_v: Option<RadioConfig>,
        radio_e: Option<RadioConfig>,
        architecture: Architecture,
    ) -> Result<Node> {
        if !role.is_base_station() {
            return Err(Error::Domain(format!(
                "node {id}: role {role:?} is not a base-station role"
            )));
        }
        if radio_v.is_none() && radio_e.is_none() {
            return Err(Error::Domain(format!(
                "base station {id} must carry at least one radio"
            )));
        }
        Ok(Node {
            id,
            role,
            position,
            radio_v,
            radio_e,
            architecture,
        })
    }

    pub fn radio(&self, band: Band) -> Option<&RadioConfig> {
        match band {
            Band::V => self.radio_v.as_ref(),
            Band::E => self.radio_e.as_ref(),
        }
    }
}

// ---------------------------------------------------------------------------
// Sector antenna
// ---------------------------------------------------------------------------

/// Two-level flat-top sector pattern: mainlobe gain inside the beamwidth,
/// sidelobe gain everywhere else. Angle arithmetic wraps modulo 360.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorAntenna {
    mainlobe_gain_dbi: f64,
    sidelobe_gain_dbi: f64,
    beamwidth_deg: f64,
    boresight_deg: f64,
}

impl SectorAntenna {
    pub fn new(
        mainlobe_gain_dbi: f64,
        sidelobe_gain_dbi: f64,
        beamwidth_deg: f64,
    ) -> Result<SectorAntenna> {
        // Written so that a NaN gain also fails the check.
        let mainlobe_exceeds_sidelobe = mainlobe_gain_dbi > sidelobe_gain_dbi;
        if !mainlobe_exceeds_sidelobe {
            return Err(Error::Domain(format!(
                "mainlobe gain ({mainlobe_gain_dbi} dBi) must exceed sidelobe \
                 gain ({sidelobe_gain_dbi} dBi)"
            )));
        }
        if !(beamwidth_deg > 0.0 && beamwidth_deg <= 360.0) {
            return Err(Error::Domain(format!(
                "beamwidth must be in (0, 360] degrees, got {beamwidth_deg}"
            )));
        }
        Ok(SectorAntenna {
            mainlobe_gain_dbi,
            sidelobe_gain_dbi,
            beamwidth_deg,
            boresight_deg: 0.0,
        })
    }

    pub fn with_boresight(mut self, boresight_deg: f64) -> SectorAntenna {
        self.boresight_deg = boresight_deg.rem_euclid(360.0);
        self
    }

    pub fn mainlobe_gain_dbi(&self) -> f64 {
        self.mainlobe_gain_dbi
    }

    pub fn sidelobe_gain_dbi(&self) -> f64 {
        self.sidelobe_gain_dbi
    }

    pub fn boresight_deg(&self) -> f64 {
        self.boresight_deg
    }

    /// Gain toward an absolute bearing, in dBi.
    pub fn gain_toward_deg(&self, angle_deg: f64) -> f64 {
        let mut delta = (angle_deg - self.boresight_deg).rem_euclid(360.0);
        if delta > 180.0 {
            delta = 360.0 - delta;
        }
        if delta <= self.beamwidth_deg / 2.0 {
            self.mainlobe_gain_dbi
        } else {
            self.sidelobe_gain_dbi
        }
    }
}

// ---------------------------------------------------------------------------
// User placement
// ---------------------------------------------------------------------------

/// A user dropped around its designated base station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacedUser {
    pub position: Point,
    /// Index into the BS list the user was placed around. Association may
    /// still pick a different serving BS afterwards.
    pub designated_bs: usize,
}

/// Drops `user_count` users round-robin over the base stations, each at a
/// distance drawn uniformly from [0.5, 1.5] x `mean_distance_m` and a uniform
/// angle. Draw order is fixed (distance then angle, per user in index order)
/// so placement is a pure function of the RNG stream.
pub fn place_users<R: Rng>(
    bs_positions: &[Point],
    user_count: usize,
    mean_distance_m: f64,
    rng: &mut R,
) -> Result<Vec<PlacedUser>> {
    if bs_positions.is_empty() {
        return Err(Error::Domain(
            "cannot place users with no base stations".into(),
        ));
    }
    if user_count == 0 {
        return Err(Error::Domain("user count must be at least 1".into()));
    }
    let distance_valid = mean_distance_m.is_finite() && mean_distance_m > 0.0;
    if !distance_valid {
        return Err(Error::Domain(format!(
            "mean user distance must be positive and finite, got {mean_distance_m}"
        )));
    }
    let mut users = Vec::with_capacity(user_count);
    for i in 0..user_count {
        let bs = i % bs_positions.len();
        let distance = rng.random_range(0.5 * mean_distance_m..1.5 * mean_distance_m);
        let angle = rng.random_range(0.0..std::f64::consts::TAU);
        let center = bs_positions[bs];
        users.push(PlacedUser {
            position: Point::new(
                center.x_m + distance * angle.cos(),
                center.y_m + distance * angle.sin(),
            ),
            designated_bs: bs,
        });
    }
    Ok(users)
}

// ---------------------------------------------------------------------------
// Interference
// ---------------------------------------------------------------------------

/// One co-channel transmitter as seen by a victim receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interferer {
    pub position: Point,
    pub tx_power_dbm: f64,
    pub antenna: SectorAntenna,
}

/// The receiver being interfered with: its position and where its beam points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VictimReceiver {
    pub position: Point,
    pub antenna: SectorAntenna,
}

/// Total co-channel interference at the victim, in dBm.
///
/// Each transmitter couples through its own sector gain toward the victim and
/// the victim's sector gain back toward it; the path itself is unshadowed
/// free space plus atmospheric absorption. Powers add in linear milliwatts.
/// An empty transmitter list yields negative infinity (no interference).
pub fn interference_power_dbm(
    victim: &VictimReceiver,
    transmitters: &[Interferer],
    carrier: FrequencyHz,
    table: &AttenuationTable,
) -> Result<f64> {
    let mut total_mw = 0.0;
    for tx in transmitters {
        let toward_victim = tx.position.bearing_deg_to(victim.position);
        let toward_tx = victim.position.bearing_deg_to(tx.position);
        let budget = LinkBudget {
            tx_power_dbm: tx.tx_power_dbm,
            tx_gain_dbi: tx.antenna.gain_toward_deg(toward_victim),
            rx_gain_dbi: victim.antenna.gain_toward_deg(toward_tx),
            freq: carrier,
            geometry: LinkGeometry::new(tx.position.distance_to(victim.position), false, 0.0)?,
        };
        total_mw += dbm_to_milliwatts(propagation::received_power_dbm(&budget, table)?);
    }
    Ok(milliwatts_to_dbm(total_mw))
}

// ---------------------------------------------------------------------------
// Per-link state
// ---------------------------------------------------------------------------

/// Signal quality of one band on one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandLinkQuality {
    pub snr_db: f64,
    pub interference_dbm: f64,
    pub sinr_db: f64,
}

/// Everything the simulator knows about one BS-to-user link after a trial.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkState {
    pub serving: usize,
    pub user: usize,
    pub band_assignment: BandSet,
    pub v: Option<BandLinkQuality>,
    pub e: Option<BandLinkQuality>,
    pub throughput_bps: f64,
}

impl LinkState {
    pub fn quality(&self, band: Band) -> Option<&BandLinkQuality> {
        match band {
            Band::V => self.v.as_ref(),
            Band::E => self.e.as_ref(),
        }
    }
}

/// Per-band inputs to a link-state computation: the serving radio, its
/// transmit-side mainlobe gain, the co-channel transmitters, and the fraction
/// of the band this user gets (1 = sole occupant, 1/k under equal sharing).
#[derive(Debug, Clone, Copy)]
pub struct BandEnv<'a> {
    pub radio: &'a RadioConfig,
    pub tx_gain_dbi: f64,
    pub interferers: &'a [Interferer],
    pub bandwidth_share: f64,
}

/// The serving-path geometry and receiver parameters for one link.
#[derive(Debug, Clone, Copy)]
pub struct ServingLink {
    pub serving_id: usize,
    pub user_id: usize,
    pub serving_position: Point,
    pub user_position: Point,
    pub shadowed: bool,
    pub shadow_loss_db: f64,
    pub noise_figure_db: f64,
    pub architecture: Architecture,
}

/// Computes per-band SNR/SINR and the throughput of the assigned bands.
///
/// The serving path runs mainlobe-to-mainlobe; blockage, when present,
/// shadows the serving path of both bands but never the interference paths.
/// SNR and SINR use the full band's noise power; the bandwidth share scales
/// only the throughput (equal time sharing gives each user the whole band
/// for its slice of time). Quality is reported for every band with an
/// environment, assigned or not, so callers can measure before allocating.
pub fn compute_link_state(
    link: &ServingLink,
    rx_antenna: &SectorAntenna,
    v_env: Option<&BandEnv>,
    e_env: Option<&BandEnv>,
    assignment: BandSet,
    table: &AttenuationTable,
) -> Result<LinkState> {
    if link.architecture == Architecture::SingleChain && assignment.len() > 1 {
        return Err(Error::Capability(format!(
            "single-chain serving node {} cannot transmit {assignment} at once",
            link.serving_id
        )));
    }

    let mut state = LinkState {
        serving: link.serving_id,
        user: link.user_id,
        band_assignment: assignment,
        v: None,
        e: None,
        throughput_bps: 0.0,
    };

    for (band, env) in [(Band::V, v_env), (Band::E, e_env)] {
        let Some(env) = env else {
            if assignment.contains(band) {
                return Err(Error::Domain(format!(
                    "band {band} is assigned but has no radio environment"
                )));
            }
            continue;
        };
        if !(env.bandwidth_share > 0.0 && env.bandwidth_share <= 1.0) {
            return Err(Error::Domain(format!(
                "bandwidth share must be in (0, 1], got {}",
                env.bandwidth_share
            )));
        }

        let distance_m = link.serving_position.distance_to(link.user_position);
        let toward_serving = link.user_position.bearing_deg_to(link.serving_position);
        let budget = LinkBudget {
            tx_power_dbm: env.radio.tx_power_dbm,
            tx_gain_dbi: env.tx_gain_dbi,
            rx_gain_dbi: rx_antenna.mainlobe_gain_dbi(),
            freq: env.radio.carrier,
            geometry: LinkGeometry::new(distance_m, link.shadowed, link.shadow_loss_db)?,
        };
        let rx_dbm = propagation::received_power_dbm(&budget, table)?;
        let noise_dbm = propagation::noise_power_dbm(env.radio.bandwidth_hz, link.noise_figure_db)?;
        let snr_db = rx_dbm - noise_dbm;

        let victim = VictimReceiver {
            position: link.user_position,
            antenna: rx_antenna.with_boresight(toward_serving),
        };
        let interference_dbm =
            interference_power_dbm(&victim, env.interferers, env.radio.carrier, table)?;
        // With no interference the SINR is the SNR bit for bit; going through
        // the linear domain would perturb the low bits for nothing.
        let sinr_db = if interference_dbm == f64::NEG_INFINITY {
            snr_db
        } else {
            rx_dbm
                - milliwatts_to_dbm(
                    dbm_to_milliwatts(noise_dbm) + dbm_to_milliwatts(interference_dbm),
                )
        };

        let quality = BandLinkQuality {
            snr_db,
            interference_dbm,
            sinr_db,
        };
        match band {
            Band::V => state.v = Some(quality),
            Band::E => state.e = Some(quality),
        }
        if assignment.contains(band) {
            state.throughput_bps += propagation::shannon_throughput_bps(
                sinr_db,
                env.bandwidth_share * env.radio.bandwidth_hz,
            )?;
        }
    }

    Ok(state)
}
