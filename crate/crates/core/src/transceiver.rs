//! Transceiver architectures and the band-switching state machine.
//!
//! A single-chain radio can tune one band at a time and pays a full
//! resynchronization delay on every retune. A dual-chain radio can run both
//! bands at once, and when at least one requested band is already active the
//! standing link assists the switch, cutting the delay by a configurable
//! factor. While a switch is in flight no band is transmittable.

use crate::error::{Error, Result};
use crate::regulatory::BandSet;

// ---------------------------------------------------------------------------
// Architecture and cost model
// ---------------------------------------------------------------------------

/// RF chain layout of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Architecture {
    /// One chain: can hold V or E, never both at once.
    SingleChain,
    /// Two chains: can hold V and E simultaneously.
    DualChain,
}

/// Time cost of retuning, and the discount earned by switching while an
/// overlapping link is still up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HandoverCostModel {
    sync_delay_s: f64,
    feedback_assisted_factor: f64,
}

impl HandoverCostModel {
    /// `sync_delay_s` must be nonnegative; `feedback_assisted_factor` must be
    /// in (0, 1] (1 means assistance saves nothing).
    pub fn new(sync_delay_s: f64, feedback_assisted_factor: f64) -> Result<HandoverCostModel> {
        if !sync_delay_s.is_finite() || sync_delay_s < 0.0 {
            return Err(Error::Domain(format!(
                "sync delay must be finite and >= 0, got {sync_delay_s}"
            )));
        }
        if !feedback_assisted_factor.is_finite()
            || feedback_assisted_factor <= 0.0
            || feedback_assisted_factor > 1.0
        {
            return Err(Error::Domain(format!(
                "feedback assisted factor must be in (0, 1], got {feedback_assisted_factor}"
            )));
        }
        Ok(HandoverCostModel {
            sync_delay_s,
            feedback_assisted_factor,
        })
    }

    pub fn sync_delay_s(&self) -> f64 {
        self.sync_delay_s
    }

    pub fn feedback_assisted_factor(&self) -> f64 {
        self.feedback_assisted_factor
    }
}

impl Default for HandoverCostModel {
    /// 10 ms cold sync, halved when feedback-assisted.
    fn default() -> HandoverCostModel {
        HandoverCostModel {
            sync_delay_s: 0.01,
            feedback_assisted_factor: 0.5,
        }
    }
}

// ---------------------------------------------------------------------------
// State machine
// ---------------------------------------------------------------------------

/// Connection state of a transceiver.
///
/// Invariant: `Switching` always has a nonempty target and
/// `remaining_s > 0`; zero-delay transitions go straight to the active state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HandoverState {
    Idle,
    ActiveV,
    ActiveE,
    ActiveDual,
    Switching { target: BandSet, remaining_s: f64 },
}

/// The active state representing `bands`; `EMPTY` maps to `Idle`.
fn active_state_for(bands: BandSet) -> HandoverState {
    match (
        bands.contains(crate::regulatory::Band::V),
        bands.contains(crate::regulatory::Band::E),
    ) {
        (false, false) => HandoverState::Idle,
        (true, false) => HandoverState::ActiveV,
        (false, true) => HandoverState::ActiveE,
        (true, true) => HandoverState::ActiveDual,
    }
}

impl HandoverState {
    /// Bands currently carrying traffic. Idle and Switching carry none.
    pub fn transmittable_bands(&self) -> BandSet {
        match self {
            HandoverState::Idle | HandoverState::Switching { .. } => BandSet::EMPTY,
            HandoverState::ActiveV => BandSet::V_ONLY,
            HandoverState::ActiveE => BandSet::E_ONLY,
            HandoverState::ActiveDual => BandSet::BOTH,
        }
    }

    /// Requests a retune to `target`.
    ///
    /// Errors: empty target (domain), or a two-band target on a single-chain
    /// radio (capability). Requesting the already-active set is a no-op.
    /// A request issued mid-switch abandons the old target and restarts from
    /// a cold (unassisted) state, since the previous links are already down.
    pub fn request_bands(
        &self,
        architecture: Architecture,
        target: BandSet,
        cost: &HandoverCostModel,
    ) -> Result<HandoverState> {
        if target.is_empty() {
            return Err(Error::Domain(
                "handover target must name at least one band".into(),
            ));
        }
        if architecture == Architecture::SingleChain && target.len() > 1 {
            return Err(Error::Capability(format!(
                "single-chain transceiver cannot activate {target} simultaneously"
            )));
        }

        let current = self.transmittable_bands();
        if current == target {
            return Ok(*self);
        }

        let assisted = architecture == Architecture::DualChain && current.intersects(target);
        let delay_s = if assisted {
            cost.sync_delay_s * cost.feedback_assisted_factor
        } else {
            cost.sync_delay_s
        };

        if delay_s > 0.0 {
            Ok(HandoverState::Switching {
                target,
                remaining_s: delay_s,
            })
        } else {
            Ok(active_state_for(target))
        }
    }

    /// Advances simulated time by `dt_s`. Only `Switching` evolves; the
    /// switch completes once its remaining delay reaches zero.
    pub fn advance(&self, dt_s: f64) -> Result<HandoverState> {
        if !dt_s.is_finite() || dt_s < 0.0 {
            return Err(Error::Domain(format!(
                "time step must be finite and >= 0, got {dt_s}"
            )));
        }
        match *self {
            HandoverState::Switching {
                target,
                remaining_s,
            } => {
                let left = remaining_s - dt_s;
                if left > 0.0 {
                    Ok(HandoverState::Switching {
                        target,
                        remaining_s: left,
                    })
                } else {
                    Ok(active_state_for(target))
                }
            }
            other => Ok(other),
        }
    }
}
