//! Band-allocation policy: SNR/density classification with hysteresis, the
//! allocation matrix, and handover trigger evaluation.
//!
//! Links are classified on two axes: link quality (best-band SNR against a
//! threshold) and network density (V-band interference-to-noise ratio
//! against a threshold). The allocation matrix is:
//!
//!   Low SNR, any density        -> E only (range first)
//!   Medium-high SNR, high dens. -> V only (absorption isolates interferers)
//!   Medium-high SNR, low dens.  -> V and E together (aggregate)
//!
//! Hysteresis biases both classifications toward the previous class so a
//! signal wobbling around a threshold cannot ping-pong the link.

use crate::regulatory::BandSet;
use crate::transceiver::Architecture;

// ---------------------------------------------------------------------------
// Thresholds and classes
// ---------------------------------------------------------------------------

/// Classification thresholds, all in dB except the optional rate demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Boundary between "low" and "medium-high" best-band SNR.
    pub snr_low_high_db: f64,
    /// Boundary between "low" and "high" density, as V-band INR.
    pub density_inr_db: f64,
    /// Extra margin required to leave the previous class. Must be >= 0.
    pub hysteresis_db: f64,
    /// When set, dual-band allocation is granted only if a single band
    /// cannot already meet this per-user demand.
    pub demand_bps: Option<f64>,
}

impl Default for Thresholds {
    fn default() -> Thresholds {
        Thresholds {
            snr_low_high_db: 10.0,
            density_inr_db: 0.0,
            hysteresis_db: 2.0,
            demand_bps: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SnrClass {
    Low,
    MediumHigh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DensityClass {
    Low,
    High,
}

/// Joint classification of one link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LinkClass {
    pub snr: SnrClass,
    pub density: DensityClass,
}

/// One hysteretic two-way comparison: crossing the boundary away from the
/// previous side requires `hysteresis_db` of extra margin.
fn hysteretic_at_least(
    value: f64,
    boundary: f64,
    hysteresis_db: f64,
    previously_above: Option<bool>,
) -> bool {
    let adjusted = match previously_above {
        Some(true) => boundary - hysteresis_db,
        Some(false) => boundary + hysteresis_db,
        None => boundary,
    };
    value >= adjusted
}

/// Classifies a link from its per-band SNRs and V-band INR.
///
/// The SNR axis uses the best band (a link is only "low SNR" when no band
/// can do better). Measurements of negative infinity are legal and mean
/// "no signal" / "no interference"; the comparisons handle them naturally.
pub fn classify_link(
    snr_v_db: f64,
    snr_e_db: f64,
    inr_db: f64,
    thresholds: &Thresholds,
    previous: Option<LinkClass>,
) -> LinkClass {
    let best_snr = snr_v_db.max(snr_e_db);
    let snr = if hysteretic_at_least(
        best_snr,
        thresholds.snr_low_high_db,
        thresholds.hysteresis_db,
        previous.map(|p| p.snr == SnrClass::MediumHigh),
    ) {
        SnrClass::MediumHigh
    } else {
        SnrClass::Low
    };
    let density = if hysteretic_at_least(
        inr_db,
        thresholds.density_inr_db,
        thresholds.hysteresis_db,
        previous.map(|p| p.density == DensityClass::High),
    ) {
        DensityClass::High
    } else {
        DensityClass::Low
    };
    LinkClass { snr, density }
}

// ---------------------------------------------------------------------------
// Allocation
// ---------------------------------------------------------------------------

/// Why an allocation picked its band set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AllocationReason {
    LowSnrFallbackToE,
    HighDensityUseV,
    LowDensityUseBoth,
}

impl AllocationReason {
    /// Stable lowercase token for logs and CSV emission.
    pub fn token(self) -> &'static str {
        match self {
            AllocationReason::LowSnrFallbackToE => "low-snr-fallback-to-e",
            AllocationReason::HighDensityUseV => "high-density-use-v",
            AllocationReason::LowDensityUseBoth => "low-density-use-both",
        }
    }
}

/// A band set plus the matrix cell that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AllocationDecision {
    pub bands: BandSet,
    pub reason: AllocationReason,
}

/// The allocation matrix. Total over all four classes; never returns an
/// empty band set.
pub fn allocate_band(class: LinkClass) -> AllocationDecision {
    match (class.snr, class.density) {
        (SnrClass::Low, _) => AllocationDecision {
            bands: BandSet::E_ONLY,
            reason: AllocationReason::LowSnrFallbackToE,
        },
        (SnrClass::MediumHigh, DensityClass::High) => AllocationDecision {
            bands: BandSet::V_ONLY,
            reason: AllocationReason::HighDensityUseV,
        },
        (SnrClass::MediumHigh, DensityClass::Low) => AllocationDecision {
            bands: BandSet::BOTH,
            reason: AllocationReason::LowDensityUseBoth,
        },
    }
}

// ---------------------------------------------------------------------------
// Handover triggers
// ---------------------------------------------------------------------------

/// Per-band rate predictions used to down-select a dual-band target when the
/// hardware or the demand gate allows only one band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedRates {
    pub v_bps: f64,
    pub e_bps: f64,
}

impl PredictedRates {
    /// The single best band: higher predicted rate, ties to E.
    fn best_single(&self) -> BandSet {
        if self.v_bps > self.e_bps {
            BandSet::V_ONLY
        } else {
            BandSet::E_ONLY
        }
    }
}

/// A requested change of the active band set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HandoverEvent {
    pub target: BandSet,
    pub reason: AllocationReason,
}

/// Decides whether `current` should hand over, given a fresh classification.
///
/// The raw target comes from the allocation matrix. A dual-band target is
/// narrowed to the single best band when the optional demand is already met
/// by one band alone, or when the hardware has only one chain. No event is
/// produced when the final target equals the current set.
pub fn evaluate_triggers(
    current: BandSet,
    class: LinkClass,
    architecture: Architecture,
    thresholds: &Thresholds,
    predicted: PredictedRates,
) -> Option<HandoverEvent> {
    let decision = allocate_band(class);
    let mut target = decision.bands;

    if target == BandSet::BOTH {
        let single_meets_demand = thresholds
            .demand_bps
            .is_some_and(|demand| predicted.v_bps.max(predicted.e_bps) >= demand);
        if single_meets_demand || architecture == Architecture::SingleChain {
            target = predicted.best_single();
        }
    }

    (target != current).then_some(HandoverEvent {
        target,
        reason: decision.reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn class(snr: SnrClass, density: DensityClass) -> LinkClass {
        LinkClass { snr, density }
    }

    #[test]
    fn allocation_matrix_is_exact() {
        let cases = [
            (class(SnrClass::Low, DensityClass::Low), BandSet::E_ONLY),
            (class(SnrClass::Low, DensityClass::High), BandSet::E_ONLY),
            (
                class(SnrClass::MediumHigh, DensityClass::High),
                BandSet::V_ONLY,
            ),
            (
                class(SnrClass::MediumHigh, DensityClass::Low),
                BandSet::BOTH,
            ),
        ];
        for (c, expected) in cases {
            let d = allocate_band(c);
            assert_eq!(d.bands, expected, "cell {c:?}");
            assert!(!d.bands.is_empty(), "allocation must never be empty");
        }
        assert_eq!(
            allocate_band(class(SnrClass::Low, DensityClass::High)).reason,
            AllocationReason::LowSnrFallbackToE
        );
        assert_eq!(
            allocate_band(class(SnrClass::MediumHigh, DensityClass::High)).reason,
            AllocationReason::HighDensityUseV
        );
        assert_eq!(
            allocate_band(class(SnrClass::MediumHigh, DensityClass::Low)).reason,
            AllocationReason::LowDensityUseBoth
        );
    }

    #[test]
    fn boundary_snr_without_history_is_medium_high() {
        let th = Thresholds::default();
        let c = classify_link(10.0, -40.0, -30.0, &th, None);
        assert_eq!(c.snr, SnrClass::MediumHigh, "boundary convention is >=");
        assert_eq!(c.density, DensityClass::Low);
    }

    #[test]
    fn low_snr_high_density_cell() {
        let th = Thresholds::default();
        let c = classify_link(5.0, 3.0, 5.0, &th, None);
        assert_eq!(c, class(SnrClass::Low, DensityClass::High));
    }

    #[test]
    fn best_band_drives_the_snr_class() {
        let th = Thresholds::default();
        let c = classify_link(-5.0, 12.0, -30.0, &th, None);
        assert_eq!(c.snr, SnrClass::MediumHigh, "E alone can lift the class");
        let c = classify_link(-5.0, 9.9, -30.0, &th, None);
        assert_eq!(c.snr, SnrClass::Low);
    }

    #[test]
    fn hysteresis_raises_the_bar_to_leave_low() {
        let th = Thresholds {
            hysteresis_db: 1.0,
            ..Thresholds::default()
        };
        let previous = Some(class(SnrClass::Low, DensityClass::Low));
        // 10.5 dB clears the plain 10 dB boundary but not the 11 dB needed
        // to escape a previous Low classification.
        let c = classify_link(10.5, -40.0, -30.0, &th, previous);
        assert_eq!(c.snr, SnrClass::Low, "needs >= 11 dB to leave Low");
        let c = classify_link(11.0, -40.0, -30.0, &th, previous);
        assert_eq!(c.snr, SnrClass::MediumHigh);
    }

    #[test]
    fn hysteresis_lowers_the_bar_to_stay_medium_high() {
        let th = Thresholds::default(); // 2 dB hysteresis
        let previous = Some(class(SnrClass::MediumHigh, DensityClass::Low));
        let c = classify_link(8.0, -40.0, -30.0, &th, previous);
        assert_eq!(
            c.snr,
            SnrClass::MediumHigh,
            "8 dB >= 10 - 2 keeps the class"
        );
        let c = classify_link(7.9, -40.0, -30.0, &th, previous);
        assert_eq!(c.snr, SnrClass::Low);
    }

    #[test]
    fn no_interference_classifies_as_low_density() {
        let th = Thresholds::default();
        let c = classify_link(15.0, 20.0, f64::NEG_INFINITY, &th, None);
        assert_eq!(c.density, DensityClass::Low);
    }

    #[test]
    fn ping_pong_is_bounded_by_hysteresis() {
        let th = Thresholds::default(); // threshold 10, hysteresis 2
        let mut previous: Option<LinkClass> = None;
        let mut current = BandSet::EMPTY;
        let mut events = 0;
        for step in 0..1000 {
            // SNR oscillates 9, 11, 9, 11, ... (+-1 dB around the threshold).
            let snr = 10.0 + if step % 2 == 0 { -1.0 } else { 1.0 };
            let c = classify_link(snr, f64::NEG_INFINITY, f64::NEG_INFINITY, &th, previous);
            let predicted = PredictedRates {
                v_bps: 1e9,
                e_bps: 2e9,
            };
            if let Some(event) =
                evaluate_triggers(current, c, Architecture::DualChain, &th, predicted)
            {
                events += 1;
                current = event.target;
            }
            previous = Some(c);
        }
        assert!(
            events <= 1,
            "oscillation inside the hysteresis band caused {events} handovers"
        );
    }

    #[test]
    fn trigger_fires_only_on_a_real_change() {
        let th = Thresholds::default();
        let predicted = PredictedRates {
            v_bps: 1e9,
            e_bps: 2e9,
        };
        let low = class(SnrClass::Low, DensityClass::High);
        let event = evaluate_triggers(
            BandSet::V_ONLY,
            low,
            Architecture::DualChain,
            &th,
            predicted,
        )
        .expect("class change must trigger a handover");
        assert_eq!(event.target, BandSet::E_ONLY);
        assert_eq!(event.reason, AllocationReason::LowSnrFallbackToE);

        let settled = class(SnrClass::MediumHigh, DensityClass::Low);
        assert_eq!(
            evaluate_triggers(
                BandSet::BOTH,
                settled,
                Architecture::DualChain,
                &th,
                predicted
            ),
            None,
            "already at the target: no event"
        );
    }

    #[test]
    fn single_chain_downselects_by_predicted_rate() {
        let th = Thresholds::default();
        let both = class(SnrClass::MediumHigh, DensityClass::Low);
        let v_better = PredictedRates {
            v_bps: 3e9,
            e_bps: 2e9,
        };
        let event = evaluate_triggers(
            BandSet::EMPTY,
            both,
            Architecture::SingleChain,
            &th,
            v_better,
        )
        .unwrap();
        assert_eq!(event.target, BandSet::V_ONLY);

        let tie = PredictedRates {
            v_bps: 2e9,
            e_bps: 2e9,
        };
        let event =
            evaluate_triggers(BandSet::EMPTY, both, Architecture::SingleChain, &th, tie).unwrap();
        assert_eq!(event.target, BandSet::E_ONLY, "ties break toward E");
    }

    #[test]
    fn demand_gate_withholds_the_second_band() {
        let th = Thresholds {
            demand_bps: Some(1.5e9),
            ..Thresholds::default()
        };
        let both = class(SnrClass::MediumHigh, DensityClass::Low);
        let predicted = PredictedRates {
            v_bps: 1e9,
            e_bps: 2e9,
        };
        let event = evaluate_triggers(
            BandSet::EMPTY,
            both,
            Architecture::DualChain,
            &th,
            predicted,
        )
        .unwrap();
        assert_eq!(
            event.target,
            BandSet::E_ONLY,
            "E alone meets 1.5 Gbps, so no aggregation"
        );

        let hungry = Thresholds {
            demand_bps: Some(2.5e9),
            ..Thresholds::default()
        };
        let event = evaluate_triggers(
            BandSet::EMPTY,
            both,
            Architecture::DualChain,
            &hungry,
            predicted,
        )
        .unwrap();
        assert_eq!(event.target, BandSet::BOTH, "unmet demand keeps both bands");
    }

    proptest! {
        /// Raising SNR (density and history fixed) never demotes the class,
        /// and medium-high never allocates E alone.
        #[test]
        fn snr_response_is_monotone(
            snr in -30.0f64..40.0,
            bump in 0.0f64..30.0,
            inr in -40.0f64..20.0,
        ) {
            let th = Thresholds::default();
            let lo = classify_link(snr, snr - 3.0, inr, &th, None);
            let hi = classify_link(snr + bump, snr + bump - 3.0, inr, &th, None);
            if lo.snr == SnrClass::MediumHigh {
                prop_assert_eq!(hi.snr, SnrClass::MediumHigh);
            }
            if hi.snr == SnrClass::MediumHigh {
                prop_assert_ne!(allocate_band(hi).bands, BandSet::E_ONLY);
            }
            prop_assert!(!allocate_band(lo).bands.is_empty());
        }

        /// Classification is scale-free: shifting every measurement and every
        /// boundary by the same offset leaves the class unchanged.
        #[test]
        fn classification_is_scale_free(
            snr_v in -30.0f64..40.0,
            snr_e in -30.0f64..40.0,
            inr in -40.0f64..20.0,
            shift in -50.0f64..50.0,
            prev_snr_high in proptest::option::of(proptest::bool::ANY),
        ) {
            let th = Thresholds::default();
            let shifted = Thresholds {
                snr_low_high_db: th.snr_low_high_db + shift,
                density_inr_db: th.density_inr_db + shift,
                ..th
            };
            let previous = prev_snr_high.map(|high| class(
                if high { SnrClass::MediumHigh } else { SnrClass::Low },
                DensityClass::Low,
            ));
            let base = classify_link(snr_v, snr_e, inr, &th, previous);
            let moved = classify_link(
                snr_v + shift, snr_e + shift, inr + shift, &shifted, previous,
            );
            prop_assert_eq!(base, moved);
        }
    }
}
