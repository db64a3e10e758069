//! Beam splitters, phase shifts and coincidence post-selection for the
//! three-source interferometer.
//!
//! The circuit has two beam-splitter layers. Sources `A`, `B`, `C` each emit
//! one fermion into their own splitter, giving arms `a/a'`, `b/b'`, `c/c'`.
//! Phase shifts `alpha`, `beta`, `gamma` sit on the primed arms. The second
//! layer is cross-wired so that each detector splitter mixes an unprimed arm
//! with a primed arm from a different source:
//!
//! | splitter | inputs      | outputs   |
//! |----------|-------------|-----------|
//! | D        | `a`, `c'`   | `d`, `d'` |
//! | E        | `b`, `a'`   | `e`, `e'` |
//! | F        | `c`, `b'`   | `f`, `f'` |
//!
//! Every splitter uses the same port convention: the unprimed input goes to
//! `(|X⟩ + i|X'⟩)/√2` and the primed input to `(i|X⟩ + |X'⟩)/√2`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amplitude::{ModeId, ModeOrder, StateVector};
use crate::error::{Error, Result};

/// Input pairs of the detector splitters D, E, F.
pub const DETECTOR_SPLITTER_INPUTS: [(ModeId, ModeId); 3] = [
    (ModeId::A, ModeId::CPrime),
    (ModeId::B, ModeId::APrime),
    (ModeId::C, ModeId::BPrime),
];

/// Output pairs (unprimed, primed) of the detector splitters D, E, F.
pub const DETECTOR_SPLITTER_OUTPUTS: [(ModeId, ModeId); 3] = [
    (ModeId::D, ModeId::DPrime),
    (ModeId::E, ModeId::EPrime),
    (ModeId::F, ModeId::FPrime),
];

/// Source arms (unprimed, primed) for sources A, B, C.
pub const SOURCE_ARMS: [(ModeId, ModeId); 3] = [
    (ModeId::A, ModeId::APrime),
    (ModeId::B, ModeId::BPrime),
    (ModeId::C, ModeId::CPrime),
];

const SOURCES: [ModeId; 3] = [ModeId::SourceA, ModeId::SourceB, ModeId::SourceC];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Linear single-particle map: each listed input mode goes to a superposition
/// of output modes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModeMap {
    rows: BTreeMap<ModeId, Vec<(ModeId, Complex64)>>,
    restricted: bool,
}

impl ModeMap {
    /// Unlisted modes pass through unchanged.
    pub fn new() -> Self {
        Self::default()
    }

    /// Unlisted modes are rejected by [`apply_mode_map`].
    pub fn restricted() -> Self {
        ModeMap {
            rows: BTreeMap::new(),
            restricted: true,
        }
    }

    pub fn with_row(mut self, input: ModeId, image: Vec<(ModeId, Complex64)>) -> Self {
        self.rows.insert(input, image);
        self
    }

    /// Adds a 50:50 splitter with inputs `(unprimed, primed)` and outputs
    /// `(out, out_primed)`.
    pub fn with_beam_splitter(
        self,
        unprimed: ModeId,
        primed: ModeId,
        out: ModeId,
        out_primed: ModeId,
    ) -> Self {
        let t = c(FRAC_1_SQRT_2, 0.0);
        let r = c(0.0, FRAC_1_SQRT_2);
        self.with_row(unprimed, vec![(out, t), (out_primed, r)])
            .with_row(primed, vec![(out, r), (out_primed, t)])
    }

    /// The image of `mode`, or `None` when a restricted map does not list it.
    pub fn image(&self, mode: ModeId) -> Option<Vec<(ModeId, Complex64)>> {
        match self.rows.get(&mode) {
            Some(row) => Some(row.clone()),
            None if self.restricted => None,
            None => Some(vec![(mode, c(1.0, 0.0))]),
        }
    }

    pub fn inputs(&self) -> impl Iterator<Item = ModeId> + '_ {
        self.rows.keys().copied()
    }

    /// Whether the listed rows are orthonormal to within `tol`.
    pub fn is_isometry(&self, tol: f64) -> bool {
        let rows: Vec<_> = self.rows.values().collect();
        for (i, ri) in rows.iter().enumerate() {
            for (j, rj) in rows.iter().enumerate().skip(i) {
                let dot: Complex64 = ri
                    .iter()
                    .map(|(m, a)| {
                        let b = rj
                            .iter()
                            .filter(|(n, _)| n == m)
                            .map(|(_, b)| *b)
                            .sum::<Complex64>();
                        a.conj() * b
                    })
                    .sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                if (dot - expected).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Source splitters: `|X⟩ → (|x⟩ + i|x'⟩)/√2` for each source.
pub fn source_layer() -> ModeMap {
    SOURCES
        .iter()
        .zip(SOURCE_ARMS)
        .fold(ModeMap::new(), |map, (&src, (u, p))| {
            map.with_row(
                src,
                vec![(u, c(FRAC_1_SQRT_2, 0.0)), (p, c(0.0, FRAC_1_SQRT_2))],
            )
        })
}

/// Cross-wired detector splitters D, E, F.
pub fn detector_layer() -> ModeMap {
    DETECTOR_SPLITTER_INPUTS
        .iter()
        .zip(DETECTOR_SPLITTER_OUTPUTS)
        .fold(ModeMap::new(), |map, (&(u, p), (o, op))| {
            map.with_beam_splitter(u, p, o, op)
        })
}

/// Replaces each particle's mode by its image and re-expands the state.
///
/// Products placing two fermions in one output mode vanish and are not
/// stored. Terms with two particles in the same splitter but distinct modes
/// are kept.
pub fn apply_mode_map(state: &StateVector, map: &ModeMap) -> Result<StateVector> {
    let mut out = StateVector::with_order(state.particle_count(), *state.order());
    for (term, amp) in state.iter() {
        let images = term
            .modes()
            .iter()
            .map(|&m| map.image(m).ok_or(Error::ModeOutsideMap(m)))
            .collect::<Result<Vec<_>>>()?;
        let mut prefix = Vec::with_capacity(images.len());
        expand_images(&images, &mut prefix, *amp, &mut out)?;
    }
    Ok(out)
}

fn expand_images(
    images: &[Vec<(ModeId, Complex64)>],
    prefix: &mut Vec<ModeId>,
    amp: Complex64,
    out: &mut StateVector,
) -> Result<()> {
    let Some((head, rest)) = images.split_first() else {
        return out.add_modes(prefix, amp);
    };
    for &(mode, coeff) in head {
        if prefix.contains(&mode) {
            continue;
        }
        prefix.push(mode);
        expand_images(rest, prefix, amp * coeff, out)?;
        prefix.pop();
    }
    Ok(())
}

/// Multiplies every term containing `mode` by `e^{i·phase}`.
pub fn apply_phase(state: &StateVector, mode: ModeId, phase: f64) -> StateVector {
    let shift = Complex64::from_polar(1.0, phase);
    let mut out = StateVector::with_order(state.particle_count(), *state.order());
    for (term, amp) in state.iter() {
        let a = if term.contains(mode) { amp * shift } else { *amp };
        out.add_scaled(term.clone(), a)
            .expect("term length unchanged");
    }
    out
}

/// Phase-shift triple on the primed arms `a'`, `b'`, `c'` (radians).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl CircuitConfig {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        CircuitConfig { alpha, beta, gamma }
    }

    /// A config with effective phase `theta`, all of it on `alpha`.
    pub fn from_theta(theta: f64) -> Self {
        CircuitConfig::new(theta + FRAC_PI_2, 0.0, 0.0)
    }

    /// Effective interferometer phase `alpha + beta + gamma - π/2`, unreduced.
    pub fn theta(&self) -> f64 {
        self.alpha + self.beta + self.gamma - FRAC_PI_2
    }

    /// [`theta`](Self::theta) reduced to `[0, 2π)`.
    pub fn theta_reduced(&self) -> f64 {
        let t = self.theta().rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU
        if t >= TAU {
            0.0
        } else {
            t
        }
    }

    pub fn is_finite(&self) -> bool {
        self.alpha.is_finite() && self.beta.is_finite() && self.gamma.is_finite()
    }
}

/// `|ABC⟩`, one fermion per source.
pub fn source_state(order: ModeOrder) -> StateVector {
    StateVector::from_modes(&SOURCES, order).expect("source modes are distinct")
}

/// The eight-term state after the source splitters and phase shifts.
pub fn build_prepared_state(config: &CircuitConfig) -> StateVector {
    build_prepared_state_in(config, ModeOrder::default())
}

pub fn build_prepared_state_in(config: &CircuitConfig, order: ModeOrder) -> StateVector {
    let split = apply_mode_map(&source_state(order), &source_layer())
        .expect("source layer passes unlisted modes through");
    let phases = [
        (ModeId::APrime, config.alpha),
        (ModeId::BPrime, config.beta),
        (ModeId::CPrime, config.gamma),
    ];
    phases
        .iter()
        .fold(split, |s, &(m, phi)| apply_phase(&s, m, phi))
}

/// Drops every term sending two particles into one detector splitter and
/// renormalizes.
///
/// Returns the surviving state and the survivor probability measured before
/// renormalization. An input with no survivors yields an empty state and 0.
pub fn postselect_coincidence(state: &StateVector) -> (StateVector, f64) {
    let total = state.norm_squared();
    let kept = state.filtered(|term| {
        DETECTOR_SPLITTER_INPUTS.iter().all(|&(u, p)| {
            term.modes().iter().filter(|&&m| m == u || m == p).count() <= 1
        })
    });
    let survived = kept.norm_squared();
    if survived == 0.0 || total == 0.0 {
        return (StateVector::with_order(state.particle_count(), *state.order()), 0.0);
    }
    (kept.normalized(), survived / total)
}

/// Every stage of one run through the interferometer.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub config: CircuitConfig,
    pub prepared: StateVector,
    pub post_selected: StateVector,
    pub keep_probability: f64,
    pub final_state: StateVector,
}

pub fn simulate(config: &CircuitConfig) -> Simulation {
    simulate_in(config, ModeOrder::default())
}

/// [`simulate`] with an explicit canonical mode order.
pub fn simulate_in(config: &CircuitConfig, order: ModeOrder) -> Simulation {
    let prepared = build_prepared_state_in(config, order);
    let (post_selected, keep_probability) = postselect_coincidence(&prepared);
    let final_state = apply_mode_map(&post_selected, &detector_layer())
        .expect("detector layer passes unlisted modes through");
    Simulation {
        config: *config,
        prepared,
        post_selected,
        keep_probability,
        final_state,
    }
}

/// Unit-norm state over the detector modes after post-selection.
pub fn build_final_state(config: &CircuitConfig) -> StateVector {
    simulate(config).final_state
}
