//! Complex amplitudes over sparse fermionic basis terms.
//!
//! A [`BasisTerm`] is a product of distinct single-particle modes. Terms are
//! stored sorted under a [`ModeOrder`]; the sign of the sorting permutation is
//! folded into the amplitude, so identical fermion configurations always land
//! on the same map key and cancel or add by lookup.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Mul, Neg};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Amplitudes with magnitude at or below this are dropped from a state.
pub const PRUNE_TOLERANCE: f64 = 1e-12;

/// A single-particle mode of the three-source interferometer.
///
/// Capital `Source*` variants are the source outputs; `A`..`C` and their
/// primed partners are the arms after the first beam-splitter layer; `D`..`F`
/// and primes are the detector modes after the second layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ModeId {
    SourceA,
    SourceB,
    SourceC,
    A,
    APrime,
    B,
    BPrime,
    C,
    CPrime,
    D,
    DPrime,
    E,
    EPrime,
    F,
    FPrime,
}

impl ModeId {
    pub const COUNT: usize = 15;

    pub const ALL: [ModeId; ModeId::COUNT] = [
        ModeId::SourceA,
        ModeId::SourceB,
        ModeId::SourceC,
        ModeId::A,
        ModeId::APrime,
        ModeId::B,
        ModeId::BPrime,
        ModeId::C,
        ModeId::CPrime,
        ModeId::D,
        ModeId::DPrime,
        ModeId::E,
        ModeId::EPrime,
        ModeId::F,
        ModeId::FPrime,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            ModeId::SourceA => "A",
            ModeId::SourceB => "B",
            ModeId::SourceC => "C",
            ModeId::A => "a",
            ModeId::APrime => "a'",
            ModeId::B => "b",
            ModeId::BPrime => "b'",
            ModeId::C => "c",
            ModeId::CPrime => "c'",
            ModeId::D => "d",
            ModeId::DPrime => "d'",
            ModeId::E => "e",
            ModeId::EPrime => "e'",
            ModeId::F => "f",
            ModeId::FPrime => "f'",
        }
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A ±1 factor: a permutation sign or a detector result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Sign {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn to_f64(self) -> f64 {
        f64::from(self.value())
    }

    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_parity(self.is_minus() != rhs.is_minus())
    }
}

impl std::iter::Product for Sign {
    fn product<I: Iterator<Item = Sign>>(iter: I) -> Sign {
        iter.fold(Sign::Plus, |acc, s| acc * s)
    }
}

/// Total order on modes used to canonicalize basis terms.
///
/// Every sign in a state flows from this order. Observable probabilities do
/// not depend on which order is chosen, only on using one consistently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeOrder {
    rank: [u8; ModeId::COUNT],
}

impl ModeOrder {
    /// Orders modes as listed; `sequence` must be a permutation of [`ModeId::ALL`].
    pub fn from_sequence(sequence: &[ModeId]) -> Result<Self> {
        let invalid = Error::InvalidModeOrder {
            expected: ModeId::COUNT,
        };
        if sequence.len() != ModeId::COUNT {
            return Err(invalid);
        }
        let mut rank = [u8::MAX; ModeId::COUNT];
        for (position, mode) in sequence.iter().enumerate() {
            if rank[mode.index()] != u8::MAX {
                return Err(invalid);
            }
            rank[mode.index()] = position as u8;
        }
        Ok(ModeOrder { rank })
    }

    #[inline]
    pub fn rank(&self, mode: ModeId) -> u8 {
        self.rank[mode.index()]
    }

    /// Modes from lowest to highest rank.
    pub fn sequence(&self) -> [ModeId; ModeId::COUNT] {
        let mut out = [ModeId::SourceA; ModeId::COUNT];
        for mode in ModeId::ALL {
            out[self.rank(mode) as usize] = mode;
        }
        out
    }
}

impl Default for ModeOrder {
    /// Declaration order of [`ModeId`].
    fn default() -> Self {
        let mut rank = [0u8; ModeId::COUNT];
        for (i, r) in rank.iter_mut().enumerate() {
            *r = i as u8;
        }
        ModeOrder { rank }
    }
}

/// Distinct modes, one per particle, sorted under the owning state's order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisTerm(Vec<ModeId>);

impl BasisTerm {
    pub fn modes(&self) -> &[ModeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, mode: ModeId) -> bool {
        self.0.contains(&mode)
    }
}

impl fmt::Display for BasisTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for m in &self.0 {
            f.write_str(m.label())?;
        }
        f.write_str(">")
    }
}

/// Sorts `modes` under `order`, returning the term and the parity of the
/// sorting permutation.
///
/// Errors with [`Error::DuplicateMode`] when a mode repeats.
pub fn canonicalize(modes: &[ModeId], order: &ModeOrder) -> Result<(BasisTerm, Sign)> {
    let mut sorted = modes.to_vec();
    let mut odd = false;
    // insertion sort; every adjacent swap is one transposition
    for i in 1..sorted.len() {
        let mut j = i;
        while j > 0 {
            let (lo, hi) = (order.rank(sorted[j - 1]), order.rank(sorted[j]));
            if lo == hi {
                return Err(Error::DuplicateMode(sorted[j]));
            }
            if lo < hi {
                break;
            }
            sorted.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    Ok((BasisTerm(sorted), Sign::from_parity(odd)))
}

/// A single-particle superposition `Σ c_m |m⟩`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Superposition(pub Vec<(ModeId, Complex64)>);

impl Superposition {
    pub fn basis(mode: ModeId) -> Self {
        Superposition(vec![(mode, Complex64::new(1.0, 0.0))])
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|(_, c)| c.norm_sqr()).sum()
    }

    pub fn modes(&self) -> impl Iterator<Item = ModeId> + '_ {
        self.0.iter().map(|(m, _)| *m)
    }
}

/// Sparse N-fermion state: canonical basis terms mapped to amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    particle_count: usize,
    order: ModeOrder,
    terms: BTreeMap<BasisTerm, Complex64>,
}

impl StateVector {
    pub fn new(particle_count: usize) -> Self {
        Self::with_order(particle_count, ModeOrder::default())
    }

    pub fn with_order(particle_count: usize, order: ModeOrder) -> Self {
        StateVector {
            particle_count,
            order,
            terms: BTreeMap::new(),
        }
    }

    /// The single-term state `|modes⟩` with unit amplitude (before ordering sign).
    pub fn from_modes(modes: &[ModeId], order: ModeOrder) -> Result<Self> {
        let mut state = Self::with_order(modes.len(), order);
        state.add_modes(modes, Complex64::new(1.0, 0.0))?;
        Ok(state)
    }

    pub fn particle_count(&self) -> usize {
        self.particle_count
    }

    pub fn order(&self) -> &ModeOrder {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisTerm, &Complex64)> {
        self.terms.iter()
    }

    /// Accumulates `amp` onto an already-canonical `term`, pruning it if the
    /// result falls to [`PRUNE_TOLERANCE`].
    pub fn add_scaled(&mut self, term: BasisTerm, amp: Complex64) -> Result<()> {
        if term.len() != self.particle_count {
            return Err(Error::LengthMismatch {
                expected: self.particle_count,
                found: term.len(),
            });
        }
        match self.terms.entry(term) {
            Entry::Vacant(slot) => {
                if amp.norm() > PRUNE_TOLERANCE {
                    slot.insert(amp);
                }
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += amp;
                if slot.get().norm() <= PRUNE_TOLERANCE {
                    slot.remove();
                }
            }
        }
        Ok(())
    }

    /// Canonicalizes an ordered product of modes, then accumulates with the
    /// ordering sign applied.
    pub fn add_modes(&mut self, modes: &[ModeId], amp: Complex64) -> Result<()> {
        if modes.len() != self.particle_count {
            return Err(Error::LengthMismatch {
                expected: self.particle_count,
                found: modes.len(),
            });
        }
        let (term, sign) = canonicalize(modes, &self.order)?;
        self.add_scaled(term, amp * sign.to_f64())
    }

    /// Amplitude of the ordered product `|modes⟩`, sign included.
    pub fn amplitude(&self, modes: &[ModeId]) -> Complex64 {
        match canonicalize(modes, &self.order) {
            Ok((term, sign)) => self
                .terms
                .get(&term)
                .map_or(Complex64::new(0.0, 0.0), |a| a * sign.to_f64()),
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`, comparing terms as ordered products so the two states
    /// may use different mode orders.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.terms
            .iter()
            .map(|(term, a)| a.conj() * other.amplitude(term.modes()))
            .sum()
    }

    /// `|⟨self|other⟩|` for unit states; 1 means equal up to a global phase.
    pub fn overlap_magnitude(&self, other: &StateVector) -> f64 {
        self.inner(other).norm()
    }

    pub fn scaled(&self, factor: Complex64) -> StateVector {
        let mut out = StateVector::with_order(self.particle_count, self.order);
        for (term, a) in &self.terms {
            // scaling can push an amplitude under tolerance
            let v = a * factor;
            if v.norm() > PRUNE_TOLERANCE {
                out.terms.insert(term.clone(), v);
            }
        }
        out
    }

    /// Unit-norm copy; the empty state is returned unchanged.
    pub fn normalized(&self) -> StateVector {
        let n = self.norm_squared();
        if n == 0.0 {
            return self.clone();
        }
        self.scaled(Complex64::new(n.sqrt().recip(), 0.0))
    }

    /// The same physical state expressed under another mode order.
    pub fn reordered(&self, order: ModeOrder) -> StateVector {
        let mut out = StateVector::with_order(self.particle_count, order);
        for (term, a) in &self.terms {
            out.add_modes(term.modes(), *a)
                .expect("terms of a valid state are exclusion-free");
        }
        out
    }

    /// Keeps only the terms accepted by `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&BasisTerm) -> bool) -> StateVector {
        StateVector {
            particle_count: self.particle_count,
            order: self.order,
            terms: self
                .terms
                .iter()
                .filter(|(t, _)| keep(t))
                .map(|(t, a)| (t.clone(), *a))
                .collect(),
        }
    }
}

/// Expands `Π_k (Σ c_km |m⟩)` into a state, canonicalizing each cross term.
///
/// Factor `k` is particle `k`; the factors must touch disjoint mode sets.
pub fn product_state(factors: &[Superposition], order: ModeOrder) -> Result<StateVector> {
    let mut seen = [false; ModeId::COUNT];
    for factor in factors {
        let mut local = [false; ModeId::COUNT];
        for m in factor.modes() {
            if seen[m.index()] {
                return Err(Error::OverlappingFactors(m));
            }
            local[m.index()] = true;
        }
        for (s, l) in seen.iter_mut().zip(local) {
            *s |= l;
        }
    }

    let mut state = StateVector::with_order(factors.len(), order);
    let mut modes = Vec::with_capacity(factors.len());
    expand(factors, &mut modes, Complex64::new(1.0, 0.0), &mut state)?;
    Ok(state)
}

fn expand(
    factors: &[Superposition],
    prefix: &mut Vec<ModeId>,
    amp: Complex64,
    state: &mut StateVector,
) -> Result<()> {
    let Some((head, rest)) = factors.split_first() else {
        return state.add_modes(prefix, amp);
    };
    for (mode, c) in &head.0 {
        prefix.push(*mode);
        expand(rest, prefix, amp * c, state)?;
        prefix.pop();
    }
    Ok(())
}
