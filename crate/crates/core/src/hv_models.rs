//! Hidden-variable models for the parity-entangled triple.
//!
//! # Symmetric model
//!
//! Every station answers with `R_i = F_i(λ_i, φ, μ)`. The settings `φ` and the
//! non-local label `μ` are held fixed in a [`ModelContext`], so a strategy is
//! just one response table per station over a finite local domain `Λ_i`.
//! Local variables from separate sources are independent, so a strategy only
//! reproduces a parity law if `Π_i F_i(λ_i) = ±1` holds for *every* tuple of
//! local values. [`verify_theorem`] enumerates all strategies and checks that
//! each one passing that test ignores its local variable.
//!
//! # Asymmetric model
//!
//! Two stations answer on their own (from local tables, or by fair coin) and
//! the third is set to `(−1)^q` times their product.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitude::Sign;
use crate::error::{Error, Result};
use crate::measurement::{outcome_distribution, Outcome, OutcomeDistribution};
use crate::optics::{build_final_state, CircuitConfig};
use crate::rng::SplitMix64;

/// Upper bound on `log2` of the number of symmetric strategies enumerated.
pub const ENUMERATION_GUARD_LOG2: usize = 24;

/// Tolerance for matching a circuit phase to one of the two parity points.
pub const THETA_MATCH_TOL: f64 = 1e-9;

/// Required product of all station results: `(−1)^q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParityTarget {
    q: u8,
}

impl ParityTarget {
    /// `q = 0`, product `+1`, phase `π/2`.
    pub const EVEN: ParityTarget = ParityTarget { q: 0 };
    /// `q = 1`, product `−1`, phase `3π/2`.
    pub const ODD: ParityTarget = ParityTarget { q: 1 };

    pub fn from_q(q: i64) -> Result<Self> {
        match q {
            0 => Ok(Self::EVEN),
            1 => Ok(Self::ODD),
            other => Err(Error::InvalidParityFlag(other)),
        }
    }

    pub fn from_sign(value: Sign) -> Self {
        match value {
            Sign::Plus => Self::EVEN,
            Sign::Minus => Self::ODD,
        }
    }

    pub fn q(self) -> u8 {
        self.q
    }

    pub fn value(self) -> Sign {
        Sign::from_parity(self.q == 1)
    }

    /// Phase at which the interferometer produces this parity with certainty.
    pub fn theta(self) -> f64 {
        if self.q == 0 {
            FRAC_PI_2
        } else {
            3.0 * FRAC_PI_2
        }
    }

    /// The target for a phase at `π/2` or `3π/2` (mod 2π), otherwise `None`.
    pub fn for_theta(theta: f64) -> Option<Self> {
        let t = theta.rem_euclid(TAU);
        [Self::EVEN, Self::ODD]
            .into_iter()
            .find(|p| (t - p.theta()).abs() <= THETA_MATCH_TOL)
    }
}

/// A total function from a finite local domain `{0, …, n−1}` to `±1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResponseTable(Vec<Sign>);

impl ResponseTable {
    pub fn new(entries: Vec<Sign>) -> Self {
        ResponseTable(entries)
    }

    pub fn constant(value: Sign, domain_size: usize) -> Self {
        ResponseTable(vec![value; domain_size])
    }

    pub fn domain_size(&self) -> usize {
        self.0.len()
    }

    pub fn respond(&self, lambda: usize) -> Sign {
        self.0[lambda]
    }

    pub fn entries(&self) -> &[Sign] {
        &self.0
    }

    /// True when the response does not depend on the local variable.
    pub fn is_constant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    /// The same function with local values relabelled: entry `k` of the
    /// result is entry `perm[k]` of `self`.
    pub fn relabelled(&self, perm: &[usize]) -> Self {
        ResponseTable(perm.iter().map(|&k| self.0[k]).collect())
    }
}

impl fmt::Display for ResponseTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(if s.is_minus() { "-" } else { "+" })?;
        }
        Ok(())
    }
}

impl FromStr for ResponseTable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse::<Outcome>()
            .map(|o| ResponseTable(o.signs().to_vec()))
            .map_err(|_| Error::InvalidConfig(format!("response table {s:?} must be a string of + and -")))
    }
}

impl Serialize for ResponseTable {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Fixed settings and non-local label shared by all stations in one run.
///
/// `mu` is an opaque label; no distribution over it is assumed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelContext {
    pub config: CircuitConfig,
    pub mu: u64,
}

impl ModelContext {
    /// The circuit setting that realizes `target`, with `mu = 0`.
    pub fn for_target(target: ParityTarget) -> Self {
        ModelContext {
            config: CircuitConfig::from_theta(target.theta()),
            mu: 0,
        }
    }
}

/// One response table per station, all evaluated in a fixed context.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetricStrategy {
    responses: Vec<ResponseTable>,
    context: ModelContext,
}

impl SymmetricStrategy {
    pub fn new(responses: Vec<ResponseTable>, context: ModelContext) -> Self {
        SymmetricStrategy { responses, context }
    }

    /// Decodes strategy number `index`: bit `offset_i + λ` set means
    /// `F_i(λ) = −1`, with party 0 in the lowest bits.
    pub fn from_index(domain_sizes: &[usize], index: u64, context: ModelContext) -> Self {
        let mut bit = 0;
        let responses = domain_sizes
            .iter()
            .map(|&size| {
                let table = (0..size)
                    .map(|lambda| Sign::from_parity(index >> (bit + lambda) & 1 == 1))
                    .collect();
                bit += size;
                ResponseTable(table)
            })
            .collect();
        SymmetricStrategy { responses, context }
    }

    pub fn responses(&self) -> &[ResponseTable] {
        &self.responses
    }

    pub fn context(&self) -> &ModelContext {
        &self.context
    }

    pub fn party_count(&self) -> usize {
        self.responses.len()
    }

    pub fn domain_sizes(&self) -> Vec<usize> {
        self.responses.iter().map(ResponseTable::domain_size).collect()
    }

    /// Joint result for one tuple of local values.
    pub fn respond(&self, lambdas: &[usize]) -> Vec<Sign> {
        self.responses
            .iter()
            .zip(lambdas)
            .map(|(t, &l)| t.respond(l))
            .collect()
    }

    pub fn all_constant(&self) -> bool {
        self.responses.iter().all(ResponseTable::is_constant)
    }
}

/// Whether the product of responses equals the target for every tuple of
/// local values in the domain product.
pub fn check_symmetric_strategy(strategy: &SymmetricStrategy, target: ParityTarget) -> bool {
    let tables = strategy.responses();
    if tables.iter().any(|t| t.domain_size() == 0) {
        return true;
    }
    let want = target.value();
    let mut lambdas = vec![0usize; tables.len()];
    loop {
        let product: Sign = tables.iter().zip(&lambdas).map(|(t, &l)| t.respond(l)).product();
        if product != want {
            return false;
        }
        // odometer step
        let mut k = 0;
        loop {
            if k == lambdas.len() {
                return true;
            }
            lambdas[k] += 1;
            if lambdas[k] < tables[k].domain_size() {
                break;
            }
            lambdas[k] = 0;
            k += 1;
        }
    }
}

fn strategy_space_log2(domain_sizes: &[usize]) -> Result<usize> {
    if domain_sizes.is_empty() {
        return Err(Error::InvalidConfig("at least one party is required".into()));
    }
    if domain_sizes.contains(&0) {
        return Err(Error::InvalidConfig("local domains must be non-empty".into()));
    }
    let bits = domain_sizes.iter().fold(0usize, |acc, &s| acc.saturating_add(s));
    if bits > ENUMERATION_GUARD_LOG2 {
        return Err(Error::EnumerationGuard {
            total_log2: bits,
            limit_log2: ENUMERATION_GUARD_LOG2,
        });
    }
    Ok(bits)
}

/// Every strategy over `domain_sizes` that satisfies `target`, by exhaustive
/// enumeration in index order.
pub fn enumerate_strategies(domain_sizes: &[usize], target: ParityTarget) -> Result<Vec<SymmetricStrategy>> {
    let bits = strategy_space_log2(domain_sizes)?;
    let context = ModelContext::for_target(target);
    Ok((0..1u64 << bits)
        .into_par_iter()
        .map(|i| SymmetricStrategy::from_index(domain_sizes, i, context))
        .filter(|s| check_symmetric_strategy(s, target))
        .collect())
}

/// Outcome of an exhaustive scan of symmetric strategies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub satisfying_count: u64,
    pub total_count: u64,
    pub all_constant: bool,
    /// Lowest-index satisfying strategy with a non-constant table, if any.
    pub counterexample: Option<SymmetricStrategy>,
    pub parties: usize,
    pub domain_sizes: Vec<usize>,
    pub q: u8,
    pub parity: i8,
    /// Number of constant strategies with the right parity, `2^(N−1)`.
    pub expected_constant_count: u64,
}

#[derive(Default)]
struct ScanTally {
    satisfying: u64,
    first_nonconstant: Option<u64>,
}

impl ScanTally {
    fn merge(self, other: ScanTally) -> ScanTally {
        ScanTally {
            satisfying: self.satisfying + other.satisfying,
            first_nonconstant: match (self.first_nonconstant, other.first_nonconstant) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
        }
    }
}

/// Scans every symmetric strategy and reports whether each one satisfying
/// `target` has λ-independent responses.
pub fn verify_theorem(domain_sizes: &[usize], target: ParityTarget) -> Result<TheoremReport> {
    let bits = strategy_space_log2(domain_sizes)?;
    let context = ModelContext::for_target(target);
    let total = 1u64 << bits;
    let tally = (0..total)
        .into_par_iter()
        .fold(ScanTally::default, |mut acc, i| {
            let s = SymmetricStrategy::from_index(domain_sizes, i, context);
            if check_symmetric_strategy(&s, target) {
                acc.satisfying += 1;
                if !s.all_constant() && acc.first_nonconstant.is_none_or(|f| i < f) {
                    acc.first_nonconstant = Some(i);
                }
            }
            acc
        })
        .reduce(ScanTally::default, ScanTally::merge);

    Ok(TheoremReport {
        satisfying_count: tally.satisfying,
        total_count: total,
        all_constant: tally.first_nonconstant.is_none(),
        counterexample: tally
            .first_nonconstant
            .map(|i| SymmetricStrategy::from_index(domain_sizes, i, context)),
        parties: domain_sizes.len(),
        domain_sizes: domain_sizes.to_vec(),
        q: target.q(),
        parity: target.value().value(),
        expected_constant_count: 1u64 << (domain_sizes.len() - 1),
    })
}

/// How the two independent stations produce their answers.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalResponses {
    /// Each independent answer is an unbiased coin.
    FairCoin,
    /// `R_i = H_i(λ_i)`, `R_j = H_j(λ_j)` with each λ uniform on its table.
    Tables {
        first: ResponseTable,
        second: ResponseTable,
    },
}

/// Role assignment and parity flag for the asymmetric model over three
/// stations.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymmetricConfig {
    independent: (usize, usize),
    enforced: usize,
    target: ParityTarget,
    responses: LocalResponses,
}

impl AsymmetricConfig {
    pub fn new(
        independent: (usize, usize),
        enforced: usize,
        target: ParityTarget,
        responses: LocalResponses,
    ) -> Result<Self> {
        let (i, j) = independent;
        let mut seen = [false; 3];
        for s in [i, j, enforced] {
            if s >= 3 || std::mem::replace(&mut seen[s], true) {
                return Err(Error::InvalidConfig(format!(
                    "roles ({i}, {j}) -> {enforced} must name stations 0, 1, 2 once each"
                )));
            }
        }
        if let LocalResponses::Tables { first, second } = &responses {
            if first.domain_size() == 0 || second.domain_size() == 0 {
                return Err(Error::InvalidConfig("response tables must be non-empty".into()));
            }
        }
        Ok(AsymmetricConfig {
            independent,
            enforced,
            target,
            responses,
        })
    }

    /// Stations D, E answer by coin; F is enforced.
    pub fn fair_coin(target: ParityTarget) -> Self {
        Self::new((0, 1), 2, target, LocalResponses::FairCoin).expect("default roles are valid")
    }

    pub fn independent(&self) -> (usize, usize) {
        self.independent
    }

    pub fn enforced(&self) -> usize {
        self.enforced
    }

    pub fn target(&self) -> ParityTarget {
        self.target
    }

    pub fn responses(&self) -> &LocalResponses {
        &self.responses
    }

    /// Assembles one outcome from the two independent answers.
    pub fn outcome(&self, first: Sign, second: Sign) -> Outcome {
        let mut signs = [Sign::Plus; 3];
        signs[self.independent.0] = first;
        signs[self.independent.1] = second;
        signs[self.enforced] = enforced_result(self.target, first, second);
        Outcome::new(signs.to_vec())
    }
}

/// `R_k = (−1)^q R_i R_j`.
pub fn enforced_result(target: ParityTarget, first: Sign, second: Sign) -> Sign {
    target.value() * first * second
}

/// Samples and tallies from [`run_asymmetric`].
#[derive(Debug, Clone, PartialEq)]
pub struct AsymmetricRun {
    pub outcomes: Vec<Outcome>,
    pub empirical: OutcomeDistribution,
}

/// Runs `n` trials of the asymmetric model on a generator seeded with `seed`.
///
/// Per trial the generator is drawn twice, first for station `i` then for
/// station `j`: [`SplitMix64::next_sign`] in fair-coin mode, otherwise
/// [`SplitMix64::below`] over the table's domain.
pub fn run_asymmetric(cfg: &AsymmetricConfig, seed: u64, n: usize) -> AsymmetricRun {
    let mut rng = SplitMix64::new(seed);
    let outcomes: Vec<Outcome> = (0..n)
        .map(|_| {
            let (first, second) = match &cfg.responses {
                LocalResponses::FairCoin => (rng.next_sign(), rng.next_sign()),
                LocalResponses::Tables { first, second } => {
                    let a = first.respond(rng.below(first.domain_size()));
                    let b = second.respond(rng.below(second.domain_size()));
                    (a, b)
                }
            };
            let o = cfg.outcome(first, second);
            assert_eq!(o.parity(), cfg.target.value(), "enforced station broke parity");
            o
        })
        .collect();
    let empirical = OutcomeDistribution::empirical(3, &outcomes).expect("three stations");
    AsymmetricRun { outcomes, empirical }
}

/// Test of one choice of which two stations count as independent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoleAssignmentReport {
    pub independent: (usize, usize),
    pub enforced: usize,
    /// Largest `|f(r_a, r_b) − 1/4|` over the four joint values of the pair.
    pub max_deviation: f64,
    /// `3·sqrt(p(1−p)/n)` with `p = 1/4`.
    pub deviation_bound: f64,
    /// Empirical `E[R_a R_b]`.
    pub correlation: f64,
    /// `3/sqrt(n)`.
    pub correlation_bound: f64,
    /// Whether the third station always equals `(−1)^q` times the pair product.
    pub enforced_consistent: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExchangeabilityReport {
    pub trials: usize,
    pub q: u8,
    pub degenerate: bool,
    pub assignments: Vec<RoleAssignmentReport>,
    pub all_pass: bool,
}

const ROLE_ASSIGNMENTS: [((usize, usize), usize); 3] = [((0, 1), 2), ((0, 2), 1), ((1, 2), 0)];

/// Checks that every pair of stations looks like two fair independent coins
/// with the third enforced, so no station is singled out as "the" dependent
/// one.
///
/// Errors if any sample has the wrong parity or is not a three-station outcome.
pub fn exchangeability_report(samples: &[Outcome], target: ParityTarget) -> Result<ExchangeabilityReport> {
    for (index, o) in samples.iter().enumerate() {
        if o.station_count() != 3 {
            return Err(Error::StationCountMismatch {
                expected: 3,
                found: o.station_count(),
            });
        }
        if o.parity() != target.value() {
            return Err(Error::ParityViolation {
                index,
                expected: target.value().value(),
                found: o.parity().value(),
            });
        }
    }

    let n = samples.len();
    let degenerate = n == 0;
    let nf = n as f64;
    let assignments: Vec<_> = ROLE_ASSIGNMENTS
        .iter()
        .map(|&((a, b), k)| {
            let mut counts = [0usize; 4];
            let mut product_sum = 0i64;
            let mut consistent = true;
            for o in samples {
                let (ra, rb) = (o.get(a), o.get(b));
                counts[usize::from(ra.is_minus()) * 2 + usize::from(rb.is_minus())] += 1;
                product_sum += i64::from((ra * rb).value());
                consistent &= o.get(k) == enforced_result(target, ra, rb);
            }
            let (max_deviation, correlation, deviation_bound, correlation_bound) = if degenerate {
                (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
            } else {
                (
                    counts.iter().map(|&c| (c as f64 / nf - 0.25).abs()).fold(0.0, f64::max),
                    product_sum as f64 / nf,
                    3.0 * (0.25 * 0.75 / nf).sqrt(),
                    3.0 / nf.sqrt(),
                )
            };
            let pass = !degenerate
                && consistent
                && max_deviation <= deviation_bound
                && correlation.abs() <= correlation_bound;
            RoleAssignmentReport {
                independent: (a, b),
                enforced: k,
                max_deviation,
                deviation_bound,
                correlation,
                correlation_bound,
                enforced_consistent: consistent,
                pass,
            }
        })
        .collect();
    let all_pass = assignments.iter().all(|r| r.pass);
    Ok(ExchangeabilityReport {
        trials: n,
        q: target.q(),
        degenerate,
        assignments,
        all_pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub trials: usize,
    pub theta: f64,
    pub q: u8,
    /// Total-variation distance; `1.0` with `degenerate` set when `n = 0`.
    pub tv_distance: f64,
    pub degenerate: bool,
}

/// Total-variation distance between the asymmetric model's empirical
/// distribution and the interferometer's distribution at `config`.
///
/// `config` must sit at the phase matching `cfg`'s parity flag.
pub fn compare_to_quantum(
    cfg: &AsymmetricConfig,
    config: &CircuitConfig,
    n: usize,
    seed: u64,
) -> Result<DivergenceReport> {
    let theta = config.theta_reduced();
    if ParityTarget::for_theta(theta) != Some(cfg.target) {
        return Err(Error::PhaseMismatch {
            theta,
            q: cfg.target.q(),
        });
    }
    let quantum = outcome_distribution(&build_final_state(config))?;
    let degenerate = n == 0;
    let tv_distance = if degenerate {
        1.0
    } else {
        run_asymmetric(cfg, seed, n).empirical.total_variation(&quantum)
    };
    Ok(DivergenceReport {
        trials: n,
        theta,
        q: cfg.target.q(),
        tv_distance,
        degenerate,
    })
}
