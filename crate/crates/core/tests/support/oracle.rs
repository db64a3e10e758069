//! Brute-force amplitude oracle for the three-source interferometer.
//!
//! Independent of the sparse-state simulator: the circuit is written out as
//! two dense single-particle matrices, and three-fermion amplitudes are
//! determinants of 3×3 minors (Leibniz expansion). Post-selection is a
//! projection onto arm triples with one particle per detector splitter.

#![allow(dead_code)]

use num_complex::Complex64;

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

// arm indices
const A: usize = 0;
const AP: usize = 1;
const B: usize = 2;
const BP: usize = 3;
const C: usize = 4;
const CP: usize = 5;
// detector indices: d d' e e' f f'
const DETECTORS: usize = 6;

fn z(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `u1[arm][source]` including the phase shifts on primed arms.
fn first_layer(alpha: f64, beta: f64, gamma: f64) -> [[Complex64; 3]; 6] {
    let mut u = [[z(0.0, 0.0); 3]; 6];
    for (src, (arm, arm_p, phi)) in [(A, AP, alpha), (B, BP, beta), (C, CP, gamma)].into_iter().enumerate() {
        u[arm][src] = z(H, 0.0);
        u[arm_p][src] = z(0.0, H) * Complex64::from_polar(1.0, phi);
    }
    u
}

/// `u2[detector][arm]`: splitter D takes a, c'; E takes b, a'; F takes c, b'.
fn second_layer() -> [[Complex64; 6]; 6] {
    let mut u = [[z(0.0, 0.0); 6]; 6];
    for (station, (unprimed, primed)) in [(A, CP), (B, AP), (C, BP)].into_iter().enumerate() {
        let (out, out_p) = (2 * station, 2 * station + 1);
        u[out][unprimed] = z(H, 0.0);
        u[out_p][unprimed] = z(0.0, H);
        u[out][primed] = z(0.0, H);
        u[out_p][primed] = z(H, 0.0);
    }
    u
}

fn det3(m: [[Complex64; 3]; 3]) -> Complex64 {
    const PERMS: [([usize; 3], f64); 6] = [
        ([0, 1, 2], 1.0),
        ([1, 2, 0], 1.0),
        ([2, 0, 1], 1.0),
        ([0, 2, 1], -1.0),
        ([2, 1, 0], -1.0),
        ([1, 0, 2], -1.0),
    ];
    PERMS
        .iter()
        .map(|(p, s)| m[0][p[0]] * m[1][p[1]] * m[2][p[2]] * *s)
        .sum()
}

fn triples(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                out.push([i, j, k]);
            }
        }
    }
    out
}

fn splitter_of(arm: usize) -> usize {
    match arm {
        A | CP => 0,
        B | AP => 1,
        _ => 2,
    }
}

pub struct OracleRun {
    pub keep_probability: f64,
    /// Post-selected, renormalized amplitudes on the surviving arm triples.
    pub kept: Vec<([usize; 3], Complex64)>,
    /// Outcome probabilities indexed by bits (station D is the high bit,
    /// bit set means the primed detector fired).
    pub probabilities: [f64; 8],
}

pub fn run(alpha: f64, beta: f64, gamma: f64) -> OracleRun {
    let u1 = first_layer(alpha, beta, gamma);
    let prepared: Vec<([usize; 3], Complex64)> = triples(6)
        .into_iter()
        .map(|t| {
            let minor = [0, 1, 2].map(|r| [0, 1, 2].map(|s| u1[t[r]][s]));
            (t, det3(minor))
        })
        .collect();
    let total: f64 = prepared.iter().map(|(_, a)| a.norm_sqr()).sum();
    assert!((total - 1.0).abs() < 1e-12);

    let survivors: Vec<_> = prepared
        .into_iter()
        .filter(|(t, _)| {
            let mut seen = [false; 3];
            t.iter().all(|&arm| !std::mem::replace(&mut seen[splitter_of(arm)], true))
        })
        .collect();
    let keep: f64 = survivors.iter().map(|(_, a)| a.norm_sqr()).sum();
    let kept: Vec<_> = survivors.into_iter().map(|(t, a)| (t, a / keep.sqrt())).collect();

    let u2 = second_layer();
    let mut probabilities = [0.0; 8];
    for det in triples(DETECTORS) {
        if det[0] / 2 != 0 || det[1] / 2 != 1 || det[2] / 2 != 2 {
            // final-stage bunching: not a three-station coincidence
            let amp: Complex64 = kept
                .iter()
                .map(|(arms, a)| *a * det3([0, 1, 2].map(|r| [0, 1, 2].map(|s| u2[det[r]][arms[s]]))))
                .sum();
            assert!(amp.norm() < 1e-12, "post-selected state leaked to {det:?}");
            continue;
        }
        let amp: Complex64 = kept
            .iter()
            .map(|(arms, a)| *a * det3([0, 1, 2].map(|r| [0, 1, 2].map(|s| u2[det[r]][arms[s]]))))
            .sum();
        let bits = (det[0] % 2) << 2 | (det[1] % 2) << 1 | (det[2] % 2);
        probabilities[bits] = amp.norm_sqr();
    }
    OracleRun {
        keep_probability: keep,
        kept,
        probabilities,
    }
}

/// `(1/8)(1 + p sin θ)` for outcome bits as in [`OracleRun::probabilities`].
pub fn closed_form(theta: f64, bits: usize) -> f64 {
    let parity = if bits.count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    (1.0 + parity * theta.sin()) / 8.0
}
