//! Exit criteria for the whole workspace, one pass/fail line each.
//!
//! Run with `cargo test -p fermi-ghz-cli --test acceptance -- --nocapture`.

#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use fermi_ghz::amplitude::{ModeId, Sign, StateVector};
use fermi_ghz::hv_models::{
    compare_to_quantum, exchangeability_report, run_asymmetric, verify_theorem, AsymmetricConfig,
    ParityTarget,
};
use fermi_ghz::measurement::{outcome_distribution, parity_expectation, Outcome, OutcomeDistribution};
use fermi_ghz::optics::{simulate, CircuitConfig};
use num_complex::Complex64;

const EXACT: f64 = 1e-12;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn final_distribution(cfg: &CircuitConfig) -> OutcomeDistribution {
    outcome_distribution(&simulate(cfg).final_state).unwrap()
}

fn exact_support(dist: &OutcomeDistribution, parity: Sign) -> Result<(), String> {
    for (o, p) in dist.iter() {
        let want = if o.parity() == parity { 0.25 } else { 0.0 };
        check((p - want).abs() <= EXACT, format!("P({o}) = {p}, want {want}"))?;
    }
    Ok(())
}

fn ac1_even_state() -> Verdict {
    let start = Instant::now();
    let cfg = CircuitConfig::new(PI / 3.0, PI / 3.0, PI / 3.0);
    check((cfg.theta() - PI / 2.0).abs() <= EXACT, "theta is not π/2")?;
    let dist = final_distribution(&cfg);
    exact_support(&dist, Sign::Plus)?;
    for s in ["+++", "+--", "-+-", "--+"] {
        check((dist.probability(&s.parse().unwrap()) - 0.25).abs() <= EXACT, s)?;
    }
    let parity = parity_expectation(&dist);
    check((parity - 1.0).abs() <= EXACT, format!("parity {parity}"))?;
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("parity {parity:+.15}, {elapsed:?}"))
}

fn ac2_odd_state() -> Verdict {
    let start = Instant::now();
    let cfg = CircuitConfig::new(2.0 * PI / 3.0, 2.0 * PI / 3.0, 2.0 * PI / 3.0);
    check((cfg.theta() - 1.5 * PI).abs() <= EXACT, "theta is not 3π/2")?;
    let dist = final_distribution(&cfg);
    exact_support(&dist, Sign::Minus)?;
    let parity = parity_expectation(&dist);
    check((parity + 1.0).abs() <= EXACT, format!("parity {parity}"))?;
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("parity {parity:+.15}, {elapsed:?}"))
}

fn ac3_postselection_grid() -> Verdict {
    let grid: Vec<f64> = (0..5).map(|k| TAU * k as f64 / 5.0).collect();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut worst_keep = 0.0f64;
    let mut worst_overlap = 0.0f64;
    for &a in &grid {
        for &b in &grid {
            for &g in &grid {
                let cfg = CircuitConfig::new(a, b, g);
                let run = simulate(&cfg);
                let mut expected = StateVector::new(3);
                expected.add_modes(&[ModeId::A, ModeId::B, ModeId::C], Complex64::new(h, 0.0)).unwrap();
                expected
                    .add_modes(&[ModeId::APrime, ModeId::BPrime, ModeId::CPrime], Complex64::from_polar(h, cfg.theta()))
                    .unwrap();
                worst_keep = worst_keep.max((run.keep_probability - 0.25).abs());
                worst_overlap = worst_overlap.max((run.post_selected.overlap_magnitude(&expected) - 1.0).abs());
            }
        }
    }
    check(worst_keep <= EXACT, format!("keep probability off by {worst_keep:e}"))?;
    check(worst_overlap <= EXACT, format!("overlap off by {worst_overlap:e}"))?;
    Ok(format!("125 configs, max |keep-0.25| {worst_keep:.1e}, max |overlap-1| {worst_overlap:.1e}"))
}

fn ac4_sweep_law() -> Verdict {
    let mut worst = 0.0f64;
    for k in 0..16 {
        let theta = TAU * k as f64 / 16.0;
        let cfg = CircuitConfig::from_theta(theta);
        let reference = oracle::run(cfg.alpha, cfg.beta, cfg.gamma);
        let oracle_parity: f64 = (0..8)
            .map(|b| reference.probabilities[b] * if (b as u32).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 })
            .sum();
        let dist = final_distribution(&cfg);
        let parity = parity_expectation(&dist);
        check((parity - theta.sin()).abs() <= EXACT, format!("θ={theta}: parity {parity} vs sin {}", theta.sin()))?;
        check((parity - oracle_parity).abs() <= EXACT, format!("θ={theta}: oracle parity {oracle_parity}"))?;
        for (o, p) in dist.iter() {
            let b = o.signs().iter().fold(0, |acc, s| acc << 1 | usize::from(s.is_minus()));
            check((p - reference.probabilities[b]).abs() <= EXACT, format!("θ={theta}: P({o})"))?;
        }
        worst = worst.max((parity - theta.sin()).abs());
    }
    Ok(format!("16 grid points, max |parity - sin θ| {worst:.1e}, oracle agrees"))
}

fn ac5_theorem() -> Verdict {
    let start = Instant::now();
    let mut scanned = 0u64;
    for parties in 2..=4usize {
        for domain in 1..=4usize {
            for target in [ParityTarget::EVEN, ParityTarget::ODD] {
                let r = verify_theorem(&vec![domain; parties], target).map_err(|e| e.to_string())?;
                check(r.all_constant && r.counterexample.is_none(), format!("N={parties} |Λ|={domain}: counterexample"))?;
                check(
                    r.satisfying_count == 1 << (parties - 1),
                    format!("N={parties} |Λ|={domain}: {} satisfying", r.satisfying_count),
                )?;
                scanned += r.total_count;
            }
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(30), format!("took {elapsed:?}"))?;
    Ok(format!("24 cases, {scanned} strategies scanned, {elapsed:?}"))
}

fn ac6_asymmetric() -> Verdict {
    const N: usize = 100_000;
    let mut notes = Vec::new();
    for (target, seed) in [(ParityTarget::EVEN, 20_240_601u64), (ParityTarget::ODD, 20_240_602)] {
        let cfg = AsymmetricConfig::fair_coin(target);
        let run = run_asymmetric(&cfg, seed, N);
        check(
            run.outcomes.iter().all(|o| o.parity() == target.value()),
            format!("q={}: parity violated", target.q()),
        )?;
        let phase = (target.theta() + PI / 2.0) / 3.0;
        let div = compare_to_quantum(&cfg, &CircuitConfig::new(phase, phase, phase), N, seed).map_err(|e| e.to_string())?;
        check(div.tv_distance < 0.01, format!("q={}: TV {}", target.q(), div.tv_distance))?;
        let ex = exchangeability_report(&run.outcomes, target).map_err(|e| e.to_string())?;
        check(ex.all_pass, format!("q={}: exchangeability {ex:?}", target.q()))?;
        notes.push(format!("q={} TV {:.4}", target.q(), div.tv_distance));
    }
    Ok(notes.join(", "))
}

fn ac7_no_signalling() -> Verdict {
    let mut worst = 0.0f64;
    for k in 0..16 {
        let dist = final_distribution(&CircuitConfig::from_theta(TAU * k as f64 / 16.0));
        for station in 0..3 {
            worst = worst.max((dist.marginal_plus(station) - 0.5).abs());
        }
    }
    check(worst <= EXACT, format!("marginal off by {worst:e}"))?;
    Ok(format!("max |P(R=+1) - 0.5| {worst:.1e}"))
}

fn run_cli(out: &Path, args: &[&str]) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_fermi-ghz"))
        .arg("--out")
        .arg(out)
        .args(args)
        .status()
        .map_err(|e| e.to_string())?;
    check(status.success(), format!("{args:?} exited with {status}"))
}

/// Directory contents with the manifest's wall-clock field removed.
fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            let name = e.file_name().into_string().unwrap();
            let mut bytes = fs::read(e.path()).unwrap();
            if name == fermi_ghz_cli::MANIFEST_FILE {
                let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
                v.as_object_mut().unwrap().remove("duration_ms");
                bytes = serde_json::to_vec(&v).unwrap();
            }
            (name, bytes)
        })
        .collect();
    files.sort();
    files
}

fn ac8_determinism() -> Verdict {
    let commands: [&[&str]; 5] = [
        &["simulate", "--alpha", "0.3", "--beta", "-1.2", "--gamma", "2.5"],
        &["sweep", "--steps", "17"],
        &["hv-sym", "--parties", "3", "--domain-size", "3", "--parity", "-1"],
        &["hv-asym", "--q", "0", "--n", "20000", "--seed", "77"],
        &["hv-asym", "--q", "1", "--n", "5000", "--seed", "5", "--mode", "tables", "--table-i", "+-+", "--table-j", "--+"],
    ];
    let mut compared = 0;
    for args in commands {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        run_cli(a.path(), args)?;
        run_cli(b.path(), args)?;
        let (sa, sb) = (snapshot(a.path()), snapshot(b.path()));
        check(sa.len() > 1, format!("{args:?}: no files"))?;
        for ((na, ba), (nb, bb)) in sa.iter().zip(&sb) {
            check(na == nb && ba == bb, format!("{args:?}: {na} differs"))?;
            compared += 1;
        }
    }
    Ok(format!("{compared} files byte-identical across repeated runs"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("AC1 even-parity final state", ac1_even_state),
        ("AC2 odd-parity final state", ac2_odd_state),
        ("AC3 post-selection on 5x5x5 grid", ac3_postselection_grid),
        ("AC4 parity = sin(theta) vs oracle", ac4_sweep_law),
        ("AC5 symmetric-model theorem", ac5_theorem),
        ("AC6 asymmetric model", ac6_asymmetric),
        ("AC7 no-signalling marginals", ac7_no_signalling),
        ("AC8 deterministic outputs", ac8_determinism),
    ];
    let mut failed = Vec::new();
    for (name, criterion) in criteria {
        match criterion() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(why) => {
                println!("[FAIL] {name}: {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn outcome_strings_used_above_are_even() {
    for s in ["+++", "+--", "-+-", "--+"] {
        assert_eq!(s.parse::<Outcome>().unwrap().parity(), Sign::Plus);
    }
}
