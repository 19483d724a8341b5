//! Self-check suites run by `verify`.

use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use qudit_teleport::combinatorics::{
    enumerate_compositions, factorial, restricted_weight, restricted_weights,
};
use qudit_teleport::multimode::oracle_teleport;
use qudit_teleport::noise::{completeness_click_limit, completeness_defect, DetectorModel};
use qudit_teleport::qudit::{
    depolarized_fidelity, haar_random_ket, maximally_entangled, singlet_fraction_fidelity,
    teleport_qudit_branches, DepolarizedResource,
};
use qudit_teleport::teleport::{
    fock_gain, gain_table, state_fidelity, teleport_epr, teleport_with_gains,
};
use qudit_teleport::{FockVector, SchemeParams, SqueezingParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    /// Added to every closed-form gain before the oracle comparison.
    pub gain_perturbation: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            trials: 50,
            gain_perturbation: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<22} max|Δ| = {:.3e}  tol = {:.0e}  {}",
            self.name,
            self.max_deviation,
            self.tolerance,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

fn bool_dev(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        1.0
    }
}

/// Exact identities; the deviation counts failed checks.
fn combinatorics() -> SuiteReport {
    let mut failures = 0usize;
    for n in 1..=20usize {
        for k in 0..=n {
            let binom = factorial(n) / (factorial(k) * factorial(n - k));
            failures += (restricted_weight(n, k, 1).unwrap().value
                != BigRational::from_integer(binom)) as usize;
        }
    }
    for n in 1..=8usize {
        for d in 1..=5usize {
            for k in 0..=d {
                let expected =
                    BigRational::new(num_bigint::BigInt::from(n).pow(k as u32), factorial(k));
                failures += (restricted_weight(n, k, d).unwrap().value != expected) as usize;
            }
        }
    }
    for n in 1..=5 {
        for d in 1..=4 {
            let row = restricted_weights(n, 12, d).unwrap();
            for (k, w) in row.iter().enumerate() {
                let brute = enumerate_compositions(n, k, d)
                    .unwrap()
                    .map(|c| c.inverse_factorial_product())
                    .fold(BigRational::from_integer(0.into()), |a, b| a + b);
                failures += (*w != brute) as usize;
            }
        }
    }
    SuiteReport {
        name: "combinatorics",
        max_deviation: failures as f64,
        tolerance: 0.0,
    }
}

fn fock_gain_laws() -> SuiteReport {
    let mut worst: f64 = 0.0;
    for n in 1..=25 {
        for d in 1..=5 {
            let p = SchemeParams::new(n, d).unwrap();
            for k in 0..=d {
                worst = worst.max((fock_gain(k, p) - 1.0).abs());
            }
        }
        let p = SchemeParams::new(n, 1).unwrap();
        worst = worst.max((fock_gain(2, p) - (n as f64 - 1.0) / n as f64).abs());
    }
    let a = gain_table(SchemeParams::new(5, 4).unwrap(), 20);
    let b = gain_table(SchemeParams::new(10, 2).unwrap(), 20);
    let c = gain_table(SchemeParams::new(20, 1).unwrap(), 20);
    for k in 0..=20 {
        worst = worst
            .max((b[k] - a[k]).max(0.0))
            .max((c[k] - b[k]).max(0.0));
    }
    SuiteReport {
        name: "fock-gain-laws",
        max_deviation: worst,
        tolerance: 0.0,
    }
}

fn random_fock(rng: &mut impl Rng, cutoff: usize) -> FockVector {
    let raw = (0..=cutoff)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    FockVector::new(raw).unwrap().normalized().unwrap()
}

fn oracle_equivalence(cfg: &VerifyConfig) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst: f64 = 0.0;
    for n in 1..=4 {
        for d in 1..=3 {
            let params = SchemeParams::new(n, d).unwrap();
            for _ in 0..cfg.trials {
                let cutoff = rng.gen_range(0..=6);
                let input = random_fock(&mut rng, cutoff);
                let mut gains = gain_table(params, cutoff.min(params.support()));
                for g in gains.iter_mut() {
                    *g += cfg.gain_perturbation;
                }
                let closed = teleport_with_gains(&input, &gains);
                let brute = oracle_teleport(&input, params);
                let dev = match (closed, brute) {
                    (Ok(c), Ok(b)) => (1.0 - state_fidelity(&c.state, &b.state))
                        .abs()
                        .max((c.success_probability - b.success_probability).abs()),
                    (Err(_), Err(_)) => 0.0,
                    _ => 1.0,
                };
                worst = worst.max(dev);
            }
        }
    }
    SuiteReport {
        name: "oracle-equivalence",
        max_deviation: worst,
        tolerance: 1e-10,
    }
}

fn qudit_teleportation(cfg: &VerifyConfig) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut worst: f64 = 0.0;
    for dim in [2, 3, 4, 5, 8] {
        let resource = maximally_entangled(dim).unwrap();
        let uniform = 1.0 / (dim * dim) as f64;
        for _ in 0..cfg.trials {
            let phi = haar_random_ket(dim, &mut rng).unwrap();
            let branches = teleport_qudit_branches(&phi, &resource).unwrap();
            worst = worst.max(bool_dev(branches.len() == dim * dim));
            for b in branches {
                worst = worst
                    .max(1.0 - b.output.overlap(&phi))
                    .max((b.outcome.probability - uniform).abs());
            }
        }
    }
    SuiteReport {
        name: "qudit-teleportation",
        max_deviation: worst,
        tolerance: 1e-12,
    }
}

fn depolarizing_identity() -> SuiteReport {
    let mut worst: f64 = 0.0;
    for dim in [2, 3, 4, 8] {
        for i in 0..=20 {
            let p = i as f64 / 20.0;
            let r = DepolarizedResource::new(p, dim).unwrap();
            let via_fraction = singlet_fraction_fidelity(r.singlet_fraction(), dim).unwrap();
            worst = worst.max((via_fraction - depolarized_fidelity(p, dim)).abs());
        }
    }
    SuiteReport {
        name: "singlet-fraction",
        max_deviation: worst,
        tolerance: 1e-12,
    }
}

fn povm_completeness() -> SuiteReport {
    let mut worst: f64 = 0.0;
    for eta in [0.3, 0.7, 1.0] {
        for nu in [0.0, 0.05] {
            let det = DetectorModel::new(eta, nu).unwrap();
            let limit = completeness_click_limit(det, 15, 1e-10);
            worst = worst.max(completeness_defect(det, 15, limit));
        }
    }
    SuiteReport {
        name: "povm-completeness",
        max_deviation: worst,
        tolerance: 1e-8,
    }
}

fn epr_monotonicity() -> SuiteReport {
    let squeeze = SqueezingParams::from_vs(10.0).unwrap();
    let mut worst: f64 = 0.0;
    for d in 1..=3 {
        let mut prev = 0.0;
        for n in 1..=25 {
            let f = teleport_epr(squeeze, SchemeParams::new(n, d).unwrap()).fidelity;
            worst = worst.max(prev - f);
            prev = f;
        }
    }
    SuiteReport {
        name: "epr-monotonicity",
        max_deviation: worst.max(0.0),
        tolerance: 0.0,
    }
}

pub fn run(cfg: &VerifyConfig) -> Vec<SuiteReport> {
    vec![
        combinatorics(),
        fock_gain_laws(),
        oracle_equivalence(cfg),
        qudit_teleportation(cfg),
        depolarizing_identity(),
        povm_completeness(),
        epr_monotonicity(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_run_passes() {
        let reports = run(&VerifyConfig {
            trials: 5,
            ..VerifyConfig::default()
        });
        assert_eq!(reports.len(), 7);
        for r in &reports {
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn perturbed_gains_are_caught() {
        let report = oracle_equivalence(&VerifyConfig {
            trials: 5,
            gain_perturbation: 1e-6,
            ..VerifyConfig::default()
        });
        assert!(!report.passed(), "{report}");
        assert!(report.max_deviation > 1e-10);
    }
}
