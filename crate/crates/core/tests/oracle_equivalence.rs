use num_complex::Complex64;
use proptest::prelude::*;
use qudit_teleport::multimode::oracle_teleport;
use qudit_teleport::teleport::{state_fidelity, teleport_state};
use qudit_teleport::{FockVector, SchemeParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_input(rng: &mut impl Rng, cutoff: usize) -> FockVector {
    let raw: Vec<Complex64> = (0..=cutoff)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    FockVector::new(raw).unwrap().normalized().unwrap()
}

#[test]
fn closed_form_matches_brute_force_on_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_overlap: f64 = 0.0;
    let mut worst_psuc: f64 = 0.0;
    for n in 1..=4 {
        for d in 1..=3 {
            let params = SchemeParams::new(n, d).unwrap();
            for _ in 0..50 {
                let cutoff = rng.gen_range(0..=6);
                let input = random_input(&mut rng, cutoff);
                let closed = teleport_state(&input, params).unwrap();
                let brute = oracle_teleport(&input, params).unwrap();
                worst_overlap =
                    worst_overlap.max(1.0 - state_fidelity(&closed.state, &brute.state));
                worst_psuc =
                    worst_psuc.max((closed.success_probability - brute.success_probability).abs());
            }
        }
    }
    assert!(worst_overlap <= 1e-10, "1 - overlap = {worst_overlap:e}");
    assert!(worst_psuc <= 1e-10, "|ΔP_suc| = {worst_psuc:e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn outcome_is_normalized_with_valid_probability(
        n in 1usize..8,
        d in 1usize..4,
        amps in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12),
    ) {
        let raw: Vec<Complex64> = amps.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        prop_assume!(raw.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-6);
        let input = FockVector::new(raw).unwrap().normalized().unwrap();
        let params = SchemeParams::new(n, d).unwrap();
        if let Ok(out) = teleport_state(&input, params) {
            prop_assert!(out.success_probability > 0.0 && out.success_probability <= 1.0 + 1e-12);
            prop_assert!(out.state.is_normalized(1e-12));
        }
    }
}
