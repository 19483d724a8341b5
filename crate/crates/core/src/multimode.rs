//! Brute-force truncated-Fock simulation of the split–truncate–recombine
//! pipeline.
//!
//! The input mode is spread over `N` modes by a DFT splitter, every mode is
//! projected onto `0..=d` photons (ideal per-mode qudit teleportation),
//! the inverse splitter recombines the modes and all modes but the first
//! are post-selected on vacuum. Nothing here uses the restricted weights,
//! so the result is an independent check of [`crate::teleport`].

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::teleport::{FockVector, SchemeParams, TeleportOutcome, NORM_TOLERANCE};

/// Largest tensor [`oracle_teleport`] will allocate.
pub const ORACLE_BUDGET: usize = 10_000_000;

const UNITARY_TOLERANCE: f64 = 1e-12;

/// Linear-optics mode transformation `a_j† → Σ_i M_ij a_i†`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMatrix {
    size: usize,
    entries: Vec<Complex64>,
}

impl ModeMatrix {
    /// Row-major `size × size` matrix; must be unitary.
    pub fn new(size: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != size * size {
            return Err(Error::DimensionMismatch {
                expected: size * size,
                found: entries.len(),
            });
        }
        let m = ModeMatrix { size, entries };
        if m.unitarity_defect() > UNITARY_TOLERANCE {
            return Err(Error::Domain("mode matrix is not unitary".into()));
        }
        Ok(m)
    }

    pub fn identity(size: usize) -> Self {
        let mut entries = vec![Complex64::zero(); size * size];
        for i in 0..size {
            entries[i * size + i] = Complex64::new(1.0, 0.0);
        }
        ModeMatrix { size, entries }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.size + col]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.size;
        let mut entries = vec![Complex64::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.get(i, j).conj();
            }
        }
        ModeMatrix { size: n, entries }
    }

    /// `max |(M†M − I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.size;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::zero();
                for k in 0..n {
                    acc += self.get(k, i).conj() * self.get(k, j);
                }
                if i == j {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }
}

/// `N`-point DFT matrix `ω_N^{jk}/√N`. Its first column is uniform, so a
/// coherent state in mode 0 leaves as `|α/√N⟩^{⊗N}`.
pub fn n_splitter(num_modes: usize) -> Result<ModeMatrix> {
    if num_modes == 0 {
        return Err(Error::Domain(
            "an N-splitter needs at least one mode".into(),
        ));
    }
    let n = num_modes;
    let scale = 1.0 / (n as f64).sqrt();
    let mut entries = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            let phase = 2.0 * PI * ((j * k) % n) as f64 / n as f64;
            entries.push(Complex64::from_polar(scale, phase));
        }
    }
    Ok(ModeMatrix { size: n, entries })
}

/// Dense amplitudes over occupation vectors with every entry at most `cap`.
///
/// Mode 0 is the most significant index digit.
#[derive(Debug, Clone, PartialEq)]
pub struct MultimodeState {
    num_modes: usize,
    cap: usize,
    amplitudes: Vec<Complex64>,
}

impl MultimodeState {
    pub fn vacuum(num_modes: usize, cap: usize) -> Result<Self> {
        let size = tensor_size(num_modes, cap)?;
        let mut amplitudes = vec![Complex64::zero(); size];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(MultimodeState {
            num_modes,
            cap,
            amplitudes,
        })
    }

    /// `input ⊗ |0⟩^{⊗(N−1)}` with `input` in mode 0.
    pub fn with_input(input: &FockVector, num_modes: usize, cap: usize) -> Result<Self> {
        if input.cutoff() > cap {
            return Err(Error::CapExceeded {
                cap,
                photons: input.cutoff(),
            });
        }
        let mut state = Self::vacuum(num_modes, cap)?;
        state.amplitudes[0] = Complex64::zero();
        let mut occ = vec![0; num_modes];
        for (k, c) in input.amplitudes().iter().enumerate() {
            occ[0] = k;
            let idx = state.index_of(&occ);
            state.amplitudes[idx] = *c;
        }
        Ok(state)
    }

    pub fn from_amplitudes(
        num_modes: usize,
        cap: usize,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self> {
        let size = tensor_size(num_modes, cap)?;
        if amplitudes.len() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                found: amplitudes.len(),
            });
        }
        Ok(MultimodeState {
            num_modes,
            cap,
            amplitudes,
        })
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, occupation: &[usize]) -> Complex64 {
        self.amplitudes[self.index_of(occupation)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn index_of(&self, occupation: &[usize]) -> usize {
        debug_assert_eq!(occupation.len(), self.num_modes);
        occupation
            .iter()
            .fold(0, |acc, &n| acc * (self.cap + 1) + n)
    }

    pub fn occupation(&self, mut index: usize) -> Vec<usize> {
        let base = self.cap + 1;
        let mut occ = vec![0; self.num_modes];
        for slot in occ.iter_mut().rev() {
            *slot = index % base;
            index /= base;
        }
        occ
    }

    /// Squared norm carried by each total-photon sector.
    pub fn sector_weights(&self) -> Vec<f64> {
        let mut weights = vec![0.0; self.num_modes * self.cap + 1];
        for (idx, c) in self.amplitudes.iter().enumerate() {
            let total: usize = self.occupation(idx).iter().sum();
            weights[total] += c.norm_sqr();
        }
        weights
    }
}

fn tensor_size(num_modes: usize, cap: usize) -> Result<usize> {
    if num_modes == 0 {
        return Err(Error::Domain(
            "a multimode state needs at least one mode".into(),
        ));
    }
    let size = (cap + 1)
        .checked_pow(num_modes as u32)
        .filter(|&s| s <= ORACLE_BUDGET)
        .ok_or(Error::BudgetExceeded {
            size: (cap as f64 + 1.0)
                .powi(num_modes as i32)
                .min(usize::MAX as f64) as usize,
            budget: ORACLE_BUDGET,
        })?;
    Ok(size)
}

fn sqrt_factorials(max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = 1.0f64;
    out.push(1.0);
    for i in 1..=max {
        acc *= i as f64;
        out.push(acc.sqrt());
    }
    out
}

/// Lift a mode matrix to the truncated Fock space.
///
/// Each basis state `Π_j (a_j†)^{n_j}/√(n_j!) |0⟩` is expanded after the
/// substitution `a_j† → Σ_i M_ij a_i†`. Total photon number is conserved,
/// so the map is exact as long as no nonzero sector holds more photons than
/// the cap; otherwise [`Error::CapExceeded`] is returned.
pub fn apply_mode_unitary(state: &MultimodeState, matrix: &ModeMatrix) -> Result<MultimodeState> {
    let n = state.num_modes;
    if matrix.size() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: matrix.size(),
        });
    }
    let cap = state.cap;
    let sqrt_fact = sqrt_factorials(cap);
    let strides: Vec<usize> = (0..n).map(|i| (cap + 1).pow((n - 1 - i) as u32)).collect();
    let mut out = vec![Complex64::zero(); state.amplitudes.len()];

    for (idx, &amp) in state.amplitudes.iter().enumerate() {
        if amp == Complex64::zero() {
            continue;
        }
        let occ = state.occupation(idx);
        let total: usize = occ.iter().sum();
        if total > cap {
            return Err(Error::CapExceeded {
                cap,
                photons: total,
            });
        }
        // Monomial coefficients keyed by output tensor index.
        let mut poly: BTreeMap<usize, Complex64> = BTreeMap::new();
        poly.insert(0, Complex64::new(1.0, 0.0));
        for (j, &nj) in occ.iter().enumerate() {
            for _ in 0..nj {
                let mut next = BTreeMap::new();
                for (&key, &coef) in &poly {
                    for (i, stride) in strides.iter().enumerate() {
                        let m = matrix.get(i, j);
                        if m == Complex64::zero() {
                            continue;
                        }
                        *next.entry(key + stride).or_insert_with(Complex64::zero) += coef * m;
                    }
                }
                poly = next;
            }
        }
        let norm_in: f64 = occ.iter().map(|&k| sqrt_fact[k]).product();
        let scale = amp / norm_in;
        for (key, coef) in poly {
            let out_occ = state.occupation(key);
            let norm_out: f64 = out_occ.iter().map(|&k| sqrt_fact[k]).product();
            out[key] += scale * coef * norm_out;
        }
    }
    Ok(MultimodeState {
        num_modes: n,
        cap,
        amplitudes: out,
    })
}

/// Zero every amplitude with more than `d` photons in `mode`; returns the
/// unnormalized remainder and the squared norm that was removed.
pub fn truncate_mode(
    state: &MultimodeState,
    mode: usize,
    d: usize,
) -> Result<(MultimodeState, f64)> {
    if mode >= state.num_modes {
        return Err(Error::InvalidSystem {
            index: mode,
            systems: state.num_modes,
        });
    }
    let mut out = state.clone();
    let mut discarded = 0.0;
    for (idx, amp) in out.amplitudes.iter_mut().enumerate() {
        if state.occupation(idx)[mode] > d {
            discarded += amp.norm_sqr();
            *amp = Complex64::zero();
        }
    }
    Ok((out, discarded))
}

/// Project every mode except `kept_mode` onto vacuum.
///
/// Returns the renormalized state of `kept_mode` and the squared norm of the
/// projection (the post-selection probability when `state` is normalized).
pub fn vacuum_postselect(state: &MultimodeState, kept_mode: usize) -> Result<(FockVector, f64)> {
    if kept_mode >= state.num_modes {
        return Err(Error::InvalidSystem {
            index: kept_mode,
            systems: state.num_modes,
        });
    }
    let mut occ = vec![0; state.num_modes];
    let amplitudes: Vec<Complex64> = (0..=state.cap)
        .map(|k| {
            occ[kept_mode] = k;
            state.amplitude(&occ)
        })
        .collect();
    let probability: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
    if probability <= 0.0 {
        return Err(Error::ZeroProbability);
    }
    let scale = probability.sqrt();
    let kept = FockVector::new(amplitudes.into_iter().map(|c| c / scale).collect())?;
    Ok((kept, probability))
}

/// Run the full pipeline on a normalized input by brute force.
pub fn oracle_teleport(input: &FockVector, params: SchemeParams) -> Result<TeleportOutcome> {
    if !input.is_normalized(NORM_TOLERANCE) {
        return Err(Error::NotNormalized(input.norm_sqr()));
    }
    let n = params.num_modes();
    let cap = input.cutoff();
    let splitter = n_splitter(n)?;

    let mut state = MultimodeState::with_input(input, n, cap)?;
    state = apply_mode_unitary(&state, &splitter)?;
    for mode in 0..n {
        state = truncate_mode(&state, mode, params.photon_cutoff())?.0;
    }
    state = apply_mode_unitary(&state, &splitter.adjoint())?;
    match vacuum_postselect(&state, 0) {
        Ok((kept, success_probability)) => Ok(TeleportOutcome {
            state: kept,
            success_probability,
        }),
        Err(Error::ZeroProbability) => Err(Error::VanishingState),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::teleport::{coherent_fock, state_fidelity};
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn splitter_shapes() {
        let s = 0.5f64.sqrt();
        let bs = n_splitter(2).unwrap();
        for (got, want) in [
            (bs.get(0, 0), s),
            (bs.get(0, 1), s),
            (bs.get(1, 0), s),
            (bs.get(1, 1), -s),
        ] {
            assert_abs_diff_eq!(got.re, want, epsilon = 1e-15);
            assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-15);
        }
        for n in 1..=6 {
            let m = n_splitter(n).unwrap();
            assert!(m.unitarity_defect() < 1e-12);
            for j in 0..n {
                assert_abs_diff_eq!(m.get(j, 0).re, 1.0 / (n as f64).sqrt(), epsilon = 1e-15);
            }
        }
        assert!(n_splitter(0).is_err());
        assert!(ModeMatrix::new(2, vec![c(1.0), c(1.0), c(0.0), c(1.0)]).is_err());
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let input = FockVector::from_real(&[0.6, 0.0, 0.8]).unwrap();
        let state = MultimodeState::with_input(&input, 3, 2).unwrap();
        let out = apply_mode_unitary(&state, &ModeMatrix::identity(3)).unwrap();
        assert_eq!(out, state);
    }

    #[test]
    fn single_photon_follows_column() {
        for n in 1..=5 {
            let state = MultimodeState::with_input(&FockVector::number_state(1, 1), n, 1).unwrap();
            let m = n_splitter(n).unwrap();
            let out = apply_mode_unitary(&state, &m).unwrap();
            for i in 0..n {
                let mut occ = vec![0; n];
                occ[i] = 1;
                assert_abs_diff_eq!(
                    (out.amplitude(&occ) - m.get(i, 0)).norm(),
                    0.0,
                    epsilon = 1e-15
                );
            }
            if n >= 2 {
                let (kept, p) = vacuum_postselect(&out, 0).unwrap();
                assert_abs_diff_eq!(p, 1.0 / n as f64, epsilon = 1e-14);
                assert_abs_diff_eq!(kept.amplitude(1).norm(), 1.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn norm_and_sectors_preserved() {
        let input = FockVector::from_real(&[0.5, 0.5, 0.5, 0.5]).unwrap();
        let state = MultimodeState::with_input(&input, 3, 3).unwrap();
        let out = apply_mode_unitary(&state, &n_splitter(3).unwrap()).unwrap();
        assert_abs_diff_eq!(out.norm_sqr(), 1.0, epsilon = 1e-12);
        for (a, b) in state.sector_weights().iter().zip(out.sector_weights()) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        let back = apply_mode_unitary(&out, &n_splitter(3).unwrap().adjoint()).unwrap();
        for (a, b) in back.amplitudes().iter().zip(state.amplitudes()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn cap_overflow_is_reported() {
        let two =
            MultimodeState::from_amplitudes(2, 1, vec![c(0.0), c(0.0), c(0.0), c(1.0)]).unwrap();
        assert!(matches!(
            apply_mode_unitary(&two, &n_splitter(2).unwrap()),
            Err(Error::CapExceeded { cap: 1, photons: 2 })
        ));
    }

    #[test]
    fn coherent_input_splits_into_product() {
        let alpha = Complex64::new(0.7, -0.4);
        let cap = 14;
        let n = 3;
        let input = coherent_fock(alpha, cap).unwrap();
        let split = apply_mode_unitary(
            &MultimodeState::with_input(&input, n, cap).unwrap(),
            &n_splitter(n).unwrap(),
        )
        .unwrap();
        let part = alpha / (n as f64).sqrt();
        let single: Vec<Complex64> = (0..=cap)
            .map(|k| {
                let mut fact = 1.0;
                for i in 1..=k {
                    fact *= i as f64;
                }
                (-part.norm_sqr() / 2.0).exp() * part.powu(k as u32) / fact.sqrt()
            })
            .collect();
        let mut worst: f64 = 0.0;
        for idx in 0..split.amplitudes().len() {
            let occ = split.occupation(idx);
            if occ.iter().sum::<usize>() > cap {
                continue;
            }
            let expected: Complex64 = occ.iter().map(|&k| single[k]).product();
            worst = worst.max((split.amplitudes()[idx] - expected).norm());
        }
        assert!(worst < 1e-10, "worst deviation {worst:e}");

        // Per-mode truncation keeps exactly the product terms with r_j ≤ d.
        let d = 2;
        let mut truncated = split.clone();
        for mode in 0..n {
            truncated = truncate_mode(&truncated, mode, d).unwrap().0;
        }
        for idx in 0..truncated.amplitudes().len() {
            let occ = truncated.occupation(idx);
            let got = truncated.amplitudes()[idx];
            if occ.iter().any(|&r| r > d) {
                assert_eq!(got, Complex64::zero());
            } else if occ.iter().sum::<usize>() <= cap {
                let expected: Complex64 = occ.iter().map(|&k| single[k]).product();
                assert!((got - expected).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn truncate_examples() {
        let input = FockVector::from_real(&[0.6, 0.0, 0.8]).unwrap();
        let state = MultimodeState::with_input(&input, 2, 2).unwrap();
        let (same, lost) = truncate_mode(&state, 0, 2).unwrap();
        assert_eq!((same, lost), (state.clone(), 0.0));

        let two = MultimodeState::with_input(&FockVector::number_state(2, 2), 1, 2).unwrap();
        let (zero, lost) = truncate_mode(&two, 0, 1).unwrap();
        assert_eq!(zero.norm_sqr(), 0.0);
        assert_eq!(lost, 1.0);
        assert!(truncate_mode(&two, 1, 1).is_err());
    }

    #[test]
    fn postselect_examples() {
        let input = FockVector::from_real(&[0.6, 0.8]).unwrap();
        let state = MultimodeState::with_input(&input, 3, 1).unwrap();
        let (kept, p) = vacuum_postselect(&state, 0).unwrap();
        assert_eq!(p, 1.0);
        assert_abs_diff_eq!(state_fidelity(&kept, &input), 1.0, epsilon = 1e-15);

        let zero =
            MultimodeState::from_amplitudes(2, 1, vec![c(0.0), c(0.0), c(0.0), c(1.0)]).unwrap();
        assert_eq!(vacuum_postselect(&zero, 0), Err(Error::ZeroProbability));
    }

    #[test]
    fn oracle_examples() {
        let one = FockVector::number_state(1, 1);
        let out = oracle_teleport(&one, SchemeParams::new(3, 1).unwrap()).unwrap();
        assert_abs_diff_eq!(out.success_probability, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(state_fidelity(&out.state, &one), 1.0, epsilon = 1e-14);

        let s = 0.5f64.sqrt();
        let input = FockVector::from_real(&[s, 0.0, s]).unwrap();
        let out = oracle_teleport(&input, SchemeParams::new(2, 1).unwrap()).unwrap();
        assert_abs_diff_eq!(out.success_probability, (1.0 + 0.25) / 2.0, epsilon = 1e-14);
        let ratio = out.state.amplitude(2) / out.state.amplitude(0);
        assert_abs_diff_eq!(ratio.re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(ratio.im, 0.0, epsilon = 1e-14);

        let vac = FockVector::number_state(0, 0);
        let out = oracle_teleport(&vac, SchemeParams::new(4, 2).unwrap()).unwrap();
        assert_abs_diff_eq!(out.success_probability, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn oracle_budget_and_vanishing() {
        let big = FockVector::number_state(30, 30);
        assert!(matches!(
            oracle_teleport(&big, SchemeParams::new(6, 1).unwrap()),
            Err(Error::BudgetExceeded { .. })
        ));
        let high = FockVector::number_state(3, 3);
        assert_eq!(
            oracle_teleport(&high, SchemeParams::new(2, 1).unwrap()),
            Err(Error::VanishingState)
        );
    }
}
