//! Closed-form teleportation through `N` split modes truncated at `d` photons.
//!
//! A Fock state `|k⟩` leaves the protocol as `g_k |k⟩` with the real gain
//! `g_k = {N brace k}_d · k! / N^k`. Gains are `1` for `k ≤ d`, decrease
//! beyond that, and vanish for `k > N·d`. An arbitrary input
//! `Σ c_k |k⟩` is mapped to `Σ c_k g_k |k⟩ / √P_suc`, where
//! `P_suc = Σ |c_k|² g_k²` is the probability of finding vacuum in every
//! auxiliary mode after recombination.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::combinatorics::{factorial, ln_factorial, restricted_weights, restricted_weights_log};
use crate::error::{Error, Result};

/// Inputs must be normalized to this tolerance.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Maximum discarded tail mass accepted by [`coherent_fock`].
pub const COHERENT_TAIL_BOUND: f64 = 1e-12;

/// Gains are evaluated with exact rationals while `N·d` stays within this
/// budget and in the log domain beyond it.
pub const EXACT_GAIN_BUDGET: usize = 60;

/// Single-mode pure state over photon numbers `0..=cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amplitudes: Vec<Complex64>,
}

impl FockVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Domain(
                "a Fock vector needs at least one amplitude".into(),
            ));
        }
        Ok(FockVector { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// The number state `|k⟩` padded with zeros up to `cutoff`.
    pub fn number_state(k: usize, cutoff: usize) -> Self {
        let mut amplitudes = vec![Complex64::zero(); cutoff.max(k) + 1];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        FockVector { amplitudes }
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, k: usize) -> Complex64 {
        self.amplitudes.get(k).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::VanishingState);
        }
        Ok(FockVector {
            amplitudes: self.amplitudes.iter().map(|c| c / norm).collect(),
        })
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }
}

/// Number of split modes `N` and the per-mode photon cutoff `d`.
///
/// `d = 1` is the qubit scheme; each mode then lives in a space of
/// dimension `d + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SchemeParams {
    num_modes: usize,
    photon_cutoff: usize,
}

impl SchemeParams {
    pub fn new(num_modes: usize, photon_cutoff: usize) -> Result<Self> {
        if num_modes == 0 {
            return Err(Error::Domain("number of modes must be at least 1".into()));
        }
        if photon_cutoff == 0 {
            return Err(Error::Domain("photon cutoff must be at least 1".into()));
        }
        Ok(SchemeParams {
            num_modes,
            photon_cutoff,
        })
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn photon_cutoff(&self) -> usize {
        self.photon_cutoff
    }

    /// Largest photon number that survives, `N·d`.
    pub fn support(&self) -> usize {
        self.num_modes * self.photon_cutoff
    }
}

/// Two-mode squeezing in its three equivalent parametrizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingParams {
    pub r: f64,
    pub chi: f64,
    pub v_s: f64,
}

impl SqueezingParams {
    pub fn from_chi(chi: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&chi) {
            return Err(Error::Domain(format!("chi = {chi} must lie in [0, 1)")));
        }
        Ok(SqueezingParams {
            r: chi.atanh(),
            chi,
            v_s: (1.0 + chi) / (1.0 - chi),
        })
    }

    pub fn from_vs(v_s: f64) -> Result<Self> {
        if !(v_s.is_finite() && v_s >= 1.0) {
            return Err(Error::Domain(format!("V_s = {v_s} must be finite and ≥ 1")));
        }
        let chi = (v_s - 1.0) / (v_s + 1.0);
        Ok(SqueezingParams {
            r: chi.atanh(),
            chi,
            v_s,
        })
    }

    pub fn from_r(r: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::Domain(format!("r = {r} must be finite and ≥ 0")));
        }
        let chi = r.tanh();
        if chi >= 1.0 {
            return Err(Error::Domain(format!("r = {r} saturates tanh(r) to 1")));
        }
        Ok(SqueezingParams {
            r,
            chi,
            v_s: (1.0 + chi) / (1.0 - chi),
        })
    }
}

/// Normalized output state with its post-selection probability.
#[derive(Debug, Clone, PartialEq)]
pub struct TeleportOutcome {
    pub state: FockVector,
    pub success_probability: f64,
}

/// Teleportation of one arm of a two-mode squeezed vacuum.
#[derive(Debug, Clone, PartialEq)]
pub struct EprOutcome {
    /// Normalized Schmidt coefficients of the output, indexed by photon number.
    pub schmidt: Vec<f64>,
    pub success_probability: f64,
    /// Overlap `⟨EPR|EPR_tele⟩` of the pure input and output states.
    pub fidelity: f64,
}

impl EprOutcome {
    /// `|⟨EPR|EPR_tele⟩|²`, for callers that define fidelity as squared overlap.
    pub fn squared_fidelity(&self) -> f64 {
        self.fidelity * self.fidelity
    }
}

fn exact_gain(weight: &BigRational, k: usize, n_modes: usize) -> f64 {
    let n_pow = num_bigint::BigInt::from(n_modes).pow(k as u32);
    let gain = weight * BigRational::new(factorial(k), n_pow);
    gain.to_f64().unwrap_or(0.0)
}

/// Gains `g_0..=g_max_k` for `params`; zero beyond `N·d`.
pub fn gain_table(params: SchemeParams, max_k: usize) -> Vec<f64> {
    let n = params.num_modes;
    let d = params.photon_cutoff;
    let reach = max_k.min(params.support());
    let mut gains = vec![0.0; max_k + 1];
    if params.support() <= EXACT_GAIN_BUDGET {
        let weights = restricted_weights(n, reach, d).expect("params validated");
        for (k, g) in gains.iter_mut().enumerate().take(reach + 1) {
            *g = exact_gain(&weights[k], k, n);
        }
    } else {
        let logs = restricted_weights_log(n, reach, d).expect("params validated");
        let ln_n = (n as f64).ln();
        for (k, g) in gains.iter_mut().enumerate().take(reach + 1) {
            *g = (logs[k] + ln_factorial(k) - k as f64 * ln_n).exp();
        }
    }
    // {N brace k}_d = N^k / k! whenever k ≤ d, so these gains are exactly one.
    for g in gains.iter_mut().take(d.min(reach) + 1) {
        *g = 1.0;
    }
    gains
}

/// Amplitude gain `{N brace k}_d · k! / N^k` applied to `|k⟩`.
pub fn fock_gain(k: usize, params: SchemeParams) -> f64 {
    if k > params.support() {
        return 0.0;
    }
    gain_table(params, k)[k]
}

fn apply_gains(amplitudes: &[Complex64], gains: &[f64]) -> Result<TeleportOutcome> {
    let kept = amplitudes.len().min(gains.len());
    let out: Vec<Complex64> = amplitudes[..kept]
        .iter()
        .zip(gains)
        .map(|(c, g)| c * *g)
        .collect();
    let success_probability: f64 = out.iter().map(|c| c.norm_sqr()).sum();
    if success_probability <= 0.0 {
        return Err(Error::VanishingState);
    }
    let scale = success_probability.sqrt();
    let state = FockVector {
        amplitudes: out.into_iter().map(|c| c / scale).collect(),
    };
    Ok(TeleportOutcome {
        state,
        success_probability,
    })
}

/// Closed-form teleportation with an explicit gain table.
///
/// The output keeps photon numbers up to `min(input cutoff, gains.len() - 1)`.
pub fn teleport_with_gains(input: &FockVector, gains: &[f64]) -> Result<TeleportOutcome> {
    if !input.is_normalized(NORM_TOLERANCE) {
        return Err(Error::NotNormalized(input.norm_sqr()));
    }
    apply_gains(&input.amplitudes, gains)
}

/// Teleport a normalized, pre-truncated single-mode state.
pub fn teleport_state(input: &FockVector, params: SchemeParams) -> Result<TeleportOutcome> {
    let max_k = input.cutoff().min(params.support());
    teleport_with_gains(input, &gain_table(params, max_k))
}

/// `e^{-|α|²/2} α^k / √(k!)`, evaluated in the log domain.
pub fn coherent_amplitude(alpha: Complex64, k: usize) -> Complex64 {
    let x = alpha.norm_sqr();
    if x == 0.0 {
        return if k == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::zero()
        };
    }
    let ln_mag = -0.5 * x + k as f64 * alpha.norm().ln() - 0.5 * ln_factorial(k);
    Complex64::from_polar(ln_mag.exp(), k as f64 * alpha.arg())
}

/// Poisson mass `e^{-|α|²} Σ_{k>cutoff} |α|^{2k}/k!` discarded by truncation.
pub fn coherent_tail_mass(alpha: Complex64, cutoff: usize) -> f64 {
    let x = alpha.norm_sqr();
    if x == 0.0 {
        return 0.0;
    }
    let ln_x = x.ln();
    let mut ln_term = -x + (cutoff + 1) as f64 * ln_x - ln_factorial(cutoff + 1);
    let mut tail = 0.0;
    let mut k = cutoff + 1;
    loop {
        let term = ln_term.exp();
        tail += term;
        // Past the Poisson mode the terms shrink geometrically.
        if (k as f64) > x && (term <= tail * 1e-17 || term == 0.0) {
            break;
        }
        k += 1;
        ln_term += ln_x - (k as f64).ln();
    }
    tail
}

/// Coherent state `|α⟩` expanded over `|0⟩..|cutoff⟩`.
///
/// Fails when the discarded tail mass exceeds [`COHERENT_TAIL_BOUND`].
pub fn coherent_fock(alpha: Complex64, cutoff: usize) -> Result<FockVector> {
    let tail_mass = coherent_tail_mass(alpha, cutoff);
    if tail_mass >= COHERENT_TAIL_BOUND {
        return Err(Error::CutoffTooSmall {
            cutoff,
            tail_mass,
            bound: COHERENT_TAIL_BOUND,
        });
    }
    Ok(FockVector {
        amplitudes: (0..=cutoff).map(|k| coherent_amplitude(alpha, k)).collect(),
    })
}

/// Teleport `|α⟩`.
///
/// Photon numbers above `N·d` never survive, so the input is expanded
/// exactly up to `N·d` and no tail bound applies.
pub fn teleport_coherent(alpha: Complex64, params: SchemeParams) -> Result<TeleportOutcome> {
    let support = params.support();
    let amplitudes: Vec<Complex64> = (0..=support)
        .map(|k| coherent_amplitude(alpha, k))
        .collect();
    apply_gains(&amplitudes, &gain_table(params, support))
}

/// `P_suc = e^{-|α|²} Σ_{k≤N·d} ({N brace k}_d)² (|α|²/N²)^k k!`,
/// summed directly from the weights.
pub fn coherent_success_probability(alpha: Complex64, params: SchemeParams) -> f64 {
    let n = params.num_modes;
    let x = alpha.norm_sqr();
    let support = params.support();
    let logs = restricted_weights_log(n, support, params.photon_cutoff).expect("params validated");
    let ln_ratio = if x == 0.0 {
        f64::NEG_INFINITY
    } else {
        x.ln() - 2.0 * (n as f64).ln()
    };
    let mut total = 0.0;
    for (k, lw) in logs.iter().enumerate() {
        let ln_pow = if k == 0 { 0.0 } else { k as f64 * ln_ratio };
        total += (-x + 2.0 * lw + ln_pow + ln_factorial(k)).exp();
    }
    total
}

/// Teleport one arm of `√(1−χ²) Σ χ^n |n⟩|n⟩`.
pub fn teleport_epr(squeeze: SqueezingParams, params: SchemeParams) -> EprOutcome {
    let chi = squeeze.chi;
    let support = params.support();
    let gains = gain_table(params, support);
    let prefactor = 1.0 - chi * chi;
    let mut overlap_sum = 0.0;
    let mut raw = Vec::with_capacity(support + 1);
    let mut chi_k = 1.0;
    for g in &gains {
        raw.push(chi_k * g);
        overlap_sum += chi_k * chi_k * g;
        chi_k *= chi;
    }
    let norm_sqr: f64 = raw.iter().map(|s| s * s).sum();
    let success_probability = prefactor * norm_sqr;
    let norm = norm_sqr.sqrt();
    let schmidt = raw.into_iter().map(|s| s / norm).collect();
    EprOutcome {
        schmidt,
        success_probability,
        fidelity: prefactor * overlap_sum / success_probability.sqrt(),
    }
}

/// Coherent-state fidelity of conventional squeezed-vacuum teleportation,
/// `1 / (1 + e^{-2r})`.
pub fn conventional_cv_fidelity(r: f64) -> f64 {
    1.0 / (1.0 + (-2.0 * r).exp())
}

/// `|⟨a|b⟩|`, padding the shorter vector with zeros.
pub fn state_fidelity(a: &FockVector, b: &FockVector) -> f64 {
    a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex64>()
        .norm()
}
