//! Imperfect photon counting and detection-limited scheme comparison.
//!
//! A detector with efficiency `η` and mean dark-count rate `ν` registers
//! `N_c` clicks on `|m⟩` with probability
//!
//! ```text
//! Σ_{n=0}^{min(N_c, m)} e^{-ν} ν^{N_c-n}/(N_c-n)! · C(m, n) η^n (1-η)^{m-n}
//! ```
//!
//! i.e. a binomial loss channel followed by Poissonian dark counts. All
//! elements are diagonal in the Fock basis, so they are stored as weight
//! vectors over `|0⟩..|cutoff⟩`.

use crate::combinatorics::ln_factorial;
use crate::error::{Error, Result};

/// Success probability of the multimode-interferometer quartit teleporter.
pub const INTERFEROMETER_SUCCESS: f64 = 0.18;

/// Qubit modes needed for `f ≈ 0.93` at `V_s = 10`.
pub const MATCHED_QUBIT_MODES: usize = 11;

/// Quartit modes needed for the same fidelity.
pub const MATCHED_QUARTIT_MODES: usize = 3;

/// Single-photon-resolving detections per interferometer module.
const DETECTIONS_PER_QUARTIT: i32 = 3;

fn check_probability(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(format!("{name} = {v} must lie in [0, 1]")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    pub eta: f64,
    pub nu: f64,
}

impl DetectorModel {
    pub fn new(eta: f64, nu: f64) -> Result<Self> {
        check_probability("eta", eta)?;
        if !(nu.is_finite() && nu >= 0.0) {
            return Err(Error::Domain(format!(
                "dark-count rate {nu} must be finite and ≥ 0"
            )));
        }
        Ok(DetectorModel { eta, nu })
    }

    pub fn perfect() -> Self {
        DetectorModel { eta: 1.0, nu: 0.0 }
    }

    fn dark_count_pmf(&self, j: usize) -> f64 {
        if self.nu == 0.0 {
            return if j == 0 { 1.0 } else { 0.0 };
        }
        (-self.nu + j as f64 * self.nu.ln() - ln_factorial(j)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PovmLabel {
    /// Exactly this many registered clicks.
    Clicks(usize),
    /// This many clicks or more: the identity minus all resolved elements.
    AtLeast(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    pub label: PovmLabel,
    /// Diagonal weights on `|m⟩⟨m|`, `m = 0..=cutoff`.
    pub weights: Vec<f64>,
}

fn binomial_pmf(m: usize, n: usize, eta: f64) -> f64 {
    let ln_choose = ln_factorial(m) - ln_factorial(n) - ln_factorial(m - n);
    ln_choose.exp() * eta.powi(n as i32) * (1.0 - eta).powi((m - n) as i32)
}

/// Element `Π_{N_c}` for `clicks = N_c`, over Fock levels `0..=cutoff`.
pub fn povm_element(clicks: usize, det: DetectorModel, cutoff: usize) -> PovmElement {
    let weights = (0..=cutoff)
        .map(|m| {
            let w: f64 = (0..=clicks.min(m))
                .map(|n| det.dark_count_pmf(clicks - n) * binomial_pmf(m, n, det.eta))
                .sum();
            w.clamp(0.0, 1.0)
        })
        .collect();
    PovmElement {
        label: PovmLabel::Clicks(clicks),
        weights,
    }
}

fn remainder(label: PovmLabel, resolved: &[PovmElement], cutoff: usize) -> PovmElement {
    let weights = (0..=cutoff)
        .map(|m| {
            let used: f64 = resolved.iter().map(|e| e.weights[m]).sum();
            (1.0 - used).clamp(0.0, 1.0)
        })
        .collect();
    PovmElement { label, weights }
}

/// On/off detector `{Π_0, I − Π_0}`.
pub fn apd_povm(det: DetectorModel, cutoff: usize) -> [PovmElement; 2] {
    let off = povm_element(0, det, cutoff);
    let on = remainder(PovmLabel::AtLeast(1), std::slice::from_ref(&off), cutoff);
    [off, on]
}

/// Detector resolving up to `max_resolved` clicks:
/// `{Π_0, …, Π_K, I − Σ Π}`.
pub fn pnr_povm(det: DetectorModel, max_resolved: usize, cutoff: usize) -> Vec<PovmElement> {
    let mut elements: Vec<PovmElement> = (0..=max_resolved)
        .map(|c| povm_element(c, det, cutoff))
        .collect();
    let rest = remainder(PovmLabel::AtLeast(max_resolved + 1), &elements, cutoff);
    elements.push(rest);
    elements
}

/// Smallest `K` with `P(Poisson(ν) > K) < tol`.
pub fn dark_count_tail_clicks(nu: f64, tol: f64) -> usize {
    let det = DetectorModel { eta: 1.0, nu };
    let mut cdf = 0.0;
    let mut k = 0;
    loop {
        cdf += det.dark_count_pmf(k);
        if 1.0 - cdf < tol || (k as f64 > nu && det.dark_count_pmf(k) == 0.0) {
            return k;
        }
        k += 1;
    }
}

/// Largest click count needed for completeness to within `tol` on levels
/// `0..=cutoff`: every level loses at most the dark-count tail beyond
/// `max_clicks − cutoff`.
pub fn completeness_click_limit(det: DetectorModel, cutoff: usize, tol: f64) -> usize {
    cutoff + dark_count_tail_clicks(det.nu, tol)
}

/// `max_m |1 − Σ_{c ≤ max_clicks} Π_c[m]|`.
pub fn completeness_defect(det: DetectorModel, cutoff: usize, max_clicks: usize) -> f64 {
    let mut sums = vec![0.0; cutoff + 1];
    for c in 0..=max_clicks {
        for (s, w) in sums.iter_mut().zip(povm_element(c, det, cutoff).weights) {
            *s += w;
        }
    }
    sums.iter().map(|s| (1.0 - s).abs()).fold(0.0, f64::max)
}

/// Scaling of the two-level scheme's success rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme1Model {
    /// All Bell states resolved: `η^N η^N`.
    DeterministicBell,
    /// Linear-optics Bell measurement: `(1/2)^N η^N`.
    LinearOptics,
}

pub fn scheme1_success(eta: f64, num_modes: usize, model: Scheme1Model) -> f64 {
    let n = num_modes as i32;
    match model {
        Scheme1Model::DeterministicBell => eta.powi(2 * n),
        Scheme1Model::LinearOptics => 0.5f64.powi(n) * eta.powi(n),
    }
}

/// Scaling of the qudit scheme's success rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme2Model {
    /// `ξ^N η^N` with `ξ` the effective photon-number-resolving efficiency.
    Generic,
    /// Interferometer-based quartit teleportation: `0.18^N ξ^{3N}`.
    QuartitInterferometer,
}

pub fn scheme2_success(xi: f64, eta: f64, num_modes: usize, model: Scheme2Model) -> f64 {
    let n = num_modes as i32;
    match model {
        Scheme2Model::Generic => xi.powi(n) * eta.powi(n),
        Scheme2Model::QuartitInterferometer => {
            INTERFEROMETER_SUCCESS.powi(n) * xi.powi(DETECTIONS_PER_QUARTIT * n)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeEfficiencies {
    pub eta: f64,
    pub xi: f64,
    pub interferometer_success: f64,
}

impl SchemeEfficiencies {
    pub fn new(eta: f64, xi: f64) -> Result<Self> {
        check_probability("eta", eta)?;
        check_probability("xi", xi)?;
        Ok(SchemeEfficiencies {
            eta,
            xi,
            interferometer_success: INTERFEROMETER_SUCCESS,
        })
    }

    /// Matched-fidelity pair `(qubits at N = 11, quartits at N = 3)`.
    pub fn matched_fidelity_pair(&self) -> (f64, f64) {
        (
            scheme1_success(self.eta, MATCHED_QUBIT_MODES, Scheme1Model::LinearOptics),
            self.interferometer_success
                .powi(MATCHED_QUARTIT_MODES as i32)
                * self
                    .xi
                    .powi(DETECTIONS_PER_QUARTIT * MATCHED_QUARTIT_MODES as i32),
        )
    }
}

/// Model pairing used by comparison sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComparisonModel {
    /// `η^{2N}` against `ξ^N η^N` at the same `N`.
    Deterministic,
    /// `(1/2)^N η^N` against `ξ^N η^N` at the same `N`.
    LinearOptics,
    /// `(1/2)^11 η^11` against `0.18^3 ξ^9`, the matched-fidelity comparison.
    QuartitInterferometer,
}

impl ComparisonModel {
    /// `(scheme1, scheme2)` success probabilities. `num_modes` is ignored by
    /// the matched-fidelity model.
    pub fn evaluate(self, eta: f64, xi: f64, num_modes: usize) -> (f64, f64) {
        match self {
            ComparisonModel::Deterministic => (
                scheme1_success(eta, num_modes, Scheme1Model::DeterministicBell),
                scheme2_success(xi, eta, num_modes, Scheme2Model::Generic),
            ),
            ComparisonModel::LinearOptics => (
                scheme1_success(eta, num_modes, Scheme1Model::LinearOptics),
                scheme2_success(xi, eta, num_modes, Scheme2Model::Generic),
            ),
            ComparisonModel::QuartitInterferometer => (
                scheme1_success(eta, MATCHED_QUBIT_MODES, Scheme1Model::LinearOptics),
                scheme2_success(
                    xi,
                    eta,
                    MATCHED_QUARTIT_MODES,
                    Scheme2Model::QuartitInterferometer,
                ),
            ),
        }
    }
}

/// Whether quartits through the interferometer beat qubits at matched fidelity.
pub fn quartit_advantage(eta: f64, xi: f64) -> bool {
    let (qubits, quartits) = ComparisonModel::QuartitInterferometer.evaluate(eta, xi, 0);
    quartits > qubits
}

/// `ξ` on the advantage boundary `0.18³ ξ⁹ = (η/2)¹¹`.
pub fn advantage_boundary_xi(eta: f64) -> f64 {
    let rhs = (0.5 * eta).powi(MATCHED_QUBIT_MODES as i32);
    let lhs = INTERFEROMETER_SUCCESS.powi(MATCHED_QUARTIT_MODES as i32);
    (rhs / lhs).powf(1.0 / (DETECTIONS_PER_QUARTIT * MATCHED_QUARTIT_MODES as i32) as f64)
}

/// `region[i][j]` is true when quartits win at `(eta_grid[i], xi_grid[j])`.
pub fn advantage_region(eta_grid: &[f64], xi_grid: &[f64]) -> Result<Vec<Vec<bool>>> {
    for &e in eta_grid {
        check_probability("eta", e)?;
    }
    for &x in xi_grid {
        check_probability("xi", x)?;
    }
    Ok(eta_grid
        .iter()
        .map(|&e| xi_grid.iter().map(|&x| quartit_advantage(e, x)).collect())
        .collect())
}
