//! Teleportation of a single `D`-level system.
//!
//! Systems are indexed in the order (input, Alice's resource half, Bob's
//! resource half). Alice applies `XOR` with her resource half as control
//! and the input as target, then measures the input in the computational
//! basis and her resource half in the Fourier basis `|ν_ℓ⟩`. The outcome
//! `(ℓ', k')` leaves Bob with `Z^{D−ℓ'} X^{k'} |φ⟩`, which he undoes with
//! `(X^{k'})† (Z^{D−ℓ'})†`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

const KET_TOLERANCE: f64 = 1e-12;

/// `exp(2πi/D)`.
pub fn omega(dim: usize) -> Complex64 {
    omega_pow(dim, 1)
}

fn omega_pow(dim: usize, power: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (power % dim) as f64 / dim as f64)
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::Domain(format!(
            "qudit dimension {dim} must be at least 2"
        )));
    }
    Ok(())
}

/// Normalized pure state of one qudit.
#[derive(Debug, Clone, PartialEq)]
pub struct QuditKet {
    amplitudes: Vec<Complex64>,
}

impl QuditKet {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > KET_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(QuditKet { amplitudes })
    }

    pub fn basis(m: usize, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if m >= dim {
            return Err(Error::Domain(format!(
                "basis index {m} out of range for D = {dim}"
            )));
        }
        let mut amplitudes = vec![Complex64::zero(); dim];
        amplitudes[m] = Complex64::new(1.0, 0.0);
        Ok(QuditKet { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &QuditKet) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|`.
    pub fn overlap(&self, other: &QuditKet) -> f64 {
        self.inner(other).norm()
    }

    pub fn into_joint(self) -> JointQuditState {
        JointQuditState {
            dims: vec![self.amplitudes.len()],
            amplitudes: self.amplitudes,
        }
    }
}

/// Haar-random pure state from normalized complex Gaussians.
pub fn haar_random_ket<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<QuditKet> {
    check_dim(dim)?;
    let raw: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    Ok(QuditKet {
        amplitudes: raw.into_iter().map(|c| c / norm).collect(),
    })
}

/// Dense pure state of several subsystems, system 0 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct JointQuditState {
    dims: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

impl JointQuditState {
    pub fn new(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let size: usize = dims.iter().product();
        if dims.is_empty() || amplitudes.len() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                found: amplitudes.len(),
            });
        }
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > KET_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(JointQuditState { dims, amplitudes })
    }

    pub fn product(kets: &[QuditKet]) -> Result<Self> {
        let mut iter = kets.iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::Domain("product of zero kets".into()))?;
        Ok(iter.fold(first.clone().into_joint(), |acc, k| {
            acc.tensor(&k.clone().into_joint())
        }))
    }

    pub fn tensor(&self, other: &JointQuditState) -> JointQuditState {
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        JointQuditState { dims, amplitudes }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, digits: &[usize]) -> Complex64 {
        self.amplitudes[self.index_of(digits)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        strides
    }

    /// Visit every flat index together with its digits.
    fn for_each_index(&self, mut f: impl FnMut(usize, &[usize])) {
        let mut digits = vec![0; self.dims.len()];
        for idx in 0..self.amplitudes.len() {
            f(idx, &digits);
            for (slot, &d) in digits.iter_mut().zip(&self.dims).rev() {
                *slot += 1;
                if *slot < d {
                    break;
                }
                *slot = 0;
            }
        }
    }

    fn index_of(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&x, &d)| acc * d + x)
    }

    fn check_system(&self, index: usize) -> Result<usize> {
        self.dims.get(index).copied().ok_or(Error::InvalidSystem {
            index,
            systems: self.dims.len(),
        })
    }

    /// Apply the basis map `|m⟩ → phase(m) |target(m)⟩` on one system.
    fn map_system(
        &self,
        index: usize,
        map: impl Fn(usize) -> (usize, Complex64),
    ) -> Result<JointQuditState> {
        let dim = self.check_system(index)?;
        let stride = self.strides()[index];
        let table: Vec<(usize, Complex64)> = (0..dim).map(map).collect();
        let mut out = vec![Complex64::zero(); self.amplitudes.len()];
        self.for_each_index(|idx, digits| {
            let m = digits[index];
            let (target, phase) = table[m];
            out[idx - m * stride + target * stride] += self.amplitudes[idx] * phase;
        });
        Ok(JointQuditState {
            dims: self.dims.clone(),
            amplitudes: out,
        })
    }

    fn into_ket(self) -> Result<QuditKet> {
        if self.dims.len() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: self.dims.len(),
            });
        }
        Ok(QuditKet {
            amplitudes: self.amplitudes,
        })
    }
}

/// `(1/√D) Σ_m |m⟩|m⟩`.
pub fn maximally_entangled(dim: usize) -> Result<JointQuditState> {
    check_dim(dim)?;
    let mut amplitudes = vec![Complex64::zero(); dim * dim];
    let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    for m in 0..dim {
        amplitudes[m * dim + m] = a;
    }
    Ok(JointQuditState {
        dims: vec![dim, dim],
        amplitudes,
    })
}

/// `|j⟩_target |i⟩_control → |i ⊖ j⟩_target |i⟩_control`.
pub fn xor_gate(state: &JointQuditState, control: usize, target: usize) -> Result<JointQuditState> {
    let dc = state.check_system(control)?;
    let dt = state.check_system(target)?;
    if dc != dt {
        return Err(Error::DimensionMismatch {
            expected: dc,
            found: dt,
        });
    }
    if control == target {
        return Err(Error::Domain(
            "XOR needs distinct control and target".into(),
        ));
    }
    let dim = dc;
    let st = state.strides()[target];
    let mut out = vec![Complex64::zero(); state.amplitudes.len()];
    state.for_each_index(|idx, digits| {
        let (i, j) = (digits[control], digits[target]);
        let moved = (i + dim - j) % dim;
        out[idx - j * st + moved * st] += state.amplitudes[idx];
    });
    Ok(JointQuditState {
        dims: state.dims.clone(),
        amplitudes: out,
    })
}

fn reduce_power(power: i64, dim: usize) -> usize {
    power.rem_euclid(dim as i64) as usize
}

/// `Z^power` on system `index`, with `Z|m⟩ = ω^m |m⟩`.
pub fn z_op(state: &JointQuditState, index: usize, power: i64) -> Result<JointQuditState> {
    let dim = state.check_system(index)?;
    let p = reduce_power(power, dim);
    state.map_system(index, |m| (m, omega_pow(dim, m * p)))
}

/// `X^power` on system `index`, with `X|m⟩ = |m ⊕ 1⟩`.
pub fn x_op(state: &JointQuditState, index: usize, power: i64) -> Result<JointQuditState> {
    let dim = state.check_system(index)?;
    let p = reduce_power(power, dim);
    state.map_system(index, |m| ((m + p) % dim, Complex64::new(1.0, 0.0)))
}

/// `|ν_ℓ⟩ = (1/√D) Z^ℓ Σ_k |k⟩`.
pub fn fourier_state(ell: usize, dim: usize) -> Result<QuditKet> {
    check_dim(dim)?;
    if ell >= dim {
        return Err(Error::Domain(format!(
            "Fourier index {ell} out of range for D = {dim}"
        )));
    }
    let scale = 1.0 / (dim as f64).sqrt();
    Ok(QuditKet {
        amplitudes: (0..dim).map(|k| omega_pow(dim, ell * k) * scale).collect(),
    })
}

/// Outcome `(ℓ', k')` of a generalized Bell measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellOutcome {
    pub ell: usize,
    pub kk: usize,
    pub probability: f64,
}

fn bell_systems(state: &JointQuditState, sys1: usize, sys2: usize) -> Result<(usize, Vec<usize>)> {
    let dim = state.check_system(sys1)?;
    let dim2 = state.check_system(sys2)?;
    if dim != dim2 {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: dim2,
        });
    }
    if sys1 == sys2 {
        return Err(Error::Domain(
            "Bell measurement needs two distinct systems".into(),
        ));
    }
    if state.dims.len() < 3 {
        return Err(Error::Domain(
            "Bell measurement needs a third system to keep".into(),
        ));
    }
    let rest_dims: Vec<usize> = state
        .dims
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != sys1 && i != sys2)
        .map(|(_, &d)| d)
        .collect();
    Ok((dim, rest_dims))
}

fn rest_index(dims: &[usize], digits: &[usize], sys1: usize, sys2: usize) -> usize {
    let mut rest_idx = 0;
    for (i, (&d, &x)) in dims.iter().zip(digits).enumerate() {
        if i != sys1 && i != sys2 {
            rest_idx = rest_idx * d + x;
        }
    }
    rest_idx
}

fn normalized_branch(
    ell: usize,
    kk: usize,
    dims: Vec<usize>,
    rest: Vec<Complex64>,
) -> Result<(BellOutcome, JointQuditState)> {
    let probability: f64 = rest.iter().map(|c| c.norm_sqr()).sum();
    if probability <= 0.0 {
        return Err(Error::ZeroProbability);
    }
    let scale = probability.sqrt();
    Ok((
        BellOutcome {
            ell,
            kk,
            probability,
        },
        JointQuditState {
            dims,
            amplitudes: rest.into_iter().map(|c| c / scale).collect(),
        },
    ))
}

/// Project `sys1` onto `|kk⟩` and `sys2` onto `|ν_ell⟩`.
///
/// Returns the outcome probability and the normalized state of the
/// remaining systems, in their original order.
pub fn bell_project(
    state: &JointQuditState,
    sys1: usize,
    sys2: usize,
    ell: usize,
    kk: usize,
) -> Result<(BellOutcome, JointQuditState)> {
    let (dim, rest_dims) = bell_systems(state, sys1, sys2)?;
    if kk >= dim {
        return Err(Error::Domain(format!(
            "outcome k' = {kk} out of range for D = {dim}"
        )));
    }
    let nu = fourier_state(ell, dim)?;
    let rest_size: usize = rest_dims.iter().product();
    let mut rest = vec![Complex64::zero(); rest_size];
    state.for_each_index(|idx, digits| {
        if digits[sys1] == kk {
            let weight = nu.amplitudes[digits[sys2]].conj();
            rest[rest_index(&state.dims, digits, sys1, sys2)] += weight * state.amplitudes[idx];
        }
    });
    normalized_branch(ell, kk, rest_dims, rest)
}

/// Every outcome with nonzero probability, ordered by `(k', ℓ')`.
pub fn bell_branches(
    state: &JointQuditState,
    sys1: usize,
    sys2: usize,
) -> Result<Vec<(BellOutcome, JointQuditState)>> {
    let (dim, rest_dims) = bell_systems(state, sys1, sys2)?;
    let rest_size: usize = rest_dims.iter().product();
    let scale = 1.0 / (dim as f64).sqrt();
    // conj(⟨m|ν_ℓ⟩) = ω^{-ℓm}/√D, indexed by ℓm mod D.
    let phases: Vec<Complex64> = (0..dim).map(|j| omega_pow(dim, dim - j) * scale).collect();
    let mut acc = vec![Complex64::zero(); dim * dim * rest_size];
    state.for_each_index(|idx, digits| {
        let (kk, m) = (digits[sys1], digits[sys2]);
        let r = rest_index(&state.dims, digits, sys1, sys2);
        let amp = state.amplitudes[idx];
        let mut phase = 0;
        for ell in 0..dim {
            acc[(kk * dim + ell) * rest_size + r] += phases[phase] * amp;
            phase = (phase + m) % dim;
        }
    });
    let mut out = Vec::with_capacity(dim * dim);
    for (block, rest) in acc.chunks(rest_size).enumerate() {
        match normalized_branch(block % dim, block / dim, rest_dims.clone(), rest.to_vec()) {
            Ok(branch) => out.push(branch),
            Err(Error::ZeroProbability) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Sample one Bell outcome with the caller's RNG.
pub fn bell_measure<R: Rng + ?Sized>(
    state: &JointQuditState,
    sys1: usize,
    sys2: usize,
    rng: &mut R,
) -> Result<(BellOutcome, JointQuditState)> {
    let mut branches = bell_branches(state, sys1, sys2)?;
    let total: f64 = branches.iter().map(|(o, _)| o.probability).sum();
    let mut u = rng.gen::<f64>() * total;
    let last = branches.len() - 1;
    for (i, (outcome, _)) in branches.iter().enumerate() {
        if u < outcome.probability || i == last {
            return Ok(branches.swap_remove(i));
        }
        u -= outcome.probability;
    }
    unreachable!("branch list is never empty for a normalized state")
}

/// One measurement branch of a teleportation run, after Bob's correction.
#[derive(Debug, Clone, PartialEq)]
pub struct TeleportBranch {
    pub outcome: BellOutcome,
    pub output: QuditKet,
}

fn prepare(phi: &QuditKet, resource: &JointQuditState) -> Result<JointQuditState> {
    let dim = phi.dim();
    if resource.dims != [dim, dim] {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: resource.dims.first().copied().unwrap_or(0),
        });
    }
    let joint = phi.clone().into_joint().tensor(resource);
    xor_gate(&joint, 1, 0)
}

fn correct(remote: JointQuditState, outcome: &BellOutcome) -> Result<QuditKet> {
    // (Z^{D-ℓ'})† = Z^{ℓ'}, applied before (X^{k'})† = X^{-k'}.
    let ket = remote.into_ket()?;
    let dim = ket.dim();
    let mut amplitudes = vec![Complex64::zero(); dim];
    for (m, amp) in ket.amplitudes.iter().enumerate() {
        amplitudes[(m + dim - outcome.kk) % dim] = amp * omega_pow(dim, outcome.ell * m);
    }
    Ok(QuditKet { amplitudes })
}

/// Teleport `phi` through a two-qudit resource for every nonzero outcome.
pub fn teleport_qudit_branches(
    phi: &QuditKet,
    resource: &JointQuditState,
) -> Result<Vec<TeleportBranch>> {
    let state = prepare(phi, resource)?;
    bell_branches(&state, 0, 1)?
        .into_iter()
        .map(|(outcome, remote)| {
            Ok(TeleportBranch {
                output: correct(remote, &outcome)?,
                outcome,
            })
        })
        .collect()
}

/// Teleport `phi` with a sampled Bell outcome.
pub fn teleport_qudit<R: Rng + ?Sized>(
    phi: &QuditKet,
    resource: &JointQuditState,
    rng: &mut R,
) -> Result<(QuditKet, BellOutcome)> {
    let state = prepare(phi, resource)?;
    let (outcome, remote) = bell_measure(&state, 0, 1, rng)?;
    Ok((correct(remote, &outcome)?, outcome))
}

/// Resource `p |ψ⟩⟨ψ| + (1−p) I/D²` with `|ψ⟩` maximally entangled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepolarizedResource {
    p: f64,
    dim: usize,
}

impl DepolarizedResource {
    pub fn new(p: f64, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!(
                "mixing weight p = {p} must lie in [0, 1]"
            )));
        }
        Ok(DepolarizedResource { p, dim })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Maximal singlet fraction `p + (1−p)/D²`.
    pub fn singlet_fraction(&self) -> f64 {
        self.p + (1.0 - self.p) / (self.dim * self.dim) as f64
    }

    /// Mixture components as (weight, pure resource): the maximally
    /// entangled state, then `|a⟩|b⟩` for every product basis state.
    pub fn components(&self) -> Vec<(f64, JointQuditState)> {
        let d = self.dim;
        let mut out = Vec::with_capacity(d * d + 1);
        out.push((self.p, maximally_entangled(d).expect("dimension checked")));
        let w = (1.0 - self.p) / (d * d) as f64;
        for a in 0..d {
            for b in 0..d {
                let ket_a = QuditKet::basis(a, d).expect("in range");
                let ket_b = QuditKet::basis(b, d).expect("in range");
                out.push((
                    w,
                    JointQuditState::product(&[ket_a, ket_b]).expect("nonempty"),
                ));
            }
        }
        out
    }
}

/// Channel fidelity `p + (1−p)/D` of teleportation through a depolarized resource.
pub fn depolarized_fidelity(p: f64, dim: usize) -> f64 {
    p + (1.0 - p) / dim as f64
}

/// `(F·D + 1)/(D + 1)` for singlet fraction `F ∈ [1/D², 1]`.
pub fn singlet_fraction_fidelity(fraction: f64, dim: usize) -> Result<f64> {
    check_dim(dim)?;
    let lo = 1.0 / (dim * dim) as f64;
    if !(fraction >= lo - 1e-15 && fraction <= 1.0) {
        return Err(Error::Domain(format!(
            "singlet fraction {fraction} must lie in [1/D², 1] for D = {dim}"
        )));
    }
    Ok((fraction * dim as f64 + 1.0) / (dim as f64 + 1.0))
}

/// Average `|⟨φ|out⟩|²` over the resource mixture and all Bell branches,
/// obtained by simulating each pure component.
pub fn mixture_teleport_fidelity(phi: &QuditKet, resource: &DepolarizedResource) -> Result<f64> {
    let mut total = 0.0;
    for (weight, component) in resource.components() {
        if weight == 0.0 {
            continue;
        }
        let branch_fidelity: f64 = teleport_qudit_branches(phi, &component)?
            .iter()
            .map(|b| b.outcome.probability * phi.inner(&b.output).norm_sqr())
            .sum();
        total += weight * branch_fidelity;
    }
    Ok(total)
}

/// Monte-Carlo average of [`mixture_teleport_fidelity`] over Haar-random inputs.
pub fn monte_carlo_depolarized_fidelity<R: Rng + ?Sized>(
    resource: &DepolarizedResource,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let mut total = 0.0;
    for _ in 0..samples {
        let phi = haar_random_ket(resource.dim, rng)?;
        total += mixture_teleport_fidelity(&phi, resource)?;
    }
    Ok(total / samples as f64)
}
