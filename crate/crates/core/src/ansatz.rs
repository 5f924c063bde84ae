//! Variational states, reduced cavity states, purity and Wigner functions.
//!
//! Displaced squeezed states are `|α_c, r⟩ = D(α_c) S(−r)|0⟩`; see
//! [`qops::squeeze`] for the sign convention. Their Fock amplitudes are real,
//! and `|−α_c, r⟩` differs from `|α_c, r⟩` by the factor `(−1)^n`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qops::{self, CavityVector, ComplexMatrix, StateVector};

const PHI_SLACK: f64 = 1e-12;

/// `⟨α_c, r | −α_c, r⟩ = exp(−2 α_c² e^{−2r})`.
pub fn cat_overlap(alpha_c: f64, r: f64) -> f64 {
    (-2.0 * alpha_c * alpha_c * (-2.0 * r).exp()).exp()
}

/// Cat normalizations `(𝒩₊, 𝒩₋) = 1 ± exp(−2 α_c² e^{−2r})`, with `𝒩₋`
/// computed without cancellation.
pub fn cat_norms(alpha_c: f64, r: f64) -> (f64, f64) {
    let y = 2.0 * alpha_c * alpha_c * (-2.0 * r).exp();
    (1.0 + (-y).exp(), -(-y).exp_m1())
}

/// Parameters `(α_c, r, φ)` of the non-orthogonal-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NOQParams {
    pub alpha_c: f64,
    pub r: f64,
    pub phi: f64,
}

impl NOQParams {
    pub fn new(alpha_c: f64, r: f64, phi: f64) -> Result<Self> {
        let q = Self { alpha_c, r, phi };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_c >= 0.0) || !self.alpha_c.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha_c must be >= 0, got {}", self.alpha_c)));
        }
        if !self.r.is_finite() {
            return Err(Error::InvalidParameter(format!("r must be finite, got {}", self.r)));
        }
        if !(self.phi >= FRAC_PI_2 - PHI_SLACK && self.phi <= PI + PHI_SLACK) {
            return Err(Error::InvalidParameter(format!("phi must lie in [π/2, π], got {}", self.phi)));
        }
        Ok(())
    }

    /// `exp(−2 α_c² e^{−2r})`
    pub fn overlap(&self) -> f64 {
        cat_overlap(self.alpha_c, self.r)
    }

    /// Ground-state normalization `N = 1 − exp(−2α_c²e^{−2r}) cos φ`.
    pub fn norm_ground(&self) -> f64 {
        1.0 - self.overlap() * self.phi.cos()
    }

    /// Excited-state normalization `N₁ = 1 + exp(−2α_c²e^{−2r}) cos φ`.
    pub fn norm_excited(&self) -> f64 {
        1.0 + self.overlap() * self.phi.cos()
    }
}

/// Schmidt-form parameters `(p₋, α_c, r)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SchmidtParams {
    pub p_minus: f64,
    pub alpha_c: f64,
    pub r: f64,
}

impl SchmidtParams {
    pub fn new(p_minus: f64, alpha_c: f64, r: f64) -> Result<Self> {
        let s = Self { p_minus, alpha_c, r };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_minus >= 0.5 && self.p_minus <= 1.0) {
            return Err(Error::InvalidParameter(format!("p_minus must lie in [0.5, 1], got {}", self.p_minus)));
        }
        if !(self.alpha_c >= 0.0) || !self.alpha_c.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha_c must be >= 0, got {}", self.alpha_c)));
        }
        if !self.r.is_finite() {
            return Err(Error::InvalidParameter(format!("r must be finite, got {}", self.r)));
        }
        Ok(())
    }
}

/// Probability of `|−z⟩`: `p₋ = 1/2 + (x − cos φ)/(2N)` with
/// `x = exp(−2α_c²e^{−2r})` and `N = 1 − x cos φ`.
pub fn schmidt_from_noq(q: &NOQParams) -> Result<SchmidtParams> {
    q.validate()?;
    let x = q.overlap();
    let c = q.phi.cos();
    let p = 0.5 + (x - c) / (2.0 * (1.0 - x * c));
    Ok(SchmidtParams { p_minus: p.clamp(0.5, 1.0), alpha_c: q.alpha_c, r: q.r })
}

/// Inverse of [`schmidt_from_noq`] on the branch `φ ∈ [π/2, π]`.
///
/// With `d = 2p₋ − 1`, `cos φ = (x − d)/(1 − d x)`; a solution exists iff
/// `p₋ ≥ (1 + x)/2`. At `α_c = 0` every `φ` gives `p₋ = 1` and `φ = π` is returned.
pub fn noq_from_schmidt(s: &SchmidtParams) -> Result<NOQParams> {
    s.validate()?;
    let x = cat_overlap(s.alpha_c, s.r);
    let d = 2.0 * s.p_minus - 1.0;
    let denom = 1.0 - d * x;
    if denom <= 1e-15 {
        return Ok(NOQParams { alpha_c: s.alpha_c, r: s.r, phi: PI });
    }
    let c = (x - d) / denom;
    if !(-1.0 - 1e-12..=1e-12).contains(&c) {
        return Err(Error::OutOfRange(format!(
            "p_minus = {} needs cos φ = {c:.6}, outside [−1, 0] (requires p_minus ≥ {:.6})",
            s.p_minus,
            0.5 * (1.0 + x)
        )));
    }
    Ok(NOQParams { alpha_c: s.alpha_c, r: s.r, phi: c.clamp(-1.0, 0.0).acos() })
}

fn real_vector(v: impl Iterator<Item = f64>, dim: usize) -> CavityVector {
    DVector::from_iterator(dim, v.map(|x| C64::new(x, 0.0)))
}

/// Normalized `|α, r⟩` amplitudes with the truncation check.
fn branch(dim: usize, alpha: f64, r: f64) -> Result<Vec<f64>> {
    let v = qops::displaced_squeezed_state(dim, alpha, r)?;
    Ok(v.iter().map(|z| z.re).collect())
}

fn mirrored(amps: &[f64]) -> Vec<f64> {
    amps.iter().enumerate().map(|(n, a)| if n % 2 == 0 { *a } else { -*a }).collect()
}

/// `c₊|α_c,r⟩|+[φ]⟩ + c₋|−α_c,r⟩|−[φ]⟩`, normalized numerically.
fn pointer_superposition(q: &NOQParams, dim: usize, minus_sign: f64) -> Result<StateVector> {
    let a = branch(dim, q.alpha_c, q.r)?;
    let b = mirrored(&a);
    let (plus, minus) = qops::qubit_pointer(q.phi);
    let (p0, p1) = (plus[0].re, plus[1].re);
    let (m0, m1) = (minus[0].re, minus[1].re);
    let up = real_vector(a.iter().zip(&b).map(|(x, y)| p0 * x + minus_sign * m0 * y), dim);
    let down = real_vector(a.iter().zip(&b).map(|(x, y)| p1 * x + minus_sign * m1 * y), dim);
    StateVector::from_blocks(&up, &down)?.normalized()
}

/// NOQ ground state `(|α_c,r⟩|+[φ]⟩ − |−α_c,r⟩|−[φ]⟩)/√(2N)`.
pub fn noq_ground(q: &NOQParams, dim: usize) -> Result<StateVector> {
    q.validate()?;
    pointer_superposition(q, dim, -1.0)
}

/// NOQ first excited state `(|α_c,r⟩|+[φ]⟩ + |−α_c,r⟩|−[φ]⟩)/√(2N₁)`.
pub fn noq_excited(q: &NOQParams, dim: usize) -> Result<StateVector> {
    q.validate()?;
    let n1 = q.norm_excited();
    if n1 < 1e-12 {
        return Err(Error::VanishingNorm(n1));
    }
    pointer_superposition(q, dim, 1.0)
}

/// Parity of a squeezed cat.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatParity {
    /// `|α_c,r⟩ + |−α_c,r⟩`, even photon numbers.
    Plus,
    /// `|α_c,r⟩ − |−α_c,r⟩`, odd photon numbers.
    Minus,
}

/// Squeezed cat `(|α_c,r⟩ ± |−α_c,r⟩)/√(2𝒩±)`.
pub fn squeezed_cat(alpha_c: f64, r: f64, parity: CatParity, dim: usize) -> Result<CavityVector> {
    let (np, nm) = cat_norms(alpha_c, r);
    let norm = match parity {
        CatParity::Plus => np,
        CatParity::Minus => nm,
    };
    if norm < 1e-12 {
        return Err(Error::VanishingNorm(norm));
    }
    let keep = match parity {
        CatParity::Plus => 0,
        CatParity::Minus => 1,
    };
    let a = branch(dim, alpha_c, r)?;
    let mut v = real_vector(a.iter().enumerate().map(|(n, x)| if n % 2 == keep { *x } else { 0.0 }), dim);
    let nv = v.norm();
    if !(nv > 1e-150) {
        return Err(Error::VanishingNorm(nv));
    }
    v.unscale_mut(nv);
    Ok(v)
}

/// Schmidt form `√p₋ Φ⁺|−z⟩ − √(1−p₋) Φ⁻|+z⟩`; equal to [`noq_ground`] at
/// the corresponding parameters up to a global sign.
pub fn schmidt_state(s: &SchmidtParams, dim: usize) -> Result<StateVector> {
    s.validate()?;
    let plus = squeezed_cat(s.alpha_c, s.r, CatParity::Plus, dim)?;
    let w = (1.0 - s.p_minus).sqrt();
    let up = if w > 0.0 {
        squeezed_cat(s.alpha_c, s.r, CatParity::Minus, dim)? * C64::new(-w, 0.0)
    } else {
        CavityVector::zeros(dim)
    };
    StateVector::from_blocks(&up, &(plus * C64::new(s.p_minus.sqrt(), 0.0)))
}

/// Parity-frame NOQ state `(√p₋ Φ⁺ − √(1−p₋) Φ⁻) ⊗ |−z⟩`.
pub fn noq_parity_frame(s: &SchmidtParams, dim: usize) -> Result<StateVector> {
    let lab = schmidt_state(s, dim)?;
    let cavity = lab.block(0) + lab.block(1);
    StateVector::from_blocks(&CavityVector::zeros(dim), &cavity)
}

fn ecs(alpha: f64, dim: usize, sign: f64) -> Result<StateVector> {
    let a = branch(dim, alpha, 0.0)?;
    let b = mirrored(&a);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // |+x⟩ = (1, 1)/√2, |−x⟩ = (1, −1)/√2
    let up = real_vector(a.iter().zip(&b).map(|(x, y)| h * (x + sign * y)), dim);
    let down = real_vector(a.iter().zip(&b).map(|(x, y)| h * (x - sign * y)), dim);
    StateVector::from_blocks(&up, &down)?.normalized()
}

/// Entangled cat `(|α⟩|+x⟩ − |−α⟩|−x⟩)/√2`.
///
/// The two branches are orthogonal through the qubit, so the norm is exactly
/// one for every `α`, including `α = 0` where the state is `|0⟩|−z⟩`.
pub fn ecs_ground(alpha: f64, dim: usize) -> Result<StateVector> {
    ecs(alpha, dim, -1.0)
}

/// Entangled cat `(|α⟩|+x⟩ + |−α⟩|−x⟩)/√2`.
pub fn ecs_excited(alpha: f64, dim: usize) -> Result<StateVector> {
    ecs(alpha, dim, 1.0)
}

/// Parameters of the double squeezed state.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DSSParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub r1: f64,
    pub r2: f64,
    pub t: f64,
}

/// Double squeezed state
/// `Σ_j w_j S(r_j)[(|α_j⟩ + |−α_j⟩)|−z⟩ + (|α_j⟩ − |−α_j⟩)|+z⟩]` with
/// `w = (1 − t, t)`, normalized numerically.
pub fn dss_state(d: &DSSParams, dim: usize) -> Result<StateVector> {
    if ![d.alpha1, d.alpha2, d.r1, d.r2, d.t].iter().all(|x| x.is_finite()) || !(0.0..=1.0).contains(&d.t) {
        return Err(Error::InvalidParameter(format!("invalid DSS parameters {d:?}")));
    }
    let mut up = vec![0.0; dim];
    let mut down = vec![0.0; dim];
    for (w, alpha, r) in [(1.0 - d.t, d.alpha1, d.r1), (d.t, d.alpha2, d.r2)] {
        if w == 0.0 {
            continue;
        }
        // S(r)|α⟩ = D(α e^{−r}) S(r)|0⟩
        let a = branch(dim, alpha * (-r).exp(), -r)?;
        for n in 0..dim {
            if n % 2 == 0 {
                down[n] += 2.0 * w * a[n];
            } else {
                up[n] += 2.0 * w * a[n];
            }
        }
    }
    StateVector::from_blocks(&real_vector(up.into_iter(), dim), &real_vector(down.into_iter(), dim))?.normalized()
}

/// Schmidt parameters of the symmetric DSS (`α₂ = −α₁`, `r₂ = r₁`).
///
/// The DSS then equals the NOQ state with `α_c = |α₁| e^{−r₁}`, `r = −r₁` and
/// `√((1 − p₋)/p₋) = |1 − 2t| √(𝒩₋/𝒩₊)`; the relative sign of the two Schmidt
/// terms matches [`schmidt_state`] for `α₁ (1 − 2t) ≤ 0`.
pub fn dss_symmetric_schmidt(alpha1: f64, r1: f64, t: f64) -> Result<SchmidtParams> {
    let alpha_c = alpha1.abs() * (-r1).exp();
    let r = -r1;
    let (np, nm) = cat_norms(alpha_c, r);
    let ratio = (1.0 - 2.0 * t).abs() * (nm / np).sqrt();
    SchmidtParams::new(1.0 / (1.0 + ratio * ratio), alpha_c, r)
}

/// Partial trace over the qubit: `ρ = Σ_s ψ_s ψ_s†`.
pub fn reduced_cavity(state: &StateVector) -> ComplexMatrix {
    let a = state.block(0);
    let b = state.block(1);
    &a * a.adjoint() + &b * b.adjoint()
}

/// `Tr ρ²`.
pub fn purity_exact(rho: &ComplexMatrix) -> f64 {
    rho.iter().map(|z| z.norm_sqr()).sum()
}

/// Reduced-cavity purity of a pure qubit ⊗ cavity state, from the 2×2 Gram
/// matrix of its qubit blocks (no `dim²` density matrix).
pub fn cavity_purity(state: &StateVector) -> f64 {
    let a = state.block(0);
    let b = state.block(1);
    let aa = a.norm_squared();
    let bb = b.norm_squared();
    let ab = a.dotc(&b).norm_sqr();
    aa * aa + bb * bb + 2.0 * ab
}

/// `(1 − p₋)² + p₋²`
pub fn purity_noq(p_minus: f64) -> f64 {
    p_minus * p_minus + (1.0 - p_minus) * (1.0 - p_minus)
}

/// `|⟨a|b⟩|`, zero-padding the smaller cavity space.
pub fn fidelity(a: &StateVector, b: &StateVector) -> f64 {
    a.inner(b).norm().min(1.0)
}

/// Overlap of a state with a subspace: `√⟨ψ|P|ψ⟩` for the projector onto
/// the span of `basis` (orthonormalized internally).
pub fn subspace_fidelity(state: &StateVector, basis: &[StateVector]) -> Result<f64> {
    let mut ortho: Vec<StateVector> = Vec::with_capacity(basis.len());
    for v in basis {
        let mut w = v.clone();
        for u in &ortho {
            let c = u.inner(&w);
            let d = w.dim_cavity().max(u.dim_cavity());
            let uu = u.padded(d)?;
            let ww = w.padded(d)?;
            w = StateVector::new(d, ww.amplitudes() - uu.amplitudes() * c)?;
        }
        ortho.push(w.normalized()?);
    }
    let weight: f64 = ortho.iter().map(|u| u.inner(state).norm_sqr()).sum();
    Ok(weight.sqrt().min(1.0))
}

/// Rectangular phase-space grid in quadrature coordinates `α = (x + i p)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub np: usize,
}

impl GridSpec {
    /// Square grid `[−half_width, half_width]²` with `n` points per axis.
    pub fn square(half_width: f64, n: usize) -> Self {
        Self { x_min: -half_width, x_max: half_width, nx: n, p_min: -half_width, p_max: half_width, np: n }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.np == 0 {
            return Err(Error::InvalidParameter("grid needs at least one point per axis".into()));
        }
        let ok = |lo: f64, hi: f64, n: usize| lo.is_finite() && hi.is_finite() && (lo < hi || (n == 1 && lo <= hi));
        if !ok(self.x_min, self.x_max, self.nx) || !ok(self.p_min, self.p_max, self.np) {
            return Err(Error::InvalidParameter(format!("invalid grid ranges {self:?}")));
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        axis(self.x_min, self.x_max, self.nx)
    }

    pub fn ps(&self) -> Vec<f64> {
        axis(self.p_min, self.p_max, self.np)
    }

    pub fn dx(&self) -> f64 {
        step(self.x_min, self.x_max, self.nx)
    }

    pub fn dp(&self) -> f64 {
        step(self.p_min, self.p_max, self.np)
    }
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + i as f64 * step(lo, hi, n)).collect()
}

fn step(lo: f64, hi: f64, n: usize) -> f64 {
    if n > 1 {
        (hi - lo) / (n - 1) as f64
    } else {
        0.0
    }
}

/// Wigner function samples; `values[(i, j)]` is at `(xs[j], ps[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub spec: GridSpec,
    pub values: DMatrix<f64>,
    /// Set when the top ten Fock levels of `ρ` hold more than `1e−6` weight.
    pub truncation_warning: bool,
}

impl WignerGrid {
    /// `(1/π) Σ W Δx Δp`, equal to `2 Tr ρ` when the grid covers the state.
    pub fn integral(&self) -> f64 {
        self.values.sum() * self.spec.dx() * self.spec.dp() / PI
    }
}

/// `W(α) = 2 Tr[ρ D(α) Π D(−α)] = 2 Tr[ρ D(2α) Π]` at a single point.
pub fn wigner_point(rho: &ComplexMatrix, alpha: C64) -> f64 {
    let dim = rho.nrows();
    let mut acc = C64::new(0.0, 0.0);
    qops::for_each_displacement_diagonal(dim, alpha * 2.0, |k, n, upper, lower| {
        // Tr[ρ D Π] = Σ ρ_{col,row} (−1)^col D_{row,col}
        let sign_n = if n % 2 == 0 { 1.0 } else { -1.0 };
        acc += rho[(n, n + k)] * lower * sign_n;
        if k > 0 {
            let sign_nk = if (n + k) % 2 == 0 { 1.0 } else { -1.0 };
            acc += rho[(n + k, n)] * upper * sign_nk;
        }
    });
    2.0 * acc.re
}

/// Trailing Fock levels with negligible population are dropped before the
/// grid evaluation.
fn support(rho: &ComplexMatrix) -> usize {
    let dim = rho.nrows();
    let mut tail = 0.0;
    for n in (0..dim).rev() {
        tail += rho[(n, n)].re.abs();
        if tail > 1e-16 {
            return n + 1;
        }
    }
    1
}

/// Cavity Wigner function on a grid, points evaluated in parallel.
pub fn wigner(rho: &ComplexMatrix, spec: &GridSpec) -> Result<WignerGrid> {
    spec.validate()?;
    let dim = rho.nrows();
    if dim == 0 || rho.ncols() != dim {
        return Err(Error::DimensionMismatch(format!("density matrix is {}x{}", rho.nrows(), rho.ncols())));
    }
    let top: f64 = (dim.saturating_sub(10)..dim).map(|n| rho[(n, n)].re).sum();
    let truncation_warning = top > 1e-6;
    if truncation_warning {
        log::warn!("Wigner input holds {top:.3e} of its weight in the top 10 Fock levels");
    }
    let keep = support(rho);
    let rho = rho.view((0, 0), (keep, keep)).into_owned();
    let xs = spec.xs();
    let ps = spec.ps();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let flat: Vec<f64> = (0..spec.np * spec.nx)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / spec.nx, idx % spec.nx);
            wigner_point(&rho, C64::new(xs[j] * s, ps[i] * s))
        })
        .collect();
    Ok(WignerGrid { spec: *spec, values: DMatrix::from_row_slice(spec.np, spec.nx, &flat), truncation_warning })
}
