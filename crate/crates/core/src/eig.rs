//! Hermitian eigensolvers and the cavity truncation policy.
//!
//! Dense problems go through nalgebra's Hermitian eigendecomposition. The
//! Rabi Hamiltonian itself is never diagonalized densely: in the parity frame
//! each total-parity sector is a real symmetric tridiagonal matrix, which is
//! solved by Sturm-sequence bisection and inverse iteration and then mapped
//! back to the lab frame.

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{self, ModelParams, ParitySector};
use crate::qops::{self, ComplexMatrix, StateVector};

/// Lower bound on the cavity dimension.
pub const MIN_DIM: usize = 50;

/// Energies of successive truncations must agree to this (in units of `ω_c`).
pub const ENERGY_AGREEMENT: f64 = 1e-9;

/// Ground vectors of successive truncations must have fidelity above `1 − this`.
pub const FIDELITY_AGREEMENT: f64 = 1e-9;

const HERMITIAN_TOL: f64 = 1e-10;

/// Lowest eigenpairs, eigenvalues ascending.
///
/// Each eigenvector is phase-fixed so that its largest-magnitude amplitude is
/// real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<DVector<C64>>,
}

impl EigenResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Eigenvector `i` read as a qubit ⊗ cavity state.
    pub fn state(&self, i: usize) -> Result<StateVector> {
        let v =
            self.eigenvectors.get(i).ok_or_else(|| Error::OutOfRange(format!("eigenpair {i} of {}", self.len())))?;
        if v.len() % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "eigenvector of length {} is not a qubit ⊗ cavity state",
                v.len()
            )));
        }
        StateVector::new(v.len() / 2, v.clone())
    }
}

/// Cavity dimension `max(50, round(5 (g/ω_c)²))`.
pub fn truncation_dim(p: &ModelParams) -> usize {
    let a = p.displacement_scale();
    MIN_DIM.max((5.0 * a * a).round() as usize)
}

/// Rotates `v` so that its largest-magnitude entry is real and positive.
pub fn fix_phase(v: &mut DVector<C64>) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, z) in v.iter().enumerate() {
        let a = z.norm();
        if a > best_abs * (1.0 + 1e-12) {
            best = i;
            best_abs = a;
        }
    }
    if best_abs > 0.0 {
        let phase = v[best].conj() / best_abs;
        for z in v.iter_mut() {
            *z *= phase;
        }
        v[best] = C64::new(v[best].re, 0.0);
    }
}

/// The `k` lowest eigenpairs of a dense Hermitian matrix.
pub fn lowest_eigenpairs(h: &ComplexMatrix, k: usize) -> Result<EigenResult> {
    let n = h.nrows();
    if n == 0 || h.ncols() != n {
        return Err(Error::DimensionMismatch(format!("matrix is {}x{}", h.nrows(), h.ncols())));
    }
    if k == 0 || k > n {
        return Err(Error::OutOfRange(format!("requested {k} eigenpairs of a {n}x{n} matrix")));
    }
    let herm = qops::hermiticity_error(h);
    if herm > HERMITIAN_TOL {
        return Err(Error::NonHermitian(herm));
    }
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let scale = qops::max_abs(h).max(f64::MIN_POSITIVE);
    let eig = SymmetricEigen::try_new(sym, 1e-15 * scale, 1000 * n)
        .ok_or(Error::ConvergenceFailure { residual: f64::INFINITY })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let tol = 1e-9 * scale * n as f64;
    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenvectors = Vec::with_capacity(k);
    for &j in order.iter().take(k) {
        let lambda = eig.eigenvalues[j];
        let mut v = eig.eigenvectors.column(j).into_owned();
        v.unscale_mut(v.norm());
        fix_phase(&mut v);
        let residual = (h * &v - &v * C64::new(lambda, 0.0)).norm();
        if !(residual < tol) {
            return Err(Error::ConvergenceFailure { residual });
        }
        eigenvalues.push(lambda);
        eigenvectors.push(v);
    }
    Ok(EigenResult { eigenvalues, eigenvectors })
}

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if off.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} diagonal entries need {} off-diagonal entries, got {}",
                diag.len(),
                diag.len() - 1,
                off.len()
            )));
        }
        if diag.iter().chain(&off).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite tridiagonal entry".into()));
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * v[i];
                if i > 0 {
                    y += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * v[i + 1];
                }
                y
            })
            .collect()
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    fn norm(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE.sqrt() * self.norm();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.dim() {
            if i > 0 {
                q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / q;
            }
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `j`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, j: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let pad = 1e-12 * self.norm() + f64::MIN_POSITIVE;
        lo -= pad;
        hi += pad;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solves `(T − λ) x = b` in place, LU with partial pivoting.
    fn shifted_solve(&self, lambda: f64, b: &mut [f64]) {
        let n = self.dim();
        let tiny = f64::EPSILON * self.norm();
        let mut d: Vec<f64> = self.diag.iter().map(|x| x - lambda).collect();
        let mut du = self.off.clone();
        let mut dl = self.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        for i in 0..n - 1 {
            if swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= dl[i] * b[i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= du[i] * b[i + 1];
            }
            if i + 2 < n {
                s -= du2[i] * b[i + 2];
            }
            b[i] = s / d[i];
        }
    }

    /// The `k` lowest eigenpairs with unit-norm real eigenvectors.
    pub fn lowest(&self, k: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let n = self.dim();
        if k == 0 || k > n {
            return Err(Error::OutOfRange(format!("requested {k} eigenpairs of a {n}x{n} matrix")));
        }
        let norm = self.norm();
        let tol = 1e-12 * norm * (n as f64).sqrt();
        let cluster = 1e-9 * norm;
        let values: Vec<f64> = (0..k).map(|j| self.eigenvalue(j)).collect();
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
        for (j, &lambda) in values.iter().enumerate() {
            let partners: Vec<usize> = (0..j).filter(|&i| (values[i] - lambda).abs() < cluster).collect();
            // deterministic, non-special start vector
            let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i * 7 + j * 13) % 11) as f64 / 11.0).collect();
            let mut residual = f64::INFINITY;
            for _ in 0..8 {
                self.shifted_solve(lambda, &mut v);
                for &i in &partners {
                    let dot: f64 = v.iter().zip(&vectors[i]).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(&vectors[i]).for_each(|(a, b)| *a -= dot * b);
                }
                let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if !(nv > 0.0) || !nv.is_finite() {
                    return Err(Error::ConvergenceFailure { residual: f64::INFINITY });
                }
                v.iter_mut().for_each(|x| *x /= nv);
                let tv = self.apply(&v);
                residual = tv.iter().zip(&v).map(|(t, x)| (t - lambda * x).powi(2)).sum::<f64>().sqrt();
                if residual < tol {
                    break;
                }
            }
            if !(residual < 1e-9 * norm * n as f64) {
                return Err(Error::ConvergenceFailure { residual });
            }
            vectors.push(v);
        }
        Ok((values, vectors))
    }
}

fn to_complex(v: &[f64]) -> DVector<C64> {
    DVector::from_iterator(v.len(), v.iter().map(|&x| C64::new(x, 0.0)))
}

/// The `k` lowest lab-frame eigenpairs of one total-parity sector.
pub fn sector_eigenpairs(p: &ModelParams, dim: usize, sector: ParitySector, k: usize) -> Result<EigenResult> {
    p.validate()?;
    let (diag, off) = model::sector_bands(p, dim, sector);
    let t = SymTridiagonal::new(diag, off)?;
    let (eigenvalues, blocks) = t.lowest(k)?;
    let mut eigenvectors = Vec::with_capacity(k);
    for b in &blocks {
        let mut v = model::parity_frame_to_lab(&to_complex(b), sector)?.into_amplitudes();
        fix_phase(&mut v);
        eigenvectors.push(v);
    }
    Ok(EigenResult { eigenvalues, eigenvectors })
}

/// The `k ≤ 2` lowest Rabi eigenpairs at a fixed cavity dimension, drawn
/// from both parity sectors.
pub fn rabi_lowest(p: &ModelParams, dim: usize, k: usize) -> Result<EigenResult> {
    if k == 0 || k > 2 {
        return Err(Error::OutOfRange(format!("rabi_lowest supports k = 1 or 2, got {k}")));
    }
    let even = sector_eigenpairs(p, dim, ParitySector::Even, k.min(dim))?;
    if k == 1 && p.omega_q > 0.0 {
        return Ok(even);
    }
    let odd = sector_eigenpairs(p, dim, ParitySector::Odd, 1)?;
    let mut pairs: Vec<(f64, DVector<C64>)> = even
        .eigenvalues
        .into_iter()
        .zip(even.eigenvectors)
        .chain(odd.eigenvalues.into_iter().zip(odd.eigenvectors))
        .collect();
    // stable: on ties the even sector comes first
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.truncate(k);
    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    Ok(EigenResult { eigenvalues, eigenvectors })
}

/// Ground state of one parity sector, converged in the cavity dimension.
///
/// Returns the result at the smaller accepted dimension and that dimension.
fn converged_sector(p: &ModelParams, sector: ParitySector, index: usize) -> Result<(EigenResult, usize)> {
    let k = index + 1;
    let mut dim = truncation_dim(p);
    let mut current = sector_eigenpairs(p, dim, sector, k)?;
    let mut last = (f64::NAN, f64::NAN);
    for _ in 0..2 {
        let bigger = (1.25 * dim as f64).ceil() as usize;
        let next = sector_eigenpairs(p, bigger, sector, k)?;
        let de = (next.eigenvalues[index] - current.eigenvalues[index]).abs();
        let overlap = current.state(index)?.inner(&next.state(index)?).norm();
        let infidelity = 1.0 - overlap;
        if de <= ENERGY_AGREEMENT * p.omega_c && infidelity < FIDELITY_AGREEMENT {
            return Ok((current, dim));
        }
        last = (de, infidelity);
        dim = bigger;
        current = next;
    }
    Err(Error::NonConvergence { dim, energy_change: last.0, infidelity: last.1 })
}

fn single(r: EigenResult, index: usize) -> EigenResult {
    EigenResult { eigenvalues: vec![r.eigenvalues[index]], eigenvectors: vec![r.eigenvectors[index].clone()] }
}

/// Exact ground state with truncation convergence check.
///
/// Diagonalizes at [`truncation_dim`] and at `ceil(1.25×)` that; if energies
/// and vectors disagree the dimension is escalated once more before failing.
/// The ground state lies in the even total-parity sector (for `ω_q = 0`
/// the even member of the degenerate pair is returned).
pub fn converged_ground_state(p: &ModelParams) -> Result<(EigenResult, usize)> {
    let (r, dim) = converged_sector(p, ParitySector::Even, 0)?;
    Ok((single(r, 0), dim))
}

/// Exact ground and first excited states, each converged as in
/// [`converged_ground_state`]; the returned dimension is the larger of the two.
///
/// The first excited state is the lower of the odd-sector ground state and
/// the second even-sector state.
pub fn converged_lowest_states(p: &ModelParams) -> Result<(EigenResult, usize)> {
    let (ground, d0) = converged_sector(p, ParitySector::Even, 0)?;
    let probe = truncation_dim(p);
    let odd0 = sector_eigenpairs(p, probe, ParitySector::Odd, 1)?.eigenvalues[0];
    let even1 = sector_eigenpairs(p, probe, ParitySector::Even, 2)?.eigenvalues[1];
    let (excited, d1) = if odd0 <= even1 {
        let (r, d) = converged_sector(p, ParitySector::Odd, 0)?;
        (single(r, 0), d)
    } else {
        let (r, d) = converged_sector(p, ParitySector::Even, 1)?;
        (single(r, 1), d)
    };
    let dim = d0.max(d1);
    let e0 = StateVector::new(d0, ground.eigenvectors[0].clone())?.padded(dim)?;
    let e1 = StateVector::new(d1, excited.eigenvectors[0].clone())?.padded(dim)?;
    Ok((
        EigenResult {
            eigenvalues: vec![ground.eigenvalues[0], excited.eigenvalues[0]],
            eigenvectors: vec![e0.into_amplitudes(), e1.into_amplitudes()],
        },
        dim,
    ))
}

/// Ground states of both parity sectors at a fixed dimension: the exactly
/// degenerate pair at `ω_q = 0`, the lowest doublet for small `ω_q`.
pub fn parity_doublet(p: &ModelParams, dim: usize) -> Result<EigenResult> {
    let even = sector_eigenpairs(p, dim, ParitySector::Even, 1)?;
    let odd = sector_eigenpairs(p, dim, ParitySector::Odd, 1)?;
    Ok(EigenResult {
        eigenvalues: vec![even.eigenvalues[0], odd.eigenvalues[0]],
        eigenvectors: vec![even.eigenvectors[0].clone(), odd.eigenvectors[0].clone()],
    })
}
