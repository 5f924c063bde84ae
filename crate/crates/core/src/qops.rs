//! Truncated Fock-space and qubit operator algebra.
//!
//! Operators are dense [`ComplexMatrix`] values. Composite qubit ⊗ cavity
//! objects put the qubit on the slow index, so the partial trace over the
//! qubit is a sum over two `dim × dim` blocks.

use nalgebra::{DMatrix, DVector, Vector2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<C64>;

/// Cavity-only state in the Fock basis.
pub type CavityVector = DVector<C64>;

/// Qubit state in the `(|+z⟩, |−z⟩)` basis.
pub type QubitVector = Vector2<C64>;

/// Largest allowed deviation of a truncated state's norm from one.
pub const TRUNCATION_TOL: f64 = 1e-6;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Qubit ⊗ cavity amplitude vector.
///
/// Index `s * dim_cavity + n` holds the amplitude of `|s⟩|n⟩` with `s = 0`
/// for `|+z⟩` and `s = 1` for `|−z⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dim_cavity: usize,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(dim_cavity: usize, amplitudes: DVector<C64>) -> Result<Self> {
        if dim_cavity == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if amplitudes.len() != 2 * dim_cavity {
            return Err(Error::DimensionMismatch(format!(
                "expected {} amplitudes for cavity dimension {dim_cavity}, got {}",
                2 * dim_cavity,
                amplitudes.len()
            )));
        }
        Ok(Self { dim_cavity, amplitudes })
    }

    /// Builds `|+z⟩ ⊗ plus_z + |−z⟩ ⊗ minus_z`.
    pub fn from_blocks(plus_z: &CavityVector, minus_z: &CavityVector) -> Result<Self> {
        if plus_z.len() != minus_z.len() {
            return Err(Error::DimensionMismatch(format!(
                "qubit blocks have lengths {} and {}",
                plus_z.len(),
                minus_z.len()
            )));
        }
        let dim = plus_z.len();
        let amplitudes = DVector::from_iterator(2 * dim, plus_z.iter().chain(minus_z.iter()).copied());
        Self::new(dim, amplitudes)
    }

    /// Product state `qubit ⊗ cavity`.
    pub fn product(qubit: &QubitVector, cavity: &CavityVector) -> Result<Self> {
        Self::from_blocks(&(cavity * qubit[0]), &(cavity * qubit[1]))
    }

    pub fn dim_cavity(&self) -> usize {
        self.dim_cavity
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    /// Cavity block for qubit index `s` (0 = `|+z⟩`, 1 = `|−z⟩`).
    pub fn block(&self, s: usize) -> CavityVector {
        let d = self.dim_cavity;
        self.amplitudes.rows(s * d, d).into_owned()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n > 1e-300) || !n.is_finite() {
            return Err(Error::VanishingNorm(n));
        }
        self.amplitudes.unscale_mut(n);
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    /// `⟨self|other⟩`. Cavity spaces of different size are compared by zero-padding.
    pub fn inner(&self, other: &StateVector) -> C64 {
        let d = self.dim_cavity.min(other.dim_cavity);
        let mut acc = ZERO;
        for s in 0..2 {
            let a = &self.amplitudes.as_slice()[s * self.dim_cavity..s * self.dim_cavity + d];
            let b = &other.amplitudes.as_slice()[s * other.dim_cavity..s * other.dim_cavity + d];
            acc += a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>();
        }
        acc
    }

    /// Copy embedded into a larger (or equal) cavity space, zero-padded.
    pub fn padded(&self, dim_cavity: usize) -> Result<Self> {
        if dim_cavity < self.dim_cavity {
            return Err(Error::DimensionMismatch(format!(
                "cannot pad a {}-level state down to {dim_cavity}",
                self.dim_cavity
            )));
        }
        let mut amps = DVector::zeros(2 * dim_cavity);
        for s in 0..2 {
            for n in 0..self.dim_cavity {
                amps[s * dim_cavity + n] = self.amplitudes[s * self.dim_cavity + n];
            }
        }
        Self::new(dim_cavity, amps)
    }

    /// `⟨self|op|self⟩` for a `2·dim` square operator.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<C64> {
        if op.nrows() != self.amplitudes.len() || op.ncols() != self.amplitudes.len() {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, state has {} amplitudes",
                op.nrows(),
                op.ncols(),
                self.amplitudes.len()
            )));
        }
        Ok(self.amplitudes.dotc(&(op * &self.amplitudes)))
    }

    /// Applies a `2·dim` square operator.
    pub fn apply(&self, op: &ComplexMatrix) -> Result<Self> {
        if op.ncols() != self.amplitudes.len() || op.nrows() != self.amplitudes.len() {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, state has {} amplitudes",
                op.nrows(),
                op.ncols(),
                self.amplitudes.len()
            )));
        }
        Self::new(self.dim_cavity, op * &self.amplitudes)
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        Err(Error::InvalidDimension(dim))
    } else {
        Ok(())
    }
}

pub fn identity(dim: usize) -> Result<ComplexMatrix> {
    check_dim(dim)?;
    Ok(ComplexMatrix::identity(dim, dim))
}

/// Ladder operator `a` with `a[n−1, n] = √n`.
pub fn annihilation(dim: usize) -> Result<ComplexMatrix> {
    check_dim(dim)?;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(m)
}

pub fn creation(dim: usize) -> Result<ComplexMatrix> {
    Ok(annihilation(dim)?.adjoint())
}

/// Number operator `a†a`.
pub fn number(dim: usize) -> Result<ComplexMatrix> {
    check_dim(dim)?;
    Ok(ComplexMatrix::from_diagonal(&DVector::from_fn(dim, |n, _| C64::new(n as f64, 0.0))))
}

/// Cavity parity `Π = (−1)^n`.
pub fn parity(dim: usize) -> Result<ComplexMatrix> {
    check_dim(dim)?;
    Ok(ComplexMatrix::from_diagonal(&DVector::from_fn(dim, |n, _| C64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0))))
}

/// `D(α) = exp(α a† − α* a)` in the truncated space.
pub fn displacement(dim: usize, alpha: C64) -> Result<ComplexMatrix> {
    let a = annihilation(dim)?;
    let gen = a.adjoint() * alpha - a * alpha.conj();
    Ok(expm(&gen))
}

/// `S(r) = exp(r (a² − a†²) / 2)` in the truncated space.
///
/// For `r > 0` this squeezes the `x̂ = (a + a†)/√2` quadrature:
/// `Var x̂ = e^{−2r}/2` in `S(r)|0⟩`. The ansatz states use `S(−r)`, which
/// stretches `x̂` and gives `⟨α,r|−α,r⟩ = exp(−2α² e^{−2r})`.
pub fn squeeze(dim: usize, r: f64) -> Result<ComplexMatrix> {
    let a = annihilation(dim)?;
    let a2 = &a * &a;
    let gen = (&a2 - a2.adjoint()) * C64::new(0.5 * r, 0.0);
    Ok(expm(&gen))
}

/// Real Fock amplitudes of `D(α) S(−r) |0⟩` for `n < dim`, without truncation.
///
/// The amplitudes follow from the eigenvalue equation
/// `(a cosh r − a† sinh r)|ψ⟩ = α e^{−r}|ψ⟩`, run forward from the closed-form
/// vacuum amplitude. A running log-scale keeps large displacements finite.
pub fn displaced_squeezed_amplitudes(dim: usize, alpha: f64, r: f64) -> Vec<f64> {
    let (ch, sh) = (r.cosh(), r.sinh());
    let drive = alpha * (-r).exp();
    let log_c0 = -0.5 * alpha * alpha * (1.0 - r.tanh()) - 0.5 * ch.ln();

    let mut s = vec![0.0; dim];
    s[0] = 1.0;
    let mut log_scale = log_c0;
    const BIG: f64 = 1e150;
    for n in 0..dim.saturating_sub(1) {
        let prev = if n > 0 { s[n - 1] } else { 0.0 };
        let next = (drive * s[n] + sh * (n as f64).sqrt() * prev) / (ch * ((n + 1) as f64).sqrt());
        s[n + 1] = next;
        if next.abs() > BIG {
            for v in s[..=n + 1].iter_mut() {
                *v /= BIG;
            }
            log_scale += BIG.ln();
        }
    }
    s.iter().map(|&v| if v == 0.0 { 0.0 } else { v.signum() * (log_scale + v.abs().ln()).exp() }).collect()
}

/// Normalized `|α_c, r⟩ = D(α_c) S(−r) |0⟩` in a `dim`-level cavity.
///
/// Fails with [`Error::TruncationLoss`] when the truncated norm deviates from
/// one by more than [`TRUNCATION_TOL`].
pub fn displaced_squeezed_state(dim: usize, alpha_c: f64, r: f64) -> Result<CavityVector> {
    check_dim(dim)?;
    let amps = displaced_squeezed_amplitudes(dim, alpha_c, r);
    let norm = amps.iter().map(|x| x * x).sum::<f64>().sqrt();
    let deviation = (1.0 - norm).abs();
    if !norm.is_finite() || deviation > TRUNCATION_TOL {
        return Err(Error::TruncationLoss { dim, deviation });
    }
    Ok(DVector::from_iterator(dim, amps.iter().map(|&x| C64::new(x / norm, 0.0))))
}

/// Pauli matrices `(σx, σy, σz)` in the `(|+z⟩, |−z⟩)` basis.
pub fn qubit_ops() -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let i = C64::new(0.0, 1.0);
    let sx = ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
    let sy = ComplexMatrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO]);
    let sz = ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
    (sx, sy, sz)
}

/// Kronecker product `A_qubit ⊗ B_cavity` (qubit index slow).
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn plus_z() -> QubitVector {
    QubitVector::new(ONE, ZERO)
}

pub fn minus_z() -> QubitVector {
    QubitVector::new(ZERO, ONE)
}

pub fn plus_x() -> QubitVector {
    QubitVector::new(ONE, ONE) * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
}

pub fn minus_x() -> QubitVector {
    QubitVector::new(ONE, -ONE) * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
}

/// Pointer states `|±[φ]⟩ = cos(φ/2)|+z⟩ ∓ sin(φ/2)|−z⟩`, with `⟨+[φ]|−[φ]⟩ = cos φ`.
pub fn qubit_pointer(phi: f64) -> (QubitVector, QubitVector) {
    let (s, c) = (0.5 * phi).sin_cos();
    (QubitVector::new(C64::new(c, 0.0), C64::new(-s, 0.0)), QubitVector::new(C64::new(c, 0.0), C64::new(s, 0.0)))
}

/// Exact Fock matrix elements `⟨m|D(β)|n⟩` for `m, n < dim`.
///
/// Unlike [`displacement`], which exponentiates the truncated generator, this
/// returns the leading block of the untruncated operator, so it carries no
/// boundary artifacts. Entries come from the normalized associated-Laguerre
/// recurrence along each diagonal.
pub fn displacement_elements(dim: usize, beta: C64) -> Result<ComplexMatrix> {
    check_dim(dim)?;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for_each_displacement_diagonal(dim, beta, |k, n, upper, lower| {
        m[(n + k, n)] = lower;
        if k > 0 {
            m[(n, n + k)] = upper;
        }
    });
    Ok(m)
}

/// Visits `⟨n+k|D(β)|n⟩` (`lower`) and `⟨n|D(β)|n+k⟩` (`upper`) for every
/// `k ≥ 0` and `n + k < dim`.
pub(crate) fn for_each_displacement_diagonal<F>(dim: usize, beta: C64, mut visit: F)
where
    F: FnMut(usize, usize, C64, C64),
{
    let x = beta.norm_sqr();
    if x == 0.0 {
        for n in 0..dim {
            visit(0, n, ONE, ONE);
        }
        for k in 1..dim {
            for n in 0..dim - k {
                visit(k, n, ZERO, ZERO);
            }
        }
        return;
    }
    let theta = beta.arg();
    let ln_x = x.ln();
    const BIG: f64 = 1e100;
    let mut ln_kfact = 0.0;
    for k in 0..dim {
        if k > 0 {
            ln_kfact += (k as f64).ln();
        }
        // f_n = sqrt(n!/(n+k)!) x^{k/2} e^{-x/2} L_n^{(k)}(x), kept as s_n · e^{ln_scale}
        let mut ln_scale = 0.5 * k as f64 * ln_x - 0.5 * x - 0.5 * ln_kfact;
        let lower_phase = C64::from_polar(1.0, k as f64 * theta);
        let upper_phase = C64::from_polar(1.0, k as f64 * (std::f64::consts::PI - theta));
        let (mut s_prev, mut s) = (0.0, 1.0);
        let kf = k as f64;
        for n in 0..dim - k {
            let f = s * ln_scale.exp();
            visit(k, n, upper_phase * f, lower_phase * f);
            let nf = n as f64;
            let next = ((2.0 * nf + 1.0 + kf - x) * s - (nf * (nf + kf)).sqrt() * s_prev)
                / ((nf + 1.0) * (nf + 1.0 + kf)).sqrt();
            s_prev = s;
            s = next;
            if s.abs() > BIG {
                s /= BIG;
                s_prev /= BIG;
                ln_scale += BIG.ln();
            }
        }
    }
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA_13: f64 = 5.371920351148152;

    let n = a.nrows();
    let norm1 = (0..n).map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let squarings = if norm1 > THETA_13 { (norm1 / THETA_13).log2().ceil() as i32 } else { 0 };
    let scaled = a * C64::new(0.5f64.powi(squarings), 0.0);

    let c = |x: f64| C64::new(x, 0.0);
    let ident = ComplexMatrix::identity(n, n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (&a6 * c(B[13]) + &a4 * c(B[11]) + &a2 * c(B[9]));
    let u = &scaled * (u_inner + &a6 * c(B[7]) + &a4 * c(B[5]) + &a2 * c(B[3]) + &ident * c(B[1]));
    let v_inner = &a6 * (&a6 * c(B[12]) + &a4 * c(B[10]) + &a2 * c(B[8]));
    let v = v_inner + &a6 * c(B[6]) + &a4 * c(B[4]) + &a2 * c(B[2]) + &ident * c(B[0]);

    let numer = &v + &u;
    let denom = &v - &u;
    let mut r = denom.lu().solve(&numer).expect("Padé denominator is nonsingular for scaled arguments");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// `max |M − M†|`.
pub fn hermiticity_error(m: &ComplexMatrix) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |M M† − I|`.
pub fn unitarity_error(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    (m * m.adjoint() - ComplexMatrix::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |M|` entrywise.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Leading `k × k` block.
pub fn interior(m: &ComplexMatrix, k: usize) -> ComplexMatrix {
    m.view((0, 0), (k, k)).into_owned()
}
