//! Rabi Hamiltonian, its frame transformations, and derived coupling scales.

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qops::{self, CavityVector, ComplexMatrix, StateVector};

/// Physical parameters `(ω_c, ω_q, g)`, all in the same energy unit.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ModelParams {
    pub omega_c: f64,
    pub omega_q: f64,
    pub g: f64,
}

impl ModelParams {
    pub fn new(omega_c: f64, omega_q: f64, g: f64) -> Result<Self> {
        let p = Self { omega_c, omega_q, g };
        p.validate()?;
        Ok(p)
    }

    /// `ω_c = 1` with `g` given in units of `g*_approx = √(ω_c ω_q)/2`.
    pub fn from_g_over_gstar(omega_q: f64, g_over_gstar: f64) -> Result<Self> {
        let g = g_over_gstar * omega_q.max(0.0).sqrt() / 2.0;
        Self::new(1.0, omega_q, g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_c > 0.0) || !self.omega_c.is_finite() {
            return Err(Error::InvalidParameter(format!("omega_c must be > 0, got {}", self.omega_c)));
        }
        if !(self.omega_q >= 0.0) || !self.omega_q.is_finite() {
            return Err(Error::InvalidParameter(format!("omega_q must be >= 0, got {}", self.omega_q)));
        }
        if !(self.g >= 0.0) || !self.g.is_finite() {
            return Err(Error::InvalidParameter(format!("g must be >= 0, got {}", self.g)));
        }
        Ok(())
    }

    /// Coherent displacement scale `g/ω_c`.
    pub fn displacement_scale(&self) -> f64 {
        self.g / self.omega_c
    }
}

/// Total excitation parity sector. `Even` contains the ground state for `ω_q > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParitySector {
    Even,
    Odd,
}

impl ParitySector {
    /// Eigenvalue of `P_tot = −σz Π`.
    pub fn sign(self) -> f64 {
        match self {
            ParitySector::Even => 1.0,
            ParitySector::Odd => -1.0,
        }
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn quadrature(dim: usize) -> Result<ComplexMatrix> {
    let a = qops::annihilation(dim)?;
    Ok(&a + a.adjoint())
}

/// `ω_c a†a + g σx (a + a†) + (ω_q/2) σz` on qubit ⊗ cavity.
pub fn rabi_hamiltonian(p: &ModelParams, dim: usize) -> Result<ComplexMatrix> {
    let (sx, _, sz) = qops::qubit_ops();
    let i2 = ComplexMatrix::identity(2, 2);
    let n = qops::number(dim)?;
    let x = quadrature(dim)?;
    let id = qops::identity(dim)?;
    Ok(qops::tensor(&i2, &n) * real(p.omega_c)
        + qops::tensor(&sx, &x) * real(p.g)
        + qops::tensor(&sz, &id) * real(0.5 * p.omega_q))
}

/// Applies the Rabi Hamiltonian without forming the matrix.
pub fn apply_rabi(p: &ModelParams, psi: &StateVector) -> StateVector {
    let d = psi.dim_cavity();
    let amps = psi.amplitudes();
    let mut out = DVector::zeros(2 * d);
    for s in 0..2 {
        let other = 1 - s;
        let zeeman = if s == 0 { 0.5 * p.omega_q } else { -0.5 * p.omega_q };
        for n in 0..d {
            let mut v = amps[s * d + n] * (p.omega_c * n as f64 + zeeman);
            if n > 0 {
                v += amps[other * d + n - 1] * (p.g * (n as f64).sqrt());
            }
            if n + 1 < d {
                v += amps[other * d + n + 1] * (p.g * ((n + 1) as f64).sqrt());
            }
            out[s * d + n] = v;
        }
    }
    StateVector::new(d, out).expect("same shape as input")
}

/// `⟨ψ|H|ψ⟩` for the Rabi Hamiltonian.
pub fn rabi_energy(p: &ModelParams, psi: &StateVector) -> f64 {
    psi.amplitudes().dotc(apply_rabi(p, psi).amplitudes()).re
}

/// Total excitation parity `P_tot = −σz ⊗ Π`.
pub fn total_parity(dim: usize) -> Result<ComplexMatrix> {
    let (_, _, sz) = qops::qubit_ops();
    Ok(qops::tensor(&(-sz), &qops::parity(dim)?))
}

/// Parity-frame unitary `U_Π = exp(−i(π/4)(1 − Π)σy)`.
///
/// Acts as the identity on even cavity parity and as `−iσy` on odd parity,
/// so that `U_Π H U_Π†` is [`parity_frame_hamiltonian`].
pub fn parity_unitary(dim: usize) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let (_, sy, _) = qops::qubit_ops();
    let i2 = ComplexMatrix::identity(2, 2);
    let even = ComplexMatrix::from_diagonal(&DVector::from_fn(dim, |n, _| real(if n % 2 == 0 { 1.0 } else { 0.0 })));
    let odd = ComplexMatrix::from_diagonal(&DVector::from_fn(dim, |n, _| real(if n % 2 == 1 { 1.0 } else { 0.0 })));
    Ok(qops::tensor(&i2, &even) + qops::tensor(&(sy * C64::new(0.0, -1.0)), &odd))
}

/// `ω_c a†a − g σz (a + a†) + (ω_q/2) Π σz`.
pub fn parity_frame_hamiltonian(p: &ModelParams, dim: usize) -> Result<ComplexMatrix> {
    let (_, _, sz) = qops::qubit_ops();
    let i2 = ComplexMatrix::identity(2, 2);
    Ok(qops::tensor(&i2, &qops::number(dim)?) * real(p.omega_c) - qops::tensor(&sz, &quadrature(dim)?) * real(p.g)
        + qops::tensor(&sz, &qops::parity(dim)?) * real(0.5 * p.omega_q))
}

/// Even-parity (`⟨σz⟩ = −1`) block `ω_c a†a + g(a + a†) − (ω_q/2)Π`.
pub fn parity_minus_block(p: &ModelParams, dim: usize) -> Result<ComplexMatrix> {
    sector_block(p, dim, ParitySector::Even)
}

/// Odd-parity (`⟨σz⟩ = +1`) block `ω_c a†a − g(a + a†) + (ω_q/2)Π`.
pub fn parity_plus_block(p: &ModelParams, dim: usize) -> Result<ComplexMatrix> {
    sector_block(p, dim, ParitySector::Odd)
}

fn sector_block(p: &ModelParams, dim: usize, sector: ParitySector) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let (diag, off) = sector_bands(p, dim, sector);
    let mut m = ComplexMatrix::zeros(dim, dim);
    for n in 0..dim {
        m[(n, n)] = real(diag[n]);
    }
    for n in 0..dim - 1 {
        m[(n, n + 1)] = real(off[n]);
        m[(n + 1, n)] = real(off[n]);
    }
    Ok(m)
}

/// Diagonal and off-diagonal of a parity-frame block; both blocks are real
/// symmetric tridiagonal in the Fock basis.
pub fn sector_bands(p: &ModelParams, dim: usize, sector: ParitySector) -> (Vec<f64>, Vec<f64>) {
    // Even: n + gX − (ω_q/2)Π ; Odd: n − gX + (ω_q/2)Π
    let s = sector.sign();
    let diag = (0..dim)
        .map(|n| {
            let pi = if n % 2 == 0 { 1.0 } else { -1.0 };
            p.omega_c * n as f64 - s * 0.5 * p.omega_q * pi
        })
        .collect();
    let off = (1..dim).map(|n| s * p.g * (n as f64).sqrt()).collect();
    (diag, off)
}

/// Maps a parity-frame block vector back to the lab frame: `U_Π† (v ⊗ |∓z⟩)`.
pub fn parity_frame_to_lab(block: &CavityVector, sector: ParitySector) -> Result<StateVector> {
    let d = block.len();
    let mut plus = CavityVector::zeros(d);
    let mut minus = CavityVector::zeros(d);
    for n in 0..d {
        let even = n % 2 == 0;
        match (sector, even) {
            (ParitySector::Even, true) => minus[n] = block[n],
            (ParitySector::Even, false) => plus[n] = block[n],
            (ParitySector::Odd, true) => plus[n] = block[n],
            (ParitySector::Odd, false) => minus[n] = -block[n],
        }
    }
    StateVector::from_blocks(&plus, &minus)
}

/// `U_P = |+x⟩⟨+x| ⊗ D(α) + |−x⟩⟨−x| ⊗ D(−α)`.
pub fn polaron_unitary(dim: usize, alpha: f64) -> Result<ComplexMatrix> {
    let px = qops::plus_x();
    let mx = qops::minus_x();
    let proj_p = px * px.adjoint();
    let proj_m = mx * mx.adjoint();
    let proj_p = ComplexMatrix::from_iterator(2, 2, proj_p.iter().copied());
    let proj_m = ComplexMatrix::from_iterator(2, 2, proj_m.iter().copied());
    Ok(qops::tensor(&proj_p, &qops::displacement(dim, real(alpha))?)
        + qops::tensor(&proj_m, &qops::displacement(dim, real(-alpha))?))
}

fn sw_detuning(p: &ModelParams) -> Result<f64> {
    let gap = (p.omega_q - p.omega_c).abs();
    if gap < 1e-9 * p.omega_c {
        return Err(Error::Resonance(gap));
    }
    Ok(p.omega_q * p.omega_q - p.omega_c * p.omega_c)
}

/// Schrieffer-Wolff generator
/// `A = g ω_c/(ω_q² − ω_c²) [σx(a − a†) + i(ω_q/ω_c) σy(a + a†)]`.
pub fn sw_generator(p: &ModelParams, dim: usize) -> Result<ComplexMatrix> {
    let denom = sw_detuning(p)?;
    let (sx, sy, _) = qops::qubit_ops();
    let a = qops::annihilation(dim)?;
    let ad = a.adjoint();
    let pref = p.g * p.omega_c / denom;
    Ok((qops::tensor(&sx, &(&a - &ad)) + qops::tensor(&sy, &(&a + &ad)) * C64::new(0.0, p.omega_q / p.omega_c))
        * real(pref))
}

/// Second-order effective Hamiltonian
/// `ω_c a†a + g²ω_q σz (a + a†)²/(ω_q² − ω_c²) + (ω_q/2)σz`.
pub fn sw_effective_hamiltonian(p: &ModelParams, dim: usize) -> Result<ComplexMatrix> {
    let denom = sw_detuning(p)?;
    let (_, _, sz) = qops::qubit_ops();
    let i2 = ComplexMatrix::identity(2, 2);
    let x = quadrature(dim)?;
    Ok(qops::tensor(&i2, &qops::number(dim)?) * real(p.omega_c)
        + qops::tensor(&sz, &(&x * &x)) * real(p.g * p.g * p.omega_q / denom)
        + qops::tensor(&sz, &qops::identity(dim)?) * real(0.5 * p.omega_q))
}

/// Weak-coupling squeeze parameter `r = −¼ ln(1 − 4g²ω_q/(ω_c(ω_q² − ω_c²)))`.
pub fn weak_coupling_squeeze(p: &ModelParams) -> Result<f64> {
    let denom = sw_detuning(p)?;
    let arg = 1.0 - 4.0 * p.g * p.g * p.omega_q / (p.omega_c * denom);
    if !(arg > 0.0) {
        let g_star = g_star(p, GStarForm::Exact).unwrap_or(f64::NAN);
        return Err(Error::Instability { g: p.g, g_star });
    }
    Ok(-0.25 * arg.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GStarForm {
    /// `½ √(ω_c ω_q (1 − (ω_c/ω_q)²))`
    Exact,
    /// `√(ω_c ω_q)/2`, the large-`ω_q` limit.
    Approximate,
}

/// Crossover coupling `g*`.
pub fn g_star(p: &ModelParams, form: GStarForm) -> Result<f64> {
    match form {
        GStarForm::Approximate => Ok(0.5 * (p.omega_c * p.omega_q).sqrt()),
        GStarForm::Exact => {
            if p.omega_q <= p.omega_c {
                return Err(Error::InvalidRegime(format!(
                    "exact g* requires omega_q > omega_c (got omega_q = {}, omega_c = {})",
                    p.omega_q, p.omega_c
                )));
            }
            let ratio = p.omega_c / p.omega_q;
            Ok(0.5 * (p.omega_c * p.omega_q * (1.0 - ratio * ratio)).sqrt())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::{expm, hermiticity_error, max_abs, unitarity_error};

    fn params(wq: f64, g: f64) -> ModelParams {
        ModelParams::new(1.0, wq, g).unwrap()
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ModelParams::new(0.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, -1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, -0.1).is_err());
        assert!(ModelParams::new(1.0, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn noninteracting_hamiltonian() {
        let h = rabi_hamiltonian(&params(1.0, 0.0), 2).unwrap();
        let expected = [0.5, 1.5, -0.5, 0.5];
        for (i, e) in expected.iter().enumerate() {
            assert!((h[(i, i)].re - e).abs() < 1e-15);
        }
        assert!(max_abs(&(h.clone() - ComplexMatrix::from_diagonal(&h.diagonal()))) == 0.0);
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        for (wq, g) in [(0.3, 1.7), (5.0, 0.2), (176.0, 6.6)] {
            let h = rabi_hamiltonian(&params(wq, g), 30).unwrap();
            assert!(hermiticity_error(&h) < 1e-14);
        }
    }

    #[test]
    fn apply_matches_dense() {
        let p = params(3.0, 1.1);
        let dim = 25;
        let h = rabi_hamiltonian(&p, dim).unwrap();
        let amps = DVector::from_fn(2 * dim, |i, _| C64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()));
        let psi = StateVector::new(dim, amps).unwrap();
        let dense = psi.apply(&h).unwrap();
        let sparse = apply_rabi(&p, &psi);
        assert!((dense.amplitudes() - sparse.amplitudes()).norm() < 1e-12);
    }

    #[test]
    fn parity_unitary_is_generated_by_exponent() {
        let dim = 12;
        let (_, sy, _) = qops::qubit_ops();
        let one_minus_pi = qops::identity(dim).unwrap() - qops::parity(dim).unwrap();
        let gen = qops::tensor(&sy, &one_minus_pi) * C64::new(0.0, -std::f64::consts::FRAC_PI_4);
        let u = parity_unitary(dim).unwrap();
        assert!(max_abs(&(expm(&gen) - &u)) < 1e-13);
        assert!(unitarity_error(&u) < 1e-12);
    }

    #[test]
    fn parity_unitary_is_identity_on_even_cavity() {
        let dim = 10;
        let u = parity_unitary(dim).unwrap();
        for n in (0..dim).step_by(2) {
            for s in 0..2 {
                let col = u.column(s * dim + n);
                for (i, z) in col.iter().enumerate() {
                    let expected = if i == s * dim + n { 1.0 } else { 0.0 };
                    assert!((z - real(expected)).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn parity_frame_identity() {
        let dim = 60;
        for (wq, g) in [(5.0, 1.0), (0.0, 2.0), (176.0, 7.0), (0.4, 0.3)] {
            let p = params(wq, g);
            let u = parity_unitary(dim).unwrap();
            let lhs = &u * rabi_hamiltonian(&p, dim).unwrap() * u.adjoint();
            let rhs = parity_frame_hamiltonian(&p, dim).unwrap();
            assert!(max_abs(&(lhs - rhs)) < 1e-10);
        }
    }

    #[test]
    fn parity_frame_is_block_diagonal() {
        let p = params(3.0, 0.8);
        let dim = 20;
        let hp = parity_frame_hamiltonian(&p, dim).unwrap();
        let plus = hp.view((0, 0), (dim, dim)).into_owned();
        let minus = hp.view((dim, dim), (dim, dim)).into_owned();
        assert!(max_abs(&hp.view((0, dim), (dim, dim)).into_owned()) == 0.0);
        assert!(max_abs(&(plus - parity_plus_block(&p, dim).unwrap())) < 1e-14);
        assert!(max_abs(&(minus - parity_minus_block(&p, dim).unwrap())) < 1e-14);
    }

    #[test]
    fn total_parity_commutes() {
        for (wq, g) in [(0.0, 3.0), (5.0, 1.0), (176.0, 10.0)] {
            let dim = 40;
            let h = rabi_hamiltonian(&params(wq, g), dim).unwrap();
            let pt = total_parity(dim).unwrap();
            assert!(max_abs(&(&h * &pt - &pt * &h)) < 1e-12);
        }
    }

    #[test]
    fn lab_mapping_matches_unitary() {
        let dim = 16;
        let u = parity_unitary(dim).unwrap();
        let block = CavityVector::from_fn(dim, |n, _| C64::new(1.0 + n as f64, -0.5 * n as f64));
        for sector in [ParitySector::Even, ParitySector::Odd] {
            let zero = CavityVector::zeros(dim);
            let frame = match sector {
                ParitySector::Even => StateVector::from_blocks(&zero, &block).unwrap(),
                ParitySector::Odd => StateVector::from_blocks(&block, &zero).unwrap(),
            };
            let direct = frame.apply(&u.adjoint()).unwrap();
            let mapped = parity_frame_to_lab(&block, sector).unwrap();
            assert!((direct.amplitudes() - mapped.amplitudes()).norm() < 1e-14);
            let pt = total_parity(dim).unwrap();
            let val = mapped.expectation(&pt).unwrap().re / mapped.norm().powi(2);
            assert!((val - sector.sign()).abs() < 1e-14);
        }
    }

    #[test]
    fn polaron_identity_at_zero() {
        let u = polaron_unitary(15, 0.0).unwrap();
        assert!(max_abs(&(u - ComplexMatrix::identity(30, 30))) < 1e-14);
    }

    #[test]
    fn sw_generator_properties() {
        let p0 = params(20.0, 0.0);
        assert!(max_abs(&sw_generator(&p0, 10).unwrap()) == 0.0);
        let h0 = rabi_hamiltonian(&p0, 10).unwrap();
        assert!(max_abs(&(sw_effective_hamiltonian(&p0, 10).unwrap() - h0)) < 1e-15);

        let a = sw_generator(&params(20.0, 0.2), 30).unwrap();
        assert!(max_abs(&(&a + a.adjoint())) < 1e-12);

        assert!(matches!(sw_generator(&params(1.0, 0.1), 10), Err(Error::Resonance(_))));
        assert!(matches!(weak_coupling_squeeze(&params(1.0, 0.1)), Err(Error::Resonance(_))));
    }

    #[test]
    fn weak_coupling_squeeze_values() {
        assert_eq!(weak_coupling_squeeze(&params(20.0, 0.0)).unwrap(), 0.0);
        // mpmath, 30 digits: ¼ ln(399/319)
        let r = weak_coupling_squeeze(&params(20.0, 1.0)).unwrap();
        assert!((r - 0.05594257852625472).abs() < 1e-15);

        let p = params(20.0, 0.0);
        let gs = g_star(&p, GStarForm::Exact).unwrap();
        let near = weak_coupling_squeeze(&params(20.0, 0.999 * gs)).unwrap();
        let far = weak_coupling_squeeze(&params(20.0, 0.9 * gs)).unwrap();
        assert!(near > far);
        assert!(matches!(weak_coupling_squeeze(&params(20.0, gs)), Err(Error::Instability { .. })));
    }

    #[test]
    fn squeeze_monotone_below_gstar() {
        let gs = g_star(&params(176.0, 0.0), GStarForm::Exact).unwrap();
        let mut last = -1.0;
        for k in 0..100 {
            let g = gs * k as f64 / 100.0;
            let r = weak_coupling_squeeze(&params(176.0, g)).unwrap();
            assert!(r > last);
            last = r;
        }
    }

    #[test]
    fn g_star_values() {
        let p = params(176.0, 0.0);
        let approx = g_star(&p, GStarForm::Approximate).unwrap();
        assert!((approx - 6.6332495807108).abs() < 1e-12);
        let exact = g_star(&p, GStarForm::Exact).unwrap();
        assert!((exact / approx - (1.0 - 1.0 / (176.0f64 * 176.0)).sqrt()).abs() < 2e-5);
        let two = g_star(&params(2.0, 0.0), GStarForm::Exact).unwrap();
        assert!((two - 0.6123724356957945).abs() < 1e-14);
        assert!(matches!(g_star(&params(1.0, 0.0), GStarForm::Exact), Err(Error::InvalidRegime(_))));
    }

    #[test]
    fn polaron_frame_is_diagonal_at_zero_qubit_frequency() {
        // truncation artifacts of D(±g) spread ~2g√n levels below the top
        let dim = 100;
        let g = 1.3;
        let p = params(0.0, g);
        let u = polaron_unitary(dim, -g).unwrap();
        let ht = u.adjoint() * rabi_hamiltonian(&p, dim).unwrap() * &u;
        // rotate the qubit into the σx basis: H_x = (h ⊗ I)† H (h ⊗ I)
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let had = ComplexMatrix::from_row_slice(2, 2, &[real(s), real(s), real(s), real(-s)]);
        let hx = qops::tensor(&had, &qops::identity(dim).unwrap());
        let m = hx.adjoint() * ht * &hx;
        let k = 50;
        let mut off = 0.0f64;
        for q in 0..2 {
            for r in 0..2 {
                for i in 0..k {
                    for j in 0..k {
                        if (q, i) != (r, j) {
                            off = off.max(m[(q * dim + i, r * dim + j)].norm());
                        }
                    }
                }
            }
        }
        assert!(off < 1e-8, "{off}");
        for q in 0..2 {
            for n in 0..k {
                let e = m[(q * dim + n, q * dim + n)].re;
                assert!((e - (n as f64 - g * g)).abs() < 1e-8);
            }
        }
    }
}
