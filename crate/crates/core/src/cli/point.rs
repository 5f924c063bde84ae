//! Solving one `(ω_q, g)` point: exact eigenstates, ansatz fit, diagnostics.

use std::f64::consts::FRAC_PI_2;

use crate::ansatz::{self, NOQParams, SchmidtParams};
use crate::eig::{self, EigenResult};
use crate::error::{Error, Result};
use crate::model::{self, GStarForm, ModelParams};
use crate::optimize::{self, Ansatz, DEConfig, FidelityObjective, OptResult};
use crate::qops::StateVector;

use super::config::{DeOverrides, Objective};

/// CSV header, in column order.
pub const CSV_COLUMNS: &[&str] = &[
    "omega_q",
    "g",
    "g_over_gstar",
    "dim",
    "fidelity_error",
    "energy_error",
    "exact_energy_shift",
    "alpha_c",
    "r",
    "phi",
    "p_minus",
    "purity_noq",
    "purity_exact",
    "de_generations",
    "seed",
    "status",
];

/// How the coupling of a point is given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    /// In units of `g*_approx = √(ω_c ω_q)/2`.
    Relative(f64),
    Absolute(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointRequest {
    pub omega_q: f64,
    pub coupling: Coupling,
    pub ansatz: Ansatz,
    pub objective: Objective,
    pub seed: u64,
    pub dim_override: Option<usize>,
    pub de: DeOverrides,
}

impl PointRequest {
    pub fn model(&self) -> Result<ModelParams> {
        match self.coupling {
            Coupling::Relative(x) => {
                if !(x >= 0.0) {
                    return Err(Error::InvalidParameter(format!("g_over_gstar must be >= 0, got {x}")));
                }
                ModelParams::from_g_over_gstar(self.omega_q, x)
            }
            Coupling::Absolute(g) => ModelParams::new(1.0, self.omega_q, g),
        }
    }
}

/// One sweep row. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PointRow {
    pub omega_q: f64,
    pub g: f64,
    pub g_over_gstar: f64,
    pub dim: usize,
    pub fidelity_error: f64,
    pub energy_error: f64,
    pub exact_energy_shift: f64,
    pub alpha_c: f64,
    pub r: f64,
    pub phi: f64,
    pub p_minus: f64,
    pub purity_noq: f64,
    pub purity_exact: f64,
    pub de_generations: usize,
    pub seed: u64,
    pub status: String,
}

impl PointRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    /// Row for a point that could not be solved.
    pub fn failed(req: &PointRequest, err: &Error) -> Self {
        let (g, ratio) = match req.model() {
            Ok(p) => (p.g, g_over_gstar(&p)),
            Err(_) => match req.coupling {
                Coupling::Relative(x) => (f64::NAN, x),
                Coupling::Absolute(g) => (g, f64::NAN),
            },
        };
        Self {
            omega_q: req.omega_q,
            g,
            g_over_gstar: ratio,
            dim: req.dim_override.unwrap_or(0),
            fidelity_error: f64::NAN,
            energy_error: f64::NAN,
            exact_energy_shift: f64::NAN,
            alpha_c: f64::NAN,
            r: f64::NAN,
            phi: f64::NAN,
            p_minus: f64::NAN,
            purity_noq: f64::NAN,
            purity_exact: f64::NAN,
            de_generations: 0,
            seed: req.seed,
            status: format!("error: {err}"),
        }
    }
}

/// Full single-point report; the row fields come first.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PointReport {
    #[serde(flatten)]
    pub row: PointRow,
    pub omega_c: f64,
    pub ansatz: Ansatz,
    pub objective: Objective,
    pub g_star_approx: f64,
    pub g_star_exact: Option<f64>,
    /// Optimizer vector: `[α_c, r, φ]` (NOQ fidelity), `[p₋, α_c, r]`
    /// (energy) or `[α]` (ECS).
    pub best_params: Vec<f64>,
    pub de_objective: f64,
    pub de_converged: bool,
    pub noq: Option<NOQParams>,
    pub schmidt: Option<SchmidtParams>,
    /// Lowest two exact eigenvalues at `dim`.
    pub exact_eigenvalues: Vec<f64>,
    pub target_energy: f64,
    pub trial_energy: f64,
}

/// Frozen JSON key order of [`PointReport`].
pub const JSON_KEYS: &[&str] = &[
    "omega_q",
    "g",
    "g_over_gstar",
    "dim",
    "fidelity_error",
    "energy_error",
    "exact_energy_shift",
    "alpha_c",
    "r",
    "phi",
    "p_minus",
    "purity_noq",
    "purity_exact",
    "de_generations",
    "seed",
    "status",
    "omega_c",
    "ansatz",
    "objective",
    "g_star_approx",
    "g_star_exact",
    "best_params",
    "de_objective",
    "de_converged",
    "noq",
    "schmidt",
    "exact_eigenvalues",
    "target_energy",
    "trial_energy",
];

fn g_over_gstar(p: &ModelParams) -> f64 {
    let gs = 0.5 * (p.omega_c * p.omega_q).sqrt();
    if gs > 0.0 {
        p.g / gs
    } else {
        f64::NAN
    }
}

/// Ground and first excited states, converged or at the override dimension.
pub fn exact_states(p: &ModelParams, dim_override: Option<usize>) -> Result<(EigenResult, usize)> {
    match dim_override {
        Some(d) => Ok((eig::rabi_lowest(p, d, 2)?, d)),
        None => eig::converged_lowest_states(p),
    }
}

/// A fitted trial state with its parameters.
pub struct Fit {
    pub state: StateVector,
    pub opt: OptResult,
    pub noq: Option<NOQParams>,
    pub schmidt: Option<SchmidtParams>,
}

/// Fits `req.ansatz` against `target` (fidelity) or minimizes the analytic
/// energy (NOQ ground only).
pub fn fit(req: &PointRequest, p: &ModelParams, target: &StateVector) -> Result<Fit> {
    let dim = target.dim_cavity();
    match req.objective {
        Objective::Fidelity => {
            let cfg = req.de.apply(DEConfig::new(req.ansatz.bounds(p), req.seed));
            let opt = FidelityObjective::new(req.ansatz, target.clone()).optimize(&cfg)?;
            let state = req.ansatz.state(&opt.best_params, dim)?;
            let (noq, schmidt) = if req.ansatz.is_noq() {
                let x = &opt.best_params;
                let q = NOQParams::new(x[0], x[1], x[2])?;
                let s = if req.ansatz == Ansatz::NoqGround { Some(ansatz::schmidt_from_noq(&q)?) } else { None };
                (Some(q), s)
            } else {
                (None, None)
            };
            Ok(Fit { state, opt, noq, schmidt })
        }
        Objective::Energy => {
            if req.ansatz != Ansatz::NoqGround {
                return Err(Error::InvalidConfig(format!(
                    "energy objective is defined for noq-ground only, got {}",
                    req.ansatz.name()
                )));
            }
            let cfg = req.de.apply(DEConfig::new(optimize::schmidt_bounds(p), req.seed));
            let opt = optimize::minimize_energy(p, &cfg)?;
            let x = &opt.best_params;
            let s = SchmidtParams::new(x[0], x[1], x[2])?;
            let q = ansatz::noq_from_schmidt(&s)?;
            let state = ansatz::noq_ground(&q, dim)?;
            Ok(Fit { state, opt, noq: Some(q), schmidt: Some(s) })
        }
    }
}

pub fn solve_point(req: &PointRequest) -> Result<PointReport> {
    let p = req.model()?;
    let (exact, dim) = exact_states(&p, req.dim_override)?;
    let index = usize::from(req.ansatz.is_excited());
    let target = exact.state(index)?;
    let fitted = fit(req, &p, &target)?;

    let (alpha_c, r, phi) = match fitted.noq {
        Some(q) => (q.alpha_c, q.r, q.phi),
        None => (fitted.opt.best_params[0], 0.0, FRAC_PI_2),
    };
    let trial_energy = model::rabi_energy(&p, &fitted.state);
    let row = PointRow {
        omega_q: p.omega_q,
        g: p.g,
        g_over_gstar: g_over_gstar(&p),
        dim,
        fidelity_error: 1.0 - ansatz::fidelity(&fitted.state, &target),
        energy_error: trial_energy - exact.eigenvalues[index],
        exact_energy_shift: exact.eigenvalues[0] + 0.5 * p.omega_q,
        alpha_c,
        r,
        phi,
        p_minus: fitted.state.block(1).norm_squared(),
        purity_noq: ansatz::cavity_purity(&fitted.state),
        purity_exact: ansatz::cavity_purity(&target),
        de_generations: fitted.opt.generations_used,
        seed: req.seed,
        status: "ok".into(),
    };
    Ok(PointReport {
        row,
        omega_c: p.omega_c,
        ansatz: req.ansatz,
        objective: req.objective,
        g_star_approx: model::g_star(&p, GStarForm::Approximate)?,
        g_star_exact: model::g_star(&p, GStarForm::Exact).ok(),
        best_params: fitted.opt.best_params.clone(),
        de_objective: fitted.opt.best_objective,
        de_converged: fitted.opt.converged,
        noq: fitted.noq,
        schmidt: fitted.schmidt,
        exact_eigenvalues: exact.eigenvalues.clone(),
        target_energy: exact.eigenvalues[index],
        trial_energy,
    })
}

/// Row of [`solve_point`], with failures folded into the status column.
pub fn solve_row(req: &PointRequest) -> PointRow {
    match solve_point(req) {
        Ok(rep) => rep.row,
        Err(e) => PointRow::failed(req, &e),
    }
}
