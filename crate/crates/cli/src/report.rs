use hodgekit::harmonic::{CocycleCheck, Diagnostics, HarmonicBasis, HarmonicResult, SystemInfo};
use serde::Serialize;

#[derive(Serialize)]
pub struct HarmonicReport {
    pub method: String,
    pub star: String,
    pub p: usize,
    pub counts: Vec<usize>,
    pub cocycle: CocycleCheck,
    pub converged: bool,
    pub iterations: usize,
    pub relative_residual: f64,
    pub solve_seconds: f64,
    pub system: Option<SystemInfo>,
    pub diagnostics: Diagnostics,
    pub notes: Vec<String>,
    pub files: Vec<String>,
}

impl HarmonicReport {
    pub fn new(res: &HarmonicResult, counts: Vec<usize>, cocycle: CocycleCheck, notes: Vec<String>) -> Self {
        HarmonicReport {
            method: res.method.name().to_string(),
            star: res.star.name().to_string(),
            p: res.h.p,
            counts,
            cocycle,
            converged: res.report.converged,
            iterations: res.report.iterations,
            relative_residual: res.report.relative_residual,
            solve_seconds: res.report.wall_time,
            system: res.system.clone(),
            diagnostics: res.diagnostics.clone(),
            notes,
            files: Vec::new(),
        }
    }
}

#[derive(Serialize)]
pub struct BasisEntry {
    pub method: String,
    pub count: usize,
    pub residual_norms: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub threshold: f64,
    pub sigma_ratios: Vec<f64>,
    pub seconds: f64,
}

impl BasisEntry {
    pub fn new(b: &HarmonicBasis, seconds: f64) -> Self {
        let method = serde_json::to_value(b.method).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        BasisEntry {
            method,
            count: b.len(),
            residual_norms: b.residual_norms.clone(),
            eigenvalues: b.eigenvalues.clone(),
            threshold: b.threshold,
            sigma_ratios: b.sigma_ratios.clone(),
            seconds,
        }
    }
}

#[derive(Serialize)]
pub struct BasisReport {
    pub p: usize,
    pub star: String,
    pub betti: Option<usize>,
    pub bases: Vec<BasisEntry>,
    pub principal_angle: Option<f64>,
    pub files: Vec<String>,
}

#[derive(Serialize)]
pub struct PairReport {
    pub p: usize,
    pub star: String,
    pub count: usize,
    /// Row `i` holds the periods of every paired cochain on cycle `i`.
    pub periods: Vec<Vec<f64>>,
    pub identity_error: f64,
    pub files: Vec<String>,
}
