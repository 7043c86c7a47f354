//! Machine-readable summaries of the numerical analysis.

use serde::Serialize;
use serde_json::{json, Value};

use super::laws::{covariance_matrix, growth_constants, limit_law_constants, tail_ratio};
use super::outerplanar::{outerplanar_law, outerplanar_point, truncated_outerplanar};
use super::singular::AnalyticError;
use crate::fixtures::growth_rows;
use crate::pattern::PatternSet;
use crate::roots::{Mode, DEFAULT_H_CAP};
use crate::solve::solve_at;
use crate::system::{build_system, ClassSystem, SystemError, TOTAL};

/// Series length for truncated sums and tail diagnostics.
pub const SERIES_TERMS: usize = 700;
/// Tolerance used to decide which `g` variant reproduces a reference row.
pub const G_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Context {
    Dissection,
    Outerplanar,
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticReport {
    pub context: Context,
    pub patterns: Vec<String>,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_inv: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_inv: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_variant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<Vec<f64>>>,
    pub diagnostics: Value,
}

impl AsymptoticReport {
    fn empty(context: Context, set: &PatternSet, mode: Mode) -> Self {
        AsymptoticReport {
            context,
            patterns: set.patterns().iter().map(|p| p.name().to_string()).collect(),
            mode,
            r: None,
            r_inv: None,
            alpha: None,
            rho: None,
            rho_inv: None,
            g: None,
            g_variant: None,
            mu: None,
            sigma2: None,
            sigma: None,
            diagnostics: json!({}),
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
}

fn system(set: &PatternSet, mode: Mode) -> Result<ClassSystem, ReportError> {
    Ok(build_system(set, mode, DEFAULT_H_CAP)?.group_classes())
}

/// Tail ratios `[z^n] D / (alpha n^(-3/2) r^(-n))` from `from` to `terms`.
pub fn tail_ratios(sys: &ClassSystem, u: &[i64], r: f64, alpha: f64, terms: usize, from: usize) -> Result<Vec<(usize, f64)>, ReportError> {
    let s = solve_at(sys, terms - 1, u).map_err(AnalyticError::from)?;
    Ok(tail_ratio(s[TOTAL].shift_up().coeffs(), r, alpha, from))
}

/// `r` and `alpha` of the class at all marks 0 (Avoiding) or all marks 1
/// (Full), with a tail-ratio diagnostic.
pub fn dissection_report(set: &PatternSet, mode: Mode, terms: usize) -> Result<AsymptoticReport, ReportError> {
    let sys = system(set, mode)?;
    let u = vec![1.0; sys.m()];
    let ui = vec![1i64; sys.m()];
    let gc = growth_constants(&sys, &u)?;
    let tail = tail_ratios(&sys, &ui, gc.r, gc.alpha, terms, terms.saturating_sub(1))?;
    let mut rep = AsymptoticReport::empty(Context::Dissection, set, mode);
    rep.r = Some(gc.r);
    rep.r_inv = Some(gc.r_inv);
    rep.alpha = Some(gc.alpha);
    rep.diagnostics = json!({
        "sqrt_coefficient": gc.sqrt_coefficient,
        "alpha_convention": "[z^n] D ~ alpha n^(-3/2) r^(-n), alpha = sqrt_coefficient / Gamma(-1/2)",
        "newton_residual": gc.expansion.residual,
        "newton_steps": gc.expansion.newton_steps,
        "matching_residual": gc.expansion.matching_residual,
        "critical_exponent": gc.expansion.critical_exponent,
        "tail_ratio": tail.last().map(|t| json!({"n": t.0, "ratio": t.1})),
    });
    Ok(rep)
}

/// `mu`, `sigma^2` for every mark and the covariance matrix of the
/// dissection limit law.
pub fn limit_law_report(set: &PatternSet) -> Result<AsymptoticReport, ReportError> {
    let sys = system(set, Mode::Full)?;
    let laws = (0..sys.m()).map(|i| limit_law_constants(&sys, i)).collect::<Result<Vec<_>, _>>()?;
    let mut rep = AsymptoticReport::empty(Context::Dissection, set, Mode::Full);
    rep.rho = laws.first().map(|l| l.rho);
    rep.rho_inv = rep.rho.map(|r| 1.0 / r);
    rep.mu = Some(laws.iter().map(|l| l.mu).collect());
    rep.sigma2 = Some(laws.iter().map(|l| l.sigma2).collect());
    let mut diag = json!({ "derivatives": laws.iter().map(|l| json!({
        "rho_prime": l.rho_prime, "rho_second": l.rho_second,
        "first_stencil": l.derivatives.first, "second_stencil": l.derivatives.second,
    })).collect::<Vec<_>>() });
    if sys.m() > 1 {
        let cov = covariance_matrix(&sys)?;
        diag["min_eigenvalue"] = json!(cov.min_eigenvalue);
        rep.sigma = Some(cov.sigma);
    }
    rep.diagnostics = diag;
    Ok(rep)
}

/// Reference `g` for `set` when it is one of the tabulated rows.
fn reference_g(set: &PatternSet) -> Option<f64> {
    let names: Vec<&str> = set.patterns().iter().map(|p| p.name()).collect();
    growth_rows().into_iter().find(|r| r.patterns.iter().map(String::as_str).eq(names.iter().copied())).map(|r| r.g)
}

/// Outerplanar graphs built from the class: `tau`, `rho` and `g` variants
/// for Avoiding mode, limit-law constants per mark for Full mode.
pub fn outerplanar_report(set: &PatternSet, mode: Mode, terms: usize) -> Result<AsymptoticReport, ReportError> {
    let sys = system(set, mode)?;
    let mut rep = AsymptoticReport::empty(Context::Outerplanar, set, mode);
    match mode {
        Mode::Avoiding => {
            let p = outerplanar_point(&sys, &[], &[])?;
            let tr = truncated_outerplanar(&sys, terms)?;
            rep.rho = Some(p.rho);
            rep.rho_inv = Some(1.0 / p.rho);
            let reference = reference_g(set);
            // the tabulated convention when nothing decides otherwise
            let mut chosen = ("connected", tr.g.connected);
            let mut matched = vec![];
            if let Some(g_ref) = reference {
                for (name, v) in tr.g.named() {
                    if (v - g_ref).abs() <= G_TOLERANCE {
                        matched.push(name);
                    }
                }
                if let Some(first) = matched.first() {
                    chosen = tr.g.named().into_iter().find(|(n, _)| n == first).expect("named");
                }
            }
            rep.g = Some(chosen.1);
            rep.g_variant = Some(chosen.0.to_string());
            rep.diagnostics = json!({
                "tau": p.tau,
                "dissection_r": p.r,
                "d_tau": p.d_tau,
                "truncated": tr,
                "reference_g": reference,
                "variants_matching_reference": matched,
            });
        }
        Mode::Full => {
            let laws = (0..sys.m()).map(|i| outerplanar_law(&sys, i)).collect::<Result<Vec<_>, _>>()?;
            let first = &laws[0].at_one;
            rep.rho = Some(first.rho);
            rep.rho_inv = Some(1.0 / first.rho);
            rep.mu = Some(laws.iter().map(|l| l.law.mu).collect());
            rep.sigma2 = Some(laws.iter().map(|l| l.law.sigma2).collect());
            rep.diagnostics = json!({
                "tau": first.tau,
                "d_tau": first.d_tau,
                "marks": laws.iter().map(|l| json!({
                    "tau_prime": l.tau_derivatives.first.extrapolated,
                    "rho_prime": l.law.rho_prime,
                    "rho_second": l.law.rho_second,
                    "implicit": l.implicit,
                    "consistency": l.consistency,
                })).collect::<Vec<_>>(),
            });
        }
    }
    Ok(rep)
}
