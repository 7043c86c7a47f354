//! Growth constants and Gaussian limit-law constants of dissection classes.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use super::singular::{find_singularity, AnalyticError, Branch, SingularExpansion};
use crate::system::{ClassSystem, TOTAL};

/// `Gamma(-1/2)`.
pub fn gamma_minus_half() -> f64 {
    -2.0 * PI.sqrt()
}

/// `Gamma(-3/2)`.
pub fn gamma_minus_three_halves() -> f64 {
    4.0 * PI.sqrt() / 3.0
}

/// Natural logarithm of a positive big integer.
pub fn big_ln(x: &BigInt) -> f64 {
    assert!(x.is_positive(), "logarithm of a non-positive integer");
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_f64().expect("fits after shifting");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthConstants {
    pub r: f64,
    pub r_inv: f64,
    /// Coefficient of `sqrt(1 - z/r)` in `D = z * Dbar`.
    pub sqrt_coefficient: f64,
    /// `sqrt_coefficient / Gamma(-1/2)`, so that `[z^n] D ~ alpha n^(-3/2) r^(-n)`.
    pub alpha: f64,
    pub expansion: SingularExpansion,
}

/// `r` and `alpha` of the class counted by `sys` at the marks `u`.
pub fn growth_constants(sys: &ClassSystem, u: &[f64]) -> Result<GrowthConstants, AnalyticError> {
    let e = find_singularity(&Branch::new(sys, u)?)?;
    // D = rho (1 - s^2)(y0 + c1 s + ...), so the s coefficient is rho * c1
    let sq = e.rho * e.c1[TOTAL];
    Ok(GrowthConstants { r: e.rho, r_inv: 1.0 / e.rho, sqrt_coefficient: sq, alpha: sq / gamma_minus_half(), expansion: e })
}

/// Singularity of the branch at marks `u`.
pub fn rho_at(sys: &ClassSystem, u: &[f64]) -> Result<f64, AnalyticError> {
    Ok(find_singularity(&Branch::new(sys, u)?)?.rho)
}

/// Finite-difference steps, finest last.
pub const FD_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Central differences at the three steps and their Richardson limit.
#[derive(Debug, Clone, Serialize)]
pub struct Stencil {
    pub raw: Vec<f64>,
    pub extrapolated: f64,
    /// Difference between the two first-level extrapolants.
    pub spread: f64,
}

fn richardson(raw: &[f64]) -> Stencil {
    let r1: Vec<f64> = raw.windows(2).map(|w| (4.0 * w[1] - w[0]) / 3.0).collect();
    let r2 = (16.0 * r1[1] - r1[0]) / 15.0;
    Stencil { raw: raw.to_vec(), extrapolated: r2, spread: (r1[1] - r1[0]).abs() }
}

fn check(name: &str, s: &Stencil) -> Result<(), AnalyticError> {
    if !s.extrapolated.is_finite() || s.spread > 1e-4 * s.extrapolated.abs().max(1.0) {
        return Err(AnalyticError::DerivativeUnstable(format!("{name}: stencil {:?}, spread {:e}", s.raw, s.spread)));
    }
    Ok(())
}

/// First and second derivative of a scalar function at `x0`.
#[derive(Debug, Clone, Serialize)]
pub struct Derivatives {
    pub value: f64,
    pub first: Stencil,
    pub second: Stencil,
}

pub fn differentiate(f: impl Fn(f64) -> Result<f64, AnalyticError> + Sync, x0: f64, name: &str) -> Result<Derivatives, AnalyticError> {
    let mut pts: Vec<f64> = vec![x0];
    for h in FD_STEPS {
        pts.push(x0 + h);
        pts.push(x0 - h);
    }
    let vals = pts.par_iter().map(|&x| f(x)).collect::<Result<Vec<f64>, _>>()?;
    let f0 = vals[0];
    let d1: Vec<f64> = FD_STEPS.iter().enumerate().map(|(i, h)| (vals[1 + 2 * i] - vals[2 + 2 * i]) / (2.0 * h)).collect();
    let d2: Vec<f64> =
        FD_STEPS.iter().enumerate().map(|(i, h)| (vals[1 + 2 * i] - 2.0 * f0 + vals[2 + 2 * i]) / (h * h)).collect();
    let (first, second) = (richardson(&d1), richardson(&d2));
    check(&format!("{name}'"), &first)?;
    check(&format!("{name}''"), &second)?;
    Ok(Derivatives { value: f0, first, second })
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitLaw {
    pub rho: f64,
    pub rho_prime: f64,
    pub rho_second: f64,
    pub mu: f64,
    pub sigma2: f64,
    pub derivatives: Derivatives,
}

impl LimitLaw {
    pub fn from_derivatives(d: Derivatives) -> Self {
        let (rho, r1, r2) = (d.value, d.first.extrapolated, d.second.extrapolated);
        let mu = -r1 / rho;
        LimitLaw { rho, rho_prime: r1, rho_second: r2, mu, sigma2: -r2 / rho + mu * mu + mu, derivatives: d }
    }
}

fn ones_except(m: usize, i: usize, x: f64) -> Vec<f64> {
    let mut u = vec![1.0; m];
    u[i] = x;
    u
}

/// Mean and variance constants of the occurrence count of mark `i`, the
/// other marks held at 1.
pub fn limit_law_constants(sys: &ClassSystem, i: usize) -> Result<LimitLaw, AnalyticError> {
    let m = sys.m();
    assert!(i < m, "mark index out of range");
    let d = differentiate(|x| rho_at(sys, &ones_except(m, i, x)), 1.0, "rho")?;
    Ok(LimitLaw::from_derivatives(d))
}

#[derive(Debug, Clone, Serialize)]
pub struct Covariance {
    pub mu: Vec<f64>,
    /// Row-major `m x m`.
    pub sigma: Vec<Vec<f64>>,
    pub min_eigenvalue: f64,
}

/// Joint covariance constants of all marks.
pub fn covariance_matrix(sys: &ClassSystem) -> Result<Covariance, AnalyticError> {
    let m = sys.m();
    let laws = (0..m).map(|i| limit_law_constants(sys, i)).collect::<Result<Vec<_>, _>>()?;
    let rho = laws.first().map(|l| l.rho).unwrap_or(f64::NAN);
    let mu: Vec<f64> = laws.iter().map(|l| l.mu).collect();
    let mut sigma = vec![vec![0.0; m]; m];
    for i in 0..m {
        sigma[i][i] = laws[i].sigma2;
        for j in 0..i {
            let mixed = |h: f64| -> Result<f64, AnalyticError> {
                let at = |a: f64, b: f64| {
                    let mut u = vec![1.0; m];
                    u[i] += a;
                    u[j] += b;
                    rho_at(sys, &u)
                };
                Ok((at(h, h)? - at(h, -h)? - at(-h, h)? + at(-h, -h)?) / (4.0 * h * h))
            };
            let raw = FD_STEPS.par_iter().map(|&h| mixed(h)).collect::<Result<Vec<f64>, _>>()?;
            let st = richardson(&raw);
            check("rho_uv", &st)?;
            let s = -st.extrapolated / rho + mu[i] * mu[j];
            sigma[i][j] = s;
            sigma[j][i] = s;
        }
    }
    let mat = DMatrix::from_fn(m, m, |a, b| sigma[a][b]);
    let min_eigenvalue = if m == 0 { 0.0 } else { mat.symmetric_eigenvalues().min() };
    Ok(Covariance { mu, sigma, min_eigenvalue })
}

/// Ratio of actual coefficients to `alpha n^(-3/2) r^(-n)`, for `n >= from`.
/// `coeffs[n]` is `[z^n] D`; zero coefficients are skipped.
pub fn tail_ratio(coeffs: &[BigInt], r: f64, alpha: f64, from: usize) -> Vec<(usize, f64)> {
    coeffs
        .iter()
        .enumerate()
        .skip(from)
        .filter(|(_, c)| c.is_positive())
        .map(|(n, c)| {
            let nf = n as f64;
            let ln_pred = alpha.ln() - 1.5 * nf.ln() - nf * r.ln();
            (n, (big_ln(c) - ln_pred).exp())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::PatternSet;
    use crate::roots::Mode;
    use crate::system::build_system;

    fn sys(names: &[&str], mode: Mode) -> ClassSystem {
        build_system(&PatternSet::from_names(names).unwrap(), mode, 6).unwrap().group_classes()
    }

    #[test]
    fn big_ln_matches_f64() {
        assert!((big_ln(&BigInt::from(1_000_000u64)) - 1e6f64.ln()).abs() < 1e-12);
        let big = BigInt::from(3u32).pow(1000);
        assert!((big_ln(&big) - 1000.0 * 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn triangle_mean_is_one_half() {
        let law = limit_law_constants(&sys(&["C3"], Mode::Full), 0).unwrap();
        assert!((law.mu - 0.5).abs() < 1e-8, "{}", law.mu);
        let s2 = (-13.0 + 9.0 * 2f64.sqrt()) / (-12.0 + 8.0 * 2f64.sqrt());
        assert!((law.sigma2 - s2).abs() < 1e-6, "{}", law.sigma2);
        // r'(1) = -3/2 + sqrt 2
        assert!((law.rho_prime - (-1.5 + 2f64.sqrt())).abs() < 1e-8);
    }

    #[test]
    fn covariance_diagonal_matches_single_marks() {
        let pair = covariance_matrix(&sys(&["C3", "C4"], Mode::Full)).unwrap();
        let c3 = limit_law_constants(&sys(&["C3"], Mode::Full), 0).unwrap();
        let c4 = limit_law_constants(&sys(&["C4"], Mode::Full), 0).unwrap();
        assert!((pair.sigma[0][0] - c3.sigma2).abs() < 1e-6);
        assert!((pair.sigma[1][1] - c4.sigma2).abs() < 1e-6);
        assert_eq!(pair.sigma[0][1], pair.sigma[1][0]);
        assert!(pair.min_eigenvalue > -1e-8);
    }
}
