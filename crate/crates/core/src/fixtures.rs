//! Reference data shipped with the crate: initial counts of the restricted
//! classes, growth and limit-law constants, and defining polynomials.

use crate::solve::DefiningPolynomial;
use serde::Deserialize;
use serde_json::Value;

const APPENDIX: &str = include_str!("../fixtures/appendix.json");
const GROWTH: &str = include_str!("../fixtures/growth_constants.json");
const LIMIT_LAWS: &str = include_str!("../fixtures/limit_laws.json");
const POLYNOMIALS: &str = include_str!("../fixtures/polynomials.json");

#[derive(Debug, Clone, Deserialize)]
pub struct CountColumn {
    pub patterns: Vec<String>,
    /// Counts of avoiding dissections for n = 2, 3, ...
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, Deserialize)]
struct Appendix {
    columns: Vec<CountColumn>,
}

pub fn count_columns() -> Vec<CountColumn> {
    serde_json::from_str::<Appendix>(APPENDIX).expect("bundled fixture parses").columns
}

#[derive(Debug, Clone, Deserialize)]
pub struct GrowthRow {
    pub patterns: Vec<String>,
    pub r: f64,
    pub r_inv: f64,
    pub alpha: f64,
    pub rho: f64,
    pub rho_inv: f64,
    pub g: f64,
}

#[derive(Debug, Clone, Deserialize)]
struct Growth {
    rows: Vec<GrowthRow>,
}

pub fn growth_rows() -> Vec<GrowthRow> {
    serde_json::from_str::<Growth>(GROWTH).expect("bundled fixture parses").rows
}

/// Limit-law constants and intermediate outerplanar values, as raw JSON.
pub fn limit_laws() -> Value {
    serde_json::from_str(LIMIT_LAWS).expect("bundled fixture parses")
}

/// Closed forms used by the fixtures.
pub fn sigma2_triangles() -> f64 {
    let s = std::f64::consts::SQRT_2;
    (-13.0 + 9.0 * s) / (-12.0 + 8.0 * s)
}

pub fn mu_squares() -> f64 {
    let s = std::f64::consts::SQRT_2;
    (-30.0 + 21.0 * s) / (-12.0 + 8.0 * s)
}

pub fn sigma2_squares() -> f64 {
    let s = std::f64::consts::SQRT_2;
    (-24216.0 + 17123.0 * s) / (-32.0 * (-3.0 + 2.0 * s).powi(2))
}

/// `p3` or `p4`.
pub fn polynomial(name: &str) -> Option<DefiningPolynomial> {
    let v: Value = serde_json::from_str(POLYNOMIALS).expect("bundled fixture parses");
    let raw: Vec<[i64; 4]> = serde_json::from_value(v.get(name)?.clone()).ok()?;
    Some(DefiningPolynomial {
        name: name.to_string(),
        terms: raw.into_iter().map(|[c, a, b, k]| (c, a as u32, b as u32, k as u32)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_load() {
        let cols = count_columns();
        assert_eq!(cols.len(), 7);
        assert!(cols.iter().all(|c| c.counts.len() == 19));
        assert_eq!(growth_rows().len(), 7);
        assert_eq!(polynomial("p3").unwrap().terms.len(), 7);
        assert!(polynomial("p5").is_none());
        assert!((sigma2_triangles() - 0.39644).abs() < 1e-5);
        assert!((mu_squares() - 0.43933).abs() < 1e-5);
        assert!((sigma2_squares() - 0.44710).abs() < 1e-5);
        assert_eq!(limit_laws()["unrestricted"]["tau"].as_f64(), Some(0.1707649868));
    }
}
