//! The combinatorial branch of `y = F(z, y, u)` on the real axis and its
//! dominant square-root singularity.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use super::numeric::{component, NumericSystem};
use crate::solve::{solve_with, SolveError};
use crate::system::ClassSystem;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("Newton iteration diverged at z = {0}")]
    NewtonDiverged(f64),
    #[error("branch at z = {0} lies past the singularity (det(I - F_y) <= 0)")]
    PastSingularity(f64),
    #[error("no singularity found in (0, 1)")]
    NoSingularityInRange,
    #[error("Jacobian kernel is degenerate: {0}")]
    DegenerateKernel(String),
    #[error("tau = {tau} is not below the dissection singularity {r}")]
    SubcriticalityViolated { tau: f64, r: f64 },
    #[error("finite-difference derivative unstable: {0}")]
    DerivativeUnstable(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Number of series terms used to seed Newton.
const SEED_TERMS: usize = 150;
const MAX_NEWTON: usize = 60;

/// A system at fixed numeric marks together with the partial sums that
/// select the combinatorial branch.
#[derive(Debug, Clone)]
pub struct Branch {
    pub ns: NumericSystem,
    seed: Vec<Vec<f64>>,
}

/// Outcome of a Newton solve on the branch.
#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub z: f64,
    pub y: Vec<f64>,
    pub residual: f64,
    pub steps: usize,
}

impl Branch {
    pub fn new(sys: &ClassSystem, u: &[f64]) -> Result<Self, AnalyticError> {
        let ns = NumericSystem::new(sys, u);
        let series = solve_with(sys, SEED_TERMS, |c, e| {
            e.iter().zip(u).fold(c as f64, |acc, (&k, &x)| acc * x.powi(k as i32))
        })?;
        let seed = series.iter().map(|s| s.coeffs().to_vec()).collect();
        Ok(Branch { ns, seed })
    }

    pub fn len(&self) -> usize {
        self.ns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ns.is_empty()
    }

    /// Partial sums at `z`, completed with the auxiliary variables.
    pub fn partial_sums(&self, z: f64) -> Vec<f64> {
        let mut y = vec![0.0; self.len()];
        for (k, cs) in self.seed.iter().enumerate() {
            y[k] = cs.iter().rev().fold(0.0, |acc, c| acc * z + c);
        }
        let f = self.ns.eval(z, &y);
        for k in self.seed.len()..y.len() {
            y[k] = f[k];
        }
        y
    }

    /// Newton on `y - F(z, y) = 0` from `seed`. Fails unless the result is
    /// non-negative and strictly before the singularity.
    pub fn newton(&self, z: f64, seed: &[f64]) -> Result<BranchPoint, AnalyticError> {
        let n = self.len();
        let mut y = DVector::from_column_slice(seed);
        for step in 1..=MAX_NEWTON {
            let (f, fy, _) = self.ns.jacobian(z, y.as_slice());
            let g = &y - &f;
            let a = DMatrix::identity(n, n) - fy;
            let dx = a.lu().solve(&(-&g)).ok_or(AnalyticError::NewtonDiverged(z))?;
            y += &dx;
            if !y.iter().all(|x| x.is_finite()) || y.amax() > 1e6 {
                return Err(AnalyticError::NewtonDiverged(z));
            }
            if dx.amax() <= 1e-15 * y.amax().max(1.0) {
                let (f, fy, _) = self.ns.jacobian(z, y.as_slice());
                let residual = (&y - &f).amax();
                if residual > 1e-12 * y.amax().max(1.0) {
                    return Err(AnalyticError::NewtonDiverged(z));
                }
                if y.iter().any(|&x| x < -1e-12) {
                    return Err(AnalyticError::NewtonDiverged(z));
                }
                if z > 0.0 && (DMatrix::identity(n, n) - fy).determinant() <= 0.0 {
                    return Err(AnalyticError::PastSingularity(z));
                }
                return Ok(BranchPoint { z, y: y.iter().copied().collect(), residual, steps: step });
            }
        }
        Err(AnalyticError::NewtonDiverged(z))
    }

    /// Class values on the combinatorial branch at `z`.
    pub fn eval(&self, z: f64) -> Result<BranchPoint, AnalyticError> {
        if z == 0.0 {
            return Ok(BranchPoint { z, y: vec![0.0; self.len()], residual: 0.0, steps: 0 });
        }
        match self.newton(z, &self.partial_sums(z)) {
            Ok(p) => Ok(p),
            Err(AnalyticError::PastSingularity(_)) => Err(AnalyticError::PastSingularity(z)),
            Err(_) => {
                // continuation from a point where the partial sums are reliable
                let mut at = z / 2.0;
                let mut depth = 0;
                let mut p = loop {
                    if let Ok(p) = self.newton(at, &self.partial_sums(at)) {
                        break p;
                    }
                    at /= 2.0;
                    depth += 1;
                    if depth > 30 {
                        return Err(AnalyticError::NewtonDiverged(z));
                    }
                };
                let steps = 16;
                let start = at;
                for i in 1..=steps {
                    let zi = start + (z - start) * i as f64 / steps as f64;
                    p = self.newton(zi, &self.predict(&p, zi))?;
                }
                Ok(p)
            }
        }
    }

    /// First-order predictor along the branch.
    fn predict(&self, p: &BranchPoint, z: f64) -> Vec<f64> {
        let n = self.len();
        let (_, fy, fz) = self.ns.jacobian(p.z, &p.y);
        match (DMatrix::identity(n, n) - fy).lu().solve(&fz) {
            Some(dy) => p.y.iter().zip(dy.iter()).map(|(y, d)| y + d * (z - p.z)).collect(),
            None => p.y.clone(),
        }
    }

    /// Walks along the branch with adaptive steps until the step collapses
    /// at the singularity. Returns the last regular point and the bracket
    /// width.
    fn bracket(&self) -> Result<(BranchPoint, f64), AnalyticError> {
        let mut p = self.eval(0.0)?;
        let mut dz = 1e-2;
        while dz > 1e-11 {
            let z = p.z + dz;
            if z >= 1.0 {
                dz /= 2.0;
                continue;
            }
            let trial = self.newton(z, &self.predict(&p, z));
            match trial {
                Ok(q) if p.y.iter().zip(&q.y).all(|(a, b)| (a - b).abs() <= 0.2) => {
                    p = q;
                    dz = (dz * 1.5).min(0.05);
                }
                _ => dz /= 2.0,
            }
        }
        if p.z >= 1.0 - 1e-9 || p.z == 0.0 {
            return Err(AnalyticError::NoSingularityInRange);
        }
        Ok((p, 2.0 * dz))
    }
}

/// Square-root expansion `y = y0 + c1 s + c2 s^2 + O(s^3)` with
/// `s = sqrt(1 - z/rho)`, in the form `y = g - h s` with `h = -c1`.
#[derive(Debug, Clone, Serialize)]
pub struct SingularExpansion {
    pub rho: f64,
    pub names: Vec<String>,
    pub y0: Vec<f64>,
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
    /// `-c1`; non-negative on the combinatorial branch.
    pub h: Vec<f64>,
    /// Right and left kernel vectors of `I - F_y` at the singularity.
    pub kernel: Vec<f64>,
    pub left_kernel: Vec<f64>,
    pub critical_exponent: f64,
    pub residual: f64,
    pub newton_steps: usize,
    /// Residual of the order-`s^2` matching equation.
    pub matching_residual: f64,
}

impl SingularExpansion {
    /// `y0 + c1 s + c2 s^2` at `z`.
    pub fn approx(&self, z: f64) -> Vec<f64> {
        let s = (1.0 - z / self.rho).max(0.0).sqrt();
        (0..self.y0.len()).map(|k| self.y0[k] + self.c1[k] * s + self.c2[k] * s * s).collect()
    }
}

fn unit(n: usize, k: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[k] = 1.0;
    e
}

/// Locates `rho` where the branch meets `det(I - F_y) = 0` and computes the
/// Puiseux coefficients there.
pub fn find_singularity(br: &Branch) -> Result<SingularExpansion, AnalyticError> {
    let n = br.len();
    let ns = &br.ns;
    let (p, _) = br.bracket()?;
    let (_, fy, _) = ns.jacobian(p.z, &p.y);
    let svd = (DMatrix::identity(n, n) - fy).svd(true, true);
    let imin = svd.singular_values.imin();
    let mut v: DVector<f64> = svd.v_t.as_ref().expect("requested").row(imin).transpose();
    let s = v.sum();
    if s.abs() < 1e-12 {
        return Err(AnalyticError::DegenerateKernel("kernel vector sums to zero".into()));
    }
    v /= s;

    // Newton on (y, v, z): y = F, (I - F_y) v = 0, sum(v) = 1
    let mut y = DVector::from_vec(p.y.clone());
    let mut z = p.z;
    let dim = 2 * n + 1;
    let mut steps = 0;
    let zero = vec![0.0; n];
    loop {
        steps += 1;
        if steps > MAX_NEWTON {
            return Err(AnalyticError::NewtonDiverged(z));
        }
        let (f, fy, fz) = ns.jacobian(z, y.as_slice());
        let a = DMatrix::identity(n, n) - &fy;
        let mut g = DVector::zeros(dim);
        g.rows_mut(0, n).copy_from(&(&y - &f));
        g.rows_mut(n, n).copy_from(&(&a * &v));
        g[2 * n] = v.sum() - 1.0;
        let mut j = DMatrix::zeros(dim, dim);
        j.view_mut((0, 0), (n, n)).copy_from(&a);
        j.view_mut((n, n), (n, n)).copy_from(&a);
        for i in 0..n {
            j[(i, 2 * n)] = -fz[i];
            j[(2 * n, n + i)] = 1.0;
        }
        for k in 0..n {
            let js = ns.along(z, (0.0, 0.0), y.as_slice(), &unit(n, k), v.as_slice());
            let col = component(&js, 1, 1);
            for i in 0..n {
                j[(n + i, k)] = -col[i];
            }
        }
        let jz = component(&ns.along(z, (1.0, 0.0), y.as_slice(), &zero, v.as_slice()), 1, 1);
        for i in 0..n {
            j[(n + i, 2 * n)] = -jz[i];
        }
        let dx = j.lu().solve(&(-&g)).ok_or_else(|| AnalyticError::DegenerateKernel("extended Jacobian singular".into()))?;
        for i in 0..n {
            y[i] += dx[i];
            v[i] += dx[n + i];
        }
        z += dx[2 * n];
        if !z.is_finite() || z <= 0.0 {
            return Err(AnalyticError::NewtonDiverged(z));
        }
        if dx.amax() <= 1e-15 * y.amax().max(1.0) || (steps > 3 && dx.amax() <= 1e-13) {
            break;
        }
    }
    let rho = z;
    let (f, fy, fz) = ns.jacobian(rho, y.as_slice());
    let residual = (&y - &f).amax().max(((DMatrix::identity(n, n) - &fy) * &v).amax());

    let a = DMatrix::identity(n, n) - &fy;
    let svd = a.clone().svd(true, false);
    let imin = svd.singular_values.imin();
    let mut w: DVector<f64> = svd.u.as_ref().expect("requested").column(imin).into_owned();
    if w.sum() < 0.0 {
        w = -w;
    }

    let fyy_vv = component(&ns.along(rho, (0.0, 0.0), y.as_slice(), v.as_slice(), &zero), 2, 0) * 2.0;
    let wq = w.dot(&fyy_vv);
    let wz = w.dot(&fz);
    if wq.abs() < 1e-14 {
        return Err(AnalyticError::DegenerateKernel("quadratic term vanishes; the critical exponent is not 1/2".into()));
    }
    let kappa2 = 2.0 * rho * wz / wq;
    if kappa2 <= 0.0 {
        return Err(AnalyticError::DegenerateKernel(format!("kappa^2 = {kappa2} is not positive")));
    }
    let kappa = -kappa2.sqrt();
    let c1 = &v * kappa;

    // order s^2: (I - F_y) c2 = kappa^2/2 F_yy[v,v] - rho F_z, solved with w.c2 = 0
    let rhs2 = &fyy_vv * (0.5 * kappa2) - &fz * rho;
    let mut b = DMatrix::zeros(n + 1, n + 1);
    b.view_mut((0, 0), (n, n)).copy_from(&a);
    for i in 0..n {
        b[(i, n)] = v[i];
        b[(n, i)] = w[i];
    }
    let mut r = DVector::zeros(n + 1);
    r.rows_mut(0, n).copy_from(&rhs2);
    let sol = b.lu().solve(&r).ok_or_else(|| AnalyticError::DegenerateKernel("bordered system singular".into()))?;
    let c2p: DVector<f64> = sol.rows(0, n).into_owned();
    let matching_residual = (&a * &c2p - &rhs2).amax();

    // the kernel component of c2 is fixed by solvability at order s^3
    let fyy_vc = component(&ns.along(rho, (0.0, 0.0), y.as_slice(), v.as_slice(), c2p.as_slice()), 1, 1);
    let fyyy_vvv = component(&ns.along(rho, (0.0, 0.0), y.as_slice(), v.as_slice(), &zero), 3, 0) * 6.0;
    let fzy_v = component(&ns.along(rho, (1.0, 0.0), y.as_slice(), &zero, v.as_slice()), 1, 1);
    let beta = (rho * w.dot(&fzy_v) - w.dot(&fyy_vc) - kappa2 / 6.0 * w.dot(&fyyy_vvv)) / wq;
    let c2 = c2p + &v * beta;

    Ok(SingularExpansion {
        rho,
        names: ns.names.clone(),
        y0: y.iter().copied().collect(),
        h: c1.iter().map(|x| -x).collect(),
        c1: c1.iter().copied().collect(),
        c2: c2.iter().copied().collect(),
        kernel: v.iter().copied().collect(),
        left_kernel: w.iter().copied().collect(),
        critical_exponent: 0.5,
        residual,
        newton_steps: steps,
        matching_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::PatternSet;
    use crate::roots::Mode;
    use crate::system::{build_system, TOTAL};

    fn branch(names: &[&str], mode: Mode, u: &[f64]) -> Branch {
        let sys = build_system(&PatternSet::from_names(names).unwrap(), mode, 6).unwrap().group_classes();
        Branch::new(&sys, u).unwrap()
    }

    /// `Dbar` for unrestricted dissections from `2D^2 - D(z+z^2) + z^3 = 0`.
    fn dbar_closed(z: f64) -> f64 {
        let b = z + z * z;
        (b - (b * b - 8.0 * z * z * z).sqrt()) / 4.0 / z
    }

    #[test]
    fn branch_matches_closed_form() {
        let br = branch(&["C3"], Mode::Full, &[1.0]);
        for z in [0.05, 0.1, 0.15, 0.17] {
            let p = br.eval(z).unwrap();
            assert!(p.residual < 1e-13, "{}", p.residual);
            assert!((p.y[TOTAL] - dbar_closed(z)).abs() < 1e-13, "z = {z}");
        }
        assert!(br.eval(0.18).is_err());
        assert_eq!(br.eval(0.0).unwrap().y, vec![0.0; br.len()]);
    }

    #[test]
    fn unrestricted_singularity() {
        let e = find_singularity(&branch(&["C4"], Mode::Full, &[1.0])).unwrap();
        assert!((e.rho - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-12, "{}", e.rho);
        assert!(e.h.iter().all(|&h| h >= -1e-12));
    }

    #[test]
    fn avoiding_singularities() {
        let e = find_singularity(&branch(&["C3"], Mode::Avoiding, &[])).unwrap();
        assert!((e.rho - 0.29336).abs() < 1e-5);
        let e = find_singularity(&branch(&["patternI"], Mode::Avoiding, &[])).unwrap();
        assert!((e.rho - 0.20867).abs() < 1e-5, "{}", e.rho);
    }

    #[test]
    fn puiseux_consistency() {
        let br = branch(&["C4"], Mode::Avoiding, &[]);
        let e = find_singularity(&br).unwrap();
        let mut prev = f64::INFINITY;
        for eps in [1e-2, 1e-3, 1e-4] {
            let z = e.rho * (1.0 - eps);
            let y = br.eval(z).unwrap().y;
            let err = y.iter().zip(e.approx(z)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let scaled = err / eps.powf(1.5);
            assert!(scaled < 10.0 && scaled < prev * 1.5 + 1e-9, "eps {eps}: {err}");
            prev = scaled;
        }
    }
}
