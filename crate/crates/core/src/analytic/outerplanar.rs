//! Transfer from dissections to outerplanar graphs: the 2-connected pieces
//! have `B'(y) = D(y)/(2y) + y/2 = (Dbar(y) + y)/2`, and connected graphs
//! are governed by `y = z exp(B'(y))`.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use super::laws::{big_ln, differentiate, gamma_minus_three_halves, rho_at, Derivatives, LimitLaw};
use super::numeric::{component, Jet, JET_ORDER};
use super::singular::{AnalyticError, Branch};
use crate::solve::solve_at;
use crate::system::{ClassSystem, TOTAL};

/// Taylor expansion of every branch variable at `(z, u)` in the directions
/// `s = dz` and `t` with `du = t * dir`, through total degree 3.
pub fn branch_taylor(br: &Branch, z: f64, dir: &[f64]) -> Result<Vec<Jet>, AnalyticError> {
    let ns = &br.ns;
    let n = br.len();
    let y0 = br.eval(z)?.y;
    let (_, fy, _) = ns.jacobian(z, &y0);
    let lu = (DMatrix::identity(n, n) - fy).lu();
    let zj = Jet::linear(z, 1.0, 0.0);
    let uj: Vec<Jet> = ns.u.iter().zip(dir).map(|(&u, &d)| Jet::linear(u, 0.0, d)).collect();
    let mut ys: Vec<Jet> = y0.iter().map(|&v| Jet::constant(v)).collect();
    for d in 1..=JET_ORDER {
        // the degree-d part of F(Y) is F_y Y_d plus what lower parts produce
        let f = ns.eval_jet(&zj, &ys, &uj);
        for i in 0..=d {
            let j = d - i;
            let rhs = component(&f, i, j);
            let sol: DVector<f64> = lu.solve(&rhs).ok_or(AnalyticError::NewtonDiverged(z))?;
            for k in 0..n {
                ys[k].c[i][j] = sol[k];
            }
        }
    }
    Ok(ys)
}

/// `Dbar` and its partial derivatives at one point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DbarJet {
    pub value: f64,
    pub z: f64,
    pub u: f64,
    pub zz: f64,
    pub zu: f64,
    pub uu: f64,
}

fn dbar_jet(br: &Branch, z: f64, dir: &[f64]) -> Result<DbarJet, AnalyticError> {
    let j = branch_taylor(br, z, dir)?[TOTAL];
    Ok(DbarJet { value: j.c[0][0], z: j.c[1][0], u: j.c[0][1], zz: 2.0 * j.c[2][0], zu: j.c[1][1], uu: 2.0 * j.c[0][2] })
}

/// `tau`, `rho_G` and `Dbar` data at fixed marks.
#[derive(Debug, Clone, Serialize)]
pub struct OuterplanarPoint {
    pub tau: f64,
    pub rho: f64,
    /// Dissection singularity at the same marks.
    pub r: f64,
    /// `D(tau) = tau * Dbar(tau)`.
    pub d_tau: f64,
    pub dbar: DbarJet,
    pub newton_steps: usize,
}

/// Solves `tau (Dbar_z(tau) + 1) = 2`, which is `tau B''(tau) = 1`.
pub fn outerplanar_point(sys: &ClassSystem, u: &[f64], dir: &[f64]) -> Result<OuterplanarPoint, AnalyticError> {
    let br = Branch::new(sys, u)?;
    let r = super::singular::find_singularity(&br)?.rho;
    let phi = |t: f64| -> Result<(f64, f64, DbarJet), AnalyticError> {
        let d = dbar_jet(&br, t, dir)?;
        Ok((t * (d.z + 1.0) - 2.0, d.z + 1.0 + t * d.zz, d))
    };
    // phi increases from -2 at 0 to +inf at r
    let (mut lo, mut hi) = (0.0, r);
    let mut t = 0.5 * r;
    let mut steps = 0;
    let d = loop {
        steps += 1;
        let (v, dv, d) = match phi(t) {
            Ok(x) => x,
            Err(AnalyticError::PastSingularity(_)) => {
                hi = t;
                t = 0.5 * (lo + hi);
                continue;
            }
            Err(e) => return Err(e),
        };
        if v < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let next = t - v / dv;
        let next = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        if (next - t).abs() <= 1e-16 * t.max(1e-300) || v == 0.0 || steps > 200 {
            break d;
        }
        t = next;
    };
    if t >= r {
        return Err(AnalyticError::SubcriticalityViolated { tau: t, r });
    }
    let rho = t * (-(d.value + t) / 2.0).exp();
    Ok(OuterplanarPoint { tau: t, rho, r, d_tau: t * d.value, dbar: d, newton_steps: steps })
}

/// Closed-form implicit derivatives at `u = 1` (the `Psi` route).
#[derive(Debug, Clone, Serialize)]
pub struct ImplicitDerivatives {
    pub tau_prime: f64,
    pub rho_prime: f64,
    pub rho_second: f64,
}

fn implicit(p: &OuterplanarPoint) -> ImplicitDerivatives {
    let (t, rho, d) = (p.tau, p.rho, p.dbar);
    let tau_prime = -t * d.zu / (d.z + 1.0 + t * d.zz);
    // rho(u) = Psi(tau(u), u) with Psi = y exp(-(Dbar(y,u) + y)/2) and Psi_y(tau) = 0
    let psi_u = -rho * d.u / 2.0;
    let psi_yu = -rho * d.zu / 2.0;
    let psi_uu = rho * d.u * d.u / 4.0 - rho * d.uu / 2.0;
    ImplicitDerivatives { tau_prime, rho_prime: psi_u, rho_second: psi_yu * tau_prime + psi_uu }
}

#[derive(Debug, Clone, Serialize)]
pub struct OuterplanarLaw {
    pub at_one: OuterplanarPoint,
    pub tau_derivatives: Derivatives,
    pub law: LimitLaw,
    pub implicit: ImplicitDerivatives,
    /// Largest gap between the difference quotients and the implicit route.
    pub consistency: f64,
}

/// Limit-law constants for occurrences of mark `i` in outerplanar graphs.
pub fn outerplanar_law(sys: &ClassSystem, i: usize) -> Result<OuterplanarLaw, AnalyticError> {
    let m = sys.m();
    let at = |x: f64| {
        let mut u = vec![1.0; m];
        u[i] = x;
        u
    };
    let mut dir = vec![0.0; m];
    dir[i] = 1.0;
    let at_one = outerplanar_point(sys, &at(1.0), &dir)?;
    let tau_derivatives = differentiate(|x| Ok(outerplanar_point(sys, &at(x), &dir)?.tau), 1.0, "tau")?;
    let rho_d = differentiate(|x| Ok(outerplanar_point(sys, &at(x), &dir)?.rho), 1.0, "rho_G")?;
    let law = LimitLaw::from_derivatives(rho_d);
    let imp = implicit(&at_one);
    let consistency = [
        tau_derivatives.first.extrapolated - imp.tau_prime,
        law.rho_prime - imp.rho_prime,
        law.rho_second - imp.rho_second,
    ]
    .iter()
    .fold(0.0f64, |a, b| a.max(b.abs()));
    Ok(OuterplanarLaw { at_one, tau_derivatives, law, implicit: imp, consistency })
}

/// Candidate values for the outerplanar growth constant `g`.
#[derive(Debug, Clone, Serialize)]
pub struct GVariants {
    /// `tau (log rho - log tau + 1) + B(tau)`, which equals `C(rho)`.
    pub written: f64,
    /// `C_{3/2} / Gamma(-3/2)` for connected graphs.
    pub connected: f64,
    /// `exp(C(rho)) C_{3/2} / Gamma(-3/2)` for all graphs.
    pub exp_corrected: f64,
    /// Coefficient of `(1 - z/rho)^(3/2)` in `C`.
    pub c_three_halves: f64,
}

impl GVariants {
    pub fn named(&self) -> [(&'static str, f64); 3] {
        [("written", self.written), ("connected", self.connected), ("exp_corrected", self.exp_corrected)]
    }
}

/// Outerplanar constants from a truncated exact `Dbar` series.
#[derive(Debug, Clone, Serialize)]
pub struct TruncatedOuterplanar {
    pub terms: usize,
    pub tau: f64,
    pub rho: f64,
    pub rho_inv: f64,
    pub b_tau: f64,
    pub b3_tau: f64,
    pub g: GVariants,
}

/// `sum a_n n^(k) x^(n - k)` for the falling power `n^(k)`, in log space.
fn sum_series(a: &[(f64, usize)], x: f64, k: usize) -> f64 {
    let lx = x.ln();
    a.iter()
        .filter(|&&(_, n)| n >= k)
        .map(|&(la, n)| {
            let fall: f64 = (0..k).map(|j| (n - j) as f64).product();
            fall * (la + (n - k) as f64 * lx).exp()
        })
        .sum()
}

/// `B(tau)` and `g` variants from the first `terms` coefficients of `Dbar`,
/// with `tau` solved on the truncated series.
pub fn truncated_outerplanar(sys: &ClassSystem, terms: usize) -> Result<TruncatedOuterplanar, AnalyticError> {
    let u = vec![1.0; sys.m()];
    let ui = vec![1i64; sys.m()];
    let s = solve_at(sys, terms - 1, &ui)?;
    let a: Vec<(f64, usize)> =
        s[TOTAL].coeffs().iter().enumerate().filter(|(_, c)| **c > BigInt::from(0)).map(|(n, c)| (big_ln(c), n)).collect();
    let r = rho_at(sys, &u)?;
    let phi = |t: f64| t * (sum_series(&a, t, 1) + 1.0) - 2.0;
    let (mut lo, mut hi) = (1e-9, r);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    let dbar = sum_series(&a, tau, 0);
    let rho = tau * (-(dbar + tau) / 2.0).exp();
    // B = sum a_n z^(n+1) / (2(n+1)) + z^2/4
    let b_tau: f64 = a.iter().map(|&(la, n)| (la + (n + 1) as f64 * tau.ln()).exp() / (2.0 * (n + 1) as f64)).sum::<f64>()
        + tau * tau / 4.0;
    let b3 = sum_series(&a, tau, 2) / 2.0;
    let written = tau * (rho.ln() - tau.ln() + 1.0) + b_tau;
    let c32 = 2.0 / 3.0 * tau * (2.0 / (1.0 + tau * tau * b3)).sqrt();
    let connected = c32 / gamma_minus_three_halves();
    Ok(TruncatedOuterplanar {
        terms,
        tau,
        rho,
        rho_inv: 1.0 / rho,
        b_tau,
        b3_tau: b3,
        g: GVariants { written, connected, exp_corrected: written.exp() * connected, c_three_halves: c32 },
    })
}

/// Values at many marks, in parallel.
pub fn outerplanar_points(sys: &ClassSystem, us: &[Vec<f64>]) -> Vec<Result<OuterplanarPoint, AnalyticError>> {
    let dir = vec![0.0; sys.m()];
    us.par_iter().map(|u| outerplanar_point(sys, u, &dir)).collect()
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

    /// `dD/dz` from `2D^2 - D(z + z^2) + z^3 = 0`.
    fn d_prime_closed(z: f64) -> f64 {
        let b = z + z * z;
        let d = (b - (b * b - 8.0 * z * z * z).sqrt()) / 4.0;
        (d * (1.0 + 2.0 * z) - 3.0 * z * z) / (4.0 * d - b)
    }

    #[test]
    fn implicit_dz_matches_closed_form() {
        let s = sys(&["C3"], Mode::Full);
        let br = Branch::new(&s, &[1.0]).unwrap();
        let r = 3.0 - 2.0 * 2f64.sqrt();
        for k in 1..=10 {
            let z = r * k as f64 / 11.0;
            let d = dbar_jet(&br, z, &[0.0]).unwrap();
            // D = z Dbar
            let dz = d.value + z * d.z;
            assert!((dz - d_prime_closed(z)).abs() < 1e-12, "z = {z}: {dz}");
        }
    }

    #[test]
    fn unrestricted_values() {
        let p = outerplanar_point(&sys(&["C4"], Mode::Full), &[1.0], &[0.0]).unwrap();
        assert!((p.tau - 0.1707649868).abs() < 1e-9, "{}", p.tau);
        assert!((p.rho - 0.1365937336).abs() < 1e-9, "{}", p.rho);
        assert!((p.d_tau - 0.04709517290).abs() < 1e-9, "{}", p.d_tau);
    }
}
