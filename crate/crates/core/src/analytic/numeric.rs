//! Floating-point view of a class system and truncated bivariate Taylor
//! arithmetic used for directional derivatives.

use nalgebra::{DMatrix, DVector};

use crate::system::{ClassSystem, Term};

/// Truncated power series in two infinitesimals `s`, `t`, kept through
/// total degree 3. `c[i][j]` is the coefficient of `s^i t^j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub c: [[f64; 4]; 4],
}

pub const JET_ORDER: usize = 3;

impl Jet {
    pub fn constant(x: f64) -> Jet {
        let mut c = [[0.0; 4]; 4];
        c[0][0] = x;
        Jet { c }
    }

    /// `x0 + a*s + b*t`.
    pub fn linear(x0: f64, a: f64, b: f64) -> Jet {
        let mut j = Jet::constant(x0);
        j.c[1][0] = a;
        j.c[0][1] = b;
        j
    }

    pub fn value(&self) -> f64 {
        self.c[0][0]
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let mut r = *self;
        for i in 0..4 {
            for j in 0..4 - i {
                r.c[i][j] += o.c[i][j];
            }
        }
        r
    }

    pub fn scale(&self, k: f64) -> Jet {
        let mut r = *self;
        for row in r.c.iter_mut() {
            for x in row.iter_mut() {
                *x *= k;
            }
        }
        r
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let mut r = [[0.0; 4]; 4];
        for i1 in 0..4 {
            for j1 in 0..4 - i1 {
                let a = self.c[i1][j1];
                if a == 0.0 {
                    continue;
                }
                for i2 in 0..4 - i1 - j1 {
                    for j2 in 0..4 - i1 - j1 - i2 {
                        r[i1 + i2][j1 + j2] += a * o.c[i2][j2];
                    }
                }
            }
        }
        Jet { c: r }
    }

    pub fn powi(&self, mut e: u32) -> Jet {
        let mut base = *self;
        let mut acc = Jet::constant(1.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Drops every coefficient of total degree above `d`.
    pub fn truncate(&self, d: usize) -> Jet {
        let mut r = *self;
        for i in 0..4 {
            for j in 0..4 - i {
                if i + j > d {
                    r.c[i][j] = 0.0;
                }
            }
        }
        r
    }
}

#[derive(Debug, Clone)]
struct NTerm {
    c: f64,
    z: u32,
    u: Vec<u32>,
    vars: Vec<(usize, u32)>,
}

impl NTerm {
    fn new(t: &Term) -> Self {
        NTerm { c: t.coeff as f64, z: t.z, u: t.u.clone(), vars: t.vars.clone() }
    }
}

/// `y = F(z, y, u)` with real coefficients. Built from the flattened
/// system, so it may carry more variables than the source system; the
/// source variables keep their indices.
#[derive(Debug, Clone)]
pub struct NumericSystem {
    pub names: Vec<String>,
    /// Number of variables of the source system.
    pub n_source: usize,
    pub u: Vec<f64>,
    eqs: Vec<Vec<NTerm>>,
}

impl NumericSystem {
    pub fn new(sys: &ClassSystem, u: &[f64]) -> Self {
        assert_eq!(u.len(), sys.m(), "one value per mark");
        let flat = sys.flattened();
        let eqs = flat.expanded().iter().map(|ts| ts.iter().map(NTerm::new).collect()).collect();
        NumericSystem {
            names: flat.vars.iter().map(|v| v.name.clone()).collect(),
            n_source: sys.vars.len(),
            u: u.to_vec(),
            eqs,
        }
    }

    pub fn with_u(&self, u: &[f64]) -> Self {
        assert_eq!(u.len(), self.u.len());
        NumericSystem { u: u.to_vec(), ..self.clone() }
    }

    pub fn len(&self) -> usize {
        self.eqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eqs.is_empty()
    }

    fn weight(&self, t: &NTerm) -> f64 {
        t.u.iter().zip(&self.u).fold(t.c, |acc, (&e, &x)| acc * x.powi(e as i32))
    }

    pub fn eval(&self, z: f64, y: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.len(),
            self.eqs.iter().map(|ts| {
                ts.iter()
                    .map(|t| {
                        let mut v = self.weight(t) * z.powi(t.z as i32);
                        for &(k, e) in &t.vars {
                            v *= y[k].powi(e as i32);
                        }
                        v
                    })
                    .sum()
            }),
        )
    }

    /// `(F, F_y, F_z)` at a point.
    pub fn jacobian(&self, z: f64, y: &[f64]) -> (DVector<f64>, DMatrix<f64>, DVector<f64>) {
        let n = self.len();
        let mut f = DVector::zeros(n);
        let mut fy = DMatrix::zeros(n, n);
        let mut fz = DVector::zeros(n);
        for (i, ts) in self.eqs.iter().enumerate() {
            for t in ts {
                let w = self.weight(t);
                let zp = z.powi(t.z as i32);
                let pw: Vec<f64> = t.vars.iter().map(|&(k, e)| y[k].powi(e as i32)).collect();
                let prod: f64 = pw.iter().product();
                f[i] += w * zp * prod;
                if t.z > 0 {
                    fz[i] += w * t.z as f64 * z.powi(t.z as i32 - 1) * prod;
                }
                for (a, &(k, e)) in t.vars.iter().enumerate() {
                    let others: f64 = pw.iter().enumerate().filter(|&(b, _)| b != a).map(|(_, p)| p).product();
                    fy[(i, k)] += w * zp * others * e as f64 * y[k].powi(e as i32 - 1);
                }
            }
        }
        (f, fy, fz)
    }

    /// `F` evaluated on jets, with the marks also allowed to move.
    pub fn eval_jet(&self, z: &Jet, y: &[Jet], u: &[Jet]) -> Vec<Jet> {
        self.eqs
            .iter()
            .map(|ts| {
                let mut acc = Jet::constant(0.0);
                for t in ts {
                    let mut v = z.powi(t.z).scale(t.c);
                    for (&e, uj) in t.u.iter().zip(u) {
                        if e > 0 {
                            v = v.mul(&uj.powi(e));
                        }
                    }
                    for &(k, e) in &t.vars {
                        v = v.mul(&y[k].powi(e));
                    }
                    acc = acc.add(&v);
                }
                acc
            })
            .collect()
    }

    /// `F` along `z + dz_s*s + dz_t*t`, `y + a*s + b*t` at the current marks.
    pub fn along(&self, z: f64, dz: (f64, f64), y: &[f64], a: &[f64], b: &[f64]) -> Vec<Jet> {
        let zj = Jet::linear(z, dz.0, dz.1);
        let yj: Vec<Jet> = (0..y.len()).map(|k| Jet::linear(y[k], a[k], b[k])).collect();
        let uj: Vec<Jet> = self.u.iter().map(|&x| Jet::constant(x)).collect();
        self.eval_jet(&zj, &yj, &uj)
    }
}

/// Coefficient `c[i][j]` of every component.
pub fn component(js: &[Jet], i: usize, j: usize) -> DVector<f64> {
    DVector::from_iterator(js.len(), js.iter().map(|x| x.c[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::PatternSet;
    use crate::roots::Mode;
    use crate::system::build_system;

    #[test]
    fn jet_power_matches_binomial() {
        let x = Jet::linear(2.0, 1.0, 0.0);
        let p = x.powi(5);
        // (2+s)^5 = 32 + 80 s + 80 s^2 + 40 s^3 + ...
        assert_eq!([p.c[0][0], p.c[1][0], p.c[2][0], p.c[3][0]], [32.0, 80.0, 80.0, 40.0]);
        let xy = Jet::linear(1.0, 1.0, 1.0).powi(3);
        assert_eq!(xy.c[1][1], 6.0);
        assert_eq!(xy.c[1][2], 3.0);
    }

    #[test]
    fn jacobian_matches_jets() {
        let sys = build_system(&PatternSet::from_names(&["C5"]).unwrap(), Mode::Avoiding, 6).unwrap().group_classes();
        let ns = NumericSystem::new(&sys, &[]);
        let n = ns.len();
        let y: Vec<f64> = (0..n).map(|k| 0.05 + 0.01 * k as f64).collect();
        let (f, fy, fz) = ns.jacobian(0.2, &y);
        let zero = vec![0.0; n];
        let base = ns.along(0.2, (1.0, 0.0), &y, &zero, &zero);
        assert!((component(&base, 0, 0) - &f).norm() < 1e-14);
        assert!((component(&base, 1, 0) - &fz).norm() < 1e-12);
        for k in 0..n {
            let mut e = zero.clone();
            e[k] = 1.0;
            let js = ns.along(0.2, (0.0, 0.0), &y, &e, &zero);
            assert!((component(&js, 1, 0) - fy.column(k)).norm() < 1e-12);
        }
    }
}
