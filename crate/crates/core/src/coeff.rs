//! Coefficient rings for truncated series.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, o: &Self);
    fn sub_assign(&mut self, o: &Self);
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, k: i64) -> Self;
    fn add_mul(&mut self, a: &Self, b: &Self) {
        self.add_assign(&a.mul(b));
    }
    fn neg(&self) -> Self {
        self.scale(-1)
    }
}

/// Coefficients that admit division by integers.
pub trait FieldCoeff: Coeff {
    fn div_int(&self, k: i64) -> Self;
}

impl Coeff for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn sub_assign(&mut self, o: &Self) {
        *self -= o;
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, k: i64) -> Self {
        self * k
    }
}

impl Coeff for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn sub_assign(&mut self, o: &Self) {
        *self -= o;
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, k: i64) -> Self {
        self * BigRational::from_integer(k.into())
    }
}

impl FieldCoeff for BigRational {
    fn div_int(&self, k: i64) -> Self {
        self / BigRational::from_integer(k.into())
    }
}

impl Coeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn sub_assign(&mut self, o: &Self) {
        *self -= o;
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, k: i64) -> Self {
        self * k as f64
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

impl FieldCoeff for f64 {
    fn div_int(&self, k: i64) -> Self {
        self / k as f64
    }
}

/// Dense polynomial in `u_1..u_m` with integer coefficients. `ext[i]` is one
/// more than the degree bound in `u_{i+1}`; missing trailing variables have
/// extent 1. The zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UPoly {
    ext: Vec<usize>,
    c: Vec<BigInt>,
}

impl UPoly {
    pub fn constant(k: BigInt) -> Self {
        if Zero::is_zero(&k) {
            UPoly { ext: vec![], c: vec![] }
        } else {
            UPoly { ext: vec![], c: vec![k] }
        }
    }

    pub fn monomial(k: BigInt, exps: &[u32]) -> Self {
        if Zero::is_zero(&k) {
            return UPoly::constant(k);
        }
        let ext: Vec<usize> = exps.iter().map(|&e| e as usize + 1).collect();
        let size: usize = ext.iter().product();
        let mut c = vec![<BigInt as Zero>::zero(); size];
        c[size - 1] = k;
        let mut p = UPoly { ext, c };
        p.normalize();
        p
    }

    fn strides(ext: &[usize]) -> Vec<usize> {
        let mut s = vec![1; ext.len()];
        for i in (0..ext.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * ext[i + 1];
        }
        s
    }

    fn multi(idx: usize, ext: &[usize]) -> Vec<usize> {
        let mut out = vec![0; ext.len()];
        let mut r = idx;
        for i in (0..ext.len()).rev() {
            out[i] = r % ext[i];
            r /= ext[i];
        }
        out
    }

    /// Offsets of every coefficient of `self` inside an array of extent `to`.
    fn offsets(&self, to: &[usize]) -> Vec<usize> {
        let st = Self::strides(to);
        (0..self.c.len())
            .map(|i| Self::multi(i, &self.ext).iter().zip(&st).map(|(a, s)| a * s).sum())
            .collect()
    }

    fn padded_ext(&self, m: usize) -> Vec<usize> {
        let mut e = self.ext.clone();
        e.resize(m, 1);
        e
    }

    fn normalize(&mut self) {
        if self.c.iter().all(Zero::is_zero) {
            self.ext.clear();
            self.c.clear();
            return;
        }
        loop {
            let mut changed = false;
            for i in 0..self.ext.len() {
                if self.ext[i] <= 1 {
                    continue;
                }
                let last = self.ext[i] - 1;
                let st = Self::strides(&self.ext);
                let top_zero = (0..self.c.len())
                    .filter(|&j| (j / st[i]) % self.ext[i] == last)
                    .all(|j| Zero::is_zero(&self.c[j]));
                if top_zero {
                    let mut ne = self.ext.clone();
                    ne[i] -= 1;
                    let nst = Self::strides(&ne);
                    let mut nc = vec![<BigInt as Zero>::zero(); ne.iter().product()];
                    for (j, v) in self.c.iter().enumerate() {
                        let mi = Self::multi(j, &self.ext);
                        if mi[i] < ne[i] {
                            let k: usize = mi.iter().zip(&nst).map(|(a, s)| a * s).sum();
                            nc[k] = v.clone();
                        }
                    }
                    self.ext = ne;
                    self.c = nc;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        while self.ext.last() == Some(&1) {
            self.ext.pop();
        }
    }

    fn reshape(&self, to: &[usize]) -> Vec<BigInt> {
        let mut out = vec![<BigInt as Zero>::zero(); to.iter().product()];
        for (k, off) in self.offsets(to).into_iter().enumerate() {
            out[off] = self.c[k].clone();
        }
        out
    }

    fn combine(&mut self, o: &Self, sign: i64) {
        if o.c.is_empty() {
            return;
        }
        let m = self.ext.len().max(o.ext.len());
        let a = self.padded_ext(m);
        let b = o.padded_ext(m);
        let to: Vec<usize> = a.iter().zip(&b).map(|(x, y)| *x.max(y)).collect();
        let mut base = if self.c.is_empty() {
            vec![<BigInt as Zero>::zero(); to.iter().product()]
        } else if a == to {
            std::mem::take(&mut self.c)
        } else {
            self.reshape(&to)
        };
        for (k, off) in o.offsets(&to).into_iter().enumerate() {
            if sign > 0 {
                base[off] += &o.c[k];
            } else {
                base[off] -= &o.c[k];
            }
        }
        self.ext = to;
        self.c = base;
        self.normalize();
    }

    /// Coefficient of `u^exps`.
    pub fn coeff(&self, exps: &[u32]) -> BigInt {
        if self.c.is_empty() {
            return <BigInt as Zero>::zero();
        }
        let m = self.ext.len();
        if exps.iter().skip(m).any(|&e| e > 0) {
            return <BigInt as Zero>::zero();
        }
        let mut idx = 0;
        let st = Self::strides(&self.ext);
        for i in 0..m {
            let e = exps.get(i).copied().unwrap_or(0) as usize;
            if e >= self.ext[i] {
                return <BigInt as Zero>::zero();
            }
            idx += e * st[i];
        }
        self.c[idx].clone()
    }

    /// Nonzero terms as (exponent vector of length `m`, coefficient).
    pub fn terms(&self, m: usize) -> Vec<(Vec<u32>, BigInt)> {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, v)| !Zero::is_zero(*v))
            .map(|(i, v)| {
                let mut e: Vec<u32> = Self::multi(i, &self.ext).into_iter().map(|x| x as u32).collect();
                e.resize(m.max(self.ext.len()), 0);
                (e, v.clone())
            })
            .collect()
    }

    /// Substitutes numeric values for all variables.
    pub fn eval(&self, u: &[BigInt]) -> BigInt {
        let mut total = <BigInt as Zero>::zero();
        for (e, v) in self.terms(self.ext.len()) {
            let mut t = v;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= num_traits::pow(u[i].clone(), k as usize);
                }
            }
            total += t;
        }
        total
    }

    pub fn eval_f64(&self, u: &[f64]) -> f64 {
        self.terms(self.ext.len())
            .into_iter()
            .map(|(e, v)| {
                let mut t = v.to_f64().unwrap_or(f64::NAN);
                for (i, &k) in e.iter().enumerate() {
                    t *= u[i].powi(k as i32);
                }
                t
            })
            .sum()
    }

    pub fn all_nonnegative(&self) -> bool {
        self.c.iter().all(|v| !v.is_negative())
    }
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms(self.ext.len());
        if terms.is_empty() {
            return write!(f, "0");
        }
        let m = self.ext.len();
        for (k, (e, v)) in terms.iter().enumerate() {
            let neg = v.is_negative();
            if k > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            let a = v.abs();
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| {
                    let name = if m == 1 { "u".to_string() } else { format!("u{}", i + 1) };
                    if x == 1 {
                        name
                    } else {
                        format!("{name}^{x}")
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{a}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Coeff for UPoly {
    fn zero() -> Self {
        UPoly::constant(<BigInt as Zero>::zero())
    }
    fn one() -> Self {
        UPoly::constant(<BigInt as One>::one())
    }
    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    fn add_assign(&mut self, o: &Self) {
        self.combine(o, 1);
    }
    fn sub_assign(&mut self, o: &Self) {
        self.combine(o, -1);
    }
    fn mul(&self, o: &Self) -> Self {
        if self.c.is_empty() || o.c.is_empty() {
            return <UPoly as Coeff>::zero();
        }
        let m = self.ext.len().max(o.ext.len());
        let a = self.padded_ext(m);
        let b = o.padded_ext(m);
        let to: Vec<usize> = a.iter().zip(&b).map(|(x, y)| x + y - 1).collect();
        let oa = self.offsets(&to);
        let ob = o.offsets(&to);
        let mut c = vec![<BigInt as Zero>::zero(); to.iter().product()];
        for (i, x) in self.c.iter().enumerate() {
            if Zero::is_zero(x) {
                continue;
            }
            for (j, y) in o.c.iter().enumerate() {
                if !Zero::is_zero(y) {
                    c[oa[i] + ob[j]] += x * y;
                }
            }
        }
        let mut p = UPoly { ext: to, c };
        p.normalize();
        p
    }
    fn scale(&self, k: i64) -> Self {
        let mut p = UPoly { ext: self.ext.clone(), c: self.c.iter().map(|v| v * k).collect() };
        p.normalize();
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(k: i64, e: &[u32]) -> UPoly {
        UPoly::monomial(BigInt::from(k), e)
    }

    #[test]
    fn arithmetic() {
        let mut a = mono(1, &[1]);
        a.add_assign(&mono(1, &[]));
        let sq = a.mul(&a);
        assert_eq!(sq.coeff(&[1]), BigInt::from(2));
        assert_eq!(sq.to_string(), "1 + 2*u + u^2");
        let mut d = sq.clone();
        d.sub_assign(&sq);
        assert!(Coeff::is_zero(&d));
        let b = mono(3, &[0, 2]).mul(&mono(2, &[1]));
        assert_eq!(b.coeff(&[1, 2]), BigInt::from(6));
        assert_eq!(b.eval(&[BigInt::from(2), BigInt::from(1)]), BigInt::from(12));
        let mut c = mono(1, &[2]);
        c.sub_assign(&mono(1, &[2]));
        assert_eq!(c, <UPoly as Coeff>::zero());
        assert_eq!(mono(1, &[0, 0]), UPoly::one());
    }
}
