//! Truncated power series in `z` with exact coefficients.

use crate::coeff::{Coeff, FieldCoeff};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::fmt;

/// Coefficients `c_0..=c_N` of a series known through order `N`.
#[derive(Clone, PartialEq)]
pub struct TruncSeries<C> {
    c: Vec<C>,
}

impl<C: Coeff> TruncSeries<C> {
    pub fn zero(order: usize) -> Self {
        TruncSeries { c: vec![C::zero(); order + 1] }
    }

    pub fn from_coeffs(c: Vec<C>) -> Self {
        assert!(!c.is_empty(), "a series needs at least c_0");
        TruncSeries { c }
    }

    /// The series `z` truncated at `order`.
    pub fn z(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.c[1] = C::one();
        }
        s
    }

    pub fn constant(k: C, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.c[0] = k;
        s
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.c
    }

    pub fn coeff(&self, n: usize) -> &C {
        &self.c[n]
    }

    pub fn set(&mut self, n: usize, v: C) {
        self.c[n] = v;
    }

    pub fn truncate(&self, order: usize) -> Self {
        TruncSeries { c: self.c[..=order.min(self.order())].to_vec() }
    }

    pub fn valuation(&self) -> Option<usize> {
        self.c.iter().position(|x| !x.is_zero())
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> TruncSeries<D> {
        TruncSeries { c: self.c.iter().map(f).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        let c = (0..=n)
            .map(|i| {
                let mut v = self.c[i].clone();
                v.add_assign(&o.c[i]);
                v
            })
            .collect();
        TruncSeries { c }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        let c = (0..=n)
            .map(|i| {
                let mut v = self.c[i].clone();
                v.sub_assign(&o.c[i]);
                v
            })
            .collect();
        TruncSeries { c }
    }

    pub fn scale(&self, k: &C) -> Self {
        TruncSeries { c: self.c.iter().map(|x| x.mul(k)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        let mut c = vec![C::zero(); n + 1];
        for i in 0..=n {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..=n - i {
                if !o.c[j].is_zero() {
                    c[i + j].add_mul(&self.c[i], &o.c[j]);
                }
            }
        }
        TruncSeries { c }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(C::one(), self.order());
        let mut base = self.clone();
        let mut e = k;
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

    /// Multiplication by `z`; the order grows by one.
    pub fn shift_up(&self) -> Self {
        let mut c = Vec::with_capacity(self.c.len() + 1);
        c.push(C::zero());
        c.extend(self.c.iter().cloned());
        TruncSeries { c }
    }

    /// Division by `z`; requires a zero constant term and lowers the order.
    pub fn div_z(&self) -> Self {
        assert!(self.c[0].is_zero(), "division by z needs c_0 = 0");
        assert!(self.order() >= 1);
        TruncSeries { c: self.c[1..].to_vec() }
    }

    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        TruncSeries { c: (1..self.c.len()).map(|i| self.c[i].scale(i as i64)).collect() }
    }

    /// `f(g)` for `g` with zero constant term, by Horner's rule.
    pub fn compose(&self, g: &Self) -> Self {
        assert!(g.c[0].is_zero(), "inner series must vanish at 0");
        let n = self.order().min(g.order());
        let g = g.truncate(n);
        let mut acc = Self::constant(self.c[n].clone(), n);
        for i in (0..n).rev() {
            acc = acc.mul(&g);
            acc.c[0].add_assign(&self.c[i]);
        }
        acc
    }

    /// First index at or below `order` with a nonzero coefficient.
    pub fn first_nonzero(&self, order: usize) -> Option<usize> {
        (0..=order.min(self.order())).find(|&i| !self.c[i].is_zero())
    }
}

impl<C: FieldCoeff> TruncSeries<C> {
    /// Antiderivative with zero constant term; the order grows by one.
    pub fn integrate(&self) -> Self {
        let mut c = Vec::with_capacity(self.c.len() + 1);
        c.push(C::zero());
        for (i, v) in self.c.iter().enumerate() {
            c.push(v.div_int(i as i64 + 1));
        }
        TruncSeries { c }
    }

    /// `exp(f)` for `f` with zero constant term, from `E' = f' E`.
    pub fn exp(&self) -> Self {
        assert!(self.c[0].is_zero(), "exp needs a zero constant term");
        let n = self.order();
        let df = self.derivative();
        let mut e = vec![C::zero(); n + 1];
        e[0] = C::one();
        for k in 1..=n {
            // k e_k = sum_{j=1}^{k} j f_j e_{k-j}
            let mut acc = C::zero();
            for j in 1..=k {
                acc.add_mul(&df.c[j - 1], &e[k - j]);
            }
            e[k] = acc.div_int(k as i64);
        }
        TruncSeries { c: e }
    }
}

impl<C: Coeff + fmt::Display> fmt::Debug for TruncSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| format!("({v})z^{i}"))
            .collect();
        write!(f, "{} + O(z^{})", if parts.is_empty() { "0".into() } else { parts.join(" + ") }, self.order() + 1)
    }
}

/// Exact rational copy of an integer series.
pub fn to_rational(s: &TruncSeries<BigInt>) -> TruncSeries<BigRational> {
    s.map(|v| BigRational::from_integer(v.clone()))
}

/// `D = z * Dbar`: `[z^n] D = [z^(n-1)] Dbar`.
pub fn dbar_to_d<C: Coeff>(s: &TruncSeries<C>) -> TruncSeries<C> {
    s.shift_up()
}

/// `D` for unrestricted dissections through `z^order`, from
/// `2D^2 - D(z + z^2) + z^3 = 0`: the `z^k` coefficient fixes `D_(k-1)`.
pub fn unrestricted_series(order: usize) -> TruncSeries<BigInt> {
    let mut d = vec![BigInt::from(0); order + 1];
    for k in 3..=order + 1 {
        let mut acc = BigInt::from(0);
        for i in 2..=k - 2 {
            acc += &d[i] * &d[k - i];
        }
        acc *= 2;
        acc -= &d[k - 2];
        if k == 3 {
            acc += 1;
        }
        d[k - 1] = acc;
    }
    TruncSeries::from_coeffs(d)
}

/// Series of labelled 2-connected (`B`) and connected (`C`) outerplanar
/// graphs built from the dissection series `D` (known through order
/// `N + 1`). Returns `(B', B, C', C)` as exponential generating functions,
/// each through order `N`.
pub struct OuterplanarSeries {
    pub b_prime: TruncSeries<BigRational>,
    pub b: TruncSeries<BigRational>,
    pub c_prime: TruncSeries<BigRational>,
    pub c: TruncSeries<BigRational>,
}

pub fn outerplanar_series(d: &TruncSeries<BigRational>, order: usize) -> OuterplanarSeries {
    assert!(d.order() > order, "D must be known through order N + 1");
    let half = BigRational::new(1.into(), 2.into());
    // B' = D/(2z) + z/2
    let mut bp = d.div_z().truncate(order).scale(&half);
    if order >= 1 {
        let mut v = bp.coeff(1).clone();
        v.add_assign(&half);
        bp.set(1, v);
    }
    let b = bp.integrate().truncate(order);
    // y = z C' solves y = z exp(B'(y)); iterate, each round fixes one more order
    let mut y = TruncSeries::<BigRational>::z(order);
    for _ in 0..order {
        y = bp.compose(&y).exp().shift_up().truncate(order);
    }
    let c_prime = if order >= 1 { y.div_z() } else { TruncSeries::constant(BigRational::from_integer(1.into()), 0) };
    let c = c_prime.integrate().truncate(order);
    OuterplanarSeries { b_prime: bp, b, c_prime, c }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn int(v: &[i64]) -> TruncSeries<BigInt> {
        TruncSeries::from_coeffs(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn basic_ops() {
        let a = int(&[1, 1, 0, 0]);
        assert_eq!(a.pow(3), int(&[1, 3, 3, 1]));
        assert_eq!(a.shift_up().order(), 4);
        assert_eq!(int(&[0, 1, 1, 3]).shift_up(), int(&[0, 0, 1, 1, 3]));
        assert_eq!(int(&[0, 0, 0]).shift_up(), int(&[0, 0, 0, 0]));
        let g = int(&[0, 1, 0, 0]);
        assert_eq!(a.compose(&g), a);
        assert_eq!(int(&[0, 2, 3]).div_z(), int(&[2, 3]));
    }

    #[test]
    fn exp_and_log_relation() {
        let x = to_rational(&int(&[0, 1, 0, 0, 0, 0]));
        let e = x.exp();
        let fact = [1, 1, 2, 6, 24, 120];
        for (k, f) in fact.iter().enumerate() {
            assert_eq!(e.coeff(k).to_f64().unwrap(), 1.0 / *f as f64);
        }
        assert_eq!(e.derivative(), e.truncate(4));
        assert_eq!(x.integrate().derivative(), x);
    }

    #[test]
    fn unrestricted_closed_form() {
        let d = unrestricted_series(8);
        let got: Vec<i64> = d.coeffs().iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(got, [0, 0, 1, 1, 3, 11, 45, 197, 903]);
    }

    #[test]
    fn outerplanar_from_unrestricted() {
        // D(z) = z^2 + z^3 + 3 z^4 + 11 z^5 + 45 z^6 + 197 z^7 + 903 z^8
        let d = to_rational(&int(&[0, 0, 1, 1, 3, 11, 45, 197, 903]));
        let s = outerplanar_series(&d, 7);
        let fact = |n: u64| (1..=n).product::<u64>() as f64;
        // n![z^n]B = (n-1)!/2 [z^n]D
        assert_eq!(s.b.coeff(2).to_f64(), Some(0.5));
        for n in 3..=7usize {
            let lhs = s.b.coeff(n).to_f64().unwrap() * fact(n as u64);
            let rhs = fact(n as u64 - 1) / 2.0 * d.coeff(n).to_f64().unwrap();
            assert!((lhs - rhs).abs() < 1e-9, "n={n}");
        }
        assert_eq!(s.c_prime.coeff(0).to_f64(), Some(1.0));
        // labelled connected outerplanar graphs on 1..5 vertices
        let counts: Vec<f64> = (1..=5).map(|n| s.c.coeff(n).to_f64().unwrap() * fact(n as u64)).collect();
        let want = [1.0, 1.0, 4.0, 37.0, 602.0];
        for (a, b) in counts.iter().zip(want) {
            assert!((a - b).abs() < 1e-6, "{counts:?}");
        }
    }
}
