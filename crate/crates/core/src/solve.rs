//! Exact power-series solutions of class systems.
//!
//! The solver is online: coefficients are produced one order at a time.
//! Every monomial of degree at least two is a node of a product DAG whose
//! order-`n` coefficient only needs factor coefficients below `n`, because
//! all variables vanish at `z = 0`. Linear terms without a `z` factor
//! couple variables at the same order and are resolved in topological
//! order.

use crate::coeff::{Coeff, UPoly};
use crate::occurrence::{occurrence_vector_census, CensusError};
use crate::pattern::PatternSet;
use crate::roots::{Mode, DEFAULT_H_CAP};
use crate::series::TruncSeries;
use crate::system::{build_system, ClassSystem, SystemError, Term, TOTAL};
use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("system is not well defined: {0}")]
    NonConvergence(String),
}

#[derive(Clone, Copy)]
enum Node {
    Var,
    Prod(usize, usize),
}

struct Plan<C> {
    nodes: Vec<Node>,
    /// Per variable: (coefficient, z shift, node or None for a bare constant).
    terms: Vec<Vec<(C, usize, Option<usize>)>>,
    order: Vec<usize>,
}

fn plan<C: Coeff>(sys: &ClassSystem, coeff: &dyn Fn(i64, &[u32]) -> C) -> Result<Plan<C>, SolveError> {
    let sys = &sys.flattened();
    let nv = sys.vars.len();
    let mut nodes: Vec<Node> = (0..nv).map(|_| Node::Var).collect();
    let mut memo: HashMap<Vec<(usize, u32)>, usize> = HashMap::new();
    fn node_for(
        mono: &[(usize, u32)],
        nodes: &mut Vec<Node>,
        memo: &mut HashMap<Vec<(usize, u32)>, usize>,
    ) -> usize {
        let deg: u32 = mono.iter().map(|x| x.1).sum();
        if deg == 1 {
            return mono[0].0;
        }
        if let Some(&i) = memo.get(mono) {
            return i;
        }
        // powers split in halves, mixed monomials peel off their first variable
        let (left, right): (Vec<(usize, u32)>, Vec<(usize, u32)>) = if mono.len() == 1 {
            let (v, e) = mono[0];
            (vec![(v, e / 2)], vec![(v, e - e / 2)])
        } else {
            (vec![mono[0]], mono[1..].to_vec())
        };
        let a = node_for(&left, nodes, memo);
        let b = node_for(&right, nodes, memo);
        nodes.push(Node::Prod(a, b));
        let id = nodes.len() - 1;
        memo.insert(mono.to_vec(), id);
        id
    }
    let exp = sys.expanded();
    let mut terms = Vec::with_capacity(nv);
    let mut instant: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (v, ts) in exp.iter().enumerate() {
        let mut list = Vec::new();
        for t in ts {
            let c = coeff(t.coeff, &t.u);
            if c.is_zero() {
                continue;
            }
            if t.vars.is_empty() {
                if t.z == 0 {
                    return Err(SolveError::NonConvergence(format!(
                        "constant term in the equation of {}",
                        sys.vars[v].name
                    )));
                }
                list.push((c, t.z as usize, None));
                continue;
            }
            if t.z == 0 && t.degree() == 1 {
                instant[v].push(t.vars[0].0);
            }
            let id = node_for(&t.vars, &mut nodes, &mut memo);
            list.push((c, t.z as usize, Some(id)));
        }
        terms.push(list);
    }
    // topological order of the same-order dependencies
    let mut state = vec![0u8; nv];
    let mut order = Vec::with_capacity(nv);
    fn visit(v: usize, inst: &[Vec<usize>], state: &mut [u8], order: &mut Vec<usize>) -> bool {
        match state[v] {
            2 => return true,
            1 => return false,
            _ => {}
        }
        state[v] = 1;
        for &w in &inst[v] {
            if !visit(w, inst, state, order) {
                return false;
            }
        }
        state[v] = 2;
        order.push(v);
        true
    }
    for v in 0..nv {
        if !visit(v, &instant, &mut state, &mut order) {
            return Err(SolveError::NonConvergence(format!(
                "cycle of linear dependencies through {}",
                sys.vars[v].name
            )));
        }
    }
    Ok(Plan { nodes, terms, order })
}

/// Solves `sys` through order `n` with coefficients built from each term's
/// integer coefficient and marking exponents. Returns one series per
/// variable.
pub fn solve_with<C: Coeff>(
    sys: &ClassSystem,
    n: usize,
    coeff: impl Fn(i64, &[u32]) -> C,
) -> Result<Vec<TruncSeries<C>>, SolveError> {
    let p = plan(sys, &coeff)?;
    let nv = p.terms.len();
    let mut val: Vec<Vec<C>> = vec![vec![C::zero()]; p.nodes.len()];
    for k in 1..=n {
        // products only read orders below k, so they can run side by side
        let fresh: Vec<C> = (nv..p.nodes.len())
            .into_par_iter()
            .map(|id| {
                let Node::Prod(a, b) = p.nodes[id] else { unreachable!() };
                let mut acc = C::zero();
                for i in 1..k {
                    let (x, y) = (&val[a][i], &val[b][k - i]);
                    if !x.is_zero() && !y.is_zero() {
                        acc.add_mul(x, y);
                    }
                }
                acc
            })
            .collect();
        for (id, c) in (nv..p.nodes.len()).zip(fresh) {
            val[id].push(c);
        }
        for &v in &p.order {
            let mut acc = C::zero();
            for (c, shift, node) in &p.terms[v] {
                if *shift > k {
                    continue;
                }
                match node {
                    None => {
                        if *shift == k {
                            acc.add_assign(c);
                        }
                    }
                    Some(id) => {
                        let x = &val[*id][k - shift];
                        if !x.is_zero() {
                            acc.add_mul(c, x);
                        }
                    }
                }
            }
            val[v].push(acc);
        }
    }
    Ok(val.into_iter().take(sys.vars.len()).map(TruncSeries::from_coeffs).collect())
}

/// Integer solution with every marking variable set to the given values.
pub fn solve_at(sys: &ClassSystem, n: usize, u: &[i64]) -> Result<Vec<TruncSeries<BigInt>>, SolveError> {
    assert_eq!(u.len(), sys.m(), "one value per marking variable");
    solve_with(sys, n, |c, e| {
        let mut x = BigInt::from(c);
        for (&ui, &ei) in u.iter().zip(e) {
            x *= num_traits::pow(BigInt::from(ui), ei as usize);
        }
        x
    })
}

/// Solution with symbolic marking variables.
pub fn solve_marked(sys: &ClassSystem, n: usize) -> Result<Vec<TruncSeries<UPoly>>, SolveError> {
    solve_with(sys, n, |c, e| UPoly::monomial(BigInt::from(c), e))
}

/// Evaluates `rhs` on series values (Picard step).
fn eval_terms<C: Coeff>(terms: &[Term], ys: &[TruncSeries<C>], n: usize, coeff: &dyn Fn(i64, &[u32]) -> C) -> TruncSeries<C> {
    let mut acc = TruncSeries::zero(n);
    for t in terms {
        let c = coeff(t.coeff, &t.u);
        if c.is_zero() {
            continue;
        }
        let mut s = TruncSeries::constant(c, n);
        for &(v, e) in &t.vars {
            s = s.mul(&ys[v].pow(e));
        }
        for _ in 0..t.z {
            s = s.shift_up().truncate(n);
        }
        acc = acc.add(&s);
    }
    acc
}

/// Plain fixed-point iteration, used as an independent oracle. Variables
/// are updated in place in the order given, so each sweep fixes at least
/// one further coefficient when that order respects the linear couplings.
/// Returns the iterates after every sweep.
pub fn picard_iterates<C: Coeff>(
    sys: &ClassSystem,
    n: usize,
    sweeps: usize,
    order: &[usize],
    coeff: impl Fn(i64, &[u32]) -> C,
) -> Vec<Vec<TruncSeries<C>>> {
    let exp = sys.expanded();
    let mut ys: Vec<TruncSeries<C>> = vec![TruncSeries::zero(n); sys.vars.len()];
    let mut out = Vec::with_capacity(sweeps);
    for _ in 0..sweeps {
        for &v in order {
            ys[v] = eval_terms(&exp[v], &ys, n, &coeff);
        }
        out.push(ys.clone());
    }
    out
}

/// Order in which the online solver resolves same-order couplings.
pub fn linear_order(sys: &ClassSystem) -> Result<Vec<usize>, SolveError> {
    let nv = sys.vars.len();
    plan::<BigInt>(sys, &|c, _| BigInt::from(c)).map(|p| p.order.into_iter().filter(|&v| v < nv).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CrosscheckError {
    #[error(transparent)]
    Census(#[from] CensusError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("series and census disagree at n = {0} on occurrence vector {1:?}: {2} vs {3}")]
    MismatchAt(usize, Vec<u32>, BigInt, u64),
}

/// Coefficients of `z^n u^v` in `D = z * y` as a map, for `n` in `2..=n_max`.
pub fn marked_counts(sys: &ClassSystem, n_max: usize) -> Result<Vec<BTreeMap<Vec<u32>, BigInt>>, SolveError> {
    let sol = solve_marked(sys, n_max - 1)?;
    let m = sys.m();
    Ok((2..=n_max)
        .map(|n| sol[TOTAL].coeff(n - 1).terms(m).into_iter().collect())
        .collect())
}

/// Compares the marked series of the full system for `set` with the
/// exhaustive census for every `n` in `2..=n_max`.
pub fn census_crosscheck(set: &PatternSet, n_max: usize, oracle_limit: usize) -> Result<usize, CrosscheckError> {
    let sys = build_system(set, Mode::Full, DEFAULT_H_CAP)?.group_classes();
    check_system_against_census(&sys, set, n_max, oracle_limit)
}

/// As [`census_crosscheck`] for a given (possibly hand-edited) system.
pub fn check_system_against_census(
    sys: &ClassSystem,
    set: &PatternSet,
    n_max: usize,
    oracle_limit: usize,
) -> Result<usize, CrosscheckError> {
    let counts = marked_counts(sys, n_max)?;
    let mut compared = 0;
    for (i, series) in counts.iter().enumerate() {
        let n = i + 2;
        let census = occurrence_vector_census(set, n, oracle_limit)?;
        let mut keys: Vec<&Vec<u32>> = series.keys().chain(census.counts.keys()).collect();
        keys.sort();
        keys.dedup();
        for k in keys {
            let a = series.get(k).cloned().unwrap_or_else(<BigInt as Zero>::zero);
            let b = census.counts.get(k).copied().unwrap_or(0);
            if a != BigInt::from(b) {
                return Err(CrosscheckError::MismatchAt(n, k.clone(), a, b));
            }
        }
        compared += 1;
    }
    Ok(compared)
}

/// Polynomial `sum c * u^a * z^b * D^k` in the dissection series `D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefiningPolynomial {
    pub name: String,
    /// (coefficient, u exponent, z exponent, D exponent)
    pub terms: Vec<(i64, u32, u32, u32)>,
}

impl DefiningPolynomial {
    /// Coefficients of the polynomial evaluated at `D(z, u)` through `z^n`.
    pub fn residual(&self, d: &TruncSeries<UPoly>, n: usize) -> TruncSeries<UPoly> {
        let d = d.truncate(n);
        let max_k = self.terms.iter().map(|t| t.3).max().unwrap_or(0);
        let mut powers = vec![TruncSeries::constant(UPoly::one(), n)];
        for k in 1..=max_k as usize {
            powers.push(powers[k - 1].mul(&d));
        }
        let mut acc = TruncSeries::zero(n);
        for &(c, a, b, k) in &self.terms {
            let mut s = powers[k as usize].scale(&UPoly::monomial(BigInt::from(c), &[a]));
            for _ in 0..b {
                s = s.shift_up().truncate(n);
            }
            acc = acc.add(&s);
        }
        acc
    }

    /// True when the residual vanishes through `z^n`.
    pub fn annihilates(&self, d: &TruncSeries<UPoly>, n: usize) -> bool {
        self.residual(d, n).coeffs().iter().all(Coeff::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::Mark;

    fn sys(names: &[&str], mode: Mode) -> ClassSystem {
        build_system(&PatternSet::from_names(names).unwrap(), mode, DEFAULT_H_CAP).unwrap()
    }

    fn ints(s: &TruncSeries<BigInt>) -> Vec<i64> {
        s.coeffs().iter().map(|x| i64::try_from(x).unwrap()).collect()
    }

    #[test]
    fn avoiding_columns() {
        let s = solve_at(&sys(&["C3"], Mode::Avoiding), 9, &[]).unwrap();
        assert_eq!(ints(&s[TOTAL])[1..], [1, 0, 1, 1, 4, 8, 25, 64, 191]);
        let s = solve_at(&sys(&["C4"], Mode::Avoiding), 11, &[]).unwrap();
        assert_eq!(ints(&s[TOTAL])[11], 5240);
    }

    #[test]
    fn unrestricted_at_one() {
        for names in [&["C3"][..], &["C4"], &["patternI"]] {
            let s = solve_at(&sys(names, Mode::Full), 7, &[1]).unwrap();
            assert_eq!(ints(&s[TOTAL])[1..], [1, 1, 3, 11, 45, 197, 903]);
        }
    }

    #[test]
    fn picard_agrees_and_gains_one_order_per_sweep() {
        let s = sys(&["C4"], Mode::Full).group_classes();
        let n = 10;
        let online = solve_at(&s, n, &[2]).unwrap();
        let order = linear_order(&s).unwrap();
        let its = picard_iterates(&s, n, n, &order, |c, e| BigInt::from(c) * BigInt::from(2).pow(e[0]));
        for (k, it) in its.iter().enumerate() {
            for v in 0..s.vars.len() {
                for j in 0..=(k + 1).min(n) {
                    assert_eq!(it[v].coeff(j), online[v].coeff(j), "sweep {k} var {v} order {j}");
                }
            }
        }
    }

    #[test]
    fn constant_term_is_rejected() {
        let mut s = sys(&["C3"], Mode::Avoiding);
        s.eqs[TOTAL].push(crate::system::Product::monomial(Term::constant(1, 0)));
        assert!(matches!(solve_at(&s, 4, &[]), Err(SolveError::NonConvergence(_))));
    }

    #[test]
    fn grouping_and_specializing_preserve_series() {
        let full = sys(&["C4"], Mode::Full);
        let a = solve_marked(&full, 12).unwrap();
        let b = solve_marked(&full.group_classes(), 12).unwrap();
        assert_eq!(a[TOTAL], b[TOTAL]);
        let z = solve_at(&full.specialize(&[Mark::Zero]), 12, &[]).unwrap();
        let avoid = solve_at(&sys(&["C4"], Mode::Avoiding), 12, &[]).unwrap();
        assert_eq!(z[TOTAL], avoid[TOTAL]);
    }

    #[test]
    fn small_census_agreement() {
        for names in [&["C3"][..], &["C4"], &["C3", "C4"], &["patternI"], &["C5"]] {
            let set = PatternSet::from_names(names).unwrap();
            assert_eq!(census_crosscheck(&set, 8, 14).unwrap(), 7, "{names:?}");
        }
    }
}
