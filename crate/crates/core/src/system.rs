//! Polynomial equation systems over the class variables.
//!
//! Variables are the total class `y`, the big-root class `y_o`, one
//! variable per composite root and auxiliary sums of classes that look
//! alike from an attachment point. Each right-hand side is a sum of
//! products; a product is a monomial head times powers of polynomial
//! factors, which keeps the printed form close to the factored layout while
//! the solver works on the expansion.

use crate::pattern::PatternSet;
use crate::roots::{exponents_with, generate_composite_roots, FaceTree, Mode, RootCatalog, RootError};
use serde_json::{json, Map, Value};
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use thiserror::Error;

/// Monomial `coeff * z^z * u^u * prod vars`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub coeff: i64,
    pub z: u32,
    pub u: Vec<u32>,
    /// (variable index, exponent), sorted by index, exponents positive.
    pub vars: Vec<(usize, u32)>,
}

impl Term {
    pub fn constant(coeff: i64, m: usize) -> Term {
        Term { coeff, z: 0, u: vec![0; m], vars: vec![] }
    }

    pub fn var(v: usize, m: usize) -> Term {
        Term { coeff: 1, z: 0, u: vec![0; m], vars: vec![(v, 1)] }
    }

    pub fn degree(&self) -> u32 {
        self.vars.iter().map(|v| v.1).sum()
    }

    fn shape(&self) -> (&[(usize, u32)], u32, &[u32]) {
        (&self.vars, self.z, &self.u)
    }

    pub fn mul(&self, o: &Term) -> Term {
        let mut vars = self.vars.clone();
        for &(v, e) in &o.vars {
            match vars.binary_search_by_key(&v, |x| x.0) {
                Ok(i) => vars[i].1 += e,
                Err(i) => vars.insert(i, (v, e)),
            }
        }
        let m = self.u.len().max(o.u.len());
        let u = (0..m)
            .map(|i| self.u.get(i).copied().unwrap_or(0) + o.u.get(i).copied().unwrap_or(0))
            .collect();
        Term { coeff: self.coeff * o.coeff, z: self.z + o.z, u, vars }
    }

    fn rename(&mut self, map: &[usize]) {
        let mut merged: BTreeMap<usize, u32> = BTreeMap::new();
        for &(v, e) in &self.vars {
            *merged.entry(map[v]).or_insert(0) += e;
        }
        self.vars = merged.into_iter().collect();
    }
}

/// Sorts, merges equal monomials and drops zero terms.
pub fn normalize(terms: &mut Vec<Term>) {
    terms.sort_by(|a, b| a.shape().cmp(&b.shape()));
    let mut out: Vec<Term> = Vec::with_capacity(terms.len());
    for t in terms.drain(..) {
        match out.last_mut() {
            Some(last) if last.shape() == t.shape() => last.coeff += t.coeff,
            _ => out.push(t),
        }
    }
    out.retain(|t| t.coeff != 0);
    *terms = out;
}

pub fn poly_mul(a: &[Term], b: &[Term]) -> Vec<Term> {
    let mut out: Vec<Term> = a.iter().flat_map(|x| b.iter().map(move |y| x.mul(y))).collect();
    normalize(&mut out);
    out
}

pub fn poly_pow(a: &[Term], k: u32, m: usize) -> Vec<Term> {
    let mut acc = vec![Term::constant(1, m)];
    for _ in 0..k {
        acc = poly_mul(&acc, a);
    }
    acc
}

/// Monomial head times powers of polynomial factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Product {
    pub head: Term,
    pub factors: Vec<(Vec<Term>, u32)>,
}

impl Product {
    pub fn monomial(head: Term) -> Self {
        Product { head, factors: vec![] }
    }

    pub fn expand(&self) -> Vec<Term> {
        let m = self.head.u.len();
        let mut acc = vec![self.head.clone()];
        for (f, k) in &self.factors {
            acc = poly_mul(&acc, &poly_pow(f, *k, m));
        }
        acc
    }

    fn is_zero(&self) -> bool {
        self.head.coeff == 0 || self.factors.iter().any(|(f, _)| f.is_empty())
    }

    fn rename(&mut self, map: &[usize]) {
        self.head.rename(map);
        for (f, _) in &mut self.factors {
            for t in f.iter_mut() {
                t.rename(map);
            }
            normalize(f);
        }
        self.merge_factors();
    }

    fn merge_factors(&mut self) {
        let mut merged: Vec<(Vec<Term>, u32)> = Vec::new();
        for (f, k) in self.factors.drain(..) {
            // single-monomial factors fold into the head
            if f.len() == 1 {
                let mut t = f[0].clone();
                let mut p = Term::constant(1, self.head.u.len());
                for _ in 0..k {
                    p = p.mul(&t);
                }
                t = p;
                self.head = self.head.mul(&t);
                continue;
            }
            match merged.iter_mut().find(|(g, _)| *g == f) {
                Some(slot) => slot.1 += k,
                None => merged.push((f, k)),
            }
        }
        self.factors = merged;
    }

    /// Equal up to the head coefficient.
    fn same_shape(&self, o: &Product) -> bool {
        self.head.shape() == o.head.shape() && self.factors == o.factors
    }
}

fn normalize_products(ps: &mut Vec<Product>) {
    let mut out: Vec<Product> = Vec::with_capacity(ps.len());
    for p in ps.drain(..) {
        if p.is_zero() {
            continue;
        }
        match out.iter_mut().find(|q| q.same_shape(&p)) {
            Some(q) => q.head.coeff += p.head.coeff,
            None => out.push(p),
        }
    }
    out.retain(|p| p.head.coeff != 0);
    *ps = out;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum VarKind {
    Total,
    Circ,
    Class,
    Aux,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub kind: VarKind,
    /// Root labels (size, ordinal) of the classes a class variable stands for;
    /// each member has the same series.
    pub members: Vec<(usize, usize)>,
    pub name: String,
}

impl Variable {
    fn class_name(members: &[(usize, usize)]) -> String {
        let size = members[0].0;
        let ords: Vec<usize> = members.iter().map(|m| m.1).collect();
        let consecutive = ords.windows(2).all(|w| w[1] == w[0] + 1);
        let inner = if ords.len() >= 4 && consecutive {
            format!("{}-{}", ords[0], ords[ords.len() - 1])
        } else {
            ords.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
        };
        format!("D{size}[{inner}]")
    }

    /// Number of combinatorial classes sharing this variable's series.
    pub fn multiplicity(&self) -> usize {
        self.members.len().max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error(transparent)]
    Roots(#[from] RootError),
    #[error("malformed system file: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSystem {
    /// Names of the still-symbolic marking variables.
    pub marks: Vec<String>,
    pub h: usize,
    pub mode: Mode,
    pub vars: Vec<Variable>,
    /// `eqs[i]` is the right-hand side for `vars[i]`.
    pub eqs: Vec<Vec<Product>>,
}

pub const TOTAL: usize = 0;
pub const CIRC: usize = 1;

/// Signed polynomial form of the big-root equation:
/// `y_o = y^h + y*y_o - z*y + z`.
fn circ_equation(h: usize, m: usize) -> Vec<Product> {
    let y = Term::var(TOTAL, m);
    let mut yh = Term::var(TOTAL, m);
    yh.vars[0].1 = h as u32;
    let mut yyo = Term::var(TOTAL, m);
    yyo = yyo.mul(&Term::var(CIRC, m));
    let mut zy = y.clone();
    zy.coeff = -1;
    zy.z = 1;
    let mut z = Term::constant(1, m);
    z.z = 1;
    vec![Product::monomial(yh), Product::monomial(yyo), Product::monomial(zy), Product::monomial(z)]
}

pub fn build_system(set: &PatternSet, mode: Mode, cap: usize) -> Result<ClassSystem, SystemError> {
    let cat = generate_composite_roots(set, mode, cap)?;
    Ok(build_from_catalog(&cat))
}

struct DisjointSets(Vec<usize>);

impl DisjointSets {
    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let r = self.find(self.0[x]);
            self.0[x] = r;
        }
        self.0[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
    }
}

/// Builds the system from a root catalog. At a Free edge whose face has
/// `k` vertices, an attachment is only visible through its faces reached by
/// a path of at most `h - k + 2` vertices; classes with the same visible part
/// behave identically there and are summed into one variable.
pub fn build_from_catalog(cat: &RootCatalog) -> ClassSystem {
    let m = cat.patterns.len();
    let h = cat.h;
    let nroots = cat.roots.len();
    let class_var = |j: usize| 2 + j;
    let mut vars = vec![
        Variable { kind: VarKind::Total, members: vec![], name: "D".into() },
        Variable { kind: VarKind::Circ, members: vec![], name: "Do".into() },
    ];
    for r in &cat.roots {
        vars.push(Variable { kind: VarKind::Class, members: vec![r.index], name: Variable::class_name(&[r.index]) });
    }
    let mut eqs: Vec<Vec<Product>> = vec![Vec::new(); 2 + nroots];
    let mut total = vec![Product::monomial(Term::var(CIRC, m))];
    total.extend((0..nroots).map(|j| Product::monomial(Term::var(class_var(j), m))));
    eqs[TOTAL] = total;
    eqs[CIRC] = circ_equation(h, m);

    // visible parts: for each limit, key -> member classes
    let mut key_tables: HashMap<usize, Vec<(Option<FaceTree>, Vec<usize>)>> = HashMap::new();
    let mut aux: HashMap<(bool, Vec<usize>), usize> = HashMap::new();
    let mut aux_eqs: Vec<Vec<Product>> = Vec::new();
    let mut resolve = |circ: bool, members: &[usize], vars: &mut Vec<Variable>| -> Option<usize> {
        if circ && members.len() == nroots {
            return Some(TOTAL);
        }
        if circ && members.is_empty() {
            return Some(CIRC);
        }
        if !circ && members.len() == 1 {
            return Some(class_var(members[0]));
        }
        if !circ && members.is_empty() {
            return None;
        }
        let key = (circ, members.to_vec());
        if let Some(&v) = aux.get(&key) {
            return Some(v);
        }
        let v = vars.len();
        let mut rhs: Vec<Product> = Vec::new();
        if circ {
            rhs.push(Product::monomial(Term::var(CIRC, m)));
        }
        rhs.extend(members.iter().map(|&j| Product::monomial(Term::var(class_var(j), m))));
        vars.push(Variable { kind: VarKind::Aux, members: vec![], name: format!("S{}", aux_eqs.len() + 1) });
        aux_eqs.push(rhs);
        aux.insert(key, v);
        Some(v)
    };

    for (j, nu) in cat.roots.iter().enumerate() {
        let base: Vec<u32> = nu.base_occurrences.clone();
        let mut head = Term::constant(1, m);
        head.u = base.clone();
        let r = nu.restricted_count() as u32;
        if r > 0 {
            head.vars.push((CIRC, r));
        }
        let free = nu.free_slots();
        let mut ds = DisjointSets((0..free.len()).collect());
        for a in 0..free.len() {
            for b in a + 1..free.len() {
                if nu.slots[free[a]].path_count_between(&nu.slots[free[b]]) + 2 <= h {
                    ds.union(a, b);
                }
            }
        }
        let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for a in 0..free.len() {
            let root = ds.find(a);
            comps.entry(root).or_default().push(free[a]);
        }
        let mut factors: Vec<(Vec<Term>, u32)> = Vec::new();
        for comp in comps.values() {
            // per slot: the key table for its limit
            let limits: Vec<usize> = comp.iter().map(|&s| h + 2 - nu.slots[s].face_size).collect();
            for &l in &limits {
                key_tables.entry(l).or_insert_with(|| {
                    let mut table: Vec<(Option<FaceTree>, Vec<usize>)> = vec![(None, vec![])];
                    for (k, root) in cat.roots.iter().enumerate() {
                        let key = root.tree.truncate(l);
                        match table.iter_mut().find(|(x, _)| *x == key) {
                            Some(e) => e.1.push(k),
                            None => table.push((key, vec![k])),
                        }
                    }
                    table
                });
            }
            let sizes: Vec<usize> = limits.iter().map(|l| key_tables[l].len()).collect();
            let mut poly: Vec<Term> = Vec::new();
            let mut choice = vec![0usize; comp.len()];
            loop {
                let mut attach: Vec<(usize, &FaceTree)> = Vec::new();
                for (i, &s) in comp.iter().enumerate() {
                    if let Some(t) = &key_tables[&limits[i]][choice[i]].0 {
                        attach.push((s, t));
                    }
                }
                let p = exponents_with(cat, j, &attach);
                let q: Vec<u32> = p
                    .iter()
                    .zip(&base)
                    .map(|(&a, &b)| u32::try_from(a - b as i64).expect("attachments never remove copies"))
                    .collect();
                if cat.mode == Mode::Full || q.iter().all(|&x| x == 0) {
                    let mut t = Term::constant(1, m);
                    t.u = q;
                    let mut ok = true;
                    for (i, &c) in choice.iter().enumerate() {
                        let (key, members) = &key_tables[&limits[i]][c];
                        match resolve(key.is_none(), members, &mut vars) {
                            Some(v) => t = t.mul(&Term::var(v, m)),
                            None => ok = false,
                        }
                    }
                    if ok {
                        poly.push(t);
                    }
                }
                // odometer over joint key choices
                let mut i = 0;
                while i < choice.len() {
                    choice[i] += 1;
                    if choice[i] < sizes[i] {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
                if i == choice.len() {
                    break;
                }
            }
            normalize(&mut poly);
            factors.push((poly, 1));
        }
        let mut prod = Product { head, factors };
        prod.merge_factors();
        let mut rhs = vec![prod];
        normalize_products(&mut rhs);
        eqs[class_var(j)] = rhs;
    }
    eqs.extend(aux_eqs);
    let marks = cat.patterns.patterns().iter().map(|p| p.name().to_string()).collect();
    let mut sys = ClassSystem { marks, h, mode: cat.mode, vars, eqs };
    if cat.mode == Mode::Avoiding {
        sys.marks_to_zero();
    }
    sys
}

/// Value assigned to a marking variable by [`ClassSystem::specialize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    Symbolic,
    Zero,
    One,
}

impl ClassSystem {
    pub fn m(&self) -> usize {
        self.marks.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn expanded(&self) -> Vec<Vec<Term>> {
        self.eqs
            .iter()
            .map(|ps| {
                let mut t: Vec<Term> = ps.iter().flat_map(Product::expand).collect();
                normalize(&mut t);
                t
            })
            .collect()
    }

    /// Avoiding systems carry no marks; their exponents are all zero.
    fn marks_to_zero(&mut self) {
        let marks = vec![Mark::Zero; self.m()];
        *self = self.specialize(&marks);
    }

    /// Substitutes 0 or 1 for some marking variables, then removes classes
    /// whose equation vanished.
    pub fn specialize(&self, marks: &[Mark]) -> ClassSystem {
        assert_eq!(marks.len(), self.m());
        let keep: Vec<usize> = (0..marks.len()).filter(|&i| marks[i] == Mark::Symbolic).collect();
        let fix = |t: &Term| -> Option<Term> {
            if t.u.iter().zip(marks).any(|(&e, &mk)| e > 0 && mk == Mark::Zero) {
                return None;
            }
            let mut t = t.clone();
            t.u = keep.iter().map(|&i| t.u[i]).collect();
            Some(t)
        };
        let mut eqs: Vec<Vec<Product>> = self
            .eqs
            .iter()
            .map(|ps| {
                ps.iter()
                    .filter_map(|p| {
                        let head = fix(&p.head)?;
                        let factors = p
                            .factors
                            .iter()
                            .map(|(f, k)| {
                                let mut g: Vec<Term> = f.iter().filter_map(fix).collect();
                                normalize(&mut g);
                                (g, *k)
                            })
                            .collect();
                        Some(Product { head, factors })
                    })
                    .collect()
            })
            .collect();
        for e in &mut eqs {
            normalize_products(e);
        }
        let mut sys = ClassSystem {
            marks: keep.iter().map(|&i| self.marks[i].clone()).collect(),
            h: self.h,
            mode: self.mode,
            vars: self.vars.clone(),
            eqs,
        };
        sys.prune_zero();
        sys.inline_aliases();
        sys
    }

    /// Replaces auxiliary sums that reduce to a single variable, or to the
    /// whole class, by that variable.
    fn inline_aliases(&mut self) {
        loop {
            let exp = self.expanded();
            let mut map: Vec<usize> = (0..self.vars.len()).collect();
            let mut hit = None;
            for v in 0..self.vars.len() {
                if self.vars[v].kind != VarKind::Aux {
                    continue;
                }
                let t = &exp[v];
                if exp[v] == exp[TOTAL] {
                    hit = Some((v, TOTAL));
                } else if t.len() == 1 && t[0].coeff == 1 && t[0].z == 0 && t[0].u.iter().all(|&e| e == 0) && t[0].vars.len() == 1 && t[0].vars[0].1 == 1 {
                    hit = Some((v, t[0].vars[0].0));
                }
                if hit.is_some() {
                    break;
                }
            }
            let Some((from, to)) = hit else { return };
            map[from] = to;
            for e in &mut self.eqs {
                for p in e.iter_mut() {
                    p.rename(&map);
                }
                normalize_products(e);
            }
            let alive: Vec<usize> = (0..self.vars.len()).filter(|&v| v != from).collect();
            self.reindex(&alive);
        }
    }

    /// Removes variables whose right-hand side is identically zero, along
    /// with every term mentioning them.
    fn prune_zero(&mut self) {
        loop {
            let dead: Vec<usize> = (2..self.vars.len()).filter(|&v| self.eqs[v].is_empty()).collect();
            if dead.is_empty() {
                return;
            }
            let is_dead = |t: &Term| t.vars.iter().any(|(v, _)| dead.binary_search(v).is_ok());
            for e in &mut self.eqs {
                for p in e.iter_mut() {
                    if is_dead(&p.head) {
                        p.head.coeff = 0;
                    }
                    for (f, _) in &mut p.factors {
                        f.retain(|t| !is_dead(t));
                    }
                }
                normalize_products(e);
            }
            let alive: Vec<usize> = (0..self.vars.len()).filter(|v| dead.binary_search(v).is_err()).collect();
            self.reindex(&alive);
        }
    }

    /// Keeps the listed variables (in order) and renumbers references.
    fn reindex(&mut self, alive: &[usize]) {
        let mut map = vec![usize::MAX; self.vars.len()];
        for (new, &old) in alive.iter().enumerate() {
            map[old] = new;
        }
        self.vars = alive.iter().map(|&v| self.vars[v].clone()).collect();
        let eqs = std::mem::take(&mut self.eqs);
        let mut eqs: Vec<Vec<Product>> = alive.iter().map(|&v| eqs[v].clone()).collect();
        for e in &mut eqs {
            for p in e.iter_mut() {
                p.rename(&map);
            }
            normalize_products(e);
        }
        self.eqs = eqs;
    }

    /// Merges class variables of the same root size (and auxiliary sums)
    /// whose expanded equations coincide. The survivor keeps the lowest
    /// index; every reference is redirected to it, so sums pick up integer
    /// multiplicities. Repeats until nothing merges.
    pub fn group_classes(&self) -> ClassSystem {
        let mut sys = self.clone();
        loop {
            let exp = sys.expanded();
            let mut groups: HashMap<(VarKind, usize, Vec<Term>), Vec<usize>> = HashMap::new();
            for (v, var) in sys.vars.iter().enumerate() {
                let size = match var.kind {
                    VarKind::Class => var.members[0].0,
                    VarKind::Aux => 0,
                    _ => continue,
                };
                groups.entry((var.kind, size, exp[v].clone())).or_default().push(v);
            }
            let mut map: Vec<usize> = (0..sys.vars.len()).collect();
            let mut changed = false;
            for g in groups.values().filter(|g| g.len() > 1) {
                let rep = g[0];
                for &o in &g[1..] {
                    map[o] = rep;
                    let extra = sys.vars[o].members.clone();
                    sys.vars[rep].members.extend(extra);
                }
                changed = true;
            }
            if !changed {
                return sys;
            }
            for v in 0..sys.vars.len() {
                if sys.vars[v].kind == VarKind::Class && map[v] == v {
                    sys.vars[v].members.sort_unstable();
                    sys.vars[v].name = Variable::class_name(&sys.vars[v].members);
                }
            }
            for e in &mut sys.eqs {
                for p in e.iter_mut() {
                    p.rename(&map);
                }
                normalize_products(e);
            }
            let alive: Vec<usize> = (0..sys.vars.len()).filter(|&v| map[v] == v).collect();
            sys.reindex(&alive);
        }
    }

    /// Equivalent system in which every multi-term factor is replaced by a
    /// new auxiliary variable, so that all right-hand sides expand to few
    /// monomials. The original variables keep their indices.
    pub fn flattened(&self) -> ClassSystem {
        let m = self.m();
        let mut vars = self.vars.clone();
        let mut eqs: Vec<Vec<Product>> = Vec::with_capacity(self.eqs.len());
        let mut made: HashMap<Vec<Term>, usize> = HashMap::new();
        let mut extra: Vec<Vec<Product>> = Vec::new();
        for ps in &self.eqs {
            let mut out = Vec::with_capacity(ps.len());
            for p in ps {
                let mut head = p.head.clone();
                for (f, k) in &p.factors {
                    let v = *made.entry(f.clone()).or_insert_with(|| {
                        vars.push(Variable { kind: VarKind::Aux, members: vec![], name: format!("F{}", extra.len() + 1) });
                        extra.push(f.iter().cloned().map(Product::monomial).collect());
                        vars.len() - 1
                    });
                    let mut t = Term::var(v, m);
                    t.vars[0].1 = *k;
                    head = head.mul(&t);
                }
                out.push(Product::monomial(head));
            }
            eqs.push(out);
        }
        eqs.extend(extra);
        ClassSystem { marks: self.marks.clone(), h: self.h, mode: self.mode, vars, eqs }
    }

    /// Variables each equation mentions.
    pub fn dependencies(&self) -> Vec<Vec<usize>> {
        self.expanded()
            .iter()
            .map(|ts| {
                let mut d: Vec<usize> = ts.iter().flat_map(|t| t.vars.iter().map(|v| v.0)).collect();
                d.sort_unstable();
                d.dedup();
                d
            })
            .collect()
    }

    /// True when every variable reaches every other one in the dependency
    /// graph.
    pub fn is_strongly_connected(&self) -> bool {
        let deps = self.dependencies();
        let n = deps.len();
        let mut rev = vec![Vec::new(); n];
        for (i, d) in deps.iter().enumerate() {
            for &j in d {
                rev[j].push(i);
            }
        }
        let reach = |adj: &Vec<Vec<usize>>| {
            let mut seen = vec![false; n];
            let mut q = VecDeque::from([TOTAL]);
            seen[TOTAL] = true;
            while let Some(x) = q.pop_front() {
                for &y in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        q.push_back(y);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(&deps) && reach(&rev)
    }

    pub fn to_json(&self) -> Value {
        let exp = self.expanded();
        let vars: Vec<Value> = self.vars.iter().map(|v| json!(v.name)).collect();
        let meta: Vec<Value> = self
            .vars
            .iter()
            .map(|v| json!({ "name": v.name, "kind": v.kind, "members": v.members }))
            .collect();
        let equations: Vec<Value> = exp
            .iter()
            .enumerate()
            .map(|(i, ts)| {
                let terms: Vec<Value> = ts
                    .iter()
                    .map(|t| {
                        let mut vm = Map::new();
                        for &(v, e) in &t.vars {
                            vm.insert(self.vars[v].name.clone(), json!(e));
                        }
                        json!({ "coeff": t.coeff, "z": t.z, "u": t.u, "vars": vm })
                    })
                    .collect();
                json!({ "lhs": self.vars[i].name, "terms": terms, "factored": self.format_rhs(i) })
            })
            .collect();
        json!({
            "marks": self.marks,
            "h": self.h,
            "mode": self.mode,
            "variables": vars,
            "variable_info": meta,
            "equations": equations,
        })
    }

    /// Reads a system written by [`ClassSystem::to_json`]; the factored
    /// layout is not restored.
    pub fn from_json(v: &Value) -> Result<ClassSystem, SystemError> {
        let bad = |s: &str| SystemError::Parse(s.to_string());
        let names: Vec<String> = v["variables"]
            .as_array()
            .ok_or_else(|| bad("missing variables"))?
            .iter()
            .map(|x| x.as_str().map(String::from).ok_or_else(|| bad("variable names must be strings")))
            .collect::<Result<_, _>>()?;
        let marks: Vec<String> = match v.get("marks") {
            Some(a) => serde_json::from_value(a.clone()).map_err(|e| bad(&e.to_string()))?,
            None => vec![],
        };
        let m = marks.len();
        let h = v["h"].as_u64().ok_or_else(|| bad("missing h"))? as usize;
        let mode: Mode = serde_json::from_value(v["mode"].clone()).map_err(|e| bad(&e.to_string()))?;
        let info = v.get("variable_info").and_then(Value::as_array);
        let mut vars = Vec::new();
        for (i, name) in names.iter().enumerate() {
            let (kind, members) = match info.and_then(|a| a.get(i)) {
                Some(x) => (
                    serde_json::from_value(x["kind"].clone()).map_err(|e| bad(&e.to_string()))?,
                    serde_json::from_value(x["members"].clone()).map_err(|e| bad(&e.to_string()))?,
                ),
                None => (
                    match i {
                        TOTAL => VarKind::Total,
                        CIRC => VarKind::Circ,
                        _ => VarKind::Aux,
                    },
                    vec![],
                ),
            };
            vars.push(Variable { kind, members, name: name.clone() });
        }
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut eqs = vec![Vec::new(); names.len()];
        let eq_list = v["equations"].as_array().ok_or_else(|| bad("missing equations"))?;
        if eq_list.len() != names.len() {
            return Err(bad("one equation per variable"));
        }
        for e in eq_list {
            let lhs = e["lhs"].as_str().and_then(|s| index.get(s)).ok_or_else(|| bad("unknown lhs"))?;
            let mut ps = Vec::new();
            for t in e["terms"].as_array().ok_or_else(|| bad("missing terms"))? {
                let coeff = t["coeff"].as_i64().ok_or_else(|| bad("coeff"))?;
                let z = t["z"].as_u64().ok_or_else(|| bad("z"))? as u32;
                let u: Vec<u32> = serde_json::from_value(t["u"].clone()).map_err(|e| bad(&e.to_string()))?;
                if u.len() != m {
                    return Err(bad("u exponent length"));
                }
                let mut tv = Vec::new();
                for (name, e) in t["vars"].as_object().ok_or_else(|| bad("vars"))? {
                    let i = *index.get(name.as_str()).ok_or_else(|| bad("unknown variable in term"))?;
                    tv.push((i, e.as_u64().ok_or_else(|| bad("exponent"))? as u32));
                }
                tv.sort_unstable();
                ps.push(Product::monomial(Term { coeff, z, u, vars: tv }));
            }
            eqs[*lhs] = ps;
        }
        Ok(ClassSystem { marks, h, mode, vars, eqs })
    }

    fn format_term(&self, t: &Term, with_coeff: bool) -> String {
        let mut parts = Vec::new();
        let c = t.coeff.abs();
        if with_coeff && c != 1 {
            parts.push(c.to_string());
        }
        if t.z == 1 {
            parts.push("z".into());
        } else if t.z > 1 {
            parts.push(format!("z^{}", t.z));
        }
        for (i, &e) in t.u.iter().enumerate() {
            let name = if self.m() == 1 { "u".to_string() } else { format!("u{}", i + 1) };
            match e {
                0 => {}
                1 => parts.push(name),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        for &(v, e) in &t.vars {
            let name = &self.display_name(v);
            if e == 1 {
                parts.push(name.clone());
            } else {
                parts.push(format!("{name}^{e}"));
            }
        }
        if parts.is_empty() {
            c.to_string()
        } else {
            parts.join("*")
        }
    }

    fn format_sum(&self, items: &[(i64, String)]) -> String {
        let mut s = String::new();
        for (k, (c, body)) in items.iter().enumerate() {
            if k == 0 {
                if *c < 0 {
                    s.push('-');
                }
            } else {
                s.push_str(if *c < 0 { " - " } else { " + " });
            }
            s.push_str(body);
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }

    /// A linear sum of classes written with group sums `Dk` for every
    /// root size whose classes all appear with their multiplicities.
    fn collapsed_sum(&self, terms: &[Term]) -> Option<String> {
        let mut coeff: HashMap<usize, i64> = HashMap::new();
        for t in terms {
            if t.z != 0 || t.u.iter().any(|&e| e > 0) || t.vars.len() != 1 || t.vars[0].1 != 1 {
                return None;
            }
            coeff.insert(t.vars[0].0, t.coeff);
        }
        let mut out = Vec::new();
        if coeff.remove(&CIRC) == Some(1) {
            out.push("Do".to_string());
        }
        let mut sizes: Vec<usize> = self
            .vars
            .iter()
            .filter(|v| v.kind == VarKind::Class)
            .map(|v| v.members[0].0)
            .collect();
        sizes.dedup();
        for size in sizes {
            let of_size: Vec<usize> = (0..self.vars.len())
                .filter(|&v| self.vars[v].kind == VarKind::Class && self.vars[v].members[0].0 == size)
                .collect();
            let complete = of_size.iter().all(|v| coeff.get(v) == Some(&(self.vars[*v].multiplicity() as i64)));
            if complete && of_size.len() > 1 || complete && self.vars[of_size[0]].multiplicity() > 1 {
                out.push(format!("D{size}"));
                for v in &of_size {
                    coeff.remove(v);
                }
            }
            for v in of_size {
                if let Some(c) = coeff.remove(&v) {
                    let name = &self.vars[v].name;
                    out.push(if c == 1 { name.clone() } else { format!("{c}*{name}") });
                }
            }
        }
        if !coeff.is_empty() {
            return None;
        }
        Some(out.join(" + "))
    }

    /// How variable `v` is written inside other equations.
    fn display_name(&self, v: usize) -> String {
        if self.vars[v].kind == VarKind::Aux {
            let exp = {
                let mut t: Vec<Term> = self.eqs[v].iter().flat_map(Product::expand).collect();
                normalize(&mut t);
                t
            };
            if let Some(s) = self.collapsed_sum(&exp) {
                return format!("({s})");
            }
        }
        self.vars[v].name.clone()
    }

    /// Right-hand side of equation `i` in factored layout.
    pub fn format_rhs(&self, i: usize) -> String {
        if self.vars[i].kind == VarKind::Total {
            let mut t: Vec<Term> = self.eqs[i].iter().flat_map(Product::expand).collect();
            normalize(&mut t);
            if let Some(s) = self.collapsed_sum(&t) {
                return s;
            }
        }
        let items: Vec<(i64, String)> = self.eqs[i]
            .iter()
            .map(|p| {
                let mut parts = Vec::new();
                let head = self.format_term(&p.head, true);
                let bare_head = p.head.vars.is_empty() && p.head.z == 0 && p.head.u.iter().all(|&e| e == 0);
                if !(bare_head && p.head.coeff.abs() == 1 && !p.factors.is_empty()) {
                    parts.push(head);
                }
                for (f, k) in &p.factors {
                    let inner: Vec<(i64, String)> = f.iter().map(|t| (t.coeff, self.format_term(t, true))).collect();
                    let body = format!("({})", self.format_sum(&inner));
                    parts.push(if *k == 1 { body } else { format!("{body}^{k}") });
                }
                (p.head.coeff, parts.join("*"))
            })
            .collect();
        self.format_sum(&items)
    }
}

impl fmt::Display for ClassSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.vars.len() {
            let inline = self.display_name(i) != self.vars[i].name;
            if !inline {
                writeln!(f, "{} = {}", self.vars[i].name, self.format_rhs(i))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::DEFAULT_H_CAP;

    fn sys(names: &[&str], mode: Mode) -> ClassSystem {
        build_system(&PatternSet::from_names(names).unwrap(), mode, DEFAULT_H_CAP).unwrap()
    }

    #[test]
    fn triangles_full() {
        let s = sys(&["C3"], Mode::Full);
        let text = s.to_string();
        // Do + D3[1] is the whole class, so the factor collapses to D
        assert_eq!(text, "D = Do + D3[1]\nDo = D^3 + D*Do - z*D + z\nD3[1] = u*D^2\n");
    }

    #[test]
    fn squares_avoiding() {
        let s = sys(&["C4"], Mode::Avoiding);
        assert_eq!(s.to_string(), "D = Do + D3[1]\nDo = D^4 + D*Do - z*D + z\nD3[1] = Do^2\n");
    }

    #[test]
    fn squares_full_grouping() {
        let s = sys(&["C4"], Mode::Full).group_classes();
        let names: Vec<&str> = s.vars.iter().map(|v| v.name.as_str()).collect();
        for want in ["D3[2,3]", "D3[5,6]", "D3[8,9]", "D4[1]"] {
            assert!(names.contains(&want), "{names:?}");
        }
        let i = s.var_index("D4[1]").unwrap();
        assert_eq!(s.format_rhs(i), "u*D^3");
        let i = s.var_index("D3[5,6]").unwrap();
        assert_eq!(s.format_rhs(i), "u*D^3*Do");
    }

    #[test]
    fn pentagons_avoiding() {
        let s = sys(&["C5"], Mode::Avoiding).group_classes();
        let names: Vec<&str> = s.vars.iter().map(|v| v.name.as_str()).collect();
        assert!(names.contains(&"D4[2,3,4]") && names.contains(&"D4[5,6,7]"), "{names:?}");
        let i = s.var_index("D4[8]").unwrap();
        assert_eq!(s.format_rhs(i), "(Do + D4)^9");
        assert_eq!(s.format_rhs(TOTAL), "Do + D3 + D4");
    }

    #[test]
    fn strongly_connected() {
        for names in [&["C3"][..], &["C4"], &["C5"], &["patternI"], &["C3", "C4"]] {
            for mode in [Mode::Full, Mode::Avoiding] {
                let s = sys(names, mode);
                assert!(s.is_strongly_connected(), "{names:?} {mode:?}");
                assert!(s.group_classes().is_strongly_connected());
            }
        }
    }

    #[test]
    fn json_roundtrip_keeps_expansion() {
        let s = sys(&["C4"], Mode::Full).group_classes();
        let back = ClassSystem::from_json(&s.to_json()).unwrap();
        assert_eq!(back.expanded(), s.expanded());
        assert_eq!(back.vars, s.vars);
    }

    #[test]
    fn specialize_zero_matches_avoiding() {
        let full = sys(&["C4"], Mode::Full).specialize(&[Mark::Zero]);
        let avoid = sys(&["C4"], Mode::Avoiding);
        assert_eq!(full.vars.len(), avoid.vars.len());
        assert_eq!(full.expanded(), avoid.expanded());
    }
}
