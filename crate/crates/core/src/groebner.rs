//! Small exact Gröbner engine over the Gaussian rationals for the residual
//! constant systems of the lift equations: lexicographic Buchberger with a
//! reduced basis, plus solution-branch enumeration for bases that split into
//! linear generators, monomial contents and univariate factors. Working
//! directly over Q(i) keeps quadratics like t² + 1 = (t − i)(t + i) split.

use crate::error::{Error, Result};
use crate::expoly::{ExpPoly, Freq, Var};
use crate::rat::GaussianRational;
use crate::roots::gaussian_roots;
use std::collections::{BTreeMap, BTreeSet};

/// One solution branch: values for the solved symbols (fully
/// back-substituted, so values mention only symbols left free).
pub type Assignment = BTreeMap<String, ExpPoly>;

// ---------------------------------------------------------------------------
// dense-exponent polynomials under lexicographic order

/// Exponent vector over the fixed symbol list; Vec's ordering gives the
/// lexicographic monomial order with the first symbol most significant.
type Exps = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Poly {
    terms: BTreeMap<Exps, GaussianRational>,
}

impl Poly {
    fn zero() -> Poly {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn constant(nvars: usize, c: GaussianRational) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; nvars], c);
        }
        Poly { terms }
    }

    fn variable(nvars: usize, idx: usize) -> Poly {
        let mut e = vec![0; nvars];
        e[idx] = 1;
        Poly {
            terms: BTreeMap::from([(e, GaussianRational::one())]),
        }
    }

    fn leading(&self) -> Option<(&Exps, &GaussianRational)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, e: Exps, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
        }
    }

    fn add(&self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    fn scale(&self, c: &GaussianRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// self − (c · x^e) · g
    fn sub_mul(&self, c: &GaussianRational, e: &Exps, g: &Poly) -> Poly {
        let mut out = self.clone();
        for (ge, gc) in &g.terms {
            let me: Exps = ge.iter().zip(e).map(|(a, b)| a + b).collect();
            out.add_term(me, &-&(gc * c));
        }
        out
    }

    fn mul(&self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exps = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, &(c1 * c2));
            }
        }
        out
    }

    fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some((_, lc)) => {
                let inv = lc.inv().expect("nonzero leading coefficient");
                self.scale(&inv)
            }
        }
    }

    fn degree_of(&self, v: usize) -> u32 {
        self.terms.keys().map(|e| e[v]).max().unwrap_or(0)
    }

    fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    /// Substitute a polynomial for variable v.
    fn substitute(&self, v: usize, value: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            let mut base = e.clone();
            let pow = base[v];
            base[v] = 0;
            let mut piece = Poly {
                terms: BTreeMap::from([(base, c.clone())]),
            };
            for _ in 0..pow {
                piece = piece.mul(value);
            }
            out = out.add(&piece);
        }
        out
    }
}

fn divides(a: &Exps, b: &Exps) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn exp_sub(a: &Exps, b: &Exps) -> Exps {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn exp_lcm(a: &Exps, b: &Exps) -> Exps {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

/// Full normal form: repeatedly cancel any term divisible by some leading
/// monomial of the basis.
fn normal_form(mut p: Poly, basis: &[Poly]) -> Poly {
    'outer: loop {
        for (e, c) in p.terms.iter().rev() {
            for g in basis {
                let (ge, gc) = g.leading().expect("basis polys nonzero");
                if divides(ge, e) {
                    let q = exp_sub(e, ge);
                    let factor = c / gc;
                    p = p.sub_mul(&factor, &q, g);
                    continue 'outer;
                }
            }
        }
        return p;
    }
}

/// (lcm/LM(f))·f/lc(f) − (lcm/LM(g))·g/lc(g)
fn s_poly(f: &Poly, g: &Poly) -> Poly {
    let (fe, fc) = f.leading().expect("nonzero");
    let (ge, gc) = g.leading().expect("nonzero");
    let l = exp_lcm(fe, ge);
    let s = Poly::zero().sub_mul(&-&fc.inv().expect("nonzero"), &exp_sub(&l, fe), f);
    s.sub_mul(&gc.inv().expect("nonzero"), &exp_sub(&l, ge), g)
}

const PAIR_LIMIT: usize = 20_000;

fn buchberger(mut basis: Vec<Poly>) -> Result<Vec<Poly>> {
    basis.retain(|p| !p.is_zero());
    for p in &mut basis {
        *p = p.monic();
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            pairs.push((i, j));
        }
    }
    let mut done: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut processed = 0usize;
    while !pairs.is_empty() {
        // normal selection: the pair with the smallest leading-term lcm
        let mut best = 0usize;
        let mut best_key: Option<(u32, Exps)> = None;
        for (idx, &(i, j)) in pairs.iter().enumerate() {
            let l = exp_lcm(
                basis[i].leading().expect("nonzero").0,
                basis[j].leading().expect("nonzero").0,
            );
            let key = (l.iter().sum::<u32>(), l);
            if best_key.as_ref().is_none_or(|bk| key < *bk) {
                best = idx;
                best_key = Some(key);
            }
        }
        let (i, j) = pairs.swap_remove(best);
        done.insert((i, j));
        processed += 1;
        if processed > PAIR_LIMIT {
            return Err(Error::LimitExceeded(
                "Groebner pair budget exhausted".into(),
            ));
        }
        let (fe, _) = basis[i].leading().expect("nonzero");
        let (ge, _) = basis[j].leading().expect("nonzero");
        let l = exp_lcm(fe, ge);
        // coprime leading monomials reduce to zero automatically
        if l == fe.iter().zip(ge).map(|(a, b)| a + b).collect::<Exps>() {
            continue;
        }
        // chain criterion: a third generator dividing the lcm whose pairs
        // with both ends are already treated makes this pair redundant
        let chained = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && divides(basis[k].leading().expect("nonzero").0, &l)
                && done.contains(&(i.min(k), i.max(k)))
                && done.contains(&(j.min(k), j.max(k)))
        });
        if chained {
            continue;
        }
        let s = normal_form(s_poly(&basis[i], &basis[j]), &basis);
        if !s.is_zero() {
            let k = basis.len();
            basis.push(s.monic());
            for i in 0..k {
                pairs.push((i, k));
            }
        }
    }
    Ok(basis)
}

/// Reduced basis: minimal leading monomials, every generator fully reduced
/// against the others, monic, sorted by leading monomial.
fn reduce_basis(mut basis: Vec<Poly>) -> Vec<Poly> {
    // minimality
    let mut keep: Vec<Poly> = Vec::new();
    basis.sort_by(|a, b| {
        a.leading()
            .expect("nonzero")
            .0
            .cmp(b.leading().expect("nonzero").0)
    });
    for i in 0..basis.len() {
        let (ei, _) = basis[i].leading().expect("nonzero");
        let dominated = basis
            .iter()
            .enumerate()
            .any(|(j, g)| j != i && {
                let (ej, _) = g.leading().expect("nonzero");
                divides(ej, ei) && (ej != ei || j < i)
            });
        if !dominated {
            keep.push(basis[i].clone());
        }
    }
    // inter-reduction
    let mut reduced: Vec<Poly> = Vec::new();
    for i in 0..keep.len() {
        let others: Vec<Poly> = keep
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let r = normal_form(keep[i].clone(), &others);
        if !r.is_zero() {
            reduced.push(r.monic());
        }
    }
    reduced.sort_by(|a, b| {
        a.leading()
            .expect("nonzero")
            .0
            .cmp(b.leading().expect("nonzero").0)
    });
    reduced
}

// ---------------------------------------------------------------------------
// conversions

fn collect_symbols(eqs: &[ExpPoly]) -> Result<Vec<String>> {
    let mut names: BTreeSet<String> = BTreeSet::new();
    for e in eqs {
        for t in e.terms() {
            if !t.freq.is_zero() {
                return Err(Error::OutsideRing(
                    "constant system contains an exponential".into(),
                ));
            }
            for v in t.exps.keys() {
                match v {
                    Var::X | Var::Y | Var::U => {
                        return Err(Error::OutsideRing(format!(
                            "constant system contains the coordinate {v}"
                        )))
                    }
                    _ => {
                        names.insert(v.to_string());
                    }
                }
            }
        }
    }
    Ok(names.into_iter().collect())
}

fn to_poly(e: &ExpPoly, vars: &[String]) -> Poly {
    let pos: BTreeMap<&str, usize> = vars.iter().map(|s| s.as_str()).zip(0..).collect();
    let mut out = Poly::zero();
    for t in e.terms() {
        let mut exps = vec![0u32; vars.len()];
        for (v, k) in &t.exps {
            let idx = pos[v.to_string().as_str()];
            exps[idx] = *k;
        }
        out.add_term(exps, &t.coeff);
    }
    out
}

fn to_expoly(p: &Poly, vars: &[String]) -> ExpPoly {
    let mut out = ExpPoly::zero();
    for (e, c) in &p.terms {
        let exps: Vec<(Var, u32)> = e
            .iter()
            .enumerate()
            .filter(|(_, k)| **k > 0)
            .map(|(i, k)| (Var::param(&vars[i]), *k))
            .collect();
        out = out.add(&ExpPoly::term(c.clone(), &exps, Freq::zero()));
    }
    out
}

// ---------------------------------------------------------------------------
// public interface

/// Reduced lexicographic Gröbner basis of the ideal generated by the given
/// constant-symbol equations (symbols ordered alphabetically, first symbol
/// most significant).
pub fn groebner_basis(eqs: &[ExpPoly]) -> Result<Vec<ExpPoly>> {
    let vars = collect_symbols(eqs)?;
    let polys: Vec<Poly> = eqs
        .iter()
        .map(|e| to_poly(e, &vars))
        .filter(|p| !p.is_zero())
        .collect();
    let basis = reduce_basis(buchberger(polys)?);
    Ok(basis.iter().map(|p| to_expoly(p, &vars)).collect())
}

/// Normal form of an expression against a basis (used to verify ideal
/// membership: members reduce to zero).
pub fn reduce_modulo(e: &ExpPoly, basis: &[ExpPoly]) -> Result<ExpPoly> {
    let mut all = basis.to_vec();
    all.push(e.clone());
    let vars = collect_symbols(&all)?;
    let b: Vec<Poly> = basis
        .iter()
        .map(|g| to_poly(g, &vars))
        .filter(|p| !p.is_zero())
        .collect();
    let r = normal_form(to_poly(e, &vars), &b);
    Ok(to_expoly(&r, &vars))
}

const DEPTH_LIMIT: usize = 40;

/// Outcome of branch enumeration: the enumerable branches together with the
/// reduced bases of any solution components whose shape the enumerator does
/// not cover (kept for inspection; such components arise from continuous
/// symmetry orbits of the solution set).
#[derive(Debug, Clone, Default)]
pub struct BranchOutcome {
    pub branches: Vec<Assignment>,
    pub stuck: Vec<Vec<ExpPoly>>,
}

/// Enumerate the solution branches of a constant system. Branches cover the
/// enumerable part of the solution variety (they may overlap); each
/// assignment maps solved symbols to values in the remaining free symbols.
/// Components whose reduced basis contains a generator that is neither
/// linear with constant coefficient, nor factorable by monomial content,
/// nor a fully-splitting univariate polynomial are reported in `stuck`.
pub fn enumerate_constant_branches(eqs: &[ExpPoly]) -> Result<BranchOutcome> {
    let vars = collect_symbols(eqs)?;
    if vars.len() > 10 {
        return Err(Error::LimitExceeded(format!(
            "{} unknowns in a constant system (limit 10)",
            vars.len()
        )));
    }
    let polys: Vec<Poly> = eqs
        .iter()
        .map(|e| to_poly(e, &vars))
        .filter(|p| !p.is_zero())
        .collect();
    let raw = enumerate(polys, &vars, 0)?;
    // dedup identical assignments arising from overlapping factor branches
    let mut seen: BTreeSet<Vec<(String, String)>> = BTreeSet::new();
    let mut out = BranchOutcome {
        branches: Vec::new(),
        stuck: raw.stuck,
    };
    for a in raw.branches {
        let key: Vec<(String, String)> = a
            .iter()
            .map(|(k, v)| (k.clone(), v.to_string()))
            .collect();
        if seen.insert(key) {
            out.branches.push(a);
        }
    }
    Ok(out)
}

/// Enumerate the solution branches of a constant system, failing with
/// BranchEnumerationFailed when nothing is enumerable but solutions exist.
pub fn solve_constant_branches(eqs: &[ExpPoly]) -> Result<Vec<Assignment>> {
    let out = enumerate_constant_branches(eqs)?;
    if out.branches.is_empty() {
        if let Some(basis) = out.stuck.into_iter().next() {
            return Err(Error::BranchEnumerationFailed {
                basis: basis.iter().map(|g| g.to_string()).collect(),
            });
        }
    }
    Ok(out.branches)
}

/// A generator solvable as v = value: v occurs to degree one with a
/// constant coefficient.
fn solve_linear(g: &Poly, nvars: usize) -> Option<(usize, Poly)> {
    for v in 0..nvars {
        if g.degree_of(v) != 1 {
            continue;
        }
        let mut coeff: Option<GaussianRational> = None;
        let mut rest = Poly::zero();
        let mut ok = true;
        for (e, c) in &g.terms {
            if e[v] == 1 {
                if e.iter().enumerate().any(|(i, &k)| i != v && k > 0) {
                    ok = false;
                    break;
                }
                coeff = Some(c.clone());
            } else {
                rest.add_term(e.clone(), c);
            }
        }
        if !ok {
            continue;
        }
        let Some(c) = coeff else { continue };
        let inv = c.inv().expect("nonzero coefficient");
        return Some((v, rest.scale(&-&inv)));
    }
    None
}

/// Split a generator into proper factors: monomial content first, then a
/// fully-splitting univariate polynomial.
fn split_factors(g: &Poly, nvars: usize) -> Option<Vec<Poly>> {
    // monomial content
    for v in 0..nvars {
        let min = g.terms.keys().map(|e| e[v]).min().unwrap_or(0);
        if min >= 1 {
            let mut stripped = Poly::zero();
            for (e, c) in &g.terms {
                let mut e2 = e.clone();
                e2[v] -= min;
                stripped.add_term(e2, c);
            }
            return Some(vec![Poly::variable(nvars, v), stripped]);
        }
    }
    // univariate splitting
    let used: Vec<usize> = (0..nvars).filter(|&v| g.degree_of(v) > 0).collect();
    if let [v] = used[..] {
        let deg = g.degree_of(v) as usize;
        if deg >= 2 {
            let mut coeffs = vec![GaussianRational::zero(); deg + 1];
            for (e, c) in &g.terms {
                coeffs[e[v] as usize] = c.clone();
            }
            let roots = gaussian_roots(&coeffs);
            if roots.len() == deg {
                let distinct: BTreeSet<GaussianRational> = roots.into_iter().collect();
                return Some(
                    distinct
                        .into_iter()
                        .map(|r| {
                            Poly::variable(nvars, v)
                                .add(&Poly::constant(nvars, -&r))
                        })
                        .collect(),
                );
            }
        }
    }
    None
}

/// Substitute v = val into every generator but the gi-th, recurse, and
/// back-substitute each recursive assignment into the eliminated value.
fn eliminate(
    source: &[Poly],
    gi: usize,
    v: usize,
    val: &Poly,
    vars: &[String],
    depth: usize,
) -> Result<BranchOutcome> {
    let rest: Vec<Poly> = source
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != gi)
        .map(|(_, h)| h.substitute(v, val))
        .collect();
    let mut out = enumerate(rest, vars, depth + 1)?;
    for a in &mut out.branches {
        let mut value = val.clone();
        for (name, rhs) in a.iter() {
            let idx = vars.iter().position(|n| n == name).expect("known symbol");
            value = value.substitute(idx, &to_poly(rhs, vars));
        }
        a.insert(vars[v].clone(), to_expoly(&value, vars));
    }
    Ok(out)
}

fn enumerate(mut polys: Vec<Poly>, vars: &[String], depth: usize) -> Result<BranchOutcome> {
    if depth > DEPTH_LIMIT {
        return Err(Error::LimitExceeded(
            "branch enumeration recursion limit".into(),
        ));
    }
    let nvars = vars.len();
    // Eliminate variables via totally-linear generators before any basis
    // computation: the substitution is exact and cannot raise degrees, and
    // it keeps the later Groebner runs small.
    polys.retain(|p| !p.is_zero());
    if polys.iter().any(|g| g.is_constant()) {
        return Ok(BranchOutcome::default()); // inconsistent
    }
    let affine_linear = |g: &Poly| g.terms.keys().all(|e| e.iter().sum::<u32>() <= 1);
    for (gi, g) in polys.iter().enumerate() {
        if !affine_linear(g) {
            continue;
        }
        if let Some((v, val)) = solve_linear(g, nvars) {
            return eliminate(&polys, gi, v, &val, vars, depth);
        }
    }
    let basis = reduce_basis(buchberger(polys)?);
    if basis.iter().any(|g| !g.is_zero() && g.is_constant()) {
        return Ok(BranchOutcome::default()); // inconsistent
    }
    if basis.is_empty() {
        return Ok(BranchOutcome {
            branches: vec![BTreeMap::new()],
            stuck: Vec::new(),
        });
    }
    // linear elimination
    for (gi, g) in basis.iter().enumerate() {
        if let Some((v, val)) = solve_linear(g, nvars) {
            return eliminate(&basis, gi, v, &val, vars, depth);
        }
    }
    // factor splitting
    for (gi, g) in basis.iter().enumerate() {
        if let Some(factors) = split_factors(g, nvars) {
            let rest: Vec<Poly> = basis
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != gi)
                .map(|(_, h)| h.clone())
                .collect();
            let mut out = BranchOutcome::default();
            for f in factors {
                let mut sys = rest.clone();
                sys.push(f);
                let sub = enumerate(sys, vars, depth + 1)?;
                out.branches.extend(sub.branches);
                out.stuck.extend(sub.stuck);
            }
            return Ok(out);
        }
    }
    Ok(BranchOutcome {
        branches: Vec::new(),
        stuck: vec![basis.iter().map(|g| to_expoly(g, vars)).collect()],
    })
}

/// Substitute a branch assignment into an expression.
pub fn apply_assignment(e: &ExpPoly, a: &Assignment) -> ExpPoly {
    let mut out = e.clone();
    for (name, value) in a {
        out = out.substitute(&Var::param(name), value);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_expoly;

    fn e(s: &str) -> ExpPoly {
        parse_expoly(s).unwrap()
    }

    fn branches(eqs: &[&str]) -> Vec<Assignment> {
        let polys: Vec<ExpPoly> = eqs.iter().map(|s| e(s)).collect();
        solve_constant_branches(&polys).unwrap()
    }

    fn shown(bs: &[Assignment]) -> Vec<String> {
        bs.iter()
            .map(|a| {
                let parts: Vec<String> =
                    a.iter().map(|(k, v)| format!("{k}={v}")).collect();
                format!("{{{}}}", parts.join(", "))
            })
            .collect()
    }

    #[test]
    fn the_two_branch_product_system() {
        let bs = branches(&["B1", "B0*A1 + B0"]);
        let s = shown(&bs);
        assert_eq!(s.len(), 2, "{s:?}");
        assert!(s.contains(&"{A1=-1, B1=0}".to_string()), "{s:?}");
        assert!(s.contains(&"{B0=0, B1=0}".to_string()), "{s:?}");
    }

    #[test]
    fn quadratics_split_over_the_gaussians() {
        let s = shown(&branches(&["A^2 - 1"]));
        assert_eq!(s, vec!["{A=-1}", "{A=1}"]);
        let s = shown(&branches(&["A^2 + 1"]));
        assert_eq!(s, vec!["{A=-i}", "{A=i}"]);
    }

    #[test]
    fn inconsistent_systems_have_no_branches() {
        assert!(branches(&["1"]).is_empty());
        assert!(branches(&["A", "A - 1"]).is_empty());
    }

    #[test]
    fn linear_systems_solve_and_back_substitute() {
        let s = shown(&branches(&["A - B", "B^2 - 1"]));
        assert_eq!(s, vec!["{A=-1, B=-1}", "{A=1, B=1}"]);
        let s = shown(&branches(&["A + B", "A - B"]));
        assert_eq!(s, vec!["{A=0, B=0}"]);
    }

    #[test]
    fn monomial_content_splits_into_cover() {
        let s = shown(&branches(&["A*B"]));
        assert_eq!(s, vec!["{A=0}", "{B=0}"]);
    }

    #[test]
    fn empty_and_free_systems() {
        let bs = branches(&[]);
        assert_eq!(bs.len(), 1);
        assert!(bs[0].is_empty());
        let bs = branches(&["0"]);
        assert_eq!(bs.len(), 1);
        assert!(bs[0].is_empty());
    }

    #[test]
    fn hyperbola_shape_is_reported_unsolvable() {
        let eqs = vec![e("A*B - 1")];
        match solve_constant_branches(&eqs) {
            Err(Error::BranchEnumerationFailed { basis }) => {
                assert_eq!(basis, vec!["-1 + A*B"]);
            }
            other => panic!("expected enumeration failure, got {other:?}"),
        }
    }

    #[test]
    fn reduced_basis_and_membership() {
        let eqs = vec![e("A + B"), e("A - B")];
        let basis = groebner_basis(&eqs).unwrap();
        let strs: Vec<String> = basis.iter().map(|b| b.to_string()).collect();
        assert_eq!(strs, vec!["B", "A"]);
        for q in &eqs {
            assert!(reduce_modulo(q, &basis).unwrap().is_zero());
        }
        // a non-member has a nonzero normal form
        assert!(!reduce_modulo(&e("A + 1"), &basis).unwrap().is_zero());
    }

    #[test]
    fn branches_zero_every_input() {
        let eqs: Vec<ExpPoly> = ["B1", "B0*A1 + B0", "B1^2 + B1"]
            .iter()
            .map(|s| e(s))
            .collect();
        for a in solve_constant_branches(&eqs).unwrap() {
            for q in &eqs {
                assert!(apply_assignment(q, &a).is_zero(), "{a:?} fails {q}");
            }
        }
    }

    #[test]
    fn coordinates_are_rejected() {
        assert!(matches!(
            solve_constant_branches(&[e("x + 1")]),
            Err(Error::OutsideRing(_))
        ));
    }
}
