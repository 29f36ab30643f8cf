//! Degree-one Lie algebra cohomology H¹(g, V) where V is a truncated space
//! of exponential polynomials in the base coordinates, together with the
//! correspondence between cohomology classes and metric lifts: a one-form
//! ψ with dψ = 0 yields the lift {X_i + ψ_{X_i} ∂u}, and two lifts agree up
//! to a fiber translation exactly when the difference of their one-forms is
//! a differential dU.

use crate::error::{Error, Result};
use crate::expoly::{ExpPoly, Freq, Mono, Var};
use crate::liealg::LieAlgebra;
use crate::linalg::{frac_is_zero, generic_solve, reduce_row, solve_system, Row, SparseMat};
use crate::rat::GaussianRational;
use crate::roots::eigenvalues;
use crate::vfield::{Space, VectorField};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A finite-dimensional stand-in for the analytic functions on the base:
/// the span of x^a y^b e^(ω·x + σ·y) with a + b ≤ degree and (ω, σ) drawn
/// from a frequency set closed under sums of at most `budget` seeds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSpace {
    pub degree: u32,
    pub budget: u32,
    pub freqs: Vec<Freq>,
    pub basis: Vec<Mono>,
}

impl fmt::Display for TruncatedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "degree {} with {} frequencies ({} monomials)",
            self.degree,
            self.freqs.len(),
            self.basis.len()
        )
    }
}

/// A function-valued one-form on the algebra: one scalar per generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cocycle {
    pub components: Vec<ExpPoly>,
}

impl Cocycle {
    pub fn zero(n: usize) -> Cocycle {
        Cocycle {
            components: vec![ExpPoly::zero(); n],
        }
    }

    pub fn from_components(components: Vec<ExpPoly>) -> Cocycle {
        Cocycle { components }
    }

    pub fn sub(&self, rhs: &Cocycle) -> Cocycle {
        Cocycle {
            components: self
                .components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Cocycle {
        Cocycle {
            components: self.components.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|p| p.is_zero())
    }

    pub fn has_params(&self) -> bool {
        self.components.iter().any(|p| p.has_params())
    }

    /// Substitute a value for a named free constant in every component.
    pub fn substitute(&self, name: &str, value: &ExpPoly) -> Cocycle {
        let v = Var::param(name);
        Cocycle {
            components: self
                .components
                .iter()
                .map(|p| p.substitute(&v, value))
                .collect(),
        }
    }
}

impl fmt::Display for Cocycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// The computed cohomology at a fixed truncation.
#[derive(Debug, Clone)]
pub struct CohomologyResult {
    pub dim_z1: usize,
    pub dim_b1: usize,
    pub dim_h1: usize,
    pub representatives: Vec<Cocycle>,
    pub truncation: TruncatedSpace,
}

// ---------------------------------------------------------------------------
// truncated space construction

/// Largest total degree in x, y over all generator components.
pub fn max_coeff_degree(alg: &LieAlgebra) -> u32 {
    alg.basis
        .iter()
        .flat_map(|v| v.components().into_iter().map(|c| c.degree_xy()))
        .max()
        .unwrap_or(0)
}

/// Default truncation degree: the generator coefficient degree plus three.
pub fn default_degree(alg: &LieAlgebra) -> u32 {
    max_coeff_degree(alg) + 3
}

fn add_freq(a: &Freq, b: &Freq) -> Freq {
    Freq::new(&a.x + &b.x, &a.y + &b.y)
}

fn const_coeff(p: &ExpPoly) -> GaussianRational {
    for t in p.terms() {
        if t.freq.is_zero() && t.exps.is_empty() {
            return t.coeff.clone();
        }
    }
    GaussianRational::zero()
}

/// Seed frequencies: every frequency appearing in a generator coefficient,
/// plus eigenvalue frequencies of the normalized pair. A pair element with a
/// translation part along an axis acts on pure exponentials in that axis
/// with eigenvalues drawn from its adjoint spectrum, so those exponentials
/// can carry cohomology and must be present in the module.
fn frequency_seeds(alg: &LieAlgebra) -> Vec<Freq> {
    let mut seeds: BTreeSet<Freq> = BTreeSet::new();
    seeds.insert(Freq::zero());
    for v in &alg.basis {
        for comp in v.components() {
            for t in comp.terms() {
                seeds.insert(t.freq.clone());
            }
        }
    }
    if let Ok((v, w)) = alg.find_normalized_pair() {
        for t in [&v, &w] {
            let Some(coords) = alg.coordinates_of(t) else {
                continue;
            };
            let cx = const_coeff(t.components()[0]);
            let cy = const_coeff(t.components()[1]);
            if cx.is_zero() && cy.is_zero() {
                continue;
            }
            for lam in eigenvalues(&alg.ad(&coords)) {
                if lam.is_zero() {
                    continue;
                }
                if !cx.is_zero() {
                    seeds.insert(Freq::new(&lam / &cx, GaussianRational::zero()));
                }
                if !cy.is_zero() {
                    seeds.insert(Freq::new(GaussianRational::zero(), &lam / &cy));
                }
            }
        }
    }
    seeds.into_iter().collect()
}

fn close_freqs(seeds: &[Freq], budget: u32) -> Vec<Freq> {
    let mut all: BTreeSet<Freq> = BTreeSet::new();
    all.insert(Freq::zero());
    let mut frontier: Vec<Freq> = vec![Freq::zero()];
    for _ in 0..budget {
        let mut next: BTreeSet<Freq> = BTreeSet::new();
        for f in &frontier {
            for s in seeds {
                next.insert(add_freq(f, s));
            }
        }
        for f in &next {
            all.insert(f.clone());
        }
        frontier = next.into_iter().collect();
    }
    all.into_iter().collect()
}

fn monomials_up_to(degree: u32, freqs: &[Freq]) -> Vec<Mono> {
    let mut basis = Vec::new();
    for d in 0..=degree {
        for a in (0..=d).rev() {
            let b = d - a;
            for f in freqs {
                let mut exps = BTreeMap::new();
                if a > 0 {
                    exps.insert(Var::X, a);
                }
                if b > 0 {
                    exps.insert(Var::Y, b);
                }
                basis.push(Mono {
                    freq: f.clone(),
                    exps,
                });
            }
        }
    }
    basis
}

/// Build the coefficient module at the default frequency budget (two).
pub fn build_truncated_space(alg: &LieAlgebra, degree: u32) -> Result<TruncatedSpace> {
    build_truncated_space_with(alg, degree, 2)
}

/// Build the coefficient module with an explicit frequency budget.
pub fn build_truncated_space_with(
    alg: &LieAlgebra,
    degree: u32,
    budget: u32,
) -> Result<TruncatedSpace> {
    let need = max_coeff_degree(alg);
    if degree < need {
        return Err(Error::DegreeTooSmall {
            got: degree as usize,
            need: need as usize,
        });
    }
    let freqs = close_freqs(&frequency_seeds(alg), budget);
    let basis = monomials_up_to(degree, &freqs);
    Ok(TruncatedSpace {
        degree,
        budget,
        freqs,
        basis,
    })
}

fn mono_poly(m: &Mono) -> ExpPoly {
    let exps: Vec<(Var, u32)> = m.exps.iter().map(|(v, e)| (v.clone(), *e)).collect();
    ExpPoly::term(GaussianRational::one(), &exps, m.freq.clone())
}

fn term_mono(t: &crate::expoly::Term) -> Mono {
    Mono {
        freq: t.freq.clone(),
        exps: t.exps.clone(),
    }
}

/// Expand a scalar over the space basis; None if any monomial falls outside.
fn expand_in_basis(index: &BTreeMap<Mono, usize>, p: &ExpPoly) -> Option<Row> {
    let mut row: Row = BTreeMap::new();
    for t in p.terms() {
        let &col = index.get(&term_mono(t))?;
        row.insert(col, t.coeff.clone());
    }
    Some(row)
}

// ---------------------------------------------------------------------------
// the differential

/// The residue of the cocycle identity on the bracket of generators i and j:
/// X_i(ψ_j) − X_j(ψ_i) − ψ([X_i, X_j]); identically zero iff ψ is closed on
/// that pair.
pub fn cocycle_residue(alg: &LieAlgebra, psi: &Cocycle, i: usize, j: usize) -> ExpPoly {
    let mut res = alg.basis[i]
        .apply(&psi.components[j])
        .sub(&alg.basis[j].apply(&psi.components[i]));
    for (k, c) in alg.c[i][j].iter().enumerate() {
        if !c.is_zero() {
            res = res.sub(&psi.components[k].scale(c));
        }
    }
    res
}

/// The differential of a function: dU = (X_1(U), ..., X_r(U)).
pub fn differential(alg: &LieAlgebra, u: &ExpPoly) -> Cocycle {
    Cocycle {
        components: alg.basis.iter().map(|v| v.apply(u)).collect(),
    }
}

/// Basis of the coboundary source space W: the largest subspace of the
/// degree-(D+1) span (same frequencies) that every generator maps into the
/// given space. Its differentials generate B¹.
pub fn coboundary_source(alg: &LieAlgebra, space: &TruncatedSpace) -> Vec<ExpPoly> {
    let candidates = monomials_up_to(space.degree + 1, &space.freqs);
    let inside: BTreeSet<Mono> = space.basis.iter().cloned().collect();
    // Conditions: for each generator and each monomial outside the space,
    // the image coefficient must vanish.
    let mut row_index: BTreeMap<(usize, Mono), usize> = BTreeMap::new();
    let mut rows: Vec<Row> = Vec::new();
    for (q, cand) in candidates.iter().enumerate() {
        let cp = mono_poly(cand);
        for (i, x) in alg.basis.iter().enumerate() {
            for t in x.apply(&cp).terms() {
                let m = term_mono(t);
                if inside.contains(&m) {
                    continue;
                }
                let key = (i, m);
                let next = rows.len();
                let &mut ri = row_index.entry(key).or_insert(next);
                if ri == rows.len() {
                    rows.push(BTreeMap::new());
                }
                let entry = rows[ri].entry(q).or_insert_with(GaussianRational::zero);
                *entry += &t.coeff;
                if entry.is_zero() {
                    rows[ri].remove(&q);
                }
            }
        }
    }
    let mut mat = SparseMat::new(candidates.len());
    for r in rows {
        mat.push_row(r);
    }
    mat.nullspace()
        .into_iter()
        .map(|v| {
            let mut u = ExpPoly::zero();
            for (q, c) in v {
                u = u.add(&mono_poly(&candidates[q]).scale(&c));
            }
            u
        })
        .collect()
}

// ---------------------------------------------------------------------------
// cohomology

fn flatten(index: &BTreeMap<Mono, usize>, n: usize, psi: &Cocycle) -> Option<Row> {
    let width = index.len();
    let mut out: Row = BTreeMap::new();
    for (k, comp) in psi.components.iter().enumerate().take(n) {
        for (col, c) in expand_in_basis(index, comp)? {
            out.insert(k * width + col, c);
        }
    }
    Some(out)
}

fn unflatten(space: &TruncatedSpace, n: usize, row: &Row) -> Cocycle {
    let width = space.basis.len();
    let mut comps = vec![ExpPoly::zero(); n];
    for (&col, c) in row {
        let k = col / width;
        let b = col % width;
        comps[k] = comps[k].add(&mono_poly(&space.basis[b]).scale(c));
    }
    Cocycle { components: comps }
}

/// Compute Z¹, B¹ and H¹ = Z¹/B¹ over the truncated space: Z¹ as the exact
/// nullspace of the cocycle equations, B¹ as the image of the coboundary
/// source space under the differential, representatives as the echelon
/// basis of Z¹ reduced modulo B¹ (deterministic for a fixed truncation).
pub fn compute_h1(alg: &LieAlgebra, space: &TruncatedSpace) -> Result<CohomologyResult> {
    let n = alg.dim();
    let width = space.basis.len();
    let index: BTreeMap<Mono, usize> = space
        .basis
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i))
        .collect();

    // images of every basis monomial under every generator
    let acts: Vec<Vec<ExpPoly>> = alg
        .basis
        .iter()
        .map(|x| space.basis.iter().map(|m| x.apply(&mono_poly(m))).collect())
        .collect();

    // cocycle equations, one row per (generator pair, ambient monomial)
    let mut row_index: BTreeMap<(usize, Mono), usize> = BTreeMap::new();
    let mut rows: Vec<Row> = Vec::new();
    let add_terms = |rows: &mut Vec<Row>,
                         row_index: &mut BTreeMap<(usize, Mono), usize>,
                         pair: usize,
                         col: usize,
                         poly: &ExpPoly,
                         sign_c: Option<&GaussianRational>| {
        for t in poly.terms() {
            let key = (pair, term_mono(t));
            let next = rows.len();
            let &mut ri = row_index.entry(key).or_insert(next);
            if ri == rows.len() {
                rows.push(BTreeMap::new());
            }
            let add = match sign_c {
                Some(c) => c * &t.coeff,
                None => t.coeff.clone(),
            };
            let entry = rows[ri].entry(col).or_insert_with(GaussianRational::zero);
            *entry += &add;
            if entry.is_zero() {
                rows[ri].remove(&col);
            }
        }
    };
    let minus_one = -&GaussianRational::one();
    let mut pair = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            for (b, ((act_i, act_j), mono_b)) in acts[i]
                .iter()
                .zip(&acts[j])
                .zip(&space.basis)
                .enumerate()
            {
                // unknown ψ_j acted on by X_i
                add_terms(&mut rows, &mut row_index, pair, j * width + b, act_i, None);
                // unknown ψ_i acted on by X_j, negated
                add_terms(
                    &mut rows,
                    &mut row_index,
                    pair,
                    i * width + b,
                    act_j,
                    Some(&minus_one),
                );
                // bracket term −Σ_k c^k ψ_k
                for (k, c) in alg.c[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        let neg = -c;
                        add_terms(
                            &mut rows,
                            &mut row_index,
                            pair,
                            k * width + b,
                            &mono_poly(mono_b),
                            Some(&neg),
                        );
                    }
                }
            }
            pair += 1;
        }
    }

    let mut zmat = SparseMat::new(n * width);
    for r in rows {
        zmat.push_row(r);
    }
    let z_basis = zmat.nullspace();
    let dim_z1 = z_basis.len();

    // coboundaries
    let mut b1 = SparseMat::new(n * width);
    for u in coboundary_source(alg, space) {
        let du = differential(alg, &u);
        let row = flatten(&index, n, &du)
            .expect("coboundary source maps into the space by construction");
        b1.push_row(row);
    }
    b1.rref();
    let dim_b1 = b1.rows.len();

    // representatives: Z¹ basis reduced modulo B¹, then echelonized
    let mut reduced = SparseMat::new(n * width);
    for z in z_basis {
        let red = reduce_row(z, &b1.rows);
        if !red.is_empty() {
            reduced.push_row(red);
        }
    }
    reduced.rref();
    let representatives: Vec<Cocycle> = reduced
        .rows
        .iter()
        .map(|r| unflatten(space, n, r))
        .collect();
    let dim_h1 = representatives.len();
    assert_eq!(
        dim_h1,
        dim_z1 - dim_b1,
        "coboundary space escaped the cocycle space"
    );
    Ok(CohomologyResult {
        dim_z1,
        dim_b1,
        dim_h1,
        representatives,
        truncation: space.clone(),
    })
}

/// Dimension of H¹ at the default truncation.
pub fn h1_dimension(alg: &LieAlgebra) -> Result<usize> {
    let space = build_truncated_space(alg, default_degree(alg))?;
    Ok(compute_h1(alg, &space)?.dim_h1)
}

// ---------------------------------------------------------------------------
// coboundary decisions

/// Find U in the coboundary source space of `space` with dU = ψ. Returns
/// None when ψ is not a coboundary there. Components may carry free
/// constants; the potential is then found identically in those constants
/// whenever one exists with constant-coefficient dependence on them.
pub fn is_coboundary(
    alg: &LieAlgebra,
    psi: &Cocycle,
    space: &TruncatedSpace,
) -> Result<Option<ExpPoly>> {
    if psi.components.len() != alg.dim() {
        return Err(Error::SpaceMismatch);
    }
    let sources = coboundary_source(alg, space);
    let images: Vec<Cocycle> = sources.iter().map(|u| differential(alg, u)).collect();
    if psi.has_params() {
        return Ok(coboundary_with_params(alg, psi, &sources, &images));
    }
    // numeric path: one equation per (generator, monomial)
    let mut row_index: BTreeMap<(usize, Mono), usize> = BTreeMap::new();
    let mut eqs: Vec<(Row, GaussianRational)> = Vec::new();
    let row_of = |eqs: &mut Vec<(Row, GaussianRational)>,
                      row_index: &mut BTreeMap<(usize, Mono), usize>,
                      key: (usize, Mono)|
     -> usize {
        let next = eqs.len();
        let &mut ri = row_index.entry(key).or_insert(next);
        if ri == eqs.len() {
            eqs.push((BTreeMap::new(), GaussianRational::zero()));
        }
        ri
    };
    for (w, du) in images.iter().enumerate() {
        for (i, comp) in du.components.iter().enumerate() {
            for t in comp.terms() {
                let ri = row_of(&mut eqs, &mut row_index, (i, term_mono(t)));
                let entry = eqs[ri].0.entry(w).or_insert_with(GaussianRational::zero);
                *entry += &t.coeff;
            }
        }
    }
    for (i, comp) in psi.components.iter().enumerate() {
        for t in comp.terms() {
            let ri = row_of(&mut eqs, &mut row_index, (i, term_mono(t)));
            eqs[ri].1 = t.coeff.clone();
        }
    }
    match solve_system(&eqs, sources.len()) {
        None => Ok(None),
        Some(ts) => {
            let mut u = ExpPoly::zero();
            for (w, c) in ts.iter().enumerate() {
                if !c.is_zero() {
                    u = u.add(&sources[w].scale(c));
                }
            }
            Ok(Some(u))
        }
    }
}

/// Split an expression into structural monomials (coordinates and
/// frequency) with parameter-polynomial coefficients.
fn split_params(p: &ExpPoly) -> BTreeMap<Mono, ExpPoly> {
    let mut out: BTreeMap<Mono, ExpPoly> = BTreeMap::new();
    for t in p.terms() {
        let mut struct_exps: BTreeMap<Var, u32> = BTreeMap::new();
        let mut param_exps: Vec<(Var, u32)> = Vec::new();
        for (v, e) in &t.exps {
            if v.is_param() {
                param_exps.push((v.clone(), *e));
            } else {
                struct_exps.insert(v.clone(), *e);
            }
        }
        let key = Mono {
            freq: t.freq.clone(),
            exps: struct_exps,
        };
        let part = ExpPoly::term(t.coeff.clone(), &param_exps, Freq::zero());
        let entry = out.entry(key).or_insert_with(ExpPoly::zero);
        *entry = entry.add(&part);
    }
    out
}

fn coboundary_with_params(
    _alg: &LieAlgebra,
    psi: &Cocycle,
    sources: &[ExpPoly],
    images: &[Cocycle],
) -> Option<ExpPoly> {
    // Solve over the parameter fraction field; accept solutions whose
    // coefficients have constant denominators so U stays in the ring.
    let mut row_index: BTreeMap<(usize, Mono), usize> = BTreeMap::new();
    for (i, comp) in psi.components.iter().enumerate() {
        for key in split_params(comp).into_keys() {
            let next = row_index.len();
            row_index.entry((i, key)).or_insert(next);
        }
    }
    for du in images {
        for (i, comp) in du.components.iter().enumerate() {
            for key in split_params(comp).into_keys() {
                let next = row_index.len();
                row_index.entry((i, key)).or_insert(next);
            }
        }
    }
    let nrows = row_index.len();
    let mut mat = vec![vec![ExpPoly::zero(); sources.len()]; nrows];
    let mut rhs = vec![ExpPoly::zero(); nrows];
    for (w, du) in images.iter().enumerate() {
        for (i, comp) in du.components.iter().enumerate() {
            for (key, part) in split_params(comp) {
                let &ri = row_index.get(&(i, key)).expect("indexed");
                mat[ri][w] = mat[ri][w].add(&part);
            }
        }
    }
    for (i, comp) in psi.components.iter().enumerate() {
        for (key, part) in split_params(comp) {
            let &ri = row_index.get(&(i, key)).expect("indexed");
            rhs[ri] = rhs[ri].add(&part);
        }
    }
    let sol = generic_solve(&mat, &rhs)?;
    let mut u = ExpPoly::zero();
    for (w, frac) in sol.iter().enumerate() {
        if frac_is_zero(frac) {
            continue;
        }
        let den = frac.1.as_constant()?;
        let inv = den.inv()?;
        u = u.add(&sources[w].scale(&inv).mul(&frac.0));
    }
    Some(u)
}

/// Coordinates of ψ's cohomology class in the representative basis of a
/// computed result: solves ψ = Σ λ_a rep_a + dU. None when ψ is not in the
/// span (e.g. falls outside the truncated space). Free constants must be
/// substituted with numbers first.
pub fn class_coordinates(
    alg: &LieAlgebra,
    result: &CohomologyResult,
    psi: &Cocycle,
) -> Result<Option<Vec<GaussianRational>>> {
    if psi.components.len() != alg.dim() {
        return Err(Error::SpaceMismatch);
    }
    if psi.has_params() {
        return Err(Error::OutsideRing(
            "class coordinates need numeric cocycle components; substitute free constants first"
                .into(),
        ));
    }
    let space = &result.truncation;
    let sources = coboundary_source(alg, space);
    let n_rep = result.representatives.len();
    let ncols = n_rep + sources.len();
    let mut row_index: BTreeMap<(usize, Mono), usize> = BTreeMap::new();
    let mut eqs: Vec<(Row, GaussianRational)> = Vec::new();
    let row_of = |eqs: &mut Vec<(Row, GaussianRational)>,
                      row_index: &mut BTreeMap<(usize, Mono), usize>,
                      key: (usize, Mono)|
     -> usize {
        let next = eqs.len();
        let &mut ri = row_index.entry(key).or_insert(next);
        if ri == eqs.len() {
            eqs.push((BTreeMap::new(), GaussianRational::zero()));
        }
        ri
    };
    for (a, rep) in result.representatives.iter().enumerate() {
        for (i, comp) in rep.components.iter().enumerate() {
            for t in comp.terms() {
                let ri = row_of(&mut eqs, &mut row_index, (i, term_mono(t)));
                let entry = eqs[ri].0.entry(a).or_insert_with(GaussianRational::zero);
                *entry += &t.coeff;
            }
        }
    }
    for (w, u) in sources.iter().enumerate() {
        let du = differential(alg, u);
        for (i, comp) in du.components.iter().enumerate() {
            for t in comp.terms() {
                let ri = row_of(&mut eqs, &mut row_index, (i, term_mono(t)));
                let entry = eqs[ri]
                    .0
                    .entry(n_rep + w)
                    .or_insert_with(GaussianRational::zero);
                *entry += &t.coeff;
            }
        }
    }
    for (i, comp) in psi.components.iter().enumerate() {
        for t in comp.terms() {
            let ri = row_of(&mut eqs, &mut row_index, (i, term_mono(t)));
            eqs[ri].1 = t.coeff.clone();
        }
    }
    Ok(solve_system(&eqs, ncols).map(|x| x[..n_rep].to_vec()))
}

// ---------------------------------------------------------------------------
// metric lifts from cocycles

/// The lift generated by X_i + ψ_{X_i} ∂u. The one-form must satisfy the
/// cocycle identity exactly (identically in any free constants); the result
/// then closes with the same structure constants as the base realization.
pub fn metric_lift_from_cocycle(alg: &LieAlgebra, psi: &Cocycle) -> Result<Vec<VectorField>> {
    if alg.space != Space::Base || psi.components.len() != alg.dim() {
        return Err(Error::SpaceMismatch);
    }
    for comp in &psi.components {
        if comp.has_var(&Var::U) {
            return Err(Error::ContainsFiberVariable);
        }
    }
    for i in 0..alg.dim() {
        for j in (i + 1)..alg.dim() {
            let res = cocycle_residue(alg, psi, i, j);
            if !res.is_zero() {
                return Err(Error::NotACocycle {
                    i,
                    j,
                    residue: res.to_string(),
                });
            }
        }
    }
    Ok(alg
        .basis
        .iter()
        .zip(&psi.components)
        .map(|(v, p)| {
            let [ax, ay, _] = v.components();
            VectorField::total(ax.clone(), ay.clone(), p.clone())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{instantiate, parse_instance};
    use crate::liealg::LiftType;
    use crate::parse::parse_expoly;

    fn algebra(id: &str) -> LieAlgebra {
        let inst = parse_instance(id).unwrap();
        let space = crate::catalog::space_of(&inst.family).unwrap();
        LieAlgebra::new(space, instantiate(&inst).unwrap()).unwrap()
    }

    fn h1(id: &str) -> usize {
        h1_dimension(&algebra(id)).unwrap()
    }

    fn cocycle(parts: &[&str]) -> Cocycle {
        Cocycle::from_components(parts.iter().map(|p| parse_expoly(p).unwrap()).collect())
    }

    #[test]
    fn truncation_shape_for_polynomial_realizations() {
        let alg = algebra("g6");
        let space = build_truncated_space(&alg, 3).unwrap();
        assert_eq!(space.freqs, vec![Freq::zero()]);
        assert_eq!(space.basis.len(), 10);
        assert!(matches!(
            build_truncated_space(&alg, 1),
            Err(Error::DegreeTooSmall { got: 1, need: 2 })
        ));
    }

    #[test]
    fn truncation_frequencies_close_under_sums() {
        let alg = algebra("g4[alphas=0;1,ms=1;1]");
        let space = build_truncated_space(&alg, 1).unwrap();
        let xs: Vec<String> = space.freqs.iter().map(|f| f.x.to_string()).collect();
        assert_eq!(xs, vec!["0", "1", "2"]);
        assert!(space.freqs.iter().all(|f| f.y.is_zero()));
    }

    #[test]
    fn scaling_pair_contributes_exponential_frequencies() {
        let alg = algebra("g15");
        let space = build_truncated_space(&alg, default_degree(&alg)).unwrap();
        let has = |x: i64, y: i64| {
            space.freqs.contains(&Freq::new(
                GaussianRational::from_int(x),
                GaussianRational::from_int(y),
            ))
        };
        assert!(has(0, 1), "e^y missing from the module");
        assert!(has(0, -1));
        assert!(has(0, 2));
    }

    #[test]
    fn h1_of_polynomial_realizations() {
        assert_eq!(h1("g6"), 1);
        assert_eq!(h1("g16"), 1);
        assert_eq!(h1("g3"), 0);
        assert_eq!(h1("g10[r=4]"), 2);
        assert_eq!(h1("g7"), 1);
    }

    #[test]
    fn h1_distinguishes_the_singular_realizations() {
        assert_eq!(h1("g15t"), 0);
        assert_eq!(h1("g16t"), 2);
    }

    #[test]
    fn h1_with_exponential_coefficients() {
        assert_eq!(h1("g15"), 1);
        assert_eq!(h1("g4[alphas=0;1,ms=1;1]"), 1);
        assert_eq!(h1("g4[alphas=0;1,ms=1;2]"), 2);
        assert_eq!(h1("g5[alphas=0;1,ms=1;1]"), 1);
    }

    #[test]
    fn h1_sees_the_resonant_decoration() {
        // The scaling weight matching a tower position adds one class.
        assert_eq!(h1("g8[r=5,alpha=2]"), 2);
        assert_eq!(h1("g8[r=5,alpha=3]"), 1);
        assert_eq!(h1("g8[r=4,alpha=i]"), 1);
    }

    #[test]
    fn coboundaries_close_exactly() {
        for id in ["g6", "g15", "g16t"] {
            let alg = algebra(id);
            let space = build_truncated_space(&alg, default_degree(&alg)).unwrap();
            for u in coboundary_source(&alg, &space) {
                let du = differential(&alg, &u);
                for i in 0..alg.dim() {
                    for j in (i + 1)..alg.dim() {
                        assert!(
                            cocycle_residue(&alg, &du, i, j).is_zero(),
                            "{id}: residue for d({u}) on ({i},{j})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn coboundary_decision_and_classes() {
        let alg = algebra("g6");
        let space = build_truncated_space(&alg, default_degree(&alg)).unwrap();
        let result = compute_h1(&alg, &space).unwrap();
        assert_eq!(result.dim_h1, 1);

        let exact = cocycle(&["1", "0", "0", "0"]);
        let u = is_coboundary(&alg, &exact, &space).unwrap().expect("dU = (1,0,0,0)");
        assert_eq!(differential(&alg, &u), exact);
        let coords = class_coordinates(&alg, &result, &exact).unwrap().unwrap();
        assert!(coords[0].is_zero());

        let generating = cocycle(&["0", "0", "1", "2*y"]);
        assert!(is_coboundary(&alg, &generating, &space).unwrap().is_none());
        let coords = class_coordinates(&alg, &result, &generating).unwrap().unwrap();
        assert!(!coords[0].is_zero());

        let zero = Cocycle::zero(4);
        let u = is_coboundary(&alg, &zero, &space).unwrap().unwrap();
        assert!(u.is_zero());
    }

    #[test]
    fn symbolic_cocycles_pass_through() {
        // With the free constant kept symbolic the coboundary test still
        // decides correctly.
        let alg = algebra("g6");
        let space = build_truncated_space(&alg, default_degree(&alg)).unwrap();
        let psi = cocycle(&["0", "0", "C", "2*C*y"]);
        assert!(is_coboundary(&alg, &psi, &space).unwrap().is_none());
        let exact = cocycle(&["C", "0", "0", "0"]);
        let u = is_coboundary(&alg, &exact, &space).unwrap().expect("dU = (C,0,0,0)");
        assert_eq!(differential(&alg, &u), exact);
    }

    #[test]
    fn representative_generates_the_expected_lift() {
        let alg = algebra("g6");
        let space = build_truncated_space(&alg, default_degree(&alg)).unwrap();
        let result = compute_h1(&alg, &space).unwrap();
        let rep = &result.representatives[0];
        let lifted = metric_lift_from_cocycle(&alg, rep).unwrap();
        let hat = LieAlgebra::new(Space::Total, lifted).unwrap();
        let point = BTreeMap::from([
            (Var::X, GaussianRational::zero()),
            (Var::Y, GaussianRational::zero()),
        ]);
        assert_eq!(
            hat.classify_lift_type(&alg, &point).unwrap(),
            LiftType::Metric
        );
    }

    #[test]
    fn non_cocycles_are_rejected() {
        let alg = algebra("g6");
        let bad = cocycle(&["0", "0", "1", "0"]);
        match metric_lift_from_cocycle(&alg, &bad) {
            Err(Error::NotACocycle { i: 1, j: 3, residue }) => {
                assert_eq!(residue, "-2");
            }
            other => panic!("expected a cocycle failure on (1,3), got {other:?}"),
        }
    }

    #[test]
    fn lifting_the_symbolic_representative_family() {
        let alg = algebra("g6");
        let psi = cocycle(&["0", "0", "C", "2*C*y"]);
        let lifted = metric_lift_from_cocycle(&alg, &psi).unwrap();
        let catalog = instantiate(&parse_instance("g6.m").unwrap()).unwrap();
        assert_eq!(lifted, catalog);
    }

    #[test]
    fn dimensions_are_stable_under_refinement() {
        for id in ["g15", "g16t", "g6", "g4[alphas=0;1,ms=1;1]"] {
            let alg = algebra(id);
            let d = default_degree(&alg);
            let base = compute_h1(&alg, &build_truncated_space(&alg, d).unwrap()).unwrap();
            let finer =
                compute_h1(&alg, &build_truncated_space_with(&alg, d + 2, 3).unwrap()).unwrap();
            assert_eq!(base.dim_h1, finer.dim_h1, "{id} unstable under refinement");
        }
    }
}

#[cfg(test)]
mod sweep {
    use super::*;
    use crate::catalog::{base_of, enumerate_instances, family, instantiate, TestGrid};
    use crate::liealg::LiftType;

    #[test]
    #[ignore]
    fn metric_family_constant_counts_match_h1() {
        let grid = TestGrid::default();
        let t0 = std::time::Instant::now();
        let mut checked = 0;
        for inst in enumerate_instances(&grid) {
            let fam = family(&inst.family).unwrap();
            if fam.tag != Some(LiftType::Metric) {
                continue;
            }
            let gens = instantiate(&inst).unwrap();
            let mut constants: std::collections::BTreeSet<String> = Default::default();
            for v in &gens {
                for p in v.components()[2].params() {
                    constants.insert(p);
                }
            }
            let base_inst = base_of(&inst).unwrap();
            let base = LieAlgebra::new(Space::Base, instantiate(&base_inst).unwrap()).unwrap();
            let t = std::time::Instant::now();
            let got = h1_dimension(&base).unwrap();
            assert_eq!(got, constants.len(), "{inst}: H1 vs free constants");
            checked += 1;
            if t.elapsed().as_millis() > 2000 {
                eprintln!("slow: {inst} {:?}", t.elapsed());
            }
        }
        eprintln!("checked {checked} metric families in {:?}", t0.elapsed());
    }
}
