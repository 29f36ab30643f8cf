//! Finite-dimensional Lie algebras of vector fields: structure constants,
//! transitivity and stabilizers at a point, lift-type classification on the
//! total space, derived series, and span comparison.

use crate::error::{Error, Result};
use crate::expoly::{ExpPoly, Freq, Mono, Term, Var};
use crate::linalg::{
    self, frac_add, frac_from, frac_is_zero, frac_mul, generic_nullspace, generic_rank,
    generic_rref, generic_solve, Frac, Row, SparseMat,
};
use crate::rat::GaussianRational;
use crate::vfield::{Space, VectorField};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Normal-form shape of a transitive algebra on the total space: fiber
/// components constant, affine, or quadratic in u, with the stabilizer
/// realizing the full corresponding fiber span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LiftType {
    Metric,
    Affine,
    Projective,
}

impl LiftType {
    /// Dimension of the fiber span {1, u, ..} the stabilizer must realize.
    pub fn fiber_span_dim(&self) -> usize {
        match self {
            LiftType::Metric => 1,
            LiftType::Affine => 2,
            LiftType::Projective => 3,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            LiftType::Metric => "m",
            LiftType::Affine => "a",
            LiftType::Projective => "p",
        }
    }
}

impl fmt::Display for LiftType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiftType::Metric => write!(f, "metric"),
            LiftType::Affine => write!(f, "affine"),
            LiftType::Projective => write!(f, "projective"),
        }
    }
}

/// Split a scalar into structural monomials (x, y, u powers and frequency)
/// with parameter-polynomial coefficients.
fn structural_split(p: &ExpPoly) -> BTreeMap<Mono, ExpPoly> {
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

fn structural_index(fields: &[&VectorField]) -> BTreeMap<(usize, Mono), usize> {
    let mut keys: BTreeSet<(usize, Mono)> = BTreeSet::new();
    for v in fields {
        for (ci, comp) in v.components().iter().enumerate() {
            for key in structural_split(comp).into_keys() {
                keys.insert((ci, key));
            }
        }
    }
    keys.into_iter()
        .enumerate()
        .map(|(i, k)| (k, i))
        .collect()
}

/// Coordinates of a field over the structural index, one parameter
/// polynomial per key. None if the field uses a monomial outside the index.
fn structural_coords(
    v: &VectorField,
    index: &BTreeMap<(usize, Mono), usize>,
) -> Option<Vec<ExpPoly>> {
    let mut coords = vec![ExpPoly::zero(); index.len()];
    for (ci, comp) in v.components().iter().enumerate() {
        for (key, part) in structural_split(comp) {
            let &k = index.get(&(ci, key))?;
            coords[k] = coords[k].add(&part);
        }
    }
    Some(coords)
}

/// Numeric value of a fraction with constant numerator and denominator.
pub fn frac_numeric(f: &Frac) -> Option<GaussianRational> {
    let num = f.0.as_constant()?;
    let den = f.1.as_constant()?;
    Some(&num / &den)
}

/// Multiply a fraction vector through by the product of its denominators.
pub fn clear_denominators(v: &[Frac]) -> Vec<ExpPoly> {
    let mut out = Vec::with_capacity(v.len());
    for (i, f) in v.iter().enumerate() {
        let mut p = f.0.clone();
        for (j, g) in v.iter().enumerate() {
            if i != j {
                p = p.mul(&g.1);
            }
        }
        out.push(p);
    }
    out
}

/// A Lie algebra presented by an ordered basis of vector fields, with the
/// verified structure-constant table c[i][j] = coefficients of [X_i, X_j].
/// The constants are plain numbers: closure must hold identically in any
/// parameter symbols, with parameter-free coefficients.
#[derive(Debug, Clone)]
pub struct LieAlgebra {
    pub space: Space,
    pub basis: Vec<VectorField>,
    pub c: Vec<Vec<Vec<GaussianRational>>>,
}

impl LieAlgebra {
    /// Check (generic) linear independence and bracket closure, and compute
    /// the structure constants by expanding brackets over the monomial basis
    /// and solving exact linear systems.
    pub fn new(space: Space, basis: Vec<VectorField>) -> Result<LieAlgebra> {
        let n = basis.len();
        for v in &basis {
            if v.space != space {
                return Err(Error::SpaceMismatch);
            }
        }
        let refs: Vec<&VectorField> = basis.iter().collect();
        let index = structural_index(&refs);
        let coords: Vec<Vec<ExpPoly>> = basis
            .iter()
            .map(|v| structural_coords(v, &index).expect("index covers basis"))
            .collect();
        // equations: rows = structural keys, columns = basis elements
        let mat: Vec<Vec<ExpPoly>> = (0..index.len())
            .map(|k| (0..n).map(|j| coords[j][k].clone()).collect())
            .collect();
        if generic_rank(mat.clone()) < n {
            return Err(Error::LinearlyDependent);
        }
        let mut c = vec![vec![Vec::new(); n]; n];
        for (i, row) in c.iter_mut().enumerate() {
            row[i] = vec![GaussianRational::zero(); n];
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let br = basis[i].bracket(&basis[j])?;
                let not_closed = |note: &str| Error::NotClosed {
                    i,
                    j,
                    bracket: if note.is_empty() {
                        br.to_string()
                    } else {
                        format!("{br} ({note})")
                    },
                };
                let bc = structural_coords(&br, &index)
                    .ok_or_else(|| not_closed(""))?;
                let sol = generic_solve(&mat, &bc).ok_or_else(|| not_closed(""))?;
                let nums: Option<Vec<GaussianRational>> =
                    sol.iter().map(frac_numeric).collect();
                let nums =
                    nums.ok_or_else(|| not_closed("parameter-dependent coefficients"))?;
                c[j][i] = nums.iter().map(|v| -v).collect();
                c[i][j] = nums;
            }
        }
        Ok(LieAlgebra { space, basis, c })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn bracket_coeffs(&self, i: usize, j: usize) -> &[GaussianRational] {
        &self.c[i][j]
    }

    /// The element with the given basis coefficients.
    pub fn element(&self, coeffs: &[GaussianRational]) -> VectorField {
        let mut out = VectorField::zero(self.space);
        for (v, c) in self.basis.iter().zip(coeffs) {
            out = out.add(&v.scale(c));
        }
        out
    }

    /// Numeric coordinates of a field in this basis, or None when the field
    /// is not a constant-coefficient combination of the basis.
    pub fn coordinates_of(&self, v: &VectorField) -> Option<Vec<GaussianRational>> {
        if v.space != self.space {
            return None;
        }
        let refs: Vec<&VectorField> = self.basis.iter().collect();
        let index = structural_index(&refs);
        let mat: Vec<Vec<ExpPoly>> = (0..index.len())
            .map(|k| {
                (0..self.dim())
                    .map(|j| {
                        structural_coords(&self.basis[j], &index).expect("index covers basis")[k]
                            .clone()
                    })
                    .collect()
            })
            .collect();
        let bc = structural_coords(v, &index)?;
        let sol = generic_solve(&mat, &bc)?;
        sol.iter().map(frac_numeric).collect()
    }

    fn element_row(&self, coeffs: &Row) -> VectorField {
        let mut out = VectorField::zero(self.space);
        for (&i, c) in coeffs {
            out = out.add(&self.basis[i].scale(c));
        }
        out
    }

    /// Matrix of ad_P on the basis (columns ad_P(X_j)) for P with the given
    /// coefficients.
    pub fn ad(&self, coeffs: &[GaussianRational]) -> Vec<Vec<GaussianRational>> {
        let n = self.dim();
        let mut m = vec![vec![GaussianRational::zero(); n]; n];
        for (i, ci) in coeffs.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for (j, cij) in self.c[i].iter().enumerate() {
                for (k, v) in cij.iter().enumerate() {
                    let add = ci * v;
                    m[k][j] += &add;
                }
            }
        }
        m
    }

    /// Bracket in basis coordinates: [v, w]_k = sum v_i w_j c[i][j][k].
    fn coord_bracket(&self, v: &Row, w: &Row) -> Row {
        let mut out = Row::new();
        for (&i, vi) in v {
            for (&j, wj) in w {
                let s = vi * wj;
                for (k, cijk) in self.c[i][j].iter().enumerate() {
                    if cijk.is_zero() {
                        continue;
                    }
                    let add = &s * cijk;
                    match out.get_mut(&k) {
                        Some(t) => {
                            *t += &add;
                            if t.is_zero() {
                                out.remove(&k);
                            }
                        }
                        None => {
                            out.insert(k, add);
                        }
                    }
                }
            }
        }
        out
    }

    /// Dimensions of the derived series g, [g,g], [[g,g],[g,g]], ... until
    /// it stabilizes.
    pub fn derived_dims(&self) -> Vec<usize> {
        let n = self.dim();
        let mut current: Vec<Row> = (0..n)
            .map(|i| Row::from([(i, GaussianRational::one())]))
            .collect();
        let mut dims = vec![n];
        loop {
            let mut next = SparseMat::new(n);
            for a in 0..current.len() {
                for b in (a + 1)..current.len() {
                    next.push_row(self.coord_bracket(&current[a], &current[b]));
                }
            }
            next.rref();
            let d = next.rows.len();
            if d == *dims.last().expect("nonempty") {
                break;
            }
            dims.push(d);
            if d == 0 {
                break;
            }
            current = next.rows;
        }
        dims
    }

    pub fn is_abelian(&self) -> bool {
        self.c
            .iter()
            .flatten()
            .flatten()
            .all(GaussianRational::is_zero)
    }

    pub fn is_solvable(&self) -> bool {
        self.derived_dims().last() == Some(&0)
    }

    /// Dimension of the generic orbit: rank of the component matrix over the
    /// fraction field of the full coordinate and parameter ring.
    pub fn generic_orbit_dim(&self) -> usize {
        let cols = match self.space {
            Space::Base => 2,
            Space::Total => 3,
        };
        let mat: Vec<Vec<ExpPoly>> = self
            .basis
            .iter()
            .map(|v| v.components()[..cols].iter().map(|p| (*p).clone()).collect())
            .collect();
        generic_rank(mat)
    }

    /// Transitive on a dense open subset (for generic parameter values).
    pub fn is_transitive(&self) -> bool {
        let need = match self.space {
            Space::Base => 2,
            Space::Total => 3,
        };
        self.generic_orbit_dim() == need
    }

    /// True iff the evaluated fields span the tangent space at the point
    /// (rank decided generically over any parameter symbols).
    pub fn transitive_at(&self, point: &BTreeMap<Var, GaussianRational>) -> Result<bool> {
        let cols = match self.space {
            Space::Base => 2,
            Space::Total => 3,
        };
        let mut mat = Vec::new();
        for v in &self.basis {
            let mut row = Vec::new();
            for comp in &v.components()[..cols] {
                row.push(comp.eval(point)?);
            }
            mat.push(row);
        }
        Ok(generic_rank(mat) == cols)
    }

    /// Base points usable for exact evaluation: an axis carrying exponential
    /// frequencies must stay at 0.
    pub fn eval_points(&self) -> Vec<BTreeMap<Var, GaussianRational>> {
        let mut has_fx = false;
        let mut has_fy = false;
        for v in &self.basis {
            for comp in v.components() {
                for f in comp.freqs() {
                    has_fx |= !f.x.is_zero();
                    has_fy |= !f.y.is_zero();
                }
            }
        }
        let zero = GaussianRational::zero;
        let one = GaussianRational::one;
        let xs = if has_fx { vec![zero()] } else { vec![zero(), one()] };
        let ys = if has_fy { vec![zero()] } else { vec![zero(), one()] };
        let mut pts = Vec::new();
        for xv in &xs {
            for yv in &ys {
                pts.push(BTreeMap::from([
                    (Var::X, xv.clone()),
                    (Var::Y, yv.clone()),
                ]));
            }
        }
        pts
    }

    /// Coefficient vectors (over the parameter fraction field) of a basis of
    /// the stabilizer of the given base point: combinations whose x and y
    /// components vanish there.
    pub fn stabilizer_coords(
        &self,
        point: &BTreeMap<Var, GaussianRational>,
    ) -> Result<Vec<Vec<Frac>>> {
        let mut ax_row = Vec::new();
        let mut ay_row = Vec::new();
        for v in &self.basis {
            ax_row.push(v.ax.eval(point)?);
            ay_row.push(v.ay.eval(point)?);
        }
        Ok(generic_nullspace(vec![ax_row, ay_row]))
    }

    /// Stabilizer of the base point as explicit elements. Coefficients are
    /// constant when the base components carry no parameters (denominators
    /// are cleared otherwise).
    pub fn stabilizer_at(
        &self,
        point: &BTreeMap<Var, GaussianRational>,
    ) -> Result<Vec<VectorField>> {
        let coords = self.stabilizer_coords(point)?;
        let mut out = Vec::new();
        for lam in coords {
            let nums: Option<Vec<GaussianRational>> = lam.iter().map(frac_numeric).collect();
            let field = match nums {
                Some(cs) => self.element(&cs),
                None => {
                    let cleared = clear_denominators(&lam);
                    let mut acc = VectorField::zero(self.space);
                    for (v, c) in self.basis.iter().zip(&cleared) {
                        acc = acc.add(&VectorField {
                            ax: v.ax.mul(c),
                            ay: v.ay.mul(c),
                            au: v.au.mul(c),
                            space: v.space,
                        });
                    }
                    acc
                }
            };
            if !field.is_zero() {
                out.push(field);
            }
        }
        Ok(out)
    }

    /// The stabilizer of the point as an algebra of its own (it is closed
    /// under the bracket).
    pub fn stabilizer_algebra(
        &self,
        point: &BTreeMap<Var, GaussianRational>,
    ) -> Result<LieAlgebra> {
        LieAlgebra::new(self.space, self.stabilizer_at(point)?)
    }

    /// Check that this algebra on the total space is a lift of `base`: the
    /// generators project one-for-one onto the base generators (which makes
    /// the projection kernel zero, the base basis being independent).
    pub fn check_lift_of(&self, base: &LieAlgebra) -> Result<()> {
        if self.space != Space::Total || base.space != Space::Base {
            return Err(Error::SpaceMismatch);
        }
        if self.dim() != base.dim() {
            return Err(Error::NotALift(format!(
                "dimension {} does not match base dimension {}",
                self.dim(),
                base.dim()
            )));
        }
        for (k, (hat, b)) in self.basis.iter().zip(&base.basis).enumerate() {
            let proj = hat.project()?;
            if proj != *b {
                return Err(Error::NotALift(format!(
                    "generator {} projects to {} instead of {}",
                    k + 1,
                    proj,
                    b
                )));
            }
        }
        Ok(())
    }

    /// Classify a lift of `base` by the fiber span of its stabilizer over
    /// the given base point, in the strict normal-form sense: stabilizer
    /// fiber restrictions must span exactly {1}, {1, u}, or {1, u, u^2}, and
    /// the top u-degree across the whole algebra must match. The declared
    /// point is tried first, then the standard evaluation points.
    pub fn classify_lift_type(
        &self,
        base: &LieAlgebra,
        point: &BTreeMap<Var, GaussianRational>,
    ) -> Result<LiftType> {
        self.check_lift_of(base)?;
        let mut deg = 0u32;
        for v in &self.basis {
            deg = deg.max(v.au.u_degree());
        }
        if deg > 2 {
            return Err(Error::NotNormalForm);
        }
        let mut points = vec![point.clone()];
        for p in self.eval_points() {
            if !points.contains(&p) {
                points.push(p);
            }
        }
        let mut best: Option<(usize, Vec<usize>, bool)> = None;
        for point in &points {
            let stab = self.stabilizer_coords(point)?;
            let mut rows: Vec<Vec<ExpPoly>> = Vec::new();
            for lam in &stab {
                // restriction of the element's fiber component to the fiber
                let mut acc = frac_from(ExpPoly::zero());
                for (v, l) in self.basis.iter().zip(lam) {
                    if frac_is_zero(l) {
                        continue;
                    }
                    let au = v.au.eval(point)?;
                    acc = frac_add(&acc, &frac_mul(l, &frac_from(au)));
                }
                if frac_is_zero(&acc) {
                    continue;
                }
                let mut cs = acc.0.coeffs_in_u();
                cs.resize(3, ExpPoly::zero());
                rows.push(cs);
            }
            let (rref, pivots) = generic_rref(rows);
            let clean = rref.iter().all(|row| {
                row.iter()
                    .enumerate()
                    .all(|(j, e)| pivots.contains(&j) || frac_is_zero(e))
            });
            let d = pivots.len();
            if best.as_ref().map(|(bd, _, _)| d > *bd).unwrap_or(true) {
                best = Some((d, pivots, clean));
            }
        }
        let (d, pivots, clean) = best.expect("at least one evaluation point");
        if d == 0 {
            return Err(Error::NotTransitive);
        }
        let prefix: Vec<usize> = (0..d).collect();
        if pivots != prefix || !clean || d != deg as usize + 1 {
            return Err(Error::NotNormalForm);
        }
        Ok(match d {
            1 => LiftType::Metric,
            2 => LiftType::Affine,
            _ => LiftType::Projective,
        })
    }

    /// Find constant-coefficient combinations (X1, X2) spanning a transitive
    /// two-dimensional subalgebra with [X1, X2] = 0 or X1. Basis elements in
    /// the literal normal form are preferred; otherwise a small deterministic
    /// grid of combinations is searched.
    pub fn find_normalized_pair(&self) -> Result<(VectorField, VectorField)> {
        if self.space != Space::Base {
            return Err(Error::SpaceMismatch);
        }
        let n = self.dim();
        // literal fast path: d_x together with d_y or x d_x + d_y
        let x = ExpPoly::var(Var::X);
        let dx = self
            .basis
            .iter()
            .position(|v| v.ax.is_one() && v.ay.is_zero());
        if let Some(i1) = dx {
            for (i2, v) in self.basis.iter().enumerate() {
                if v.ay.is_one() && (v.ax.is_zero() || v.ax == x) {
                    return Ok((self.basis[i1].clone(), self.basis[i2].clone()));
                }
            }
        }
        // search: supports of size 1, then 2, then 3, grid coefficients
        let grid: Vec<GaussianRational> = [-2i64, -1, 1, 2]
            .iter()
            .map(|&v| GaussianRational::from_int(v))
            .collect();
        let mut candidates: Vec<Row> = Vec::new();
        for i in 0..n {
            candidates.push(Row::from([(i, GaussianRational::one())]));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                for a in &grid {
                    for b in &grid {
                        candidates.push(Row::from([(i, a.clone()), (j, b.clone())]));
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    for a in &grid {
                        for b in &grid {
                            for c in &grid {
                                candidates.push(Row::from([
                                    (i, a.clone()),
                                    (j, b.clone()),
                                    (k, c.clone()),
                                ]));
                            }
                        }
                    }
                }
            }
        }
        for v in &candidates {
            for eps in [GaussianRational::zero(), GaussianRational::one()] {
                // [v, w] = eps v is linear in w
                let mut mat = SparseMat::new(n);
                let mut eqs: Vec<(Row, GaussianRational)> = Vec::new();
                let mut cols: Vec<Row> = vec![Row::new(); n];
                for (&i, vi) in v {
                    for (cij, colj) in self.c[i].iter().zip(cols.iter_mut()) {
                        for (k, cijk) in cij.iter().enumerate() {
                            if cijk.is_zero() {
                                continue;
                            }
                            let add = vi * cijk;
                            let cell = colj.entry(k).or_insert_with(GaussianRational::zero);
                            *cell += &add;
                        }
                    }
                }
                for k in 0..n {
                    let mut lhs = Row::new();
                    for (j, col) in cols.iter().enumerate() {
                        if let Some(e) = col.get(&k) {
                            if !e.is_zero() {
                                lhs.insert(j, e.clone());
                            }
                        }
                    }
                    let rhs = &eps * &v.get(&k).cloned().unwrap_or_else(GaussianRational::zero);
                    mat.push_row(lhs.clone());
                    eqs.push((lhs, rhs));
                }
                let Some(particular) = linalg::solve_system(&eqs, n) else {
                    continue;
                };
                let null = mat.nullspace();
                let mut shifts: Vec<Row> = vec![Row::new()];
                for nv in null.iter().take(3) {
                    let mut next = Vec::new();
                    for s in &shifts {
                        for t in [-2i64, -1, 0, 1, 2] {
                            let mut s2 = s.clone();
                            linalg::row_axpy(&mut s2, &GaussianRational::from_int(t), nv);
                            next.push(s2);
                        }
                    }
                    shifts = next;
                }
                for s in shifts {
                    let mut w = Row::new();
                    for (j, val) in particular.iter().enumerate() {
                        if !val.is_zero() {
                            w.insert(j, val.clone());
                        }
                    }
                    for (j, val) in &s {
                        let cell = w.entry(*j).or_insert_with(GaussianRational::zero);
                        *cell += val;
                    }
                    w.retain(|_, val| !val.is_zero());
                    if w.is_empty() {
                        continue;
                    }
                    // need a genuinely 2-dimensional span
                    let mut span = SparseMat::new(n);
                    span.push_row(v.clone());
                    span.push_row(w.clone());
                    if span.rank() != 2 {
                        continue;
                    }
                    let f1 = self.element_row(v);
                    let f2 = self.element_row(&w);
                    let pair_rank = generic_rank(vec![
                        vec![f1.ax.clone(), f1.ay.clone()],
                        vec![f2.ax.clone(), f2.ay.clone()],
                    ]);
                    if pair_rank == 2 {
                        return Ok((f1, f2));
                    }
                }
            }
        }
        Err(Error::NoTransitivePair)
    }
}

/// Formal span comparison: fields expanded over the shared monomial basis,
/// parameter symbols treated formally.
pub fn span_contains(a: &[VectorField], b: &[VectorField]) -> bool {
    let mut keys: BTreeSet<(usize, Mono)> = BTreeSet::new();
    let full_mono = |t: &Term| Mono {
        freq: t.freq.clone(),
        exps: t.exps.clone(),
    };
    for v in a.iter().chain(b.iter()) {
        for (ci, comp) in v.components().iter().enumerate() {
            for t in comp.terms() {
                keys.insert((ci, full_mono(t)));
            }
        }
    }
    let index: BTreeMap<(usize, Mono), usize> = keys
        .into_iter()
        .enumerate()
        .map(|(i, k)| (k, i))
        .collect();
    let row_of = |v: &VectorField| -> Row {
        let mut row = Row::new();
        for (ci, comp) in v.components().iter().enumerate() {
            for t in comp.terms() {
                let col = index[&(ci, full_mono(t))];
                row.insert(col, t.coeff.clone());
            }
        }
        row
    };
    let mut mat = SparseMat::new(index.len());
    for v in a {
        mat.push_row(row_of(v));
    }
    mat.rref();
    b.iter()
        .all(|v| linalg::reduce_row(row_of(v), &mat.rows).is_empty())
}

pub fn span_equal(a: &[VectorField], b: &[VectorField]) -> bool {
    span_contains(a, b) && span_contains(b, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_vector_field;

    fn fields(src: &[&str], space: Space) -> Vec<VectorField> {
        src.iter()
            .map(|s| parse_vector_field(s, space).unwrap())
            .collect()
    }

    fn base(src: &[&str]) -> Result<LieAlgebra> {
        LieAlgebra::new(Space::Base, fields(src, Space::Base))
    }

    fn total(src: &[&str]) -> Result<LieAlgebra> {
        LieAlgebra::new(Space::Total, fields(src, Space::Total))
    }

    fn origin() -> BTreeMap<Var, GaussianRational> {
        BTreeMap::from([
            (Var::X, GaussianRational::zero()),
            (Var::Y, GaussianRational::zero()),
        ])
    }

    #[test]
    fn structure_constants_of_affine_line() {
        let g = base(&["Dx", "x*Dx"]).unwrap();
        // [d_x, x d_x] = d_x
        assert_eq!(
            g.bracket_coeffs(0, 1),
            &[GaussianRational::one(), GaussianRational::zero()]
        );
        assert!(!g.is_abelian());
        assert!(g.is_solvable());
    }

    #[test]
    fn parameter_dependent_constants_are_rejected() {
        // [d_y, x d_x + A y d_y] = A d_y: not a fixed-coefficient algebra
        let e = base(&["Dx", "Dy", "x*Dx + A*y*Dy"]).unwrap_err();
        assert!(matches!(e, Error::NotClosed { i: 1, j: 2, .. }));
        // instantiating the parameter makes it close
        let g = base(&["Dx", "Dy", "x*Dx + 2*y*Dy"]).unwrap();
        assert_eq!(
            g.bracket_coeffs(1, 2),
            &[
                GaussianRational::zero(),
                GaussianRational::from_int(2),
                GaussianRational::zero()
            ]
        );
    }

    #[test]
    fn free_constants_in_fiber_components_are_fine() {
        // lift-style generators with a free constant: brackets stay numeric
        let g = total(&["Dx + A*e^(x)*Du", "Du"]).unwrap();
        assert!(g
            .bracket_coeffs(0, 1)
            .iter()
            .all(GaussianRational::is_zero));
    }

    #[test]
    fn closure_failure_is_reported() {
        let e = base(&["Dx", "x^2*Dx"]).unwrap_err();
        assert!(matches!(e, Error::NotClosed { i: 0, j: 1, .. }));
    }

    #[test]
    fn dependence_is_reported() {
        assert_eq!(base(&["Dx", "2*Dx"]).unwrap_err(), Error::LinearlyDependent);
        assert_eq!(
            base(&["A*Dx", "B*Dx"]).unwrap_err(),
            Error::LinearlyDependent
        );
    }

    #[test]
    fn sl2_is_not_solvable() {
        let g = base(&["Dx", "x*Dx", "x^2*Dx"]).unwrap();
        assert!(!g.is_solvable());
        assert_eq!(g.derived_dims(), vec![3]);
        assert!(!g.is_transitive()); // orbit is 1-dimensional
    }

    #[test]
    fn transitivity_generic_and_at_points() {
        let g = base(&["Dx", "x*Dx + Dy", "x^2*Dx + 2*x*Dy"]).unwrap();
        assert!(g.is_transitive());
        assert!(g.transitive_at(&origin()).unwrap());
        let h = base(&["x*Dx", "y*Dy"]).unwrap();
        assert!(h.is_transitive());
        assert!(!h.transitive_at(&origin()).unwrap());
    }

    #[test]
    fn stabilizer_dimension_and_span() {
        let g = base(&["Dx", "Dy", "y*Dy", "y^2*Dy"]).unwrap();
        let st = g.stabilizer_at(&origin()).unwrap();
        assert_eq!(st.len(), 2); // r - 2
        let expected = fields(&["y*Dy", "y^2*Dy"], Space::Base);
        assert!(span_equal(&st, &expected));
        let sub = g.stabilizer_algebra(&origin()).unwrap();
        assert!(sub.is_solvable());
    }

    #[test]
    fn ad_matrix_of_scaling() {
        let g = base(&["Dx", "x*Dx"]).unwrap();
        // ad of x d_x: [x d_x, d_x] = -d_x
        let m = g.ad(&[GaussianRational::zero(), GaussianRational::one()]);
        assert_eq!(m[0][0], GaussianRational::from_int(-1));
        assert!(m[1][0].is_zero());
        assert!(m[0][1].is_zero() && m[1][1].is_zero());
    }

    #[test]
    fn classify_the_three_normal_forms() {
        let gb = base(&["Dx", "Dy", "y*Dy"]).unwrap();
        let gm = total(&["Dx", "Dy", "y*Dy + Du"]).unwrap();
        assert_eq!(
            gm.classify_lift_type(&gb, &origin()).unwrap(),
            LiftType::Metric
        );
        let ab = base(&["Dx", "Dy", "y*Dy", "y^2*Dy"]).unwrap();
        let ga = total(&[
            "Dx",
            "Dy",
            "y*Dy - u*Du",
            "y^2*Dy + (1 - 2*y*u)*Du",
        ])
        .unwrap();
        assert_eq!(
            ga.classify_lift_type(&ab, &origin()).unwrap(),
            LiftType::Affine
        );
        let pb = base(&["Dx", "Dy", "x*Dy", "x*Dx - y*Dy", "y*Dx"]).unwrap();
        let gp = total(&[
            "Dx",
            "Dy",
            "x*Dy + Du",
            "x*Dx - y*Dy - 2*u*Du",
            "y*Dx - u^2*Du",
        ])
        .unwrap();
        assert_eq!(
            gp.classify_lift_type(&pb, &origin()).unwrap(),
            LiftType::Projective
        );
    }

    #[test]
    fn classify_rejects_mismatched_projection() {
        let gb = base(&["Dx", "Dy"]).unwrap();
        let bad = total(&["Dy", "Dx + Du"]).unwrap();
        assert!(matches!(
            bad.classify_lift_type(&gb, &origin()),
            Err(Error::NotALift(_))
        ));
    }

    #[test]
    fn classify_rejects_fiber_scaling_without_translation() {
        let gb = base(&["Dx", "Dy"]).unwrap();
        // kernel element u d_u makes this not a lift (dimension mismatch)
        let g = total(&["Dx", "Dy", "u*Du"]).unwrap();
        assert!(matches!(
            g.classify_lift_type(&gb, &origin()),
            Err(Error::NotALift(_))
        ));
    }

    #[test]
    fn find_pair_literal_and_search() {
        let g = base(&["Dx", "x*Dx + Dy", "x^2*Dx + 2*x*Dy"]).unwrap();
        let (x1, x2) = g.find_normalized_pair().unwrap();
        assert_eq!(x1, g.basis[0]);
        assert_eq!(x2, g.basis[1]);
        // a basis without the literal normal form
        let h = base(&["Dx + Dy", "Dx - Dy"]).unwrap();
        let (y1, y2) = h.find_normalized_pair().unwrap();
        let br = y1.bracket(&y2).unwrap();
        assert!(br.is_zero() || br == y1);
        // intransitive algebra has no pair
        let k = base(&["Dx", "x*Dx"]).unwrap();
        assert_eq!(k.find_normalized_pair().unwrap_err(), Error::NoTransitivePair);
    }

    #[test]
    fn span_comparison_is_formal() {
        let a = fields(&["Dx + Dy", "Dx - Dy"], Space::Base);
        let b = fields(&["Dx", "Dy"], Space::Base);
        assert!(span_equal(&a, &b));
        let c = fields(&["A*Dx"], Space::Base);
        let d = fields(&["Dx"], Space::Base);
        assert!(!span_equal(&c, &d));
    }
}
