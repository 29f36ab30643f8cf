//! Exact linear algebra: sparse reduced row echelon form over the Gaussian
//! rationals, and generic (fraction-field) rank and echelon form for small
//! matrices whose entries carry parameter symbols.

use crate::expoly::ExpPoly;
use crate::rat::GaussianRational;
use std::collections::BTreeMap;

pub type Row = BTreeMap<usize, GaussianRational>;

/// target += c * src
pub fn row_axpy(target: &mut Row, c: &GaussianRational, src: &Row) {
    if c.is_zero() {
        return;
    }
    for (j, v) in src {
        let add = c * v;
        match target.get_mut(j) {
            Some(t) => {
                *t += &add;
                if t.is_zero() {
                    target.remove(j);
                }
            }
            None => {
                target.insert(*j, add);
            }
        }
    }
}

fn row_scale(row: &mut Row, c: &GaussianRational) {
    for v in row.values_mut() {
        *v = &*v * c;
    }
}

/// Sparse matrix over the Gaussian rationals, stored as rows.
#[derive(Debug, Clone, Default)]
pub struct SparseMat {
    pub ncols: usize,
    pub rows: Vec<Row>,
}

fn is_unit_entry(c: &GaussianRational) -> bool {
    let one = GaussianRational::one;
    let i = GaussianRational::i;
    *c == one() || *c == -&one() || *c == i() || *c == -&i()
}

impl SparseMat {
    pub fn new(ncols: usize) -> SparseMat {
        SparseMat {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Row) {
        debug_assert!(row.keys().all(|&j| j < self.ncols));
        if !row.is_empty() {
            self.rows.push(row);
        }
    }

    pub fn push_dense_row(&mut self, entries: &[GaussianRational]) {
        debug_assert_eq!(entries.len(), self.ncols);
        let row: Row = entries
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, v)| (j, v.clone()))
            .collect();
        self.push_row(row);
    }

    /// In-place reduced row echelon form. Afterwards `rows` holds the nonzero
    /// rows sorted by pivot column, each pivot normalized to 1 and alone in
    /// its column. Returns the pivot columns in ascending order. The result
    /// is the canonical RREF of the row space, independent of input order.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut buckets: BTreeMap<usize, Vec<Row>> = BTreeMap::new();
        for row in self.rows.drain(..) {
            if let Some((&lead, _)) = row.iter().next() {
                buckets.entry(lead).or_default().push(row);
            }
        }
        let mut pivot_rows: Vec<Row> = Vec::new();
        while let Some((&col, _)) = buckets.iter().next() {
            let mut here = buckets.remove(&col).expect("bucket exists");
            // Prefer a pivot whose leading entry is a unit: it keeps the
            // elimination division-free more often.
            let pick = here
                .iter()
                .position(|r| is_unit_entry(&r[&col]))
                .unwrap_or(0);
            let mut piv = here.remove(pick);
            let lead = piv.remove(&col).expect("leading entry");
            let inv = lead.inv().expect("nonzero leading entry");
            row_scale(&mut piv, &inv);
            piv.insert(col, GaussianRational::one());
            for mut row in here {
                // the pivot entry cancels exactly, so axpy alone clears col
                let c = row.get(&col).cloned().expect("same leading column");
                row_axpy(&mut row, &(-&c), &piv);
                debug_assert!(!row.contains_key(&col));
                if let Some((&lead, _)) = row.iter().next() {
                    buckets.entry(lead).or_default().push(row);
                }
            }
            pivot_rows.push(piv);
        }
        // Back substitution: clear pivot columns above, walking upwards so
        // each row used for elimination is already fully reduced.
        for j in (0..pivot_rows.len()).rev() {
            let (col, src) = {
                let r = &pivot_rows[j];
                let (&c, _) = r.iter().next().expect("pivot row nonempty");
                (c, r.clone())
            };
            for row in pivot_rows.iter_mut().take(j) {
                if let Some(e) = row.get(&col).cloned() {
                    row_axpy(row, &(-&e), &src);
                    debug_assert!(!row.contains_key(&col));
                }
            }
        }
        let pivots: Vec<usize> = pivot_rows
            .iter()
            .map(|r| *r.iter().next().expect("pivot row nonempty").0)
            .collect();
        self.rows = pivot_rows;
        pivots
    }

    pub fn rank(mut self) -> usize {
        self.rref().len()
    }

    /// Canonical basis of the right nullspace: one vector per free column,
    /// in ascending free-column order, unit entry at the free column.
    pub fn nullspace(mut self) -> Vec<Row> {
        let pivots = self.rref();
        let pivot_set: BTreeMap<usize, usize> = pivots
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i))
            .collect();
        let mut basis = Vec::new();
        for f in 0..self.ncols {
            if pivot_set.contains_key(&f) {
                continue;
            }
            let mut v: Row = BTreeMap::new();
            v.insert(f, GaussianRational::one());
            for (&pc, &ri) in &pivot_set {
                if let Some(e) = self.rows[ri].get(&f) {
                    v.insert(pc, -e);
                }
            }
            basis.push(v);
        }
        basis
    }

}

/// Reduce a row against RREF rows (sorted by pivot column); the result is
/// zero iff the row lies in their span.
pub fn reduce_row(mut row: Row, rref_rows: &[Row]) -> Row {
    for piv in rref_rows {
        let (&col, _) = piv.iter().next().expect("pivot row nonempty");
        if let Some(e) = row.get(&col).cloned() {
            row_axpy(&mut row, &(-&e), piv);
        }
    }
    row
}

/// Particular solution of the system `lhs . x = rhs` per equation, with all
/// free variables set to zero; None if the system is inconsistent. Equations
/// with an empty left-hand side participate (0 = b detects inconsistency).
pub fn solve_system(
    eqs: &[(Row, GaussianRational)],
    ncols: usize,
) -> Option<Vec<GaussianRational>> {
    let mut aug = SparseMat::new(ncols + 1);
    for (row, b) in eqs {
        let mut r = row.clone();
        if !b.is_zero() {
            r.insert(ncols, b.clone());
        }
        aug.push_row(r);
    }
    let pivots = aug.rref();
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![GaussianRational::zero(); ncols];
    for row in &aug.rows {
        let (&pc, _) = row.iter().next().expect("pivot row nonempty");
        if let Some(b) = row.get(&ncols) {
            x[pc] = b.clone();
        }
    }
    Some(x)
}

// ---------------------------------------------------------------------------
// Generic (fraction-field) linear algebra over parameters
// ---------------------------------------------------------------------------

/// An unreduced fraction of exponential polynomials; zero test is exact
/// (numerator zero), no gcd reduction is attempted.
pub type Frac = (ExpPoly, ExpPoly);

pub fn frac_from(p: ExpPoly) -> Frac {
    (p, ExpPoly::one())
}

pub fn frac_is_zero(f: &Frac) -> bool {
    f.0.is_zero()
}

#[cfg(test)]
pub fn frac_eq(a: &Frac, b: &Frac) -> bool {
    a.0.mul(&b.1) == b.0.mul(&a.1)
}

pub fn frac_add(a: &Frac, b: &Frac) -> Frac {
    (a.0.mul(&b.1).add(&b.0.mul(&a.1)), a.1.mul(&b.1))
}

pub fn frac_mul(a: &Frac, b: &Frac) -> Frac {
    (a.0.mul(&b.0), a.1.mul(&b.1))
}

pub fn frac_neg(a: &Frac) -> Frac {
    (a.0.neg(), a.1.clone())
}

/// Gauss-Jordan over the fraction field of the parameter ring. Entries that
/// are generically nonzero (nonzero as polynomials in the parameters) are
/// usable pivots. Returns the echelonized matrix and the pivot columns.
pub fn generic_rref(mat: Vec<Vec<ExpPoly>>) -> (Vec<Vec<Frac>>, Vec<usize>) {
    let mut rows: Vec<Vec<Frac>> = mat
        .into_iter()
        .map(|r| r.into_iter().map(frac_from).collect())
        .collect();
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut next_row = 0;
    for col in 0..ncols {
        let Some(pr) = (next_row..rows.len()).find(|&r| !frac_is_zero(&rows[r][col]))
        else {
            continue;
        };
        rows.swap(next_row, pr);
        let inv = {
            let p = &rows[next_row][col];
            (p.1.clone(), p.0.clone())
        };
        for e in rows[next_row].iter_mut() {
            *e = frac_mul(e, &inv);
        }
        let prow = rows[next_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == next_row || frac_is_zero(&row[col]) {
                continue;
            }
            let c = frac_neg(&row[col]);
            for (dst, p) in row.iter_mut().zip(&prow) {
                let add = frac_mul(&c, p);
                *dst = frac_add(dst, &add);
            }
            row[col] = frac_from(ExpPoly::zero());
        }
        pivots.push(col);
        next_row += 1;
        if next_row == rows.len() {
            break;
        }
    }
    rows.truncate(next_row);
    (rows, pivots)
}

pub fn generic_rank(mat: Vec<Vec<ExpPoly>>) -> usize {
    generic_rref(mat).1.len()
}

/// Solve `mat . x = rhs` over the fraction field of the parameter ring,
/// free variables set to zero; None if generically inconsistent.
pub fn generic_solve(mat: &[Vec<ExpPoly>], rhs: &[ExpPoly]) -> Option<Vec<Frac>> {
    debug_assert_eq!(mat.len(), rhs.len());
    let n = mat.first().map(|r| r.len()).unwrap_or(0);
    let aug: Vec<Vec<ExpPoly>> = mat
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let (rows, pivots) = generic_rref(aug);
    if pivots.contains(&n) {
        return None;
    }
    let mut x: Vec<Frac> = (0..n).map(|_| frac_from(ExpPoly::zero())).collect();
    for (k, &pc) in pivots.iter().enumerate() {
        x[pc] = rows[k][n].clone();
    }
    Some(x)
}

/// Canonical nullspace basis over the fraction field: one vector per free
/// column, unit entry at the free column, fraction entries elsewhere.
pub fn generic_nullspace(mat: Vec<Vec<ExpPoly>>) -> Vec<Vec<Frac>> {
    let ncols = mat.first().map(|r| r.len()).unwrap_or(0);
    let (rows, pivots) = generic_rref(mat);
    let mut basis = Vec::new();
    for f in 0..ncols {
        if pivots.contains(&f) {
            continue;
        }
        let mut v: Vec<Frac> = (0..ncols).map(|_| frac_from(ExpPoly::zero())).collect();
        v[f] = frac_from(ExpPoly::one());
        for (ri, &pc) in pivots.iter().enumerate() {
            if !frac_is_zero(&rows[ri][f]) {
                v[pc] = frac_neg(&rows[ri][f]);
            }
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expoly::Var;
    use crate::rat::GaussianRational as G;

    fn dense(rows: &[&[i64]]) -> SparseMat {
        let ncols = rows[0].len();
        let mut m = SparseMat::new(ncols);
        for r in rows {
            let entries: Vec<G> = r.iter().map(|&v| G::from_int(v)).collect();
            m.push_dense_row(&entries);
        }
        m
    }

    #[test]
    fn rref_is_canonical() {
        let mut a = dense(&[&[1, 2, 3], &[2, 4, 7], &[0, 0, 1]]);
        let mut b = dense(&[&[2, 4, 7], &[0, 0, 1], &[1, 2, 3]]);
        let pa = a.rref();
        let pb = b.rref();
        assert_eq!(pa, vec![0, 2]);
        assert_eq!(pa, pb);
        assert_eq!(a.rows, b.rows);
    }

    #[test]
    fn rank_and_nullspace() {
        let m = dense(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        assert_eq!(m.clone().rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        // nullspace vector is (1, -2, 1) normalized to free column 2
        let v = &ns[0];
        assert_eq!(v.get(&2), Some(&G::one()));
        assert_eq!(v.get(&1), Some(&G::from_int(-2)));
        assert_eq!(v.get(&0), Some(&G::from_int(1)));
    }

    #[test]
    fn solve_consistent_and_not() {
        let row = |a: i64, b: i64| -> Row {
            [(0usize, G::from_int(a)), (1usize, G::from_int(b))]
                .into_iter()
                .filter(|(_, v)| !v.is_zero())
                .collect()
        };
        let x = solve_system(
            &[(row(1, 1), G::from_int(3)), (row(1, -1), G::from_int(1))],
            2,
        )
        .unwrap();
        assert_eq!(x, vec![G::from_int(2), G::from_int(1)]);
        assert!(solve_system(
            &[(row(1, 1), G::from_int(1)), (row(2, 2), G::from_int(3))],
            2,
        )
        .is_none());
        // a degenerate all-zero equation with nonzero right side is caught
        assert!(solve_system(&[(Row::new(), G::one())], 2).is_none());
    }

    #[test]
    fn generic_rank_sees_parameters_as_generic() {
        let a = ExpPoly::var(Var::param("A"));
        let b = ExpPoly::var(Var::param("B"));
        // rows A, B span one generic dimension, not two
        assert_eq!(generic_rank(vec![vec![a.clone()], vec![b.clone()]]), 1);
        // but [A, 0; 0, B] is generically invertible
        assert_eq!(
            generic_rank(vec![
                vec![a.clone(), ExpPoly::zero()],
                vec![ExpPoly::zero(), b.clone()]
            ]),
            2
        );
    }

    #[test]
    fn generic_nullspace_of_single_relation() {
        let a = ExpPoly::var(Var::param("A"));
        let b = ExpPoly::var(Var::param("B"));
        let ns = generic_nullspace(vec![vec![a.clone(), b.clone()]]);
        assert_eq!(ns.len(), 1);
        // v = (-B/A, 1)
        assert!(frac_eq(&ns[0][0], &(b.neg(), a.clone())));
        assert!(frac_eq(&ns[0][1], &frac_from(ExpPoly::one())));
    }
}
