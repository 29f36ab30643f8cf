//! Derivation of lifts from scratch: normalization of the fiber components
//! along the distinguished transitive pair, the degree-two fiber ansatz,
//! reduction of the commutator constraints to linear conditions on the
//! template coefficients plus a small constant polynomial system, and branch
//! solving of that system. Also: equivalence checks between a solved branch
//! and a catalog entry, per lift type.

use crate::cohomology::{
    build_truncated_space, class_coordinates, compute_h1, default_degree, is_coboundary,
    max_coeff_degree, Cocycle, TruncatedSpace,
};
use crate::error::{Error, Result};
use crate::expoly::{ExpPoly, Freq, Mono, Term, Var};
use crate::groebner::{
    apply_assignment, enumerate_constant_branches, groebner_basis, solve_constant_branches,
    Assignment,
};
use crate::liealg::{LieAlgebra, LiftType};
use crate::linalg::{Row, SparseMat};
use crate::rat::GaussianRational;
use crate::vfield::{FiberMap, Space, VectorField};
use std::collections::{BTreeMap, BTreeSet};

/// The undetermined fiber components of a prospective lift: per generator a
/// triple of templates (constant, linear and quadratic u-coefficients) drawn
/// from a truncated function space, with one fresh constant symbol per basis
/// monomial. The two normalized-pair generators carry zero templates.
#[derive(Debug, Clone)]
pub struct AnsatzLift {
    pub type_cap: LiftType,
    pub unknowns: Vec<[ExpPoly; 3]>,
    pub symbols: Vec<String>,
}

impl AnsatzLift {
    /// The fiber component of each generator: alpha + beta u + gamma u^2.
    pub fn fiber_functions(&self) -> Vec<ExpPoly> {
        let u = ExpPoly::var(Var::U);
        let uu = u.mul(&u);
        self.unknowns
            .iter()
            .map(|[a, b, g]| a.add(&b.mul(&u)).add(&g.mul(&uu)))
            .collect()
    }
}

/// One solved lift: the constants fixed by the equations (symbols absent
/// from the assignment remain free family parameters), the generators in the
/// order of the base realization, the classified type, and transitivity of
/// the lifted realization (decided generically in any remaining symbols).
#[derive(Debug, Clone)]
pub struct LiftBranch {
    pub assignment: Assignment,
    pub generators: Vec<VectorField>,
    pub tag: LiftType,
    pub transitive: bool,
}

/// All branches of a lift solve, plus diagnostic notes: the reduced basis of
/// the residual constant system and a line for every discarded branch.
#[derive(Debug, Clone, Default)]
pub struct LiftSolveResult {
    pub branches: Vec<LiftBranch>,
    pub groebner_traces: Vec<String>,
}

/// A verified equivalence between two normalized lifts: the fiber-coordinate
/// move used and the values of all solved symbols (gauge constants together
/// with any free constants of either side).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceWitness {
    pub gauge: &'static str,
    pub assignment: Assignment,
}

/// Branch enumeration for a system of equations in constant symbols only.
pub fn solve_constant_system(eqs: &[ExpPoly]) -> Result<Vec<Assignment>> {
    solve_constant_branches(eqs)
}

// ---------------------------------------------------------------------------
// normalization along the distinguished pair

fn depends_on_x(p: &ExpPoly) -> bool {
    p.terms()
        .iter()
        .any(|t| t.exps.get(&Var::X).copied().unwrap_or(0) > 0 || !t.freq.x.is_zero())
}

/// The frequency (w, s) of a pure linear form w x + s y, or an error when
/// the expression has any other shape (so that e^{form} leaves the ring).
fn linear_form_freq(q: &ExpPoly) -> Result<Freq> {
    let mut w = GaussianRational::zero();
    let mut s = GaussianRational::zero();
    for t in q.terms() {
        if !t.freq.is_zero() {
            return Err(Error::OutsideRing(format!(
                "integrating factor exponent {q} contains an exponential"
            )));
        }
        let degx = t.exps.get(&Var::X).copied().unwrap_or(0);
        let degy = t.exps.get(&Var::Y).copied().unwrap_or(0);
        if t.exps.len() == 1 && degx == 1 {
            w = t.coeff.clone();
        } else if t.exps.len() == 1 && degy == 1 {
            s = t.coeff.clone();
        } else {
            return Err(Error::OutsideRing(format!(
                "integrating factor exponent {q} is not a linear form in x and y"
            )));
        }
    }
    Ok(Freq::new(w, s))
}

/// Fiber translation removing an u-independent coefficient along one axis.
fn kill_translation(f: &ExpPoly, dir: &Var) -> Result<FiberMap> {
    if f.has_var(&Var::U) {
        return Err(Error::OutsideRing(format!(
            "a fiber translation cannot remove the u-dependent coefficient {f}"
        )));
    }
    FiberMap::translation(f.antideriv(dir)?)
}

/// Affine fiber map removing an u-affine coefficient along one axis. The
/// scale factor is the integrating factor e^{-q} with dq/dir = beta, which
/// stays in the ring exactly when q is a pure linear form.
fn kill_affine(f: &ExpPoly, dir: &Var) -> Result<FiberMap> {
    let mut cs = f.coeffs_in_u();
    cs.resize(3, ExpPoly::zero());
    if !cs[2].is_zero() {
        return Err(Error::OutsideRing(format!(
            "removing the u^2 coefficient of {f} solves a Riccati equation outside the ring"
        )));
    }
    let q = cs[1].antideriv(dir)?;
    let freq = linear_form_freq(&q)?;
    let a = ExpPoly::exponential(freq.neg());
    let a_inv = ExpPoly::exponential(freq);
    let b = cs[0].mul(&a).antideriv(dir)?.neg();
    FiberMap::affine(a, a_inv, b)
}

fn pushforward_all(gens: &[VectorField], m: &FiberMap) -> Result<Vec<VectorField>> {
    gens.iter().map(|v| v.pushforward(m)).collect()
}

/// Bring a lift to the form with zero fiber components on the two
/// distinguished generators (projections d_x and d_y or x d_x + d_y), using
/// only moves of the given type: translations for Metric, affine fiber maps
/// for Affine and Projective (a u^2 coefficient on a pair generator would
/// need a Riccati solution and is rejected).
pub fn normalize_lift(
    hat: &[VectorField],
    pair: (usize, usize),
    cap: LiftType,
) -> Result<Vec<VectorField>> {
    let (p0, p1) = pair;
    if p0 >= hat.len() || p1 >= hat.len() || p0 == p1 {
        return Err(Error::NotALift(format!(
            "pair indices ({p0}, {p1}) out of range for {} generators",
            hat.len()
        )));
    }
    let x = ExpPoly::var(Var::X);
    let a0 = hat[p0].project()?;
    if !(a0.ax.is_one() && a0.ay.is_zero()) {
        return Err(Error::NotALift(format!(
            "pair generator {p0} projects to {a0}, expected the x-translation"
        )));
    }
    let a1 = hat[p1].project()?;
    if !(a1.ay.is_one() && (a1.ax.is_zero() || a1.ax == x)) {
        return Err(Error::NotALift(format!(
            "pair generator {p1} projects to {a1}, expected the y-translation or its dilation companion"
        )));
    }

    let kill = |f: &ExpPoly, dir: &Var| -> Result<FiberMap> {
        match cap {
            LiftType::Metric => kill_translation(f, dir),
            LiftType::Affine | LiftType::Projective => kill_affine(f, dir),
        }
    };

    let first = kill(&hat[p0].au, &Var::X)?;
    let gens = pushforward_all(hat, &first)?;
    let f2 = gens[p1].au.clone();
    if depends_on_x(&f2) {
        return Err(Error::NotALift(format!(
            "after normalizing the first pair generator, the second still carries \
             the x-dependent coefficient {f2}; the input does not close as a lift"
        )));
    }
    let second = kill(&f2, &Var::Y)?;
    pushforward_all(&gens, &second)
}

// ---------------------------------------------------------------------------
// ansatz construction

fn mono_expoly(m: &Mono) -> ExpPoly {
    let exps: Vec<(Var, u32)> = m.exps.iter().map(|(v, k)| (v.clone(), *k)).collect();
    ExpPoly::term(GaussianRational::one(), &exps, m.freq.clone())
}

/// Templates for every generator of the working basis: zero on the first two
/// (the normalized pair), and a fresh symbol per truncated-space monomial
/// for each active u-power elsewhere.
pub fn build_ansatz(alg: &LieAlgebra, cap: LiftType, space: &TruncatedSpace) -> AnsatzLift {
    let slots = cap.fiber_span_dim();
    let letters = ["a", "b", "c"];
    let mut unknowns = Vec::new();
    let mut symbols = Vec::new();
    for k in 0..alg.dim() {
        let mut triple = [ExpPoly::zero(), ExpPoly::zero(), ExpPoly::zero()];
        if k >= 2 {
            for (s, slot) in triple.iter_mut().enumerate().take(slots) {
                for (m, mono) in space.basis.iter().enumerate() {
                    let name = format!("k{k:02}{}{m:03}", letters[s]);
                    let sym = ExpPoly::var(Var::param(&name));
                    *slot = slot.add(&sym.mul(&mono_expoly(mono)));
                    symbols.push(name);
                }
            }
        }
        unknowns.push(triple);
    }
    AnsatzLift {
        type_cap: cap,
        unknowns,
        symbols,
    }
}

/// The fiber component of [X_i + f_i d_u, X_j + f_j d_u] minus the fiber
/// component demanded by the structure constants; zero for a genuine lift.
fn bracket_residual(alg: &LieAlgebra, fs: &[ExpPoly], i: usize, j: usize) -> ExpPoly {
    let xi = &alg.basis[i];
    let xj = &alg.basis[j];
    let dui = fs[i].diff(&Var::U).expect("u-derivative");
    let duj = fs[j].diff(&Var::U).expect("u-derivative");
    let mut e = xi
        .apply(&fs[j])
        .add(&fs[i].mul(&duj))
        .sub(&xj.apply(&fs[i]))
        .sub(&fs[j].mul(&dui));
    for (l, cl) in alg.bracket_coeffs(i, j).iter().enumerate() {
        if !cl.is_zero() {
            e = e.sub(&fs[l].scale(cl));
        }
    }
    e
}

/// Split a term into its (x, y, u, frequency) monomial and its symbol part.
fn split_term(t: &Term) -> (Mono, Vec<(Var, u32)>) {
    let mut xyu = BTreeMap::new();
    let mut params = Vec::new();
    for (v, k) in &t.exps {
        if v.is_param() {
            params.push((v.clone(), *k));
        } else {
            xyu.insert(v.clone(), *k);
        }
    }
    (
        Mono {
            freq: t.freq.clone(),
            exps: xyu,
        },
        params,
    )
}

/// Solve a system of equations linear in the unknown symbols by exact
/// echelon reduction over the monomial basis: every pivot symbol is
/// expressed in the free ones. Returns None when the system is inconsistent.
fn linear_stage(eqs: &[ExpPoly]) -> Result<Option<Assignment>> {
    let mut names: BTreeSet<String> = BTreeSet::new();
    for e in eqs {
        for p in e.params() {
            names.insert(p);
        }
    }
    let symbols: Vec<String> = names.into_iter().collect();
    let pos: BTreeMap<&str, usize> = symbols.iter().map(|s| s.as_str()).zip(0..).collect();
    let ncols = symbols.len() + 1; // trailing constant column
    let mut mat = SparseMat::new(ncols);
    for e in eqs {
        // one condition per monomial of each equation
        let mut rows: BTreeMap<Mono, Row> = BTreeMap::new();
        for t in e.terms() {
            let (key, params) = split_term(t);
            let col = match params.as_slice() {
                [] => ncols - 1,
                [(v, 1)] => pos[v.to_string().as_str()],
                _ => {
                    return Err(Error::LimitExceeded(format!(
                        "pair-stage equation is not linear in the unknowns: {e}"
                    )))
                }
            };
            let row = rows.entry(key).or_default();
            let entry = row.entry(col).or_insert_with(GaussianRational::zero);
            *entry += &t.coeff;
            if entry.is_zero() {
                row.remove(&col);
            }
        }
        for (_, row) in rows {
            if !row.is_empty() {
                mat.push_row(row);
            }
        }
    }
    let pivots = mat.rref();
    if pivots.contains(&(ncols - 1)) {
        return Ok(None);
    }
    let mut assignment = Assignment::new();
    for row in &mat.rows {
        let (&p, _) = row.iter().next().expect("pivot row is nonzero");
        let mut value = ExpPoly::zero();
        for (&j, c) in row.iter().skip(1) {
            let piece = if j == ncols - 1 {
                ExpPoly::constant(-c)
            } else {
                ExpPoly::var(Var::param(&symbols[j])).scale(&-c)
            };
            value = value.add(&piece);
        }
        assignment.insert(symbols[p].clone(), value);
    }
    Ok(Some(assignment))
}

/// Collect, per (x, y, u, frequency) monomial, the symbol-polynomial
/// coefficient of the given equations; each must vanish, giving a system in
/// constant symbols only.
fn constant_equations(eqs: &[ExpPoly]) -> Vec<ExpPoly> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for e in eqs {
        // one condition per monomial of each equation
        let mut by_key: BTreeMap<Mono, ExpPoly> = BTreeMap::new();
        for t in e.terms() {
            let (key, params) = split_term(t);
            let piece = ExpPoly::term(t.coeff.clone(), &params, Freq::zero());
            let slot = by_key.entry(key).or_insert_with(ExpPoly::zero);
            *slot = slot.add(&piece);
        }
        for (_, p) in by_key {
            if p.is_zero() {
                continue;
            }
            if seen.insert(p.to_string()) {
                out.push(p);
            }
        }
    }
    out
}

/// The u-scaling weight of an ansatz symbol: under the fiber scaling
/// u -> L u a fiber component transforms as f -> L f(x, y, u / L), so a
/// constant-slot symbol scales by L, a linear-slot one is invariant, and a
/// quadratic-slot one scales by 1/L.
fn scaling_weight(symbol: &str) -> i32 {
    match symbol.as_bytes().get(3) {
        Some(b'a') => 1,
        Some(b'c') => -1,
        _ => 0,
    }
}

/// Enumerate the branches of the residual constant system, resolving
/// non-enumerable components by the scaling gauge: such components are
/// continuous orbits of the fiber scaling, so a symbol of nonzero scaling
/// weight can be pinned to 1 there without losing solutions up to
/// equivalence, while the complementary sublocus pins it to 0.
fn enumerate_with_gauge_splits(
    ceqs: &[ExpPoly],
    traces: &mut Vec<String>,
) -> Result<Vec<Assignment>> {
    let mut queue: Vec<Vec<ExpPoly>> = vec![ceqs.to_vec()];
    let mut assignments: Vec<Assignment> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut budget = 0usize;
    while let Some(sys) = queue.pop() {
        budget += 1;
        if budget > 128 {
            return Err(Error::LimitExceeded(
                "gauge-splitting budget exhausted".into(),
            ));
        }
        let outcome = enumerate_constant_branches(&sys)?;
        for a in outcome.branches {
            let key = show_assignment(&a);
            if seen.insert(key) {
                assignments.push(a);
            }
        }
        for basis in outcome.stuck {
            let mut syms: BTreeSet<String> = BTreeSet::new();
            for g in &basis {
                for p in g.params() {
                    syms.insert(p);
                }
            }
            let pivot = syms.iter().find(|s| scaling_weight(s) != 0).cloned();
            let shown: Vec<String> = basis.iter().map(|g| g.to_string()).collect();
            match pivot {
                Some(s) => {
                    traces.push(format!(
                        "component [{}] split on {s} via the scaling gauge",
                        shown.join(", ")
                    ));
                    let sv = ExpPoly::var(Var::param(&s));
                    let mut zero_side = sys.clone();
                    zero_side.push(sv.clone());
                    queue.push(zero_side);
                    let mut one_side = sys.clone();
                    one_side.push(sv.sub(&ExpPoly::one()));
                    queue.push(one_side);
                }
                None => {
                    traces.push(format!(
                        "solution component not of enumerable shape; reduced basis: [{}]",
                        shown.join(", ")
                    ));
                }
            }
        }
    }
    Ok(assignments)
}

/// The first standard evaluation point where the realization is transitive.
fn transitive_point(alg: &LieAlgebra) -> Result<BTreeMap<Var, GaussianRational>> {
    for p in alg.eval_points() {
        if alg.transitive_at(&p)? {
            return Ok(p);
        }
    }
    Err(Error::NotTransitive)
}

// ---------------------------------------------------------------------------
// the solvers

/// Metric lifts via first cohomology: one branch per representative class
/// and one parametric family spanning all of them, each passing the full
/// lift verification against the base realization.
pub fn solve_metric_lifts(base: &LieAlgebra, space: &TruncatedSpace) -> Result<LiftSolveResult> {
    let h = compute_h1(base, space)?;
    let point = transitive_point(base)?;
    let mut result = LiftSolveResult::default();
    let mut families: Vec<(Assignment, Vec<ExpPoly>)> = Vec::new();
    for rep in &h.representatives {
        families.push((Assignment::new(), rep.components.clone()));
    }
    if h.dim_h1 > 0 {
        let mut fam = vec![ExpPoly::zero(); base.dim()];
        for (a, rep) in h.representatives.iter().enumerate() {
            let sym = ExpPoly::var(Var::param(&family_symbol(a)));
            for (i, c) in rep.components.iter().enumerate() {
                fam[i] = fam[i].add(&sym.mul(c));
            }
        }
        families.push((Assignment::new(), fam));
    }
    for (assignment, psi) in families {
        let gens: Vec<VectorField> = base
            .basis
            .iter()
            .zip(&psi)
            .map(|(v, f)| VectorField::total(v.ax.clone(), v.ay.clone(), f.clone()))
            .collect();
        let lifted = LieAlgebra::new(Space::Total, gens.clone())?;
        lifted.check_lift_of(base)?;
        let tag = match lifted.classify_lift_type(base, &point) {
            Ok(t) => t,
            Err(Error::NotNormalForm) | Err(Error::NotTransitive) => LiftType::Metric,
            Err(e) => return Err(e),
        };
        let transitive = lifted.is_transitive();
        result.branches.push(LiftBranch {
            assignment,
            generators: gens,
            tag,
            transitive,
        });
    }
    Ok(result)
}

fn family_symbol(i: usize) -> String {
    const LETTERS: &[u8] = b"ABCDEFGHJKLMNP";
    match LETTERS.get(i) {
        Some(&c) => (c as char).to_string(),
        None => format!("A{i}"),
    }
}

/// Derive lifts of the requested type from the quadratic fiber ansatz:
/// quotient pruning first (an abelian stabilizer admits no affine or
/// projective lift, a solvable one no projective lift), then the pair
/// normalization, linear propagation of the pair brackets, the residual
/// constant system from the remaining brackets, branch enumeration, and
/// classification. A Metric cap delegates to the cohomology solver.
pub fn solve_ansatz_lifts(
    base: &LieAlgebra,
    cap: LiftType,
    space: &TruncatedSpace,
) -> Result<LiftSolveResult> {
    if cap == LiftType::Metric {
        return solve_metric_lifts(base, space);
    }
    if base.space != Space::Base {
        return Err(Error::SpaceMismatch);
    }
    if space.degree < max_coeff_degree(base) {
        return Err(Error::TruncationExhausted(format!(
            "template degree {} is smaller than the generator coefficient degree {}",
            space.degree,
            max_coeff_degree(base)
        )));
    }
    let mut result = LiftSolveResult::default();
    let point = transitive_point(base)?;
    let stab = base.stabilizer_algebra(&point)?;
    if stab.is_abelian() {
        result
            .groebner_traces
            .push("no affine or projective lifts: the stabilizer is abelian".into());
        return Ok(result);
    }
    if cap == LiftType::Projective && stab.is_solvable() {
        result
            .groebner_traces
            .push("no projective lifts: the stabilizer is solvable".into());
        return Ok(result);
    }

    // working basis led by the normalized pair
    let (x1, x2) = base.find_normalized_pair()?;
    let mut wbasis = vec![x1, x2];
    for v in &base.basis {
        if !crate::liealg::span_contains(&wbasis, std::slice::from_ref(v)) {
            wbasis.push(v.clone());
        }
    }
    let algw = LieAlgebra::new(Space::Base, wbasis)?;
    let ansatz = build_ansatz(&algw, cap, space);
    let fs = ansatz.fiber_functions();

    // brackets with the pair: linear conditions fixing the (x, y)-dependence
    let mut pair_eqs = Vec::new();
    for p in 0..2usize {
        for k in (p + 1)..algw.dim() {
            let e = bracket_residual(&algw, &fs, p, k);
            if !e.is_zero() {
                pair_eqs.push(e);
            }
        }
    }
    let Some(linear) = linear_stage(&pair_eqs)? else {
        result
            .groebner_traces
            .push("pair bracket equations are inconsistent".into());
        return Ok(result);
    };
    let fs: Vec<ExpPoly> = fs.iter().map(|f| apply_assignment(f, &linear)).collect();

    // remaining brackets: the residual constant system
    let mut rem = Vec::new();
    for k in 2..algw.dim() {
        for l in (k + 1)..algw.dim() {
            let e = bracket_residual(&algw, &fs, k, l);
            if !e.is_zero() {
                rem.push(e);
            }
        }
    }
    let ceqs = constant_equations(&rem);
    let mut csyms: BTreeSet<String> = BTreeSet::new();
    for e in &ceqs {
        for p in e.params() {
            csyms.insert(p);
        }
    }
    if csyms.len() <= 6 {
        for b in groebner_basis(&ceqs)? {
            result.groebner_traces.push(format!("reduced basis: {b}"));
        }
    } else {
        result.groebner_traces.push(format!(
            "residual constant system: {} equations in {} symbols",
            ceqs.len(),
            csyms.len()
        ));
    }
    let assignments = enumerate_with_gauge_splits(&ceqs, &mut result.groebner_traces)?;

    // change-of-basis rows taking working-basis lifts back to base order
    let back: Vec<Vec<GaussianRational>> = base
        .basis
        .iter()
        .map(|v| {
            algw.coordinates_of(v).ok_or_else(|| {
                Error::NotALift("base generator escapes the working basis span".into())
            })
        })
        .collect::<Result<_>>()?;

    for a in assignments {
        let fs_a: Vec<ExpPoly> = fs.iter().map(|f| apply_assignment(f, &a)).collect();
        let gens_w: Vec<VectorField> = algw
            .basis
            .iter()
            .zip(&fs_a)
            .map(|(v, f)| VectorField::total(v.ax.clone(), v.ay.clone(), f.clone()))
            .collect();
        let gens: Vec<VectorField> = back
            .iter()
            .map(|coords| {
                let mut acc = VectorField::zero(Space::Total);
                for (g, c) in gens_w.iter().zip(coords) {
                    acc = acc.add(&g.scale(c));
                }
                acc
            })
            .collect();
        let show = show_assignment(&a);
        let lifted = LieAlgebra::new(Space::Total, gens.clone())?;
        lifted.check_lift_of(base)?;
        match lifted.classify_lift_type(base, &point) {
            Ok(tag) if tag.fiber_span_dim() <= cap.fiber_span_dim() => {
                if lifted.is_transitive() {
                    result.branches.push(LiftBranch {
                        assignment: a,
                        generators: gens,
                        tag,
                        transitive: true,
                    });
                } else {
                    result
                        .groebner_traces
                        .push(format!("branch {show} dropped: not transitive"));
                }
            }
            Ok(tag) => {
                result.groebner_traces.push(format!(
                    "branch {show} dropped: type {} exceeds the requested cap",
                    tag.tag()
                ));
            }
            Err(Error::NotNormalForm) => {
                result.groebner_traces.push(format!(
                    "branch {show} dropped: stabilizer fiber span is not in normal form"
                ));
            }
            Err(Error::NotTransitive) => {
                result
                    .groebner_traces
                    .push(format!("branch {show} dropped: not transitive"));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(result)
}

fn show_assignment(a: &Assignment) -> String {
    if a.is_empty() {
        return "{}".into();
    }
    let parts: Vec<String> = a.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Convenience wrapper: solve with the default truncation for the base.
pub fn solve_lifts(base: &LieAlgebra, cap: LiftType) -> Result<LiftSolveResult> {
    let space = build_truncated_space(base, default_degree(base))?;
    solve_ansatz_lifts(base, cap, &space)
}

// ---------------------------------------------------------------------------
// equivalence checks

/// Rewrite the generators of a lift so that they project one-for-one onto
/// the basis of `base` (entries may list another basis of the same span).
pub fn align_to_base(base: &LieAlgebra, gens: &[VectorField]) -> Result<Vec<VectorField>> {
    let projs: Vec<VectorField> = gens.iter().map(|v| v.project()).collect::<Result<_>>()?;
    let algp = LieAlgebra::new(Space::Base, projs)?;
    base.basis
        .iter()
        .map(|v| {
            let coords = algp.coordinates_of(v).ok_or_else(|| {
                Error::NotALift(format!("{v} is outside the projected span of the entry"))
            })?;
            let mut acc = VectorField::zero(Space::Total);
            for (g, c) in gens.iter().zip(&coords) {
                acc = acc.add(&g.scale(c));
            }
            Ok(acc)
        })
        .collect()
}

/// Check that a metric family given by explicit generators represents the
/// whole first cohomology of the base: its constant part must be a
/// coboundary and its free-constant directions must span all classes. The
/// generators must be linear in their free constants.
pub fn metric_entry_matches(
    base: &LieAlgebra,
    space: &TruncatedSpace,
    entry: &[VectorField],
) -> Result<bool> {
    let aligned = align_to_base(base, entry)?;
    LieAlgebra::new(Space::Total, aligned.clone())?.check_lift_of(base)?;
    let psis: Vec<ExpPoly> = aligned.iter().map(|v| v.au.clone()).collect();
    let mut params: BTreeSet<String> = BTreeSet::new();
    for p in &psis {
        for t in p.terms() {
            let deg: u32 = t
                .exps
                .iter()
                .filter(|(v, _)| v.is_param())
                .map(|(_, k)| *k)
                .sum();
            if deg > 1 {
                return Err(Error::OutsideRing(format!(
                    "entry component {p} is not linear in its free constants"
                )));
            }
        }
        for name in p.params() {
            params.insert(name);
        }
    }
    let zero = ExpPoly::zero();
    let at_zero = |p: &ExpPoly| {
        let mut out = p.clone();
        for name in &params {
            out = out.substitute(&Var::param(name), &zero);
        }
        out
    };
    let psi0: Vec<ExpPoly> = psis.iter().map(&at_zero).collect();
    let h = compute_h1(base, space)?;
    if is_coboundary(base, &Cocycle::from_components(psi0.clone()), space)?.is_none() {
        return Ok(false);
    }
    let mut dirs = SparseMat::new(h.dim_h1);
    for active in &params {
        let one = ExpPoly::one();
        let dir: Vec<ExpPoly> = psis
            .iter()
            .zip(&psi0)
            .map(|(p, z)| {
                let mut out = p.clone();
                for name in &params {
                    let v = if name == active { &one } else { &zero };
                    out = out.substitute(&Var::param(name), v);
                }
                out.sub(z)
            })
            .collect();
        match class_coordinates(base, &h, &Cocycle::from_components(dir))? {
            None => return Ok(false),
            Some(coords) => dirs.push_dense_row(&coords),
        }
    }
    Ok(dirs.rank() == h.dim_h1)
}

/// Fresh symbol names for the gauge constants, avoiding every symbol already
/// present in the matching problem.
fn gauge_names(taken: &BTreeSet<String>) -> [String; 3] {
    let mut prefix = String::from("z");
    loop {
        let names = [
            format!("{prefix}scale"),
            format!("{prefix}scaleinv"),
            format!("{prefix}shift"),
        ];
        if names.iter().all(|n| !taken.contains(n)) {
            return names;
        }
        prefix.push('z');
    }
}

/// Decide whether two normalized lifts of the same base are related by a
/// constant fiber-coordinate move of the given type, solving for the gauge
/// constants together with the free constants of both sides. The returned
/// witness assignment zeroes every matching equation (verified before
/// returning). Both generator lists must project one-for-one onto the base.
pub fn equivalent_normalized_lifts(
    base: &LieAlgebra,
    a: &[VectorField],
    b: &[VectorField],
    cap: LiftType,
) -> Result<Option<EquivalenceWitness>> {
    for (list, side) in [(a, "first"), (b, "second")] {
        if list.len() != base.dim() {
            return Err(Error::NotALift(format!(
                "{side} list has {} generators, base has {}",
                list.len(),
                base.dim()
            )));
        }
        for (v, bb) in list.iter().zip(&base.basis) {
            if v.project()? != *bb {
                return Err(Error::NotALift(format!(
                    "{side} list is not aligned to the base: {v} does not project to {bb}"
                )));
            }
        }
    }
    let fa: Vec<ExpPoly> = a.iter().map(|v| v.au.clone()).collect();
    let fb: Vec<ExpPoly> = b.iter().map(|v| v.au.clone()).collect();
    let mut taken: BTreeSet<String> = BTreeSet::new();
    for p in fa.iter().chain(&fb) {
        for name in p.params() {
            taken.insert(name);
        }
    }
    let [scale, scaleinv, shift] = gauge_names(&taken);
    let u = ExpPoly::var(Var::U);
    let l = ExpPoly::var(Var::param(&scale));
    let linv = ExpPoly::var(Var::param(&scaleinv));
    let c = ExpPoly::var(Var::param(&shift));
    let unit = l.mul(&linv).sub(&ExpPoly::one());

    let gauges: Vec<(&'static str, Vec<ExpPoly>, Vec<ExpPoly>)> = match cap {
        LiftType::Metric => vec![
            ("identity", fa.clone(), vec![]),
            (
                "translation",
                fa.iter().map(|f| f.substitute(&Var::U, &u.add(&c))).collect(),
                vec![],
            ),
        ],
        LiftType::Affine | LiftType::Projective => vec![
            ("identity", fa.clone(), vec![]),
            (
                "scaling",
                fa.iter()
                    .map(|f| f.substitute(&Var::U, &linv.mul(&u)).mul(&l))
                    .collect(),
                vec![unit.clone()],
            ),
            (
                "affine",
                fa.iter()
                    .map(|f| {
                        f.substitute(&Var::U, &linv.mul(&u.sub(&c))).mul(&l)
                    })
                    .collect(),
                vec![unit.clone()],
            ),
        ],
    };

    for (gauge, moved, relations) in gauges {
        let diffs: Vec<ExpPoly> = moved.iter().zip(&fb).map(|(m, t)| m.sub(t)).collect();
        let mut eqs = constant_equations(&diffs);
        eqs.extend(relations);
        match solve_constant_branches(&eqs) {
            Ok(branches) => {
                for asg in branches {
                    let verified = eqs.iter().all(|e| apply_assignment(e, &asg).is_zero());
                    if verified {
                        return Ok(Some(EquivalenceWitness {
                            gauge,
                            assignment: asg,
                        }));
                    }
                }
            }
            Err(Error::BranchEnumerationFailed { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::parse::parse_expoly;

    fn alg(id: &str) -> LieAlgebra {
        let inst = catalog::parse_instance(id).unwrap();
        let gens = catalog::instantiate(&inst).unwrap();
        let space = catalog::space_of(&inst.family).unwrap();
        LieAlgebra::new(space, gens).unwrap()
    }

    fn lift_gens(id: &str) -> Vec<VectorField> {
        catalog::instantiate(&catalog::parse_instance(id).unwrap()).unwrap()
    }

    fn default_space(a: &LieAlgebra) -> TruncatedSpace {
        build_truncated_space(a, default_degree(a)).unwrap()
    }

    #[test]
    fn translation_normalizes_the_plane_pair() {
        let hat = vec![
            VectorField::total(ExpPoly::one(), ExpPoly::zero(), ExpPoly::one()),
            VectorField::total(ExpPoly::zero(), ExpPoly::one(), ExpPoly::zero()),
        ];
        let out = normalize_lift(&hat, (0, 1), LiftType::Metric).unwrap();
        assert!(out[0].au.is_zero());
        assert!(out[1].au.is_zero());
        // already-normalized input comes back unchanged
        let again = normalize_lift(&out, (0, 1), LiftType::Metric).unwrap();
        assert_eq!(again, out);
    }

    #[test]
    fn affine_normalization_needs_a_ring_unit() {
        let mk = |f: &str| {
            vec![
                VectorField::total(ExpPoly::one(), ExpPoly::zero(), parse_expoly(f).unwrap()),
                VectorField::total(ExpPoly::zero(), ExpPoly::one(), ExpPoly::zero()),
            ]
        };
        // constant linear coefficient: integrating factor e^{-x}
        let out = normalize_lift(&mk("u"), (0, 1), LiftType::Affine).unwrap();
        assert!(out[0].au.is_zero());
        assert!(out[1].au.is_zero());
        // y u and x y u need non-linear exponents
        for f in ["y*u", "x*y*u"] {
            match normalize_lift(&mk(f), (0, 1), LiftType::Affine) {
                Err(Error::OutsideRing(_)) => {}
                other => panic!("expected OutsideRing for {f}, got {other:?}"),
            }
        }
    }

    #[test]
    fn metric_solve_matches_the_catalog_family() {
        let base = alg("g6");
        let space = default_space(&base);
        let res = solve_metric_lifts(&base, &space).unwrap();
        // one representative plus the one-parameter family
        assert_eq!(res.branches.len(), 2);
        let family = res.branches.last().unwrap();
        assert_eq!(family.tag, LiftType::Metric);
        assert!(family.transitive);
        assert!(metric_entry_matches(&base, &space, &lift_gens("g6.m")).unwrap());
    }

    #[test]
    fn affine_solve_recovers_the_known_lift() {
        let base = alg("g6");
        let space = default_space(&base);
        let res = solve_ansatz_lifts(&base, LiftType::Affine, &space).unwrap();
        assert_eq!(res.branches.len(), 1, "traces: {:?}", res.groebner_traces);
        let branch = &res.branches[0];
        assert_eq!(branch.tag, LiftType::Affine);
        assert!(branch.transitive);
        let cat = align_to_base(&base, &lift_gens("g6.a")).unwrap();
        let w = equivalent_normalized_lifts(&base, &branch.generators, &cat, LiftType::Affine)
            .unwrap();
        assert!(w.is_some(), "no gauge relates the branch to the entry");
    }

    #[test]
    fn projective_solve_is_pruned_for_a_solvable_stabilizer() {
        let base = alg("g6");
        let space = default_space(&base);
        let res = solve_ansatz_lifts(&base, LiftType::Projective, &space).unwrap();
        assert!(res.branches.is_empty());
        assert!(res.groebner_traces[0].contains("solvable"));
    }

    #[test]
    fn projective_solve_recovers_the_known_lift() {
        let base = alg("g3");
        let space = default_space(&base);
        let res = solve_ansatz_lifts(&base, LiftType::Projective, &space).unwrap();
        assert!(!res.branches.is_empty(), "traces: {:?}", res.groebner_traces);
        let cat = align_to_base(&base, &lift_gens("g3.p")).unwrap();
        let mut matched = false;
        for b in &res.branches {
            if b.tag != LiftType::Projective {
                continue;
            }
            if equivalent_normalized_lifts(&base, &b.generators, &cat, LiftType::Projective)
                .unwrap()
                .is_some()
            {
                matched = true;
                break;
            }
        }
        assert!(matched, "no projective branch matches the catalog entry");
    }

    #[test]
    fn distinct_lifts_are_not_equivalent() {
        let base = alg("g6");
        let cat = align_to_base(&base, &lift_gens("g6.a")).unwrap();
        let trivial: Vec<VectorField> = base
            .basis
            .iter()
            .map(|v| VectorField::total(v.ax.clone(), v.ay.clone(), ExpPoly::zero()))
            .collect();
        let w = equivalent_normalized_lifts(&base, &trivial, &cat, LiftType::Affine).unwrap();
        assert!(w.is_none());
    }
}
