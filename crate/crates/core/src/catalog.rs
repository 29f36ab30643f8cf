//! The classification catalog: transitive Lie algebras of vector fields on
//! the plane (families g1..g16, plus two alternative realizations g15t and
//! g16t with singular orbits) and their metric/affine/projective lifts to
//! the total space (suffixes .m/.a/.p, with .m1/.m2/.a1/.a2 variants).
//!
//! Entries are templates over declared parameters (dimension r, decoration
//! start s, scaling weight alpha, frequency lists) with free constants
//! A, B, C, C_j_k kept as parameter symbols.

use crate::error::{Error, Result};
use crate::expoly::{ExpPoly, Freq, Var};
use crate::liealg::LiftType;
use crate::parse::parse_vector_field;
use crate::rat::GaussianRational;
use crate::vfield::{Space, VectorField};
use num_traits::ToPrimitive;
use std::collections::BTreeMap;
use std::fmt;

pub type Point = BTreeMap<Var, GaussianRational>;

/// A parameter value in an instantiation: a single Gaussian rational or a
/// semicolon-separated list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ParamValue {
    Scalar(GaussianRational),
    List(Vec<GaussianRational>),
}

impl ParamValue {
    pub fn int(v: i64) -> ParamValue {
        ParamValue::Scalar(GaussianRational::from_int(v))
    }

    pub fn ints(vs: &[i64]) -> ParamValue {
        ParamValue::List(vs.iter().map(|&v| GaussianRational::from_int(v)).collect())
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Scalar(g) => write!(f, "{g}"),
            ParamValue::List(gs) => {
                let parts: Vec<String> = gs.iter().map(|g| g.to_string()).collect();
                write!(f, "{}", parts.join(";"))
            }
        }
    }
}

/// A catalog family together with a concrete parameter assignment.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Instance {
    pub family: String,
    pub params: BTreeMap<String, ParamValue>,
}

impl Instance {
    pub fn new(family: &str) -> Instance {
        Instance {
            family: family.to_string(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, value: ParamValue) -> Instance {
        self.params.insert(name.to_string(), value);
        self
    }
}

impl fmt::Display for Instance {
    /// Canonical id form, e.g. `g8[r=5,alpha=2]`; parameters are printed in
    /// the family's declared order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        if self.params.is_empty() {
            return Ok(());
        }
        let order: Vec<&str> = match family(&self.family) {
            Ok(fam) => fam.params.to_vec(),
            Err(_) => self.params.keys().map(|k| k.as_str()).collect(),
        };
        let mut parts = Vec::new();
        for name in order {
            if let Some(v) = self.params.get(name) {
                parts.push(format!("{name}={v}"));
            }
        }
        write!(f, "[{}]", parts.join(","))
    }
}

/// Static description of one catalog family.
#[derive(Debug, Clone, Copy)]
pub struct Family {
    pub id: &'static str,
    /// Base family this lift projects onto; None for base entries.
    pub base: Option<&'static str>,
    /// Expected lift type for lift entries.
    pub tag: Option<LiftType>,
    /// Parameter names in canonical print order.
    pub params: &'static [&'static str],
    /// Human-readable constraint summary.
    pub constraints: &'static str,
    /// Entries with singular orbits where point checks use a shifted sample
    /// point and transitivity at the default point is not required.
    pub singular: bool,
}

const M: Option<LiftType> = Some(LiftType::Metric);
const A: Option<LiftType> = Some(LiftType::Affine);
const P: Option<LiftType> = Some(LiftType::Projective);

static FAMILIES: &[Family] = &[
    // base families
    Family { id: "g1", base: None, tag: None, params: &[], constraints: "r = 8", singular: false },
    Family { id: "g2", base: None, tag: None, params: &[], constraints: "r = 6", singular: false },
    Family { id: "g3", base: None, tag: None, params: &[], constraints: "r = 5", singular: false },
    Family { id: "g4", base: None, tag: None, params: &["alphas", "ms"], constraints: "distinct alphas, ms >= 1, r = sum(ms) + 1 >= 2", singular: false },
    Family { id: "g5", base: None, tag: None, params: &["alphas", "ms"], constraints: "distinct alphas, ms >= 1, r = sum(ms) + 2 >= 4", singular: false },
    Family { id: "g6", base: None, tag: None, params: &[], constraints: "r = 4", singular: false },
    Family { id: "g7", base: None, tag: None, params: &[], constraints: "r = 4", singular: false },
    Family { id: "g8", base: None, tag: None, params: &["r", "alpha"], constraints: "r >= 3", singular: false },
    Family { id: "g9", base: None, tag: None, params: &["r"], constraints: "r >= 3", singular: false },
    Family { id: "g10", base: None, tag: None, params: &["r"], constraints: "r >= 4", singular: false },
    Family { id: "g11", base: None, tag: None, params: &[], constraints: "r = 5", singular: false },
    Family { id: "g12", base: None, tag: None, params: &[], constraints: "r = 6", singular: false },
    Family { id: "g13", base: None, tag: None, params: &["r"], constraints: "r >= 5", singular: false },
    Family { id: "g14", base: None, tag: None, params: &["r"], constraints: "r >= 6", singular: false },
    Family { id: "g15", base: None, tag: None, params: &[], constraints: "r = 3", singular: false },
    Family { id: "g16", base: None, tag: None, params: &[], constraints: "r = 3", singular: false },
    Family { id: "g15t", base: None, tag: None, params: &[], constraints: "r = 3; alternative realization, singular at the origin", singular: true },
    Family { id: "g16t", base: None, tag: None, params: &[], constraints: "r = 3; alternative realization, singular orbit y = 0", singular: true },
    // lift families
    Family { id: "g1.m", base: Some("g1"), tag: M, params: &[], constraints: "", singular: false },
    Family { id: "g1.p", base: Some("g1"), tag: P, params: &[], constraints: "", singular: false },
    Family { id: "g2.m", base: Some("g2"), tag: M, params: &[], constraints: "", singular: false },
    Family { id: "g2.p", base: Some("g2"), tag: P, params: &[], constraints: "", singular: false },
    Family { id: "g3.p", base: Some("g3"), tag: P, params: &[], constraints: "", singular: false },
    Family { id: "g4.m", base: Some("g4"), tag: M, params: &["alphas", "ms"], constraints: "r = sum(ms) + 1 >= 3", singular: false },
    Family { id: "g5.m", base: Some("g5"), tag: M, params: &["alphas", "ms"], constraints: "r = sum(ms) + 2 >= 4", singular: false },
    Family { id: "g5.a", base: Some("g5"), tag: A, params: &["alphas", "ms"], constraints: "r = sum(ms) + 2 >= 4", singular: false },
    Family { id: "g6.m", base: Some("g6"), tag: M, params: &[], constraints: "", singular: false },
    Family { id: "g6.a", base: Some("g6"), tag: A, params: &[], constraints: "", singular: false },
    Family { id: "g7.m", base: Some("g7"), tag: M, params: &[], constraints: "", singular: false },
    Family { id: "g7.a", base: Some("g7"), tag: A, params: &[], constraints: "", singular: false },
    Family { id: "g8.m", base: Some("g8"), tag: M, params: &["r", "alpha"], constraints: "r >= 3; B present iff alpha = s in 1..=r-3", singular: false },
    Family { id: "g8.a", base: Some("g8"), tag: A, params: &["r", "alpha", "s"], constraints: "r >= 4, 1 <= s <= r-3, alpha != s", singular: false },
    Family { id: "g9.m", base: Some("g9"), tag: M, params: &["r"], constraints: "r >= 3", singular: false },
    Family { id: "g9.a", base: Some("g9"), tag: A, params: &["r", "s"], constraints: "r >= 4, 1 <= s <= r-3", singular: false },
    Family { id: "g10.m", base: Some("g10"), tag: M, params: &["r"], constraints: "r >= 4", singular: false },
    Family { id: "g10.a", base: Some("g10"), tag: A, params: &["r", "s"], constraints: "r >= 5, 1 <= s <= r-4", singular: false },
    Family { id: "g11.m", base: Some("g11"), tag: M, params: &[], constraints: "", singular: false },
    Family { id: "g11.a", base: Some("g11"), tag: A, params: &[], constraints: "", singular: false },
    Family { id: "g12.m", base: Some("g12"), tag: M, params: &[], constraints: "", singular: false },
    Family { id: "g12.a1", base: Some("g12"), tag: A, params: &[], constraints: "", singular: false },
    Family { id: "g12.a2", base: Some("g12"), tag: A, params: &[], constraints: "", singular: false },
    Family { id: "g13.m1", base: Some("g13"), tag: M, params: &["r"], constraints: "r = 6", singular: false },
    Family { id: "g13.m2", base: Some("g13"), tag: M, params: &["r"], constraints: "r >= 5, r != 6", singular: false },
    Family { id: "g13.a1", base: Some("g13"), tag: A, params: &["r"], constraints: "r >= 5", singular: false },
    Family { id: "g13.a2", base: Some("g13"), tag: A, params: &["r"], constraints: "r >= 5, r != 6", singular: false },
    Family { id: "g14.m", base: Some("g14"), tag: M, params: &["r"], constraints: "r >= 6", singular: false },
    Family { id: "g14.a1", base: Some("g14"), tag: A, params: &["r"], constraints: "r >= 6", singular: false },
    Family { id: "g14.a2", base: Some("g14"), tag: A, params: &["r"], constraints: "r >= 6", singular: false },
    Family { id: "g15.m", base: Some("g15"), tag: M, params: &[], constraints: "", singular: false },
    Family { id: "g16.m", base: Some("g16"), tag: M, params: &[], constraints: "", singular: false },
];

pub fn families() -> &'static [Family] {
    FAMILIES
}

pub fn family(id: &str) -> Result<&'static Family> {
    FAMILIES
        .iter()
        .find(|f| f.id == id)
        .ok_or_else(|| Error::UnknownId(id.to_string()))
}

pub fn space_of(id: &str) -> Result<Space> {
    Ok(if family(id)?.base.is_some() {
        Space::Total
    } else {
        Space::Base
    })
}

// ---------------------------------------------------------------------------
// parameter plumbing

fn invalid(id: &str, constraint: &str) -> Error {
    Error::InvalidParameter {
        id: id.to_string(),
        constraint: constraint.to_string(),
    }
}

fn check_known_params(inst: &Instance, fam: &Family) -> Result<()> {
    for key in inst.params.keys() {
        if !fam.params.contains(&key.as_str()) {
            return Err(invalid(&inst.family, &format!("unknown parameter {key}")));
        }
    }
    Ok(())
}

fn scalar_param(inst: &Instance, name: &str) -> Result<GaussianRational> {
    match inst.params.get(name) {
        Some(ParamValue::Scalar(g)) => Ok(g.clone()),
        Some(ParamValue::List(gs)) if gs.len() == 1 => Ok(gs[0].clone()),
        Some(_) => Err(invalid(&inst.family, &format!("{name} must be a single value"))),
        None => Err(invalid(&inst.family, &format!("missing parameter {name}"))),
    }
}

fn int_of(g: &GaussianRational) -> Option<i64> {
    if !g.is_real() || !num_traits::One::is_one(g.re.denom()) {
        return None;
    }
    g.re.numer().to_i64()
}

fn int_param(inst: &Instance, name: &str) -> Result<i64> {
    let g = scalar_param(inst, name)?;
    int_of(&g).ok_or_else(|| invalid(&inst.family, &format!("{name} must be an integer")))
}

fn list_param(inst: &Instance, name: &str) -> Result<Vec<GaussianRational>> {
    match inst.params.get(name) {
        Some(ParamValue::List(gs)) => Ok(gs.clone()),
        Some(ParamValue::Scalar(g)) => Ok(vec![g.clone()]),
        None => Err(invalid(&inst.family, &format!("missing parameter {name}"))),
    }
}

fn int_list_param(inst: &Instance, name: &str) -> Result<Vec<i64>> {
    let gs = list_param(inst, name)?;
    gs.iter()
        .map(|g| int_of(g).ok_or_else(|| invalid(&inst.family, &format!("{name} must be integers"))))
        .collect()
}

/// Frequency lists and multiplicities for g4/g5-style families.
struct ExpFamily {
    alphas: Vec<GaussianRational>,
    ms: Vec<i64>,
}

fn exp_family(inst: &Instance, min_sum: i64, constraint: &str) -> Result<ExpFamily> {
    let alphas = list_param(inst, "alphas")?;
    let ms = int_list_param(inst, "ms")?;
    if alphas.is_empty() || alphas.len() != ms.len() {
        return Err(invalid(&inst.family, "alphas and ms must have equal nonzero length"));
    }
    for (i, a) in alphas.iter().enumerate() {
        for b in &alphas[i + 1..] {
            if a == b {
                return Err(invalid(&inst.family, "alphas must be distinct"));
            }
        }
    }
    if ms.iter().any(|&m| m < 1) {
        return Err(invalid(&inst.family, "ms must be positive"));
    }
    if ms.iter().sum::<i64>() < min_sum {
        return Err(invalid(&inst.family, constraint));
    }
    Ok(ExpFamily { alphas, ms })
}

// ---------------------------------------------------------------------------
// generator builders

fn g(v: i64) -> GaussianRational {
    GaussianRational::from_int(v)
}

fn np(v: i64) -> ExpPoly {
    ExpPoly::from_int(v)
}

fn xv() -> ExpPoly {
    ExpPoly::var(Var::X)
}

fn yv() -> ExpPoly {
    ExpPoly::var(Var::Y)
}

fn uv() -> ExpPoly {
    ExpPoly::var(Var::U)
}

fn xp(k: i64) -> ExpPoly {
    xv().pow(k as u32)
}

fn sym(name: &str) -> ExpPoly {
    ExpPoly::var(Var::param(name))
}

/// x^k e^{a x}
fn xe(k: i64, a: &GaussianRational) -> ExpPoly {
    ExpPoly::term(
        GaussianRational::one(),
        &[(Var::X, k as u32)],
        Freq::new(a.clone(), GaussianRational::zero()),
    )
}

fn binom(n: i64, k: i64) -> GaussianRational {
    g(num_integer::binomial(n, k))
}

fn half(n: i64) -> ExpPoly {
    ExpPoly::constant(GaussianRational::from_ratio(n, 2))
}

fn parsed(space: Space, specs: &[&str]) -> Vec<VectorField> {
    specs
        .iter()
        .map(|s| parse_vector_field(s, space).expect("catalog literal parses"))
        .collect()
}

/// x^j d_y for j in 1..=top (empty when top < 1).
fn x_dy_tower(top: i64) -> Vec<VectorField> {
    (1..=top).map(|j| base2(np(0), xp(j))).collect()
}

/// The decorated u-component of a g4-style generator x^i e^{a x} d_y for the
/// frequency family j (1-based): e^{a x} * sum_k binom(i,k) C_j_k x^{i-k},
/// with the normalization C_1_0 = 0.
fn exp_family_u(j: usize, i: i64, a: &GaussianRational) -> ExpPoly {
    let mut acc = ExpPoly::zero();
    for k in 0..=i {
        if j == 1 && k == 0 {
            continue; // normalized away
        }
        let c = sym(&format!("C_{j}_{k}"));
        let t = xe(i - k, a).scale(&binom(i, k));
        acc = acc.add(&c.mul(&t));
    }
    acc
}

fn base2(ax: ExpPoly, ay: ExpPoly) -> VectorField {
    VectorField::base(ax, ay)
}

fn total3(ax: ExpPoly, ay: ExpPoly, au: ExpPoly) -> VectorField {
    VectorField::total(ax, ay, au)
}

// ---------------------------------------------------------------------------
// instantiation

/// Build the generator list for a family instance. Free constants (A, B, C,
/// C_j_k) remain parameter symbols unless the caller substitutes them.
pub fn instantiate(inst: &Instance) -> Result<Vec<VectorField>> {
    let fam = family(&inst.family)?;
    check_known_params(inst, fam)?;
    let id = inst.family.as_str();
    let gens = match id {
        "g1" => parsed(Space::Base, &[
            "Dx", "Dy", "x*Dx", "x*Dy", "y*Dx", "y*Dy",
            "x^2*Dx + x*y*Dy", "x*y*Dx + y^2*Dy",
        ]),
        "g2" => parsed(Space::Base, &[
            "Dx", "Dy", "x*Dx", "x*Dy", "y*Dx", "y*Dy",
        ]),
        "g3" => parsed(Space::Base, &[
            "Dx", "Dy", "x*Dy", "y*Dx", "x*Dx - y*Dy",
        ]),
        "g4" => {
            let ef = exp_family(inst, 1, "r = sum(ms) + 1 >= 2")?;
            let mut v = vec![base2(np(1), np(0))];
            for (j, a) in ef.alphas.iter().enumerate() {
                for i in 0..ef.ms[j] {
                    v.push(base2(np(0), xe(i, a)));
                }
            }
            v
        }
        "g5" => {
            let ef = exp_family(inst, 2, "r = sum(ms) + 2 >= 4")?;
            let mut v = vec![base2(np(1), np(0)), base2(np(0), yv())];
            for (j, a) in ef.alphas.iter().enumerate() {
                for i in 0..ef.ms[j] {
                    v.push(base2(np(0), xe(i, a)));
                }
            }
            v
        }
        "g6" => parsed(Space::Base, &["Dx", "Dy", "y*Dy", "y^2*Dy"]),
        "g7" => parsed(Space::Base, &["Dx", "Dy", "x*Dx", "x^2*Dx + x*Dy"]),
        "g8" => {
            let r = int_param(inst, "r")?;
            let alpha = scalar_param(inst, "alpha")?;
            if r < 3 {
                return Err(invalid(id, "r >= 3"));
            }
            let mut v = parsed(Space::Base, &["Dx", "Dy"]);
            v.extend(x_dy_tower(r - 3));
            v.push(base2(xv(), yv().scale(&alpha)));
            v
        }
        "g9" => {
            let r = int_param(inst, "r")?;
            if r < 3 {
                return Err(invalid(id, "r >= 3"));
            }
            let mut v = parsed(Space::Base, &["Dx", "Dy"]);
            v.extend(x_dy_tower(r - 3));
            v.push(base2(xv(), yv().scale(&g(r - 2)).add(&xp(r - 2))));
            v
        }
        "g10" => {
            let r = int_param(inst, "r")?;
            if r < 4 {
                return Err(invalid(id, "r >= 4"));
            }
            let mut v = parsed(Space::Base, &["Dx", "Dy"]);
            v.extend(x_dy_tower(r - 4));
            v.push(base2(xv(), np(0)));
            v.push(base2(np(0), yv()));
            v
        }
        "g11" => parsed(Space::Base, &["Dx", "x*Dx", "Dy", "y*Dy", "y^2*Dy"]),
        "g12" => parsed(Space::Base, &[
            "Dx", "x*Dx", "x^2*Dx", "Dy", "y*Dy", "y^2*Dy",
        ]),
        "g13" => {
            let r = int_param(inst, "r")?;
            if r < 5 {
                return Err(invalid(id, "r >= 5"));
            }
            let mut v = parsed(Space::Base, &["Dx", "Dy"]);
            v.extend(x_dy_tower(r - 4));
            v.push(base2(xp(2), xv().mul(&yv()).scale(&g(r - 4))));
            v.push(base2(xv(), yv().mul(&half(r - 4))));
            v
        }
        "g14" => {
            let r = int_param(inst, "r")?;
            if r < 6 {
                return Err(invalid(id, "r >= 6"));
            }
            let mut v = parsed(Space::Base, &["Dx", "Dy"]);
            v.extend(x_dy_tower(r - 5));
            v.push(base2(np(0), yv()));
            v.push(base2(xv(), np(0)));
            v.push(base2(xp(2), xv().mul(&yv()).scale(&g(r - 5))));
            v
        }
        "g15" => parsed(Space::Base, &[
            "Dx", "x*Dx + Dy", "x^2*Dx + 2*x*Dy",
        ]),
        "g16" => parsed(Space::Base, &[
            "Dx", "x*Dx - y*Dy", "x^2*Dx + (1 - 2*x*y)*Dy",
        ]),
        "g15t" => parsed(Space::Base, &["y*Dx", "x*Dy", "x*Dx - y*Dy"]),
        "g16t" => parsed(Space::Base, &[
            "Dx", "x*Dx + y*Dy", "x^2*Dx + (2*x*y + y^2)*Dy",
        ]),
        // ------------------------------------------------------------------
        "g1.m" => parsed(Space::Total, &[
            "Dx", "Dy", "x*Dy", "x*Dx - y*Dy", "y*Dx",
            "x*Dx + y*Dy + 2*C*Du",
            "x^2*Dx + x*y*Dy + 3*C*x*Du",
            "x*y*Dx + y^2*Dy + 3*C*y*Du",
        ]),
        "g1.p" => parsed(Space::Total, &[
            "Dx", "Dy", "x*Dy + Du", "x*Dx - y*Dy - 2*u*Du", "y*Dx - u^2*Du",
            "x*Dx + y*Dy",
            "x^2*Dx + x*y*Dy + (y - x*u)*Du",
            "x*y*Dx + y^2*Dy + (y*u - x*u^2)*Du",
        ]),
        "g2.m" => parsed(Space::Total, &[
            "Dx", "Dy", "x*Dy", "x*Dx - y*Dy", "y*Dx",
            "x*Dx + y*Dy + C*Du",
        ]),
        "g2.p" => parsed(Space::Total, &[
            "Dx", "Dy", "x*Dy + Du", "x*Dx - y*Dy - 2*u*Du", "y*Dx - u^2*Du",
            "x*Dx + y*Dy",
        ]),
        "g3.p" => parsed(Space::Total, &[
            "Dx", "Dy", "x*Dy + Du", "x*Dx - y*Dy - 2*u*Du", "y*Dx - u^2*Du",
        ]),
        "g4.m" => {
            let ef = exp_family(inst, 2, "r = sum(ms) + 1 >= 3")?;
            let mut v = vec![total3(np(1), np(0), np(0))];
            for (j, a) in ef.alphas.iter().enumerate() {
                for i in 0..ef.ms[j] {
                    v.push(total3(np(0), xe(i, a), exp_family_u(j + 1, i, a)));
                }
            }
            v
        }
        "g5.m" => {
            let ef = exp_family(inst, 2, "r = sum(ms) + 2 >= 4")?;
            let mut v = vec![
                total3(np(1), np(0), np(0)),
                total3(np(0), yv(), sym("C")),
            ];
            for (j, a) in ef.alphas.iter().enumerate() {
                for i in 0..ef.ms[j] {
                    v.push(total3(np(0), xe(i, a), np(0)));
                }
            }
            v
        }
        "g5.a" => {
            let ef = exp_family(inst, 2, "r = sum(ms) + 2 >= 4")?;
            let mut v = vec![
                total3(np(1), np(0), np(0)),
                total3(np(0), yv(), uv()),
            ];
            for (j, a) in ef.alphas.iter().enumerate() {
                for i in 0..ef.ms[j] {
                    v.push(total3(np(0), xe(i, a), exp_family_u(j + 1, i, a)));
                }
            }
            v
        }
        "g6.m" => parsed(Space::Total, &[
            "Dx", "Dy", "y*Dy + C*Du", "y^2*Dy + 2*C*y*Du",
        ]),
        "g6.a" => parsed(Space::Total, &[
            "Dx", "Dy", "y*Dy - u*Du", "y^2*Dy + (1 - 2*y*u)*Du",
        ]),
        "g7.m" => parsed(Space::Total, &[
            "Dx", "Dy", "x*Dx + C*Du", "x^2*Dx + x*Dy + 2*C*x*Du",
        ]),
        "g7.a" => parsed(Space::Total, &[
            "Dx", "Dy", "x*Dx - u*Du", "x^2*Dx + x*Dy + (1 - 2*x*u)*Du",
        ]),
        "g8.m" => {
            let r = int_param(inst, "r")?;
            let alpha = scalar_param(inst, "alpha")?;
            if r < 3 {
                return Err(invalid(id, "r >= 3"));
            }
            // B decorates the tower from x^s when alpha is an integer s in
            // 1..=r-3; otherwise B = 0 and the tower is bare.
            let s = int_of(&alpha).filter(|&s| 1 <= s && s <= r - 3);
            let mut v = vec![
                total3(np(1), np(0), np(0)),
                total3(np(0), np(1), np(0)),
                total3(xv(), yv().scale(&alpha), sym("A")),
            ];
            for j in 1..=(r - 3) {
                let au = match s {
                    Some(s) if j >= s => sym("B").mul(&xp(j - s)).scale(&binom(j, s)),
                    _ => np(0),
                };
                v.push(total3(np(0), xp(j), au));
            }
            v
        }
        "g8.a" => {
            let r = int_param(inst, "r")?;
            let alpha = scalar_param(inst, "alpha")?;
            let s = int_param(inst, "s")?;
            if r < 4 {
                return Err(invalid(id, "r >= 4"));
            }
            if !(1 <= s && s <= r - 3) {
                return Err(invalid(id, "1 <= s <= r-3"));
            }
            if alpha == g(s) {
                return Err(invalid(id, "alpha != s"));
            }
            let coeff = &alpha - &g(s);
            let mut v = vec![
                total3(np(1), np(0), np(0)),
                total3(np(0), np(1), np(0)),
                total3(xv(), yv().scale(&alpha), uv().scale(&coeff)),
            ];
            for j in 1..=(r - 3) {
                let au = if j >= s {
                    xp(j - s).scale(&binom(j, s))
                } else {
                    np(0)
                };
                v.push(total3(np(0), xp(j), au));
            }
            v
        }
        "g9.m" => {
            let r = int_param(inst, "r")?;
            if r < 3 {
                return Err(invalid(id, "r >= 3"));
            }
            let mut v = vec![
                total3(np(1), np(0), np(0)),
                total3(np(0), np(1), np(0)),
                total3(xv(), yv().scale(&g(r - 2)).add(&xp(r - 2)), sym("C")),
            ];
            for j in 1..=(r - 3) {
                v.push(total3(np(0), xp(j), np(0)));
            }
            v
        }
        "g9.a" => {
            let r = int_param(inst, "r")?;
            let s = int_param(inst, "s")?;
            if r < 4 {
                return Err(invalid(id, "r >= 4"));
            }
            if !(1 <= s && s <= r - 3) {
                return Err(invalid(id, "1 <= s <= r-3"));
            }
            let au3 = xp(r - s - 2)
                .scale(&binom(r - 2, s))
                .add(&uv().scale(&g(r - s - 2)));
            let mut v = vec![
                total3(np(1), np(0), np(0)),
                total3(np(0), np(1), np(0)),
                total3(xv(), yv().scale(&g(r - 2)).add(&xp(r - 2)), au3),
            ];
            for j in 1..=(r - 3) {
                let au = if j >= s {
                    xp(j - s).scale(&binom(j, s))
                } else {
                    np(0)
                };
                v.push(total3(np(0), xp(j), au));
            }
            v
        }
        "g10.m" => {
            let r = int_param(inst, "r")?;
            if r < 4 {
                return Err(invalid(id, "r >= 4"));
            }
            let mut v = vec![
                total3(np(1), np(0), np(0)),
                total3(np(0), np(1), np(0)),
                total3(xv(), np(0), sym("A")),
                total3(np(0), yv(), sym("B")),
            ];
            for j in 1..=(r - 4) {
                v.push(total3(np(0), xp(j), np(0)));
            }
            v
        }
        "g10.a" => {
            let r = int_param(inst, "r")?;
            let s = int_param(inst, "s")?;
            if r < 5 {
                return Err(invalid(id, "r >= 5"));
            }
            if !(1 <= s && s <= r - 4) {
                return Err(invalid(id, "1 <= s <= r-4"));
            }
            let mut v = vec![
                total3(np(1), np(0), np(0)),
                total3(np(0), np(1), np(0)),
                total3(xv(), np(0), uv().scale(&g(-s))),
                total3(np(0), yv(), uv()),
            ];
            for j in 1..=(r - 4) {
                let au = if j >= s {
                    xp(j - s).scale(&binom(j, s))
                } else {
                    np(0)
                };
                v.push(total3(np(0), xp(j), au));
            }
            v
        }
        "g11.m" => parsed(Space::Total, &[
            "Dx", "Dy", "x*Dx + A*Du", "y*Dy + B*Du", "y^2*Dy + 2*B*y*Du",
        ]),
        "g11.a" => parsed(Space::Total, &[
            "Dx", "Dy", "x*Dx", "y*Dy - u*Du", "y^2*Dy + (1 - 2*y*u)*Du",
        ]),
        "g12.m" => parsed(Space::Total, &[
            "Dx", "Dy", "x*Dx + A*Du", "y*Dy + B*Du",
            "x^2*Dx + 2*A*x*Du", "y^2*Dy + 2*B*y*Du",
        ]),
        "g12.a1" => parsed(Space::Total, &[
            "Dx", "Dy", "x*Dx - u*Du", "y*Dy",
            "x^2*Dx + (1 - 2*x*u)*Du", "y^2*Dy",
        ]),
        "g12.a2" => parsed(Space::Total, &[
            "Dx", "Dy", "x*Dx", "y*Dy - u*Du",
            "x^2*Dx", "y^2*Dy + (1 - 2*y*u)*Du",
        ]),
        "g13.m1" => {
            let r = int_param(inst, "r")?;
            if r != 6 {
                return Err(invalid(id, "r = 6"));
            }
            parsed(Space::Total, &[
                "Dx", "Dy", "x*Dx + y*Dy + A*Du", "x*Dy + B*Du",
                "x^2*Dy + 2*B*x*Du",
                "x^2*Dx + 2*x*y*Dy + (2*x*A + 2*y*B)*Du",
            ])
        }
        "g13.m2" => {
            let r = int_param(inst, "r")?;
            if r < 5 {
                return Err(invalid(id, "r >= 5"));
            }
            if r == 6 {
                return Err(invalid(id, "r != 6"));
            }
            let mut v = vec![
                total3(np(1), np(0), np(0)),
                total3(np(0), np(1), np(0)),
                total3(xv(), yv().mul(&half(r - 4)), sym("C")),
            ];
            for j in 1..=(r - 4) {
                v.push(total3(np(0), xp(j), np(0)));
            }
            v.push(total3(
                xp(2),
                xv().mul(&yv()).scale(&g(r - 4)),
                sym("C").mul(&xv()).scale(&g(2)),
            ));
            v
        }
        "g13.a1" => {
            let r = int_param(inst, "r")?;
            if r < 5 {
                return Err(invalid(id, "r >= 5"));
            }
            let mut v = vec![
                total3(np(1), np(0), np(0)),
                total3(np(0), np(1), np(0)),
                total3(xv(), yv().mul(&half(r - 4)), uv().neg()),
            ];
            for j in 1..=(r - 4) {
                v.push(total3(np(0), xp(j), np(0)));
            }
            v.push(total3(
                xp(2),
                xv().mul(&yv()).scale(&g(r - 4)),
                np(1).sub(&xv().mul(&uv()).scale(&g(2))),
            ));
            v
        }
        "g13.a2" => {
            let r = int_param(inst, "r")?;
            if r < 5 {
                return Err(invalid(id, "r >= 5"));
            }
            if r == 6 {
                return Err(invalid(id, "r != 6"));
            }
            let mut v = vec![
                total3(np(1), np(0), np(0)),
                total3(np(0), np(1), np(0)),
                total3(
                    xp(2),
                    xv().mul(&yv()).scale(&g(r - 4)),
                    xv().mul(&uv()).scale(&g(r - 6)).add(&yv().scale(&g(r - 4))),
                ),
                total3(xv(), yv().mul(&half(r - 4)), uv().mul(&half(r - 6))),
            ];
            for j in 1..=(r - 4) {
                v.push(total3(np(0), xp(j), xp(j - 1).scale(&g(j))));
            }
            v
        }
        "g14.m" => {
            let r = int_param(inst, "r")?;
            if r < 6 {
                return Err(invalid(id, "r >= 6"));
            }
            let mut v = vec![
                total3(np(1), np(0), np(0)),
                total3(np(0), np(1), np(0)),
                total3(xv(), np(0), sym("A")),
                total3(np(0), yv(), sym("B")),
            ];
            for j in 1..=(r - 5) {
                v.push(total3(np(0), xp(j), np(0)));
            }
            let au = sym("A")
                .scale(&g(2))
                .add(&sym("B").scale(&g(r - 5)))
                .mul(&xv());
            v.push(total3(xp(2), xv().mul(&yv()).scale(&g(r - 5)), au));
            v
        }
        "g14.a1" => {
            let r = int_param(inst, "r")?;
            if r < 6 {
                return Err(invalid(id, "r >= 6"));
            }
            let mut v = vec![
                total3(np(1), np(0), np(0)),
                total3(np(0), np(1), np(0)),
                total3(xv(), np(0), uv().neg()),
                total3(np(0), yv(), np(0)),
            ];
            for j in 1..=(r - 5) {
                v.push(total3(np(0), xp(j), np(0)));
            }
            v.push(total3(
                xp(2),
                xv().mul(&yv()).scale(&g(r - 5)),
                np(1).sub(&xv().mul(&uv()).scale(&g(2))),
            ));
            v
        }
        "g14.a2" => {
            let r = int_param(inst, "r")?;
            if r < 6 {
                return Err(invalid(id, "r >= 6"));
            }
            let mut v = vec![
                total3(np(1), np(0), np(0)),
                total3(np(0), np(1), np(0)),
                total3(
                    xp(2),
                    xv().mul(&yv()).scale(&g(r - 5)),
                    xv().mul(&uv()).scale(&g(r - 7)).add(&yv().scale(&g(r - 5))),
                ),
                total3(xv(), np(0), uv().neg()),
                total3(np(0), yv(), uv()),
            ];
            for j in 1..=(r - 5) {
                v.push(total3(np(0), xp(j), xp(j - 1).scale(&g(j))));
            }
            v
        }
        "g15.m" => parsed(Space::Total, &[
            "Dx", "x*Dx + Dy", "x^2*Dx + 2*x*Dy + C*e^(y)*Du",
        ]),
        "g16.m" => parsed(Space::Total, &[
            "Dx", "x*Dx - y*Dy + C*Du", "x^2*Dx + (1 - 2*x*y)*Dy + 2*C*x*Du",
        ]),
        _ => return Err(Error::UnknownId(id.to_string())),
    };
    Ok(gens)
}

/// Declared base-space sample point for the instance (all entries are
/// regular at the origin except the alternative realizations).
pub fn sample_point(inst: &Instance) -> Point {
    let (x, y) = match inst.family.as_str() {
        "g15t" => (1, 1),
        "g16t" => (0, 1),
        _ => (0, 0),
    };
    BTreeMap::from([(Var::X, g(x)), (Var::Y, g(y))])
}

/// Sample point on the total space (fiber coordinate at 0).
pub fn sample_point_total(inst: &Instance) -> Point {
    let mut p = sample_point(inst);
    p.insert(Var::U, g(0));
    p
}

/// The paired base instance for a lift instance (None for base entries).
pub fn base_of(inst: &Instance) -> Option<Instance> {
    let fam = family(&inst.family).ok()?;
    let base_id = fam.base?;
    let mut base = Instance::new(base_id);
    let base_params = family(base_id).expect("base family exists").params;
    for name in base_params {
        if *name == "r" && inst.family == "g13.m1" {
            base.params.insert("r".into(), ParamValue::int(6));
            continue;
        }
        if let Some(v) = inst.params.get(*name) {
            base.params.insert((*name).to_string(), v.clone());
        }
    }
    Some(base)
}

// ---------------------------------------------------------------------------
// id grammar

/// Parse an instance id such as `g8[r=5,alpha=2]`, `g4[alphas=0;1,ms=1;1]`,
/// `g6.a`, or `g16t`. List-valued parameters are normalized to lists.
pub fn parse_instance(s: &str) -> Result<Instance> {
    let s = s.trim();
    let (fam_str, rest) = match s.find('[') {
        Some(i) => {
            let inner = s[i..].strip_prefix('[').and_then(|t| t.strip_suffix(']'));
            match inner {
                Some(inner) => (&s[..i], Some(inner)),
                None => {
                    return Err(Error::Parse {
                        pos: i,
                        msg: "expected id[name=value,...]".into(),
                    })
                }
            }
        }
        None => (s, None),
    };
    family(fam_str)?; // unknown ids fail here
    let mut inst = Instance::new(fam_str);
    if let Some(inner) = rest {
        if inner.trim().is_empty() {
            return Err(Error::Parse {
                pos: 0,
                msg: "empty parameter list".into(),
            });
        }
        for part in inner.split(',') {
            let (name, value) = part.split_once('=').ok_or_else(|| Error::Parse {
                pos: 0,
                msg: format!("expected name=value in `{part}`"),
            })?;
            let name = name.trim();
            let values: Result<Vec<GaussianRational>> = value
                .split(';')
                .map(|v| {
                    let p = crate::parse::parse_expoly(v.trim())?;
                    p.as_constant().ok_or_else(|| Error::Parse {
                        pos: 0,
                        msg: format!("parameter value `{}` is not a constant", v.trim()),
                    })
                })
                .collect();
            let values = values?;
            let is_list = name == "alphas" || name == "ms";
            let pv = if values.len() == 1 && !is_list {
                ParamValue::Scalar(values.into_iter().next().expect("one"))
            } else {
                ParamValue::List(values)
            };
            if inst.params.insert(name.to_string(), pv).is_some() {
                return Err(Error::Parse {
                    pos: 0,
                    msg: format!("duplicate parameter {name}"),
                });
            }
        }
    }
    Ok(inst)
}

// ---------------------------------------------------------------------------
// grid enumeration

/// Bounds for enumerating test instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestGrid {
    /// Cap on the dimension of parametric families (fixed-dimension
    /// families are always included).
    pub r_max: i64,
    /// Values tried for the g8 scaling weight alpha.
    pub alphas: Vec<GaussianRational>,
    /// Frequency pool for g4/g5 (at most two distinct frequencies per
    /// instance).
    pub freqs: Vec<GaussianRational>,
}

impl Default for TestGrid {
    fn default() -> TestGrid {
        TestGrid {
            r_max: 7,
            alphas: vec![
                g(0),
                g(1),
                g(2),
                GaussianRational::from_ratio(1, 2),
                GaussianRational::i(),
            ],
            freqs: vec![g(0), g(1), GaussianRational::i()],
        }
    }
}

impl fmt::Display for TestGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alphas: Vec<String> = self.alphas.iter().map(|a| a.to_string()).collect();
        let freqs: Vec<String> = self.freqs.iter().map(|a| a.to_string()).collect();
        write!(
            f,
            "rmax={};alphas={};freqs={}",
            self.r_max,
            alphas.join(","),
            freqs.join(",")
        )
    }
}

/// Parse a grid description like `rmax=5;alphas=0,1,i;freqs=0,1`.
pub fn parse_grid(s: &str) -> Result<TestGrid> {
    let mut grid = TestGrid::default();
    for part in s.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, value) = part.split_once('=').ok_or_else(|| Error::Parse {
            pos: 0,
            msg: format!("expected key=value in grid component `{part}`"),
        })?;
        let nums: Result<Vec<GaussianRational>> = value
            .split(',')
            .map(|v| {
                let p = crate::parse::parse_expoly(v.trim())?;
                p.as_constant().ok_or_else(|| Error::Parse {
                    pos: 0,
                    msg: format!("grid value `{}` is not a constant", v.trim()),
                })
            })
            .collect();
        let nums = nums?;
        match key.trim() {
            "rmax" => {
                grid.r_max = nums
                    .first()
                    .and_then(int_of)
                    .ok_or_else(|| Error::Parse {
                        pos: 0,
                        msg: "rmax must be an integer".into(),
                    })?;
            }
            "alphas" => grid.alphas = nums,
            "freqs" => grid.freqs = nums,
            other => {
                return Err(Error::Parse {
                    pos: 0,
                    msg: format!("unknown grid key `{other}`"),
                })
            }
        }
    }
    Ok(grid)
}

/// Ordered compositions of `total` into `parts` positive integers.
fn compositions(total: i64, parts: usize) -> Vec<Vec<i64>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=(total - parts as i64 + 1) {
        for rest in compositions(total - first, parts - 1) {
            let mut v = vec![first];
            v.extend(rest);
            out.push(v);
        }
    }
    out
}

/// Frequency selections: single frequencies, then ordered pairs of distinct
/// frequencies (first < second in the canonical order).
fn freq_choices(freqs: &[GaussianRational], count: usize) -> Vec<Vec<GaussianRational>> {
    let mut sorted = freqs.to_vec();
    sorted.sort();
    sorted.dedup();
    match count {
        1 => sorted.iter().map(|f| vec![f.clone()]).collect(),
        2 => {
            let mut out = Vec::new();
            for i in 0..sorted.len() {
                for j in (i + 1)..sorted.len() {
                    out.push(vec![sorted[i].clone(), sorted[j].clone()]);
                }
            }
            out
        }
        _ => Vec::new(),
    }
}

fn push_exp_instances(out: &mut Vec<Instance>, id: &str, grid: &TestGrid, base_offset: i64, r_min: i64) {
    // r = sum(ms) + base_offset, enumerated for r_min..=r_min+2 (subject to
    // the grid cap), with one or two distinct frequencies.
    let r_top = (r_min + 2).min(grid.r_max);
    for r in r_min..=r_top {
        let total: i64 = r - base_offset;
        for parts in 1..=2usize {
            if (total as usize) < parts {
                continue;
            }
            for alphas in freq_choices(&grid.freqs, parts) {
                for ms in compositions(total, parts) {
                    out.push(
                        Instance::new(id)
                            .with("alphas", ParamValue::List(alphas.clone()))
                            .with("ms", ParamValue::ints(&ms)),
                    );
                }
            }
        }
    }
}

fn r_range(r_min: i64, grid: &TestGrid) -> std::ops::RangeInclusive<i64> {
    r_min..=(r_min + 2).min(grid.r_max)
}

/// Deterministic enumeration of all family instances inside the grid.
/// Fixed-dimension families contribute one instance each; parametric
/// families range over r in {minimum, minimum+1, minimum+2} capped by the
/// grid, with alpha and frequency values from the grid pools.
pub fn enumerate_instances(grid: &TestGrid) -> Vec<Instance> {
    let mut out = Vec::new();
    for fam in FAMILIES {
        match fam.id {
            "g1" | "g2" | "g3" | "g6" | "g7" | "g11" | "g12" | "g15" | "g16" | "g15t"
            | "g16t" | "g1.m" | "g1.p" | "g2.m" | "g2.p" | "g3.p" | "g6.m" | "g6.a"
            | "g7.m" | "g7.a" | "g11.m" | "g11.a" | "g12.m" | "g12.a1" | "g12.a2"
            | "g15.m" | "g16.m" => out.push(Instance::new(fam.id)),
            "g4" => push_exp_instances(&mut out, fam.id, grid, 1, 2),
            "g4.m" => push_exp_instances(&mut out, fam.id, grid, 1, 3),
            "g5" | "g5.m" | "g5.a" => push_exp_instances(&mut out, fam.id, grid, 2, 4),
            "g8" | "g8.m" => {
                for r in r_range(3, grid) {
                    for alpha in &grid.alphas {
                        out.push(
                            Instance::new(fam.id)
                                .with("r", ParamValue::int(r))
                                .with("alpha", ParamValue::Scalar(alpha.clone())),
                        );
                    }
                }
            }
            "g8.a" => {
                for r in r_range(4, grid) {
                    for alpha in &grid.alphas {
                        for s in 1..=(r - 3) {
                            if *alpha == g(s) {
                                continue;
                            }
                            out.push(
                                Instance::new(fam.id)
                                    .with("r", ParamValue::int(r))
                                    .with("alpha", ParamValue::Scalar(alpha.clone()))
                                    .with("s", ParamValue::int(s)),
                            );
                        }
                    }
                }
            }
            "g9" | "g9.m" => {
                for r in r_range(3, grid) {
                    out.push(Instance::new(fam.id).with("r", ParamValue::int(r)));
                }
            }
            "g9.a" => {
                for r in r_range(4, grid) {
                    for s in 1..=(r - 3) {
                        out.push(
                            Instance::new(fam.id)
                                .with("r", ParamValue::int(r))
                                .with("s", ParamValue::int(s)),
                        );
                    }
                }
            }
            "g10" | "g10.m" => {
                for r in r_range(4, grid) {
                    out.push(Instance::new(fam.id).with("r", ParamValue::int(r)));
                }
            }
            "g10.a" => {
                for r in r_range(5, grid) {
                    for s in 1..=(r - 4) {
                        out.push(
                            Instance::new(fam.id)
                                .with("r", ParamValue::int(r))
                                .with("s", ParamValue::int(s)),
                        );
                    }
                }
            }
            "g13" | "g13.a1" => {
                for r in r_range(5, grid) {
                    out.push(Instance::new(fam.id).with("r", ParamValue::int(r)));
                }
            }
            "g13.m1" => {
                if grid.r_max >= 6 {
                    out.push(Instance::new(fam.id).with("r", ParamValue::int(6)));
                }
            }
            "g13.m2" | "g13.a2" => {
                for r in r_range(5, grid) {
                    if r != 6 {
                        out.push(Instance::new(fam.id).with("r", ParamValue::int(r)));
                    }
                }
            }
            "g14" | "g14.m" | "g14.a1" | "g14.a2" => {
                for r in r_range(6, grid) {
                    out.push(Instance::new(fam.id).with("r", ParamValue::int(r)));
                }
            }
            other => unreachable!("family {other} not covered by the grid"),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{span_equal, LieAlgebra};

    fn inst(s: &str) -> Instance {
        parse_instance(s).unwrap()
    }

    #[test]
    fn family_counts() {
        let bases = FAMILIES.iter().filter(|f| f.base.is_none()).count();
        let lifts = FAMILIES.iter().filter(|f| f.base.is_some()).count();
        assert_eq!(bases, 18); // 16 families + 2 alternative realizations
        assert_eq!(lifts, 32);
    }

    #[test]
    fn id_round_trip() {
        for s in [
            "g6",
            "g6.a",
            "g16t",
            "g8[r=5,alpha=2]",
            "g8[r=4,alpha=1/2]",
            "g8[r=4,alpha=i]",
            "g4[alphas=0;1,ms=1;1]",
            "g5[alphas=0,ms=2]",
            "g8.a[r=5,alpha=0,s=2]",
            "g13.m2[r=5]",
        ] {
            let i = inst(s);
            assert_eq!(i.to_string(), s, "canonical form differs");
            assert_eq!(parse_instance(&i.to_string()).unwrap(), i);
        }
    }

    #[test]
    fn instantiate_examples() {
        let g8 = instantiate(&inst("g8[r=5,alpha=2]")).unwrap();
        let expect = super::parsed(
            Space::Base,
            &["Dx", "Dy", "x*Dy", "x^2*Dy", "x*Dx + 2*y*Dy"],
        );
        assert_eq!(g8, expect);

        let g4 = instantiate(&inst("g4[alphas=0;1,ms=1;1]")).unwrap();
        let expect = super::parsed(Space::Base, &["Dx", "Dy", "e^(x)*Dy"]);
        assert_eq!(g4, expect);

        let err = instantiate(&inst("g8[r=2,alpha=1]")).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { .. }));
        assert!(matches!(
            instantiate(&Instance::new("nope")).unwrap_err(),
            Error::UnknownId(_)
        ));
    }

    #[test]
    fn grid_contains_expected_instances() {
        let small = parse_grid("rmax=4").unwrap();
        let ids: Vec<String> = enumerate_instances(&small)
            .iter()
            .map(|i| i.to_string())
            .collect();
        assert!(ids.contains(&"g6".to_string()));
        assert!(ids.contains(&"g6.a".to_string()));
        assert!(!ids.iter().any(|s| s.starts_with("g14")));

        let five = parse_grid("rmax=5").unwrap();
        let ids5: Vec<String> = enumerate_instances(&five)
            .iter()
            .map(|i| i.to_string())
            .collect();
        assert!(ids5.contains(&"g13.m2[r=5]".to_string()));
    }

    #[test]
    fn default_grid_instantiates_and_pairs() {
        let grid = TestGrid::default();
        let instances = enumerate_instances(&grid);
        assert!(instances.len() > 150);
        for i in &instances {
            let gens = instantiate(i).unwrap_or_else(|e| {
                panic!("{} failed to instantiate: {e}", i)
            });
            let fam = family(&i.family).unwrap();
            assert!(!gens.is_empty());
            if fam.base.is_some() {
                let b = base_of(i).expect("lift has base");
                instantiate(&b).unwrap_or_else(|e| {
                    panic!("paired base {} of {} failed: {e}", b, i)
                });
            }
        }
        // determinism
        let again = enumerate_instances(&grid);
        assert_eq!(instances, again);
    }

    #[test]
    fn swapping_axes_relates_the_two_affine_lifts_of_g12() {
        let a1 = instantiate(&inst("g12.a1")).unwrap();
        let a2 = instantiate(&inst("g12.a2")).unwrap();
        let swapped: Vec<_> = a1.iter().map(|v| v.swap_xy()).collect();
        assert_eq!(swapped.len(), a2.len());
        for v in &swapped {
            assert!(a2.contains(v), "{v} missing after swap");
        }
    }

    #[test]
    fn lift_projections_span_their_base() {
        for s in ["g6.a", "g8.m[r=4,alpha=1]", "g13.a2[r=5]", "g1.m", "g9.a[r=5,s=1]"] {
            let i = inst(s);
            let lift = instantiate(&i).unwrap();
            let base = instantiate(&base_of(&i).unwrap()).unwrap();
            let proj: Vec<_> = lift.iter().map(|v| v.project().unwrap()).collect();
            assert!(span_equal(&proj, &base), "{s} projections differ from base");
        }
    }

    #[test]
    fn smoke_verify_two_lifts() {
        for (s, tag) in [("g6.a", LiftType::Affine), ("g8.m[r=4,alpha=1]", LiftType::Metric)] {
            let i = inst(s);
            let lift_gens = instantiate(&i).unwrap();
            let proj: Vec<_> = lift_gens.iter().map(|v| v.project().unwrap()).collect();
            let hat = LieAlgebra::new(Space::Total, lift_gens).unwrap();
            let base = LieAlgebra::new(Space::Base, proj).unwrap();
            assert_eq!(hat.c, base.c);
            let p = sample_point(&i);
            assert_eq!(hat.classify_lift_type(&base, &p).unwrap(), tag);
            assert!(hat.transitive_at(&sample_point_total(&i)).unwrap());
        }
    }
}

#[cfg(test)]
mod grid_timing {
    use super::*;
    use crate::liealg::LieAlgebra;

    #[test]
    #[ignore]
    fn time_full_grid_verification() {
        let grid = TestGrid::default();
        let instances = enumerate_instances(&grid);
        let mut lifts = 0;
        let t0 = std::time::Instant::now();
        for i in &instances {
            let fam = family(&i.family).unwrap();
            let gens = instantiate(i).unwrap();
            if fam.base.is_none() {
                let alg = LieAlgebra::new(Space::Base, gens).unwrap();
                if !fam.singular {
                    assert!(alg.transitive_at(&sample_point(i)).unwrap(), "{i}");
                }
                continue;
            }
            lifts += 1;
            let t = std::time::Instant::now();
            let proj: Vec<_> = gens.iter().map(|v| v.project().unwrap()).collect();
            let hat = LieAlgebra::new(Space::Total, gens).unwrap_or_else(|e| panic!("{i}: {e}"));
            let base = LieAlgebra::new(Space::Base, proj).unwrap();
            assert_eq!(hat.c, base.c, "{i}");
            let got = hat.classify_lift_type(&base, &sample_point(i)).unwrap_or_else(|e| panic!("{i}: {e}"));
            assert_eq!(Some(got), fam.tag, "{i}");
            if t.elapsed().as_millis() > 500 {
                eprintln!("slow: {i} {:?}", t.elapsed());
            }
        }
        eprintln!("total {} instances ({} lifts) in {:?}", instances.len(), lifts, t0.elapsed());
    }
}
