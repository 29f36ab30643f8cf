//! Exponential polynomials: the exact coefficient ring used everywhere.
//!
//! An `ExpPoly` is a finite sum of terms
//!     coeff * x^a * y^b * u^d * (parameter monomial) * e^(wx*x + wy*y)
//! with Gaussian-rational `coeff` and frequencies. Terms are kept in a unique
//! canonical form (sorted, merged, zero-free), so structural equality is
//! mathematical equality.

use crate::error::{Error, Result};
use crate::rat::GaussianRational;
use std::collections::BTreeMap;
use std::fmt;

/// A ring variable: the two base coordinates, the fiber coordinate, or a
/// formal parameter symbol (uppercase identifier, treated as a degree-graded
/// indeterminate with zero derivative).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    Y,
    U,
    Param(String),
}

impl Var {
    pub fn param(name: &str) -> Var {
        Var::Param(name.to_string())
    }

    pub fn is_param(&self) -> bool {
        matches!(self, Var::Param(_))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X => write!(f, "x"),
            Var::Y => write!(f, "y"),
            Var::U => write!(f, "u"),
            Var::Param(s) => write!(f, "{s}"),
        }
    }
}

/// Exponential frequency pair: the term carries a factor e^(x*X + y*Y).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Freq {
    pub x: GaussianRational,
    pub y: GaussianRational,
}

impl Freq {
    pub fn zero() -> Freq {
        Freq {
            x: GaussianRational::zero(),
            y: GaussianRational::zero(),
        }
    }

    pub fn new(x: GaussianRational, y: GaussianRational) -> Freq {
        Freq { x, y }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    fn add(&self, other: &Freq) -> Freq {
        Freq {
            x: &self.x + &other.x,
            y: &self.y + &other.y,
        }
    }

    pub fn neg(&self) -> Freq {
        Freq {
            x: -&self.x,
            y: -&self.y,
        }
    }
}

/// Monomial key of a term: frequency plus exponent map (no zero exponents).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono {
    pub freq: Freq,
    pub exps: BTreeMap<Var, u32>,
}

impl Mono {
    pub fn one() -> Mono {
        Mono {
            freq: Freq::zero(),
            exps: BTreeMap::new(),
        }
    }
}

/// One canonical term of an `ExpPoly`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: GaussianRational,
    pub exps: BTreeMap<Var, u32>,
    pub freq: Freq,
}

impl Term {
    pub fn exp(&self, v: &Var) -> u32 {
        self.exps.get(v).copied().unwrap_or(0)
    }

    /// Total degree in the two base coordinates x, y.
    pub fn degree_xy(&self) -> u32 {
        self.exp(&Var::X) + self.exp(&Var::Y)
    }

    pub fn u_degree(&self) -> u32 {
        self.exp(&Var::U)
    }

    fn mono(&self) -> Mono {
        Mono {
            freq: self.freq.clone(),
            exps: self.exps.clone(),
        }
    }
}

/// Canonical exponential polynomial. `terms` is sorted by monomial key,
/// contains no zero coefficients and no duplicate keys.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExpPoly {
    terms: Vec<Term>,
}

fn normalize(raw: Vec<Term>) -> Vec<Term> {
    let mut map: BTreeMap<Mono, GaussianRational> = BTreeMap::new();
    for t in raw {
        if t.coeff.is_zero() {
            continue;
        }
        let mut exps = t.exps;
        exps.retain(|_, e| *e != 0);
        let key = Mono { freq: t.freq, exps };
        match map.get_mut(&key) {
            Some(c) => *c += &t.coeff,
            None => {
                map.insert(key, t.coeff);
            }
        }
    }
    map.into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(m, coeff)| Term {
            coeff,
            exps: m.exps,
            freq: m.freq,
        })
        .collect()
}

impl ExpPoly {
    pub fn zero() -> ExpPoly {
        ExpPoly { terms: vec![] }
    }

    pub fn one() -> ExpPoly {
        ExpPoly::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> ExpPoly {
        ExpPoly::from_terms(vec![Term {
            coeff: c,
            exps: BTreeMap::new(),
            freq: Freq::zero(),
        }])
    }

    pub fn from_int(n: i64) -> ExpPoly {
        ExpPoly::constant(GaussianRational::from_int(n))
    }

    pub fn var(v: Var) -> ExpPoly {
        ExpPoly::from_terms(vec![Term {
            coeff: GaussianRational::one(),
            exps: BTreeMap::from([(v, 1)]),
            freq: Freq::zero(),
        }])
    }

    /// e^(freq.x * x + freq.y * y) as a polynomial.
    pub fn exponential(freq: Freq) -> ExpPoly {
        ExpPoly::from_terms(vec![Term {
            coeff: GaussianRational::one(),
            exps: BTreeMap::new(),
            freq,
        }])
    }

    /// c * x^a * y^b * u^d * e^(freq), the general single-term constructor.
    pub fn term(c: GaussianRational, exps: &[(Var, u32)], freq: Freq) -> ExpPoly {
        let mut m = BTreeMap::new();
        for (v, e) in exps {
            if *e > 0 {
                *m.entry(v.clone()).or_insert(0) += e;
            }
        }
        ExpPoly::from_terms(vec![Term {
            coeff: c,
            exps: m,
            freq,
        }])
    }

    pub fn from_terms(raw: Vec<Term>) -> ExpPoly {
        ExpPoly {
            terms: normalize(raw),
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms[0].coeff.is_one()
            && self.terms[0].exps.is_empty()
            && self.terms[0].freq.is_zero()
    }

    /// The value as a Gaussian rational, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self.terms.len() {
            0 => Some(GaussianRational::zero()),
            1 if self.terms[0].exps.is_empty() && self.terms[0].freq.is_zero() => {
                Some(self.terms[0].coeff.clone())
            }
            _ => None,
        }
    }

    pub fn add(&self, rhs: &ExpPoly) -> ExpPoly {
        let mut raw = self.terms.clone();
        raw.extend(rhs.terms.iter().cloned());
        ExpPoly::from_terms(raw)
    }

    pub fn sub(&self, rhs: &ExpPoly) -> ExpPoly {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> ExpPoly {
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: -&t.coeff,
                    exps: t.exps.clone(),
                    freq: t.freq.clone(),
                })
                .collect(),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> ExpPoly {
        if c.is_zero() {
            return ExpPoly::zero();
        }
        ExpPoly {
            terms: normalize(
                self.terms
                    .iter()
                    .map(|t| Term {
                        coeff: &t.coeff * c,
                        exps: t.exps.clone(),
                        freq: t.freq.clone(),
                    })
                    .collect(),
            ),
        }
    }

    pub fn mul(&self, rhs: &ExpPoly) -> ExpPoly {
        let mut raw = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                let mut exps = a.exps.clone();
                for (v, e) in &b.exps {
                    *exps.entry(v.clone()).or_insert(0) += e;
                }
                raw.push(Term {
                    coeff: &a.coeff * &b.coeff,
                    exps,
                    freq: a.freq.add(&b.freq),
                });
            }
        }
        ExpPoly::from_terms(raw)
    }

    pub fn pow(&self, n: u32) -> ExpPoly {
        let mut out = ExpPoly::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Multiplicative inverse, defined only for ring units c * e^(freq).
    pub fn unit_inv(&self) -> Option<ExpPoly> {
        if self.terms.len() != 1 || !self.terms[0].exps.is_empty() {
            return None;
        }
        let t = &self.terms[0];
        Some(ExpPoly::from_terms(vec![Term {
            coeff: t.coeff.inv()?,
            exps: BTreeMap::new(),
            freq: t.freq.neg(),
        }]))
    }

    /// Partial derivative. Only the geometric variables x, y, u are
    /// differentiable; parameter symbols are formal constants.
    pub fn diff(&self, v: &Var) -> Result<ExpPoly> {
        if let Var::Param(name) = v {
            return Err(Error::ParameterDifferentiation(name.clone()));
        }
        let mut raw = Vec::new();
        for t in &self.terms {
            let a = t.exp(v);
            if a > 0 {
                let mut exps = t.exps.clone();
                if a == 1 {
                    exps.remove(v);
                } else {
                    exps.insert(v.clone(), a - 1);
                }
                raw.push(Term {
                    coeff: &t.coeff * &GaussianRational::from_int(a as i64),
                    exps,
                    freq: t.freq.clone(),
                });
            }
            let omega = match v {
                Var::X => &t.freq.x,
                Var::Y => &t.freq.y,
                _ => continue,
            };
            if !omega.is_zero() {
                raw.push(Term {
                    coeff: &t.coeff * omega,
                    exps: t.exps.clone(),
                    freq: t.freq.clone(),
                });
            }
        }
        Ok(ExpPoly::from_terms(raw))
    }

    /// Antiderivative in x or y with the integration constant fixed to 0.
    /// The input must not involve the fiber variable u. Exponential factors
    /// are handled by repeated integration by parts.
    pub fn antideriv(&self, v: &Var) -> Result<ExpPoly> {
        if !matches!(v, Var::X | Var::Y) {
            return Err(Error::OutsideRing(format!(
                "antiderivative only defined in x or y, not {v}"
            )));
        }
        if self.terms.iter().any(|t| t.u_degree() > 0) {
            return Err(Error::ContainsFiberVariable);
        }
        let mut out = ExpPoly::zero();
        for t in &self.terms {
            let a = t.exp(v);
            let omega = match v {
                Var::X => t.freq.x.clone(),
                _ => t.freq.y.clone(),
            };
            if omega.is_zero() {
                let mut exps = t.exps.clone();
                exps.insert(v.clone(), a + 1);
                out = out.add(&ExpPoly::from_terms(vec![Term {
                    coeff: &t.coeff / &GaussianRational::from_int((a + 1) as i64),
                    exps,
                    freq: t.freq.clone(),
                }]));
            } else {
                // int x^a e^(wx) = sum_k (-1)^k a!/(a-k)! / w^(k+1) x^(a-k) e^(wx)
                let inv_omega = omega.inv().expect("nonzero frequency");
                let mut c = &t.coeff * &inv_omega;
                let mut k = 0u32;
                loop {
                    let mut exps = t.exps.clone();
                    let e = a - k;
                    if e == 0 {
                        exps.remove(v);
                    } else {
                        exps.insert(v.clone(), e);
                    }
                    out = out.add(&ExpPoly::from_terms(vec![Term {
                        coeff: c.clone(),
                        exps,
                        freq: t.freq.clone(),
                    }]));
                    if k == a {
                        break;
                    }
                    c = &(&c * &GaussianRational::from_int(-((a - k) as i64))) * &inv_omega;
                    k += 1;
                }
            }
        }
        Ok(out)
    }

    pub fn antideriv_x(&self) -> Result<ExpPoly> {
        self.antideriv(&Var::X)
    }

    /// Substitute exact values for some variables; unassigned variables stay
    /// and the residual polynomial is returned. Exponential factors evaluate
    /// exactly only at 0, so assigning x != 0 (resp. y != 0) to a term with a
    /// nonzero x-frequency (resp. y-frequency) is an error.
    pub fn eval(&self, assign: &BTreeMap<Var, GaussianRational>) -> Result<ExpPoly> {
        let mut raw = Vec::new();
        for t in &self.terms {
            for (axis, omega) in [(Var::X, &t.freq.x), (Var::Y, &t.freq.y)] {
                if !omega.is_zero() {
                    if let Some(val) = assign.get(&axis) {
                        if !val.is_zero() {
                            return Err(Error::NonExactEvaluation {
                                var: if axis == Var::X { 'x' } else { 'y' },
                                freq: omega.to_string(),
                                value: val.to_string(),
                            });
                        }
                    }
                }
            }
            let mut coeff = t.coeff.clone();
            let mut exps = BTreeMap::new();
            for (v, e) in &t.exps {
                match assign.get(v) {
                    Some(val) => {
                        let mut p = GaussianRational::one();
                        for _ in 0..*e {
                            p = &p * val;
                        }
                        coeff = &coeff * &p;
                    }
                    None => {
                        exps.insert(v.clone(), *e);
                    }
                }
            }
            raw.push(Term {
                coeff,
                exps,
                freq: t.freq.clone(),
            });
        }
        Ok(ExpPoly::from_terms(raw))
    }

    /// Substitute a polynomial for a variable that carries no exponential
    /// frequency (the fiber variable u or a parameter symbol).
    pub fn substitute(&self, v: &Var, value: &ExpPoly) -> ExpPoly {
        debug_assert!(matches!(v, Var::U | Var::Param(_)));
        let mut out = ExpPoly::zero();
        for t in &self.terms {
            let e = t.exp(v);
            let mut exps = t.exps.clone();
            exps.remove(v);
            let base = ExpPoly::from_terms(vec![Term {
                coeff: t.coeff.clone(),
                exps,
                freq: t.freq.clone(),
            }]);
            out = out.add(&base.mul(&value.pow(e)));
        }
        out
    }

    /// Exchange the roles of x and y (exponents and frequencies alike).
    pub fn swap_xy(&self) -> ExpPoly {
        ExpPoly::from_terms(
            self.terms
                .iter()
                .map(|t| {
                    let mut exps = t.exps.clone();
                    let ex = exps.remove(&Var::X);
                    let ey = exps.remove(&Var::Y);
                    if let Some(e) = ex {
                        exps.insert(Var::Y, e);
                    }
                    if let Some(e) = ey {
                        exps.insert(Var::X, e);
                    }
                    Term {
                        coeff: t.coeff.clone(),
                        exps,
                        freq: Freq {
                            x: t.freq.y.clone(),
                            y: t.freq.x.clone(),
                        },
                    }
                })
                .collect(),
        )
    }

    /// View as a polynomial in u: index d holds the u^d coefficient.
    pub fn coeffs_in_u(&self) -> Vec<ExpPoly> {
        let top = self.terms.iter().map(|t| t.u_degree()).max().unwrap_or(0) as usize;
        let mut out = vec![ExpPoly::zero(); top + 1];
        for t in &self.terms {
            let d = t.u_degree() as usize;
            let mut exps = t.exps.clone();
            exps.remove(&Var::U);
            out[d] = out[d].add(&ExpPoly::from_terms(vec![Term {
                coeff: t.coeff.clone(),
                exps,
                freq: t.freq.clone(),
            }]));
        }
        out
    }

    pub fn u_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.u_degree()).max().unwrap_or(0)
    }

    pub fn degree_xy(&self) -> u32 {
        self.terms.iter().map(|t| t.degree_xy()).max().unwrap_or(0)
    }

    pub fn has_var(&self, v: &Var) -> bool {
        self.terms.iter().any(|t| t.exp(v) > 0)
    }

    pub fn has_params(&self) -> bool {
        self.terms.iter().any(|t| t.exps.keys().any(Var::is_param))
    }

    /// All parameter symbols appearing in the polynomial, sorted.
    pub fn params(&self) -> Vec<String> {
        let mut out: Vec<String> = vec![];
        for t in &self.terms {
            for v in t.exps.keys() {
                if let Var::Param(name) = v {
                    if !out.contains(name) {
                        out.push(name.clone());
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// All distinct frequencies appearing in the polynomial.
    pub fn freqs(&self) -> Vec<Freq> {
        let mut out: Vec<Freq> = vec![];
        for t in &self.terms {
            if !out.contains(&t.freq) {
                out.push(t.freq.clone());
            }
        }
        out
    }

    /// Decompose into (monomial, coefficient) pairs keyed for linear algebra.
    pub fn monomials(&self) -> impl Iterator<Item = (Mono, &GaussianRational)> {
        self.terms.iter().map(|t| (t.mono(), &t.coeff))
    }

    /// The coefficient of a given monomial key (zero if absent).
    pub fn coeff_of(&self, key: &Mono) -> GaussianRational {
        for t in &self.terms {
            let m = t.mono();
            if m == *key {
                return t.coeff.clone();
            }
        }
        GaussianRational::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::GaussianRational as G;

    fn x() -> ExpPoly {
        ExpPoly::var(Var::X)
    }
    fn y() -> ExpPoly {
        ExpPoly::var(Var::Y)
    }
    fn u() -> ExpPoly {
        ExpPoly::var(Var::U)
    }

    fn e_x(n: i64) -> ExpPoly {
        ExpPoly::exponential(Freq::new(G::from_int(n), G::zero()))
    }

    #[test]
    fn canonical_merge() {
        let p = x().add(&x());
        assert_eq!(p, x().scale(&G::from_int(2)));
        assert!(x().sub(&x()).is_zero());
    }

    #[test]
    fn product_collects_frequencies() {
        // (x e^x) * (x e^(2x)) = x^2 e^(3x)
        let p = x().mul(&e_x(1)).mul(&x().mul(&e_x(2)));
        let q = x().mul(&x()).mul(&e_x(3));
        assert_eq!(p, q);
    }

    #[test]
    fn diff_product_rule_with_frequency() {
        // d/dx (x^2 e^(2x)) = 2x e^(2x) + 2 x^2 e^(2x)
        let p = x().pow(2).mul(&e_x(2));
        let expect = x()
            .scale(&G::from_int(2))
            .add(&x().pow(2).scale(&G::from_int(2)))
            .mul(&e_x(2));
        assert_eq!(p.diff(&Var::X).unwrap(), expect);
    }

    #[test]
    fn diff_param_is_error() {
        let c = ExpPoly::var(Var::param("C"));
        assert!(matches!(
            c.diff(&Var::param("C")),
            Err(Error::ParameterDifferentiation(_))
        ));
        // ... but parameters are constants for the geometric derivatives.
        assert!(c.diff(&Var::X).unwrap().is_zero());
    }

    #[test]
    fn antideriv_x_by_parts() {
        // int x e^x dx = (x - 1) e^x
        let p = x().mul(&e_x(1));
        let expect = x().sub(&ExpPoly::one()).mul(&e_x(1));
        assert_eq!(p.antideriv_x().unwrap(), expect);
        // and d/dx recovers the integrand
        assert_eq!(expect.diff(&Var::X).unwrap(), p);
    }

    #[test]
    fn antideriv_rejects_u() {
        assert_eq!(u().antideriv_x(), Err(Error::ContainsFiberVariable));
    }

    #[test]
    fn antideriv_poly() {
        // int x^2 = x^3/3
        assert_eq!(
            x().pow(2).antideriv_x().unwrap(),
            x().pow(3).scale(&G::from_ratio(1, 3))
        );
    }

    #[test]
    fn eval_exactness() {
        let p = x().mul(&e_x(2));
        let at_zero = BTreeMap::from([(Var::X, G::zero())]);
        assert!(p.eval(&at_zero).unwrap().is_zero());
        let at_one = BTreeMap::from([(Var::X, G::one())]);
        assert!(matches!(
            p.eval(&at_one),
            Err(Error::NonExactEvaluation { .. })
        ));
        // partial assignment leaves a residual
        let q = x().mul(&y());
        let partial = BTreeMap::from([(Var::Y, G::from_int(3))]);
        assert_eq!(q.eval(&partial).unwrap(), x().scale(&G::from_int(3)));
    }

    #[test]
    fn substitute_fiber() {
        // (1 - 2yu)[u -> u + y] = 1 - 2y^2 - 2yu
        let p = ExpPoly::one().sub(&y().mul(&u()).scale(&G::from_int(2)));
        let s = p.substitute(&Var::U, &u().add(&y()));
        let expect = ExpPoly::one()
            .sub(&y().pow(2).scale(&G::from_int(2)))
            .sub(&y().mul(&u()).scale(&G::from_int(2)));
        assert_eq!(s, expect);
    }

    #[test]
    fn unit_inverse() {
        let two_ex = e_x(1).scale(&G::from_int(2));
        let inv = two_ex.unit_inv().unwrap();
        assert!(two_ex.mul(&inv).is_one());
        assert!(x().unit_inv().is_none());
    }
}
