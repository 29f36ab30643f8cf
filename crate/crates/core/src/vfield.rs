//! Vector fields on the base C^2 (coordinates x, y) and on the total space
//! C^2 x C (extra fiber coordinate u), the Lie bracket, projection along the
//! fiber, and pushforward under fiber-preserving maps.

use crate::error::{Error, Result};
use crate::expoly::{ExpPoly, Var};
use crate::rat::GaussianRational;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Space {
    Base,
    Total,
}

/// ax*Dx + ay*Dy + au*Du. Base fields have au = 0 and u-free coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorField {
    pub ax: ExpPoly,
    pub ay: ExpPoly,
    pub au: ExpPoly,
    pub space: Space,
}

impl VectorField {
    pub fn new(space: Space, ax: ExpPoly, ay: ExpPoly, au: ExpPoly) -> Result<VectorField> {
        if space == Space::Base
            && (!au.is_zero() || ax.has_var(&Var::U) || ay.has_var(&Var::U))
        {
            return Err(Error::SpaceMismatch);
        }
        Ok(VectorField { ax, ay, au, space })
    }

    pub fn base(ax: ExpPoly, ay: ExpPoly) -> VectorField {
        VectorField {
            ax,
            ay,
            au: ExpPoly::zero(),
            space: Space::Base,
        }
    }

    pub fn total(ax: ExpPoly, ay: ExpPoly, au: ExpPoly) -> VectorField {
        VectorField {
            ax,
            ay,
            au,
            space: Space::Total,
        }
    }

    pub fn zero(space: Space) -> VectorField {
        VectorField {
            ax: ExpPoly::zero(),
            ay: ExpPoly::zero(),
            au: ExpPoly::zero(),
            space,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.ax.is_zero() && self.ay.is_zero() && self.au.is_zero()
    }

    pub fn components(&self) -> [&ExpPoly; 3] {
        [&self.ax, &self.ay, &self.au]
    }

    /// Apply as a derivation: X(f) = ax f_x + ay f_y + au f_u.
    pub fn apply(&self, f: &ExpPoly) -> ExpPoly {
        let fx = f.diff(&Var::X).expect("x is differentiable");
        let fy = f.diff(&Var::Y).expect("y is differentiable");
        let fu = f.diff(&Var::U).expect("u is differentiable");
        self.ax.mul(&fx).add(&self.ay.mul(&fy)).add(&self.au.mul(&fu))
    }

    /// Lie bracket [X, Y]^c = X(Y^c) - Y(X^c), componentwise.
    pub fn bracket(&self, other: &VectorField) -> Result<VectorField> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(VectorField {
            ax: self.apply(&other.ax).sub(&other.apply(&self.ax)),
            ay: self.apply(&other.ay).sub(&other.apply(&self.ay)),
            au: self.apply(&other.au).sub(&other.apply(&self.au)),
            space: self.space,
        })
    }

    /// Drop the fiber component. Defined only when the base components do not
    /// depend on u, i.e. the field is projectable along the fibration.
    pub fn project(&self) -> Result<VectorField> {
        if self.space == Space::Base {
            return Ok(self.clone());
        }
        if self.ax.has_var(&Var::U) {
            return Err(Error::NotProjectable { component: 'x' });
        }
        if self.ay.has_var(&Var::U) {
            return Err(Error::NotProjectable { component: 'y' });
        }
        Ok(VectorField::base(self.ax.clone(), self.ay.clone()))
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        debug_assert_eq!(self.space, other.space);
        VectorField {
            ax: self.ax.add(&other.ax),
            ay: self.ay.add(&other.ay),
            au: self.au.add(&other.au),
            space: self.space,
        }
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> VectorField {
        VectorField {
            ax: self.ax.neg(),
            ay: self.ay.neg(),
            au: self.au.neg(),
            space: self.space,
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> VectorField {
        VectorField {
            ax: self.ax.scale(c),
            ay: self.ay.scale(c),
            au: self.au.scale(c),
            space: self.space,
        }
    }

    /// Evaluate all components at a (possibly partial) assignment.
    pub fn eval(&self, assign: &BTreeMap<Var, GaussianRational>) -> Result<[ExpPoly; 3]> {
        Ok([
            self.ax.eval(assign)?,
            self.ay.eval(assign)?,
            self.au.eval(assign)?,
        ])
    }

    /// Pushforward under the coordinate exchange (x, y) -> (y, x).
    pub fn swap_xy(&self) -> VectorField {
        VectorField {
            ax: self.ay.swap_xy(),
            ay: self.ax.swap_xy(),
            au: self.au.swap_xy(),
            space: self.space,
        }
    }

    /// Pushforward of a projectable total-space field under a fiber map.
    /// The base components are untouched; the fiber component is rewritten in
    /// the new fiber coordinate (still called u).
    pub fn pushforward(&self, m: &FiberMap) -> Result<VectorField> {
        if self.space != Space::Total {
            return Err(Error::SpaceMismatch);
        }
        if self.ax.has_var(&Var::U) {
            return Err(Error::NotProjectable { component: 'x' });
        }
        if self.ay.has_var(&Var::U) {
            return Err(Error::NotProjectable { component: 'y' });
        }
        let u = ExpPoly::var(Var::U);
        let base = VectorField::base(self.ax.clone(), self.ay.clone());
        let g = match m {
            // v = u - U  =>  u = v + U,  X(v) = f - X(U)
            FiberMap::Translation { shift } => self
                .au
                .substitute(&Var::U, &u.add(shift))
                .sub(&base.apply(shift)),
            // v = a u + b  =>  u = a_inv (v - b),  X(v) = X(a) u + X(b) + a f
            FiberMap::Affine { a, a_inv, b } => {
                let xa = base.apply(a);
                let xb = base.apply(b);
                let pre = xa.mul(&u).add(&xb).add(&a.mul(&self.au));
                pre.substitute(&Var::U, &a_inv.mul(&u.sub(b)))
            }
            // v = (a u + b)/(c u + d): closed-form action on u-quadratics.
            FiberMap::Moebius {
                a,
                b,
                c,
                d,
                det_inv,
            } => {
                let deg = self.au.u_degree();
                if deg > 2 {
                    return Err(Error::DegreeTooHigh {
                        got: deg as usize,
                        max: 2,
                    });
                }
                let xa = base.apply(a);
                let xb = base.apply(b);
                let xc = base.apply(c);
                let xd = base.apply(d);
                let det = a.mul(d).sub(&b.mul(c));
                // N(u) = (X(a)u + X(b))(cu + d) - (au + b)(X(c)u + X(d)) + f*det
                let n = xa
                    .mul(&u)
                    .add(&xb)
                    .mul(&c.mul(&u).add(d))
                    .sub(&a.mul(&u).add(b).mul(&xc.mul(&u).add(&xd)))
                    .add(&self.au.mul(&det));
                let mut nc = n.coeffs_in_u();
                nc.resize(3, ExpPoly::zero());
                // g(v) = det^{-2} [ n0 (a-cv)^2 + n1 (dv-b)(a-cv) + n2 (dv-b)^2 ]
                let p = a.sub(&c.mul(&u));
                let q = d.mul(&u).sub(b);
                let m_v = nc[0]
                    .mul(&p.pow(2))
                    .add(&nc[1].mul(&q).mul(&p))
                    .add(&nc[2].mul(&q.pow(2)));
                m_v.mul(&det_inv.pow(2))
            }
        };
        Ok(VectorField::total(self.ax.clone(), self.ay.clone(), g))
    }
}

/// A fiber-preserving change of the fiber coordinate over the base.
/// Ring units must be declared with an explicit inverse, which is verified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiberMap {
    /// New coordinate v = u - shift(x, y).
    Translation { shift: ExpPoly },
    /// New coordinate v = a(x,y) u + b(x,y), with a a declared unit.
    Affine {
        a: ExpPoly,
        a_inv: ExpPoly,
        b: ExpPoly,
    },
    /// New coordinate v = (a u + b)/(c u + d), with ad - bc a declared unit.
    Moebius {
        a: ExpPoly,
        b: ExpPoly,
        c: ExpPoly,
        d: ExpPoly,
        det_inv: ExpPoly,
    },
}

fn check_base_function(p: &ExpPoly, what: &str) -> Result<()> {
    if p.has_var(&Var::U) {
        return Err(Error::OutsideRing(format!("{what} depends on u")));
    }
    Ok(())
}

impl FiberMap {
    pub fn translation(shift: ExpPoly) -> Result<FiberMap> {
        check_base_function(&shift, "translation amount")?;
        Ok(FiberMap::Translation { shift })
    }

    pub fn affine(a: ExpPoly, a_inv: ExpPoly, b: ExpPoly) -> Result<FiberMap> {
        check_base_function(&a, "scale factor")?;
        check_base_function(&a_inv, "scale factor inverse")?;
        check_base_function(&b, "offset")?;
        if !a.mul(&a_inv).is_one() {
            return Err(Error::NotInvertible(format!(
                "({}) * ({}) != 1",
                a, a_inv
            )));
        }
        Ok(FiberMap::Affine { a, a_inv, b })
    }

    pub fn moebius(
        a: ExpPoly,
        b: ExpPoly,
        c: ExpPoly,
        d: ExpPoly,
        det_inv: ExpPoly,
    ) -> Result<FiberMap> {
        for (p, w) in [(&a, "a"), (&b, "b"), (&c, "c"), (&d, "d"), (&det_inv, "det_inv")] {
            check_base_function(p, w)?;
        }
        let det = a.mul(&d).sub(&b.mul(&c));
        if !det.mul(&det_inv).is_one() {
            return Err(Error::NotInvertible(format!(
                "({}) * ({}) != 1",
                det, det_inv
            )));
        }
        Ok(FiberMap::Moebius {
            a,
            b,
            c,
            d,
            det_inv,
        })
    }

    pub fn identity() -> FiberMap {
        FiberMap::Translation {
            shift: ExpPoly::zero(),
        }
    }

    /// The inverse fiber map (exact; reuses the declared unit inverses).
    pub fn inverse(&self) -> FiberMap {
        match self {
            FiberMap::Translation { shift } => FiberMap::Translation {
                shift: shift.neg(),
            },
            // v = a u + b  =>  u = a_inv v - a_inv b
            FiberMap::Affine { a, a_inv, b } => FiberMap::Affine {
                a: a_inv.clone(),
                a_inv: a.clone(),
                b: a_inv.mul(b).neg(),
            },
            // matrix inverse (d, -b; -c, a): same determinant
            FiberMap::Moebius {
                a,
                b,
                c,
                d,
                det_inv,
            } => FiberMap::Moebius {
                a: d.clone(),
                b: b.neg(),
                c: c.neg(),
                d: a.clone(),
                det_inv: det_inv.clone(),
            },
        }
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::parse::field_to_string(self))
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

    #[test]
    fn bracket_matches_defining_formula() {
        // [x dy, y dx] computed two ways
        let a = VectorField::base(ExpPoly::zero(), x());
        let b = VectorField::base(y(), ExpPoly::zero());
        let br = a.bracket(&b).unwrap();
        let direct_x = a.apply(&b.ax).sub(&b.apply(&a.ax));
        let direct_y = a.apply(&b.ay).sub(&b.apply(&a.ay));
        assert_eq!(br.ax, direct_x);
        assert_eq!(br.ay, direct_y);
        // and the classical value x dx - y dy
        assert_eq!(br, VectorField::base(x(), y().neg()));
    }

    #[test]
    fn bracket_space_mismatch() {
        let a = VectorField::base(x(), ExpPoly::zero());
        let b = VectorField::total(x(), ExpPoly::zero(), ExpPoly::zero());
        assert_eq!(a.bracket(&b), Err(Error::SpaceMismatch));
    }

    #[test]
    fn projection() {
        let v = VectorField::total(x(), y(), u().pow(2));
        assert_eq!(v.project().unwrap(), VectorField::base(x(), y()));
        let w = VectorField::total(u(), y(), ExpPoly::zero());
        assert_eq!(w.project(), Err(Error::NotProjectable { component: 'x' }));
    }

    #[test]
    fn translation_normalizes_constant_lift() {
        // dx + du pushed by v = u - x becomes dx
        let v = VectorField::total(ExpPoly::one(), ExpPoly::zero(), ExpPoly::one());
        let m = FiberMap::translation(x()).unwrap();
        let out = v.pushforward(&m).unwrap();
        assert_eq!(
            out,
            VectorField::total(ExpPoly::one(), ExpPoly::zero(), ExpPoly::zero())
        );
    }

    #[test]
    fn moebius_inversion_on_euler_field() {
        // u du under v = 1/u becomes -v dv
        let v = VectorField::total(ExpPoly::zero(), ExpPoly::zero(), u());
        let m = FiberMap::moebius(
            ExpPoly::zero(),
            ExpPoly::one(),
            ExpPoly::one(),
            ExpPoly::zero(),
            ExpPoly::from_int(-1),
        )
        .unwrap();
        assert_eq!(
            v.pushforward(&m).unwrap(),
            VectorField::total(ExpPoly::zero(), ExpPoly::zero(), u().neg())
        );
    }

    #[test]
    fn moebius_rejects_cubic_fiber_component() {
        let v = VectorField::total(ExpPoly::zero(), ExpPoly::zero(), u().pow(3));
        let m = FiberMap::moebius(
            ExpPoly::zero(),
            ExpPoly::one(),
            ExpPoly::one(),
            ExpPoly::zero(),
            ExpPoly::from_int(-1),
        )
        .unwrap();
        assert_eq!(
            v.pushforward(&m),
            Err(Error::DegreeTooHigh { got: 3, max: 2 })
        );
    }

    #[test]
    fn pushforward_roundtrip_affine() {
        let m = FiberMap::affine(
            ExpPoly::from_int(2),
            ExpPoly::constant(G::from_ratio(1, 2)),
            x().mul(&y()),
        )
        .unwrap();
        let v = VectorField::total(x(), ExpPoly::one(), u().pow(2).add(&y()));
        let there = v.pushforward(&m).unwrap();
        let back = there.pushforward(&m.inverse()).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn declared_inverse_is_verified() {
        assert!(matches!(
            FiberMap::affine(x(), x(), ExpPoly::zero()),
            Err(Error::NotInvertible(_))
        ));
    }
}
