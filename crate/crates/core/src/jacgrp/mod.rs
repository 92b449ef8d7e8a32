//! Divisor-class arithmetic on Jacobians of odd-degree models, using
//! Mumford representatives and Cantor's composition and reduction.

mod table;

pub use table::{
    enumerate_jacobian, enumerate_jacobian_capped, subgroup_generated, JacobianGroupTable,
    SubgroupInfo,
};

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::{BigInt, Sign};

use crate::curve::{
    format_coefficient, parse_coefficient, split_top_level, CurvePoint, HyperellipticCurve, Parity,
};
use crate::error::{Error, Result};
use crate::ff::poly::{self, Poly};
use crate::ff::{FieldDesc, FieldElement};
use crate::nt;

/// Reduced divisor `(u, v)`: `u` monic of degree at most `g`, `deg v < deg u`,
/// `u | v^2 - f`. The identity is `(1, 0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MumfordDivisor {
    u: Poly,
    v: Poly,
    tag: u64,
}

impl MumfordDivisor {
    pub fn u(&self) -> &[FieldElement] {
        &self.u
    }

    pub fn v(&self) -> &[FieldElement] {
        &self.v
    }

    /// Degree of `u`, the weight of the effective part.
    pub fn weight(&self) -> usize {
        self.u.len() - 1
    }

    pub fn is_identity(&self) -> bool {
        self.u.len() == 1
    }
}

/// The group `J(F_{q^m})` of an odd-degree model.
#[derive(Clone, Debug)]
pub struct Jacobian {
    curve: HyperellipticCurve,
    m: u32,
    field: FieldDesc,
    f: Poly,
    g: usize,
    tag: u64,
}

impl PartialEq for Jacobian {
    fn eq(&self, other: &Self) -> bool {
        self.tag == other.tag && self.m == other.m && self.curve == other.curve
    }
}

impl Jacobian {
    pub fn new(curve: &HyperellipticCurve, m: u32) -> Result<Jacobian> {
        if curve.parity() != Parity::Odd {
            return Err(Error::ModelNotOdd);
        }
        let ext = curve.extension(m)?;
        let mut h = DefaultHasher::new();
        curve.spec().hash(&mut h);
        m.hash(&mut h);
        Ok(Jacobian {
            curve: curve.clone(),
            m,
            field: ext.field,
            f: ext.f,
            g: curve.genus(),
            tag: h.finish(),
        })
    }

    pub fn curve(&self) -> &HyperellipticCurve {
        &self.curve
    }

    /// Extension degree over the curve's base field.
    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn f(&self) -> &[FieldElement] {
        &self.f
    }

    pub fn identity(&self) -> MumfordDivisor {
        self.wrap(poly::one(), Vec::new())
    }

    fn wrap(&self, u: Poly, v: Poly) -> MumfordDivisor {
        MumfordDivisor { u, v, tag: self.tag }
    }

    /// Validates and wraps a Mumford pair.
    pub fn divisor(&self, u: Poly, v: Poly) -> Result<MumfordDivisor> {
        let k = &self.field;
        let u = poly::trim(u);
        let v = poly::trim(v);
        let Some(du) = poly::degree(&u) else {
            return Err(Error::InvalidArgument("u must be nonzero".into()));
        };
        if u[du] != k.one() || du > self.g || v.len() > du {
            return Err(Error::InvalidArgument("not a reduced Mumford pair".into()));
        }
        let lhs = poly::sub(k, &poly::mul(k, &v, &v), &self.f);
        if !poly::rem(k, &lhs, &u).is_empty() {
            return Err(Error::InvalidArgument("u does not divide v^2 - f".into()));
        }
        Ok(self.wrap(u, v))
    }

    fn check(&self, d: &MumfordDivisor) -> Result<()> {
        if d.tag != self.tag {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, a: &MumfordDivisor, b: &MumfordDivisor) -> Result<MumfordDivisor> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_unchecked(a, b))
    }

    fn add_unchecked(&self, a: &MumfordDivisor, b: &MumfordDivisor) -> MumfordDivisor {
        if a.is_identity() {
            return b.clone();
        }
        if b.is_identity() {
            return a.clone();
        }
        let (u, v) = self.compose(&a.u, &a.v, &b.u, &b.v);
        let (u, v) = self.reduce(u, v);
        self.wrap(u, v)
    }

    pub fn neg(&self, a: &MumfordDivisor) -> Result<MumfordDivisor> {
        self.check(a)?;
        Ok(self.wrap(a.u.clone(), poly::neg(&self.field, &a.v)))
    }

    pub fn sub(&self, a: &MumfordDivisor, b: &MumfordDivisor) -> Result<MumfordDivisor> {
        self.add(a, &self.neg(b)?)
    }

    /// `n * a` for any integer `n`.
    pub fn scalar_mul(&self, a: &MumfordDivisor, n: &BigInt) -> Result<MumfordDivisor> {
        self.check(a)?;
        let base = if n.sign() == Sign::Minus { self.neg(a)? } else { a.clone() };
        let mut acc = self.identity();
        let (_, bits) = n.to_u64_digits();
        for &limb in bits.iter().rev() {
            for bit in (0..64).rev() {
                acc = self.add_unchecked(&acc, &acc);
                if (limb >> bit) & 1 == 1 {
                    acc = self.add_unchecked(&acc, &base);
                }
            }
        }
        Ok(acc)
    }

    pub fn mul_u64(&self, a: &MumfordDivisor, n: u64) -> Result<MumfordDivisor> {
        self.check(a)?;
        Ok(self.mul_unchecked(a, n))
    }

    fn mul_unchecked(&self, a: &MumfordDivisor, n: u64) -> MumfordDivisor {
        let mut acc = self.identity();
        if n == 0 {
            return acc;
        }
        for bit in (0..64 - n.leading_zeros()).rev() {
            acc = self.add_unchecked(&acc, &acc);
            if (n >> bit) & 1 == 1 {
                acc = self.add_unchecked(&acc, a);
            }
        }
        acc
    }

    /// Cantor composition of two semi-reduced divisors.
    fn compose(&self, u1: &[FieldElement], v1: &[FieldElement], u2: &[FieldElement], v2: &[FieldElement]) -> (Poly, Poly) {
        let k = &self.field;
        let (d0, e1, e2) = poly::xgcd(k, u1, u2);
        let (d, c1, c2) = poly::xgcd(k, &d0, &poly::add(k, v1, v2));
        let s1 = poly::mul(k, &c1, &e1);
        let s2 = poly::mul(k, &c1, &e2);
        let u = poly::div_exact(k, &poly::mul(k, u1, u2), &poly::mul(k, &d, &d));
        let t1 = poly::mul(k, &s1, &poly::mul(k, u1, v2));
        let t2 = poly::mul(k, &s2, &poly::mul(k, u2, v1));
        let t3 = poly::mul(k, &c2, &poly::add(k, &poly::mul(k, v1, v2), &self.f));
        let num = poly::add(k, &poly::add(k, &t1, &t2), &t3);
        let v = poly::rem(k, &poly::div_exact(k, &num, &d), &u);
        (u, v)
    }

    fn reduce(&self, mut u: Poly, mut v: Poly) -> (Poly, Poly) {
        let k = &self.field;
        while u.len() - 1 > self.g {
            let num = poly::sub(k, &self.f, &poly::mul(k, &v, &v));
            u = poly::monic(k, &poly::div_exact(k, &num, &u));
            v = poly::rem(k, &poly::neg(k, &v), &u);
        }
        let u = poly::monic(k, &u);
        let v = poly::rem(k, &v, &u);
        (u, v)
    }

    /// Class of `[P - inf]` for a point rational over the working field.
    pub fn point_class(&self, pt: &CurvePoint) -> Result<MumfordDivisor> {
        let k = &self.field;
        match *pt {
            CurvePoint::Infinity { branch: 0 } => Ok(self.identity()),
            CurvePoint::Infinity { .. } => Err(Error::InvalidArgument(
                "odd models have a single point at infinity".into(),
            )),
            CurvePoint::Affine { x, y } => {
                if k.element(x.encoding()).is_none()
                    || k.element(y.encoding()).is_none()
                    || k.square(y) != poly::eval(k, &self.f, x)
                {
                    return Err(Error::InvalidArgument("point is not on the curve".into()));
                }
                Ok(self.wrap(poly::linear(k, x), poly::constant(y)))
            }
        }
    }

    /// Class of `[c - c0]`.
    pub fn point_embed(&self, c: &CurvePoint, c0: &CurvePoint) -> Result<MumfordDivisor> {
        let a = self.point_class(c)?;
        let b = self.point_class(c0)?;
        self.sub(&a, &b)
    }

    /// Classes `[w - inf]` of the rational affine Weierstrass points.
    pub fn weierstrass_classes(&self) -> Vec<MumfordDivisor> {
        let k = &self.field;
        poly::roots(k, &self.f)
            .into_iter()
            .map(|r| self.wrap(poly::linear(k, r), Vec::new()))
            .collect()
    }

    /// The degree-two class `z0` of the hyperelliptic pencil, normalized
    /// against `2 inf`. On an odd model the fibre over infinity is `2 inf`,
    /// so `z0` is the identity of `J`.
    pub fn hyperelliptic_class(&self) -> HyperellipticClass {
        HyperellipticClass {
            class: self.identity(),
        }
    }

    /// Exact order of `a`, given the factored order of a group containing it.
    pub fn element_order_factored(&self, a: &MumfordDivisor, factors: &[(u64, u32)]) -> Result<u64> {
        self.check(a)?;
        let mut order: u64 = factors.iter().map(|&(p, e)| p.pow(e)).product();
        for &(p, e) in factors {
            for _ in 0..e {
                if self.mul_unchecked(a, order / p).is_identity() {
                    order /= p;
                } else {
                    break;
                }
            }
        }
        Ok(order)
    }

    /// Exact order of `a`, where `n` is a multiple of it (typically `F(m)`).
    pub fn element_order(&self, a: &MumfordDivisor, n: u64) -> Result<u64> {
        let factors = nt::factorize(n)?;
        self.element_order_factored(a, &factors)
    }

    /// `u:<ascending coeffs>;v:<ascending coeffs>`.
    pub fn format_divisor(&self, d: &MumfordDivisor) -> String {
        format!("u:{};v:{}", self.format_poly(&d.u), self.format_poly(&d.v))
    }

    fn format_poly(&self, a: &[FieldElement]) -> String {
        if a.is_empty() {
            return "0".into();
        }
        a.iter()
            .map(|&c| format_coefficient(&self.field, c))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_divisor(&self, s: &str) -> Result<MumfordDivisor> {
        let bad = || Error::Parse(format!("bad divisor {s:?}"));
        let (us, vs) = s.trim().split_once(';').ok_or_else(bad)?;
        let us = us.trim().strip_prefix("u:").ok_or_else(bad)?;
        let vs = vs.trim().strip_prefix("v:").ok_or_else(bad)?;
        let parse = |t: &str| -> Result<Poly> {
            let coeffs = split_top_level(t)
                .into_iter()
                .map(|c| parse_coefficient(&self.field, c))
                .collect::<Result<Vec<_>>>()?;
            Ok(poly::trim(coeffs))
        };
        self.divisor(parse(us)?, parse(vs)?)
    }
}

/// `z0` of the genus-2 pencil as a degree-zero class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperellipticClass {
    pub class: MumfordDivisor,
}

/// `h^0` of the divisor class `D + dgr * inf` on a genus-2 odd model,
/// for `D` a degree-zero class and `dgr` in `0..=2`.
pub fn h0_genus2(jac: &Jacobian, class: &MumfordDivisor, dgr: u32) -> Result<u32> {
    jac.check(class)?;
    if jac.genus() != 2 {
        return Err(Error::InvalidArgument("h0_genus2 needs a genus-2 curve".into()));
    }
    match dgr {
        0 => Ok(class.is_identity() as u32),
        1 => Ok((class.weight() <= 1) as u32),
        2 => Ok(if *class == jac.hyperelliptic_class().class { 2 } else { 1 }),
        _ => Err(Error::DegreeOutOfRange(dgr)),
    }
}

impl fmt::Display for MumfordDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |a: &[FieldElement]| {
            if a.is_empty() {
                "0".to_string()
            } else {
                a.iter().map(|c| c.encoding().to_string()).collect::<Vec<_>>().join(",")
            }
        };
        write!(f, "u:{};v:{}", show(&self.u), show(&self.v))
    }
}
