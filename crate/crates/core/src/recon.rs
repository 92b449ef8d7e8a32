//! Reconstruction experiments on a single curve: the set `C(k_1)^-` over the
//! quadratic extension, subgroups generated by even cycles away from an
//! excluded set, valuation jumps along quadratic towers, and the field of
//! definition of the 2-torsion.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::curve::{CurvePoint, HyperellipticCurve, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::ff::poly;
use crate::jacgrp::{enumerate_jacobian_capped, subgroup_generated, Jacobian};
use crate::nt;
use crate::zeta::{self, FrobCharPoly};

pub const MAX_TOWER_DEPTH: u32 = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CMinusReport {
    /// `#k_0`.
    pub q: u64,
    pub genus: usize,
    /// Members of `C(k_1)^-` in canonical point order.
    pub members: Vec<CurvePoint>,
    pub size: usize,
    /// `|#C(k_1)^- - q|`.
    pub deviation: u64,
    /// `2 g sqrt(q)`.
    pub bound: f64,
    pub within_bound: bool,
    /// The Frobenius test and the divisor-class test select the same points.
    pub paths_agree: bool,
}

/// Points `c` of `C(k_1)`, `k_1` the quadratic extension of the base, with
/// `c + sigma(c)` in the hyperelliptic class.
pub fn c_minus_set(curve: &HyperellipticCurve) -> Result<CMinusReport> {
    c_minus_set_capped(curve, DEFAULT_CAP)
}

pub fn c_minus_set_capped(curve: &HyperellipticCurve, cap: u64) -> Result<CMinusReport> {
    let jac = Jacobian::new(curve, 2)?;
    let k = jac.field();
    let d = curve.base().d();
    let points = curve.enumerate_points_capped(2, cap)?;
    let frob = |pt: &CurvePoint| match *pt {
        CurvePoint::Affine { x, y } => CurvePoint::Affine {
            x: k.frobenius(x, d),
            y: k.frobenius(y, d),
        },
        inf => inf,
    };
    let z0 = jac.hyperelliptic_class().class;
    let mut members = Vec::new();
    let mut paths_agree = true;
    for pt in &points {
        let fast = match *pt {
            CurvePoint::Infinity { .. } => true,
            CurvePoint::Affine { x, y } => k.frobenius(x, d) == x && k.frobenius(y, d) == k.neg(y),
        };
        let sum = jac.add(&jac.point_class(pt)?, &jac.point_class(&frob(pt))?)?;
        let slow = sum == z0;
        paths_agree &= fast == slow;
        if fast {
            members.push(*pt);
        }
    }
    let q = curve.q();
    let g = curve.genus();
    let bound = 2.0 * g as f64 * (q as f64).sqrt();
    let deviation = (members.len() as i64 - q as i64).unsigned_abs();
    Ok(CMinusReport {
        q,
        genus: g,
        size: members.len(),
        deviation,
        bound,
        within_bound: (deviation as f64) <= bound,
        paths_agree,
        members,
    })
}

/// Points left out of the generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exclusion {
    CMinus,
    Points(Vec<CurvePoint>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenerationReport {
    pub generators: String,
    /// `#k_1`.
    pub field_size: u64,
    pub points: usize,
    pub excluded: usize,
    #[serde(serialize_with = "crate::json::big")]
    pub group_order: BigInt,
    pub subgroup_order: u64,
    pub index: u64,
    /// Excluded fraction of `C(k_1)`.
    pub epsilon: f64,
    /// `(2g-1)! g 2^(2g-1) / (1 - epsilon)^(2g-1)`.
    pub bound: f64,
    /// `#J(k_1) = Q^g (1 + delta_jac)` with `Q = #k_1`.
    pub delta_jac: f64,
    /// `#C(k_1) = Q (1 + delta_curve)`.
    pub delta_curve: f64,
    pub precondition: bool,
    /// `None` when the size precondition fails.
    pub within_bound: Option<bool>,
    pub note: Option<String>,
}

/// Index in `J(k_1)` of the subgroup generated by `[c + c' - z0]` for `c, c'`
/// outside the excluded set.
pub fn generation_check(curve: &HyperellipticCurve, exclude: &Exclusion) -> Result<GenerationReport> {
    generation_check_capped(curve, exclude, DEFAULT_CAP)
}

pub fn generation_check_capped(curve: &HyperellipticCurve, exclude: &Exclusion, cap: u64) -> Result<GenerationReport> {
    let table = enumerate_jacobian_capped(curve, 2, cap)?;
    let jac = table.jacobian();
    let points = curve.enumerate_points_capped(2, cap)?;
    let excluded: Vec<CurvePoint> = match exclude {
        Exclusion::CMinus => c_minus_set_capped(curve, cap)?.members,
        Exclusion::Points(pts) => pts.clone(),
    };
    let complement: Vec<&CurvePoint> = points.iter().filter(|p| !excluded.contains(p)).collect();
    let Some(first) = complement.first() else {
        return Err(Error::EmptyComplement);
    };
    // c + c' - z0 = (c + c0 - z0) + (c' + c0 - z0) - (2 c0 - z0), so the
    // sums against one fixed point already generate
    let z0 = jac.hyperelliptic_class().class;
    let a0 = jac.point_class(first)?;
    let gens = complement
        .iter()
        .map(|c| jac.sub(&jac.add(&jac.point_class(c)?, &a0)?, &z0))
        .collect::<Result<Vec<_>>>()?;
    let sub = subgroup_generated(&gens, &table)?;

    let g = curve.genus() as i32;
    let big_q = (curve.q() * curve.q()) as f64;
    let n_points = points.len();
    let n_excluded = points.iter().filter(|p| excluded.contains(p)).count();
    let epsilon = n_excluded as f64 / n_points as f64;
    let factorial: f64 = (1..2 * g).map(f64::from).product();
    let bound = factorial * g as f64 * 2f64.powi(2 * g - 1) / (1.0 - epsilon).powi(2 * g - 1);
    let delta_jac = table.order() as f64 / big_q.powi(g) - 1.0;
    let delta_curve = n_points as f64 / big_q - 1.0;
    let precondition = delta_jac.abs() <= 0.5 && delta_curve.abs() <= 0.5;
    let within_bound = precondition.then_some(sub.index as f64 <= bound);
    let note = (!precondition).then(|| "size precondition fails; bound not checked".to_string());
    Ok(GenerationReport {
        generators: match exclude {
            Exclusion::CMinus => "[c + c' - z0] for c, c' outside C(k1)^-".into(),
            Exclusion::Points(_) => "[c + c' - z0] for c, c' outside the given points".into(),
        },
        field_size: curve.q() * curve.q(),
        points: n_points,
        excluded: n_excluded,
        group_order: BigInt::from(table.order()),
        subgroup_order: sub.order,
        index: sub.index,
        epsilon,
        bound,
        delta_jac,
        delta_curve,
        precondition,
        within_bound,
        note,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TowerLevel {
    /// Degree of the level over the base field.
    pub degree: u64,
    #[serde(serialize_with = "crate::json::big")]
    pub order: BigInt,
    pub valuation: u32,
    /// Whether `J[l]` is rational at this level; `None` if undetermined.
    pub torsion_rational: Option<bool>,
    /// `v_l` at the next level minus `v_l` here.
    pub jump: Option<u32>,
    pub divides_next: Option<bool>,
    /// Jump of at least `2g` where the torsion is rational.
    pub jump_at_least_2g: Option<bool>,
    pub jump_equals_2g: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TowerReport {
    pub q: u64,
    pub genus: usize,
    pub ell: u64,
    pub depth: u32,
    pub levels: Vec<TowerLevel>,
}

impl TowerReport {
    /// No level with rational torsion has a jump below `2g`.
    pub fn consistent(&self) -> bool {
        self.levels.iter().all(|l| l.jump_at_least_2g != Some(false) && l.divides_next != Some(false))
    }
}

/// `v_l(F(l^i))` for `i = 0..=depth`. Rationality of `J[l]` is decided for
/// `l = 2` from the 2-torsion field; other `l` report valuations only.
pub fn tower_report(curve: &HyperellipticCurve, depth: u32, ell: u64) -> Result<TowerReport> {
    tower_report_capped(curve, depth, ell, DEFAULT_CAP)
}

pub fn tower_report_capped(curve: &HyperellipticCurve, depth: u32, ell: u64, cap: u64) -> Result<TowerReport> {
    let poly = zeta::frob_charpoly_capped(curve, cap)?;
    let two_torsion = if ell == 2 { Some(two_torsion_field(curve)) } else { None };
    tower_from_poly(&poly, depth, ell, two_torsion)
}

/// Tower over a known characteristic polynomial; `two_torsion` is the degree
/// of the 2-torsion field when known.
pub fn tower_from_poly(poly: &FrobCharPoly, depth: u32, ell: u64, two_torsion: Option<u64>) -> Result<TowerReport> {
    if depth > MAX_TOWER_DEPTH {
        return Err(Error::InvalidArgument(format!("depth must be at most {MAX_TOWER_DEPTH}")));
    }
    if !nt::is_prime(ell) {
        return Err(Error::InvalidArgument(format!("{ell} is not prime")));
    }
    let q = poly
        .q()
        .to_u64()
        .ok_or_else(|| Error::InvalidArgument("base field too large".into()))?;
    let g = poly.g();
    let lb = BigInt::from(ell);
    let mut levels: Vec<TowerLevel> = Vec::new();
    let mut degree = 1u64;
    for i in 0..=depth {
        if i > 0 {
            degree *= ell;
        }
        let order = poly.group_order(degree as u32);
        let valuation = big_valuation(&order, &lb);
        let torsion_rational = match two_torsion {
            Some(n) if ell == 2 => Some(degree.is_multiple_of(n)),
            _ => None,
        };
        if let Some(prev) = levels.last_mut() {
            prev.jump = Some(valuation - prev.valuation);
            prev.divides_next = Some((&order % &prev.order).is_zero());
            if prev.torsion_rational == Some(true) {
                let jump = valuation - prev.valuation;
                prev.jump_at_least_2g = Some(jump as usize >= 2 * g);
                prev.jump_equals_2g = Some(jump as usize == 2 * g);
            }
        }
        levels.push(TowerLevel {
            degree,
            order,
            valuation,
            torsion_rational,
            jump: None,
            divides_next: None,
            jump_at_least_2g: None,
            jump_equals_2g: None,
        });
    }
    Ok(TowerReport {
        q,
        genus: g,
        ell,
        depth,
        levels,
    })
}

fn big_valuation(n: &BigInt, l: &BigInt) -> u32 {
    if n.is_zero() {
        return u32::MAX;
    }
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (d, r) = n.div_rem(l);
        if !r.is_zero() {
            return v;
        }
        n = d;
        v += 1;
    }
}

/// Smallest `n` with `J[2]` rational over `F_{q^n}`: the lcm of the degrees
/// of the irreducible factors of `f`.
pub fn two_torsion_field(curve: &HyperellipticCurve) -> u64 {
    poly::distinct_degree_factorization(curve.base(), curve.f())
        .iter()
        .fold(1, |acc, &(d, _)| nt::lcm(acc, d as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::parse_curve_spec;
    use crate::ff::FieldElement;
    use crate::jacgrp::enumerate_jacobian;

    fn curve(s: &str) -> HyperellipticCurve {
        parse_curve_spec(s).unwrap()
    }

    #[test]
    fn c_minus_paths_agree() {
        for spec in [
            "p=5; f=x^5+x",
            "p=3; f=x^5+x^3+x^2-x-1",
            "p=7; f=x^5+3x+2",
            "p=3; ext=2; f=x^5+x^3+x^2-x-1",
            "p=11; f=0,4,0,-5,0,1",
        ] {
            let c = curve(spec);
            let rep = c_minus_set(&c).unwrap();
            assert!(rep.paths_agree, "{spec}");
            // brute force: #C- = 1 + sum over x in F_q of (1 - chi(f(x)))
            let k = c.base();
            let mut expect = 1;
            for x in k.elements() {
                let fx = poly::eval(k, c.f(), x);
                expect += if fx.is_zero() { 1 } else if k.is_square(fx) { 0 } else { 2 };
            }
            assert_eq!(rep.size, expect, "{spec}");
        }
    }

    #[test]
    fn c_minus_weierstrass_and_square_values() {
        let c = curve("p=11; f=0,4,0,-5,0,1");
        let rep = c_minus_set(&c).unwrap();
        let jac = Jacobian::new(&c, 2).unwrap();
        let k = jac.field();
        for x in [0i64, 1, -1, 2, -2] {
            let w = CurvePoint::Affine {
                x: k.from_int(x),
                y: FieldElement::ZERO,
            };
            assert!(rep.members.contains(&w));
        }
        // f(3) = 3 * 2 * 4 * 1 * 5 = 120 = 10 mod 11, a nonsquare; f(4) = 4*3*5*2*6 = 720 = 5, a square
        let base = c.base();
        assert!(!base.is_square(base.from_int(10)));
        assert!(base.is_square(base.from_int(5)));
        let y = k.sqrt(k.from_int(5)).unwrap();
        let pt = CurvePoint::Affine { x: k.from_int(4), y };
        assert!(!rep.members.contains(&pt));
        let sum = jac.add(&jac.point_class(&pt).unwrap(), &jac.point_class(&pt).unwrap()).unwrap();
        assert!(!sum.is_identity());
    }

    #[test]
    fn c_minus_size_for_quintic_plus_linear() {
        let rep = c_minus_set(&curve("p=5; f=x^5+x")).unwrap();
        assert!(rep.within_bound);
        assert!((rep.deviation as f64) <= 4.0 * 5f64.sqrt());
    }

    #[test]
    fn generation_without_exclusion() {
        for spec in ["p=3; f=x^5+x^3+x^2-x-1", "p=5; f=x^5+x+1"] {
            let c = curve(spec);
            let rep = generation_check(&c, &Exclusion::Points(vec![])).unwrap();
            assert_eq!(rep.index, 1, "{spec}");
            assert_eq!(rep.epsilon, 0.0);
            assert_eq!(rep.bound, 96.0);
        }
    }

    #[test]
    fn generation_reduced_generators_match_all_pairs() {
        let c = curve("p=3; f=x^5+x^3+x^2-x-1");
        let table = enumerate_jacobian(&c, 2).unwrap();
        let jac = table.jacobian();
        let minus = c_minus_set(&c).unwrap().members;
        let rest: Vec<_> = c.enumerate_points(2).unwrap().into_iter().filter(|p| !minus.contains(p)).collect();
        let mut gens = Vec::new();
        for a in &rest {
            for b in &rest {
                gens.push(jac.add(&jac.point_class(a).unwrap(), &jac.point_class(b).unwrap()).unwrap());
            }
        }
        let full = subgroup_generated(&gens, &table).unwrap();
        let rep = generation_check(&c, &Exclusion::CMinus).unwrap();
        assert_eq!(rep.index, full.index);
        assert_eq!(rep.excluded, minus.len());
    }

    #[test]
    fn generation_empty_complement() {
        let c = curve("p=3; f=x^5+x^3+x^2-x-1");
        let all = c.enumerate_points(2).unwrap();
        assert_eq!(generation_check(&c, &Exclusion::Points(all)).unwrap_err(), Error::EmptyComplement);
    }

    #[test]
    fn tower_split_quintic() {
        let c = curve("p=11; f=0,4,0,-5,0,1");
        assert_eq!(two_torsion_field(&c), 1);
        let rep = tower_report(&c, 3, 2).unwrap();
        assert!(rep.consistent());
        let l0 = &rep.levels[0];
        assert_eq!(l0.torsion_rational, Some(true));
        assert!(l0.jump.unwrap() >= 4);
        assert_eq!(l0.jump_at_least_2g, Some(true));
    }

    #[test]
    fn tower_depth_zero_and_divisibility() {
        let c = curve("p=3; f=x^5+x^3+x^2-x-1");
        let rep = tower_report(&c, 0, 2).unwrap();
        assert_eq!(rep.levels.len(), 1);
        assert_eq!(zeta::frob_charpoly(&c).unwrap().group_order(1), rep.levels[0].order);
        let rep = tower_report(&c, 10, 2).unwrap();
        assert!(rep.levels.iter().take(10).all(|l| l.divides_next == Some(true)));
        let rep = tower_report(&c, 3, 5).unwrap();
        assert_eq!(rep.levels[3].degree, 125);
        assert!(rep.levels.iter().all(|l| l.torsion_rational.is_none()));
        assert!(tower_report(&c, 11, 2).is_err());
    }

    #[test]
    fn two_torsion_degrees() {
        // x^5 - x + 1 is irreducible over F_5 (Artin-Schreier)
        assert_eq!(two_torsion_field(&curve("p=5; f=x^5-x+1")), 5);
        // (x^2 + 1)(x^3 - x + 1) over F_3
        assert_eq!(two_torsion_field(&curve("p=3; f=x^5+x^2-x+1")), 6);
    }
}
