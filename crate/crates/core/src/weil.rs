//! Multiplicative relations between Weil numbers: rank-one tests for pairs
//! of roots, matching of eigenvalue classes between two polynomials, and the
//! base change that kills root-of-unity ratios.
//!
//! Roots are approximated numerically in log-polar form; every positive
//! conclusion is re-certified by an identity between integer polynomials.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::intpoly::{self, IntPoly};
use crate::nt;
use crate::zeta::{power_poly, FrobCharPoly};

/// Numeric tolerance for equality of powered roots (log-polar distance).
pub const TOLERANCE: f64 = 1e-9;

/// Default bound on the exponents searched.
pub const DEFAULT_EXPONENT_BOUND: u32 = 24;

/// Largest exponent bound accepted by [`rank_one_test`].
pub const MAX_EXPONENT_BOUND: u32 = 32;

/// Largest base-change bound accepted by [`torsion_free_basechange`].
pub const MAX_BASECHANGE_BOUND: u32 = 64;

fn serialize_complex<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(2))?;
    seq.serialize_element(&z.re)?;
    seq.serialize_element(&z.im)?;
    seq.end()
}

/// Distinct roots of a Frobenius polynomial with exact multiplicities, sorted
/// by argument, and the involution `alpha <-> q / alpha` on them.
#[derive(Clone, Debug)]
pub struct WeilRootSet {
    poly: FrobCharPoly,
    roots: Vec<(Complex64, usize)>,
    pairing: Vec<usize>,
}

impl WeilRootSet {
    pub fn new(poly: &FrobCharPoly) -> WeilRootSet {
        let roots = intpoly::complex_roots(&poly.ascending());
        let q = poly.q().to_f64().unwrap_or(f64::INFINITY);
        let pairing = roots
            .iter()
            .map(|(z, _)| {
                let target = Complex64::new(q, 0.0) / z;
                (0..roots.len())
                    .min_by(|&i, &j| {
                        let di = (roots[i].0 - target).norm();
                        let dj = (roots[j].0 - target).norm();
                        di.total_cmp(&dj)
                    })
                    .unwrap()
            })
            .collect();
        WeilRootSet {
            poly: poly.clone(),
            roots,
            pairing,
        }
    }

    pub fn poly(&self) -> &FrobCharPoly {
        &self.poly
    }

    pub fn roots(&self) -> &[(Complex64, usize)] {
        &self.roots
    }

    /// `pairing()[i]` is the index of `q / alpha_i`.
    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Log-polar distance between `z1^a` and `z2^b`.
fn power_distance(z1: Complex64, a: u32, z2: Complex64, b: u32) -> f64 {
    let dl = a as f64 * z1.norm().ln() - b as f64 * z2.norm().ln();
    let da = wrap_angle(a as f64 * z1.arg() - b as f64 * z2.arg());
    dl.abs() + da.abs()
}

/// Three-way numeric decision: equal, different, or too close to call.
fn numeric_equal(d: f64) -> Result<bool> {
    if d <= TOLERANCE {
        Ok(true)
    } else if d <= 10.0 * TOLERANCE {
        Err(Error::PrecisionInsufficient(d))
    } else {
        Ok(false)
    }
}

/// Exponent pairs `1 <= a, b <= bound` ordered by `(a + b, a)`.
fn exponent_pairs(bound: u32) -> impl Iterator<Item = (u32, u32)> {
    (2..=2 * bound).flat_map(move |s| {
        (1..s)
            .filter(move |&a| a <= bound && s - a <= bound)
            .map(move |a| (a, s - a))
    })
}

/// Outcome of [`rank_one_test`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RankOne {
    /// `alpha_i^a = alpha~_j^b`, certified.
    Witness { a: u32, b: u32 },
    /// No relation with exponents up to the bound.
    RankTwo { bound: u32 },
}

/// Whether `alpha^a` (a root of `P^(a)`) is certified to equal `beta^b`:
/// the two powered polynomials must share a factor having that value as a root.
fn certify_pair(s: &WeilRootSet, i: usize, a: u32, t: &WeilRootSet, j: usize, b: u32) -> bool {
    let pa = power_poly(&s.poly.ascending(), a);
    let pb = power_poly(&t.poly.ascending(), b);
    let g = intpoly::gcd(&pa, &pb);
    if intpoly::degree(&g).unwrap_or(0) == 0 {
        return false;
    }
    let target = s.roots[i].0;
    let other = t.roots[j].0;
    intpoly::complex_roots(&g).iter().any(|(r, _)| {
        power_distance(*r, 1, target, a) < 1e-6 && power_distance(*r, 1, other, b) < 1e-6
    })
}

/// Smallest `(a, b)` in `(a + b, a)` order with `alpha_i^a = alpha~_j^b`.
pub fn rank_one_test(s: &WeilRootSet, i: usize, t: &WeilRootSet, j: usize, bound: u32) -> Result<RankOne> {
    if !(1..=MAX_EXPONENT_BOUND).contains(&bound) {
        return Err(Error::InvalidArgument(format!(
            "exponent bound must lie in 1..={MAX_EXPONENT_BOUND}"
        )));
    }
    if i >= s.len() || j >= t.len() {
        return Err(Error::InvalidArgument("root index out of range".into()));
    }
    let (x, y) = (s.roots[i].0, t.roots[j].0);
    for (a, b) in exponent_pairs(bound) {
        if numeric_equal(power_distance(x, a, y, b))? && certify_pair(s, i, a, t, j, b) {
            return Ok(RankOne::Witness { a, b });
        }
    }
    Ok(RankOne::RankTwo { bound })
}

/// A class of equal roots.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootClass {
    pub mult: usize,
    #[serde(serialize_with = "serialize_complex")]
    pub root: Complex64,
}

/// Equal-value classes of both root multisets, matched under a single
/// exponent pair: `alpha^a` for the first set against `alpha~^b` for the second.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassPartition {
    pub a: u32,
    pub b: u32,
    pub classes: Vec<RootClass>,
    pub other: Vec<RootClass>,
    /// For each class of the first set, the classes of the second whose
    /// `b`-th powers equal its `a`-th power.
    pub matching: Vec<Vec<usize>>,
}

impl ClassPartition {
    /// The ratio `u = a / b` in lowest terms.
    pub fn ratio(&self) -> (u32, u32) {
        let g = nt::gcd(self.a as u64, self.b as u64) as u32;
        (self.a / g, self.b / g)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchFailure {
    /// Index of the first class of the first set that could not be matched.
    pub class: usize,
    #[serde(serialize_with = "serialize_complex")]
    pub root: Complex64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ClassOutcome {
    Matched(ClassPartition),
    Unmatched(MatchFailure),
}

impl ClassOutcome {
    pub fn matched(&self) -> Option<&ClassPartition> {
        match self {
            ClassOutcome::Matched(c) => Some(c),
            ClassOutcome::Unmatched(_) => None,
        }
    }
}

fn classes_of(set: &WeilRootSet) -> Vec<RootClass> {
    set.roots
        .iter()
        .map(|&(root, mult)| RootClass { root, mult })
        .collect()
}

/// Clusters of `(z^e, mult)` values that agree numerically.
fn powered_clusters(set: &WeilRootSet, e: u32) -> Result<Vec<(usize, usize)>> {
    // (representative index, total multiplicity)
    let mut clusters: Vec<(usize, usize)> = Vec::new();
    for (i, &(z, m)) in set.roots.iter().enumerate() {
        let mut found = None;
        for (c, &(rep, _)) in clusters.iter().enumerate() {
            if numeric_equal(power_distance(z, e, set.roots[rep].0, e))? {
                found = Some(c);
                break;
            }
        }
        match found {
            Some(c) => clusters[c].1 += m,
            None => clusters.push((i, m)),
        }
    }
    Ok(clusters)
}

/// Whether the `a`-th powers of the first multiset agree numerically with
/// the `b`-th powers of the second.
fn multisets_agree(s: &WeilRootSet, a: u32, t: &WeilRootSet, b: u32) -> Result<bool> {
    let cs = powered_clusters(s, a)?;
    let ct = powered_clusters(t, b)?;
    if cs.len() != ct.len() {
        return Ok(false);
    }
    let mut used = vec![false; ct.len()];
    for &(ri, mi) in &cs {
        let mut hit = false;
        for (c, &(rj, mj)) in ct.iter().enumerate() {
            if !used[c] && numeric_equal(power_distance(s.roots[ri].0, a, t.roots[rj].0, b))? {
                if mi != mj {
                    return Ok(false);
                }
                used[c] = true;
                hit = true;
                break;
            }
        }
        if !hit {
            return Ok(false);
        }
    }
    Ok(true)
}

fn same_characteristic(p: &FrobCharPoly, q: &FrobCharPoly) -> Result<()> {
    let (a, b) = (p.characteristic(), q.characteristic());
    match (a, b) {
        (Some(x), Some(y)) if x == y => Ok(()),
        (Some(x), Some(y)) => Err(Error::CharacteristicMismatch(x, y)),
        _ => Err(Error::InvalidArgument("field size is not a prime power".into())),
    }
}

/// Partitions both root multisets into equal-value classes and looks for
/// one exponent pair `(a, b)` under which the multisets coincide, certified
/// by `charpoly_power(P, a) == charpoly_power(P~, b)`.
pub fn eigenvalue_classes(p: &FrobCharPoly, other: &FrobCharPoly, bound: u32) -> Result<ClassOutcome> {
    same_characteristic(p, other)?;
    let s = WeilRootSet::new(p);
    let t = WeilRootSet::new(other);
    for (a, b) in exponent_pairs(bound) {
        if !multisets_agree(&s, a, &t, b)? {
            continue;
        }
        let pa = power_poly(&p.ascending(), a);
        let pb = power_poly(&other.ascending(), b);
        if pa != pb {
            continue;
        }
        let matching = s
            .roots
            .iter()
            .map(|&(z, _)| {
                t.roots
                    .iter()
                    .enumerate()
                    .filter(|(_, &(w, _))| power_distance(z, a, w, b) <= TOLERANCE)
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        return Ok(ClassOutcome::Matched(ClassPartition {
            a,
            b,
            classes: classes_of(&s),
            other: classes_of(&t),
            matching,
        }));
    }
    // locate the first class without any individual partner
    for (i, &(z, _)) in s.roots.iter().enumerate() {
        let mut any = false;
        for j in 0..t.len() {
            if let RankOne::Witness { .. } = rank_one_test(&s, i, &t, j, bound.min(MAX_EXPONENT_BOUND))? {
                any = true;
                break;
            }
        }
        if !any {
            return Ok(ClassOutcome::Unmatched(MatchFailure {
                class: i,
                root: z,
                reason: format!("no root of the second polynomial is related with exponents <= {bound}"),
            }));
        }
    }
    Ok(ClassOutcome::Unmatched(MatchFailure {
        class: 0,
        root: s.roots.first().map_or(Complex64::new(0.0, 0.0), |r| r.0),
        reason: format!("no single exponent pair <= {bound} aligns all classes"),
    }))
}

/// Orders searched when deciding whether a ratio is a root of unity; a
/// ratio of two Weil numbers of degree at most 8 has order well below this.
const UNITY_ORDER_LIMIT: u32 = 1000;

/// Smallest order `r <= bound` of `rho` as a root of unity, if any.
fn root_of_unity_order(rho: Complex64, bound: u32) -> Result<Option<u32>> {
    if !numeric_equal(rho.norm().ln().abs())? {
        return Ok(None);
    }
    let theta = rho.arg();
    for r in 1..=bound {
        let d = wrap_angle(r as f64 * theta).abs();
        if d <= TOLERANCE * r as f64 {
            return Ok(Some(r));
        }
        if d <= 10.0 * TOLERANCE * r as f64 {
            return Err(Error::PrecisionInsufficient(d));
        }
    }
    Ok(None)
}

fn distinct_root_count(p: &[num_bigint::BigInt]) -> usize {
    intpoly::degree(&intpoly::squarefree_part(p)).unwrap_or(0)
}

/// Smallest `n <= bound` after which no ratio of distinct tracked roots
/// (within and across the two sets) is a nontrivial root of unity.
///
/// The numeric candidate is confirmed exactly: the number of distinct roots
/// of the `n`-th power polynomial must not drop for any further power `n t`
/// with `n t <= bound`.
pub fn torsion_free_basechange(p: &FrobCharPoly, other: &FrobCharPoly, bound: u32) -> Result<u32> {
    if !(1..=MAX_BASECHANGE_BOUND).contains(&bound) {
        return Err(Error::InvalidArgument(format!(
            "base-change bound must lie in 1..={MAX_BASECHANGE_BOUND}"
        )));
    }
    same_characteristic(p, other)?;
    let s = WeilRootSet::new(p);
    let t = WeilRootSet::new(other);
    let all: Vec<Complex64> = s.roots.iter().chain(&t.roots).map(|r| r.0).collect();
    let mut n = 1u32;
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if let Some(r) = root_of_unity_order(all[i] / all[j], UNITY_ORDER_LIMIT)? {
                n = nt::lcm(n as u64, r as u64).min(u32::MAX as u64) as u32;
            }
        }
    }
    // exact confirmation on the product polynomial (or each factor when the
    // field sizes differ, since then no cross ratio has modulus one)
    let polys: Vec<IntPoly> = if p.q() == other.q() {
        vec![intpoly::mul(&p.ascending(), &other.ascending())]
    } else {
        vec![p.ascending(), other.ascending()]
    };
    loop {
        if n > bound {
            return Err(Error::BoundExceeded(bound));
        }
        let mut collapse = None;
        'search: for poly in &polys {
            let base = distinct_root_count(&power_poly(poly, n));
            for t in 2..=bound / n {
                if distinct_root_count(&power_poly(poly, n * t)) < base {
                    collapse = Some(t);
                    break 'search;
                }
            }
        }
        match collapse {
            None => return Ok(n),
            Some(t) => n *= t,
        }
    }
}

/// JSON summary of a class matching.
#[derive(Clone, Debug, Serialize)]
pub struct ClassReport {
    pub classes: Vec<RootClass>,
    #[serde(rename = "match")]
    pub matched: Option<ExponentPair>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExponentPair {
    pub a: u32,
    pub b: u32,
}

impl ClassReport {
    pub fn new(outcome: &ClassOutcome, p: &FrobCharPoly) -> ClassReport {
        match outcome {
            ClassOutcome::Matched(c) => ClassReport {
                classes: c.classes.clone(),
                matched: Some(ExponentPair { a: c.a, b: c.b }),
            },
            ClassOutcome::Unmatched(_) => ClassReport {
                classes: classes_of(&WeilRootSet::new(p)),
                matched: None,
            },
        }
    }
}
