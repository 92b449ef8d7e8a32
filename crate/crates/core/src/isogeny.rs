//! Isogeny evidence for pairs of Jacobians: Tate's criterion after a common
//! base change, divisibility of order sequences, and a pipeline from curves.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::curve::{HyperellipticCurve, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::weil::{self, ClassOutcome, ClassReport};
use crate::zeta::{self, charpoly_power, FrobCharPoly};

pub const DEFAULT_NMAX: u32 = 6;
pub const DEFAULT_DIVISIBILITY: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Isogenous,
    NotProven,
}

/// One comparison of base-changed polynomials over `F_{p^n}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TateComparison {
    pub m: u32,
    /// Degree over the prime field of the common extension.
    pub n: u32,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivisibilityEvidence {
    pub n_max: u32,
    /// `divides[n - 1]` is `F(n) | F~(n)`.
    pub divides: Vec<bool>,
    pub holds: usize,
    pub fails: usize,
    pub first_failure: Option<u32>,
    pub note: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsogenyCertificate {
    pub verdict: Verdict,
    /// Degree over the prime field at which the polynomials first agree.
    pub base_change: Option<u32>,
    #[serde(serialize_with = "serialize_opt_poly")]
    pub charpoly: Option<FrobCharPoly>,
    pub comparisons: Vec<TateComparison>,
    pub divisibility: Option<DivisibilityEvidence>,
    pub classes: Option<ClassReport>,
}

fn serialize_opt_poly<S: serde::Serializer>(p: &Option<FrobCharPoly>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match p {
        Some(p) => crate::json::big_vec(p.coeffs(), s),
        None => s.serialize_none(),
    }
}

/// `(p, k)` with `q = p^k`.
fn field_exponent(p: &FrobCharPoly) -> Result<(u64, u32)> {
    let c = p
        .characteristic()
        .ok_or_else(|| Error::InvalidArgument("field size is not a prime power".into()))?;
    let pb = BigInt::from(c);
    let mut k = 0;
    let mut q = p.q().clone();
    while !q.is_one() {
        q /= &pb;
        k += 1;
    }
    Ok((c, k))
}

fn compatible(p: &FrobCharPoly, other: &FrobCharPoly) -> Result<(u32, u32)> {
    let (pa, a) = field_exponent(p)?;
    let (pb, b) = field_exponent(other)?;
    if pa != pb {
        return Err(Error::CharacteristicMismatch(pa, pb));
    }
    if p.g() != other.g() {
        return Err(Error::DimensionMismatch(2 * p.g(), 2 * other.g()));
    }
    Ok((a, b))
}

/// Compares `charpoly_power(P, L / a)` with `charpoly_power(P~, L / b)` for
/// `L = lcm(a, b) m`, `m = 1..n_max`; the first equality proves isogeny over
/// `F_{p^L}`.
pub fn tate_test(p: &FrobCharPoly, other: &FrobCharPoly, n_max: u32) -> Result<IsogenyCertificate> {
    let (a, b) = compatible(p, other)?;
    let base = a.lcm(&b);
    let mut comparisons = Vec::new();
    for m in 1..=n_max {
        let n = base * m;
        let lhs = charpoly_power(p, n / a);
        let rhs = charpoly_power(other, n / b);
        let equal = lhs == rhs;
        comparisons.push(TateComparison { m, n, equal });
        if equal {
            return Ok(IsogenyCertificate {
                verdict: Verdict::Isogenous,
                base_change: Some(n),
                charpoly: Some(lhs),
                comparisons,
                divisibility: None,
                classes: None,
            });
        }
    }
    Ok(IsogenyCertificate {
        verdict: Verdict::NotProven,
        base_change: None,
        charpoly: None,
        comparisons,
        divisibility: None,
        classes: None,
    })
}

/// `F(n) | F~(n)` for `n = 1..n_max`. The polynomials must be over the same
/// field. A finite scan is evidence only.
pub fn divisibility_scan(p: &FrobCharPoly, other: &FrobCharPoly, n_max: u32) -> DivisibilityEvidence {
    let divides: Vec<bool> = (1..=n_max)
        .map(|n| {
            let f = zeta::group_order(p, n);
            let g = zeta::group_order(other, n);
            !f.is_zero() && (g % f).is_zero()
        })
        .collect();
    let holds = divides.iter().filter(|&&d| d).count();
    DivisibilityEvidence {
        n_max,
        first_failure: divides.iter().position(|&d| !d).map(|i| i as u32 + 1),
        holds,
        fails: divides.len() - holds,
        divides,
        note: "a finite scan is evidence, not proof",
    }
}

/// Counts points on both curves, then runs class matching, Tate's test and a
/// divisibility scan over a common base field.
pub fn isogeny_pipeline(
    curve_a: &HyperellipticCurve,
    curve_b: &HyperellipticCurve,
    n_max: u32,
    div_max: u32,
) -> Result<IsogenyCertificate> {
    isogeny_pipeline_capped(curve_a, curve_b, n_max, div_max, DEFAULT_CAP)
}

pub fn isogeny_pipeline_capped(
    curve_a: &HyperellipticCurve,
    curve_b: &HyperellipticCurve,
    n_max: u32,
    div_max: u32,
    cap: u64,
) -> Result<IsogenyCertificate> {
    if curve_a.p() != curve_b.p() {
        return Err(Error::CharacteristicMismatch(curve_a.p(), curve_b.p()));
    }
    if curve_a.genus() != curve_b.genus() {
        return Err(Error::DimensionMismatch(2 * curve_a.genus(), 2 * curve_b.genus()));
    }
    let pa = zeta::frob_charpoly_capped(curve_a, cap)?;
    let pb = zeta::frob_charpoly_capped(curve_b, cap)?;
    certificate_from_polys(&pa, &pb, n_max, div_max)
}

/// The pipeline after point counting.
pub fn certificate_from_polys(
    pa: &FrobCharPoly,
    pb: &FrobCharPoly,
    n_max: u32,
    div_max: u32,
) -> Result<IsogenyCertificate> {
    let (a, b) = compatible(pa, pb)?;
    let common = a.lcm(&b);
    // class matching must see every exponent pair that Tate's test tries
    let bound = weil::DEFAULT_EXPONENT_BOUND.max(n_max * common / a.min(b));
    let classes = weil::eigenvalue_classes(pa, pb, bound)?;
    let mut cert = tate_test(pa, pb, n_max)?;
    let ca = charpoly_power(pa, common / a);
    let cb = charpoly_power(pb, common / b);
    let mut evidence = divisibility_scan(&ca, &cb, div_max);
    if cert.verdict == Verdict::Isogenous && matches!(classes, ClassOutcome::Unmatched(_)) {
        evidence.note = "class matching failed below the exponent bound although Tate's test passed";
    }
    cert.divisibility = Some(evidence);
    cert.classes = Some(ClassReport::new(&classes, pa));
    Ok(cert)
}
