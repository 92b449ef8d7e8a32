//! Frobenius characteristic polynomials from point counts, and the exact
//! Jacobian order sequence `F(n) = prod (alpha_j^n - 1)`.
//!
//! Convention: `P(T) = prod (T - alpha_j) = T^{2g} + a_1 T^{2g-1} + ... + a_{2g}`
//! where the `alpha_j` are the Frobenius eigenvalues, so that
//! `#C(F_{q^n}) = q^n + 1 - sum alpha_j^n`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::curve::{HyperellipticCurve, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::intpoly::{self, IntPoly};

/// Absolute tolerance on `| |alpha| - sqrt(q) |`.
pub const ROOT_TOLERANCE: f64 = 1e-9;

/// Integer characteristic polynomial of Frobenius over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FrobCharPoly {
    #[serde(serialize_with = "crate::json::big")]
    q: BigInt,
    g: usize,
    /// `a_0 = 1, a_1, ..., a_{2g}`.
    #[serde(serialize_with = "crate::json::big_vec")]
    coeffs: Vec<BigInt>,
}

impl FrobCharPoly {
    /// Wraps coefficients `a_0..a_{2g}` without validation.
    pub fn from_coeffs(q: impl Into<BigInt>, coeffs: Vec<BigInt>) -> FrobCharPoly {
        let g = coeffs.len().saturating_sub(1) / 2;
        FrobCharPoly {
            q: q.into(),
            g,
            coeffs,
        }
    }

    /// From ascending integer coefficients (must be monic of even degree).
    pub fn from_ascending(q: impl Into<BigInt>, poly: &[BigInt]) -> FrobCharPoly {
        let coeffs: Vec<BigInt> = poly.iter().rev().cloned().collect();
        FrobCharPoly::from_coeffs(q, coeffs)
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn g(&self) -> usize {
        self.g
    }

    /// The prime `p` with `q = p^k`, if `q` is a prime power.
    pub fn characteristic(&self) -> Option<u64> {
        if let Some(q) = self.q.to_u64() {
            return crate::nt::prime_power(q).map(|(p, _)| p);
        }
        // q = q0^n for a base-changed polynomial; its smallest prime factor is p
        let mut p = 2u64;
        while p < 1 << 20 {
            let pb = BigInt::from(p);
            if (&self.q % &pb).is_zero() {
                let mut rest = self.q.clone();
                while (&rest % &pb).is_zero() {
                    rest /= &pb;
                }
                return rest.is_one().then_some(p);
            }
            p += 1;
        }
        None
    }

    /// `a_0..a_{2g}`.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Ascending coefficient vector of `P(T)`.
    pub fn ascending(&self) -> IntPoly {
        self.coeffs.iter().rev().cloned().collect()
    }

    /// Point counts `N_1..N_{n_max}` predicted by the polynomial.
    pub fn predicted_counts(&self, n_max: usize) -> Vec<BigInt> {
        let s = intpoly::power_sums(&self.ascending(), n_max);
        s.iter()
            .enumerate()
            .map(|(i, si)| self.q.clone().pow(i as u32 + 1) + 1 - si)
            .collect()
    }

    /// `F(n) = #J(F_{q^n})`.
    pub fn group_order(&self, n: u32) -> BigInt {
        group_order(self, n)
    }

    /// Human-readable form such as `T^4 + 3T^2 + 9`.
    pub fn display(&self) -> String {
        let n = self.coeffs.len() - 1;
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let deg = n - i;
            let sign = if c.is_negative() { "-" } else { "+" };
            let abs = c.abs();
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            let coef = if abs.is_one() && deg > 0 { String::new() } else { abs.to_string() };
            match deg {
                0 => out.push_str(&coef),
                1 => out.push_str(&format!("{coef}T")),
                _ => out.push_str(&format!("{coef}T^{deg}")),
            }
        }
        out
    }
}

fn weil_bound_ok(n_count: u64, q: &BigInt, n: u32, g: usize) -> bool {
    let qn = q.clone().pow(n);
    let dev = BigInt::from(n_count) - &qn - 1;
    // (N - q^n - 1)^2 <= 4 g^2 q^n
    &dev * &dev <= BigInt::from(4 * g * g) * qn
}

/// Frobenius polynomial from the counts `N_1..N_g` of a genus-`g` curve over `F_q`.
pub fn charpoly_from_counts(counts: &[u64], q: u64, g: usize) -> Result<FrobCharPoly> {
    if counts.len() < g {
        return Err(Error::InvalidArgument(format!(
            "need {g} point counts, got {}",
            counts.len()
        )));
    }
    let qb = BigInt::from(q);
    for (i, &n_count) in counts[..g].iter().enumerate() {
        if !weil_bound_ok(n_count, &qb, i as u32 + 1, g) {
            return Err(Error::WeilBoundViolated(i as u32 + 1));
        }
    }
    let s: Vec<BigInt> = counts[..g]
        .iter()
        .enumerate()
        .map(|(i, &n_count)| qb.clone().pow(i as u32 + 1) + 1 - BigInt::from(n_count))
        .collect();
    let low = intpoly::from_power_sums(&s, g).map_err(Error::NonIntegralCoefficient)?;
    // low is ascending of degree g; a_i = low[g - i]
    let mut coeffs = vec![BigInt::zero(); 2 * g + 1];
    for i in 0..=g {
        coeffs[i] = low[g - i].clone();
    }
    for i in 0..g {
        coeffs[2 * g - i] = qb.clone().pow((g - i) as u32) * &coeffs[i];
    }
    let poly = FrobCharPoly::from_coeffs(qb.clone(), coeffs);
    let report = weil_check(&poly.ascending(), &qb);
    if !report.pass {
        return Err(Error::RootModulusViolated(report.max_root_dev));
    }
    Ok(poly)
}

/// Counts points over `F_{q^n}`, `n = 1..g`, and assembles the Frobenius polynomial.
pub fn frob_charpoly(curve: &HyperellipticCurve) -> Result<FrobCharPoly> {
    frob_charpoly_capped(curve, DEFAULT_CAP)
}

pub fn frob_charpoly_capped(curve: &HyperellipticCurve, cap: u64) -> Result<FrobCharPoly> {
    let g = curve.genus();
    let counts = (1..=g as u32)
        .map(|n| curve.count_points_capped(n, cap))
        .collect::<Result<Vec<_>>>()?;
    charpoly_from_counts(&counts, curve.q(), g)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeilReport {
    pub functional_eq: bool,
    pub max_root_dev: f64,
    pub pass: bool,
}

/// Functional equation (exact) and root moduli (numeric) of a monic
/// even-degree integer polynomial, given in ascending order.
pub fn weil_check(poly: &[BigInt], q: &BigInt) -> WeilReport {
    let deg = poly.len().saturating_sub(1);
    let monic = intpoly::is_monic(poly);
    let functional_eq = monic && deg.is_multiple_of(2) && {
        let g = deg / 2;
        let a = |i: usize| &poly[deg - i];
        (0..=g).all(|i| *a(2 * g - i) == q.clone().pow((g - i) as u32) * a(i))
    };
    let sqrt_q = q.to_f64().unwrap_or(f64::INFINITY).sqrt();
    let max_root_dev = if poly.len() < 2 {
        0.0
    } else {
        intpoly::complex_roots(poly)
            .iter()
            .map(|(z, _)| (z.norm() - sqrt_q).abs())
            .fold(0.0, f64::max)
    };
    let tol = ROOT_TOLERANCE * sqrt_q.max(1.0);
    WeilReport {
        functional_eq,
        max_root_dev,
        pass: monic && functional_eq && max_root_dev <= tol,
    }
}

/// `F(n) = Res_T(P(T), T^n - 1)`, computed as the determinant of
/// multiplication by `T^n - 1` on `Z[T]/P`.
pub fn group_order(poly: &FrobCharPoly, n: u32) -> BigInt {
    let p = poly.ascending();
    let xn = intpoly::x_pow_mod(n as u64, &p);
    let r = intpoly::sub(&xn, &[BigInt::one()]);
    intpoly::resultant_monic(&p, &r)
}

/// Values `F(1..n_max)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderSequence {
    pub poly: FrobCharPoly,
    #[serde(serialize_with = "crate::json::big_map")]
    pub values: BTreeMap<u32, BigInt>,
}

pub fn group_order_seq(poly: &FrobCharPoly, n_max: u32) -> OrderSequence {
    let values = (1..=n_max).map(|n| (n, group_order(poly, n))).collect();
    OrderSequence {
        poly: poly.clone(),
        values,
    }
}

/// Characteristic polynomial of `M^n`, `M` the companion matrix of `P`;
/// the Frobenius polynomial of the base change to `F_{q^n}`.
pub fn charpoly_power(poly: &FrobCharPoly, n: u32) -> FrobCharPoly {
    assert!(n >= 1, "power must be positive");
    if n == 1 {
        return poly.clone();
    }
    let cp = power_poly(&poly.ascending(), n);
    FrobCharPoly::from_ascending(poly.q.clone().pow(n), &cp)
}

/// Monic polynomial whose roots are the `n`-th powers of the roots of `p`.
pub(crate) fn power_poly(p: &[BigInt], n: u32) -> IntPoly {
    let xn = intpoly::x_pow_mod(n as u64, p);
    let m = intpoly::multiplication_matrix(&xn, p);
    intpoly::charpoly(&m)
}

/// The JSON document emitted for a curve's zeta data.
#[derive(Clone, Debug, Serialize)]
pub struct ZetaReport {
    #[serde(serialize_with = "crate::json::big")]
    pub q: BigInt,
    pub g: usize,
    #[serde(serialize_with = "crate::json::big_vec")]
    pub charpoly: Vec<BigInt>,
    #[serde(serialize_with = "crate::json::big_map")]
    pub orders: BTreeMap<u32, BigInt>,
    pub weil: WeilReport,
}

impl ZetaReport {
    pub fn new(poly: &FrobCharPoly, n_max: u32) -> ZetaReport {
        let seq = group_order_seq(poly, n_max);
        ZetaReport {
            q: poly.q.clone(),
            g: poly.g,
            charpoly: poly.coeffs.clone(),
            orders: seq.values,
            weil: weil_check(&poly.ascending(), &poly.q),
        }
    }
}
