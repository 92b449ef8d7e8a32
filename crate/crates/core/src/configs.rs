//! Torsion orders of point differences: order profiles, configurations
//! realizing prescribed orders, order signatures, the supertransversality
//! audit and the translation stabilizer of the embedded point set.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::curve::{validate_model, CurvePoint, HyperellipticCurve, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::ff::{ext_field, FieldElement};
use crate::jacgrp::{enumerate_jacobian_capped, Jacobian, MumfordDivisor};
use crate::nt;
use crate::zeta::{self, FrobCharPoly};

/// Orders above this are bucketed as "large" in signatures.
pub const DEFAULT_ORDER_CAP: u64 = 10_000;

/// Groups up to this size get a full table, and element orders are read
/// off multiplication maps instead of computed one by one.
const TABLE_ORDERS_LIMIT: u64 = 200_000;

/// Target orders `r_1..r_n`, each greater than one and prime to `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RnString(Vec<u64>);

impl RnString {
    pub fn new(entries: Vec<u64>, p: u64) -> Result<RnString> {
        if let Some(&bad) = entries.iter().find(|&&r| r <= 1 || r % p == 0) {
            return Err(Error::InvalidString(bad));
        }
        Ok(RnString(entries))
    }

    /// Parses `"2,3,5"`.
    pub fn parse(s: &str, p: u64) -> Result<RnString> {
        let entries = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad string entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        RnString::new(entries, p)
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Base point and points whose differences have the prescribed orders.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Configuration {
    pub base: CurvePoint,
    pub points: Vec<CurvePoint>,
    pub orders: Vec<u64>,
}

enum Oracle {
    Table(crate::jacgrp::JacobianGroupTable, Vec<u64>),
    Generic(Vec<(u64, u32)>),
}

/// All pairwise orders `ord([p_j - p_i])` on `C(F_{q^m})`.
pub struct PointOrders {
    jac: Jacobian,
    points: Vec<CurvePoint>,
    classes: Vec<MumfordDivisor>,
    /// `orders[i][j] = ord([p_j - p_i])`.
    orders: Vec<Vec<u64>>,
    group_order: u64,
}

impl PointOrders {
    pub fn compute(curve: &HyperellipticCurve, m: u32) -> Result<PointOrders> {
        PointOrders::compute_capped(curve, m, DEFAULT_CAP)
    }

    pub fn compute_capped(curve: &HyperellipticCurve, m: u32, cap: u64) -> Result<PointOrders> {
        let jac = Jacobian::new(curve, m)?;
        let points = curve.enumerate_points_capped(m, cap)?;
        let n = zeta::frob_charpoly_capped(curve, cap.saturating_mul(64))?.group_order(m);
        let group_order: u64 = (&n)
            .try_into()
            .map_err(|_| Error::FactorizationIncomplete(n.to_string()))?;
        let oracle = if group_order <= TABLE_ORDERS_LIMIT.min(cap) {
            let table = enumerate_jacobian_capped(curve, m, cap)?;
            let orders = table.element_orders();
            Oracle::Table(table, orders)
        } else {
            Oracle::Generic(nt::factorize(group_order)?)
        };
        let classes = points
            .iter()
            .map(|pt| jac.point_class(pt))
            .collect::<Result<Vec<_>>>()?;
        let k = points.len();
        let order_of = |d: &MumfordDivisor| -> Result<u64> {
            match &oracle {
                Oracle::Table(t, orders) => Ok(orders[t.index_of(d).expect("table holds every class")]),
                Oracle::Generic(f) => jac.element_order_factored(d, f),
            }
        };
        let upper: Vec<Vec<u64>> = (0..k)
            .into_par_iter()
            .map(|i| {
                (i + 1..k)
                    .map(|j| order_of(&jac.sub(&classes[j], &classes[i])?))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut orders = vec![vec![1u64; k]; k];
        for i in 0..k {
            for (off, &o) in upper[i].iter().enumerate() {
                let j = i + 1 + off;
                orders[i][j] = o;
                orders[j][i] = o;
            }
        }
        Ok(PointOrders {
            jac,
            points,
            classes,
            orders,
            group_order,
        })
    }

    pub fn jacobian(&self) -> &Jacobian {
        &self.jac
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    /// `F(m)`.
    pub fn group_order(&self) -> u64 {
        self.group_order
    }

    /// `ord([p_j - p_i])`.
    pub fn order(&self, i: usize, j: usize) -> u64 {
        self.orders[i][j]
    }

    pub fn index_of(&self, pt: &CurvePoint) -> Option<usize> {
        self.points.iter().position(|p| p == pt)
    }

    /// Class `[p_i - inf]`.
    pub fn class(&self, i: usize) -> &MumfordDivisor {
        &self.classes[i]
    }
}

/// `ord([c - c0])` for every `c` in `C(F_{q^m})`.
pub fn order_profile(curve: &HyperellipticCurve, m: u32, base: &CurvePoint) -> Result<Vec<(CurvePoint, u64)>> {
    let po = PointOrders::compute(curve, m)?;
    profile_from(&po, base)
}

pub fn profile_from(po: &PointOrders, base: &CurvePoint) -> Result<Vec<(CurvePoint, u64)>> {
    let i = po
        .index_of(base)
        .ok_or_else(|| Error::InvalidArgument(format!("base point {base} is not on the curve")))?;
    Ok(po.points.iter().enumerate().map(|(j, &pt)| (pt, po.order(i, j))).collect())
}

/// Every ordered tuple of distinct points realizing `string`, ordered by the
/// positions of `(x_0, x_1, ..., x_n)` in the canonical point order.
pub fn find_configurations(curve: &HyperellipticCurve, m: u32, string: &RnString) -> Result<Vec<Configuration>> {
    RnString::new(string.0.clone(), curve.p())?;
    let po = PointOrders::compute(curve, m)?;
    Ok(configurations_from(&po, string))
}

pub fn configurations_from(po: &PointOrders, string: &RnString) -> Vec<Configuration> {
    let k = po.points.len();
    let r = string.entries();
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(r.len());
    fn walk(po: &PointOrders, r: &[u64], base: usize, chosen: &mut Vec<usize>, out: &mut Vec<Configuration>) {
        let depth = chosen.len();
        if depth == r.len() {
            out.push(Configuration {
                base: po.points[base],
                points: chosen.iter().map(|&j| po.points[j]).collect(),
                orders: r.to_vec(),
            });
            return;
        }
        for j in 0..po.points.len() {
            if j != base && !chosen.contains(&j) && po.orders[base][j] == r[depth] {
                chosen.push(j);
                walk(po, r, base, chosen, out);
                chosen.pop();
            }
        }
    }
    for base in 0..k {
        walk(po, r, base, &mut chosen, &mut out);
    }
    out
}

/// Multiset of `ord([c - c'])` over all ordered pairs, including `c = c'`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Signature {
    pub counts: BTreeMap<u64, u64>,
    /// Pairs whose order exceeds the cap.
    pub large: u64,
}

impl Signature {
    /// SHA-256 of the canonical text form, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_string().as_bytes()))
    }
}

/// `order:count` pairs joined by commas, then `large:count`.
impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (o, c) in &self.counts {
            write!(f, "{o}:{c},")?;
        }
        write!(f, "large:{}", self.large)
    }
}

pub fn signature(curve: &HyperellipticCurve, m: u32, order_cap: u64) -> Result<Signature> {
    let po = PointOrders::compute(curve, m)?;
    Ok(signature_from(&po, order_cap))
}

pub fn signature_from(po: &PointOrders, order_cap: u64) -> Signature {
    let mut counts = BTreeMap::new();
    let mut large = 0;
    for row in &po.orders {
        for &o in row {
            if o > order_cap {
                large += 1;
            } else {
                *counts.entry(o).or_insert(0) += 1;
            }
        }
    }
    Signature { counts, large }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditEntry {
    pub base: CurvePoint,
    pub r: u64,
    pub r_prime: u64,
    /// Witnesses with `ord([x - base]) = r` and `ord([x' - base]) = r'`.
    pub witnesses: (CurvePoint, CurvePoint),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub genus: usize,
    /// Coprime realized pairs with `2g > (r - 1)(r' - 1)`.
    pub violations: Vec<AuditEntry>,
    /// Pairs with `2g = (r - 1)(r' - 1)`, where the bound is ambiguous.
    pub equality_cases: Vec<AuditEntry>,
}

pub fn supertransversality_audit(curve: &HyperellipticCurve, m: u32) -> Result<AuditReport> {
    let po = PointOrders::compute(curve, m)?;
    Ok(audit_from(&po))
}

pub fn audit_from(po: &PointOrders) -> AuditReport {
    let g = po.jac.genus() as u64;
    let p = po.jac.field().p();
    let mut violations = Vec::new();
    let mut equality_cases = Vec::new();
    for (i, row) in po.orders.iter().enumerate() {
        // first witness of each realized order
        let mut realized: BTreeMap<u64, usize> = BTreeMap::new();
        for (j, &o) in row.iter().enumerate() {
            if j != i {
                realized.entry(o).or_insert(j);
            }
        }
        let list: Vec<(u64, usize)> = realized.into_iter().collect();
        for (a, &(r, x)) in list.iter().enumerate() {
            for &(r2, x2) in &list[a + 1..] {
                if nt::gcd(r, r2) != 1 || r % p == 0 || r2 % p == 0 {
                    continue;
                }
                let twice_bound = (r - 1) * (r2 - 1);
                let entry = || AuditEntry {
                    base: po.points[i],
                    r,
                    r_prime: r2,
                    witnesses: (po.points[x], po.points[x2]),
                };
                if 2 * g > twice_bound {
                    violations.push(entry());
                } else if 2 * g == twice_bound {
                    equality_cases.push(entry());
                }
            }
        }
    }
    AuditReport {
        genus: g as usize,
        violations,
        equality_cases,
    }
}

/// Classes `a` with `a + S = S`, `S` the classes `[c - inf]` of `C(F_{q^m})`.
pub fn stabilizer_audit(curve: &HyperellipticCurve, m: u32) -> Result<Vec<MumfordDivisor>> {
    let jac = Jacobian::new(curve, m)?;
    let points = curve.enumerate_points(m)?;
    let set: Vec<MumfordDivisor> = points
        .iter()
        .map(|p| jac.point_class(p))
        .collect::<Result<_>>()?;
    let members: HashSet<&MumfordDivisor> = set.iter().collect();
    let mut out = Vec::new();
    // a + s_0 must lie in S, so a = s - s_0 for some s
    for s in &set {
        let a = jac.sub(s, &set[0])?;
        let mut ok = true;
        for t in &set {
            if !members.contains(&jac.add(&a, t)?) {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(a);
        }
    }
    out.sort_by_key(|d| (d.weight(), encode(d.u()), encode(d.v())));
    out.dedup();
    Ok(out)
}

fn encode(a: &[FieldElement]) -> Vec<u64> {
    a.iter().map(|c| c.encoding()).collect()
}

/// All smooth odd models `y^2 = f(x)` with `deg f = 2g + 1` over `F_p`, in
/// order of the coefficient vector read as a base-`p` number.
pub fn odd_models(p: u64, genus: usize) -> Result<Vec<HyperellipticCurve>> {
    let k = ext_field(p, 1)?;
    let deg = 2 * genus + 1;
    let total = p.pow(deg as u32) * (p - 1);
    let curves: Vec<Option<HyperellipticCurve>> = (0..total)
        .into_par_iter()
        .map(|code| {
            let mut c = code;
            let mut f: Vec<FieldElement> = (0..deg)
                .map(|_| {
                    let d = c % p;
                    c /= p;
                    k.from_int(d as i64)
                })
                .collect();
            f.push(k.from_int(c as i64 + 1));
            validate_model(&f, &k).ok()
        })
        .collect();
    Ok(curves.into_iter().flatten().collect())
}

/// One row of a curve scan.
#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub curve: String,
    pub p: u64,
    pub m: u32,
    #[serde(serialize_with = "crate::json::big_vec")]
    pub charpoly: Vec<BigInt>,
    #[serde(serialize_with = "crate::json::big")]
    pub f1: BigInt,
    #[serde(serialize_with = "crate::json::big")]
    pub f2: BigInt,
    pub signature_hash: String,
    pub violations: usize,
    pub equality_cases: usize,
}

type DedupKey = (Vec<BigInt>, Signature);

/// Audits every curve at `m = 1..=m_max`. With `dedup`, curves sharing
/// `(charpoly, signature at m = 1)` with an earlier curve are skipped; this
/// key is coarser than isomorphism.
pub fn scan(curves: &[HyperellipticCurve], m_max: u32, order_cap: u64, dedup: bool, cap: u64) -> Result<Vec<ScanRow>> {
    let per_curve: Vec<(Option<DedupKey>, Vec<ScanRow>)> = curves
        .par_iter()
        .map(|c| scan_curve(c, m_max, order_cap, cap))
        .collect::<Result<_>>()?;
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for (key, curve_rows) in per_curve {
        if dedup {
            if let Some(key) = key {
                if !seen.insert(key) {
                    continue;
                }
            }
        }
        rows.extend(curve_rows);
    }
    Ok(rows)
}

type ScanKey = (Vec<BigInt>, Signature);

fn scan_curve(c: &HyperellipticCurve, m_max: u32, order_cap: u64, cap: u64) -> Result<(Option<ScanKey>, Vec<ScanRow>)> {
    let poly: FrobCharPoly = zeta::frob_charpoly_capped(c, cap)?;
    let f1 = poly.group_order(1);
    let f2 = poly.group_order(2);
    let mut rows = Vec::new();
    let mut key = None;
    for m in 1..=m_max {
        let po = PointOrders::compute_capped(c, m, cap)?;
        let sig = signature_from(&po, order_cap);
        let audit = audit_from(&po);
        if m == 1 {
            key = Some((poly.coeffs().to_vec(), sig.clone()));
        }
        rows.push(ScanRow {
            curve: c.spec(),
            p: c.p(),
            m,
            charpoly: poly.coeffs().to_vec(),
            f1: f1.clone(),
            f2: f2.clone(),
            signature_hash: sig.hash(),
            violations: audit.violations.len(),
            equality_cases: audit.equality_cases.len(),
        });
    }
    Ok((key, rows))
}

/// Counts of realized orders per base point; handy for reports.
pub fn realized_orders(po: &PointOrders) -> HashMap<CurvePoint, Vec<u64>> {
    po.points
        .iter()
        .enumerate()
        .map(|(i, &pt)| {
            let mut v: Vec<u64> = po.orders[i]
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &o)| o)
                .collect();
            v.sort_unstable();
            v.dedup();
            (pt, v)
        })
        .collect()
}
