//! Full enumeration of `J(F_{q^m})`, group structure from torsion counts,
//! and subgroup closure.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use super::{Jacobian, MumfordDivisor};
use crate::curve::{parse_curve_spec, HyperellipticCurve, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::ff::poly::{self, Poly};
use crate::ff::{FieldDesc, FieldElement};
use crate::nt;
use crate::zeta;

/// Every element of `J(F_{q^m})` in canonical order (by `deg u`, then the
/// coefficients of `u`, then those of `v`), with reverse lookup.
#[derive(Clone, Debug)]
pub struct JacobianGroupTable {
    jac: Jacobian,
    keys: Vec<u128>,
    index: HashMap<u128, usize>,
}

/// Result of a subgroup closure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubgroupInfo {
    pub order: u64,
    pub index: u64,
}

struct Packing {
    q: u128,
    g: usize,
}

impl Packing {
    fn new(k: &FieldDesc, g: usize) -> Result<Packing> {
        let q = k.q() as u128;
        let mut bound: u128 = g as u128 + 1;
        for _ in 0..2 * g {
            bound = bound
                .checked_mul(q)
                .ok_or_else(|| Error::FieldTooLarge(format!("{}^{}", k.q(), 2 * g)))?;
        }
        Ok(Packing { q, g })
    }

    fn digits(&self, a: &[FieldElement]) -> u128 {
        a.iter()
            .take(self.g)
            .rev()
            .fold(0u128, |acc, c| acc * self.q + c.encoding() as u128)
    }

    fn key(&self, u: &[FieldElement], v: &[FieldElement]) -> u128 {
        let deg = (u.len() - 1) as u128;
        let qg = self.q.pow(self.g as u32);
        (deg * qg + self.digits(u)) * qg + self.digits(v)
    }

    fn unpack(&self, k: &FieldDesc, key: u128) -> (Poly, Poly) {
        let qg = self.q.pow(self.g as u32);
        let v_digits = key % qg;
        let rest = key / qg;
        let u_digits = rest % qg;
        let deg = (rest / qg) as usize;
        let expand = |mut x: u128, len: usize| -> Poly {
            (0..len)
                .map(|_| {
                    let c = (x % self.q) as u64;
                    x /= self.q;
                    k.element(c).unwrap()
                })
                .collect()
        };
        let mut u = expand(u_digits, deg);
        u.push(FieldElement::ONE);
        let v = poly::trim(expand(v_digits, deg));
        (u, v)
    }
}

/// `J(F_{q^m})` with the default cap of `10^6` elements.
pub fn enumerate_jacobian(curve: &HyperellipticCurve, m: u32) -> Result<JacobianGroupTable> {
    enumerate_jacobian_capped(curve, m, DEFAULT_CAP)
}

pub fn enumerate_jacobian_capped(curve: &HyperellipticCurve, m: u32, cap: u64) -> Result<JacobianGroupTable> {
    let jac = Jacobian::new(curve, m)?;
    let count_cap = cap.saturating_mul(64);
    let order = zeta::frob_charpoly_capped(curve, count_cap)?.group_order(m);
    if order > cap.into() {
        return Err(Error::CapExceeded {
            size: order.to_string(),
            cap,
        });
    }
    let pack = Packing::new(jac.field(), jac.genus())?;
    let mut keys = enumerate_keys(&jac, &pack);
    keys.sort_unstable();
    Ok(JacobianGroupTable::from_keys(jac, keys))
}

/// Monic irreducible polynomials of degree `d` over `k`, in encoding order.
fn irreducibles(k: &FieldDesc, d: usize) -> Vec<Poly> {
    let q = k.q();
    let elem = |c: u64| k.element(c).unwrap();
    match d {
        1 => k.elements().map(|a| poly::linear(k, a)).collect(),
        2 => {
            let mut out = Vec::new();
            for b in k.elements() {
                for c in k.elements() {
                    let disc = k.sub(k.square(b), k.scale(4, c));
                    if !k.is_square(disc) {
                        out.push(vec![c, b, FieldElement::ONE]);
                    }
                }
            }
            out
        }
        _ => {
            let total = q.pow(d as u32);
            (0..total)
                .into_par_iter()
                .filter_map(|code| {
                    let mut x = code;
                    let mut f: Poly = (0..d)
                        .map(|_| {
                            let c = x % q;
                            x /= q;
                            elem(c)
                        })
                        .collect();
                    f.push(FieldElement::ONE);
                    poly::is_irreducible(k, &f).then_some(f)
                })
                .collect()
        }
    }
}

/// Square root of `a` in the field `k[x]/(pi)`, `pi` irreducible.
fn sqrt_mod_irreducible(k: &FieldDesc, a: &[FieldElement], pi: &[FieldElement]) -> Option<Poly> {
    let a = poly::rem(k, a, pi);
    if a.is_empty() {
        return Some(Vec::new());
    }
    let d = pi.len() - 1;
    if d == 1 {
        return k.sqrt(a[0]).map(poly::constant);
    }
    let size = k.q().pow(d as u32);
    let one = poly::one();
    if poly::powmod(k, &a, (size - 1) / 2, pi) != one {
        return None;
    }
    let s = (size - 1).trailing_zeros();
    let t = (size - 1) >> s;
    // first non-residue, trying non-constants first: for even d every
    // constant is a square in the extension
    let q = k.q();
    let z = (q..size)
        .chain(1..q)
        .map(|mut code| {
            let mut z = Vec::with_capacity(d);
            for _ in 0..d {
                z.push(k.element(code % q).unwrap());
                code /= q;
            }
            poly::trim(z)
        })
        .find(|z| poly::powmod(k, z, (size - 1) / 2, pi) != one)?;
    let mut m = s;
    let mut c = poly::powmod(k, &z, t, pi);
    let mut r = poly::powmod(k, &a, t.div_ceil(2), pi);
    let mut b = poly::powmod(k, &a, t, pi);
    while b != one {
        let mut i = 0;
        let mut b2 = b.clone();
        while b2 != one {
            b2 = poly::mulmod(k, &b2, &b2, pi);
            i += 1;
        }
        let mut w = c.clone();
        for _ in 0..m - i - 1 {
            w = poly::mulmod(k, &w, &w, pi);
        }
        r = poly::mulmod(k, &r, &w, pi);
        c = poly::mulmod(k, &w, &w, pi);
        b = poly::mulmod(k, &b, &c, pi);
        m = i;
    }
    Some(r)
}

/// All `v` with `deg v < deg pi^e` and `v^2 = f mod pi^e`.
fn local_solutions(k: &FieldDesc, f: &[FieldElement], pi: &[FieldElement], e: usize) -> Vec<Poly> {
    let f_mod = poly::rem(k, f, pi);
    if f_mod.is_empty() {
        // f is squarefree, so pi^2 cannot divide v^2 - f once pi | v
        return if e == 1 { vec![Vec::new()] } else { Vec::new() };
    }
    let Some(mut v) = sqrt_mod_irreducible(k, f, pi) else {
        return Vec::new();
    };
    let mut modulus = pi.to_vec();
    for _ in 1..e {
        modulus = poly::mul(k, &modulus, pi);
        // Newton step v <- v - (v^2 - f) / (2v)
        let num = poly::sub(k, &poly::mul(k, &v, &v), f);
        let den = poly::inv_mod(k, &poly::scale(k, k.from_int(2), &v), &modulus).unwrap();
        v = poly::rem(k, &poly::sub(k, &v, &poly::mul(k, &num, &den)), &modulus);
    }
    let neg = poly::rem(k, &poly::neg(k, &v), &modulus);
    vec![v, neg]
}

struct Block {
    degree: usize,
    modulus: Poly,
    sols: Vec<Poly>,
}

/// Prime-power blocks grouped by prime, primes ordered by degree.
fn blocks(jac: &Jacobian) -> Vec<Vec<Block>> {
    let k = jac.field();
    let g = jac.genus();
    let f = jac.f();
    let mut primes = Vec::new();
    for d in 1..=g {
        primes.extend(irreducibles(k, d));
    }
    primes
        .into_par_iter()
        .map(|pi| {
            let d = pi.len() - 1;
            let mut out = Vec::new();
            let mut modulus = poly::one();
            for e in 1..=g / d {
                modulus = poly::mul(k, &modulus, &pi);
                let sols = local_solutions(k, f, &pi, e);
                if sols.is_empty() {
                    break;
                }
                out.push(Block {
                    degree: d * e,
                    modulus: modulus.clone(),
                    sols,
                });
            }
            out
        })
        .collect()
}

fn enumerate_keys(jac: &Jacobian, pack: &Packing) -> Vec<u128> {
    let k = jac.field();
    let mut groups = blocks(jac);
    groups.retain(|b| !b.is_empty());
    let min_deg: Vec<usize> = groups.iter().map(|b| b[0].degree).collect();

    struct Walk<'a> {
        k: &'a FieldDesc,
        g: usize,
        groups: &'a [Vec<Block>],
        min_deg: &'a [usize],
        pack: &'a Packing,
    }

    impl Walk<'_> {
        fn emit(&self, u: &Poly, vs: &[Poly], out: &mut Vec<u128>) {
            for v in vs {
                out.push(self.pack.key(u, v));
            }
        }

        fn descend(&self, start: usize, budget: usize, u: &Poly, vs: &[Poly], out: &mut Vec<u128>) {
            for j in start..self.groups.len() {
                // primes are sorted by degree
                if self.min_deg[j] > budget {
                    break;
                }
                for blk in &self.groups[j] {
                    if blk.degree > budget {
                        break;
                    }
                    let (u2, vs2) = self.combine(u, vs, blk);
                    self.emit(&u2, &vs2, out);
                    self.descend(j + 1, budget - blk.degree, &u2, &vs2, out);
                }
            }
        }

        fn combine(&self, u: &Poly, vs: &[Poly], blk: &Block) -> (Poly, Vec<Poly>) {
            let k = self.k;
            let n = &blk.modulus;
            let u2 = poly::mul(k, u, n);
            let u_inv = poly::inv_mod(k, u, n).unwrap_or_else(poly::one);
            let mut out = Vec::with_capacity(vs.len() * blk.sols.len());
            for v in vs {
                for w in &blk.sols {
                    // v + u * ((w - v) u^{-1} mod n)
                    let t = poly::mulmod(k, &poly::sub(k, w, v), &u_inv, n);
                    out.push(poly::add(k, v, &poly::mul(k, u, &t)));
                }
            }
            (u2, out)
        }
    }

    let walk = Walk {
        k,
        g: jac.genus(),
        groups: &groups,
        min_deg: &min_deg,
        pack,
    };
    let mut keys: Vec<u128> = (0..groups.len())
        .into_par_iter()
        .flat_map_iter(|j| {
            let mut out = Vec::new();
            for blk in &groups[j] {
                if blk.degree > walk.g {
                    break;
                }
                let (u, vs) = walk.combine(&poly::one(), &[Vec::new()], blk);
                walk.emit(&u, &vs, &mut out);
                walk.descend(j + 1, walk.g - blk.degree, &u, &vs, &mut out);
            }
            out
        })
        .collect();
    keys.push(pack.key(&poly::one(), &[]));
    keys
}

impl JacobianGroupTable {
    fn from_keys(jac: Jacobian, keys: Vec<u128>) -> JacobianGroupTable {
        let index = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        JacobianGroupTable { jac, keys, index }
    }

    fn packing(&self) -> Packing {
        Packing::new(self.jac.field(), self.jac.genus()).expect("packing fit at construction")
    }

    pub fn jacobian(&self) -> &Jacobian {
        &self.jac
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Group order `F(m)`.
    pub fn order(&self) -> u64 {
        self.keys.len() as u64
    }

    pub fn element(&self, i: usize) -> MumfordDivisor {
        let (u, v) = self.packing().unpack(self.jac.field(), self.keys[i]);
        self.jac.wrap(u, v)
    }

    pub fn elements(&self) -> impl Iterator<Item = MumfordDivisor> + '_ {
        let pack = self.packing();
        self.keys.iter().map(move |&key| {
            let (u, v) = pack.unpack(self.jac.field(), key);
            self.jac.wrap(u, v)
        })
    }

    pub fn index_of(&self, d: &MumfordDivisor) -> Option<usize> {
        if d.tag != self.jac.tag {
            return None;
        }
        self.index.get(&self.packing().key(&d.u, &d.v)).copied()
    }

    /// Position of the sum of the elements at positions `i` and `j`.
    pub fn add_index(&self, i: usize, j: usize) -> usize {
        let s = self.jac.add_unchecked(&self.element(i), &self.element(j));
        self.index_of(&s).expect("table is closed under addition")
    }

    /// `i -> index of n * element(i)` for every element.
    pub fn mul_map(&self, n: u64) -> Vec<usize> {
        let pack = self.packing();
        let k = self.jac.field();
        self.keys
            .par_iter()
            .map(|&key| {
                let (u, v) = pack.unpack(k, key);
                let d = self.jac.mul_unchecked(&self.jac.wrap(u, v), n);
                self.index[&pack.key(&d.u, &d.v)]
            })
            .collect()
    }

    fn factored_order(&self) -> Vec<(u64, u32)> {
        nt::factorize(self.order()).expect("table orders are below the factoring cap")
    }

    /// Invariant factors `d_1 | d_2 | ...` (all greater than one), from the
    /// sizes of the `l^k`-torsion subgroups.
    pub fn group_structure(&self) -> Vec<u64> {
        let mut by_prime: Vec<Vec<u32>> = Vec::new();
        let mut primes = Vec::new();
        for (l, e) in self.factored_order() {
            let map = self.mul_map(l);
            let mut cur: Vec<usize> = (0..self.len()).collect();
            let mut ranks = vec![0u32];
            for _ in 0..e {
                cur = cur.iter().map(|&i| map[i]).collect();
                let killed = cur.iter().filter(|&&i| i == 0).count() as u64;
                ranks.push(log_exact(killed, l));
                if killed == self.order() {
                    break;
                }
            }
            // number of cyclic factors of exponent >= k is ranks[k] - ranks[k-1]
            let mut exps = Vec::new();
            for kk in 1..ranks.len() {
                let at_least = ranks[kk] - ranks[kk - 1];
                let next = ranks.get(kk + 1).map_or(0, |r| r - ranks[kk]);
                for _ in 0..at_least - next {
                    exps.push(kk as u32);
                }
            }
            exps.sort_unstable_by(|a, b| b.cmp(a));
            primes.push(l);
            by_prime.push(exps);
        }
        let n = by_prime.iter().map(Vec::len).max().unwrap_or(0);
        let mut out: Vec<u64> = (0..n)
            .map(|i| {
                primes
                    .iter()
                    .zip(&by_prime)
                    .map(|(&l, exps)| exps.get(i).map_or(1, |&e| l.pow(e)))
                    .product()
            })
            .collect();
        out.reverse();
        out
    }

    /// Number of elements killed by `n`.
    pub fn torsion_count(&self, n: u64) -> usize {
        self.mul_map(n).iter().filter(|&&i| i == 0).count()
    }

    /// Order of every element, from multiplication maps by each prime.
    pub fn element_orders(&self) -> Vec<u64> {
        let fac = self.factored_order();
        let maps: Vec<Vec<usize>> = fac.iter().map(|&(l, _)| self.mul_map(l)).collect();
        (0..self.len())
            .into_par_iter()
            .map(|i| {
                let mut order = 1u64;
                for (t, &(l, e)) in fac.iter().enumerate() {
                    // project onto the l-primary part
                    let mut y = i;
                    for (s, &(_, e2)) in fac.iter().enumerate() {
                        if s != t {
                            for _ in 0..e2 {
                                y = maps[s][y];
                            }
                        }
                    }
                    let mut steps = 0;
                    while y != 0 {
                        y = maps[t][y];
                        steps += 1;
                    }
                    debug_assert!(steps <= e);
                    order *= l.pow(steps);
                }
                order
            })
            .collect()
    }

    /// Line-oriented text: a `#` header (curve, m, order) and one divisor per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# curve: {}", self.jac.curve().spec());
        let _ = writeln!(s, "# m: {}", self.jac.degree());
        let _ = writeln!(s, "# order: {}", self.order());
        for d in self.elements() {
            let _ = writeln!(s, "{}", self.jac.format_divisor(&d));
        }
        s
    }

    /// Inverse of [`JacobianGroupTable::to_text`]; every line is re-validated.
    pub fn from_text(text: &str) -> Result<JacobianGroupTable> {
        let mut curve = None;
        let mut m = None;
        let mut order = None;
        let mut body = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix('#') {
                let (key, value) = h
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("bad header {line:?}")))?;
                let value = value.trim();
                match key.trim() {
                    "curve" => curve = Some(parse_curve_spec(value)?),
                    "m" => m = value.parse::<u32>().ok(),
                    "order" => order = value.parse::<u64>().ok(),
                    _ => {}
                }
            } else {
                body.push(line);
            }
        }
        let (Some(curve), Some(m), Some(order)) = (curve, m, order) else {
            return Err(Error::Parse("table header needs curve, m and order".into()));
        };
        let jac = Jacobian::new(&curve, m)?;
        let pack = Packing::new(jac.field(), jac.genus())?;
        let mut keys = Vec::with_capacity(body.len());
        for line in body {
            let d = jac.parse_divisor(line)?;
            keys.push(pack.key(&d.u, &d.v));
        }
        keys.sort_unstable();
        keys.dedup();
        if keys.len() as u64 != order {
            return Err(Error::Parse(format!(
                "table lists {} distinct elements, header says {order}",
                keys.len()
            )));
        }
        Ok(JacobianGroupTable::from_keys(jac, keys))
    }
}

fn log_exact(mut n: u64, l: u64) -> u32 {
    let mut r = 0;
    while n > 1 {
        debug_assert_eq!(n % l, 0);
        n /= l;
        r += 1;
    }
    r
}

/// Order and index of the subgroup generated by `gens`, by coset closure.
pub fn subgroup_generated(gens: &[MumfordDivisor], table: &JacobianGroupTable) -> Result<SubgroupInfo> {
    let mut member = vec![false; table.len()];
    member[0] = true;
    let mut elems = vec![0usize];
    for g in gens {
        let gi = table.index_of(g).ok_or(Error::FieldMismatch)?;
        if member[gi] {
            continue;
        }
        let base: Vec<usize> = elems.clone();
        let mut t = gi;
        while !member[t] {
            for &h in &base {
                let s = table.add_index(h, t);
                member[s] = true;
                elems.push(s);
            }
            t = table.add_index(t, gi);
        }
    }
    let order = elems.len() as u64;
    Ok(SubgroupInfo {
        order,
        index: table.order() / order,
    })
}
