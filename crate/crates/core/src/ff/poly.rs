//! Dense univariate polynomials over a [`FieldDesc`].
//!
//! A polynomial is a `Vec<FieldElement>` of ascending coefficients with no
//! trailing zeros; the zero polynomial is the empty vector.

use super::{FieldDesc, FieldElement};

pub type Poly = Vec<FieldElement>;

pub fn trim(mut a: Poly) -> Poly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

/// Degree, with `None` for the zero polynomial.
pub fn degree(a: &[FieldElement]) -> Option<usize> {
    a.iter().rposition(|c| !c.is_zero())
}

pub fn constant(c: FieldElement) -> Poly {
    trim(vec![c])
}

pub fn one() -> Poly {
    vec![FieldElement::ONE]
}

/// `x - r`.
pub fn linear(k: &FieldDesc, r: FieldElement) -> Poly {
    vec![k.neg(r), FieldElement::ONE]
}

pub fn add(k: &FieldDesc, a: &[FieldElement], b: &[FieldElement]) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or_default();
            let y = b.get(i).copied().unwrap_or_default();
            k.add(x, y)
        })
        .collect();
    trim(out)
}

pub fn neg(k: &FieldDesc, a: &[FieldElement]) -> Poly {
    a.iter().map(|&c| k.neg(c)).collect()
}

pub fn sub(k: &FieldDesc, a: &[FieldElement], b: &[FieldElement]) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or_default();
            let y = b.get(i).copied().unwrap_or_default();
            k.sub(x, y)
        })
        .collect();
    trim(out)
}

pub fn scale(k: &FieldDesc, c: FieldElement, a: &[FieldElement]) -> Poly {
    if c.is_zero() {
        return Vec::new();
    }
    a.iter().map(|&x| k.mul(c, x)).collect()
}

pub fn mul(k: &FieldDesc, a: &[FieldElement], b: &[FieldElement]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![FieldElement::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = k.add(out[i + j], k.mul(x, y));
        }
    }
    trim(out)
}

/// Quotient and remainder; panics when dividing by zero.
pub fn divrem(k: &FieldDesc, a: &[FieldElement], b: &[FieldElement]) -> (Poly, Poly) {
    let db = degree(b).expect("polynomial division by zero");
    let lead_inv = k.inv(b[db]).expect("nonzero leading coefficient");
    let mut r: Poly = trim(a.to_vec());
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut quot = vec![FieldElement::ZERO; r.len() - db];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = k.mul(r[dr], lead_inv);
        let shift = dr - db;
        quot[shift] = c;
        for (i, &bi) in b[..=db].iter().enumerate() {
            r[shift + i] = k.sub(r[shift + i], k.mul(c, bi));
        }
        r.truncate(dr);
        r = trim(r);
    }
    (trim(quot), r)
}

pub fn rem(k: &FieldDesc, a: &[FieldElement], b: &[FieldElement]) -> Poly {
    divrem(k, a, b).1
}

/// Exact quotient; debug-asserts a zero remainder.
pub fn div_exact(k: &FieldDesc, a: &[FieldElement], b: &[FieldElement]) -> Poly {
    let (q, r) = divrem(k, a, b);
    debug_assert!(r.is_empty(), "inexact polynomial division");
    q
}

pub fn monic(k: &FieldDesc, a: &[FieldElement]) -> Poly {
    match degree(a) {
        None => Vec::new(),
        Some(d) => {
            let inv = k.inv(a[d]).unwrap();
            scale(k, inv, &a[..=d])
        }
    }
}

/// Monic greatest common divisor (zero when both inputs are zero).
pub fn gcd(k: &FieldDesc, a: &[FieldElement], b: &[FieldElement]) -> Poly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(k, &x, &y);
        x = y;
        y = r;
    }
    monic(k, &x)
}

/// Extended gcd: returns `(g, s, t)` with `s a + t b = g`, `g` monic.
pub fn xgcd(k: &FieldDesc, a: &[FieldElement], b: &[FieldElement]) -> (Poly, Poly, Poly) {
    let (mut r0, mut r1) = (trim(a.to_vec()), trim(b.to_vec()));
    let (mut s0, mut s1) = (one(), Vec::new());
    let (mut t0, mut t1) = (Vec::new(), one());
    while !r1.is_empty() {
        let (q, r) = divrem(k, &r0, &r1);
        let s = sub(k, &s0, &mul(k, &q, &s1));
        let t = sub(k, &t0, &mul(k, &q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    match degree(&r0) {
        None => (Vec::new(), s0, t0),
        Some(d) => {
            let inv = k.inv(r0[d]).unwrap();
            (scale(k, inv, &r0), scale(k, inv, &s0), scale(k, inv, &t0))
        }
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(k: &FieldDesc, a: &[FieldElement], m: &[FieldElement]) -> Option<Poly> {
    let (g, s, _) = xgcd(k, a, m);
    (g == one()).then(|| rem(k, &s, m))
}

pub fn eval(k: &FieldDesc, a: &[FieldElement], x: FieldElement) -> FieldElement {
    a.iter()
        .rev()
        .fold(FieldElement::ZERO, |acc, &c| k.add(k.mul(acc, x), c))
}

pub fn derivative(k: &FieldDesc, a: &[FieldElement]) -> Poly {
    let out = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| k.scale(i as i64, c))
        .collect();
    trim(out)
}

pub fn mulmod(k: &FieldDesc, a: &[FieldElement], b: &[FieldElement], m: &[FieldElement]) -> Poly {
    rem(k, &mul(k, a, b), m)
}

/// `a^e mod m` by square-and-multiply; the exponent is a little-endian
/// sequence of 64-bit limbs so that `q^n` style exponents fit.
pub fn powmod_limbs(k: &FieldDesc, a: &[FieldElement], e: &[u64], m: &[FieldElement]) -> Poly {
    let mut result = rem(k, &one(), m);
    let base = rem(k, a, m);
    for &limb in e.iter().rev() {
        for bit in (0..64).rev() {
            result = mulmod(k, &result, &result, m);
            if (limb >> bit) & 1 == 1 {
                result = mulmod(k, &result, &base, m);
            }
        }
    }
    result
}

pub fn powmod(k: &FieldDesc, a: &[FieldElement], e: u64, m: &[FieldElement]) -> Poly {
    powmod_limbs(k, a, &[e], m)
}

/// Map `a(x) -> a(x)^q mod m` applied to `x^(q^i)` values: returns `x^q mod m`.
fn x_pow_q(k: &FieldDesc, m: &[FieldElement]) -> Poly {
    let x = vec![FieldElement::ZERO, FieldElement::ONE];
    powmod(k, &x, k.q(), m)
}

/// Composition `a(b) mod m`.
pub fn compose_mod(k: &FieldDesc, a: &[FieldElement], b: &[FieldElement], m: &[FieldElement]) -> Poly {
    let mut acc: Poly = Vec::new();
    for &c in a.iter().rev() {
        acc = add(k, &mulmod(k, &acc, b, m), &constant(c));
    }
    rem(k, &acc, m)
}

/// Rabin's irreducibility test over `F_q`.
pub fn is_irreducible(k: &FieldDesc, f: &[FieldElement]) -> bool {
    let Some(n) = degree(f) else { return false };
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let f = monic(k, f);
    let x: Poly = vec![FieldElement::ZERO, FieldElement::ONE];
    let xq = x_pow_q(k, &f);
    // frob[i] = x^(q^i) mod f
    let mut frob = vec![rem(k, &x, &f)];
    for i in 1..=n {
        let next = compose_mod(k, &frob[i - 1], &xq, &f);
        frob.push(next);
    }
    if frob[n] != rem(k, &x, &f) {
        return false;
    }
    let mut m = n;
    let mut prime_divisors = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            prime_divisors.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        prime_divisors.push(m);
    }
    prime_divisors.into_iter().all(|r| {
        let h = sub(k, &frob[n / r], &x);
        gcd(k, &h, &f) == one()
    })
}

/// Distinct-degree factorization of a squarefree polynomial: pairs
/// `(d, g_d)` where `g_d` is the product of the irreducible factors of
/// degree `d`.
pub fn distinct_degree_factorization(k: &FieldDesc, f: &[FieldElement]) -> Vec<(usize, Poly)> {
    let mut rest = monic(k, f);
    let mut out = Vec::new();
    let x: Poly = vec![FieldElement::ZERO, FieldElement::ONE];
    let mut d = 1;
    let mut h = x.clone();
    while let Some(n) = degree(&rest) {
        if n < 2 * d {
            if n > 0 {
                out.push((n, rest.clone()));
            }
            break;
        }
        h = powmod(k, &h, k.q(), &rest);
        let g = gcd(k, &sub(k, &h, &x), &rest);
        if degree(&g).unwrap_or(0) > 0 {
            rest = div_exact(k, &rest, &g);
            h = rem(k, &h, &rest);
            out.push((d, g));
        }
        d += 1;
    }
    out
}

/// All roots in `F_q`, sorted by encoding.
pub fn roots(k: &FieldDesc, f: &[FieldElement]) -> Vec<FieldElement> {
    let Some(n) = degree(f) else { return Vec::new() };
    if n == 0 {
        return Vec::new();
    }
    let f = monic(k, f);
    let x: Poly = vec![FieldElement::ZERO, FieldElement::ONE];
    let xq = powmod(k, &x, k.q(), &f);
    let split = gcd(k, &sub(k, &xq, &x), &f);
    let mut out = Vec::new();
    split_linear(k, &split, &mut out);
    out.sort();
    out
}

// Equal-degree splitting for products of distinct linear factors.
fn split_linear(k: &FieldDesc, f: &[FieldElement], out: &mut Vec<FieldElement>) {
    match degree(f) {
        None | Some(0) => {}
        Some(1) => out.push(k.neg(k.div(f[0], f[1]))),
        Some(_) => {
            if f[0].is_zero() {
                out.push(FieldElement::ZERO);
                split_linear(k, &f[1..], out);
                return;
            }
            let e = (k.q() - 1) / 2;
            for shift in k.elements() {
                let t = vec![shift, FieldElement::ONE];
                let w = powmod(k, &t, e, f);
                let g = gcd(k, &sub(k, &w, &one()), f);
                let dg = degree(&g).unwrap_or(0);
                if dg > 0 && Some(dg) != degree(f) {
                    let h = div_exact(k, f, &g);
                    split_linear(k, &g, out);
                    split_linear(k, &h, out);
                    return;
                }
            }
            unreachable!("some shift separates distinct roots")
        }
    }
}
