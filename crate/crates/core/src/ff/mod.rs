//! Finite fields `F_{p^d}` of odd characteristic.
//!
//! Elements are stored as their canonical encoding `sum c_i p^i`, where the
//! `c_i` are the residues of the polynomial representative modulo the
//! defining polynomial. Fields up to [`TABLE_LIMIT`] elements carry
//! discrete log tables so that multiplication is a pair of lookups.

pub mod poly;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::nt;

/// Largest field size that gets log/antilog tables.
pub const TABLE_LIMIT: u64 = 1 << 22;

/// Fields at most this large answer square roots from an exhaustive table.
pub const SQRT_TABLE_LIMIT: u64 = 10_000;

/// Largest supported field size.
pub const MAX_FIELD: u64 = 1 << 40;

/// An element of some [`FieldDesc`], stored by its canonical encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Canonical integer encoding `sum c_i p^i`.
    pub fn encoding(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    // exp has length 2(q-1) so that log a + log b never needs a reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
}

struct Inner {
    p: u64,
    d: u32,
    q: u64,
    modulus: Vec<u64>,
    pow_p: Vec<u64>,
    tables: Option<Tables>,
    sqrt_table: OnceLock<Vec<u64>>,
    nonresidue: OnceLock<FieldElement>,
}

/// Description of `F_q`, `q = p^d`, with a fixed monic irreducible modulus.
///
/// Cloning is cheap; descriptors for the same `(p, d)` built by
/// [`ext_field`] share their tables.
#[derive(Clone)]
pub struct FieldDesc {
    inner: Arc<Inner>,
}

impl PartialEq for FieldDesc {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for FieldDesc {}

impl fmt::Debug for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldDesc")
            .field("p", &self.inner.p)
            .field("d", &self.inner.d)
            .field("modulus", &self.inner.modulus)
            .finish()
    }
}

impl fmt::Display for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.inner.p, self.inner.d)
    }
}

fn field_cache() -> &'static Mutex<HashMap<(u64, u32), FieldDesc>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), FieldDesc>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn check_characteristic(p: u64) -> Result<()> {
    if p == 2 {
        return Err(Error::EvenCharacteristic);
    }
    if !nt::is_prime(p) {
        return Err(Error::NonPrime(p));
    }
    Ok(())
}

fn field_size(p: u64, d: u32) -> Result<u64> {
    if d == 0 {
        return Err(Error::InvalidArgument("extension degree must be >= 1".into()));
    }
    match p.checked_pow(d) {
        Some(q) if q <= MAX_FIELD => Ok(q),
        _ => Err(Error::FieldTooLarge(format!("{p}^{d}"))),
    }
}

/// The field `F_{p^d}` with the lexicographically smallest monic
/// irreducible modulus (ordered by the encoding of its lower coefficients).
pub fn ext_field(p: u64, d: u32) -> Result<FieldDesc> {
    check_characteristic(p)?;
    field_size(p, d)?;
    if let Some(k) = field_cache().lock().unwrap().get(&(p, d)) {
        return Ok(k.clone());
    }
    let modulus = if d == 1 {
        vec![0, 1]
    } else {
        smallest_irreducible(p, d)
    };
    let k = FieldDesc::build(p, d, modulus)?;
    let mut cache = field_cache().lock().unwrap();
    Ok(cache.entry((p, d)).or_insert(k).clone())
}

fn smallest_irreducible(p: u64, d: u32) -> Vec<u64> {
    let prime = ext_field(p, 1).expect("prime field");
    let count = p.pow(d);
    for code in 0..count {
        let mut coeffs: Vec<FieldElement> = digits(code, p, d as usize)
            .into_iter()
            .map(FieldElement)
            .collect();
        if coeffs[0] == FieldElement::ZERO {
            continue;
        }
        coeffs.push(FieldElement::ONE);
        if poly::is_irreducible(&prime, &coeffs) {
            return coeffs.iter().map(|c| c.0).collect();
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn digits(mut code: u64, p: u64, len: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(code % p);
        code /= p;
    }
    out
}

/// Parses a field spec `"p^d"` (or just `"p"`).
pub fn parse_field_spec(s: &str) -> Result<FieldDesc> {
    let s = s.trim();
    let (p, d) = match s.split_once('^') {
        Some((p, d)) => (p.trim(), d.trim()),
        None => (s, "1"),
    };
    let p: u64 = p
        .parse()
        .map_err(|_| Error::Parse(format!("bad characteristic in field spec {s:?}")))?;
    let d: u32 = d
        .parse()
        .map_err(|_| Error::Parse(format!("bad degree in field spec {s:?}")))?;
    ext_field(p, d)
}

impl FieldDesc {
    /// A field with an explicitly chosen modulus (ascending coefficients,
    /// monic). The modulus must be irreducible over `F_p`.
    pub fn with_modulus(p: u64, modulus: &[u64]) -> Result<FieldDesc> {
        check_characteristic(p)?;
        let d = modulus.len().saturating_sub(1) as u32;
        field_size(p, d)?;
        if modulus.last() != Some(&1) || modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidArgument("modulus must be monic with residues < p".into()));
        }
        let prime = ext_field(p, 1)?;
        let m: Vec<FieldElement> = modulus.iter().map(|&c| FieldElement(c)).collect();
        if !poly::is_irreducible(&prime, &m) {
            return Err(Error::InvalidArgument("modulus is reducible".into()));
        }
        FieldDesc::build(p, d, modulus.to_vec())
    }

    fn build(p: u64, d: u32, modulus: Vec<u64>) -> Result<FieldDesc> {
        let q = field_size(p, d)?;
        let pow_p = (0..=d).map(|i| p.pow(i)).collect();
        let mut inner = Inner {
            p,
            d,
            q,
            modulus,
            pow_p,
            tables: None,
            sqrt_table: OnceLock::new(),
            nonresidue: OnceLock::new(),
        };
        if q <= TABLE_LIMIT {
            inner.tables = Some(build_tables(&inner));
        }
        Ok(FieldDesc {
            inner: Arc::new(inner),
        })
    }

    pub fn p(&self) -> u64 {
        self.inner.p
    }

    pub fn d(&self) -> u32 {
        self.inner.d
    }

    pub fn q(&self) -> u64 {
        self.inner.q
    }

    /// Monic defining polynomial, ascending residues.
    pub fn modulus(&self) -> &[u64] {
        &self.inner.modulus
    }

    #[inline]
    fn debug_check(&self, a: FieldElement) {
        debug_assert!(a.0 < self.inner.q, "element {} not in F_{}", a.0, self.inner.q);
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.inner.p as i64) as u64)
    }

    /// Element with the given encoding, if it is in range.
    pub fn element(&self, code: u64) -> Option<FieldElement> {
        (code < self.inner.q).then_some(FieldElement(code))
    }

    /// The generator `x` of the polynomial basis (equals `-modulus[0]` when d = 1).
    pub fn generator_x(&self) -> FieldElement {
        if self.inner.d == 1 {
            FieldElement((self.inner.p - self.inner.modulus[0]) % self.inner.p)
        } else {
            FieldElement(self.inner.p)
        }
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() > self.inner.d as usize {
            return Err(Error::Parse(format!(
                "element has {} residues, field degree is {}",
                coeffs.len(),
                self.inner.d
            )));
        }
        let mut code = 0u64;
        for (i, &c) in coeffs.iter().enumerate() {
            if c >= self.inner.p {
                return Err(Error::Parse(format!("residue {c} is not reduced mod {}", self.inner.p)));
            }
            code += c * self.inner.pow_p[i];
        }
        Ok(FieldElement(code))
    }

    /// Residue vector of length `d`, ascending.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u64> {
        self.debug_check(a);
        digits(a.0, self.inner.p, self.inner.d as usize)
    }

    /// Comma-separated ascending residues, e.g. `"2,1"` for `2 + x`.
    pub fn format(&self, a: FieldElement) -> String {
        let c = self.coeffs(a);
        c.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",")
    }

    /// Inverse of [`FieldDesc::format`]. A shorter list is zero-padded;
    /// a single (possibly negative) integer maps into the prime subfield.
    pub fn parse(&self, s: &str) -> Result<FieldElement> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() == 1 {
            let n: i64 = parts[0]
                .parse()
                .map_err(|_| Error::Parse(format!("bad field element {s:?}")))?;
            return Ok(self.from_int(n));
        }
        let mut coeffs = Vec::with_capacity(parts.len());
        for part in parts {
            let n: i64 = part
                .parse()
                .map_err(|_| Error::Parse(format!("bad residue {part:?}")))?;
            coeffs.push(n.rem_euclid(self.inner.p as i64) as u64);
        }
        self.from_coeffs(&coeffs)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (0..self.inner.q).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.debug_check(a);
        self.debug_check(b);
        let p = self.inner.p;
        if self.inner.d == 1 {
            let s = a.0 + b.0;
            return FieldElement(if s >= p { s - p } else { s });
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0;
        let mut place = 1;
        while x != 0 || y != 0 {
            let s = x % p + y % p;
            out += if s >= p { s - p } else { s } * place;
            x /= p;
            y /= p;
            place *= p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        self.debug_check(a);
        let p = self.inner.p;
        if self.inner.d == 1 {
            return FieldElement(if a.0 == 0 { 0 } else { p - a.0 });
        }
        let mut x = a.0;
        let mut out = 0;
        let mut place = 1;
        while x != 0 {
            let c = x % p;
            out += if c == 0 { 0 } else { p - c } * place;
            x /= p;
            place *= p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.debug_check(a);
        self.debug_check(b);
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        if let Some(t) = &self.inner.tables {
            let l = t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize;
            return FieldElement(t.exp[l] as u64);
        }
        mul_slow(&self.inner, a, b)
    }

    /// Multiplication by an integer.
    pub fn scale(&self, n: i64, a: FieldElement) -> FieldElement {
        self.mul(self.from_int(n), a)
    }

    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    /// `a^e`, with `0^0 = 1`.
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        self.debug_check(a);
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        if let Some(t) = &self.inner.tables {
            let n = self.inner.q - 1;
            let l = (t.log[a.0 as usize] as u128 * (e % n) as u128 % n as u128) as usize;
            return FieldElement(t.exp[l] as u64);
        }
        pow_slow(&self.inner, a, e)
    }

    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        self.debug_check(a);
        if a.0 == 0 {
            return None;
        }
        if let Some(t) = &self.inner.tables {
            let n = (self.inner.q - 1) as usize;
            let l = t.log[a.0 as usize] as usize;
            return Some(FieldElement(t.exp[(n - l) % n] as u64));
        }
        Some(pow_slow(&self.inner, a, self.inner.q - 2))
    }

    /// `a / b`; panics on division by zero.
    pub fn div(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.mul(a, self.inv(b).expect("division by zero in finite field"))
    }

    /// The `p^r`-power Frobenius; `frobenius(a, d)` is the identity.
    pub fn frobenius(&self, a: FieldElement, r: u32) -> FieldElement {
        let r = r % self.inner.d;
        if r == 0 || a.0 == 0 {
            return a;
        }
        let e = self.inner.p.pow(r);
        self.pow(a, e)
    }

    /// Quadratic character test (0 counts as a square).
    pub fn is_square(&self, a: FieldElement) -> bool {
        if a.0 == 0 {
            return true;
        }
        if let Some(t) = &self.inner.tables {
            return t.log[a.0 as usize] % 2 == 0;
        }
        pow_slow(&self.inner, a, (self.inner.q - 1) / 2) == FieldElement::ONE
    }

    /// Some `b` with `b^2 = a`, choosing the smaller encoding of `{b, -b}`;
    /// `None` for non-squares.
    pub fn sqrt(&self, a: FieldElement) -> Option<FieldElement> {
        if self.inner.q <= SQRT_TABLE_LIMIT {
            self.sqrt_exhaustive(a)
        } else {
            self.sqrt_tonelli_shanks(a)
        }
    }

    /// Square root read off a table built by squaring every element.
    pub fn sqrt_exhaustive(&self, a: FieldElement) -> Option<FieldElement> {
        let table = self.inner.sqrt_table.get_or_init(|| {
            let mut t = vec![u64::MAX; self.inner.q as usize];
            for b in self.elements() {
                let s = self.square(b).0 as usize;
                if b.0 < t[s] {
                    t[s] = b.0;
                }
            }
            t
        });
        let r = table[a.0 as usize];
        (r != u64::MAX).then_some(FieldElement(r))
    }

    /// Tonelli-Shanks over `F_q`, `q - 1 = 2^s t`.
    pub fn sqrt_tonelli_shanks(&self, a: FieldElement) -> Option<FieldElement> {
        if a.0 == 0 {
            return Some(a);
        }
        if !self.is_square(a) {
            return None;
        }
        let q = self.inner.q;
        let mut s = 0;
        let mut t = q - 1;
        while t.is_multiple_of(2) {
            t /= 2;
            s += 1;
        }
        let z = self.nonresidue();
        let mut m = s;
        let mut c = self.pow(z, t);
        let mut x = self.pow(a, t.div_ceil(2));
        let mut b = self.pow(a, t);
        while b != FieldElement::ONE {
            let mut i = 0;
            let mut b2 = b;
            while b2 != FieldElement::ONE {
                b2 = self.square(b2);
                i += 1;
            }
            let mut e = c;
            for _ in 0..(m - i - 1) {
                e = self.square(e);
            }
            x = self.mul(x, e);
            c = self.square(e);
            b = self.mul(b, c);
            m = i;
        }
        let nx = self.neg(x);
        Some(if nx.0 < x.0 { nx } else { x })
    }

    fn nonresidue(&self) -> FieldElement {
        *self.inner.nonresidue.get_or_init(|| {
            self.elements()
                .skip(1)
                .find(|&z| !self.is_square(z))
                .expect("odd fields have non-residues")
        })
    }

    /// Whether the descriptor carries log tables.
    pub fn has_tables(&self) -> bool {
        self.inner.tables.is_some()
    }
}

fn mul_slow(k: &Inner, a: FieldElement, b: FieldElement) -> FieldElement {
    let p = k.p;
    let d = k.d as usize;
    if d == 1 {
        return FieldElement((a.0 as u128 * b.0 as u128 % p as u128) as u64);
    }
    let x = digits(a.0, p, d);
    let y = digits(b.0, p, d);
    let mut prod = vec![0u128; 2 * d - 1];
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0 {
            continue;
        }
        for (j, &yj) in y.iter().enumerate() {
            prod[i + j] += xi as u128 * yj as u128;
        }
    }
    let mut prod: Vec<u64> = prod.into_iter().map(|c| (c % p as u128) as u64).collect();
    for top in (d..prod.len()).rev() {
        let c = prod[top];
        if c == 0 {
            continue;
        }
        for i in 0..d {
            let m = k.modulus[i];
            let sub = (c as u128 * m as u128 % p as u128) as u64;
            let idx = top - d + i;
            prod[idx] = (prod[idx] + p - sub) % p;
        }
        prod[top] = 0;
    }
    let mut code = 0;
    for i in (0..d).rev() {
        code = code * p + prod[i];
    }
    FieldElement(code)
}

fn pow_slow(k: &Inner, mut a: FieldElement, mut e: u64) -> FieldElement {
    let mut r = FieldElement::ONE;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_slow(k, r, a);
        }
        a = mul_slow(k, a, a);
        e >>= 1;
    }
    r
}

fn build_tables(k: &Inner) -> Tables {
    let n = k.q - 1;
    let factors: Vec<u64> = if n == 1 {
        Vec::new()
    } else {
        nt::factorize(n)
            .expect("q - 1 factors below the table limit")
            .into_iter()
            .map(|(l, _)| l)
            .collect()
    };
    let generator = (1..k.q)
        .map(FieldElement)
        .find(|&g| factors.iter().all(|&l| pow_slow(k, g, n / l) != FieldElement::ONE))
        .expect("multiplicative group is cyclic");
    let n = n as usize;
    let mut exp = vec![0u32; 2 * n];
    let mut log = vec![0u32; k.q as usize];
    let mut x = FieldElement::ONE;
    for i in 0..n {
        exp[i] = x.0 as u32;
        exp[i + n] = x.0 as u32;
        log[x.0 as usize] = i as u32;
        x = mul_slow(k, x, generator);
    }
    Tables { exp, log }
}
