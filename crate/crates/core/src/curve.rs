//! Hyperelliptic models `y^2 = f(x)`: validation, point counts and point
//! enumeration over extensions, and the passage from an even to an odd
//! degree model.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::poly::{self, Poly};
use crate::ff::{ext_field, FieldDesc, FieldElement};

/// Default cap on the number of field elements (or group elements) that an
/// enumeration may touch.
pub const DEFAULT_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    /// `deg f = 2g + 1`, one point at infinity.
    Odd,
    /// `deg f = 2g + 2`, two or zero rational points at infinity.
    Even,
}

/// A smooth model `y^2 = f(x)` over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperellipticCurve {
    base: FieldDesc,
    f: Poly,
    genus: usize,
    parity: Parity,
}

/// A point on the smooth projective model, with coordinates in some
/// extension that the caller tracks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CurvePoint {
    Affine { x: FieldElement, y: FieldElement },
    /// Point at infinity; even models have branches 0 and 1 (`y/x^{g+1} = ±sqrt(lc)`).
    Infinity { branch: u8 },
}

impl Serialize for CurvePoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `inf`, `inf1`, or `(x,y)` with packed field-element encodings.
impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Affine { x, y } => write!(f, "({},{})", x.encoding(), y.encoding()),
            CurvePoint::Infinity { branch: 0 } => f.write_str("inf"),
            CurvePoint::Infinity { branch } => write!(f, "inf{branch}"),
        }
    }
}

impl CurvePoint {
    pub fn infinity() -> CurvePoint {
        CurvePoint::Infinity { branch: 0 }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity { .. })
    }
}

/// The curve's equation with coefficients embedded in `F_{q^n}`.
#[derive(Clone, Debug)]
pub struct Extension {
    pub degree: u32,
    pub field: FieldDesc,
    pub f: Poly,
}

/// Builds a curve from a coefficient vector, checking smoothness.
pub fn validate_model(f: &[FieldElement], base: &FieldDesc) -> Result<HyperellipticCurve> {
    let f = poly::trim(f.to_vec());
    let deg = poly::degree(&f).unwrap_or(0);
    if deg < 3 {
        return Err(Error::DegreeTooSmall(deg));
    }
    let df = poly::derivative(base, &f);
    if poly::degree(&poly::gcd(base, &f, &df)) != Some(0) {
        return Err(Error::SingularModel);
    }
    Ok(HyperellipticCurve {
        base: base.clone(),
        genus: (deg - 1) / 2,
        parity: if deg % 2 == 1 { Parity::Odd } else { Parity::Even },
        f,
    })
}

type EmbeddingCache = Mutex<HashMap<(u64, Vec<u64>, u32), FieldElement>>;

fn embedding_cache() -> &'static EmbeddingCache {
    static CACHE: OnceLock<EmbeddingCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Image of the base field generator in `big`: the smallest-encoded root of
/// the base modulus. `big` must contain the base field.
fn embedding_root(base: &FieldDesc, big: &FieldDesc) -> FieldElement {
    let key = (base.p(), base.modulus().to_vec(), big.d());
    if let Some(r) = embedding_cache().lock().unwrap().get(&key) {
        return *r;
    }
    let m: Poly = base.modulus().iter().map(|&c| big.from_int(c as i64)).collect();
    let root = poly::roots(big, &m)[0];
    embedding_cache().lock().unwrap().insert(key, root);
    root
}

/// Maps an element of `base` into an extension field `big`.
pub fn embed(base: &FieldDesc, big: &FieldDesc, a: FieldElement) -> FieldElement {
    if base.d() == 1 {
        return big.from_int(a.encoding() as i64);
    }
    if base == big {
        return a;
    }
    let theta = embedding_root(base, big);
    base.coeffs(a)
        .iter()
        .rev()
        .fold(FieldElement::ZERO, |acc, &c| big.add(big.mul(acc, theta), big.from_int(c as i64)))
}

fn check_cap(size: u64, cap: u64) -> Result<()> {
    if size > cap {
        return Err(Error::CapExceeded {
            size: size.to_string(),
            cap,
        });
    }
    Ok(())
}

impl HyperellipticCurve {
    pub fn base(&self) -> &FieldDesc {
        &self.base
    }

    pub fn f(&self) -> &[FieldElement] {
        &self.f
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn p(&self) -> u64 {
        self.base.p()
    }

    pub fn q(&self) -> u64 {
        self.base.q()
    }

    pub fn leading(&self) -> FieldElement {
        *self.f.last().unwrap()
    }

    /// The equation over `F_{q^n}`.
    pub fn extension(&self, n: u32) -> Result<Extension> {
        if n == 0 {
            return Err(Error::InvalidArgument("extension degree must be >= 1".into()));
        }
        let field = ext_field(self.base.p(), self.base.d() * n)?;
        let f = self.f.iter().map(|&c| embed(&self.base, &field, c)).collect();
        Ok(Extension { degree: n, field, f })
    }

    /// Number of points at infinity over `F_{q^n}` on the smooth model.
    fn infinity_count(&self, ext: &Extension) -> u64 {
        match self.parity {
            Parity::Odd => 1,
            Parity::Even => {
                if ext.field.is_square(*ext.f.last().unwrap()) {
                    2
                } else {
                    0
                }
            }
        }
    }

    /// `#C(F_{q^n})` with the default cap.
    pub fn count_points(&self, n: u32) -> Result<u64> {
        self.count_points_capped(n, DEFAULT_CAP)
    }

    pub fn count_points_capped(&self, n: u32, cap: u64) -> Result<u64> {
        let size = self.base.q().checked_pow(n).unwrap_or(u64::MAX);
        check_cap(size, cap)?;
        let ext = self.extension(n)?;
        Ok(count_on(&ext) + self.infinity_count(&ext))
    }

    /// All points of `C(F_{q^n})`, affine points ordered by `(x, y)` encoding,
    /// then the points at infinity.
    pub fn enumerate_points(&self, n: u32) -> Result<Vec<CurvePoint>> {
        self.enumerate_points_capped(n, DEFAULT_CAP)
    }

    pub fn enumerate_points_capped(&self, n: u32, cap: u64) -> Result<Vec<CurvePoint>> {
        let size = self.base.q().checked_pow(n).unwrap_or(u64::MAX);
        check_cap(size, cap)?;
        let ext = self.extension(n)?;
        let k = &ext.field;
        let mut out = Vec::new();
        for x in k.elements() {
            let v = poly::eval(k, &ext.f, x);
            if let Some(y) = k.sqrt(v) {
                out.push(CurvePoint::Affine { x, y });
                if !y.is_zero() {
                    out.push(CurvePoint::Affine { x, y: k.neg(y) });
                }
            }
        }
        out.sort();
        for branch in 0..self.infinity_count(&ext) as u8 {
            out.push(CurvePoint::Infinity { branch });
        }
        Ok(out)
    }

    /// Whether an affine point satisfies the equation over `F_{q^n}`.
    pub fn contains(&self, ext: &Extension, pt: &CurvePoint) -> bool {
        match *pt {
            CurvePoint::Affine { x, y } => {
                ext.field.square(y) == poly::eval(&ext.field, &ext.f, x)
            }
            CurvePoint::Infinity { branch } => (branch as u64) < self.infinity_count(ext),
        }
    }

    /// Odd-degree model obtained by sending the smallest rational root `r`
    /// of `f` to infinity (`x -> r + 1/x`, `y -> y / x^{g+1}`). Odd models
    /// are returned unchanged.
    pub fn odd_model_transform(&self) -> Result<HyperellipticCurve> {
        if self.parity == Parity::Odd {
            return Ok(self.clone());
        }
        let k = &self.base;
        let roots = poly::roots(k, &self.f);
        let Some(&r) = roots.first() else {
            return Err(Error::NoRationalWeierstrass);
        };
        let shifted = taylor_shift(k, &self.f, r);
        // X^{2g+2} f(r + 1/X) = sum b_j X^{2g+2-j}
        let n = shifted.len() - 1;
        let reversed: Poly = (0..=n).map(|j| shifted[n - j]).collect();
        validate_model(&reversed, k)
    }

    /// The model `y^2 = f(a x + b)`, isomorphic for `a != 0`.
    pub fn substitute_x(&self, a: FieldElement, b: FieldElement) -> Result<HyperellipticCurve> {
        if a.is_zero() {
            return Err(Error::InvalidArgument("substitution x -> ax + b needs a != 0".into()));
        }
        let k = &self.base;
        let shifted = taylor_shift(k, &self.f, b);
        let mut scale = k.one();
        let mut out = Vec::with_capacity(shifted.len());
        for c in shifted {
            out.push(k.mul(c, scale));
            scale = k.mul(scale, a);
        }
        validate_model(&out, k)
    }

    /// The model `y^2 = c f(x)`; isomorphic over `F_q` when `c` is a nonzero square.
    pub fn scale_f(&self, c: FieldElement) -> Result<HyperellipticCurve> {
        if c.is_zero() {
            return Err(Error::InvalidArgument("scaling by zero".into()));
        }
        validate_model(&poly::scale(&self.base, c, &self.f), &self.base)
    }

    /// Canonical curve spec, e.g. `p=3; f=2,2,1,1,0,1`.
    pub fn spec(&self) -> String {
        let k = &self.base;
        let coeffs: Vec<String> = self
            .f
            .iter()
            .map(|&c| format_coefficient(k, c))
            .collect();
        if k.d() == 1 {
            format!("p={}; f={}", k.p(), coeffs.join(","))
        } else {
            format!("p={}; ext={}; f={}", k.p(), k.d(), coeffs.join(","))
        }
    }
}

impl fmt::Display for HyperellipticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec())
    }
}

fn count_on(ext: &Extension) -> u64 {
    let k = &ext.field;
    let point_count = |x: FieldElement| -> u64 {
        let v = poly::eval(k, &ext.f, x);
        if v.is_zero() {
            1
        } else if k.is_square(v) {
            2
        } else {
            0
        }
    };
    if k.q() > 1 << 16 {
        (0..k.q())
            .into_par_iter()
            .map(|c| point_count(k.element(c).unwrap()))
            .sum()
    } else {
        k.elements().map(point_count).sum()
    }
}

/// `f(t + r)` as a polynomial in `t`.
fn taylor_shift(k: &FieldDesc, f: &[FieldElement], r: FieldElement) -> Poly {
    let lin = vec![r, k.one()];
    let mut acc: Poly = Vec::new();
    for &c in f.iter().rev() {
        acc = poly::add(k, &poly::mul(k, &acc, &lin), &poly::constant(c));
    }
    // keep full length so that reversal sees the true degree
    acc.resize(f.len(), FieldElement::ZERO);
    acc
}

/// Parses a curve spec: `p=3; f=2,2,1,1,0,1` (ascending residues),
/// `p=3; f=x^5+x^3+x^2-x-1` (symbolic), optionally with `ext=d` for a
/// base field `F_{p^d}`; extension-field coefficients are written `[c0,c1,..]`.
pub fn parse_curve_spec(spec: &str) -> Result<HyperellipticCurve> {
    let mut p = None;
    let mut d = 1u32;
    let mut f_text = None;
    for part in spec.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value in {part:?}")))?;
        match key.trim() {
            "p" => {
                p = Some(
                    value
                        .trim()
                        .parse::<u64>()
                        .map_err(|_| Error::Parse(format!("bad p in {spec:?}")))?,
                )
            }
            "ext" => {
                d = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad ext in {spec:?}")))?
            }
            "f" => f_text = Some(value.trim().to_string()),
            other => return Err(Error::Parse(format!("unknown key {other:?}"))),
        }
    }
    let p = p.ok_or_else(|| Error::Parse("curve spec needs p=".into()))?;
    let f_text = f_text.ok_or_else(|| Error::Parse("curve spec needs f=".into()))?;
    let k = ext_field(p, d)?;
    let f = if f_text.contains('x') {
        parse_symbolic(&k, &f_text)?
    } else {
        split_top_level(&f_text)
            .into_iter()
            .map(|c| parse_coefficient(&k, c))
            .collect::<Result<Vec<_>>>()?
    };
    validate_model(&f, &k)
}

/// Prime-subfield elements print as integers, others as `[c0,c1,..]`.
pub fn format_coefficient(k: &FieldDesc, c: FieldElement) -> String {
    let r = k.coeffs(c);
    if r[1..].iter().all(|&x| x == 0) {
        r[0].to_string()
    } else {
        format!("[{}]", k.format(c))
    }
}

/// Splits on commas outside brackets.
pub fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

/// Inverse of [`format_coefficient`].
pub fn parse_coefficient(k: &FieldDesc, s: &str) -> Result<FieldElement> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
        k.parse(inner)
    } else {
        let n: i64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad coefficient {s:?}")))?;
        Ok(k.from_int(n))
    }
}

fn parse_symbolic(k: &FieldDesc, s: &str) -> Result<Poly> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut terms = Vec::new();
    let mut cur = String::new();
    for ch in compact.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    if !cur.is_empty() {
        terms.push(cur);
    }
    let mut coeffs: Vec<i64> = Vec::new();
    for term in terms {
        let bad = || Error::Parse(format!("bad term {term:?} in {s:?}"));
        let (sign, body) = match term.strip_prefix('-') {
            Some(rest) => (-1i64, rest),
            None => (1, term.strip_prefix('+').unwrap_or(&term)),
        };
        let (coef, exp) = match body.split_once('x') {
            None => (body.parse::<i64>().map_err(|_| bad())?, 0usize),
            Some((c, e)) => {
                let c = c.trim_end_matches('*');
                let c = if c.is_empty() { 1 } else { c.parse::<i64>().map_err(|_| bad())? };
                let e = match e.strip_prefix('^') {
                    Some(e) => e.parse::<usize>().map_err(|_| bad())?,
                    None if e.is_empty() => 1,
                    None => return Err(bad()),
                };
                (c, e)
            }
        };
        if coeffs.len() <= exp {
            coeffs.resize(exp + 1, 0);
        }
        coeffs[exp] += sign * coef;
    }
    Ok(coeffs.into_iter().map(|c| k.from_int(c)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn curve(p: u64, f: &[i64]) -> Result<HyperellipticCurve> {
        let k = ext_field(p, 1).unwrap();
        let f: Vec<_> = f.iter().map(|&c| k.from_int(c)).collect();
        validate_model(&f, &k)
    }

    fn brute_affine(k: &FieldDesc, f: &[FieldElement]) -> u64 {
        let mut n = 0;
        for x in k.elements() {
            let v = poly::eval(k, f, x);
            n += k.elements().filter(|&y| k.square(y) == v).count() as u64;
        }
        n
    }

    #[test]
    fn genus_and_parity() {
        let c = curve(3, &[0, 1, 0, 1]).unwrap();
        assert_eq!((c.genus(), c.parity()), (1, Parity::Odd));
        let c = curve(11, &[-1, 0, 0, 0, 0, 0, 1]).unwrap();
        assert_eq!((c.genus(), c.parity()), (2, Parity::Even));
        assert_eq!(curve(3, &[0, 0, 0, 0, 0, 1]).unwrap_err(), Error::SingularModel);
        assert_eq!(curve(3, &[1, 1]).unwrap_err(), Error::DegreeTooSmall(1));
    }

    #[test]
    fn hand_count_elliptic_f3() {
        // x=0: y=0; x=1: 2 is a non-square; x=2: 8+2=10=1, y=±1; plus infinity.
        let c = curve(3, &[0, 1, 0, 1]).unwrap();
        assert_eq!(c.count_points(1).unwrap(), 4);
        let pts = c.enumerate_points(1).unwrap();
        assert_eq!(pts.len(), 4);
        let k = c.base();
        assert!(pts.contains(&CurvePoint::Affine { x: k.zero(), y: k.zero() }));
        assert!(pts.contains(&CurvePoint::infinity()));
    }

    #[test]
    fn sextic_over_f11_has_two_points_at_infinity() {
        let c = curve(11, &[-1, 0, 0, 0, 0, 0, 1]).unwrap();
        let affine = brute_affine(c.base(), c.f());
        assert_eq!(c.count_points(1).unwrap(), affine + 2);
    }

    #[test]
    fn even_model_infinity_depends_on_leading_square() {
        // 2 is a non-square mod 5 but a square in F_25.
        let c = curve(5, &[1, 0, 0, 0, 0, 0, 2]).unwrap();
        let e1 = c.extension(1).unwrap();
        let e2 = c.extension(2).unwrap();
        assert_eq!(c.count_points(1).unwrap(), brute_affine(&e1.field, &e1.f));
        assert_eq!(c.count_points(2).unwrap(), brute_affine(&e2.field, &e2.f) + 2);
    }

    #[test]
    fn paper_quintic_counts_match_brute_force() {
        let c = parse_curve_spec("p=3; f=x^5+x^3+x^2-x-1").unwrap();
        for n in 1..=2 {
            let e = c.extension(n).unwrap();
            assert_eq!(c.count_points(n).unwrap(), brute_affine(&e.field, &e.f) + 1);
        }
    }

    #[test]
    fn random_curves_enumeration_consistent() {
        let k = ext_field(5, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut done = 0;
        while done < 20 {
            let deg = rng.random_range(3..=6);
            let mut f: Vec<_> = (0..deg).map(|_| k.from_int(rng.random_range(0..5))).collect();
            f.push(k.from_int(rng.random_range(1..5)));
            let Ok(c) = validate_model(&f, &k) else { continue };
            for n in 1..=2 {
                let e = c.extension(n).unwrap();
                let pts = c.enumerate_points(n).unwrap();
                assert_eq!(pts.len() as u64, c.count_points(n).unwrap());
                assert!(pts.iter().all(|pt| c.contains(&e, pt)));
                let mut sorted = pts.clone();
                sorted.sort();
                assert_eq!(sorted, pts);
                let qn = (5f64).powi(n as i32);
                let dev = (pts.len() as f64 - qn - 1.0).abs();
                assert!(dev <= 2.0 * c.genus() as f64 * qn.sqrt() + 1e-9);
            }
            done += 1;
        }
    }

    #[test]
    fn count_agrees_with_independent_field_model() {
        // F_{3^4} built from the second irreducible quartic instead of the first.
        let c = parse_curve_spec("p=3; f=x^5+x^3+x^2-x-1").unwrap();
        let prime = ext_field(3, 1).unwrap();
        let mut found = Vec::new();
        for code in 0..81u64 {
            let mut m: Poly = (0..4).map(|i| prime.from_int(((code / 3u64.pow(i)) % 3) as i64)).collect();
            m.push(prime.one());
            if poly::is_irreducible(&prime, &m) {
                found.push(m.iter().map(|e| e.encoding()).collect::<Vec<_>>());
            }
        }
        let alt = FieldDesc::with_modulus(3, &found[1]).unwrap();
        let f: Poly = c.f().iter().map(|&a| alt.from_int(a.encoding() as i64)).collect();
        assert_eq!(c.count_points(4).unwrap(), brute_affine(&alt, &f) + 1);
    }

    #[test]
    fn extension_base_field_counts() {
        // Curve over F_9 with a coefficient outside F_3: count over F_9 and F_81
        // against brute force.
        let c = parse_curve_spec("p=3; ext=2; f=1,[0,1],0,0,0,1").unwrap();
        assert_eq!(c.q(), 9);
        for n in 1..=2 {
            let e = c.extension(n).unwrap();
            assert_eq!(c.count_points(n).unwrap(), brute_affine(&e.field, &e.f) + 1);
        }
        assert_eq!(parse_curve_spec(&c.spec()).unwrap(), c);
    }

    #[test]
    fn odd_model_transform_preserves_counts() {
        let c = curve(11, &[-1, 0, 0, 0, 0, 0, 1]).unwrap();
        let odd = c.odd_model_transform().unwrap();
        assert_eq!(odd.parity(), Parity::Odd);
        assert_eq!(odd.genus(), 2);
        for n in 1..=2 {
            assert_eq!(odd.count_points(n).unwrap(), c.count_points(n).unwrap());
        }
        let already = curve(3, &[0, 1, 0, 1]).unwrap();
        assert_eq!(already.odd_model_transform().unwrap(), already);
    }

    #[test]
    fn irreducible_sextic_has_no_rational_weierstrass_point() {
        // Scan monic sextics over F_5 for the first irreducible one.
        let k = ext_field(5, 1).unwrap();
        let f = (0..5u64.pow(6))
            .map(|code| {
                let mut f: Poly = (0..6).map(|i| k.from_int(((code / 5u64.pow(i)) % 5) as i64)).collect();
                f.push(k.one());
                f
            })
            .find(|f| poly::is_irreducible(&k, f))
            .unwrap();
        let c = validate_model(&f, &k).unwrap();
        assert_eq!(c.odd_model_transform().unwrap_err(), Error::NoRationalWeierstrass);
    }

    #[test]
    fn cap_is_enforced() {
        let c = curve(11, &[-1, 0, 0, 0, 0, 0, 1]).unwrap();
        assert!(matches!(c.count_points_capped(3, 1000), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn spec_round_trip_and_symbolic_form() {
        let a = parse_curve_spec("p=3; f=2,2,1,1,0,1").unwrap();
        let b = parse_curve_spec("p=3; f=x^5+x^3+x^2-x-1").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.spec(), "p=3; f=2,2,1,1,0,1");
        assert!(parse_curve_spec("p=3").is_err());
        assert!(parse_curve_spec("q=3; f=1,2").is_err());
    }
}
