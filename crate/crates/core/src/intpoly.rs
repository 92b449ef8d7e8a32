//! Exact integer polynomial and matrix arithmetic, plus numeric root
//! extraction that is only ever used to *propose* objects that are then
//! checked exactly.
//!
//! Polynomials are ascending `Vec<BigInt>` without trailing zeros.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type IntPoly = Vec<BigInt>;

pub fn trim(mut a: IntPoly) -> IntPoly {
    while a.last().is_some_and(Zero::is_zero) {
        a.pop();
    }
    a
}

pub fn from_i64(c: &[i64]) -> IntPoly {
    trim(c.iter().map(|&x| BigInt::from(x)).collect())
}

pub fn degree(a: &[BigInt]) -> Option<usize> {
    a.iter().rposition(|c| !c.is_zero())
}

pub fn is_monic(a: &[BigInt]) -> bool {
    a.last().is_some_and(One::is_one)
}

pub fn add(a: &[BigInt], b: &[BigInt]) -> IntPoly {
    let n = a.len().max(b.len());
    let zero = BigInt::zero();
    trim((0..n).map(|i| a.get(i).unwrap_or(&zero) + b.get(i).unwrap_or(&zero)).collect())
}

pub fn sub(a: &[BigInt], b: &[BigInt]) -> IntPoly {
    let n = a.len().max(b.len());
    let zero = BigInt::zero();
    trim((0..n).map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero)).collect())
}

pub fn scale(c: &BigInt, a: &[BigInt]) -> IntPoly {
    trim(a.iter().map(|x| x * c).collect())
}

pub fn mul(a: &[BigInt], b: &[BigInt]) -> IntPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

pub fn eval(a: &[BigInt], x: &BigInt) -> BigInt {
    a.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// Division by a monic polynomial; exact over the integers.
pub fn divrem_monic(a: &[BigInt], m: &[BigInt]) -> (IntPoly, IntPoly) {
    assert!(is_monic(m), "divisor must be monic");
    let dm = m.len() - 1;
    let mut r = trim(a.to_vec());
    if r.len() <= dm {
        return (Vec::new(), r);
    }
    let mut q = vec![BigInt::zero(); r.len() - dm];
    while r.len() > dm {
        let top = r.len() - 1;
        let c = r[top].clone();
        let shift = top - dm;
        for (i, mi) in m.iter().enumerate() {
            r[shift + i] -= &c * mi;
        }
        q[shift] = c;
        r = trim(r);
    }
    (trim(q), r)
}

/// Exact quotient `a / b` over the integers, if it exists.
pub fn div_exact(a: &[BigInt], b: &[BigInt]) -> Option<IntPoly> {
    let db = degree(b)?;
    let lead = &b[db];
    let mut r = trim(a.to_vec());
    if r.is_empty() {
        return Some(Vec::new());
    }
    if r.len() <= db {
        return None;
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    while let Some(dr) = degree(&r) {
        if dr < db {
            return None;
        }
        let (c, rest) = r[dr].div_rem(lead);
        if !rest.is_zero() {
            return None;
        }
        let shift = dr - db;
        for (i, bi) in b[..=db].iter().enumerate() {
            r[shift + i] -= &c * bi;
        }
        q[shift] = c;
        r = trim(r);
    }
    Some(trim(q))
}

pub fn content(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Primitive part with a positive leading coefficient.
pub fn primitive(a: &[BigInt]) -> IntPoly {
    let a = trim(a.to_vec());
    if a.is_empty() {
        return a;
    }
    let mut c = content(&a);
    if a.last().unwrap().is_negative() {
        c = -c;
    }
    a.iter().map(|x| x / &c).collect()
}

pub fn derivative(a: &[BigInt]) -> IntPoly {
    trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect(),
    )
}

fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> IntPoly {
    let db = degree(b).expect("nonzero divisor");
    let lead = b[db].clone();
    let mut r = trim(a.to_vec());
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = r[dr].clone();
        r = r.iter().map(|x| x * &lead).collect();
        let shift = dr - db;
        for (i, bi) in b[..=db].iter().enumerate() {
            r[shift + i] -= &c * bi;
        }
        r = primitive_keep_sign(&trim(r));
    }
    r
}

fn primitive_keep_sign(a: &[BigInt]) -> IntPoly {
    let c = content(a);
    if c.is_zero() || c.is_one() {
        return a.to_vec();
    }
    a.iter().map(|x| x / &c).collect()
}

/// Greatest common divisor over `Q`, returned primitive with positive leading coefficient.
pub fn gcd(a: &[BigInt], b: &[BigInt]) -> IntPoly {
    let mut x = primitive(a);
    let mut y = primitive(b);
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = pseudo_rem(&x, &y);
        x = y;
        y = primitive(&r);
    }
    primitive(&x)
}

/// Yun's squarefree decomposition over `Q`: `a = c * prod s_k^k` where the
/// returned pairs are `(s_k, k)` with `s_k` primitive and nonconstant.
pub fn squarefree_decomposition(a: &[BigInt]) -> Vec<(IntPoly, usize)> {
    let a = primitive(a);
    if degree(&a).unwrap_or(0) == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let da = derivative(&a);
    let g = gcd(&a, &da);
    let mut b = div_exact(&scale(&g[g.len() - 1], &a), &g)
        .map(|x| primitive(&x))
        .expect("gcd divides");
    let mut c = div_exact(&scale(&g[g.len() - 1], &da), &g).expect("gcd divides");
    let mut k = 1;
    loop {
        let d = sub(&c, &derivative(&b));
        if degree(&b).unwrap_or(0) == 0 {
            break;
        }
        let s = gcd(&b, &d);
        if degree(&s).unwrap_or(0) > 0 {
            out.push((s.clone(), k));
        }
        let ls = s[s.len() - 1].clone();
        b = primitive(&div_exact(&scale(&ls, &b), &s).expect("divides"));
        c = div_exact(&scale(&ls, &d), &s).expect("divides");
        k += 1;
    }
    out
}

/// Squarefree part (product of distinct irreducible factors), primitive.
pub fn squarefree_part(a: &[BigInt]) -> IntPoly {
    squarefree_decomposition(a)
        .into_iter()
        .fold(vec![BigInt::one()], |acc, (s, _)| mul(&acc, &s))
}

pub type IntMatrix = Vec<Vec<BigInt>>;

/// Fraction-free (Bareiss) determinant.
pub fn determinant(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Characteristic polynomial `det(T I - A)` by Faddeev-LeVerrier.
pub fn charpoly(a: &IntMatrix) -> IntPoly {
    let n = a.len();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut mk: IntMatrix = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = mat_mul(a, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        mk = next;
        let am = mat_mul(a, &mk);
        let trace: BigInt = (0..n).map(|i| &am[i][i]).sum();
        coeffs[n - k] = -trace / BigInt::from(k);
    }
    coeffs
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            let aik = &a[i][k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += aik * &bk[j];
            }
        }
    }
    out
}

/// `T^e mod m` for monic `m`.
pub fn x_pow_mod(e: u64, m: &[BigInt]) -> IntPoly {
    let mut result = divrem_monic(&[BigInt::one()], m).1;
    let mut base = divrem_monic(&[BigInt::zero(), BigInt::one()], m).1;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = divrem_monic(&mul(&result, &base), m).1;
        }
        base = divrem_monic(&mul(&base, &base), m).1;
        e >>= 1;
    }
    result
}

/// Matrix of multiplication by `r` on `Z[T]/(m)` in the basis `1, T, ..., T^{n-1}`
/// (column `j` holds `T^j r mod m`).
pub fn multiplication_matrix(r: &[BigInt], m: &[BigInt]) -> IntMatrix {
    let n = m.len() - 1;
    let mut cols = Vec::with_capacity(n);
    let mut cur = divrem_monic(r, m).1;
    for _ in 0..n {
        cols.push(cur.clone());
        let shifted: IntPoly = std::iter::once(BigInt::zero()).chain(cur).collect();
        cur = divrem_monic(&shifted, m).1;
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| cols[j].get(i).cloned().unwrap_or_default())
                .collect()
        })
        .collect()
}

/// `Res(m, r)` for monic `m`, as the determinant of multiplication by `r`.
pub fn resultant_monic(m: &[BigInt], r: &[BigInt]) -> BigInt {
    determinant(&multiplication_matrix(r, m))
}

/// Power sums `s_1..s_count` of the roots of a monic polynomial, by Newton's identities.
pub fn power_sums(p: &[BigInt], count: usize) -> Vec<BigInt> {
    assert!(is_monic(p));
    let n = p.len() - 1;
    // e_k with P = sum (-1)^k e_k T^{n-k}
    let e: Vec<BigInt> = (0..=n)
        .map(|k| {
            let c = &p[n - k];
            if k % 2 == 0 {
                c.clone()
            } else {
                -c
            }
        })
        .collect();
    let mut s: Vec<BigInt> = Vec::with_capacity(count + 1);
    s.push(BigInt::from(n));
    for m in 1..=count {
        let mut acc = BigInt::zero();
        for i in 1..m.min(n + 1) {
            let term = &e[i] * &s[m - i];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        if m <= n {
            let term = &e[m] * BigInt::from(m);
            if m % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        s.push(acc);
    }
    s.split_off(1)
}

/// Monic polynomial of degree `n` with the given power sums `s_1..s_n`,
/// or the first index whose elementary symmetric function is not integral.
pub fn from_power_sums(s: &[BigInt], n: usize) -> Result<IntPoly, usize> {
    let mut e = vec![BigInt::one()];
    for k in 1..=n {
        let mut acc = BigInt::zero();
        for i in 1..=k {
            let term = &e[k - i] * &s[i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let (q, r) = acc.div_rem(&BigInt::from(k));
        if !r.is_zero() {
            return Err(k);
        }
        e.push(q);
    }
    let mut p = vec![BigInt::zero(); n + 1];
    for (k, ek) in e.iter().enumerate() {
        p[n - k] = if k % 2 == 0 { ek.clone() } else { -ek };
    }
    Ok(p)
}

fn to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Simple roots of a squarefree polynomial (Aberth iteration followed by
/// Newton polishing).
fn simple_roots(p: &[BigInt]) -> Vec<Complex64> {
    let n = degree(p).unwrap_or(0);
    if n == 0 {
        return Vec::new();
    }
    let lead = to_f64(&p[n]);
    let c0 = to_f64(&p[0]).abs();
    // Scale T = s z so that the product of root moduli is 1 (when c0 != 0).
    let s = if c0 > 0.0 {
        (c0 / lead.abs()).powf(1.0 / n as f64)
    } else {
        1.0
    };
    let coeffs: Vec<f64> = (0..=n).map(|i| to_f64(&p[i]) * s.powi(i as i32) / (lead * s.powi(n as i32))).collect();
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut f = Complex64::new(coeffs[n], 0.0);
        let mut df = Complex64::new(0.0, 0.0);
        for i in (0..n).rev() {
            df = df * z + f;
            f = f * z + coeffs[i];
        }
        (f, df)
    };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..1000 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (f, df) = eval(z[i]);
            if f.norm() == 0.0 {
                continue;
            }
            let ratio = f / df;
            let sum: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            z[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-16 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (f, df) = eval(*zi);
            if df.norm() == 0.0 {
                break;
            }
            *zi -= f / df;
        }
    }
    let mut roots: Vec<Complex64> = z.into_iter().map(|zi| zi * s).collect();
    // Input is squarefree, so a near-real root is a real root.
    for r in roots.iter_mut() {
        if r.im.abs() < 1e-14 * r.norm().max(1.0) {
            r.im = 0.0;
        }
    }
    roots
}

/// Distinct complex roots with multiplicities, sorted by argument in
/// `(-pi, pi]` and then by modulus. Multiplicities come from the exact
/// squarefree decomposition, so only simple roots are ever approximated.
pub fn complex_roots(p: &[BigInt]) -> Vec<(Complex64, usize)> {
    let mut out = Vec::new();
    for (s, k) in squarefree_decomposition(p) {
        for r in simple_roots(&s) {
            out.push((r, k));
        }
    }
    out.sort_by(|a, b| {
        let ka = (a.0.arg(), a.0.norm());
        let kb = (b.0.arg(), b.0.norm());
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });
    out
}

/// Factorization of a monic integer polynomial into monic irreducibles
/// over `Q`, with multiplicities, sorted by (degree, coefficients).
///
/// Candidate factors are products of subsets of numerically computed roots,
/// rounded to integers; a candidate is accepted only when it divides exactly.
/// Coefficients beyond f64 precision can make a factor go unnoticed.
pub fn factor_monic(p: &[BigInt]) -> Vec<(IntPoly, usize)> {
    assert!(is_monic(p), "factor_monic needs a monic polynomial");
    let mut out = Vec::new();
    for (s, k) in squarefree_decomposition(p) {
        let mut rest = s;
        let mut roots = simple_roots(&rest);
        'outer: while roots.len() > 1 {
            let n = roots.len();
            for size in 1..=n / 2 {
                for subset in combinations(n, size) {
                    let cand = round_product(subset.iter().map(|&i| roots[i]));
                    let Some(cand) = cand else { continue };
                    if let Some(q) = div_exact(&rest, &cand) {
                        out.push((cand, k));
                        rest = q;
                        roots = subset_complement(&roots, &subset);
                        continue 'outer;
                    }
                }
            }
            break;
        }
        if degree(&rest).unwrap_or(0) > 0 {
            out.push((rest, k));
        }
    }
    out.sort_by(|a, b| {
        (a.0.len(), &a.0, a.1).cmp(&(b.0.len(), &b.0, b.1))
    });
    out
}

fn subset_complement(roots: &[Complex64], subset: &[usize]) -> Vec<Complex64> {
    roots
        .iter()
        .enumerate()
        .filter(|(i, _)| !subset.contains(i))
        .map(|(_, r)| *r)
        .collect()
}

fn round_product(roots: impl Iterator<Item = Complex64>) -> Option<IntPoly> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= ci * r;
        }
        c = next;
    }
    let mut out = Vec::with_capacity(c.len());
    for ci in c {
        if ci.im.abs() > 1e-6 * (1.0 + ci.re.abs()) {
            return None;
        }
        let rounded = ci.re.round();
        if !rounded.is_finite() {
            return None;
        }
        out.push(BigInt::from(rounded as i128));
    }
    Some(out)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        from_i64(c)
    }

    #[test]
    fn determinant_small() {
        let m: IntMatrix = vec![
            vec![2.into(), 0.into(), 1.into()],
            vec![1.into(), 3.into(), 2.into()],
            vec![1.into(), 1.into(), 1.into()],
        ];
        // 2(3-2) - 0 + 1(1-3) = 0
        assert_eq!(determinant(&m), BigInt::zero());
        let m: IntMatrix = vec![vec![0.into(), 1.into()], vec![1.into(), 0.into()]];
        assert_eq!(determinant(&m), BigInt::from(-1));
    }

    #[test]
    fn charpoly_of_companion_is_polynomial() {
        let poly = p(&[9, 3, 1, 1, 1]);
        let comp = multiplication_matrix(&p(&[0, 1]), &poly);
        assert_eq!(charpoly(&comp), poly);
    }

    #[test]
    fn resultant_against_linear_is_evaluation() {
        let poly = p(&[3, 0, 1]);
        assert_eq!(resultant_monic(&poly, &p(&[-1, 1])), BigInt::from(4));
    }

    #[test]
    fn power_sums_round_trip() {
        let poly = p(&[9, -3, 1, -1, 1]);
        let s = power_sums(&poly, 4);
        assert_eq!(from_power_sums(&s, 4).unwrap(), poly);
        assert_eq!(from_power_sums(&[BigInt::from(1), BigInt::from(0)], 2), Err(2));
    }

    #[test]
    fn gcd_and_squarefree() {
        let a = mul(&p(&[3, 0, 1]), &p(&[3, 0, 1]));
        let b = mul(&p(&[3, 0, 1]), &p(&[1, 1]));
        assert_eq!(gcd(&a, &b), p(&[3, 0, 1]));
        let dec = squarefree_decomposition(&mul(&a, &p(&[-2, 1])));
        assert_eq!(dec, vec![(p(&[-2, 1]), 1), (p(&[3, 0, 1]), 2)]);
    }

    #[test]
    fn roots_with_multiplicity() {
        let a = mul(&p(&[11, 0, 1]), &p(&[11, 0, 1]));
        let r = complex_roots(&a);
        assert_eq!(r.len(), 2);
        for (z, k) in r {
            assert_eq!(k, 2);
            assert!((z.norm() - 11f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn factoring_examples() {
        let a = mul(&p(&[11, 0, 1]), &p(&[11, 0, 1]));
        assert_eq!(factor_monic(&a), vec![(p(&[11, 0, 1]), 2)]);
        let b = mul(&p(&[2, 1, 1]), &p(&[-1, 1]));
        assert_eq!(factor_monic(&b), vec![(p(&[-1, 1]), 1), (p(&[2, 1, 1]), 1)]);
        // x^4 + 1 is irreducible over Q but reducible mod every prime.
        assert_eq!(factor_monic(&p(&[1, 0, 0, 0, 1])), vec![(p(&[1, 0, 0, 0, 1]), 1)]);
    }
}
