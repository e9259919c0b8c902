//! Exact test of whether the linearization can be symmetric in L²_ρ: the
//! Taylor coefficients of the profile ODE and of the consistency condition
//! f^{n/2}(f^{n/2})‴ = −n f^{n−1}f‴ + y/(n+4) are expanded at y = 0 with
//! f(0) = 1, f′(0) = f‴(0) = 0, f″(0) = b, and the values of b² that make them
//! agree at orders y⁴ and y⁶ are compared.

use super::SpectralError;
use crate::numerics::series::rat;
use crate::numerics::{Poly, Ring, Series};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};
use std::collections::BTreeSet;

const ORDER: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// A nonzero b² satisfies both orders.
    Symmetric,
    /// The candidate sets are disjoint.
    NotSymmetric,
    /// The sets meet only at b = 0.
    Degenerate,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetryVerdict {
    #[serde(serialize_with = "ser_rat")]
    pub n: BigRational,
    pub matched_through: usize,
    /// Values of b² forced by agreement at y⁴ and y⁶.
    #[serde(serialize_with = "ser_rats")]
    pub b_candidates_y4: Vec<BigRational>,
    #[serde(serialize_with = "ser_rats")]
    pub b_candidates_y6: Vec<BigRational>,
    /// Closed-form b² expressions at y⁴ and y⁶ as printed, when defined.
    #[serde(serialize_with = "ser_opt_rat")]
    pub printed_y4: Option<BigRational>,
    #[serde(serialize_with = "ser_opt_rat")]
    pub printed_y6: Option<BigRational>,
    pub verdict: Verdict,
}

pub fn rat_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn ser_rat<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rat_string(r))
}

fn ser_rats<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rat_string))
}

fn ser_opt_rat<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_some(&rat_string(r)),
        None => s.serialize_none(),
    }
}

/// Parses "p/q", an integer, or a terminating decimal into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational, SpectralError> {
    let bad = || SpectralError::Domain(format!("'{text}' is not an exact rational"));
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{ip}{fp}").parse().map_err(|_| bad())?;
        return Ok(BigRational::new(digits, BigInt::from(10).pow(fp.len() as u32)));
    }
    Ok(BigRational::from_integer(t.parse().map_err(|_| bad())?))
}

fn series(c: &[Poly]) -> Series<Poly> {
    Series::new(c.to_vec(), ORDER).expect("order within cap")
}

fn falling3(j: usize) -> BigRational {
    rat((j * (j - 1) * (j - 2)) as i64, 1)
}

fn initial() -> Vec<Poly> {
    vec![Poly::one_elem(), Poly::zero_elem(), Poly::monomial(rat(1, 2), 1)]
}

/// Coefficients c_0..=c_top of the profile ODE f‴ = y f^{1−n}/(n+4).
fn profile_coeffs(n: &BigRational, top: usize) -> Vec<Poly> {
    let one = rat(1, 1);
    let mut c = initial();
    for j in 3..=top {
        let rhs = series(&c).pow(&(&one - n)).expect("unit constant").shift_up(1);
        c.push(rhs.coeff(j - 3).scale(&(&one / ((n + rat(4, 1)) * falling3(j)))));
    }
    c
}

/// Coefficients forced by the consistency condition, solved order by order.
fn consistency_coeffs(n: &BigRational, top: usize) -> Vec<Poly> {
    let half = n / rat(2, 1);
    let one = rat(1, 1);
    let mut c = initial();
    c.push(Poly::zero_elem());
    for j in 4..=top {
        let mut trial = c.clone();
        trial.push(Poly::zero_elem());
        let f = series(&trial);
        let g = f.pow(&half).expect("unit constant");
        let lhs = g.mul(&g.diff(3)).add(&f.pow(&(n - &one)).expect("unit constant").mul(&f.diff(3)).scale(n));
        let y = Series::variable(ORDER).expect("order").scale(&(&one / (n + rat(4, 1))));
        let r0 = lhs.sub(&y).coeff(j - 3);
        let slope = rat(3, 2) * n * falling3(j);
        c.push(r0.scale(&(-one.clone() / slope)));
    }
    c
}

/// Differences (profile − consistency) of the coefficients of y⁴ and y⁶ as
/// polynomials in b.
pub fn coefficient_differences(n: &BigRational) -> [Poly; 2] {
    let p = profile_coeffs(n, 6);
    let q = consistency_coeffs(n, 6);
    [p[4].sub(&q[4]), p[6].sub(&q[6])]
}

/// Nonnegative-root set in z = b² of a polynomial in b that is even after
/// removing its b^k factor: 0 when k > 0, plus the root of the remaining
/// linear factor in z.
fn b2_roots(d: &Poly) -> Result<Vec<BigRational>, SpectralError> {
    let mut out = BTreeSet::new();
    if d.is_zero_elem() {
        return Err(SpectralError::Domain("coefficients agree identically in b".into()));
    }
    let k = d.zero_multiplicity();
    if k > 0 {
        out.insert(BigRational::zero());
    }
    let r = d.shift_down(k);
    match r.degree() {
        Some(0) => {}
        Some(2) if r.coeff(1).is_zero() => {
            out.insert(-r.coeff(0) / r.coeff(2));
        }
        _ => return Err(SpectralError::Domain(format!("unexpected remainder in b: {r}"))),
    }
    Ok(out.into_iter().collect())
}

pub fn printed_b2_y4(n: &BigRational) -> Option<BigRational> {
    let i = |k: i64| rat(k, 1);
    let den = i(3) * n * n * n + i(6) * n * n - i(24) * n;
    (!den.is_zero()).then(|| -i(6) * n * (n * n + i(2) * n - i(8)) * (i(3) * n - i(2)) / (&den * &den))
}

pub fn printed_b2_y6(n: &BigRational) -> Option<BigRational> {
    let i = |k: i64| rat(k, 1);
    let n2 = n * n;
    let n3 = &n2 * n;
    let den = i(9) * &n3 * n - i(40) * &n3 - i(188) * &n2 + i(464) * n;
    let num = i(8) * n * (i(9) * &n3 - i(40) * &n2 - i(188) * n + i(464)) * (i(3) * n - i(2));
    (!den.is_zero()).then(|| num / (&den * &den))
}

pub fn symmetry_certificate(n: &BigRational) -> Result<SymmetryVerdict, SpectralError> {
    if n.is_zero() || !n.is_positive() {
        return Err(SpectralError::Domain(format!("certificate needs n > 0, got {}", rat_string(n))));
    }
    let [d4, d6] = coefficient_differences(n);
    let y4 = b2_roots(&d4)?;
    let y6 = b2_roots(&d6)?;
    let shared: Vec<&BigRational> = y4.iter().filter(|z| y6.contains(z) && !z.is_negative()).collect();
    let verdict = if shared.iter().any(|z| !z.is_zero()) {
        Verdict::Symmetric
    } else if shared.is_empty() {
        Verdict::NotSymmetric
    } else {
        Verdict::Degenerate
    };
    Ok(SymmetryVerdict {
        n: n.clone(),
        matched_through: 3,
        b_candidates_y4: y4,
        b_candidates_y6: y6,
        printed_y4: printed_b2_y4(n),
        printed_y6: printed_b2_y6(n),
        verdict,
    })
}
