//! Exact arithmetic in prime fields `F_p` and their quadratic extensions `F_{p^2}`.
//!
//! Elements are stored as a pair of coefficients `c0 + c1*t` where `t` is a root
//! of the field's fixed irreducible modulus. Prime-field elements always have
//! `c1 = 0`. Fields are capped at `p <= 11` and `q <= 121` so that every search
//! over the field stays exhaustive.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported characteristic.
pub const MAX_PRIME: u8 = 11;
/// Largest supported field cardinality.
pub const MAX_ORDER: u32 = 121;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("unsupported extension degree {0} (expected 1 or 2)")]
    UnsupportedDegree(u32),
    #[error("field of characteristic {p} and degree {deg} exceeds the supported size (p <= 11, q <= 121)")]
    TooLarge { p: u32, deg: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse field element {0:?}")]
    Parse(String),
}

/// Monic quadratic `t^2 + c1*t + c0` over `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Modulus {
    pub c0: u8,
    pub c1: u8,
}

/// Description of `F_p` (`deg = 1`) or `F_{p^2}` (`deg = 2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u8,
    deg: u8,
    modulus: Option<Modulus>,
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Builds `F_p` or `F_{p^2}`.
///
/// The quadratic extension uses `t^2 - n` with `n` the least quadratic
/// non-residue for odd `p`, and `t^2 + t + 1` for `p = 2`.
pub fn make_field(p: u32, deg: u32) -> Result<FieldSpec, GfError> {
    if !is_prime(p) {
        return Err(GfError::NotPrime(p));
    }
    if deg != 1 && deg != 2 {
        return Err(GfError::UnsupportedDegree(deg));
    }
    if p > MAX_PRIME as u32 || p.pow(deg) > MAX_ORDER {
        return Err(GfError::TooLarge { p, deg });
    }
    let p8 = p as u8;
    let modulus = (deg == 2).then(|| default_modulus(p8));
    Ok(FieldSpec { p: p8, deg: deg as u8, modulus })
}

fn default_modulus(p: u8) -> Modulus {
    if p == 2 {
        return Modulus { c0: 1, c1: 1 };
    }
    let pw = p as u32;
    let squares: Vec<u32> = (0..pw).map(|x| x * x % pw).collect();
    let n = (1..pw).find(|n| !squares.contains(n)).expect("odd prime has a non-residue");
    Modulus { c0: (pw - n) as u8, c1: 0 }
}

impl FieldSpec {
    pub fn p(&self) -> u32 {
        self.p as u32
    }

    pub fn deg(&self) -> u32 {
        self.deg as u32
    }

    pub fn modulus(&self) -> Option<Modulus> {
        self.modulus
    }

    /// Cardinality `p^deg`.
    pub fn q(&self) -> u32 {
        (self.p as u32).pow(self.deg as u32)
    }

    pub fn is_prime_field(&self) -> bool {
        self.deg == 1
    }

    /// The quadratic extension of a prime field; `None` for a field that is
    /// already an extension.
    pub fn extension(&self) -> Option<FieldSpec> {
        if self.deg == 1 {
            Some(FieldSpec { p: self.p, deg: 2, modulus: Some(default_modulus(self.p)) })
        } else {
            None
        }
    }

    /// The prime subfield.
    pub fn prime_field(&self) -> FieldSpec {
        FieldSpec { p: self.p, deg: 1, modulus: None }
    }

    pub fn zero(&self) -> Fe {
        Fe { field: *self, c0: 0, c1: 0 }
    }

    pub fn one(&self) -> Fe {
        Fe { field: *self, c0: 1, c1: 0 }
    }

    /// Image of an integer under `Z -> F_p -> self`.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe { field: *self, c0: n.rem_euclid(self.p as i64) as u8, c1: 0 }
    }

    pub fn from_coeffs(&self, c0: u32, c1: u32) -> Fe {
        let p = self.p as u32;
        let c1 = if self.deg == 1 { 0 } else { c1 % p };
        Fe { field: *self, c0: (c0 % p) as u8, c1: c1 as u8 }
    }

    /// The element with canonical index `idx` (`c0 + p*c1`).
    pub fn element(&self, idx: u32) -> Fe {
        debug_assert!(idx < self.q());
        let p = self.p as u32;
        Fe { field: *self, c0: (idx % p) as u8, c1: (idx / p) as u8 }
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        let field = *self;
        (0..self.q()).map(move |i| field.element(i))
    }

    /// The extension generator `t`.
    pub fn generator(&self) -> Option<Fe> {
        (self.deg == 2).then_some(Fe { field: *self, c0: 0, c1: 1 })
    }

    /// Parses the textual element format: `"3"` in a prime field, `"2+1t"` in
    /// an extension. Plain integers are accepted in both.
    pub fn parse_element(&self, s: &str) -> Result<Fe, GfError> {
        let s = s.trim();
        let err = || GfError::Parse(s.to_string());
        let parse_int = |t: &str| t.trim().parse::<i64>().map_err(|_| err());
        if let Some(body) = s.strip_suffix('t') {
            if self.deg != 2 {
                return Err(err());
            }
            // "c0+c1t", "c1t", "t", "c0-c1t"
            let split = body.rfind(['+', '-']).filter(|&i| i > 0);
            let (c0, c1) = match split {
                Some(i) => {
                    let c0 = parse_int(&body[..i])?;
                    let rest = &body[i..];
                    let c1 = match rest {
                        "+" => 1,
                        "-" => -1,
                        _ => parse_int(rest.strip_prefix('+').unwrap_or(rest))?,
                    };
                    (c0, c1)
                }
                None => {
                    let c1 = match body {
                        "" | "+" => 1,
                        "-" => -1,
                        _ => parse_int(body)?,
                    };
                    (0, c1)
                }
            };
            let p = self.p as i64;
            return Ok(self.from_coeffs(c0.rem_euclid(p) as u32, c1.rem_euclid(p) as u32));
        }
        Ok(self.from_int(parse_int(s)?))
    }

    fn reduce(&self, c0: u32, c1: u32, c2: u32) -> (u8, u8) {
        // c0 + c1 t + c2 t^2 with t^2 = -m1 t - m0
        let p = self.p as u32;
        let (r0, r1) = match self.modulus {
            Some(m) => {
                let m0 = m.c0 as u32;
                let m1 = m.c1 as u32;
                let r0 = (c0 + c2 * (p - m0) % p) % p;
                let r1 = (c1 + c2 * ((p - m1) % p) % p) % p;
                (r0, r1)
            }
            None => (c0 % p, c1 % p),
        };
        (r0 as u8, r1 as u8)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q())
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("FieldSpec", 3)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("deg", &self.deg)?;
        st.serialize_field("q", &self.q())?;
        st.end()
    }
}

/// An element `c0 + c1*t` of a [`FieldSpec`].
///
/// Ordering is the canonical element order: lexicographic on `(c1, c0)`,
/// which coincides with the canonical index `c0 + p*c1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fe {
    field: FieldSpec,
    c0: u8,
    c1: u8,
}

impl Fe {
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn coeffs(&self) -> (u32, u32) {
        (self.c0 as u32, self.c1 as u32)
    }

    /// Canonical index in `0..q`.
    pub fn index(&self) -> u32 {
        self.c0 as u32 + self.field.p as u32 * self.c1 as u32
    }

    pub fn is_zero(&self) -> bool {
        self.c0 == 0 && self.c1 == 0
    }

    pub fn is_one(&self) -> bool {
        self.c0 == 1 && self.c1 == 0
    }

    /// True when the element lies in the prime subfield.
    pub fn in_prime_field(&self) -> bool {
        self.c1 == 0
    }

    /// Embeds a prime-field element into the quadratic extension `ext`.
    pub fn embed(&self, ext: FieldSpec) -> Fe {
        assert_eq!(self.field.p, ext.p, "embedding across characteristics");
        if self.field == ext {
            return *self;
        }
        assert!(self.in_prime_field(), "element not in the prime subfield");
        Fe { field: ext, c0: self.c0, c1: 0 }
    }

    /// Maps an element of an extension back to the prime field, if it lies there.
    pub fn restrict(&self, base: FieldSpec) -> Option<Fe> {
        if self.field == base {
            return Some(*self);
        }
        (base.deg == 1 && base.p == self.field.p && self.c1 == 0).then_some(Fe { field: base, c0: self.c0, c1: 0 })
    }

    fn check(&self, rhs: &Fe) {
        assert_eq!(self.field, rhs.field, "field mismatch: {} vs {}", self.field, rhs.field);
    }

    pub fn inv(&self) -> Result<Fe, GfError> {
        if self.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        // a^(q-2) = a^{-1} in a field of order q
        Ok(self.pow(self.field.q() as u64 - 2))
    }

    pub fn pow(&self, mut e: u64) -> Fe {
        let mut base = *self;
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Frobenius `x -> x^p`.
    pub fn frobenius(&self) -> Fe {
        self.pow(self.field.p as u64)
    }
}

impl Add for Fe {
    type Output = Fe;
    fn add(self, rhs: Fe) -> Fe {
        self.check(&rhs);
        let p = self.field.p as u16;
        Fe {
            field: self.field,
            c0: ((self.c0 as u16 + rhs.c0 as u16) % p) as u8,
            c1: ((self.c1 as u16 + rhs.c1 as u16) % p) as u8,
        }
    }
}

impl Neg for Fe {
    type Output = Fe;
    fn neg(self) -> Fe {
        let p = self.field.p;
        Fe { field: self.field, c0: (p - self.c0) % p, c1: (p - self.c1) % p }
    }
}

impl Sub for Fe {
    type Output = Fe;
    fn sub(self, rhs: Fe) -> Fe {
        self + (-rhs)
    }
}

impl Mul for Fe {
    type Output = Fe;
    fn mul(self, rhs: Fe) -> Fe {
        self.check(&rhs);
        let (a0, a1) = self.coeffs();
        let (b0, b1) = rhs.coeffs();
        let (c0, c1) = self.field.reduce(a0 * b0, a0 * b1 + a1 * b0, a1 * b1);
        Fe { field: self.field, c0, c1 }
    }
}

impl PartialOrd for Fe {
    fn partial_cmp(&self, other: &Fe) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fe {
    fn cmp(&self, other: &Fe) -> Ordering {
        (self.c1, self.c0).cmp(&(other.c1, other.c0))
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.deg == 1 {
            write!(f, "{}", self.c0)
        } else {
            write!(f, "{}+{}t", self.c0, self.c1)
        }
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Serialize for Fe {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for FieldSpec {
    type Err = GfError;

    /// `"F_9"`, `"9"` or `"3^2"`.
    fn from_str(s: &str) -> Result<Self, GfError> {
        let body = s.trim().trim_start_matches("F_").trim_start_matches("GF");
        let err = || GfError::Parse(s.to_string());
        if let Some((p, d)) = body.split_once('^') {
            let p = p.parse().map_err(|_| err())?;
            let d = d.parse().map_err(|_| err())?;
            return make_field(p, d);
        }
        let q: u32 = body.parse().map_err(|_| err())?;
        for p in [2u32, 3, 5, 7, 11] {
            if q == p {
                return make_field(p, 1);
            }
            if q == p * p {
                return make_field(p, 2);
            }
        }
        Err(err())
    }
}

/// Least `r` (canonical order) with `r^k = a`, found by scanning the field.
pub fn kth_root(a: Fe, k: u64) -> Option<Fe> {
    assert!(k >= 1, "k must be positive");
    if a.is_zero() {
        return Some(a);
    }
    a.field().elements().find(|r| r.pow(k) == a)
}

/// Distinct roots of `x^2 + b*x + c`, sorted canonically.
///
/// Roots are searched in the coefficients' own field first; over a prime
/// field with no roots there, they are returned in the quadratic extension.
/// A quadratic irreducible over an extension field yields an empty list.
pub fn quadratic_roots(b: Fe, c: Fe) -> Vec<Fe> {
    assert_eq!(b.field(), c.field(), "field mismatch");
    let field = b.field();
    let roots_in =
        |f: FieldSpec, b: Fe, c: Fe| -> Vec<Fe> { f.elements().filter(|&x| (x * x + b * x + c).is_zero()).collect() };
    let roots = roots_in(field, b, c);
    if !roots.is_empty() {
        return roots;
    }
    match field.extension() {
        Some(ext) => roots_in(ext, b.embed(ext), c.embed(ext)),
        None => Vec::new(),
    }
}

/// Whether `x -> x^k` is a bijection on the field, i.e. `gcd(k, q-1) = 1`.
pub fn is_power_bijective(field: FieldSpec, k: u64) -> bool {
    gcd(k, field.q() as u64 - 1) == 1
}
