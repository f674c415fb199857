//! 2x2 matrices over a [`FieldSpec`]: arithmetic, Jordan forms and matrix k-th roots.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;
use thiserror::Error;

use crate::gf::{self, Fe, FieldSpec, GfError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatError {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("cannot parse matrix {0:?}; expected \"[[a,b],[c,d]]\"")]
    Parse(String),
    #[error(transparent)]
    Element(#[from] GfError),
    #[error("characteristic polynomial of {0} does not split over {1} or any supported extension")]
    NoSplittingField(String, FieldSpec),
}

/// A row index of a 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Row {
    First,
    Second,
}

impl Row {
    pub fn other(self) -> Row {
        match self {
            Row::First => Row::Second,
            Row::Second => Row::First,
        }
    }
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Row::First => "first",
            Row::Second => "second",
        })
    }
}

/// `[[a, b], [c, d]]`, row-major.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Matrix2 {
    pub a: Fe,
    pub b: Fe,
    pub c: Fe,
    pub d: Fe,
}

impl Matrix2 {
    pub fn new(a: Fe, b: Fe, c: Fe, d: Fe) -> Result<Matrix2, MatError> {
        let f = a.field();
        for x in [b, c, d] {
            if x.field() != f {
                return Err(MatError::FieldMismatch(f, x.field()));
            }
        }
        Ok(Matrix2 { a, b, c, d })
    }

    fn raw(a: Fe, b: Fe, c: Fe, d: Fe) -> Matrix2 {
        Matrix2 { a, b, c, d }
    }

    pub fn from_ints(field: FieldSpec, m: [[i64; 2]; 2]) -> Matrix2 {
        let e = |n| field.from_int(n);
        Matrix2::raw(e(m[0][0]), e(m[0][1]), e(m[1][0]), e(m[1][1]))
    }

    pub fn zero(field: FieldSpec) -> Matrix2 {
        Matrix2::scalar(field.zero())
    }

    pub fn identity(field: FieldSpec) -> Matrix2 {
        Matrix2::scalar(field.one())
    }

    pub fn scalar(s: Fe) -> Matrix2 {
        Matrix2::diag(s, s)
    }

    pub fn diag(x: Fe, y: Fe) -> Matrix2 {
        assert_eq!(x.field(), y.field(), "field mismatch");
        let z = x.field().zero();
        Matrix2::raw(x, z, z, y)
    }

    /// Row-major entries as a vector of the 4-dimensional matrix space.
    pub fn to_vector(&self) -> [Fe; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn from_vector(v: [Fe; 4]) -> Matrix2 {
        Matrix2::new(v[0], v[1], v[2], v[3]).expect("vector entries share a field")
    }

    pub fn field(&self) -> FieldSpec {
        self.a.field()
    }

    pub fn is_zero(&self) -> bool {
        self.to_vector().iter().all(Fe::is_zero)
    }

    pub fn is_scalar(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d
    }

    pub fn row_is_zero(&self, row: Row) -> bool {
        match row {
            Row::First => self.a.is_zero() && self.b.is_zero(),
            Row::Second => self.c.is_zero() && self.d.is_zero(),
        }
    }

    pub fn det(&self) -> Fe {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Fe {
        self.a + self.d
    }

    pub fn is_invertible(&self) -> bool {
        !self.det().is_zero()
    }

    pub fn inverse(&self) -> Option<Matrix2> {
        let inv = self.det().inv().ok()?;
        Some(Matrix2::raw(self.d * inv, -self.b * inv, -self.c * inv, self.a * inv))
    }

    pub fn scale(&self, s: Fe) -> Matrix2 {
        Matrix2::raw(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn pow(&self, mut e: u64) -> Matrix2 {
        let mut base = *self;
        let mut acc = Matrix2::identity(self.field());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// `Q * self * Q^-1`.
    pub fn conjugate_by(&self, q: &Matrix2) -> Matrix2 {
        let qi = q.inverse().expect("conjugator must be invertible");
        *q * *self * qi
    }

    pub fn map(&self, f: impl Fn(Fe) -> Fe) -> Matrix2 {
        Matrix2::raw(f(self.a), f(self.b), f(self.c), f(self.d))
    }

    /// Lifts a matrix over a prime field into the quadratic extension `ext`.
    pub fn embed(&self, ext: FieldSpec) -> Matrix2 {
        self.map(|x| x.embed(ext))
    }

    /// Pushes a matrix back to `base` when every entry lies there.
    pub fn restrict(&self, base: FieldSpec) -> Option<Matrix2> {
        Some(Matrix2::raw(
            self.a.restrict(base)?,
            self.b.restrict(base)?,
            self.c.restrict(base)?,
            self.d.restrict(base)?,
        ))
    }

    /// Brings `self` into `field`, embedding or restricting as needed.
    pub fn coerce(&self, field: FieldSpec) -> Option<Matrix2> {
        if self.field() == field {
            Some(*self)
        } else if self.field().p() == field.p() && self.field().deg() < field.deg() {
            Some(self.embed(field))
        } else {
            self.restrict(field)
        }
    }

    pub fn checked_add(&self, rhs: &Matrix2) -> Result<Matrix2, MatError> {
        same_field(self, rhs)?;
        Ok(*self + *rhs)
    }

    pub fn checked_sub(&self, rhs: &Matrix2) -> Result<Matrix2, MatError> {
        same_field(self, rhs)?;
        Ok(*self - *rhs)
    }

    pub fn checked_mul(&self, rhs: &Matrix2) -> Result<Matrix2, MatError> {
        same_field(self, rhs)?;
        Ok(*self * *rhs)
    }

    /// Parses `"[[a,b],[c,d]]"` with entries in the element syntax of `field`.
    pub fn parse(s: &str, field: FieldSpec) -> Result<Matrix2, MatError> {
        let err = || MatError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = compact.strip_prefix("[[").and_then(|r| r.strip_suffix("]]")).ok_or_else(err)?;
        let (r1, r2) = inner.split_once("],[").ok_or_else(err)?;
        let mut entries = Vec::with_capacity(4);
        for row in [r1, r2] {
            let parts: Vec<&str> = row.split(',').collect();
            if parts.len() != 2 {
                return Err(err());
            }
            for p in parts {
                entries.push(field.parse_element(p)?);
            }
        }
        Ok(Matrix2::raw(entries[0], entries[1], entries[2], entries[3]))
    }
}

fn same_field(x: &Matrix2, y: &Matrix2) -> Result<(), MatError> {
    if x.field() == y.field() {
        Ok(())
    } else {
        Err(MatError::FieldMismatch(x.field(), y.field()))
    }
}

impl Add for Matrix2 {
    type Output = Matrix2;
    fn add(self, r: Matrix2) -> Matrix2 {
        Matrix2::raw(self.a + r.a, self.b + r.b, self.c + r.c, self.d + r.d)
    }
}

impl Sub for Matrix2 {
    type Output = Matrix2;
    fn sub(self, r: Matrix2) -> Matrix2 {
        Matrix2::raw(self.a - r.a, self.b - r.b, self.c - r.c, self.d - r.d)
    }
}

impl Neg for Matrix2 {
    type Output = Matrix2;
    fn neg(self) -> Matrix2 {
        self.map(|x| -x)
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, r: Matrix2) -> Matrix2 {
        Matrix2::raw(
            self.a * r.a + self.b * r.c,
            self.a * r.b + self.b * r.d,
            self.c * r.a + self.d * r.c,
            self.c * r.b + self.d * r.d,
        )
    }
}

impl fmt::Display for Matrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Debug for Matrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Serialize for Matrix2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `(trace, det)`, so that `x^2 - tr*x + det` annihilates `m`.
pub fn char_poly(m: &Matrix2) -> (Fe, Fe) {
    (m.trace(), m.det())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JordanKind {
    Scalar { lambda: Fe },
    DiagonalDistinct { lambda: Fe, mu: Fe },
    Block { lambda: Fe },
}

impl JordanKind {
    /// Eigenvalues with multiplicity, canonically sorted.
    pub fn eigenvalues(&self) -> [Fe; 2] {
        match *self {
            JordanKind::Scalar { lambda } | JordanKind::Block { lambda } => [lambda, lambda],
            JordanKind::DiagonalDistinct { lambda, mu } => [lambda, mu],
        }
    }

    pub fn same_shape(&self, other: &JordanKind) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }
}

/// Jordan form `J` of a matrix `M` with a conjugator `P` such that `P M P^-1 = J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct JordanData {
    pub kind: JordanKind,
    pub j: Matrix2,
    pub p: Matrix2,
    /// `J` and `P` live in the quadratic extension of the input field.
    pub base_extended: bool,
}

/// Jordan form with a deterministic conjugator.
///
/// Eigenvalues are ordered canonically, so `DiagonalDistinct` always has
/// `lambda < mu`. Distinct eigenvalues use left eigenvectors as the rows of
/// `P`; a repeated eigenvalue uses the chain `e_i, e_i (M - lambda I)` seeded by
/// the first standard basis row not annihilated by `M - lambda I`.
pub fn jordan_form(m: &Matrix2) -> Result<JordanData, MatError> {
    let field = m.field();
    if m.is_scalar() {
        return Ok(JordanData {
            kind: JordanKind::Scalar { lambda: m.a },
            j: *m,
            p: Matrix2::identity(field),
            base_extended: false,
        });
    }
    let (tr, det) = char_poly(m);
    let roots = gf::quadratic_roots(-tr, det);
    let Some(&lambda) = roots.first() else {
        return Err(MatError::NoSplittingField(m.to_string(), field));
    };
    let work = lambda.field();
    let base_extended = work != field;
    let m = m.coerce(work).expect("prime field embeds in its extension");
    let one = work.one();
    let zero = work.zero();
    if let [lambda, mu] = roots[..] {
        let eig_row = |ev: Fe| -> (Fe, Fe) {
            // left null vector of M - ev*I
            if !m.c.is_zero() || m.a != ev {
                (m.c, ev - m.a)
            } else {
                (m.d - ev, -m.b)
            }
        };
        let (p11, p12) = eig_row(lambda);
        let (p21, p22) = eig_row(mu);
        let p = Matrix2::raw(p11, p12, p21, p22);
        return Ok(JordanData {
            kind: JordanKind::DiagonalDistinct { lambda, mu },
            j: Matrix2::diag(lambda, mu),
            p,
            base_extended,
        });
    }
    let n = m - Matrix2::scalar(lambda);
    // e_1 N = (n.a, n.b); e_2 N = (n.c, n.d)
    let (seed, chain) = if !n.row_is_zero(Row::First) { ((one, zero), (n.a, n.b)) } else { ((zero, one), (n.c, n.d)) };
    let p = Matrix2::raw(seed.0, seed.1, chain.0, chain.1);
    Ok(JordanData { kind: JordanKind::Block { lambda }, j: Matrix2::raw(lambda, one, zero, lambda), p, base_extended })
}

fn companion(tr: Fe, det: Fe) -> Matrix2 {
    let f = tr.field();
    Matrix2::raw(f.zero(), -det, f.one(), tr)
}

/// A matrix `X` over the same field with `X^k = m`, if one exists.
///
/// Fast paths handle diagonalizable matrices with distinct eigenvalues
/// (rooting eigenvalues, with Frobenius-conjugate roots when the eigenvalues
/// leave the field), invertible Jordan blocks with `p` not dividing `k`, and
/// scalars with a scalar root. Anything left is settled by a complete search:
/// a root of a non-scalar `m` commutes with `m` and so lies in
/// `{x I + y m}`; a root of a scalar is conjugate to a scalar or a companion
/// matrix.
pub fn matrix_kth_root(m: &Matrix2, k: u64) -> Option<Matrix2> {
    assert!(k >= 1, "k must be positive");
    if k == 1 {
        return Some(*m);
    }
    let field = m.field();
    let verified = |x: Matrix2| (x.pow(k) == *m).then_some(x);
    if m.is_scalar() {
        if let Some(r) = gf::kth_root(m.a, k) {
            return Some(Matrix2::scalar(r));
        }
        return field.elements().flat_map(|t| field.elements().map(move |d| companion(t, d))).find_map(verified);
    }
    if let Ok(jd) = jordan_form(m) {
        if let Some(x) = fast_root(m, &jd, k).and_then(verified) {
            return Some(x);
        }
    }
    let id = Matrix2::identity(field);
    field
        .elements()
        .flat_map(|x| field.elements().map(move |y| (x, y)))
        .map(|(x, y)| id.scale(x) + m.scale(y))
        .find_map(verified)
}

fn fast_root(m: &Matrix2, jd: &JordanData, k: u64) -> Option<Matrix2> {
    let field = m.field();
    let pinv = jd.p.inverse()?;
    match jd.kind {
        JordanKind::DiagonalDistinct { lambda, mu } if !jd.base_extended => {
            let d = Matrix2::diag(gf::kth_root(lambda, k)?, gf::kth_root(mu, k)?);
            Some(pinv * d * jd.p)
        }
        JordanKind::DiagonalDistinct { lambda, mu } => {
            // conjugate pair of eigenvalues: roots must be Frobenius conjugates
            let ext = lambda.field();
            ext.elements()
                .filter(|r| !r.in_prime_field() && r.pow(k) == lambda && r.frobenius().pow(k) == mu)
                .find_map(|r| (pinv * Matrix2::diag(r, r.frobenius()) * jd.p).restrict(field))
        }
        JordanKind::Block { lambda } => {
            if lambda.is_zero() || k.is_multiple_of(field.p() as u64) || jd.base_extended {
                return None;
            }
            let r = gf::kth_root(lambda, k)?;
            // [[r,s],[0,r]]^k = [[r^k, k r^(k-1) s],[0, r^k]]
            let s = (field.from_int((k % field.p() as u64) as i64) * r.pow(k - 1)).inv().ok()?;
            let y = Matrix2::raw(r, s, field.zero(), r);
            Some(pinv * y * jd.p)
        }
        JordanKind::Scalar { .. } => None,
    }
}

/// Every matrix over `field` in canonical order (`q^4` of them).
pub fn all_matrices(field: FieldSpec) -> impl Iterator<Item = Matrix2> {
    let q = field.q();
    (0..q.pow(4)).map(move |code| {
        let e = |shift: u32| field.element(code / q.pow(shift) % q);
        Matrix2::raw(e(3), e(2), e(1), e(0))
    })
}

/// Reference k-th root by scanning all `q^4` matrices in canonical order.
pub fn kth_root_scan(m: &Matrix2, k: u64) -> Option<Matrix2> {
    all_matrices(m.field()).find(|x| x.pow(k) == *m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    fn f(p: u32, d: u32) -> FieldSpec {
        make_field(p, d).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let f5 = f(5, 1);
        let m = Matrix2::from_ints(f5, [[1, 2], [3, 4]]);
        assert_eq!(m.det(), f5.from_int(3));
        assert_eq!(Matrix2::identity(f(3, 1)).trace(), f(3, 1).from_int(2));
        assert_eq!(Matrix2::identity(f5) * m, m);
        assert_eq!(m * m.inverse().unwrap(), Matrix2::identity(f5));
        let other = Matrix2::identity(f(3, 1));
        assert!(matches!(m.checked_mul(&other), Err(MatError::FieldMismatch(..))));
        assert!(Matrix2::new(f5.one(), f5.one(), f5.one(), f(3, 1).one()).is_err());
    }

    #[test]
    fn char_poly_examples() {
        let f5 = f(5, 1);
        let m = Matrix2::from_ints(f5, [[0, 1], [4, 0]]);
        assert_eq!(char_poly(&m), (f5.zero(), f5.one()));
        assert_eq!(char_poly(&Matrix2::identity(f5)), (f5.from_int(2), f5.one()));
        assert_eq!(char_poly(&Matrix2::zero(f5)), (f5.zero(), f5.zero()));
    }

    #[test]
    fn cayley_hamilton_exhaustive_f3() {
        for m in all_matrices(f(3, 1)) {
            let (tr, det) = char_poly(&m);
            let id = Matrix2::identity(m.field());
            assert!((m * m - m.scale(tr) + id.scale(det)).is_zero());
        }
    }

    #[test]
    fn jordan_examples() {
        let f5 = f(5, 1);
        let u = Matrix2::from_ints(f5, [[1, 1], [0, 1]]);
        let jd = jordan_form(&u).unwrap();
        assert_eq!(jd.kind, JordanKind::Block { lambda: f5.one() });
        assert_eq!(jd.j, u);
        assert_eq!(jd.p, Matrix2::identity(f5));

        let m = Matrix2::from_ints(f5, [[0, 1], [4, 0]]);
        let jd = jordan_form(&m).unwrap();
        assert_eq!(jd.kind, JordanKind::DiagonalDistinct { lambda: f5.from_int(2), mu: f5.from_int(3) });
        assert_eq!(jd.j, Matrix2::from_ints(f5, [[2, 0], [0, 3]]));
        assert_eq!(m.conjugate_by(&jd.p), jd.j);
        assert!(!jd.base_extended);

        let f3 = f(3, 1);
        let m = Matrix2::from_ints(f3, [[0, 1], [1, 1]]);
        let jd = jordan_form(&m).unwrap();
        assert!(jd.base_extended);
        assert_eq!(jd.j.field(), f(3, 2));
        assert_eq!(m.embed(f(3, 2)).conjugate_by(&jd.p), jd.j);
    }

    #[test]
    fn jordan_fails_only_without_splitting_field() {
        let f9 = f(3, 2);
        let t = f9.generator().unwrap();
        // 1 + t generates F_9^*, so x^2 - (1 + t) is irreducible
        let m = Matrix2::new(f9.zero(), f9.one() + t, f9.one(), f9.zero()).unwrap();
        assert!(matches!(jordan_form(&m), Err(MatError::NoSplittingField(..))));
    }

    #[test]
    fn kth_root_examples() {
        let f5 = f(5, 1);
        let id = Matrix2::identity(f5);
        for k in 1..6 {
            assert_eq!(matrix_kth_root(&id, k), Some(id));
        }
        let n = Matrix2::from_ints(f5, [[0, 1], [0, 0]]);
        assert_eq!(matrix_kth_root(&n, 2), None);
        let four = Matrix2::from_ints(f5, [[4, 0], [0, 4]]);
        assert_eq!(matrix_kth_root(&four, 2), Some(Matrix2::from_ints(f5, [[2, 0], [0, 2]])));
    }

    #[test]
    fn scalar_without_scalar_root_uses_irreducible_root() {
        // 2 is not a square in F_3 but 2I = X^2 for X with char poly x^2 + 1
        let f3 = f(3, 1);
        let two = Matrix2::scalar(f3.from_int(2));
        let x = matrix_kth_root(&two, 2).unwrap();
        assert_eq!(x.pow(2), two);
        assert!(!x.is_scalar());
    }

    #[test]
    fn block_root_closed_form() {
        let f7 = f(7, 1);
        let m = Matrix2::from_ints(f7, [[3, 1], [0, 3]]);
        for k in [2, 3, 5] {
            if let Some(x) = matrix_kth_root(&m, k) {
                assert_eq!(x.pow(k), m);
            }
        }
        // 3 = 3^1 has a cube root in F_7? cubes are {0,1,6}; 3 is not one
        assert_eq!(matrix_kth_root(&m, 3), None);
        assert!(matrix_kth_root(&m, 5).is_some());
    }

    #[test]
    fn parse_round_trip() {
        let f9 = f(3, 2);
        let m = Matrix2::parse("[[1+2t, 0], [2, 1t]]", f9).unwrap();
        assert_eq!(Matrix2::parse(&m.to_string(), f9).unwrap(), m);
        assert_eq!(m.to_string(), "[[1+2t,0+0t],[2+0t,0+1t]]");
        assert!(Matrix2::parse("[[1,2],[3]]", f(5, 1)).is_err());
        assert!(Matrix2::parse("[1,2,3,4]", f(5, 1)).is_err());
    }

    #[test]
    fn all_matrices_order() {
        let ms: Vec<Matrix2> = all_matrices(f(2, 1)).collect();
        assert_eq!(ms.len(), 16);
        assert!(ms[0].is_zero());
        assert_eq!(ms[1], Matrix2::from_ints(f(2, 1), [[0, 0], [0, 1]]));
        assert_eq!(ms[8], Matrix2::from_ints(f(2, 1), [[1, 0], [0, 0]]));
    }
}
