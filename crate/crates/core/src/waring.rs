//! The power-sum map `A x^k1 + B y^k2`: image classification, the published
//! table of images as golden data, and a constructive solver.
//!
//! The classifier rests on a single criterion. Every value of the map
//! satisfies `v (A X^k1 + B Y^k2) = 0` for each common left null vector `v` of
//! `A` and `B`; after reduction to a canonical pair such a vector is a common
//! zero row. With no common zero row the map is onto (for algebraically closed
//! coefficients; over `F_q` this needs k-th roots, see [`roots_available`]).

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::conjugacy::{canonical_pair, CanonicalPair, ConjugacyError};
use crate::gf::{gcd, Fe, FieldSpec};
use crate::mat::{all_matrices, matrix_kth_root, MatError, Matrix2, Row};
use crate::oracle::Subspace;

/// Largest field on which [`solve`] may fall back to a complete search.
pub const SOLVE_SEARCH_MAX_Q: u32 = 25;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WaringError {
    #[error("constant matrix {0} must be nonzero")]
    ZeroMatrix(&'static str),
    #[error("exponents must be positive")]
    ZeroExponent,
    #[error(transparent)]
    Matrix(#[from] MatError),
    #[error(transparent)]
    Conjugacy(#[from] ConjugacyError),
    #[error("complete search over {0} is too large (q <= {SOLVE_SEARCH_MAX_Q})")]
    SearchTooLarge(FieldSpec),
    #[error("row {row}: constraints cannot be met over {field}")]
    Unsatisfiable { row: u8, field: FieldSpec },
}

/// `A x^k1 + B y^k2` with nonzero `A`, `B` and positive exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PowerSumPoly {
    a: Matrix2,
    b: Matrix2,
    k1: u64,
    k2: u64,
}

impl PowerSumPoly {
    pub fn new(a: Matrix2, b: Matrix2, k1: u64, k2: u64) -> Result<PowerSumPoly, WaringError> {
        if a.field() != b.field() {
            return Err(MatError::FieldMismatch(a.field(), b.field()).into());
        }
        if a.is_zero() {
            return Err(WaringError::ZeroMatrix("A"));
        }
        if b.is_zero() {
            return Err(WaringError::ZeroMatrix("B"));
        }
        if k1 == 0 || k2 == 0 {
            return Err(WaringError::ZeroExponent);
        }
        Ok(PowerSumPoly { a, b, k1, k2 })
    }

    pub fn a(&self) -> Matrix2 {
        self.a
    }

    pub fn b(&self) -> Matrix2 {
        self.b
    }

    pub fn k1(&self) -> u64 {
        self.k1
    }

    pub fn k2(&self) -> u64 {
        self.k2
    }

    pub fn field(&self) -> FieldSpec {
        self.a.field()
    }

    pub fn eval(&self, x: &Matrix2, y: &Matrix2) -> Matrix2 {
        self.a * x.pow(self.k1) + self.b * y.pow(self.k2)
    }
}

/// Which rule produced a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// `A` or `B` is invertible.
    InvertibleConstant,
    /// The canonical pair has a common zero row.
    ZeroRowObstruction,
    /// The canonical pair has no common zero row.
    NoCommonZeroRow,
    /// `A - B` is invertible (commutator map).
    InvertibleDifference,
    /// `A = B` (commutator map).
    EqualConstants,
    /// A canonical-pair case of the commutator map.
    CanonicalCase(&'static str),
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::InvertibleConstant => f.write_str("invertible_constant"),
            Provenance::ZeroRowObstruction => f.write_str("zero_row_obstruction"),
            Provenance::NoCommonZeroRow => f.write_str("no_common_zero_row"),
            Provenance::InvertibleDifference => f.write_str("invertible_difference"),
            Provenance::EqualConstants => f.write_str("equal_constants"),
            Provenance::CanonicalCase(tag) => write!(f, "canonical_case:{tag}"),
        }
    }
}

impl Serialize for Provenance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum PredictedImage {
    Full,
    /// `{ Q^-1 M Q : row zero_row of M is zero }`.
    RowSpace {
        zero_row: Row,
        conjugator: Matrix2,
    },
    Explicit {
        subspace: Subspace,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImagePrediction {
    pub image: PredictedImage,
    pub provenance: Provenance,
}

impl ImagePrediction {
    /// The predicted image as a subspace of matrices over `field`.
    pub fn subspace(&self, field: FieldSpec) -> Subspace {
        match &self.image {
            PredictedImage::Full => Subspace::full(field),
            PredictedImage::RowSpace { zero_row, conjugator } => {
                let work = conjugator.field();
                let q_inv = conjugator.inverse().expect("conjugator is invertible");
                Subspace::row_space(work, *zero_row)
                    .conjugated(&q_inv)
                    .coerce(field)
                    .expect("row space of a pair over the field is defined over it")
            }
            PredictedImage::Explicit { subspace } => subspace.clone(),
        }
    }

    pub fn is_full(&self) -> bool {
        matches!(self.image, PredictedImage::Full)
    }

    pub fn label(&self) -> String {
        match &self.image {
            PredictedImage::Full => "full".to_string(),
            PredictedImage::RowSpace { zero_row, .. } => format!("row_space(zero_row={zero_row})"),
            PredictedImage::Explicit { subspace } => format!("explicit(dim={})", subspace.dim()),
        }
    }
}

/// Row space prediction for a pair with a common left null vector exposed as
/// row `zero_row` of the canonical pair. Reported in the original coordinates
/// when `A` and `B` already share a literal zero row.
pub(crate) fn row_space_prediction(
    a: &Matrix2,
    b: &Matrix2,
    cp: &CanonicalPair,
    zero_row: Row,
    provenance: Provenance,
) -> ImagePrediction {
    let field = a.field();
    let literal = [Row::First, Row::Second].into_iter().find(|&r| a.row_is_zero(r) && b.row_is_zero(r));
    let image = match literal {
        Some(r) => PredictedImage::RowSpace { zero_row: r, conjugator: Matrix2::identity(field) },
        None => {
            let conjugator = cp.witness.restrict(field).unwrap_or(cp.witness);
            PredictedImage::RowSpace { zero_row, conjugator }
        }
    };
    ImagePrediction { image, provenance }
}

/// Classifies the image of `A x^k1 + B y^k2`.
pub fn classify_image(poly: &PowerSumPoly) -> Result<ImagePrediction, WaringError> {
    if poly.a.is_invertible() || poly.b.is_invertible() {
        return Ok(ImagePrediction { image: PredictedImage::Full, provenance: Provenance::InvertibleConstant });
    }
    let cp = canonical_pair(&poly.a, &poly.b)?;
    Ok(match cp.zero_row() {
        Some(row) => row_space_prediction(&poly.a, &poly.b, &cp, row, Provenance::ZeroRowObstruction),
        None => ImagePrediction { image: PredictedImage::Full, provenance: Provenance::NoCommonZeroRow },
    })
}

/// Whether k-th roots exist wherever the surjectivity arguments need them:
/// `x -> x^k` bijective on `F_q` and `F_{q^2}`, and `p` not dividing `k`,
/// for both exponents.
pub fn roots_available(field: FieldSpec, k1: u64, k2: u64) -> bool {
    let q = field.q() as u64;
    let p = field.p() as u64;
    [k1, k2].iter().all(|&k| gcd(k, q - 1) == 1 && gcd(k, q * q - 1) == 1 && k % p != 0)
}

/// Finds `(X, Y)` with `A X^k1 + B Y^k2 = C`, or proves there is none.
///
/// Constructive shortcuts are tried first; the fallback searches every `X`
/// against a table of all values `B Y^k2`, which decides membership exactly.
pub fn solve(poly: &PowerSumPoly, c: &Matrix2) -> Result<Option<(Matrix2, Matrix2)>, WaringError> {
    let field = poly.field();
    if c.field() != field {
        return Err(MatError::FieldMismatch(field, c.field()).into());
    }
    let zero = Matrix2::zero(field);
    let check = |x: Matrix2, y: Matrix2| (poly.eval(&x, &y) == *c).then_some((x, y));
    let (a, b, k1, k2) = (poly.a, poly.b, poly.k1, poly.k2);

    // Y = 0
    if let Some(ai) = a.inverse() {
        if let Some(x) = matrix_kth_root(&(ai * *c), k1) {
            if let Some(w) = check(x, zero) {
                return Ok(Some(w));
            }
        }
    }
    // X = 0
    if let Some(bi) = b.inverse() {
        if let Some(y) = matrix_kth_root(&(bi * *c), k2) {
            if let Some(w) = check(zero, y) {
                return Ok(Some(w));
            }
        }
    }
    // both invertible: X scalar, Y a root of the remainder
    if let (Some(_), Some(bi)) = (a.inverse(), b.inverse()) {
        for s in field.elements() {
            let x = Matrix2::scalar(s);
            if let Some(y) = matrix_kth_root(&(bi * (*c - a * x.pow(k1))), k2) {
                if let Some(w) = check(x, y) {
                    return Ok(Some(w));
                }
            }
        }
    }
    // structured shapes
    let shapes = shape_templates(field);
    let mut b_values: HashMap<Matrix2, Matrix2> = HashMap::new();
    for y in &shapes {
        b_values.entry(b * y.pow(k2)).or_insert(*y);
    }
    let b_inv = b.inverse();
    for x in &shapes {
        let rest = *c - a * x.pow(k1);
        let y = match b_inv {
            Some(bi) => matrix_kth_root(&(bi * rest), k2),
            None => b_values.get(&rest).copied(),
        };
        if let Some(w) = y.and_then(|y| check(*x, y)) {
            return Ok(Some(w));
        }
    }
    // complete search
    if field.q() > SOLVE_SEARCH_MAX_Q {
        return Err(WaringError::SearchTooLarge(field));
    }
    Ok(search(poly, c))
}

/// Complete search: first `X` in canonical order admitting some `Y`, paired
/// with the first such `Y`.
pub fn search(poly: &PowerSumPoly, c: &Matrix2) -> Option<(Matrix2, Matrix2)> {
    let field = poly.field();
    let mut b_values: HashMap<Matrix2, Matrix2> = HashMap::new();
    for y in all_matrices(field) {
        b_values.entry(poly.b * y.pow(poly.k2)).or_insert(y);
    }
    all_matrices(field).find_map(|x| {
        let rest = *c - poly.a * x.pow(poly.k1);
        b_values.get(&rest).map(|&y| (x, y))
    })
}

/// Diagonal, diagonal-plus-corner, single row/column, unipotent and
/// nilpotent shapes, each ranging over at most `q^2` parameter choices.
fn shape_templates(field: FieldSpec) -> Vec<Matrix2> {
    let (o, i) = (field.zero(), field.one());
    let m = |a, b, c, d| Matrix2::from_vector([a, b, c, d]);
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for s in field.elements() {
        for t in field.elements() {
            for cand in [
                m(s, o, o, t),
                m(s, i, o, t),
                m(s, o, i, t),
                m(s, t, o, o),
                m(o, o, s, t),
                m(s, o, t, o),
                m(o, s, o, t),
                m(i, s, o, i),
                m(i, o, s, i),
            ] {
                if seen.insert(cand) {
                    out.push(cand);
                }
            }
        }
    }
    out
}

/// Free parameters of a table row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sym {
    Lambda,
    Mu,
    Xi,
    Xi1,
    Xi2,
    Xi3,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Entry {
    Zero,
    One,
    Param(Sym),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Pattern(pub [Entry; 4]);

impl Pattern {
    fn syms(&self) -> impl Iterator<Item = Sym> + '_ {
        self.0.iter().filter_map(|e| match e {
            Entry::Param(s) => Some(*s),
            _ => None,
        })
    }

    fn instantiate(&self, field: FieldSpec, value: impl Fn(Sym) -> Fe) -> Matrix2 {
        Matrix2::from_vector(self.0.map(|e| match e {
            Entry::Zero => field.zero(),
            Entry::One => field.one(),
            Entry::Param(s) => value(s),
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    NonZero(Sym),
    Distinct(Sym, Sym),
    ProductNonZero(Sym, Sym),
    ProductZero(Sym, Sym),
}

impl Constraint {
    fn holds(&self, value: &impl Fn(Sym) -> Fe) -> bool {
        match *self {
            Constraint::NonZero(s) => !value(s).is_zero(),
            Constraint::Distinct(s, t) => value(s) != value(t),
            Constraint::ProductNonZero(s, t) => !(value(s) * value(t)).is_zero(),
            Constraint::ProductZero(s, t) => (value(s) * value(t)).is_zero(),
        }
    }
}

/// Image shape in the table's own coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ImagePattern {
    Full,
    /// `[[*, *], [0, 0]]`.
    FirstRow,
    /// `[[0, 0], [*, *]]`.
    SecondRow,
}

impl ImagePattern {
    pub fn subspace(&self, field: FieldSpec) -> Subspace {
        match self {
            ImagePattern::Full => Subspace::full(field),
            ImagePattern::FirstRow => Subspace::row_space(field, Row::Second),
            ImagePattern::SecondRow => Subspace::row_space(field, Row::First),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub id: u8,
    pub a: Pattern,
    pub b: Pattern,
    pub constraints: Vec<Constraint>,
    pub image: ImagePattern,
    /// Set when the row repeats an earlier one verbatim.
    pub duplicate_of: Option<u8>,
}

impl TableRow {
    /// Parameters in a fixed order.
    pub fn params(&self) -> Vec<Sym> {
        let mut v: Vec<Sym> = self.a.syms().chain(self.b.syms()).collect();
        v.sort();
        v.dedup();
        v
    }
}

/// The table of images of `A x^k1 + B y^k2`, one entry per published row.
pub fn table_rows() -> Vec<TableRow> {
    use Constraint::*;
    use Entry::{One as I, Param, Zero as O};
    use ImagePattern::{FirstRow, Full, SecondRow};
    use Sym::*;
    let (l, m, x, x1, x2, x3, z) = (Param(Lambda), Param(Mu), Param(Xi), Param(Xi1), Param(Xi2), Param(Xi3), Param(Z));
    let p = |a: Entry, b: Entry, c: Entry, d: Entry| Pattern([a, b, c, d]);
    let diag = |a: Entry, d: Entry| p(a, O, O, d);

    let d_ll = diag(l, l);
    let d_lm = diag(l, m);
    let d_l0 = diag(l, O);
    let d_0m = diag(O, m);
    let block = p(l, I, O, l);
    let nilp = p(O, I, O, O);

    let rows: Vec<(Pattern, Pattern, Vec<Constraint>, ImagePattern)> = vec![
        (d_ll, diag(x, x), vec![], Full),
        (d_ll, diag(x1, x2), vec![Distinct(Xi1, Xi2)], Full),
        (d_ll, p(x, I, O, x), vec![], Full),
        (d_lm, diag(x, x), vec![Distinct(Lambda, Mu)], Full),
        (d_lm, diag(x1, x2), vec![Distinct(Lambda, Mu), ProductNonZero(Xi1, Xi2)], Full),
        (d_lm, diag(x1, x2), vec![NonZero(Lambda), NonZero(Xi2)], Full),
        (d_lm, diag(x1, x2), vec![NonZero(Mu), NonZero(Xi1)], Full),
        (d_l0, diag(x, O), vec![], FirstRow),
        (d_0m, diag(O, x), vec![], SecondRow),
        (d_lm, p(x, I, O, x), vec![ProductNonZero(Lambda, Mu)], Full),
        (d_lm, p(x, I, O, x), vec![ProductZero(Lambda, Mu), NonZero(Xi)], Full),
        (d_lm, p(O, I, O, O), vec![NonZero(Mu)], Full),
        (d_l0, p(O, I, O, O), vec![], FirstRow),
        (d_lm, p(x1, I, O, x2), vec![ProductNonZero(Lambda, Mu), Distinct(Xi1, Xi2)], Full),
        (d_lm, p(x1, I, O, x2), vec![ProductZero(Lambda, Mu), ProductNonZero(Xi1, Xi2)], Full),
        (d_lm, p(x, I, O, O), vec![NonZero(Mu)], Full),
        (d_l0, p(x, I, O, O), vec![], FirstRow),
        (d_l0, p(O, I, O, x), vec![NonZero(Xi)], Full),
        (d_0m, p(O, I, O, x), vec![], Full),
        (d_lm, p(x, O, I, x), vec![ProductNonZero(Lambda, Mu)], Full),
        (d_lm, p(x, O, I, x), vec![ProductZero(Lambda, Mu), NonZero(Xi)], Full),
        (d_lm, p(O, O, I, O), vec![NonZero(Lambda)], Full),
        (d_0m, p(O, O, I, O), vec![], SecondRow),
        (d_lm, p(x1, O, I, x2), vec![ProductNonZero(Lambda, Mu), Distinct(Xi1, Xi2)], Full),
        (d_lm, p(x1, O, I, x2), vec![ProductZero(Lambda, Mu), ProductNonZero(Xi1, Xi2)], Full),
        (d_l0, p(x, O, I, x2), vec![], Full),
        (d_0m, p(x1, O, I, x2), vec![NonZero(Xi1)], Full),
        (d_0m, p(O, O, I, x), vec![], SecondRow),
        (d_lm, p(x1, x2, I, x3), vec![Distinct(Lambda, Mu), NonZero(Xi1), NonZero(Xi2), NonZero(Xi3)], Full),
        (d_lm, p(O, x2, I, x3), vec![ProductNonZero(Lambda, Mu), NonZero(Xi3)], Full),
        (d_lm, p(O, x2, I, x3), vec![NonZero(Xi2), NonZero(Xi3)], Full),
        (d_0m, p(O, O, I, x), vec![], SecondRow),
        (d_lm, p(x1, x2, I, O), vec![Distinct(Lambda, Mu), NonZero(Xi1)], Full),
        (d_lm, p(O, x, I, O), vec![Distinct(Lambda, Mu), NonZero(Xi)], Full),
        (block, p(x, O, z, x), vec![NonZero(Lambda), ProductNonZero(Xi, Z)], Full),
        (nilp, p(x1, O, z, x2), vec![Distinct(Xi1, Xi2), NonZero(Z)], Full),
        (block, diag(x1, x2), vec![NonZero(Lambda), Distinct(Xi1, Xi2)], Full),
        (nilp, p(O, z, O, O), vec![], FirstRow),
        (block, p(x, z, O, x), vec![NonZero(Xi)], Full),
    ];
    rows.into_iter()
        .enumerate()
        .map(|(i, (a, b, constraints, image))| TableRow {
            id: i as u8 + 1,
            a,
            b,
            constraints,
            image,
            duplicate_of: (i + 1 == 32).then_some(28),
        })
        .collect()
}

/// Concrete `(A, B)` pairs for a table row: every admissible parameter
/// assignment when there are at most `count`, otherwise a seeded sample of
/// `count` of them. Both matrices are required to be nonzero.
pub fn instantiate_row(
    row: &TableRow,
    field: FieldSpec,
    seed: u64,
    count: usize,
) -> Result<Vec<(Matrix2, Matrix2)>, WaringError> {
    let params = row.params();
    let q = field.q() as usize;
    let total = q.pow(params.len() as u32);
    let mut admissible = Vec::new();
    for n in 0..total {
        let values: Vec<Fe> = (0..params.len()).map(|i| field.element((n / q.pow(i as u32) % q) as u32)).collect();
        let value = |s: Sym| values[params.iter().position(|&t| t == s).expect("known symbol")];
        if !row.constraints.iter().all(|c| c.holds(&value)) {
            continue;
        }
        let a = row.a.instantiate(field, value);
        let b = row.b.instantiate(field, value);
        if !a.is_zero() && !b.is_zero() {
            admissible.push((a, b));
        }
    }
    if admissible.is_empty() {
        return Err(WaringError::Unsatisfiable { row: row.id, field });
    }
    if admissible.len() <= count {
        return Ok(admissible);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (row.id as u64) << 32);
    let mut picked = rand::seq::index::sample(&mut rng, admissible.len(), count).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| admissible[i]).collect())
}
