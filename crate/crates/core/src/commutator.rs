//! The generalized commutator `A x y - B y x`.
//!
//! Image rules: `A - B` invertible gives everything (take `x = (A - B)^-1 M`,
//! `y = I`); `A = B` gives `A sl2`; a common left null vector `v` of `A` and
//! `B` confines the image to `{ M : v M = 0 }`; every other pair is onto.

use serde::Serialize;
use thiserror::Error;

use crate::conjugacy::{canonical_pair, RepresentativeFamily};
use crate::gf::FieldSpec;
use crate::mat::{MatError, Matrix2};
use crate::oracle::{enumerate_image, is_subspace, ClosureReport, OracleError, Subspace, SweepOptions};
use crate::waring::{row_space_prediction, ImagePrediction, PredictedImage, Provenance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CommutatorError {
    #[error("constant matrix {0} must be nonzero")]
    ZeroMatrix(&'static str),
    #[error(transparent)]
    Matrix(#[from] MatError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// `A x y - B y x` with nonzero `A`, `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CommutatorPoly {
    a: Matrix2,
    b: Matrix2,
}

impl CommutatorPoly {
    pub fn new(a: Matrix2, b: Matrix2) -> Result<CommutatorPoly, CommutatorError> {
        if a.field() != b.field() {
            return Err(MatError::FieldMismatch(a.field(), b.field()).into());
        }
        if a.is_zero() {
            return Err(CommutatorError::ZeroMatrix("A"));
        }
        if b.is_zero() {
            return Err(CommutatorError::ZeroMatrix("B"));
        }
        Ok(CommutatorPoly { a, b })
    }

    pub fn a(&self) -> Matrix2 {
        self.a
    }

    pub fn b(&self) -> Matrix2 {
        self.b
    }

    pub fn field(&self) -> FieldSpec {
        self.a.field()
    }

    pub fn eval(&self, x: &Matrix2, y: &Matrix2) -> Matrix2 {
        self.a * *x * *y - self.b * *y * *x
    }
}

/// `{ A E : trace E = 0 }`.
pub fn a_sl2(a: &Matrix2) -> Subspace {
    let field = a.field();
    let images: Vec<Matrix2> = Subspace::trace_zero(field).basis_matrices().iter().map(|e| *a * *e).collect();
    Subspace::span_of_matrices(field, images.iter())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageSource {
    InvertibleDifference,
    EqualConstants,
    Enumerated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutatorImage {
    pub subspace: Subspace,
    pub source: ImageSource,
    /// Present when the image was enumerated.
    pub certificate: Option<ClosureReport>,
}

/// The image of the map as a subspace: closed forms when `A - B` is
/// invertible or `A = B`, otherwise the span of the enumerated image together
/// with its closure certificate.
pub fn image_subspace(poly: &CommutatorPoly, opts: &SweepOptions) -> Result<CommutatorImage, CommutatorError> {
    let field = poly.field();
    if (poly.a - poly.b).is_invertible() {
        return Ok(CommutatorImage {
            subspace: Subspace::full(field),
            source: ImageSource::InvertibleDifference,
            certificate: None,
        });
    }
    if poly.a == poly.b {
        return Ok(CommutatorImage {
            subspace: a_sl2(&poly.a),
            source: ImageSource::EqualConstants,
            certificate: None,
        });
    }
    let report = certify_vector_space(poly, opts)?;
    Ok(CommutatorImage { subspace: report.basis.clone(), source: ImageSource::Enumerated, certificate: Some(report) })
}

/// Enumerates the image and reports whether it equals its span.
pub fn certify_vector_space(poly: &CommutatorPoly, opts: &SweepOptions) -> Result<ClosureReport, CommutatorError> {
    let set = enumerate_image(*poly, opts)?;
    Ok(is_subspace(&set))
}

/// Closed-form image from the canonical pair, or `None` when the pair does
/// not reduce over its splitting field or when the case is the
/// anti-diagonal one in characteristic 2.
pub fn canonical_case_prediction(poly: &CommutatorPoly) -> Option<ImagePrediction> {
    let (a, b) = (poly.a, poly.b);
    if (a - b).is_invertible() {
        return Some(ImagePrediction { image: PredictedImage::Full, provenance: Provenance::InvertibleDifference });
    }
    if a == b {
        return Some(ImagePrediction {
            image: PredictedImage::Explicit { subspace: a_sl2(&a) },
            provenance: Provenance::EqualConstants,
        });
    }
    let cp = canonical_pair(&a, &b).ok()?;
    if poly.field().p() == 2 && matches!(cp.family, RepresentativeFamily::FullAntiDiagonal { .. }) {
        return None;
    }
    let provenance = Provenance::CanonicalCase(cp.family.tag());
    Some(match cp.zero_row() {
        Some(row) => row_space_prediction(&a, &b, &cp, row, provenance),
        None => ImagePrediction { image: PredictedImage::Full, provenance },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use crate::mat::Row;

    fn m(field: FieldSpec, x: [[i64; 2]; 2]) -> Matrix2 {
        Matrix2::from_ints(field, x)
    }

    fn poly(field: FieldSpec, a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> CommutatorPoly {
        CommutatorPoly::new(m(field, a), m(field, b)).unwrap()
    }

    #[test]
    fn rejects_zero() {
        let f3 = make_field(3, 1).unwrap();
        let i = Matrix2::identity(f3);
        assert_eq!(CommutatorPoly::new(Matrix2::zero(f3), i), Err(CommutatorError::ZeroMatrix("A")));
        assert_eq!(CommutatorPoly::new(i, Matrix2::zero(f3)), Err(CommutatorError::ZeroMatrix("B")));
    }

    #[test]
    fn image_examples() {
        let f5 = make_field(5, 1).unwrap();
        let opts = SweepOptions::exhaustive(2);
        let p = poly(f5, [[1, 0], [0, 1]], [[1, 0], [0, 1]]);
        let img = image_subspace(&p, &opts).unwrap();
        assert_eq!(img.source, ImageSource::EqualConstants);
        assert_eq!(img.subspace, Subspace::trace_zero(f5));

        let p = poly(f5, [[2, 0], [0, 2]], [[1, 0], [0, 1]]);
        assert_eq!(image_subspace(&p, &opts).unwrap().subspace.dim(), 4);

        let p = poly(f5, [[1, 0], [0, 0]], [[1, 1], [0, 0]]);
        let img = image_subspace(&p, &opts).unwrap();
        assert_eq!(img.source, ImageSource::Enumerated);
        assert!(img.certificate.unwrap().is_subspace);
        assert_eq!(img.subspace, Subspace::row_space(f5, Row::Second));
    }

    #[test]
    fn certify_examples() {
        let f3 = make_field(3, 1).unwrap();
        let opts = SweepOptions::exhaustive(1);
        for (a, b, size) in [
            ([[1, 0], [0, 1]], [[1, 0], [0, 1]], 27),
            ([[2, 0], [0, 2]], [[1, 0], [0, 1]], 81),
            ([[1, 0], [0, 0]], [[1, 1], [0, 0]], 9),
        ] {
            let r = certify_vector_space(&poly(f3, a, b), &opts).unwrap();
            assert!(r.is_subspace);
            assert_eq!(r.size, size);
        }
    }

    #[test]
    fn prediction_examples() {
        let f5 = make_field(5, 1).unwrap();
        let full = |a, b| canonical_case_prediction(&poly(f5, a, b)).unwrap().is_full();
        assert!(full([[0, 0], [0, 1]], [[0, 1], [0, 0]]));
        assert!(full([[1, 0], [0, 2]], [[1, 1], [0, 2]]));
        let pred = canonical_case_prediction(&poly(f5, [[0, 1], [0, 0]], [[0, 3], [0, 0]])).unwrap();
        assert_eq!(pred.subspace(f5), Subspace::row_space(f5, Row::Second));
        // a unipotent block against the scalar with the same eigenvalue is onto
        assert!(full([[2, 1], [0, 2]], [[2, 0], [0, 2]]));
    }

    #[test]
    fn char_two_anti_diagonal_abstains() {
        // needs distinct nonzero eigenvalues, so F_4 rather than F_2
        let f4 = make_field(2, 2).unwrap();
        let (o, i, t) = (f4.zero(), f4.one(), f4.parse_element("t").unwrap());
        let a = Matrix2::diag(i, t);
        let b = Matrix2::from_vector([o, t, i, o]);
        assert!(!(a - b).is_invertible());
        let p = CommutatorPoly::new(a, b).unwrap();
        let cp = canonical_pair(&a, &b).unwrap();
        assert!(matches!(cp.family, RepresentativeFamily::FullAntiDiagonal { .. }));
        assert!(canonical_case_prediction(&p).is_none());
        let img = image_subspace(&p, &SweepOptions::exhaustive(2)).unwrap();
        assert!(img.certificate.unwrap().is_subspace);
        assert_eq!(img.subspace.dim(), 4);
    }
}
