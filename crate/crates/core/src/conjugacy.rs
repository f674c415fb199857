//! Simultaneous-conjugacy reduction of a pair `(A, B)`.
//!
//! `A` is brought to its Jordan form `J_A` and the centralizer of `J_A` then
//! acts on the conjugated `B` to land it in a fixed representative family.
//! The combined conjugator `Q` is returned so that callers can transport
//! statements about `(J_A, B~)` back to the original coordinates.

use serde::Serialize;
use thiserror::Error;

use crate::gf::Fe;
use crate::mat::{jordan_form, JordanData, JordanKind, MatError, Matrix2, Row};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConjugacyError {
    #[error("constant matrix {0} must be nonzero")]
    ZeroMatrix(&'static str),
    #[error(transparent)]
    Matrix(#[from] MatError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CentralizerKind {
    /// Centralizer of a scalar: all of `GL(2)`.
    FullGl,
    /// Centralizer of `diag(l, m)`, `l != m`: invertible diagonal matrices.
    DiagonalTorus,
    /// Centralizer of a Jordan block: `[[a, b], [0, a]]`, `a != 0`.
    BlockUpper,
}

pub fn centralizer_kind(j: &JordanData) -> CentralizerKind {
    match j.kind {
        JordanKind::Scalar { .. } => CentralizerKind::FullGl,
        JordanKind::DiagonalDistinct { .. } => CentralizerKind::DiagonalTorus,
        JordanKind::Block { .. } => CentralizerKind::BlockUpper,
    }
}

/// Representative families for `B~`, with their free parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum RepresentativeFamily {
    /// `mu I`, `mu != 0`.
    Scalar { mu: Fe },
    /// `diag(mu1, mu2)`, `mu1 != mu2`.
    DiagonalDistinct { mu1: Fe, mu2: Fe },
    /// `[[mu, 1], [0, mu]]`.
    UpperBlock { mu: Fe },
    /// `[[mu1, 1], [0, mu2]]`, `mu1 != mu2`.
    UpperTriangular { mu1: Fe, mu2: Fe },
    /// `[[mu, 0], [1, mu]]`.
    LowerBlock { mu: Fe },
    /// `[[mu1, 0], [1, mu2]]`, `mu1 != mu2`.
    LowerTriangular { mu1: Fe, mu2: Fe },
    /// `[[z1, z2], [1, z3]]`, all `z_i != 0`.
    FullGeneric { z1: Fe, z2: Fe, z3: Fe },
    /// `[[0, z2], [1, z3]]`, `z2, z3 != 0`.
    FullZeroCorner { z2: Fe, z3: Fe },
    /// `[[z1, z2], [1, 0]]`, `z1, z2 != 0`.
    FullZeroLast { z1: Fe, z2: Fe },
    /// `[[0, z2], [1, 0]]`, `z2 != 0`.
    FullAntiDiagonal { z2: Fe },
    /// `[[mu1, 0], [z, mu2]]`, `z != 0` (block centralizer, `c' != 0`).
    LowerWithParameter { mu1: Fe, z: Fe, mu2: Fe },
    /// `[[mu, z], [0, mu]]`, nonzero (block centralizer, commuting case).
    UpperWithParameter { mu: Fe, z: Fe },
}

impl RepresentativeFamily {
    pub fn tag(&self) -> &'static str {
        match self {
            RepresentativeFamily::Scalar { .. } => "scalar",
            RepresentativeFamily::DiagonalDistinct { .. } => "diagonal_distinct",
            RepresentativeFamily::UpperBlock { .. } => "upper_block",
            RepresentativeFamily::UpperTriangular { .. } => "upper_triangular",
            RepresentativeFamily::LowerBlock { .. } => "lower_block",
            RepresentativeFamily::LowerTriangular { .. } => "lower_triangular",
            RepresentativeFamily::FullGeneric { .. } => "full_generic",
            RepresentativeFamily::FullZeroCorner { .. } => "full_zero_corner",
            RepresentativeFamily::FullZeroLast { .. } => "full_zero_last",
            RepresentativeFamily::FullAntiDiagonal { .. } => "full_anti_diagonal",
            RepresentativeFamily::LowerWithParameter { .. } => "lower_with_parameter",
            RepresentativeFamily::UpperWithParameter { .. } => "upper_with_parameter",
        }
    }

    /// Reads the family off a matrix already in one of the torus normal
    /// shapes (`c` in `{0, 1}`, and `b` in `{0, 1}` when `c = 0`).
    fn from_torus_normal(m: &Matrix2) -> RepresentativeFamily {
        use RepresentativeFamily::*;
        let (a, b, c, d) = (m.a, m.b, m.c, m.d);
        match (c.is_one(), b.is_zero(), b.is_one()) {
            (false, true, _) if a == d => Scalar { mu: a },
            (false, true, _) => DiagonalDistinct { mu1: a, mu2: d },
            (false, _, true) if a == d => UpperBlock { mu: a },
            (false, _, true) => UpperTriangular { mu1: a, mu2: d },
            (true, true, _) if a == d => LowerBlock { mu: a },
            (true, true, _) => LowerTriangular { mu1: a, mu2: d },
            (true, false, _) => match (a.is_zero(), d.is_zero()) {
                (false, false) => FullGeneric { z1: a, z2: b, z3: d },
                (true, false) => FullZeroCorner { z2: b, z3: d },
                (false, true) => FullZeroLast { z1: a, z2: b },
                (true, true) => FullAntiDiagonal { z2: b },
            },
            _ => unreachable!("not in torus normal shape: {m}"),
        }
    }

    /// The matrix this family member denotes.
    pub fn matrix(&self) -> Matrix2 {
        use RepresentativeFamily::*;
        let m = |a: Fe, b: Fe, c: Fe, d: Fe| Matrix2::new(a, b, c, d).expect("one field");
        let any = match *self {
            Scalar { mu } | UpperBlock { mu } | LowerBlock { mu } | UpperWithParameter { mu, .. } => mu,
            DiagonalDistinct { mu1, .. }
            | UpperTriangular { mu1, .. }
            | LowerTriangular { mu1, .. }
            | LowerWithParameter { mu1, .. } => mu1,
            FullGeneric { z2, .. } | FullZeroCorner { z2, .. } | FullZeroLast { z2, .. } | FullAntiDiagonal { z2 } => {
                z2
            }
        };
        let f = any.field();
        let (o, i) = (f.zero(), f.one());
        match *self {
            Scalar { mu } => m(mu, o, o, mu),
            DiagonalDistinct { mu1, mu2 } => m(mu1, o, o, mu2),
            UpperBlock { mu } => m(mu, i, o, mu),
            UpperTriangular { mu1, mu2 } => m(mu1, i, o, mu2),
            LowerBlock { mu } => m(mu, o, i, mu),
            LowerTriangular { mu1, mu2 } => m(mu1, o, i, mu2),
            FullGeneric { z1, z2, z3 } => m(z1, z2, i, z3),
            FullZeroCorner { z2, z3 } => m(o, z2, i, z3),
            FullZeroLast { z1, z2 } => m(z1, z2, i, o),
            FullAntiDiagonal { z2 } => m(o, z2, i, o),
            LowerWithParameter { mu1, z, mu2 } => m(mu1, o, z, mu2),
            UpperWithParameter { mu, z } => m(mu, z, o, mu),
        }
    }

    /// Side conditions of the family hold for the stored parameters.
    pub fn side_conditions_hold(&self) -> bool {
        use RepresentativeFamily::*;
        let nz = |x: &Fe| !x.is_zero();
        match self {
            Scalar { mu } => nz(mu),
            DiagonalDistinct { mu1, mu2 } | UpperTriangular { mu1, mu2 } | LowerTriangular { mu1, mu2 } => mu1 != mu2,
            UpperBlock { .. } | LowerBlock { .. } => true,
            FullGeneric { z1, z2, z3 } => nz(z1) && nz(z2) && nz(z3),
            FullZeroCorner { z2, z3 } => nz(z2) && nz(z3),
            FullZeroLast { z1, z2 } => nz(z1) && nz(z2),
            FullAntiDiagonal { z2 } => nz(z2),
            LowerWithParameter { z, .. } => nz(z),
            UpperWithParameter { mu, z } => nz(mu) || nz(z),
        }
    }
}

/// Canonical representative `(J_A, B~)` of a pair under simultaneous
/// conjugation, with `Q A Q^-1 = J_A` and `Q B Q^-1 = B~`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CanonicalPair {
    pub j_a: Matrix2,
    pub b_tilde: Matrix2,
    pub family: RepresentativeFamily,
    pub witness: Matrix2,
    pub base_extended: bool,
    pub centralizer: CentralizerKind,
}

impl CanonicalPair {
    pub fn zero_row(&self) -> Option<Row> {
        family_zero_rows(&self.j_a, &self.b_tilde)
    }
}

pub fn canonical_pair(a: &Matrix2, b: &Matrix2) -> Result<CanonicalPair, ConjugacyError> {
    if a.is_zero() {
        return Err(ConjugacyError::ZeroMatrix("A"));
    }
    if b.is_zero() {
        return Err(ConjugacyError::ZeroMatrix("B"));
    }
    if a.field() != b.field() {
        return Err(MatError::FieldMismatch(a.field(), b.field()).into());
    }
    let ja = jordan_form(a)?;
    let centralizer = centralizer_kind(&ja);
    let mut work = ja.j.field();
    let mut pa = ja.p;
    let mut j_a = ja.j;
    let mut b_a = b.coerce(work).expect("embeds").conjugate_by(&pa);

    let (t, family) = match centralizer {
        CentralizerKind::FullGl => {
            let jb = jordan_form(&b_a)?;
            if jb.base_extended {
                work = jb.j.field();
                pa = pa.embed(work);
                j_a = j_a.embed(work);
                b_a = b_a.embed(work);
            }
            let family = match jb.kind {
                JordanKind::Scalar { lambda } => RepresentativeFamily::Scalar { mu: lambda },
                JordanKind::DiagonalDistinct { lambda, mu } => {
                    RepresentativeFamily::DiagonalDistinct { mu1: lambda, mu2: mu }
                }
                JordanKind::Block { lambda } => RepresentativeFamily::UpperBlock { mu: lambda },
            };
            (jb.p, family)
        }
        CentralizerKind::DiagonalTorus => {
            let one = work.one();
            // diag(d1, d2) sends b' -> d1/d2 b', c' -> d2/d1 c'
            let t = if !b_a.c.is_zero() {
                Matrix2::diag(one, b_a.c.inv().expect("nonzero"))
            } else if !b_a.b.is_zero() {
                Matrix2::diag(one, b_a.b)
            } else {
                Matrix2::identity(work)
            };
            let normal = b_a.conjugate_by(&t);
            (t, RepresentativeFamily::from_torus_normal(&normal))
        }
        CentralizerKind::BlockUpper => {
            let (a1, b1, c1, d1) = (b_a.a, b_a.b, b_a.c, b_a.d);
            // T = [[1, x], [0, 1]] gives [[a'+c'x, (d'-a')x+b'-c'x^2], [c', d'-c'x]]
            let shift = |x: Fe| {
                let f = x.field();
                Matrix2::new(f.one(), x, f.zero(), f.one()).expect("one field")
            };
            if !c1.is_zero() {
                let jb = jordan_form(&b_a)?;
                if jb.base_extended {
                    work = jb.j.field();
                    pa = pa.embed(work);
                    j_a = j_a.embed(work);
                    b_a = b_a.embed(work);
                }
                let ev = jb.kind.eigenvalues()[0];
                let x = (ev - b_a.a) * b_a.c.inv().expect("nonzero");
                let t = shift(x);
                let bt = b_a.conjugate_by(&t);
                (t, RepresentativeFamily::LowerWithParameter { mu1: bt.a, z: bt.c, mu2: bt.d })
            } else if a1 != d1 {
                let x = b1 * (a1 - d1).inv().expect("nonzero");
                (shift(x), RepresentativeFamily::DiagonalDistinct { mu1: a1, mu2: d1 })
            } else {
                (Matrix2::identity(work), RepresentativeFamily::UpperWithParameter { mu: a1, z: b1 })
            }
        }
    };

    let witness = t * pa;
    let b_tilde = b_a.conjugate_by(&t);
    debug_assert_eq!(b_tilde, family.matrix());
    Ok(CanonicalPair { j_a, b_tilde, family, witness, base_extended: work != a.field(), centralizer })
}

/// The row index, if any, where both `j` and `b_tilde` are entirely zero.
pub fn family_zero_rows(j: &Matrix2, b_tilde: &Matrix2) -> Option<Row> {
    [Row::First, Row::Second].into_iter().find(|&r| j.row_is_zero(r) && b_tilde.row_is_zero(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{make_field, FieldSpec};
    use crate::mat::all_matrices;

    fn f(p: u32) -> FieldSpec {
        make_field(p, 1).unwrap()
    }

    fn check_witness(a: &Matrix2, b: &Matrix2, cp: &CanonicalPair) {
        let w = cp.witness;
        let field = w.field();
        assert_eq!(a.coerce(field).unwrap().conjugate_by(&w), cp.j_a);
        assert_eq!(b.coerce(field).unwrap().conjugate_by(&w), cp.b_tilde);
        assert_eq!(cp.b_tilde, cp.family.matrix());
        assert!(cp.family.side_conditions_hold(), "{:?}", cp.family);
    }

    #[test]
    fn centralizer_kinds() {
        let f5 = f(5);
        let kind = |m| centralizer_kind(&jordan_form(&m).unwrap());
        assert_eq!(kind(Matrix2::from_ints(f5, [[2, 0], [0, 2]])), CentralizerKind::FullGl);
        assert_eq!(kind(Matrix2::from_ints(f5, [[1, 0], [0, 2]])), CentralizerKind::DiagonalTorus);
        assert_eq!(kind(Matrix2::from_ints(f5, [[0, 1], [0, 0]])), CentralizerKind::BlockUpper);
    }

    #[test]
    fn scalar_a_reduces_b_to_jordan_form() {
        let f5 = f(5);
        let a = Matrix2::from_ints(f5, [[2, 0], [0, 2]]);
        let b = Matrix2::from_ints(f5, [[0, 1], [4, 0]]);
        let cp = canonical_pair(&a, &b).unwrap();
        assert_eq!(cp.j_a, a);
        assert_eq!(cp.b_tilde, Matrix2::from_ints(f5, [[2, 0], [0, 3]]));
        assert_eq!(cp.family.tag(), "diagonal_distinct");
        check_witness(&a, &b, &cp);
    }

    #[test]
    fn torus_scales_corner_to_one() {
        let f5 = f(5);
        let a = Matrix2::from_ints(f5, [[1, 0], [0, 2]]);
        let b = Matrix2::from_ints(f5, [[1, 3], [2, 4]]);
        let cp = canonical_pair(&a, &b).unwrap();
        assert_eq!(cp.b_tilde, Matrix2::from_ints(f5, [[1, 1], [1, 4]]));
        assert_eq!(cp.witness, Matrix2::from_ints(f5, [[1, 0], [0, 3]]));
        assert_eq!(cp.family.tag(), "full_generic");
        check_witness(&a, &b, &cp);
    }

    #[test]
    fn block_with_nonzero_corner() {
        let f5 = f(5);
        let a = Matrix2::from_ints(f5, [[0, 1], [0, 0]]);
        let b = Matrix2::from_ints(f5, [[1, 0], [1, 2]]);
        let cp = canonical_pair(&a, &b).unwrap();
        match cp.family {
            RepresentativeFamily::LowerWithParameter { mu1, mu2, .. } => assert_ne!(mu1, mu2),
            other => panic!("unexpected family {other:?}"),
        }
        check_witness(&a, &b, &cp);
    }

    #[test]
    fn zero_rows_examples() {
        let f5 = f(5);
        let m = |x| Matrix2::from_ints(f5, x);
        assert_eq!(family_zero_rows(&m([[1, 0], [0, 0]]), &m([[2, 0], [0, 0]])), Some(Row::Second));
        assert_eq!(family_zero_rows(&m([[0, 0], [0, 1]]), &m([[0, 0], [1, 0]])), Some(Row::First));
        assert_eq!(family_zero_rows(&m([[1, 0], [0, 0]]), &m([[0, 0], [1, 2]])), None);
    }

    #[test]
    fn zero_inputs_rejected() {
        let f3 = f(3);
        let z = Matrix2::zero(f3);
        let i = Matrix2::identity(f3);
        assert_eq!(canonical_pair(&z, &i), Err(ConjugacyError::ZeroMatrix("A")));
        assert_eq!(canonical_pair(&i, &z), Err(ConjugacyError::ZeroMatrix("B")));
    }

    #[test]
    fn pattern_conformance_exhaustive_f2() {
        let f2 = f(2);
        let nonzero: Vec<Matrix2> = all_matrices(f2).filter(|m| !m.is_zero()).collect();
        assert_eq!(nonzero.len(), 15);
        for a in &nonzero {
            for b in &nonzero {
                let cp = canonical_pair(a, b).unwrap();
                check_witness(a, b, &cp);
                let again = canonical_pair(&cp.j_a, &cp.b_tilde).unwrap();
                assert_eq!(again.zero_row(), cp.zero_row());
            }
        }
    }

    #[test]
    fn witness_exhaustive_f3() {
        let f3 = f(3);
        let nonzero: Vec<Matrix2> = all_matrices(f3).filter(|m| !m.is_zero()).collect();
        for a in &nonzero {
            for b in &nonzero {
                let cp = canonical_pair(a, b).unwrap();
                check_witness(a, b, &cp);
            }
        }
    }
}
