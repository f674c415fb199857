//! Images of the power-sum map `A x^k1 + B y^k2` and the generalized
//! commutator `A x y - B y x` on 2x2 matrices with matrix constants, computed
//! exactly over small finite fields and checked against exhaustive enumeration.

pub mod commutator;
pub mod conjugacy;
pub mod gf;
pub mod mat;
pub mod oracle;
pub mod waring;

pub use conjugacy::{canonical_pair, family_zero_rows, CanonicalPair, RepresentativeFamily};
pub use gf::{make_field, Fe, FieldSpec};
pub use mat::{Matrix2, Row};
