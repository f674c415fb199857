//! Ground truth: enumerated images of polynomial maps over `F_q` and exact
//! subspace arithmetic in the 4-dimensional space of 2x2 matrices.
//!
//! Matrices are encoded as the base-`q` number with digits `(a, b, c, d)`,
//! `a` most significant, each digit being the element's canonical index. This
//! encoding indexes the image bitsets and fixes the order in which
//! counterexamples are reported.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::commutator::CommutatorPoly;
use crate::gf::{Fe, FieldSpec};
use crate::mat::{Matrix2, Row};
use crate::waring::PowerSumPoly;

/// Largest field that may be enumerated exhaustively.
pub const EXHAUSTIVE_MAX_Q: u32 = 9;
/// Default number of random pairs in sampled mode.
pub const DEFAULT_SAMPLES: u64 = 1_000_000;

const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("exhaustive enumeration over {0} is not supported (q <= {EXHAUSTIVE_MAX_Q})")]
    TooLarge(FieldSpec),
    #[error("verdict unavailable for a sampled image set")]
    SampledVerdict,
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Sampled { seed: u64, samples: u64 },
}

impl Mode {
    pub fn is_exhaustive(&self) -> bool {
        matches!(self, Mode::Exhaustive)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    pub mode: Mode,
    pub workers: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { mode: Mode::Exhaustive, workers: 1 }
    }
}

impl SweepOptions {
    pub fn exhaustive(workers: usize) -> Self {
        SweepOptions { mode: Mode::Exhaustive, workers: workers.max(1) }
    }

    pub fn sampled(seed: u64, samples: u64, workers: usize) -> Self {
        SweepOptions { mode: Mode::Sampled { seed, samples }, workers: workers.max(1) }
    }
}

/// A polynomial map whose image can be enumerated.
#[derive(Debug, Clone, Copy)]
pub enum PolynomialMap {
    PowerSum(PowerSumPoly),
    Commutator(CommutatorPoly),
}

impl From<PowerSumPoly> for PolynomialMap {
    fn from(p: PowerSumPoly) -> Self {
        PolynomialMap::PowerSum(p)
    }
}

impl From<CommutatorPoly> for PolynomialMap {
    fn from(p: CommutatorPoly) -> Self {
        PolynomialMap::Commutator(p)
    }
}

impl PolynomialMap {
    pub fn field(&self) -> FieldSpec {
        match self {
            PolynomialMap::PowerSum(p) => p.field(),
            PolynomialMap::Commutator(c) => c.field(),
        }
    }

    pub fn eval(&self, x: &Matrix2, y: &Matrix2) -> Matrix2 {
        match self {
            PolynomialMap::PowerSum(p) => p.eval(x, y),
            PolynomialMap::Commutator(c) => c.eval(x, y),
        }
    }
}

type Packed = [u8; 4];
type PackedEval<'a> = Box<dyn Fn(&Packed, &Packed) -> Packed + Sync + 'a>;

/// Index-based arithmetic tables for one field.
#[derive(Debug, Clone)]
pub(crate) struct Tables {
    field: FieldSpec,
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
}

impl Tables {
    pub(crate) fn new(field: FieldSpec) -> Tables {
        let q = field.q() as usize;
        let els: Vec<Fe> = field.elements().collect();
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for (i, x) in els.iter().enumerate() {
            for (j, y) in els.iter().enumerate() {
                add[i * q + j] = (*x + *y).index() as u8;
                mul[i * q + j] = (*x * *y).index() as u8;
            }
        }
        let neg = els.iter().map(|x| (-*x).index() as u8).collect();
        Tables { field, q, add, mul, neg }
    }

    #[inline]
    fn add(&self, x: u8, y: u8) -> u8 {
        self.add[x as usize * self.q + y as usize]
    }

    #[inline]
    fn mul(&self, x: u8, y: u8) -> u8 {
        self.mul[x as usize * self.q + y as usize]
    }

    #[inline]
    fn madd(&self, x: &Packed, y: &Packed) -> Packed {
        [self.add(x[0], y[0]), self.add(x[1], y[1]), self.add(x[2], y[2]), self.add(x[3], y[3])]
    }

    #[inline]
    fn msub(&self, x: &Packed, y: &Packed) -> Packed {
        let n = |v: u8| self.neg[v as usize];
        [self.add(x[0], n(y[0])), self.add(x[1], n(y[1])), self.add(x[2], n(y[2])), self.add(x[3], n(y[3]))]
    }

    #[inline]
    fn mmul(&self, x: &Packed, y: &Packed) -> Packed {
        [
            self.add(self.mul(x[0], y[0]), self.mul(x[1], y[2])),
            self.add(self.mul(x[0], y[1]), self.mul(x[1], y[3])),
            self.add(self.mul(x[2], y[0]), self.mul(x[3], y[2])),
            self.add(self.mul(x[2], y[1]), self.mul(x[3], y[3])),
        ]
    }

    fn mpow(&self, x: &Packed, mut e: u64) -> Packed {
        let mut base = *x;
        let mut acc: Packed = [1, 0, 0, 1];
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mmul(&acc, &base);
            }
            base = self.mmul(&base, &base);
            e >>= 1;
        }
        acc
    }

    #[inline]
    fn code(&self, m: &Packed) -> u32 {
        let q = self.q as u32;
        ((m[0] as u32 * q + m[1] as u32) * q + m[2] as u32) * q + m[3] as u32
    }

    #[inline]
    fn decode(&self, code: u32) -> Packed {
        let q = self.q as u32;
        [(code / (q * q * q)) as u8, (code / (q * q) % q) as u8, (code / q % q) as u8, (code % q) as u8]
    }

    fn pack(&self, m: &Matrix2) -> Packed {
        let v = m.to_vector();
        [v[0].index() as u8, v[1].index() as u8, v[2].index() as u8, v[3].index() as u8]
    }

    #[cfg(test)]
    fn unpack(&self, m: &Packed) -> Matrix2 {
        let e = |i: usize| self.field.element(m[i] as u32);
        Matrix2::from_vector([e(0), e(1), e(2), e(3)])
    }
}

/// Canonical code of a matrix.
pub fn matrix_code(m: &Matrix2) -> u32 {
    let q = m.field().q();
    m.to_vector().iter().fold(0, |acc, x| acc * q + x.index())
}

/// Inverse of [`matrix_code`].
pub fn matrix_from_code(field: FieldSpec, code: u32) -> Matrix2 {
    let q = field.q();
    let e = |shift: u32| field.element(code / q.pow(shift) % q);
    Matrix2::from_vector([e(3), e(2), e(1), e(0)])
}

/// A set of matrices over `F_q`, stored as a bitset over canonical codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageSet {
    field: FieldSpec,
    bits: Vec<u64>,
    mode: Mode,
}

impl ImageSet {
    pub fn empty(field: FieldSpec, mode: Mode) -> ImageSet {
        let n = (field.q() as usize).pow(4);
        ImageSet { field, bits: vec![0; n.div_ceil(64)], mode }
    }

    pub fn from_matrices<'a>(field: FieldSpec, mode: Mode, ms: impl IntoIterator<Item = &'a Matrix2>) -> ImageSet {
        let mut set = ImageSet::empty(field, mode);
        for m in ms {
            set.insert_code(matrix_code(m));
        }
        set
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    #[inline]
    pub fn insert_code(&mut self, code: u32) {
        self.bits[code as usize / 64] |= 1 << (code % 64);
    }

    #[inline]
    pub fn contains_code(&self, code: u32) -> bool {
        self.bits[code as usize / 64] >> (code % 64) & 1 == 1
    }

    pub fn contains(&self, m: &Matrix2) -> bool {
        m.field() == self.field && self.contains_code(matrix_code(m))
    }

    pub fn len(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Member codes in increasing order.
    pub fn codes(&self) -> impl Iterator<Item = u32> + '_ {
        self.bits.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros();
                w &= w - 1;
                Some(i as u32 * 64 + bit)
            })
        })
    }

    pub fn members(&self) -> impl Iterator<Item = Matrix2> + '_ {
        self.codes().map(|c| matrix_from_code(self.field, c))
    }

    fn union_with(&mut self, other: &ImageSet) {
        for (w, o) in self.bits.iter_mut().zip(&other.bits) {
            *w |= o;
        }
    }

    pub fn is_subset_of(&self, other: &ImageSet) -> bool {
        self.field == other.field && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }
}

fn run_in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, OracleError> {
    if workers <= 1 {
        return Ok(f());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| OracleError::Pool(e.to_string()))
        .map(|pool| pool.install(f))
}

/// Enumerates `{ w(X, Y) }` over all `X, Y` (exhaustive) or over seeded
/// random pairs (sampled). Results do not depend on the worker count.
pub fn enumerate_image(map: impl Into<PolynomialMap>, opts: &SweepOptions) -> Result<ImageSet, OracleError> {
    let map = map.into();
    let field = map.field();
    match opts.mode {
        Mode::Exhaustive => {
            if field.q() > EXHAUSTIVE_MAX_Q {
                return Err(OracleError::TooLarge(field));
            }
            let tables = Tables::new(field);
            run_in_pool(opts.workers, || match map {
                PolynomialMap::PowerSum(p) => power_sum_exhaustive(&tables, &p),
                PolynomialMap::Commutator(c) => commutator_exhaustive(&tables, &c),
            })
        }
        Mode::Sampled { seed, samples } => {
            let tables = Tables::new(field);
            run_in_pool(opts.workers, || sampled(&tables, &map, seed, samples, opts.mode))
        }
    }
}

fn all_packed(t: &Tables) -> Vec<Packed> {
    (0..(t.q as u32).pow(4)).map(|c| t.decode(c)).collect()
}

fn or_reduce(field: FieldSpec, mode: Mode, parts: impl ParallelIterator<Item = ImageSet>) -> ImageSet {
    parts.reduce(
        || ImageSet::empty(field, mode),
        |mut a, b| {
            a.union_with(&b);
            a
        },
    )
}

fn power_sum_exhaustive(t: &Tables, p: &PowerSumPoly) -> ImageSet {
    let field = t.field;
    let mode = Mode::Exhaustive;
    let all = all_packed(t);
    let a = t.pack(&p.a());
    let b = t.pack(&p.b());
    // distinct values of A X^k1 and B Y^k2; the image is their sumset
    let term_values = |c: &Packed, k: u64| -> Vec<Packed> {
        let set = or_reduce(
            field,
            mode,
            all.par_chunks(1024).map(|chunk| {
                let mut s = ImageSet::empty(field, mode);
                for x in chunk {
                    s.insert_code(t.code(&t.mmul(c, &t.mpow(x, k))));
                }
                s
            }),
        );
        set.codes().map(|code| t.decode(code)).collect()
    };
    let left = term_values(&a, p.k1());
    let right = term_values(&b, p.k2());
    or_reduce(
        field,
        mode,
        left.par_chunks(64).map(|chunk| {
            let mut s = ImageSet::empty(field, mode);
            for u in chunk {
                for v in &right {
                    s.insert_code(t.code(&t.madd(u, v)));
                }
            }
            s
        }),
    )
}

fn commutator_exhaustive(t: &Tables, c: &CommutatorPoly) -> ImageSet {
    let field = t.field;
    let mode = Mode::Exhaustive;
    let all = all_packed(t);
    let a = t.pack(&c.a());
    let b = t.pack(&c.b());
    let by: Vec<Packed> = all.iter().map(|y| t.mmul(&b, y)).collect();
    or_reduce(
        field,
        mode,
        all.par_chunks(16).map(|chunk| {
            let mut s = ImageSet::empty(field, mode);
            for x in chunk {
                let ax = t.mmul(&a, x);
                for (y, byj) in all.iter().zip(&by) {
                    let v = t.msub(&t.mmul(&ax, y), &t.mmul(byj, x));
                    s.insert_code(t.code(&v));
                }
            }
            s
        }),
    )
}

fn sampled(t: &Tables, map: &PolynomialMap, seed: u64, samples: u64, mode: Mode) -> ImageSet {
    let field = t.field;
    let n_codes = (t.q as u32).pow(4);
    let chunks = samples.div_ceil(CHUNK);
    let eval: PackedEval = match map {
        PolynomialMap::PowerSum(p) => {
            let (a, b, k1, k2) = (t.pack(&p.a()), t.pack(&p.b()), p.k1(), p.k2());
            Box::new(move |x, y| t.madd(&t.mmul(&a, &t.mpow(x, k1)), &t.mmul(&b, &t.mpow(y, k2))))
        }
        PolynomialMap::Commutator(c) => {
            let (a, b) = (t.pack(&c.a()), t.pack(&c.b()));
            Box::new(move |x, y| t.msub(&t.mmul(&t.mmul(&a, x), y), &t.mmul(&t.mmul(&b, y), x)))
        }
    };
    or_reduce(
        field,
        mode,
        (0..chunks).into_par_iter().map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let mut s = ImageSet::empty(field, mode);
            let len = CHUNK.min(samples - chunk * CHUNK);
            for _ in 0..len {
                let x = t.decode(rng.gen_range(0..n_codes));
                let y = t.decode(rng.gen_range(0..n_codes));
                s.insert_code(t.code(&eval(&x, &y)));
            }
            s
        }),
    )
}

/// A subspace of the 4-dimensional matrix space, held as its reduced
/// row-echelon basis (unique per subspace, so `==` is subspace equality).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    field: FieldSpec,
    basis: Vec<[Fe; 4]>,
}

impl Subspace {
    pub fn zero(field: FieldSpec) -> Subspace {
        Subspace { field, basis: Vec::new() }
    }

    pub fn full(field: FieldSpec) -> Subspace {
        let (o, i) = (field.zero(), field.one());
        Subspace { field, basis: vec![[i, o, o, o], [o, i, o, o], [o, o, i, o], [o, o, o, i]] }
    }

    /// Matrices whose `zero_row` vanishes.
    pub fn row_space(field: FieldSpec, zero_row: Row) -> Subspace {
        let (o, i) = (field.zero(), field.one());
        let basis = match zero_row {
            Row::Second => vec![[i, o, o, o], [o, i, o, o]],
            Row::First => vec![[o, o, i, o], [o, o, o, i]],
        };
        Subspace { field, basis }
    }

    /// Trace-zero matrices.
    pub fn trace_zero(field: FieldSpec) -> Subspace {
        let (o, i) = (field.zero(), field.one());
        Subspace::span_of(field, [[i, o, o, -i], [o, i, o, o], [o, o, i, o]])
    }

    pub fn span_of(field: FieldSpec, vectors: impl IntoIterator<Item = [Fe; 4]>) -> Subspace {
        let mut s = Subspace::zero(field);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn span_of_matrices<'a>(field: FieldSpec, ms: impl IntoIterator<Item = &'a Matrix2>) -> Subspace {
        Subspace::span_of(field, ms.into_iter().map(|m| m.to_vector()))
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[[Fe; 4]] {
        &self.basis
    }

    pub fn basis_matrices(&self) -> Vec<Matrix2> {
        self.basis.iter().map(|v| Matrix2::from_vector(*v)).collect()
    }

    /// Number of points, `q^dim`.
    pub fn cardinality(&self) -> u64 {
        (self.field.q() as u64).pow(self.dim() as u32)
    }

    fn pivot(v: &[Fe; 4]) -> Option<usize> {
        v.iter().position(|x| !x.is_zero())
    }

    /// Reduces `v` against the basis; zero iff `v` lies in the span.
    fn reduce(&self, mut v: [Fe; 4]) -> [Fe; 4] {
        for row in &self.basis {
            let p = Subspace::pivot(row).expect("basis rows are nonzero");
            let f = v[p];
            if !f.is_zero() {
                for i in 0..4 {
                    v[i] = v[i] - f * row[i];
                }
            }
        }
        v
    }

    pub fn contains_vector(&self, v: [Fe; 4]) -> bool {
        Subspace::pivot(&self.reduce(v)).is_none()
    }

    pub fn contains(&self, m: &Matrix2) -> bool {
        m.field() == self.field && self.contains_vector(m.to_vector())
    }

    /// Adds `v` to the span, keeping the basis in reduced row-echelon form.
    /// Returns whether the dimension grew.
    pub fn insert(&mut self, v: [Fe; 4]) -> bool {
        let r = self.reduce(v);
        let Some(p) = Subspace::pivot(&r) else {
            return false;
        };
        let inv = r[p].inv().expect("pivot is nonzero");
        let r = r.map(|x| x * inv);
        for row in &mut self.basis {
            let f = row[p];
            if !f.is_zero() {
                for i in 0..4 {
                    row[i] = row[i] - f * r[i];
                }
            }
        }
        self.basis.push(r);
        self.basis.sort_by_key(Subspace::pivot);
        true
    }

    /// All points, as combinations of the basis with coefficients in canonical order.
    pub fn points(&self) -> impl Iterator<Item = [Fe; 4]> + '_ {
        let q = self.field.q() as u64;
        let zero = self.field.zero();
        (0..self.cardinality()).map(move |mut n| {
            let mut v = [zero; 4];
            for row in &self.basis {
                let c = self.field.element((n % q) as u32);
                n /= q;
                for i in 0..4 {
                    v[i] = v[i] + c * row[i];
                }
            }
            v
        })
    }

    /// `{ g M g^-1 : M in self }`.
    pub fn conjugated(&self, g: &Matrix2) -> Subspace {
        let vs: Vec<[Fe; 4]> = self.basis_matrices().iter().map(|m| m.conjugate_by(g).to_vector()).collect();
        Subspace::span_of(g.field(), vs)
    }

    /// Moves the subspace into `field`: embeds into an extension, or
    /// restricts to the prime field when the reduced basis is defined there.
    pub fn coerce(&self, field: FieldSpec) -> Option<Subspace> {
        let basis =
            self.basis_matrices().iter().map(|m| m.coerce(field).map(|m| m.to_vector())).collect::<Option<Vec<_>>>()?;
        Some(Subspace::span_of(field, basis))
    }

    /// The point set as an exhaustive [`ImageSet`].
    pub fn to_image_set(&self) -> ImageSet {
        let mut s = ImageSet::empty(self.field, Mode::Exhaustive);
        for v in self.points() {
            s.insert_code(matrix_code(&Matrix2::from_vector(v)));
        }
        s
    }
}

impl Serialize for Subspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Subspace", 2)?;
        st.serialize_field("dim", &self.dim())?;
        st.serialize_field("basis", &self.basis_matrices())?;
        st.end()
    }
}

/// Smallest subspace containing every member.
pub fn span(set: &ImageSet) -> Subspace {
    let mut s = Subspace::zero(set.field);
    for m in set.members() {
        if s.dim() == 4 {
            break;
        }
        s.insert(m.to_vector());
    }
    s
}

/// Outcome of checking whether an image set is closed under linear combinations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureReport {
    pub is_subspace: bool,
    pub dim: usize,
    pub basis: Subspace,
    /// Number of distinct image points found.
    pub size: u64,
    /// First point of the span (canonical order) missing from the set.
    pub counterexample: Option<Matrix2>,
    pub mode: Mode,
}

pub fn is_subspace(set: &ImageSet) -> ClosureReport {
    let basis = span(set);
    let size = set.len();
    let counterexample = if size == basis.cardinality() {
        None
    } else {
        basis
            .points()
            .map(|v| matrix_code(&Matrix2::from_vector(v)))
            .filter(|&c| !set.contains_code(c))
            .min()
            .map(|c| matrix_from_code(set.field, c))
    };
    ClosureReport {
        is_subspace: counterexample.is_none(),
        dim: basis.dim(),
        basis,
        size,
        counterexample,
        mode: set.mode,
    }
}

/// Whether the member set is exactly the point set of `s`.
pub fn equals_subspace(set: &ImageSet, s: &Subspace) -> Result<bool, OracleError> {
    if !set.mode.is_exhaustive() {
        return Err(OracleError::SampledVerdict);
    }
    Ok(s.field() == set.field && set.len() == s.cardinality() && set.members().all(|m| s.contains(&m)))
}
