use std::collections::BTreeSet;
use std::time::Instant;

use matmaps::canonical_pair;
use matmaps::commutator::{canonical_case_prediction, CommutatorPoly};
use matmaps::mat::{all_matrices, jordan_form, Matrix2};
use matmaps::oracle::{enumerate_image, equals_subspace, is_subspace, matrix_code, ImageSet, Subspace};
use matmaps::waring::{
    classify_image, instantiate_row, roots_available, solve as solve_poly, table_rows, PowerSumPoly, WaringError,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::{
    CanonicalSummary, Counts, Inputs, MapKind, OracleSummary, PredictionSummary, Report, Solution, Status,
    SubspaceSummary, VerificationReport,
};
use crate::{Args, CliError, MapArg, RunConfig};

fn power_sum_inputs(poly: &PowerSumPoly, c: Option<Matrix2>) -> Inputs {
    Inputs {
        field: poly.field(),
        map: MapKind::PowerSum,
        a: Some(poly.a()),
        b: Some(poly.b()),
        c,
        k1: Some(poly.k1()),
        k2: Some(poly.k2()),
    }
}

fn commutator_inputs(poly: &CommutatorPoly) -> Inputs {
    Inputs {
        field: poly.field(),
        map: MapKind::Commutator,
        a: Some(poly.a()),
        b: Some(poly.b()),
        c: None,
        k1: None,
        k2: None,
    }
}

fn canonical(a: &Matrix2, b: &Matrix2) -> Option<CanonicalSummary> {
    canonical_pair(a, b).ok().map(|cp| CanonicalSummary::from(&cp))
}

fn elapsed(config: &RunConfig, t: Instant) -> Option<f64> {
    config.timing.then(|| t.elapsed().as_secs_f64() * 1e3)
}

fn contained_in(set: &ImageSet, s: &Subspace) -> bool {
    set.members().all(|m| s.contains(&m))
}

pub fn classify(config: &RunConfig, args: &Args) -> Result<Report, CliError> {
    let a = config.parse_matrix("A", args.a.as_ref())?;
    let b = config.parse_matrix("B", args.b.as_ref())?;
    let t = Instant::now();
    let mut r = match args.map {
        MapArg::PowerSum => {
            let poly = PowerSumPoly::new(a, b, config.k1, config.k2)?;
            let mut r = VerificationReport::new("input", power_sum_inputs(&poly, None));
            r.prediction = Some(PredictionSummary::new(&classify_image(&poly)?, config.field));
            r.gate = Some(roots_available(config.field, config.k1, config.k2));
            r
        }
        MapArg::Commutator => {
            let poly = CommutatorPoly::new(a, b)?;
            let mut r = VerificationReport::new("input", commutator_inputs(&poly));
            match canonical_case_prediction(&poly) {
                Some(p) => r.prediction = Some(PredictionSummary::new(&p, config.field)),
                None => r.status = Status::Abstain,
            }
            r
        }
    };
    r.canonical = canonical(&a, &b);
    r.wall_ms = elapsed(config, t);
    Ok(Report::new("classify", config.clone(), vec![r]))
}

pub fn solve(config: &RunConfig, args: &Args) -> Result<Report, CliError> {
    let a = config.parse_matrix("A", args.a.as_ref())?;
    let b = config.parse_matrix("B", args.b.as_ref())?;
    let c = config.parse_matrix("C", args.c.as_ref())?;
    let poly = PowerSumPoly::new(a, b, config.k1, config.k2)?;
    let t = Instant::now();
    let mut r = VerificationReport::new("input", power_sum_inputs(&poly, Some(c)));
    r.canonical = canonical(&a, &b);
    r.prediction = Some(PredictionSummary::new(&classify_image(&poly)?, config.field));
    r.gate = Some(roots_available(config.field, config.k1, config.k2));
    r.solution = Some(match solve_poly(&poly, &c)? {
        Some((x, y)) => {
            Solution { in_image: true, x: Some(x), y: Some(y), attestation: "verified: A X^k1 + B Y^k2 = C".into() }
        }
        None => Solution {
            in_image: false,
            x: None,
            y: None,
            attestation: format!(
                "not in image: exhaustive search over all {} matrices X against every value of B Y^k2",
                (config.field.q() as u64).pow(4)
            ),
        },
    });
    r.wall_ms = elapsed(config, t);
    Ok(Report::new("solve", config.clone(), vec![r]))
}

pub fn image(config: &RunConfig, args: &Args) -> Result<Report, CliError> {
    let a = config.parse_matrix("A", args.a.as_ref())?;
    let b = config.parse_matrix("B", args.b.as_ref())?;
    let r = match args.map {
        MapArg::PowerSum => power_sum_report("input", &PowerSumPoly::new(a, b, config.k1, config.k2)?, None, config)?,
        MapArg::Commutator => commutator_report("input", &CommutatorPoly::new(a, b)?, config)?,
    };
    Ok(Report::new("image", config.clone(), vec![r]))
}

/// Enumerates the power-sum image and compares it with the classifier and,
/// for table rows, with the table's claimed image.
///
/// Upper bounds are always checked; equality with a full image is asserted
/// only when k-th roots are available.
pub fn power_sum_report(
    id: &str,
    poly: &PowerSumPoly,
    expected: Option<Subspace>,
    config: &RunConfig,
) -> Result<VerificationReport, CliError> {
    let field = poly.field();
    let t = Instant::now();
    let mut r = VerificationReport::new(id, power_sum_inputs(poly, None));
    r.canonical = canonical(&poly.a(), &poly.b());
    let prediction = classify_image(poly)?;
    let predicted = prediction.subspace(field);
    r.prediction = Some(PredictionSummary::new(&prediction, field));
    r.expected = expected.as_ref().map(SubspaceSummary::from);
    let gate = roots_available(field, poly.k1(), poly.k2());
    r.gate = Some(gate);

    let set = enumerate_image(*poly, &config.sweep())?;
    r.oracle = Some(OracleSummary::from(&is_subspace(&set)));
    let claims: Vec<&Subspace> = std::iter::once(&predicted).chain(expected.as_ref()).collect();
    let claims_full = claims.iter().any(|s| s.dim() == 4);
    if let Some(s) = claims.iter().find(|s| !contained_in(&set, s)) {
        r.status = Status::Fail;
        r.detail = Some(format!("image leaves a claimed subspace of dim {}", s.dim()));
        if set.mode().is_exhaustive() {
            r.matched = Some(false);
        }
    } else if !set.mode().is_exhaustive() {
        r.status = Status::Evidence;
        r.detail = Some("sampled image lies inside every claim".into());
    } else {
        let matched = claims.iter().all(|s| equals_subspace(&set, s).unwrap_or(false));
        r.matched = Some(matched);
        r.status = match (matched, gate || !claims_full) {
            (_, false) => {
                r.detail = Some("roots unavailable".into());
                Status::Gated
            }
            (true, true) => Status::Pass,
            (false, true) => Status::Fail,
        };
    }
    r.wall_ms = elapsed(config, t);
    Ok(r)
}

/// Enumerates the commutator image, certifies closure and compares the span
/// with the closed-form prediction when there is one.
pub fn commutator_report(id: &str, poly: &CommutatorPoly, config: &RunConfig) -> Result<VerificationReport, CliError> {
    let field = poly.field();
    let t = Instant::now();
    let mut r = VerificationReport::new(id, commutator_inputs(poly));
    r.canonical = canonical(&poly.a(), &poly.b());
    let prediction = canonical_case_prediction(poly);
    r.prediction = prediction.as_ref().map(|p| PredictionSummary::new(p, field));
    let set = enumerate_image(*poly, &config.sweep())?;
    let closure = is_subspace(&set);
    r.oracle = Some(OracleSummary::from(&closure));
    let predicted = prediction.map(|p| p.subspace(field));
    if set.mode().is_exhaustive() {
        if !closure.is_subspace {
            r.status = Status::Fail;
            r.matched = Some(false);
            r.detail = Some("image is not a subspace".into());
        } else if let Some(s) = &predicted {
            let matched = closure.basis == *s;
            r.matched = Some(matched);
            r.status = if matched { Status::Pass } else { Status::Fail };
        } else {
            r.status = Status::Abstain;
        }
    } else {
        r.status = match &predicted {
            Some(s) if !contained_in(&set, s) => {
                r.detail = Some("sampled image leaves the predicted subspace".into());
                Status::Fail
            }
            Some(_) => Status::Evidence,
            None => Status::Abstain,
        };
    }
    r.wall_ms = elapsed(config, t);
    Ok(r)
}

pub fn verify_table(config: &RunConfig) -> Result<Report, CliError> {
    let field = config.field;
    let mut reports = Vec::new();
    let mut rows = Counts::default();
    for row in table_rows() {
        let id = format!("row-{:02}", row.id);
        let pairs = match instantiate_row(&row, field, config.seed, config.instances.max(1)) {
            Ok(pairs) => pairs,
            Err(WaringError::Unsatisfiable { .. }) => {
                let inputs = Inputs {
                    field,
                    map: MapKind::PowerSum,
                    a: None,
                    b: None,
                    c: None,
                    k1: Some(config.k1),
                    k2: Some(config.k2),
                };
                let mut r = VerificationReport::new(id, inputs);
                r.status = Status::Skipped;
                r.detail = Some("skipped: field too small".into());
                if row.duplicate_of.is_none() {
                    rows.add(Status::Skipped);
                }
                reports.push(r);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let expected = row.image.subspace(field);
        let mut verdict = Status::Pass;
        for (n, (a, b)) in pairs.iter().enumerate() {
            let poly = PowerSumPoly::new(*a, *b, config.k1, config.k2)?;
            let mut r = power_sum_report(&format!("{id}#{}", n + 1), &poly, Some(expected.clone()), config)?;
            if let Some(dup) = row.duplicate_of {
                r.detail = Some(match r.detail {
                    Some(d) => format!("{d}; duplicate of row {dup}"),
                    None => format!("duplicate of row {dup}"),
                });
            }
            verdict = worse(verdict, r.status);
            reports.push(r);
        }
        if row.duplicate_of.is_none() {
            rows.add(verdict);
        }
    }
    let mut report = Report::new("verify-table", config.clone(), reports);
    report.summary.rows = Some(rows);
    Ok(report)
}

fn worse(a: Status, b: Status) -> Status {
    let rank = |s: Status| match s {
        Status::Fail => 4,
        Status::Gated => 3,
        Status::Evidence => 2,
        Status::Abstain | Status::Skipped | Status::Info => 1,
        Status::Pass => 0,
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}

/// Largest field whose canonical pairs are all swept by `verify-commutator`;
/// beyond it only seeded random pairs are checked.
pub const CANONICAL_SWEEP_MAX_Q: u32 = 5;

/// Distinct canonical pairs `(J_A, B~)` defined over the field itself.
pub fn canonical_representatives(field: matmaps::FieldSpec) -> Vec<(Matrix2, Matrix2)> {
    let forms: BTreeSet<u32> = all_matrices(field)
        .filter(|m| !m.is_zero())
        .filter_map(|m| jordan_form(&m).ok())
        .filter(|jd| !jd.base_extended)
        .map(|jd| matrix_code(&jd.j))
        .collect();
    let mut seen = BTreeSet::new();
    for j in forms {
        let j = matmaps::oracle::matrix_from_code(field, j);
        for b in all_matrices(field).filter(|m| !m.is_zero()) {
            if let Ok(cp) = canonical_pair(&j, &b) {
                if !cp.base_extended {
                    seen.insert((matrix_code(&cp.j_a), matrix_code(&cp.b_tilde)));
                }
            }
        }
    }
    seen.into_iter()
        .map(|(a, b)| (matmaps::oracle::matrix_from_code(field, a), matmaps::oracle::matrix_from_code(field, b)))
        .collect()
}

/// `n` seeded random pairs of nonzero matrices.
pub fn random_pairs(field: matmaps::FieldSpec, seed: u64, n: usize) -> Vec<(Matrix2, Matrix2)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nonzero = || loop {
        let m = Matrix2::from_vector([0; 4].map(|_| field.element(rng.gen_range(0..field.q()))));
        if !m.is_zero() {
            return m;
        }
    };
    (0..n).map(|_| (nonzero(), nonzero())).collect()
}

pub fn verify_commutator(config: &RunConfig, args: &Args) -> Result<Report, CliError> {
    let field = config.field;
    let mut reports = Vec::new();
    if args.a.is_some() || args.b.is_some() {
        let a = config.parse_matrix("A", args.a.as_ref())?;
        let b = config.parse_matrix("B", args.b.as_ref())?;
        reports.push(commutator_report("input", &CommutatorPoly::new(a, b)?, config)?);
        return Ok(Report::new("verify-commutator", config.clone(), reports));
    }
    if field.q() <= CANONICAL_SWEEP_MAX_Q {
        for (n, (a, b)) in canonical_representatives(field).into_iter().enumerate() {
            let poly = CommutatorPoly::new(a, b)?;
            reports.push(commutator_report(&format!("canonical-{:04}", n + 1), &poly, config)?);
        }
    }
    for (n, (a, b)) in random_pairs(field, config.seed, config.pairs).into_iter().enumerate() {
        let poly = CommutatorPoly::new(a, b)?;
        reports.push(commutator_report(&format!("random-{:04}", n + 1), &poly, config)?);
    }
    Ok(Report::new("verify-commutator", config.clone(), reports))
}
