//! Acceptance criteria, one pass/fail line each. Every comparison is exact
//! (integer ranks, tolerance zero).

mod common;

use std::time::{Duration, Instant};

use mtorus::chain::{ChainComplex, CompareMode, GradedGroup};
use mtorus::exterior::{AlgebraElement, Pairing, SurfaceBasis};
use mtorus::family::{build_e1, u_action, FamilySpec};
use mtorus::snf::{invariant_factors_big, DenseMatrix};
use mtorus::verify::{emit_report, sweep, verify_case, FamilyKind, ReportFormat, SweepParams};
use mtorus::{predict, ranks_x, sw_euler};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RUNTIME_BUDGET: Duration = Duration::from_secs(60);
const RANDOM_MATRICES: usize = 500;
const RANDOM_SEED: u64 = 0x5eed_0001;
const ORACLE_GENERATOR_LIMIT: usize = 200;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn nonsep_special() -> Vec<FamilySpec> {
    let mut out = Vec::new();
    for g in 2..=5u32 {
        for k in 1..g as i64 {
            for n in [-2, -1, 1, 2] {
                out.push(FamilySpec::nonsep(g, k, n, 0).unwrap());
            }
        }
    }
    out
}

fn nonsep_other() -> Vec<FamilySpec> {
    let mut out = Vec::new();
    for g in 2..=5u32 {
        for k in 1..g as i64 {
            for n in [-2i64, -1, 1, 2] {
                for i in 1..n.unsigned_abs() {
                    out.push(FamilySpec::nonsep(g, k, n, i).unwrap());
                }
            }
        }
    }
    out
}

fn pairs() -> Vec<FamilySpec> {
    let mut out = Vec::new();
    for g in 2..=4u32 {
        for k in 1..g as i64 {
            for (m, n) in [(1, 1), (2, 1), (-1, 1), (1, -2), (-1, -1), (-2, -1)] {
                for (a, b) in [(0, 0), (1, 0), (0, 1)] {
                    if let Ok(spec) = FamilySpec::pair(g, k, m, n, a, b) {
                        out.push(spec);
                    }
                }
            }
        }
    }
    out
}

fn seps() -> Vec<FamilySpec> {
    let mut out = Vec::new();
    for g in 2..=4u32 {
        for k in 1..g as i64 {
            for n in [1, -1] {
                out.push(FamilySpec::sep(g, k, n).unwrap());
            }
        }
    }
    out
}

fn check_cases(specs: &[FamilySpec], mode: CompareMode) -> Result<(), String> {
    for spec in specs {
        let r = verify_case(spec, mode).map_err(|e| format!("{spec}: {e}"))?;
        ensure(r.passed(), || {
            format!(
                "{spec}: {} (computed {}, predicted {})",
                r.failure.clone().unwrap_or_default(),
                r.computed,
                r.predicted
            )
        })?;
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let specs = nonsep_special();
    check_cases(&specs, CompareMode::Relative)?;
    check_cases(&specs, CompareMode::Absolute)?;
    let elapsed = start.elapsed();
    ensure(elapsed <= RUNTIME_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} cases, relative and absolute, {:.2?}",
        specs.len(),
        elapsed
    ))
}

fn criterion_2() -> Outcome {
    let specs = nonsep_other();
    let circle = GradedGroup::from_ranks([(0, 1), (1, 1)]);
    for spec in &specs {
        let h = build_e1(spec)
            .and_then(|c| Ok(c.complex().homology()?))
            .map_err(|e| e.to_string())?;
        let expected = ranks_x(spec.g - 1, spec.depth() - 1)
            .tensor(&circle)
            .unwrap();
        ensure(h.iso_relative(&expected).is_some(), || {
            format!("{spec}: {h} vs {expected}")
        })?;
        ensure(h.is_torsion_free() && h.euler_characteristic() == 0, || {
            format!("{spec}: chi {}", h.euler_characteristic())
        })?;
    }
    check_cases(&specs, CompareMode::Relative)?;
    Ok(format!("{} cases, chi = 0", specs.len()))
}

fn criterion_3() -> Outcome {
    let specs = pairs();
    check_cases(&specs, CompareMode::Relative)?;
    Ok(format!("{} cases", specs.len()))
}

fn criterion_4() -> Outcome {
    let specs = seps();
    check_cases(&specs, CompareMode::Relative)?;
    Ok(format!("{} cases", specs.len()))
}

fn criterion_5() -> Outcome {
    let mut checked = 0;
    for g in 2..=5u32 {
        for k in 1..g as i64 {
            let expected = sw_euler(g, k).unwrap().to_i64().unwrap();
            let d = g as i64 - 1 - k;
            let mut specs = vec![FamilySpec::identity(g, k).unwrap()];
            specs.extend([-2, -1, 1, 2].map(|n| FamilySpec::nonsep(g, k, n, 0).unwrap()));
            for spec in specs {
                let h = build_e1(&spec)
                    .and_then(|c| Ok(c.complex().homology()?))
                    .map_err(|e| e.to_string())?;
                ensure(h.euler_characteristic().abs() == expected, || {
                    format!(
                        "{spec}: |chi| = {} expected {expected}",
                        h.euler_characteristic().abs()
                    )
                })?;
                if spec.family != mtorus::Family::Identity && k <= g as i64 - 2 {
                    let full = ranks_x(g, d).total_rank();
                    let drop = 2 * ranks_x(g - 1, d - 1).total_rank();
                    ensure(drop > 0 && h.total_rank() == full - drop, || {
                        format!("{spec}: rank {} vs {full} - {drop}", h.total_rank())
                    })?;
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} cases"))
}

fn criterion_6() -> Outcome {
    for g in 3..=5u32 {
        let spec = FamilySpec::nonsep(g, g as i64 - 2, 1, 0).unwrap();
        let h = build_e1(&spec)
            .and_then(|c| Ok(c.complex().homology()?))
            .map_err(|e| e.to_string())?;
        let expected = GradedGroup::from_ranks([(g as i64 - 1, 2 * g as usize - 1), (g as i64, 1)]);
        ensure(h == expected, || format!("{spec}: {h} vs {expected}"))?;
        ensure(predict(&spec).unwrap().group == expected, || {
            format!("{spec}: prediction differs")
        })?;
    }
    Ok("g = 3, 4, 5 in absolute degrees".into())
}

fn oracle_agrees(c: &ChainComplex) -> Result<(), String> {
    let h = c.homology().map_err(|e| e.to_string())?;
    let (ranks, torsion) = common::homology(c);
    ensure(h.ranks() == &ranks && h.torsion() == &torsion, || {
        format!("{h} vs oracle {ranks:?} {torsion:?}")
    })
}

fn criterion_7() -> Outcome {
    let mut specs = nonsep_special();
    specs.extend(nonsep_other());
    specs.extend(pairs());
    specs.extend(seps());
    let mut oracle_checked = 0;
    for spec in &specs {
        let c = build_e1(spec).map_err(|e| e.to_string())?;
        let complex = c.complex();
        complex
            .check_differential()
            .map_err(|v| format!("{spec}: {v}"))?;
        let u = u_action(&c);
        let del = complex.boundary();
        ensure(u.mul(del) == del.mul(&u), || {
            format!("{spec}: U does not commute with the differential")
        })?;
        let conj = build_e1(&spec.conjugate()).map_err(|e| e.to_string())?;
        ensure(conj.complex() == complex, || {
            format!("{spec}: k and -k complexes differ")
        })?;
        if c.len() <= ORACLE_GENERATOR_LIMIT {
            oracle_agrees(complex).map_err(|e| format!("{spec}: {e}"))?;
            oracle_checked += 1;
        }
    }
    for g in 2..=5u32 {
        for k in g as i64..=g as i64 + 1 {
            for spec in [
                FamilySpec::identity(g, k),
                FamilySpec::nonsep(g, k, 1, 0),
                FamilySpec::sep(g, -k, -1),
            ] {
                let spec = spec.unwrap();
                let c = build_e1(&spec).map_err(|e| e.to_string())?;
                ensure(
                    c.is_empty() && predict(&spec).unwrap().group.is_zero(),
                    || format!("{spec}: not zero"),
                )?;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_SEED);
    for trial in 0..RANDOM_MATRICES {
        let rows = rng.gen_range(0..=30);
        let cols = rng.gen_range(0..=30);
        let data: Vec<Vec<i64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.gen_range(-5..=5)).collect())
            .collect();
        let dense = if rows == 0 {
            DenseMatrix::zeros(0, cols)
        } else {
            DenseMatrix::from_rows(&data)
        };
        let ours = invariant_factors_big(&dense);
        let theirs = common::invariant_factors(&data);
        ensure(
            ours.iter()
                .map(|v| BigInt::from(v.clone()))
                .collect::<Vec<_>>()
                == theirs,
            || format!("matrix {trial}: {ours:?} vs {theirs:?}"),
        )?;
        ensure(ours.len() == common::rational_rank(&data), || {
            format!("matrix {trial}: rank")
        })?;
    }

    for g in 1..=3 {
        let basis = SurfaceBasis::new(g).unwrap();
        let ms: Vec<AlgebraElement> = basis
            .monomials()
            .into_iter()
            .map(|m| AlgebraElement::monomial(basis, m, 1))
            .collect();
        let zetas: Vec<Pairing> = (0..2 * g as usize)
            .map(|t| {
                let mut v = vec![0; 2 * g as usize];
                v[t] = 1;
                Pairing::new(v)
            })
            .collect();
        for a in &ms {
            let p = a.homogeneous_degree().unwrap();
            for b in &ms {
                let q = b.homogeneous_degree().unwrap();
                let sign = if (p * q) % 2 == 0 { 1 } else { -1 };
                ensure(
                    a.wedge(b).unwrap() == b.wedge(a).unwrap().scale(sign),
                    || format!("{a} and {b} do not graded-commute"),
                )?;
                for z in &zetas {
                    let lhs = a.wedge(b).unwrap().contract(z).unwrap();
                    let rhs = a
                        .contract(z)
                        .unwrap()
                        .wedge(b)
                        .unwrap()
                        .add(
                            &a.wedge(&b.contract(z).unwrap())
                                .unwrap()
                                .scale(if p % 2 == 0 { 1 } else { -1 }),
                        )
                        .unwrap();
                    ensure(lhs == rhs, || format!("antiderivation fails on {a}, {b}"))?;
                }
            }
        }
    }
    Ok(format!(
        "{} complexes, {oracle_checked} against oracle, {RANDOM_MATRICES} random matrices, exterior axioms g <= 3",
        specs.len()
    ))
}

fn criterion_8() -> Outcome {
    let params = SweepParams {
        genera: vec![2, 3, 4, 5],
        families: vec![FamilyKind::NonSep],
        ks: None,
        exponents: vec![-2, -1, 1, 2],
        mode: CompareMode::Relative,
    };
    let first = emit_report(&sweep(&params, 0), ReportFormat::Json);
    let second = emit_report(&sweep(&params, 0), ReportFormat::Json);
    let serial = emit_report(&sweep(&params, 1), ReportFormat::Json);
    ensure(first == second, || "two sweeps differ".into())?;
    ensure(first == serial, || {
        "parallel and serial sweeps differ".into()
    })?;
    Ok(format!(
        "{} bytes, identical across runs and thread counts",
        first.len()
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 nonsep i=0 homology equals prediction", criterion_1),
        ("2 nonsep i!=0 homology and chi = 0", criterion_2),
        ("3 transverse pairs", criterion_3),
        ("4 separating twists", criterion_4),
        ("5 euler characteristic and rank drop", criterion_5),
        ("6 homology at k = g-2", criterion_6),
        ("7 property suite and oracles", criterion_7),
        ("8 deterministic sweep output", criterion_8),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
