//! Worked values for each public operation, plus report-level invariants.

use mtorus::chain::{gg_combine, Combine, CompareMode, GradedGroup};
use mtorus::family::{build_e1, FamilySpec};
use mtorus::verify::{
    emit_report, sweep, verify_against, verify_case, FamilyKind, ReportFormat, SweepParams,
};
use mtorus::{fiber_genus_allowed, module_condition, predict, ranks_x};

fn ranks(pairs: &[(i64, usize)]) -> GradedGroup {
    GradedGroup::from_ranks(pairs.iter().copied())
}

#[test]
fn nonsep_special_small_genus() {
    let spec = FamilySpec::nonsep(2, 1, 1, 0).unwrap();
    let r = verify_case(&spec, CompareMode::Relative).unwrap();
    assert!(r.passed());
    assert_eq!(r.computed, ranks(&[(2, 1)]));
}

#[test]
fn transverse_pair_mixed_signs() {
    let spec = FamilySpec::pair(3, 1, 1, -1, 0, 0).unwrap();
    let r = verify_case(&spec, CompareMode::Relative).unwrap();
    assert!(r.passed());
    // X(2,0)[-1] + Λ^3 H^1(Σ_2) in one degree
    assert_eq!(r.computed.total_rank(), 5);
    assert_eq!(r.computed.support().len(), 1);
}

#[test]
fn pair_sign_patterns_at_genus_three() {
    let cases = [
        ((1, 1), ranks(&[(2, 4), (3, 1)])),
        ((-1, -1), ranks(&[(1, 1), (2, 4)])),
        ((2, -1), ranks(&[(2, 5)])),
    ];
    for ((m, n), expected) in cases {
        let spec = FamilySpec::pair(3, 1, m, n, 0, 0).unwrap();
        let h = build_e1(&spec).unwrap().complex().homology().unwrap();
        assert_eq!(h, expected, "{spec}");
        assert!(h.iso_relative(&predict(&spec).unwrap().group).is_some());
    }
}

#[test]
fn negative_control_detects_misaligned_summand() {
    let spec = FamilySpec::nonsep(3, 1, 1, 0).unwrap();
    // the Λ summand moved up one degree
    let wrong = ranks(&[(2, 1), (3, 5)]);
    let r = verify_against(&spec, &wrong, CompareMode::Relative).unwrap();
    assert!(!r.passed());
    assert!(r.first_mismatch().is_some());
}

#[test]
fn conjugate_cases_agree() {
    let params = SweepParams {
        genera: vec![2, 3, 4],
        families: FamilyKind::ALL.to_vec(),
        ks: None,
        exponents: vec![-2, -1, 1, 2],
        mode: CompareMode::Relative,
    };
    for spec in params.cases() {
        let a = verify_case(&spec, CompareMode::Relative).unwrap();
        let b = verify_case(&spec.conjugate(), CompareMode::Relative).unwrap();
        assert_eq!(
            (a.computed, a.predicted),
            (b.computed, b.predicted),
            "{spec}"
        );
    }
}

#[test]
fn main_sweep_passes_with_rank_bookkeeping() {
    let params = SweepParams {
        genera: vec![2, 3, 4],
        families: FamilyKind::ALL.to_vec(),
        ks: None,
        exponents: vec![-2, -1, 1, 2],
        mode: CompareMode::Relative,
    };
    let report = sweep(&params, 0);
    assert!(
        report.all_passed(),
        "{}",
        emit_report(&report, ReportFormat::Text)
    );
    assert_eq!(report.passed + report.failed, report.cases.len());
    let mut sorted = report.cases.iter().map(|c| c.spec).collect::<Vec<_>>();
    sorted.sort();
    assert_eq!(
        sorted,
        report.cases.iter().map(|c| c.spec).collect::<Vec<_>>()
    );
    for c in &report.cases {
        if let mtorus::Family::NonSepTwist { i: 0, .. } = c.spec.family {
            let d = c.spec.depth();
            let expected =
                ranks_x(c.spec.g, d).total_rank() - 2 * ranks_x(c.spec.g - 1, d - 1).total_rank();
            assert_eq!(c.computed.total_rank(), expected, "{}", c.spec);
        }
    }
}

#[test]
fn identity_sweep_is_x() {
    let params = SweepParams {
        genera: vec![2],
        families: vec![FamilyKind::Identity],
        ks: Some(vec![-2, -1, 1, 2]),
        exponents: vec![1],
        mode: CompareMode::Absolute,
    };
    let report = sweep(&params, 1);
    assert_eq!(report.cases.len(), 4);
    for c in &report.cases {
        assert!(c.passed());
        assert_eq!(c.computed, ranks_x(2, c.spec.depth()));
    }
}

#[test]
fn graded_group_algebra() {
    let a = ranks(&[(0, 1), (1, 2)]);
    let b = ranks(&[(0, 1), (1, 1)]);
    assert_eq!(
        gg_combine(Combine::Tensor, &[a.clone(), b.clone()]).unwrap(),
        ranks(&[(0, 1), (1, 3), (2, 2)])
    );
    assert_eq!(
        gg_combine(Combine::Shift(-1), std::slice::from_ref(&a)).unwrap(),
        ranks(&[(-1, 1), (0, 2)])
    );
    assert_eq!(
        gg_combine(Combine::DirectSum, &[a, b]).unwrap(),
        ranks(&[(0, 2), (1, 3)])
    );
}

#[test]
fn numeric_criteria() {
    assert!(module_condition(
        &FamilySpec::pair(4, 1, 1, 1, 0, 0).unwrap()
    ));
    assert!(!module_condition(
        &FamilySpec::pair(5, 1, 1, 1, 0, 0).unwrap()
    ));
    assert!(fiber_genus_allowed(4, 7).unwrap());
    assert!(!fiber_genus_allowed(4, 6).unwrap());
}
