//! Build, compute, predict and compare: single cases, sweeps, reports and
//! golden files.

use std::fmt::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::chain::{CompareMode, GradedGroup};
use crate::closed_forms::{module_condition, predict, sw_euler};
use crate::family::{build_e1, Family, FamilyError, FamilySpec, SpecRecord};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EulerCheck {
    pub computed: i64,
    pub expected_abs: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseResult {
    #[serde(serialize_with = "serialize_spec")]
    pub spec: FamilySpec,
    pub computed: GradedGroup,
    pub predicted: GradedGroup,
    pub verdict: Verdict,
    pub shift: Option<i64>,
    pub euler: EulerCheck,
    pub torsion_free: bool,
    pub module_condition: bool,
    pub generators: usize,
    /// Written as 0 unless timings were requested, so reports stay
    /// byte-identical across runs.
    pub millis: u64,
    #[serde(skip)]
    pub mode: CompareMode,
    #[serde(skip)]
    pub wall: Duration,
    /// Why the case failed, if it did.
    #[serde(skip)]
    pub failure: Option<String>,
}

fn serialize_spec<S: Serializer>(spec: &FamilySpec, s: S) -> Result<S::Ok, S::Error> {
    SpecRecord::from(spec).serialize(s)
}

impl CaseResult {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Lowest degree where computed and predicted ranks or torsion differ,
    /// after aligning by the lowest occupied degree in relative mode.
    pub fn first_mismatch(&self) -> Option<i64> {
        let offset = match (
            self.mode,
            self.computed.min_degree(),
            self.predicted.min_degree(),
        ) {
            (CompareMode::Relative, Some(a), Some(b)) => b - a,
            _ => 0,
        };
        let shifted = self.computed.shift(offset);
        let mut degrees: Vec<i64> = shifted.support();
        degrees.extend(self.predicted.support());
        degrees.extend(shifted.torsion().keys());
        degrees.sort_unstable();
        degrees.dedup();
        degrees
            .into_iter()
            .find(|&q| {
                shifted.rank_at(q) != self.predicted.rank_at(q)
                    || shifted.torsion().get(&q) != self.predicted.torsion().get(&q)
            })
            .map(|q| q - offset)
    }
}

/// Whether absolute degrees are pinned for this family.
pub fn absolute_supported(spec: &FamilySpec) -> bool {
    matches!(
        spec.family,
        Family::Identity | Family::NonSepTwist { i: 0, .. }
    )
}

/// Expected `|χ|` of the homology.
pub fn expected_euler(spec: &FamilySpec, predicted: &GradedGroup) -> u64 {
    match spec.family {
        Family::Identity | Family::NonSepTwist { i: 0, .. } => match sw_euler(spec.g, spec.k) {
            Ok(v) => v.to_u64().expect("binomial fits in u64"),
            Err(_) => 0,
        },
        Family::NonSepTwist { .. } => 0,
        _ => predicted.euler_characteristic().unsigned_abs(),
    }
}

/// Verifies `spec` against its closed-form prediction.
pub fn verify_case(spec: &FamilySpec, mode: CompareMode) -> Result<CaseResult, FamilyError> {
    let predicted = predict(spec)?.group;
    verify_against(spec, &predicted, mode)
}

/// Verifies `spec` against an arbitrary predicted group.
pub fn verify_against(
    spec: &FamilySpec,
    predicted: &GradedGroup,
    mode: CompareMode,
) -> Result<CaseResult, FamilyError> {
    if mode == CompareMode::Absolute && !absolute_supported(spec) {
        return Err(FamilyError::Unsupported(format!(
            "absolute comparison is defined only for identity and nonsep i=0, not {spec}"
        )));
    }
    let start = Instant::now();
    let e1 = build_e1(spec)?;
    let complex = e1.complex();
    let differential = complex.check_differential();
    let computed = complex.homology()?;
    let shift = computed.graded_iso(predicted, mode);
    let torsion_free = computed.is_torsion_free();
    let euler = EulerCheck {
        computed: computed.euler_characteristic(),
        expected_abs: expected_euler(spec, predicted),
    };
    let failure = if let Err(v) = differential {
        Some(format!("not a differential: {v}"))
    } else if !torsion_free {
        Some("homology has torsion".to_string())
    } else if shift.is_none() {
        Some("computed and predicted groups differ".to_string())
    } else if euler.computed.unsigned_abs() != euler.expected_abs {
        Some(format!(
            "|chi| = {} but expected {}",
            euler.computed.unsigned_abs(),
            euler.expected_abs
        ))
    } else {
        None
    };
    Ok(CaseResult {
        spec: *spec,
        computed,
        predicted: predicted.clone(),
        verdict: if failure.is_none() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        shift,
        euler,
        torsion_free,
        module_condition: module_condition(spec),
        generators: e1.len(),
        millis: 0,
        mode,
        wall: start.elapsed(),
        failure,
    })
}

/// Which families a sweep covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyKind {
    Identity,
    NonSep,
    Pair,
    Sep,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 4] = [
        FamilyKind::Identity,
        FamilyKind::NonSep,
        FamilyKind::Pair,
        FamilyKind::Sep,
    ];

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "identity" => Some(FamilyKind::Identity),
            "nonsep" => Some(FamilyKind::NonSep),
            "pair" => Some(FamilyKind::Pair),
            "sep" => Some(FamilyKind::Sep),
            _ => None,
        }
    }
}

/// Ranges for a sweep. `ks = None` means every `k` with `1 <= k <= g - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepParams {
    pub genera: Vec<u32>,
    pub families: Vec<FamilyKind>,
    pub ks: Option<Vec<i64>>,
    pub exponents: Vec<i64>,
    pub mode: CompareMode,
}

impl SweepParams {
    /// Every valid spec in the ranges, sorted and deduplicated.
    pub fn cases(&self) -> Vec<FamilySpec> {
        let mut out = Vec::new();
        for &g in &self.genera {
            let ks: Vec<i64> = match &self.ks {
                Some(ks) => ks.clone(),
                None => (1..g as i64).collect(),
            };
            for &k in &ks {
                for &kind in &self.families {
                    for family in self.families_of(kind) {
                        if let Ok(spec) = FamilySpec::new(g, k, family) {
                            out.push(spec);
                        }
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn families_of(&self, kind: FamilyKind) -> Vec<Family> {
        let e = &self.exponents;
        match kind {
            FamilyKind::Identity => vec![Family::Identity],
            FamilyKind::NonSep => e
                .iter()
                .flat_map(|&n| (0..n.unsigned_abs()).map(move |i| Family::NonSepTwist { n, i }))
                .collect(),
            FamilyKind::Pair => e
                .iter()
                .flat_map(|&m| e.iter().map(move |&n| (m, n)))
                .flat_map(|(m, n)| {
                    (0..m.unsigned_abs()).flat_map(move |a| {
                        (0..n.unsigned_abs()).map(move |b| Family::TransversePair { m, n, a, b })
                    })
                })
                .collect(),
            FamilyKind::Sep => e
                .iter()
                .filter(|n| n.abs() == 1)
                .map(|&n| Family::SepTwist { n })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub version: String,
    #[serde(skip)]
    pub params: Option<SweepParams>,
    pub cases: Vec<CaseResult>,
    pub passed: usize,
    pub failed: usize,
}

impl VerificationReport {
    pub fn new(params: Option<SweepParams>, cases: Vec<CaseResult>) -> Self {
        let passed = cases.iter().filter(|c| c.passed()).count();
        Self {
            version: VERSION.to_string(),
            params,
            failed: cases.len() - passed,
            passed,
            cases,
        }
    }

    /// Copies measured wall times into the serialized `millis` field.
    pub fn with_timings(mut self) -> Self {
        for c in &mut self.cases {
            c.millis = c.wall.as_millis() as u64;
        }
        self
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// Verifies every case of `params`, using `jobs` worker threads (0 picks a
/// default). In absolute mode, families without pinned degrees fall back to
/// relative comparison.
pub fn sweep(params: &SweepParams, jobs: usize) -> VerificationReport {
    let specs = params.cases();
    let run = |spec: &FamilySpec| {
        let mode = if absolute_supported(spec) {
            params.mode
        } else {
            CompareMode::Relative
        };
        verify_case(spec, mode).unwrap_or_else(|e| failed_case(spec, mode, e))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    let cases = pool.install(|| specs.par_iter().map(run).collect());
    VerificationReport::new(Some(params.clone()), cases)
}

fn failed_case(spec: &FamilySpec, mode: CompareMode, err: FamilyError) -> CaseResult {
    CaseResult {
        spec: *spec,
        computed: GradedGroup::zero(),
        predicted: GradedGroup::zero(),
        verdict: Verdict::Fail,
        shift: None,
        euler: EulerCheck {
            computed: 0,
            expected_abs: 0,
        },
        torsion_free: true,
        module_condition: module_condition(spec),
        generators: 0,
        millis: 0,
        mode,
        wall: Duration::ZERO,
        failure: Some(err.to_string()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Text,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "json" => Some(ReportFormat::Json),
            "csv" => Some(ReportFormat::Csv),
            "text" => Some(ReportFormat::Text),
            _ => None,
        }
    }
}

pub const CSV_HEADER: &str = "family,g,k,m,n,i,a,b,degree,rank";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Renders a report. Output is a pure function of the report.
pub fn emit_report(report: &VerificationReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Csv => {
            let mut s = format!("{CSV_HEADER}\n");
            for c in &report.cases {
                let r = SpecRecord::from(&c.spec);
                for (q, rank) in c.computed.ranks() {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{},{},{},{q},{rank}",
                        r.family,
                        r.g,
                        r.k,
                        opt(r.m),
                        opt(r.n),
                        opt(r.i),
                        opt(r.a),
                        opt(r.b)
                    );
                }
            }
            s
        }
        ReportFormat::Text => {
            let mut s = String::new();
            let width = report
                .cases
                .iter()
                .map(|c| c.spec.to_string().len())
                .max()
                .unwrap_or(4)
                .max(4);
            let _ = writeln!(
                s,
                "{:<width$}  {:>6}  {:>6}  {:>5}  verdict",
                "case", "gens", "rank", "chi"
            );
            for c in &report.cases {
                let verdict = match c.verdict {
                    Verdict::Pass => "PASS".to_string(),
                    Verdict::Fail => {
                        let mut v =
                            format!("FAIL ({})", c.failure.as_deref().unwrap_or("mismatch"));
                        if let Some(q) = c.first_mismatch() {
                            let _ = write!(v, ", first mismatch at degree {q}");
                        }
                        v
                    }
                };
                let _ = writeln!(
                    s,
                    "{:<width$}  {:>6}  {:>6}  {:>5}  {verdict}",
                    c.spec.to_string(),
                    c.generators,
                    c.computed.total_rank(),
                    c.euler.computed
                );
            }
            let _ = writeln!(s, "passed {} / failed {}", report.passed, report.failed);
            s
        }
    }
}

/// Cases whose computed homology is pinned in golden files.
pub fn golden_cases() -> Vec<FamilySpec> {
    let specs = [
        FamilySpec::identity(2, 1),
        FamilySpec::identity(4, 1),
        FamilySpec::nonsep(3, 1, 1, 0),
        FamilySpec::nonsep(4, 1, -1, 0),
        FamilySpec::nonsep(4, 2, 2, 0),
        FamilySpec::nonsep(4, 1, 2, 1),
        FamilySpec::nonsep(5, 1, 1, 0),
        FamilySpec::pair(3, 1, 1, 1, 0, 0),
        FamilySpec::pair(3, 1, 1, -1, 0, 0),
        FamilySpec::pair(3, 1, -1, -1, 0, 0),
        FamilySpec::pair(4, 1, 2, -1, 1, 0),
        FamilySpec::pair(4, 1, -2, -1, 0, 0),
        FamilySpec::sep(3, 1, 1),
        FamilySpec::sep(4, 1, -1),
    ];
    specs
        .into_iter()
        .map(|s| s.expect("pinned golden spec is valid"))
        .collect()
}

/// File name of the golden dump for `spec`.
pub fn golden_file_name(spec: &FamilySpec) -> String {
    let r = SpecRecord::from(spec);
    let mut name = format!("{}_g{}_k{}", r.family, r.g, r.k);
    for (key, v) in [("m", r.m), ("n", r.n)] {
        if let Some(v) = v {
            let _ = write!(name, "_{key}{v}");
        }
    }
    for (key, v) in [("i", r.i), ("a", r.a), ("b", r.b)] {
        if let Some(v) = v {
            let _ = write!(name, "_{key}{v}");
        }
    }
    name.push_str(".csv");
    name
}

/// Computes and writes every golden file into `dir`.
pub fn write_golden(dir: &Path) -> std::io::Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for spec in golden_cases() {
        let homology = build_e1(&spec)
            .and_then(|c| Ok(c.complex().homology()?))
            .map_err(|e| std::io::Error::other(format!("{spec}: {e}")))?;
        let name = golden_file_name(&spec);
        let path = dir.join(&name);
        std::fs::write(&path, homology.to_csv())
            .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
        written.push(name);
    }
    Ok(written)
}
