//! Closed-form answers: predicted homology per family, `X(g,d)` ranks,
//! Euler characteristics, lens-space gradings and numeric criteria.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::chain::GradedGroup;
use crate::family::{Family, FamilyError, FamilySpec, SpecRecord};

/// Predicted homology of one spin^c structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Prediction {
    #[serde(serialize_with = "serialize_spec")]
    pub spec: FamilySpec,
    #[serde(flatten)]
    pub group: GradedGroup,
    pub special: bool,
}

fn serialize_spec<S: serde::Serializer>(spec: &FamilySpec, s: S) -> Result<S::Ok, S::Error> {
    SpecRecord::from(spec).serialize(s)
}

/// Exact `C(n, r)`; zero when `r > n`.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::from(0u32);
    }
    let r = r.min(n - r);
    let mut acc = BigUint::from(1u32);
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// [`binomial`] narrowed to `u64`; panics past `u64::MAX`, which the
/// supported genus range never reaches.
pub fn binomial_u64(n: u64, r: u64) -> u64 {
    binomial(n, r).to_u64().expect("binomial fits in u64")
}

fn rank(n: u64, r: u64) -> usize {
    binomial(n, r).to_usize().expect("rank fits in usize")
}

/// Graded ranks of `X(g,d)`: `Λ^{2g-i} ⊗ U^j` sits at `g - i - 2j`.
pub fn ranks_x(g: u32, d: i64) -> GradedGroup {
    let mut out = GradedGroup::zero();
    let n = 2 * g as u64;
    for i in 0..=d.min(n as i64) {
        for j in 0..=(d - i) {
            out.add_rank(g as i64 - i - 2 * j, rank(n, (n as i64 - i) as u64));
        }
    }
    out
}

/// `Λ^r H^1(Σ_h)` concentrated in degree `q`.
fn exterior_power(h: u32, r: i64, q: i64) -> GradedGroup {
    if r < 0 || r > 2 * h as i64 {
        return GradedGroup::zero();
    }
    GradedGroup::concentrated(q, rank(2 * h as u64, r as u64))
}

fn epsilon(n: i64) -> i64 {
    if n > 0 {
        0
    } else {
        -1
    }
}

/// Predicted homology for `spec`.
pub fn predict(spec: &FamilySpec) -> Result<Prediction, FamilyError> {
    spec.validate()?;
    let g = spec.g;
    let d = spec.depth();
    let group = if d < 0 {
        GradedGroup::zero()
    } else {
        let lower = ranks_x(g - 1, d - 1);
        let circle = GradedGroup::from_ranks([(0, 1), (1, 1)]);
        let tensor = |h: &GradedGroup| lower.tensor(h).expect("torsion-free");
        let top = 2 * (g as i64 - 1) - d;
        match spec.family {
            Family::Identity => ranks_x(g, d),
            Family::NonSepTwist { n, i: 0 } => tensor(&circle)
                .shift(epsilon(n))
                .direct_sum(&exterior_power(g - 1, top, g as i64 - d)),
            Family::NonSepTwist { .. } => tensor(&circle),
            Family::TransversePair { m, n, a: 0, b: 0 } => {
                let sigma = match (m > 0, n > 0) {
                    (true, true) => 0,
                    (false, false) => -2,
                    _ => -1,
                };
                lower
                    .shift(sigma)
                    .direct_sum(&exterior_power(g - 1, top, g as i64 - 1 - d))
            }
            Family::TransversePair { .. } => lower,
            Family::SepTwist { n } => tensor(&GradedGroup::from_ranks([(0, 2), (1, 2)]))
                .shift(epsilon(n))
                .direct_sum(&exterior_power(g - 1, top, g as i64 - d)),
        }
    };
    Ok(Prediction {
        spec: *spec,
        group,
        special: spec.is_special(),
    })
}

/// `C(2g-2, g-1-|k|)`, the absolute Euler characteristic for the identity
/// and the distinguished non-separating structure.
pub fn sw_euler(g: u32, k: i64) -> Result<BigUint, FamilyError> {
    if k == 0 {
        return Err(FamilyError::Unsupported(
            "k = 0 (torsion spin^c structure)".into(),
        ));
    }
    let d = g as i64 - 1 - k.abs();
    if d < 0 {
        return Err(FamilyError::Invalid(format!(
            "|k| = {} exceeds g - 1 = {}",
            k.abs(),
            g as i64 - 1
        )));
    }
    Ok(binomial(2 * g as u64 - 2, d as u64))
}

/// `(2a - m)^2 / (4m) - 1/4`.
pub fn lens_grading(m: i64, a: i64) -> Ratio<i64> {
    let t = 2 * a - m;
    Ratio::new(t * t, 4 * m) - Ratio::new(1, 4)
}

/// Whether the `Z[U]`-module structure is determined by the E¹ page:
/// `(M + g - 2) - 2|k| < m + |k|`, with `M - m = 1` only for the separating
/// twist.
pub fn module_condition(spec: &FamilySpec) -> bool {
    let spread = match spec.family {
        Family::SepTwist { .. } => 1,
        _ => 0,
    };
    let k = spec.k.abs();
    spread + spec.g as i64 - 2 - 2 * k < k
}

/// Whether a fiber of genus `h` can occur: `h = g + n(g - 1)`, `n >= 0`.
pub fn fiber_genus_allowed(g: u32, h: u32) -> Result<bool, FamilyError> {
    if h <= 1 {
        return Err(FamilyError::Unsupported(format!(
            "fiber genus {h} (torus and sphere bundles)"
        )));
    }
    if g < 2 {
        return Err(FamilyError::Invalid(format!(
            "base genus {g} must be at least 2"
        )));
    }
    Ok(h >= g && (2 * h - 2).is_multiple_of(2 * g - 2))
}
