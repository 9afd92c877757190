//! Mapping-torus families and the E¹ complexes built from their knot-Floer
//! profiles.
//!
//! Every complex here is a quotient of `profile ⊗ Z[U]`: a profile generator
//! at filtration level `f` contributes `x ⊗ U^j` for `0 <= j <= f - |k| - 1`,
//! and only levels `f >= |k| + 1` survive. Differential or `U` images that
//! land outside that region are dropped.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{ChainComplex, ChainError, Generator, SparseMatrix};
use crate::exterior::{AlgebraError, BasisMonomial, Pairing, Sign, SurfaceBasis, MAX_GENUS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("invalid family spec: {0}")]
    Invalid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// Which mapping torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// `M(id) = Σ_g × S^1`.
    Identity,
    /// `M(t_γ^n)` in the torsion class `i ∈ Z/|n|`.
    NonSepTwist { n: i64, i: u64 },
    /// `M(t_γ^m t_δ^n)` in the torsion class `(a, b) ∈ Z/|m| × Z/|n|`.
    TransversePair { m: i64, n: i64, a: u64, b: u64 },
    /// `M(t_σ^n)`, `n = ±1`, for a genus-one separating curve.
    SepTwist { n: i64 },
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Identity => "identity",
            Family::NonSepTwist { .. } => "nonsep",
            Family::TransversePair { .. } => "pair",
            Family::SepTwist { .. } => "sep",
        }
    }
}

/// A family together with the genus and the Chern class index `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FamilySpec {
    pub g: u32,
    pub family: Family,
    pub k: i64,
}

impl FamilySpec {
    pub fn new(g: u32, k: i64, family: Family) -> Result<Self, FamilyError> {
        let spec = Self { g, family, k };
        spec.validate()?;
        Ok(spec)
    }

    pub fn identity(g: u32, k: i64) -> Result<Self, FamilyError> {
        Self::new(g, k, Family::Identity)
    }

    pub fn nonsep(g: u32, k: i64, n: i64, i: u64) -> Result<Self, FamilyError> {
        Self::new(g, k, Family::NonSepTwist { n, i })
    }

    pub fn pair(g: u32, k: i64, m: i64, n: i64, a: u64, b: u64) -> Result<Self, FamilyError> {
        Self::new(g, k, Family::TransversePair { m, n, a, b })
    }

    pub fn sep(g: u32, k: i64, n: i64) -> Result<Self, FamilyError> {
        Self::new(g, k, Family::SepTwist { n })
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        let bad = |msg: String| Err(FamilyError::Invalid(msg));
        if self.g < 2 || self.g > MAX_GENUS {
            return bad(format!("genus {} outside 2..={MAX_GENUS}", self.g));
        }
        if self.k == 0 {
            return Err(FamilyError::Unsupported(
                "k = 0 (torsion spin^c structure)".into(),
            ));
        }
        match self.family {
            Family::Identity => {}
            Family::NonSepTwist { n, i } => {
                if n == 0 {
                    return bad("twist exponent n must be nonzero".into());
                }
                if i >= n.unsigned_abs() {
                    return bad(format!("index i = {i} outside Z/{}", n.unsigned_abs()));
                }
            }
            Family::TransversePair { m, n, a, b } => {
                if m == 0 || n == 0 {
                    return bad("twist exponents m, n must be nonzero".into());
                }
                if a >= m.unsigned_abs() || b >= n.unsigned_abs() {
                    return bad(format!(
                        "indices (a, b) = ({a}, {b}) outside Z/{} x Z/{}",
                        m.unsigned_abs(),
                        n.unsigned_abs()
                    ));
                }
            }
            Family::SepTwist { n } => {
                if n != 1 && n != -1 {
                    return bad(format!(
                        "separating twist exponent must be +1 or -1, got {n}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// `d = g - 1 - |k|`.
    pub fn depth(&self) -> i64 {
        self.g as i64 - 1 - self.k.abs()
    }

    /// Whether this is the distinguished structure `s_k` of its family.
    pub fn is_special(&self) -> bool {
        match self.family {
            Family::Identity | Family::SepTwist { .. } => true,
            Family::NonSepTwist { i, .. } => i == 0,
            Family::TransversePair { a, b, .. } => a == 0 && b == 0,
        }
    }

    /// Same spec with `k` replaced by `-k`.
    pub fn conjugate(&self) -> Self {
        Self {
            k: -self.k,
            ..*self
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (g, k) = (self.g, self.k);
        match self.family {
            Family::Identity => write!(f, "identity g={g} k={k}"),
            Family::NonSepTwist { n, i } => write!(f, "nonsep g={g} k={k} n={n} i={i}"),
            Family::TransversePair { m, n, a, b } => {
                write!(f, "pair g={g} k={k} m={m} n={n} a={a} b={b}")
            }
            Family::SepTwist { n } => write!(f, "sep g={g} k={k} n={n}"),
        }
    }
}

/// Flat record used for JSON and CSV output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecRecord {
    pub family: String,
    pub g: u32,
    pub k: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<u64>,
}

impl From<&FamilySpec> for SpecRecord {
    fn from(spec: &FamilySpec) -> Self {
        let mut r = SpecRecord {
            family: spec.family.tag().to_string(),
            g: spec.g,
            k: spec.k,
            m: None,
            n: None,
            i: None,
            a: None,
            b: None,
        };
        match spec.family {
            Family::Identity => {}
            Family::NonSepTwist { n, i } => {
                r.n = Some(n);
                r.i = Some(i);
            }
            Family::TransversePair { m, n, a, b } => {
                r.m = Some(m);
                r.n = Some(n);
                r.a = Some(a);
                r.b = Some(b);
            }
            Family::SepTwist { n } => r.n = Some(n),
        }
        r
    }
}

impl TryFrom<&SpecRecord> for FamilySpec {
    type Error = FamilyError;

    fn try_from(r: &SpecRecord) -> Result<Self, FamilyError> {
        let need = |v: Option<i64>, name: &str| {
            v.ok_or_else(|| FamilyError::Invalid(format!("family {} needs --{name}", r.family)))
        };
        let family = match r.family.as_str() {
            "identity" => Family::Identity,
            "nonsep" => Family::NonSepTwist {
                n: need(r.n, "n")?,
                i: r.i.unwrap_or(0),
            },
            "pair" => Family::TransversePair {
                m: need(r.m, "m")?,
                n: need(r.n, "n")?,
                a: r.a.unwrap_or(0),
                b: r.b.unwrap_or(0),
            },
            "sep" => Family::SepTwist { n: need(r.n, "n")? },
            other => return Err(FamilyError::Invalid(format!("unknown family {other:?}"))),
        };
        FamilySpec::new(r.g, r.k, family)
    }
}

/// Variant of the differential on `Λ*H^1(Σ_g) ⊗ Z[U]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DVariant {
    /// `D_ζ` on everything.
    Full,
    /// `D_γ^+`: zero on the plus summand.
    Plus,
    /// `D_γ^-`: zero on the minus summand.
    Minus,
}

impl DVariant {
    pub fn for_sign(n: i64) -> Self {
        if n > 0 {
            DVariant::Plus
        } else {
            DVariant::Minus
        }
    }

    fn acts_on(self, m: BasisMonomial) -> bool {
        match self {
            DVariant::Full => true,
            DVariant::Plus => m.sign_split() == Sign::Minus,
            DVariant::Minus => m.sign_split() == Sign::Plus,
        }
    }
}

/// Whether a `d1` component keeps the `U` power or raises it by one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UStep {
    Same,
    Raise,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorGenerator {
    pub name: String,
    pub filtration: i64,
    pub degree: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct D1Term {
    pub target: usize,
    pub coefficient: i64,
    pub step: UStep,
}

/// A small factor tensored with `Λ*H^1(Σ_{g-1})`, with a `d1` rule on the
/// factor that acts as the identity on the exterior part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorProfile {
    pub label: &'static str,
    pub generators: Vec<FactorGenerator>,
    /// `d1[source]` lists the signed targets of factor generator `source`.
    pub d1: Vec<Vec<D1Term>>,
}

impl FactorProfile {
    fn new(label: &'static str, gens: &[(&str, i64, i64)]) -> Self {
        Self {
            label,
            generators: gens
                .iter()
                .map(|&(name, filtration, degree)| FactorGenerator {
                    name: name.to_string(),
                    filtration,
                    degree,
                })
                .collect(),
            d1: vec![Vec::new(); gens.len()],
        }
    }

    fn with_rule(mut self, source: usize, targets: &[(usize, i64, UStep)]) -> Self {
        self.d1[source] = targets
            .iter()
            .map(|&(target, coefficient, step)| D1Term {
                target,
                coefficient,
                step,
            })
            .collect();
        self
    }

    fn index(&self, name: &str) -> usize {
        self.generators
            .iter()
            .position(|g| g.name == name)
            .expect("known factor generator")
    }

    /// Every `d1` component lowers total degree by exactly one.
    pub fn degrees_consistent(&self) -> bool {
        self.d1.iter().enumerate().all(|(s, terms)| {
            terms.iter().all(|t| {
                let drop = match t.step {
                    UStep::Same => 0,
                    UStep::Raise => 2,
                };
                self.generators[t.target].degree - drop == self.generators[s].degree - 1
            })
        })
    }

    pub fn is_zero_differential(&self) -> bool {
        self.d1.iter().all(Vec::is_empty)
    }

    /// `H^*(Σ_{1/2})`: `e, c, S` at filtration `-1, 0, 1`.
    fn half_genus() -> Self {
        Self::new("sigma_1/2", &[("e", -1, -1), ("c", 0, 0), ("S", 1, 1)])
    }

    /// `H^*(Σ_{3/2})`: `e`, `c1, c2, c3`, `S`.
    fn three_halves_genus() -> Self {
        Self::new(
            "sigma_3/2",
            &[
                ("e", -1, -1),
                ("c1", 0, 0),
                ("c2", 0, 0),
                ("c3", 0, 0),
                ("S", 1, 1),
            ],
        )
    }

    /// `H^*(S^1)` at filtration 0, degrees `base` and `base + 1`.
    fn circle(base: i64) -> Self {
        Self::new("circle", &[("s0", 0, base), ("s1", 0, base + 1)])
    }

    /// A single `Z` at filtration 0.
    fn point() -> Self {
        Self::new("point", &[("x", 0, 0)])
    }
}

/// One direct summand of a knot-Floer profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProfileSummand {
    /// All of `Λ*H^1(Σ_g)`, filtration `deg ω - g`, with `D_γ` restricted as
    /// given (or zero).
    Exterior { differential: Option<DVariant> },
    /// `factor ⊗ Λ*H^1(Σ_{g-1})`.
    Factored(FactorProfile),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HFKProfile {
    pub genus: u32,
    pub summands: Vec<ProfileSummand>,
}

impl HFKProfile {
    /// Highest filtration level carrying a generator.
    pub fn top_filtration(&self) -> i64 {
        let g = self.genus as i64;
        self.summands
            .iter()
            .map(|s| match s {
                ProfileSummand::Exterior { .. } => g,
                ProfileSummand::Factored(f) => {
                    f.generators
                        .iter()
                        .map(|x| x.filtration)
                        .max()
                        .unwrap_or(i64::MIN)
                        + g
                        - 1
                }
            })
            .max()
            .unwrap_or(i64::MIN)
    }

    pub fn factor_generator_count(&self) -> usize {
        self.summands
            .iter()
            .map(|s| match s {
                ProfileSummand::Exterior { .. } => 0,
                ProfileSummand::Factored(f) => f.generators.len(),
            })
            .sum()
    }
}

/// The knot-Floer profile (generators, filtrations, `d1`) of a family.
pub fn family_profile(spec: &FamilySpec) -> Result<HFKProfile, FamilyError> {
    spec.validate()?;
    use UStep::{Raise, Same};
    let summands = match spec.family {
        Family::Identity => vec![ProfileSummand::Exterior { differential: None }],
        Family::NonSepTwist { n, i: 0 } => {
            vec![ProfileSummand::Exterior {
                differential: Some(DVariant::for_sign(n)),
            }]
        }
        Family::NonSepTwist { .. } => vec![ProfileSummand::Factored(FactorProfile::circle(0))],
        Family::TransversePair { m, n, a: 0, b: 0 } => {
            let profile = if m > 0 && n > 0 {
                let p = FactorProfile::half_genus();
                let (e, c, s) = (p.index("e"), p.index("c"), p.index("S"));
                p.with_rule(c, &[(e, 1, Same), (s, 1, Raise)])
            } else if m < 0 && n < 0 {
                let p = FactorProfile::half_genus();
                let (e, c, s) = (p.index("e"), p.index("c"), p.index("S"));
                p.with_rule(e, &[(c, 1, Raise)])
                    .with_rule(s, &[(c, 1, Same)])
            } else {
                let p = FactorProfile::three_halves_genus();
                let (e, c1, c2, c3, s) = (
                    p.index("e"),
                    p.index("c1"),
                    p.index("c2"),
                    p.index("c3"),
                    p.index("S"),
                );
                p.with_rule(e, &[(c1, 1, Raise)])
                    .with_rule(c2, &[(e, 1, Same), (s, -1, Raise)])
                    .with_rule(c3, &[(e, 1, Same), (s, -1, Raise)])
                    .with_rule(s, &[(c1, 1, Same)])
            };
            vec![ProfileSummand::Factored(profile)]
        }
        Family::TransversePair { .. } => vec![ProfileSummand::Factored(FactorProfile::point())],
        Family::SepTwist { n } => {
            // the circle summand is mirrored along with the twist
            let base = if n > 0 { 0 } else { -1 };
            vec![
                ProfileSummand::Exterior {
                    differential: Some(DVariant::for_sign(n)),
                },
                ProfileSummand::Factored(FactorProfile::circle(base)),
            ]
        }
    };
    Ok(HFKProfile {
        genus: spec.g,
        summands,
    })
}

/// Where an E¹ generator came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Provenance {
    pub summand: usize,
    /// Factor generator, or `None` for an exterior summand.
    pub factor: Option<usize>,
    pub monomial: BasisMonomial,
    pub u_power: u32,
    pub filtration: i64,
}

type CellKey = (usize, Option<usize>, BasisMonomial, u32);

/// A truncated E¹ complex together with the provenance of each generator.
#[derive(Clone, Debug)]
pub struct E1Complex {
    genus: u32,
    k_abs: i64,
    complex: ChainComplex,
    provenance: Vec<Provenance>,
    index: HashMap<CellKey, usize>,
}

impl E1Complex {
    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn into_complex(self) -> ChainComplex {
        self.complex
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn len(&self) -> usize {
        self.provenance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.provenance.is_empty()
    }

    /// Index of the generator with the given provenance key, if it survived
    /// truncation.
    pub fn find(
        &self,
        summand: usize,
        factor: Option<usize>,
        monomial: BasisMonomial,
        u_power: u32,
    ) -> Option<usize> {
        self.index
            .get(&(summand, factor, monomial, u_power))
            .copied()
    }

    pub fn find_by_name(&self, name: &str) -> Option<usize> {
        self.complex
            .generators()
            .iter()
            .position(|g| g.name == name)
    }

    fn with_boundary(mut self, boundary: SparseMatrix) -> Result<Self, FamilyError> {
        self.complex = ChainComplex::new(self.complex.generators().to_vec(), boundary)?;
        Ok(self)
    }

    /// CSV of `name,degree,filtration,u_power`.
    pub fn generators_csv(&self) -> String {
        let mut out = String::from("name,degree,filtration,u_power\n");
        for (g, p) in self.complex.generators().iter().zip(&self.provenance) {
            out.push_str(&format!(
                "{},{},{},{}\n",
                g.name, g.degree, p.filtration, p.u_power
            ));
        }
        out
    }

    /// CSV of the nonzero boundary entries `row,col,entry`.
    pub fn boundary_csv(&self) -> String {
        let mut out = String::from("row,col,entry\n");
        for (r, c, v) in self.complex.boundary().triples() {
            out.push_str(&format!("{r},{c},{v}\n"));
        }
        out
    }
}

struct Builder {
    genus: u32,
    k_abs: i64,
    generators: Vec<Generator>,
    provenance: Vec<Provenance>,
    factor_names: Vec<Vec<String>>,
    index: HashMap<CellKey, usize>,
}

impl Builder {
    fn new(genus: u32, k_abs: i64) -> Self {
        Self {
            genus,
            k_abs,
            generators: Vec::new(),
            provenance: Vec::new(),
            factor_names: Vec::new(),
            index: HashMap::new(),
        }
    }

    /// Adds the `U` tower over one profile cell.
    fn tower(
        &mut self,
        summand: usize,
        factor: Option<usize>,
        monomial: BasisMonomial,
        filtration: i64,
        degree: i64,
    ) {
        if filtration < self.k_abs + 1 {
            return;
        }
        for j in 0..=(filtration - self.k_abs - 1) as u32 {
            let prefix = match factor {
                Some(x) => format!("{}.", self.factor_names[summand][x]),
                None => String::new(),
            };
            let name = format!("{prefix}{monomial}.U{j}");
            let id = self.generators.len();
            self.generators.push(Generator {
                degree: degree - 2 * j as i64,
                name,
            });
            self.provenance.push(Provenance {
                summand,
                factor,
                monomial,
                u_power: j,
                filtration,
            });
            self.index.insert((summand, factor, monomial, j), id);
        }
    }

    fn exterior_summand(&mut self, summand: usize) -> Result<(), FamilyError> {
        self.factor_names.push(Vec::new());
        let basis = SurfaceBasis::new(self.genus)?;
        let g = self.genus as i64;
        // column i holds Λ^{2g-i}; iterate columns left to right
        for p in (0..=basis.rank()).rev() {
            for m in basis.monomials_of_degree(p) {
                let f = p as i64 - g;
                self.tower(summand, None, m, f, f);
            }
        }
        Ok(())
    }

    fn factored_summand(
        &mut self,
        summand: usize,
        profile: &FactorProfile,
    ) -> Result<(), FamilyError> {
        self.factor_names
            .push(profile.generators.iter().map(|x| x.name.clone()).collect());
        for m in ambient_monomials(self.genus)? {
            let w = m.degree() as i64 - (self.genus as i64 - 1);
            for (x, gen) in profile.generators.iter().enumerate() {
                self.tower(summand, Some(x), m, gen.filtration + w, gen.degree + w);
            }
        }
        Ok(())
    }

    fn finish(self) -> E1Complex {
        let complex = ChainComplex::zero_differential(self.generators);
        E1Complex {
            genus: self.genus,
            k_abs: self.k_abs,
            complex,
            provenance: self.provenance,
            index: self.index,
        }
    }
}

/// Monomials of `Λ*H^1(Σ_{g-1})`, written on the generators `e3..e_{2g}`.
fn ambient_monomials(genus: u32) -> Result<Vec<BasisMonomial>, FamilyError> {
    let basis = SurfaceBasis::new(genus)?;
    let mut out: Vec<BasisMonomial> = basis
        .monomials()
        .into_iter()
        .filter(|m| m.0 & 0b11 == 0)
        .collect();
    out.sort_by_key(|m| (std::cmp::Reverse(m.degree()), m.0));
    Ok(out)
}

/// `X(g,d) = ⊕_{i=0}^{d} Λ^{2g-i} H^1(Σ_g) ⊗ Z[U]/U^{d+1-i}` with zero
/// differential and `deg(ω ⊗ U^j) = deg ω - g - 2j`. Empty for `d < 0`.
pub fn build_x(g: u32, d: i64) -> Result<E1Complex, FamilyError> {
    SurfaceBasis::new(g)?;
    // f >= |k|+1 with |k| = g-1-d is exactly i <= d
    let k_abs = g as i64 - 1 - d;
    let mut b = Builder::new(g, k_abs);
    if d >= 0 {
        b.exterior_summand(0)?;
    } else {
        b.factor_names.push(Vec::new());
    }
    Ok(b.finish())
}

/// `D_ζ(ω ⊗ U^j) = ι_ζ ω ⊗ U^j + PD(ζ) ∧ ω ⊗ U^{j+1}` on the exterior
/// summands of `c`, restricted per `variant`, truncated to the generator set.
fn exterior_boundary(
    c: &E1Complex,
    zeta: &Pairing,
    variant: DVariant,
    summands: &[usize],
) -> Result<SparseMatrix, FamilyError> {
    let basis = SurfaceBasis::new(c.genus)?;
    let pd = zeta.poincare_dual(basis)?;
    let mut boundary = SparseMatrix::zeros(c.len(), c.len());
    for (src, p) in c.provenance.iter().enumerate() {
        if p.factor.is_some() || !summands.contains(&p.summand) || !variant.acts_on(p.monomial) {
            continue;
        }
        for (coeff, m) in zeta.contract_monomial(p.monomial) {
            if let Some(t) = c.find(p.summand, None, m, p.u_power) {
                boundary.add(t, src, coeff);
            }
        }
        for (m_pd, c_pd) in pd.terms() {
            if let Some((sign, m)) = m_pd.wedge(p.monomial) {
                if let Some(t) = c.find(p.summand, None, m, p.u_power + 1) {
                    boundary.add(t, src, sign * c_pd);
                }
            }
        }
    }
    Ok(boundary)
}

/// Applies `D_ζ` (or `D_γ^±`) to a complex built by [`build_x`].
pub fn d_gamma(
    c: &E1Complex,
    zeta: &Pairing,
    variant: DVariant,
) -> Result<ChainComplex, FamilyError> {
    let basis = SurfaceBasis::new(c.genus)?;
    if variant != DVariant::Full && *zeta != basis.gamma() {
        return Err(FamilyError::Unsupported(
            "the ± restriction is defined only for γ, the class dual to c".into(),
        ));
    }
    if c.provenance.iter().any(|p| p.factor.is_some()) {
        return Err(FamilyError::Unsupported(
            "d_gamma needs a complex built by build_x".into(),
        ));
    }
    let boundary = exterior_boundary(c, zeta, variant, &[0])?;
    Ok(ChainComplex::new(
        c.complex.generators().to_vec(),
        boundary,
    )?)
}

/// The truncated E¹ complex of a family, with its `d1` differential.
pub fn build_e1(spec: &FamilySpec) -> Result<E1Complex, FamilyError> {
    let profile = family_profile(spec)?;
    let mut b = Builder::new(spec.g, spec.k.abs());
    for (s, summand) in profile.summands.iter().enumerate() {
        match summand {
            ProfileSummand::Exterior { .. } => b.exterior_summand(s)?,
            ProfileSummand::Factored(f) => b.factored_summand(s, f)?,
        }
    }
    let c = b.finish();
    let mut boundary = SparseMatrix::zeros(c.len(), c.len());
    let gamma = SurfaceBasis::new(spec.g)?.gamma();
    for (s, summand) in profile.summands.iter().enumerate() {
        match summand {
            ProfileSummand::Exterior { differential: None } => {}
            ProfileSummand::Exterior {
                differential: Some(v),
            } => {
                boundary = boundary.plus(&exterior_boundary(&c, &gamma, *v, &[s])?);
            }
            ProfileSummand::Factored(f) => {
                for (src, p) in c.provenance.iter().enumerate() {
                    let Some(x) = p.factor.filter(|_| p.summand == s) else {
                        continue;
                    };
                    for t in &f.d1[x] {
                        let u = match t.step {
                            UStep::Same => p.u_power,
                            UStep::Raise => p.u_power + 1,
                        };
                        if let Some(row) = c.find(s, Some(t.target), p.monomial, u) {
                            boundary.add(row, src, t.coefficient);
                        }
                    }
                }
            }
        }
    }
    c.with_boundary(boundary)
}

/// `U : x ⊗ U^j ↦ x ⊗ U^{j+1}`, truncated; a degree −2 endomorphism.
pub fn u_action(c: &E1Complex) -> SparseMatrix {
    let mut u = SparseMatrix::zeros(c.len(), c.len());
    for (src, p) in c.provenance.iter().enumerate() {
        if let Some(t) = c.find(p.summand, p.factor, p.monomial, p.u_power + 1) {
            u.add(t, src, 1);
        }
    }
    u
}

/// Number of generators of `X(g,d)`: `Σ_{i=0}^{d} C(2g,i)(d+1-i)`.
pub fn x_generator_count(g: u32, d: i64) -> u64 {
    if d < 0 {
        return 0;
    }
    let n = 2 * g as u64;
    (0..=d.min(n as i64) as u64)
        .map(|i| crate::closed_forms::binomial_u64(n, i) * (d as u64 + 1 - i))
        .sum()
}

impl E1Complex {
    /// `|k|` used for truncation.
    pub fn k_abs(&self) -> i64 {
        self.k_abs
    }
}
