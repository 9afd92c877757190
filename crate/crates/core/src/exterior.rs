//! Exterior algebra of `H^1` of a closed surface over the integers.
//!
//! Generators `e1, ..., e_{2g}` are stored as bits `0..2g` of a mask. The
//! first two play the roles of the split-off torus: `e1 = c` (paired to 1 by
//! the curve `γ`) and `e2 = c*` (the Poincaré dual of `γ`). Monomials are
//! always in ascending index order and every sign is derived from that order.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Largest supported genus; masks are `u32`.
pub const MAX_GENUS: u32 = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("genus {0} is outside the supported range 1..={MAX_GENUS}")]
    InvalidGenus(u32),
    #[error("elements live over different bases (genus {0} vs {1})")]
    BasisMismatch(u32, u32),
    #[error("pairing vector has {got} entries, expected {expected}")]
    PairingLength { expected: usize, got: usize },
    #[error("monomial {mask:#b} uses generators beyond e{max}")]
    OutOfRange { mask: u32, max: u32 },
}

/// Basis `e1..e_{2g}` of `H^1(Σ_g; Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SurfaceBasis {
    genus: u32,
}

impl SurfaceBasis {
    pub fn new(genus: u32) -> Result<Self, AlgebraError> {
        if genus == 0 || genus > MAX_GENUS {
            return Err(AlgebraError::InvalidGenus(genus));
        }
        Ok(Self { genus })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn rank(&self) -> u32 {
        2 * self.genus
    }

    /// Mask with every generator present (the top exterior power).
    pub fn full_mask(&self) -> u32 {
        if self.rank() == 32 {
            u32::MAX
        } else {
            (1u32 << self.rank()) - 1
        }
    }

    /// All `2^{2g}` monomials, ordered by degree then by mask.
    pub fn monomials(&self) -> Vec<BasisMonomial> {
        let mut all: Vec<BasisMonomial> = (0..=self.full_mask()).map(BasisMonomial).collect();
        all.sort_by_key(|m| (m.degree(), m.0));
        all
    }

    /// Monomials of exterior degree `p`, ascending by mask.
    pub fn monomials_of_degree(&self, p: u32) -> Vec<BasisMonomial> {
        (0..=self.full_mask())
            .map(BasisMonomial)
            .filter(|m| m.degree() == p)
            .collect()
    }

    /// The generator `c = e1`.
    pub fn c(&self) -> AlgebraElement {
        AlgebraElement::monomial(*self, BasisMonomial::generator(1), 1)
    }

    /// The generator `c* = e2`, which also represents `PD(γ)`.
    pub fn c_star(&self) -> AlgebraElement {
        AlgebraElement::monomial(*self, BasisMonomial::generator(2), 1)
    }

    /// The pairing of `γ`: 1 on `c`, 0 elsewhere.
    pub fn gamma(&self) -> Pairing {
        let mut values = vec![0; self.rank() as usize];
        values[0] = 1;
        Pairing { values }
    }

    fn check(&self, m: BasisMonomial) -> Result<(), AlgebraError> {
        if m.0 & !self.full_mask() != 0 {
            return Err(AlgebraError::OutOfRange {
                mask: m.0,
                max: self.rank(),
            });
        }
        Ok(())
    }
}

/// A wedge of distinct generators in ascending order, as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisMonomial(pub u32);

/// Which summand of `Λ*_+ ⊕ Λ*_-` a monomial belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl BasisMonomial {
    pub const ONE: BasisMonomial = BasisMonomial(0);

    /// The generator `e_index` (1-based).
    pub fn generator(index: u32) -> Self {
        BasisMonomial(1 << (index - 1))
    }

    /// Builds a monomial from 1-based generator indices in any order,
    /// returning the sign needed to sort them, or `None` on a repeat.
    pub fn from_indices(indices: &[u32]) -> Option<(i64, BasisMonomial)> {
        let mut sign = 1;
        let mut acc = BasisMonomial::ONE;
        for &i in indices {
            let (s, m) = acc.wedge(BasisMonomial::generator(i))?;
            sign *= s;
            acc = m;
        }
        Some((sign, acc))
    }

    pub fn degree(&self) -> u32 {
        self.0.count_ones()
    }

    /// Ascending 1-based generator indices.
    pub fn indices(&self) -> impl Iterator<Item = u32> + '_ {
        (0..32)
            .filter(move |b| self.0 & (1 << b) != 0)
            .map(|b| b + 1)
    }

    pub fn contains(&self, index: u32) -> bool {
        self.0 & (1 << (index - 1)) != 0
    }

    /// `self ∧ other` on monomials: `None` if they share a generator,
    /// otherwise the sign `(-1)^{#inversions}` and the merged mask.
    pub fn wedge(self, other: BasisMonomial) -> Option<(i64, BasisMonomial)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut inversions = 0;
        let mut rest = other.0;
        while rest != 0 {
            let bit = rest.trailing_zeros();
            // generators of `self` sitting above `bit` must pass over it
            inversions += (self.0 >> bit).count_ones();
            rest &= rest - 1;
        }
        let sign = if inversions % 2 == 0 { 1 } else { -1 };
        Some((sign, BasisMonomial(self.0 | other.0)))
    }

    /// Classification under `Σ_g = Σ_1 # Σ_{g-1}`: plus when `c` and `c*`
    /// are both present or both absent.
    pub fn sign_split(&self) -> Sign {
        if (self.0 & 1 != 0) == (self.0 & 2 != 0) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for BasisMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for i in self.indices() {
            if !first {
                write!(f, "^")?;
            }
            write!(f, "e{i}")?;
            first = false;
        }
        Ok(())
    }
}

/// Integer pairing of a homology class with each basis generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pairing {
    pub values: Vec<i64>,
}

impl Pairing {
    pub fn new(values: Vec<i64>) -> Self {
        Self { values }
    }

    /// The cohomology class Poincaré dual to this homology class, taking
    /// `(e_{2t-1}, e_{2t})` as symplectic pairs. For `γ` this is `c* = e2`.
    pub fn poincare_dual(&self, basis: SurfaceBasis) -> Result<AlgebraElement, AlgebraError> {
        self.check(basis)?;
        let mut out = AlgebraElement::zero(basis);
        for t in 0..basis.genus() as usize {
            let (a, b) = (2 * t, 2 * t + 1);
            out.add_term(BasisMonomial(1 << b), self.values[a]);
            out.add_term(BasisMonomial(1 << a), -self.values[b]);
        }
        Ok(out)
    }

    fn check(&self, basis: SurfaceBasis) -> Result<(), AlgebraError> {
        if self.values.len() != basis.rank() as usize {
            return Err(AlgebraError::PairingLength {
                expected: basis.rank() as usize,
                got: self.values.len(),
            });
        }
        Ok(())
    }

    /// Interior product on one monomial.
    pub fn contract_monomial(&self, m: BasisMonomial) -> Vec<(i64, BasisMonomial)> {
        let mut out = Vec::new();
        for (slot, index) in m.indices().enumerate() {
            let pairing = self.values.get(index as usize - 1).copied().unwrap_or(0);
            if pairing == 0 {
                continue;
            }
            let sign = if slot % 2 == 0 { 1 } else { -1 };
            out.push((sign * pairing, BasisMonomial(m.0 & !(1 << (index - 1)))));
        }
        out
    }
}

/// Integer linear combination of monomials over a fixed basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement {
    basis: SurfaceBasis,
    terms: BTreeMap<BasisMonomial, i64>,
}

impl AlgebraElement {
    pub fn zero(basis: SurfaceBasis) -> Self {
        Self {
            basis,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(basis: SurfaceBasis) -> Self {
        Self::monomial(basis, BasisMonomial::ONE, 1)
    }

    pub fn monomial(basis: SurfaceBasis, m: BasisMonomial, coeff: i64) -> Self {
        let mut out = Self::zero(basis);
        out.add_term(m, coeff);
        out
    }

    /// Wedge of generators given by 1-based indices, e.g. `&[2, 1]` is `e2 ∧ e1`.
    pub fn from_generators(basis: SurfaceBasis, indices: &[u32]) -> Result<Self, AlgebraError> {
        let mut out = Self::one(basis);
        for &i in indices {
            let g = BasisMonomial::generator(i);
            basis.check(g)?;
            out = out.wedge(&Self::monomial(basis, g, 1))?;
        }
        Ok(out)
    }

    pub fn basis(&self) -> SurfaceBasis {
        self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (BasisMonomial, i64)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, *c))
    }

    pub fn coefficient(&self, m: BasisMonomial) -> i64 {
        self.terms.get(&m).copied().unwrap_or(0)
    }

    /// The common degree of all terms, if there is one. Zero has none.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(BasisMonomial::degree);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn add_term(&mut self, m: BasisMonomial, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let entry = self.terms.entry(m).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_basis(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut out = Self::zero(self.basis);
        for (m, c) in self.terms() {
            out.add_term(m, c * k);
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_basis(other)?;
        let mut out = Self::zero(self.basis);
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                if let Some((s, m)) = ma.wedge(mb) {
                    out.add_term(m, s * ca * cb);
                }
            }
        }
        Ok(out)
    }

    /// Interior product `ι_ζ`, a degree −1 antiderivation.
    pub fn contract(&self, zeta: &Pairing) -> Result<Self, AlgebraError> {
        zeta.check(self.basis)?;
        let mut out = Self::zero(self.basis);
        for (m, c) in self.terms() {
            for (s, rest) in zeta.contract_monomial(m) {
                out.add_term(rest, s * c);
            }
        }
        Ok(out)
    }

    fn same_basis(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.basis != other.basis {
            return Err(AlgebraError::BasisMismatch(
                self.basis.genus,
                other.basis.genus,
            ));
        }
        Ok(())
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms() {
            let sep = match (first, c < 0) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            write!(f, "{sep}")?;
            if c.abs() != 1 {
                write!(f, "{}*", c.abs())?;
            }
            write!(f, "{m}")?;
            first = false;
        }
        Ok(())
    }
}

/// `ι_ζ` on a single monomial as an element; convenience for builders.
pub fn contract(zeta: &Pairing, a: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
    a.contract(zeta)
}

pub fn wedge(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
    a.wedge(b)
}

pub fn sign_split(m: BasisMonomial) -> Sign {
    m.sign_split()
}
