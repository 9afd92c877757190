//! Integral chain complexes, their homology, and graded abelian groups.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::snf::{self, DenseMatrix, SnfError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("boundary is not a differential: {0}")]
    NotADifferential(Violation),
    #[error("tensor product of graded groups with torsion is unsupported")]
    TensorWithTorsion,
    #[error(transparent)]
    Snf(#[from] SnfError),
    #[error("boundary matrix is {rows}x{cols} but the complex has {gens} generators")]
    Shape {
        rows: usize,
        cols: usize,
        gens: usize,
    },
}

/// Sparse integer matrix stored by columns.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseMatrix {
    rows: usize,
    columns: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            columns: vec![Vec::new(); cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    /// Adds `value` at `(row, col)`, dropping the entry if it cancels.
    pub fn add(&mut self, row: usize, col: usize, value: i64) {
        assert!(row < self.rows, "row {row} out of range");
        if value == 0 {
            return;
        }
        let column = &mut self.columns[col];
        match column.binary_search_by_key(&row, |&(r, _)| r) {
            Ok(pos) => {
                column[pos].1 += value;
                if column[pos].1 == 0 {
                    column.remove(pos);
                }
            }
            Err(pos) => column.insert(pos, (row, value)),
        }
    }

    pub fn get(&self, row: usize, col: usize) -> i64 {
        let column = &self.columns[col];
        column
            .binary_search_by_key(&row, |&(r, _)| r)
            .map_or(0, |pos| column[pos].1)
    }

    pub fn column(&self, col: usize) -> &[(usize, i64)] {
        &self.columns[col]
    }

    /// Nonzero entries as `(row, col, value)`, column-major.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r, c, v)))
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols(), other.rows, "dimension mismatch");
        let mut out = SparseMatrix::zeros(self.rows, other.cols());
        for (c, col) in other.columns.iter().enumerate() {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for &(k, v) in col {
                for &(r, w) in &self.columns[k] {
                    *acc.entry(r).or_insert(0) += v * w;
                }
            }
            out.columns[c] = acc.into_iter().filter(|&(_, v)| v != 0).collect();
        }
        out
    }

    pub fn scaled(&self, k: i64) -> SparseMatrix {
        let mut out = self.clone();
        for col in &mut out.columns {
            for entry in col.iter_mut() {
                entry.1 *= k;
            }
            col.retain(|&(_, v)| v != 0);
        }
        out
    }

    pub fn plus(&self, other: &SparseMatrix) -> SparseMatrix {
        let mut out = self.clone();
        for (r, c, v) in other.triples() {
            out.add(r, c, v);
        }
        out
    }
}

/// A generator of a chain complex: a degree and a display name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub degree: i64,
    pub name: String,
}

/// Finitely generated free chain complex with a degree −1 boundary.
///
/// `boundary[target][source]` is the coefficient of `target` in `∂ source`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    generators: Vec<Generator>,
    boundary: SparseMatrix,
}

/// First place where a boundary fails to be a differential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `∂ source` has a component on `target` of the wrong degree.
    Degree { source: usize, target: usize },
    /// `∂∂ source` has a nonzero component on `target`.
    SquareNonzero {
        source: usize,
        target: usize,
        coefficient: i64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Degree { source, target } => {
                write!(
                    f,
                    "generator {source} maps to {target} with a degree change other than -1"
                )
            }
            Violation::SquareNonzero {
                source,
                target,
                coefficient,
            } => {
                write!(
                    f,
                    "d^2 of generator {source} has coefficient {coefficient} on {target}"
                )
            }
        }
    }
}

impl ChainComplex {
    pub fn new(generators: Vec<Generator>, boundary: SparseMatrix) -> Result<Self, ChainError> {
        let n = generators.len();
        if boundary.rows() != n || boundary.cols() != n {
            return Err(ChainError::Shape {
                rows: boundary.rows(),
                cols: boundary.cols(),
                gens: n,
            });
        }
        Ok(Self {
            generators,
            boundary,
        })
    }

    /// The complex with zero differential on the given generators.
    pub fn zero_differential(generators: Vec<Generator>) -> Self {
        let n = generators.len();
        Self {
            generators,
            boundary: SparseMatrix::zeros(n, n),
        }
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn boundary(&self) -> &SparseMatrix {
        &self.boundary
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Generator count per degree.
    pub fn chain_ranks(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for g in &self.generators {
            *out.entry(g.degree).or_insert(0) += 1;
        }
        out
    }

    /// Checks degree −1 homogeneity entry by entry, then `∂∂ = 0`.
    pub fn check_differential(&self) -> Result<(), Violation> {
        for (target, source, _) in self.boundary.triples() {
            if self.generators[target].degree != self.generators[source].degree - 1 {
                return Err(Violation::Degree { source, target });
            }
        }
        let square = self.boundary.mul(&self.boundary);
        if let Some((target, source, coefficient)) = square.triples().next() {
            return Err(Violation::SquareNonzero {
                source,
                target,
                coefficient,
            });
        }
        Ok(())
    }

    /// Indices of the generators in each degree, in generator order.
    fn by_degree(&self) -> BTreeMap<i64, Vec<usize>> {
        let mut out: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, g) in self.generators.iter().enumerate() {
            out.entry(g.degree).or_default().push(i);
        }
        out
    }

    /// Dense matrix of `∂_n : C_n → C_{n-1}`, rows and columns in generator order.
    pub fn boundary_block(&self, n: i64) -> DenseMatrix {
        let groups = self.by_degree();
        let empty = Vec::new();
        let sources = groups.get(&n).unwrap_or(&empty);
        let targets = groups.get(&(n - 1)).unwrap_or(&empty);
        let row_of: HashMap<usize, usize> =
            targets.iter().enumerate().map(|(r, &g)| (g, r)).collect();
        let mut m = DenseMatrix::zeros(targets.len(), sources.len());
        for (c, &s) in sources.iter().enumerate() {
            for &(t, v) in self.boundary.column(s) {
                if let Some(&r) = row_of.get(&t) {
                    m.set(r, c, v);
                }
            }
        }
        m
    }

    /// Integral homology via Smith normal form of each `∂_n`.
    pub fn homology(&self) -> Result<GradedGroup, ChainError> {
        self.check_differential()
            .map_err(ChainError::NotADifferential)?;
        let counts = self.chain_ranks();
        let mut factors: BTreeMap<i64, Vec<u64>> = BTreeMap::new();
        for &n in counts.keys() {
            if counts.contains_key(&(n - 1)) {
                factors.insert(n, snf::invariant_factors(&self.boundary_block(n))?);
            }
        }
        let rank_of = |n: i64| factors.get(&n).map_or(0, Vec::len);
        let mut out = GradedGroup::zero();
        for (&n, &count) in &counts {
            let kernel = count - rank_of(n);
            out.add_rank(n, kernel - rank_of(n + 1));
            if let Some(f) = factors.get(&(n + 1)) {
                for &t in f.iter().filter(|&&t| t > 1) {
                    out.add_torsion(n, t);
                }
            }
        }
        Ok(out)
    }
}

/// Finitely supported graded abelian group: free ranks and torsion
/// coefficients per degree. The empty group is the zero group.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradedGroup {
    ranks: BTreeMap<i64, usize>,
    torsion: BTreeMap<i64, Vec<u64>>,
}

impl GradedGroup {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Torsion-free group from `(degree, rank)` pairs; repeated degrees add.
    pub fn from_ranks<I: IntoIterator<Item = (i64, usize)>>(ranks: I) -> Self {
        let mut out = Self::zero();
        for (d, r) in ranks {
            out.add_rank(d, r);
        }
        out
    }

    /// `Z^rank` concentrated in one degree.
    pub fn concentrated(degree: i64, rank: usize) -> Self {
        Self::from_ranks([(degree, rank)])
    }

    pub fn add_rank(&mut self, degree: i64, rank: usize) {
        if rank > 0 {
            *self.ranks.entry(degree).or_insert(0) += rank;
        }
    }

    pub fn add_torsion(&mut self, degree: i64, coefficient: u64) {
        if coefficient > 1 {
            let entry = self.torsion.entry(degree).or_default();
            entry.push(coefficient);
            entry.sort_unstable();
        }
    }

    pub fn ranks(&self) -> &BTreeMap<i64, usize> {
        &self.ranks
    }

    pub fn torsion(&self) -> &BTreeMap<i64, Vec<u64>> {
        &self.torsion
    }

    pub fn rank_at(&self, degree: i64) -> usize {
        self.ranks.get(&degree).copied().unwrap_or(0)
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.is_empty() && self.torsion.is_empty()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// Smallest degree carrying anything, free or torsion.
    pub fn min_degree(&self) -> Option<i64> {
        let a = self.ranks.keys().next().copied();
        let b = self.torsion.keys().next().copied();
        match (a, b) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// Every degree that carries anything, ascending.
    pub fn support(&self) -> Vec<i64> {
        let mut out: Vec<i64> = self
            .ranks
            .keys()
            .chain(self.torsion.keys())
            .copied()
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `Σ (-1)^n rank_n`; torsion is ignored.
    pub fn euler_characteristic(&self) -> i64 {
        self.ranks
            .iter()
            .map(|(&n, &r)| {
                if n.rem_euclid(2) == 0 {
                    r as i64
                } else {
                    -(r as i64)
                }
            })
            .sum()
    }

    /// Grading shifted up by `n`.
    pub fn shift(&self, n: i64) -> Self {
        Self {
            ranks: self.ranks.iter().map(|(&d, &r)| (d + n, r)).collect(),
            torsion: self
                .torsion
                .iter()
                .map(|(&d, t)| (d + n, t.clone()))
                .collect(),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&d, &r) in &other.ranks {
            out.add_rank(d, r);
        }
        for (&d, ts) in &other.torsion {
            for &t in ts {
                out.add_torsion(d, t);
            }
        }
        out
    }

    /// Tensor product of torsion-free groups.
    pub fn tensor(&self, other: &Self) -> Result<Self, ChainError> {
        if !self.is_torsion_free() || !other.is_torsion_free() {
            return Err(ChainError::TensorWithTorsion);
        }
        let mut out = Self::zero();
        for (&p, &a) in &self.ranks {
            for (&q, &b) in &other.ranks {
                out.add_rank(p + q, a * b);
            }
        }
        Ok(out)
    }

    /// Degree-wise equality.
    pub fn iso_absolute(&self, other: &Self) -> bool {
        self == other
    }

    /// The shift `s` with `self.shift(s) == other`, if one exists.
    pub fn iso_relative(&self, other: &Self) -> Option<i64> {
        match (self.min_degree(), other.min_degree()) {
            (None, None) => Some(0),
            (Some(a), Some(b)) => (self.shift(b - a) == *other).then_some(b - a),
            _ => None,
        }
    }

    /// Comparison in the given mode, returning the witnessing shift.
    pub fn graded_iso(&self, other: &Self, mode: CompareMode) -> Option<i64> {
        match mode {
            CompareMode::Absolute => self.iso_absolute(other).then_some(0),
            CompareMode::Relative => self.iso_relative(other),
        }
    }

    /// `degree,rank` rows with a header line; the golden-file format.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("degree,rank\n");
        for (d, r) in &self.ranks {
            out.push_str(&format!("{d},{r}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Option<Self> {
        let mut out = Self::zero();
        for line in text.lines().skip(1).filter(|l| !l.trim().is_empty()) {
            let (d, r) = line.split_once(',')?;
            out.add_rank(d.trim().parse().ok()?, r.trim().parse().ok()?);
        }
        Some(out)
    }
}

impl fmt::Display for GradedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for d in self.support() {
            let mut s = String::new();
            let r = self.rank_at(d);
            if r > 0 {
                s.push_str(&format!("Z^{r}"));
            }
            for t in self.torsion.get(&d).into_iter().flatten() {
                if !s.is_empty() {
                    s.push('+');
                }
                s.push_str(&format!("Z/{t}"));
            }
            parts.push(format!("{s}({d})"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompareMode {
    Absolute,
    Relative,
}

/// Operations of [`gg_combine`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Combine {
    Shift(i64),
    DirectSum,
    Tensor,
}

/// Folds `args` with the given operation. `Shift` applies to the direct
/// sum of its arguments.
pub fn gg_combine(kind: Combine, args: &[GradedGroup]) -> Result<GradedGroup, ChainError> {
    let sum = || {
        args.iter()
            .fold(GradedGroup::zero(), |acc, g| acc.direct_sum(g))
    };
    match kind {
        Combine::Shift(n) => Ok(sum().shift(n)),
        Combine::DirectSum => Ok(sum()),
        Combine::Tensor => {
            let mut iter = args.iter();
            let Some(first) = iter.next() else {
                return Ok(GradedGroup::concentrated(0, 1));
            };
            iter.try_fold(first.clone(), |acc, g| acc.tensor(g))
        }
    }
}

pub fn euler_characteristic(group: &GradedGroup) -> i64 {
    group.euler_characteristic()
}
