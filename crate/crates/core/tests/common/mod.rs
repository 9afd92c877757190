//! Reference implementations that share no code with the library: exact
//! rational rank, a second Smith form, homology from both, and a
//! list-based exterior algebra.
#![allow(dead_code)]

use std::collections::BTreeMap;

use mtorus::ChainComplex;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Rank over Q by fraction-free (Bareiss) elimination in big integers.
pub fn rational_rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let n_rows = a.len();
    let n_cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..n_cols {
        let Some(p) = (rank..n_rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..n_rows {
            for c in col + 1..n_cols {
                let v = &a[rank][col] * &a[r][c] - &a[r][col] * &a[rank][c];
                a[r][c] = v / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
        if rank == n_rows {
            break;
        }
    }
    rank
}

/// Invariant factors by pivot-wise extended-gcd elimination in big
/// integers (rows and columns cleared by 2x2 unimodular steps until the
/// pivot row and column vanish), then gcd/lcm normalization of the
/// diagonal.
pub fn invariant_factors(rows: &[Vec<i64>]) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let n_rows = a.len();
    let n_cols = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    for t in 0..n_rows.min(n_cols) {
        let Some((pr, pc)) = (t..n_rows)
            .flat_map(|r| (t..n_cols).map(move |c| (r, c)))
            .find(|&(r, c)| !a[r][c].is_zero())
        else {
            break;
        };
        a.swap(t, pr);
        for row in a.iter_mut() {
            row.swap(t, pc);
        }
        loop {
            for r in t + 1..n_rows {
                if a[r][t].is_zero() {
                    continue;
                }
                let (x, y, p, q) = bezout(&a[t][t], &a[r][t]);
                let (upper, lower) = a.split_at_mut(r);
                let (top_row, bottom_row) = (&mut upper[t], &mut lower[0]);
                for (top, bottom) in top_row.iter_mut().zip(bottom_row.iter_mut()).skip(t) {
                    let new_top = &x * &*top + &y * &*bottom;
                    let new_bottom = &p * &*bottom - &q * &*top;
                    *top = new_top;
                    *bottom = new_bottom;
                }
            }
            for c in t + 1..n_cols {
                if a[t][c].is_zero() {
                    continue;
                }
                let (x, y, p, q) = bezout(&a[t][t], &a[t][c]);
                for row in a.iter_mut().skip(t) {
                    let left = &x * &row[t] + &y * &row[c];
                    let right = &p * &row[c] - &q * &row[t];
                    row[t] = left;
                    row[c] = right;
                }
            }
            if (t + 1..n_rows).all(|r| a[r][t].is_zero()) {
                break;
            }
        }
        diag.push(a[t][t].abs());
    }
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            let (g, l) = (diag[i].gcd(&diag[j]), diag[i].lcm(&diag[j]));
            diag[i] = g;
            diag[j] = l;
        }
    }
    diag
}

/// Unimodular `[[x, y], [-q, p]]` sending `(a, b)` to `(gcd, 0)`; plain
/// subtraction when `a` already divides `b`.
fn bezout(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt, BigInt) {
    if b.is_multiple_of(a) {
        return (BigInt::one(), BigInt::zero(), BigInt::one(), b / a);
    }
    let e = a.extended_gcd(b);
    (e.x, e.y, a / &e.gcd, b / &e.gcd)
}

/// Ranks and torsion per degree, from a dense boundary built here.
pub fn homology(c: &ChainComplex) -> (BTreeMap<i64, usize>, BTreeMap<i64, Vec<u64>>) {
    let gens = c.generators();
    let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, g) in gens.iter().enumerate() {
        by_degree.entry(g.degree).or_default().push(i);
    }
    let dense = |n: i64| -> Vec<Vec<i64>> {
        let empty = Vec::new();
        let src = by_degree.get(&n).unwrap_or(&empty);
        let tgt = by_degree.get(&(n - 1)).unwrap_or(&empty);
        tgt.iter()
            .map(|&t| src.iter().map(|&s| c.boundary().get(t, s)).collect())
            .collect()
    };
    let mut ranks = BTreeMap::new();
    let mut torsion = BTreeMap::new();
    for (&n, src) in &by_degree {
        let out_rank = rational_rank(&dense(n));
        let incoming = dense(n + 1);
        let in_rank = rational_rank(&incoming);
        let free = src.len() - out_rank - in_rank;
        if free > 0 {
            ranks.insert(n, free);
        }
        let t: Vec<u64> = invariant_factors(&incoming)
            .into_iter()
            .filter(|v| *v > BigInt::one())
            .map(|v| u64::try_from(v).unwrap())
            .collect();
        if !t.is_empty() {
            torsion.insert(n, t);
        }
    }
    (ranks, torsion)
}

/// Exterior algebra element as a map from sorted index lists to
/// coefficients.
pub type Form = BTreeMap<Vec<u32>, i64>;

/// Sorts `indices` by adjacent swaps, returning the sign, or `None` on a
/// repeated index.
pub fn sort_with_sign(mut indices: Vec<u32>) -> Option<(i64, Vec<u32>)> {
    let mut sign = 1;
    for i in 0..indices.len() {
        for j in 0..indices.len() - 1 - i {
            if indices[j] > indices[j + 1] {
                indices.swap(j, j + 1);
                sign = -sign;
            } else if indices[j] == indices[j + 1] {
                return None;
            }
        }
    }
    if indices.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((sign, indices))
}

pub fn wedge(a: &Form, b: &Form) -> Form {
    let mut out = Form::new();
    for (ia, ca) in a {
        for (ib, cb) in b {
            let joined: Vec<u32> = ia.iter().chain(ib).copied().collect();
            if let Some((s, key)) = sort_with_sign(joined) {
                *out.entry(key).or_default() += s * ca * cb;
            }
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

/// Contraction by recursion on the leading factor:
/// `ι(e_a ∧ w) = ζ(e_a) w − e_a ∧ ι(w)`.
pub fn contract(zeta: &[i64], a: &Form) -> Form {
    let mut out = Form::new();
    for (idx, coeff) in a {
        for (k, v) in contract_word(zeta, idx) {
            *out.entry(k).or_default() += coeff * v;
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

fn contract_word(zeta: &[i64], word: &[u32]) -> Form {
    let Some((&first, rest)) = word.split_first() else {
        return Form::new();
    };
    let mut out = Form::new();
    let z = zeta[first as usize - 1];
    if z != 0 {
        out.insert(rest.to_vec(), z);
    }
    let head: Form = [(vec![first], 1)].into_iter().collect();
    for (k, v) in wedge(&head, &contract_word(zeta, rest)) {
        *out.entry(k).or_default() -= v;
    }
    out.retain(|_, v| *v != 0);
    out
}

pub fn from_library(e: &mtorus::AlgebraElement) -> Form {
    e.terms().map(|(m, c)| (m.indices().collect(), c)).collect()
}
