//! Enumeration of covering-transformation-invariant subspaces.
//!
//! The covering action is semisimple, so an invariant subspace is the direct
//! sum of its intersections with the eigenspaces. Each intersection is
//! represented by its reduced row echelon basis in the eigenspace's own
//! coordinates, which makes the representative unique.
//!
//! Order: compositions `(r_1, ..., r_s)` of the rank with `r_1` descending
//! first, then the cartesian product of echelon forms with the first
//! eigenspace varying slowest. Echelon forms of one eigenspace are ordered by
//! pivot set (lexicographic), then by free entries (lexicographic).

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::branched_cover::EigenDecomposition;
use crate::error::{Error, Result};
use crate::ff_algebra::Fq;
use crate::linalg::combine;

/// Gaussian binomial `[n choose k]_q`.
pub fn gaussian_binomial(n: usize, k: usize, q: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    // Pascal rule [n, k] = [n-1, k-1] + q^k [n-1, k]
    let mut row = vec![BigUint::one()];
    for m in 1..=n {
        let mut next = vec![BigUint::one(); m + 1];
        for j in 1..m {
            next[j] = &row[j - 1] + BigUint::from(q).pow(j as u32) * &row[j];
        }
        row = next;
    }
    row[k].clone()
}

/// Number of invariant subspaces of the given rank:
/// `sum over compositions of prod_j [dims_j choose r_j]_q`.
pub fn subspace_count(dims: &[usize], rank: usize, q: u32) -> BigUint {
    compositions(dims, rank)
        .iter()
        .map(|comp| {
            dims.iter()
                .zip(comp)
                .map(|(&n, &r)| gaussian_binomial(n, r, q))
                .product::<BigUint>()
        })
        .sum()
}

/// All `(r_1, .., r_s)` with `sum r_i = rank` and `r_i <= dims_i`, with the
/// leading entry descending.
pub fn compositions(dims: &[usize], rank: usize) -> Vec<Vec<usize>> {
    fn go(dims: &[usize], rank: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        match dims.split_first() {
            None => {
                if rank == 0 {
                    out.push(prefix.clone());
                }
            }
            Some((&d, rest)) => {
                let capacity: usize = rest.iter().sum();
                for r in (0..=d.min(rank)).rev() {
                    if rank - r > capacity {
                        continue;
                    }
                    prefix.push(r);
                    go(rest, rank - r, prefix, out);
                    prefix.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    go(dims, rank, &mut Vec::new(), &mut out);
    out
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, r, &mut Vec::new(), &mut out);
    out
}

/// Lexicographic odometer over `[0, q)^len`, last digit fastest. Returns
/// false once it wraps around.
pub(crate) fn advance(digits: &mut [u32], q: u32) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < q {
            return true;
        }
        *d = 0;
    }
    false
}

/// Every `r x n` reduced row echelon matrix of rank `r` over `F_q`.
pub fn echelon_forms(field: Fq, n: usize, r: usize) -> Vec<Vec<Vec<u32>>> {
    let q = field.modulus();
    let mut out = Vec::new();
    for pivots in combinations(n, r) {
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(row, &pc)| {
                let pivots = &pivots;
                (pc + 1..n)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (row, c))
            })
            .collect();
        let mut entries = vec![0u32; free.len()];
        loop {
            let mut m = vec![vec![0u32; n]; r];
            for (row, &pc) in pivots.iter().enumerate() {
                m[row][pc] = 1;
            }
            for (&(row, c), &v) in free.iter().zip(&entries) {
                m[row][c] = v;
            }
            out.push(m);
            if !advance(&mut entries, q) {
                break;
            }
        }
    }
    out
}

/// Rows of `H cap B_j` in `B_j`'s coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EigenPart {
    pub eigen: usize,
    pub eigenvalue: u32,
    pub dim: usize,
    pub rows: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct EigenPartRecord {
    eigen: usize,
    eigenvalue: u32,
    dim: usize,
    rank: usize,
    rows: Vec<u32>,
}

impl Serialize for EigenPart {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EigenPartRecord {
            eigen: self.eigen,
            eigenvalue: self.eigenvalue,
            dim: self.dim,
            rank: self.rows.len(),
            rows: self.rows.concat(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EigenPart {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = EigenPartRecord::deserialize(d)?;
        if r.rows.len() != r.rank * r.dim {
            return Err(serde::de::Error::custom("echelon matrix has the wrong size"));
        }
        let rows = if r.dim == 0 {
            vec![Vec::new(); r.rank]
        } else {
            r.rows.chunks(r.dim).map(<[u32]>::to_vec).collect()
        };
        Ok(EigenPart {
            eigen: r.eigen,
            eigenvalue: r.eigenvalue,
            dim: r.dim,
            rows,
        })
    }
}

/// An invariant subspace, one echelon block per eigenspace in the
/// decomposition's (ascending eigenvalue) order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InvariantSubspace {
    pub per_eigen: Vec<EigenPart>,
}

impl InvariantSubspace {
    pub fn rank(&self) -> usize {
        self.per_eigen.iter().map(|p| p.rows.len()).sum()
    }

    /// Basis of the subspace in ambient coordinates.
    pub fn ambient_rows(&self, decomp: &EigenDecomposition, field: Fq, ambient_dim: usize) -> Vec<Vec<u32>> {
        self.per_eigen
            .iter()
            .zip(&decomp.spaces)
            .flat_map(|(part, space)| {
                part.rows
                    .iter()
                    .map(move |r| combine(field, ambient_dim, r, &space.basis))
            })
            .collect()
    }

    /// Checks shape against the decomposition and that each block is in
    /// reduced row echelon form with nonzero rows.
    pub fn is_canonical_for(&self, decomp: &EigenDecomposition, q: u32) -> bool {
        self.per_eigen.len() == decomp.spaces.len()
            && self.per_eigen.iter().zip(&decomp.spaces).all(|(part, space)| {
                part.eigen == space.index
                    && part.eigenvalue == space.eigenvalue
                    && part.dim == space.dim()
                    && is_rref(&part.rows, part.dim, q)
            })
    }
}

fn is_rref(rows: &[Vec<u32>], n: usize, q: u32) -> bool {
    let mut last_pivot: Option<usize> = None;
    let mut pivots = Vec::new();
    for row in rows {
        if row.len() != n || row.iter().any(|&x| x >= q) {
            return false;
        }
        let Some(pc) = row.iter().position(|&x| x != 0) else {
            return false;
        };
        if row[pc] != 1 || last_pivot.is_some_and(|lp| pc <= lp) {
            return false;
        }
        last_pivot = Some(pc);
        pivots.push(pc);
    }
    pivots
        .iter()
        .enumerate()
        .all(|(i, &pc)| rows.iter().enumerate().all(|(k, r)| k == i || r[pc] == 0))
}

struct CompositionRange {
    ranks: Vec<usize>,
    start: u64,
    radices: Vec<u64>,
}

/// Indexed, deterministic enumeration of all invariant subspaces of one rank.
pub struct SubspaceEnumerator {
    parts: Vec<(usize, u32, usize)>,
    forms: Vec<Vec<Vec<Vec<Vec<u32>>>>>,
    ranges: Vec<CompositionRange>,
    total: u64,
}

impl SubspaceEnumerator {
    pub fn new(decomp: &EigenDecomposition, rank: usize, field: Fq) -> Result<Self> {
        let dims = decomp.dims();
        let total_dim: usize = dims.iter().sum();
        if rank > total_dim {
            return Err(Error::RankOutOfRange {
                rank,
                dim: total_dim,
            });
        }
        let comps = compositions(&dims, rank);
        let mut forms: Vec<Vec<Vec<Vec<Vec<u32>>>>> = dims.iter().map(|&d| vec![Vec::new(); d + 1]).collect();
        for comp in &comps {
            for (i, &r) in comp.iter().enumerate() {
                if forms[i][r].is_empty() {
                    forms[i][r] = echelon_forms(field, dims[i], r);
                }
            }
        }
        let mut ranges = Vec::with_capacity(comps.len());
        let mut start = 0u64;
        for ranks in comps {
            let radices: Vec<u64> = ranks
                .iter()
                .enumerate()
                .map(|(i, &r)| forms[i][r].len() as u64)
                .collect();
            let size = radices.iter().try_fold(1u64, |acc, &x| acc.checked_mul(x));
            let size = size.ok_or(Error::BudgetExceeded {
                needed: u128::MAX,
                limit: u64::MAX,
            })?;
            ranges.push(CompositionRange {
                ranks,
                start,
                radices,
            });
            start = start.checked_add(size).ok_or(Error::BudgetExceeded {
                needed: u128::MAX,
                limit: u64::MAX,
            })?;
        }
        Ok(Self {
            parts: decomp
                .spaces
                .iter()
                .map(|s| (s.index, s.eigenvalue, s.dim()))
                .collect(),
            forms,
            ranges,
            total: start,
        })
    }

    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn get(&self, index: u64) -> InvariantSubspace {
        assert!(index < self.total, "subspace index out of range");
        let pos = self.ranges.partition_point(|r| r.start <= index) - 1;
        let range = &self.ranges[pos];
        let mut rem = index - range.start;
        let mut digits = vec![0u64; range.radices.len()];
        for (d, &radix) in digits.iter_mut().zip(&range.radices).rev() {
            *d = rem % radix;
            rem /= radix;
        }
        InvariantSubspace {
            per_eigen: self
                .parts
                .iter()
                .enumerate()
                .map(|(i, &(eigen, eigenvalue, dim))| EigenPart {
                    eigen,
                    eigenvalue,
                    dim,
                    rows: self.forms[i][range.ranks[i]][digits[i] as usize].clone(),
                })
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = InvariantSubspace> + '_ {
        (0..self.total).map(move |i| self.get(i))
    }
}

pub fn count_as_u64(n: &BigUint) -> Option<u64> {
    n.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u32) -> Fq {
        Fq::new(q).unwrap()
    }

    #[test]
    fn gaussian_binomials() {
        assert_eq!(gaussian_binomial(2, 1, 7), BigUint::from(8u32));
        assert_eq!(gaussian_binomial(4, 2, 7), BigUint::from(2850u32));
        assert_eq!(gaussian_binomial(4, 3, 7), BigUint::from(400u32));
        assert_eq!(gaussian_binomial(4, 0, 7), BigUint::one());
        assert_eq!(gaussian_binomial(3, 4, 7), BigUint::zero());
        // (7^4 - 1)(7^3 - 1) / ((7^2 - 1)(7 - 1))
        assert_eq!((2400u64 * 342) / (48 * 6), 2850);
    }

    #[test]
    fn counts() {
        assert_eq!(subspace_count(&[2, 2], 2, 7), BigUint::from(66u32));
        assert_eq!(subspace_count(&[4, 4], 6, 7), BigUint::from(165_700u32));
        assert_eq!(2 * 2850 + 400 * 400, 165_700);
        assert_eq!(subspace_count(&[3, 1, 2], 0, 11), BigUint::one());
        assert_eq!(compositions(&[2, 2], 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn echelon_form_order_and_count() {
        let forms = echelon_forms(f(7), 2, 1);
        assert_eq!(forms.len(), 8);
        assert_eq!(forms[0], vec![vec![1, 0]]);
        assert_eq!(forms[1], vec![vec![1, 1]]);
        assert_eq!(forms[7], vec![vec![0, 1]]);
        assert_eq!(echelon_forms(f(7), 3, 0), vec![Vec::<Vec<u32>>::new()]);
        assert_eq!(echelon_forms(f(7), 2, 2), vec![vec![vec![1, 0], vec![0, 1]]]);
        for form in echelon_forms(f(5), 4, 2) {
            assert!(is_rref(&form, 4, 5));
        }
    }

    #[test]
    fn echelon_forms_are_distinct_subspaces() {
        use std::collections::HashSet;
        let forms = echelon_forms(f(3), 4, 2);
        assert_eq!(forms.len() as u64, gaussian_binomial(4, 2, 3).to_u64().unwrap());
        let set: HashSet<_> = forms.iter().collect();
        assert_eq!(set.len(), forms.len());
    }

    #[test]
    fn rref_checker() {
        assert!(is_rref(&[vec![1, 0, 2], vec![0, 1, 3]], 3, 7));
        assert!(!is_rref(&[vec![1, 1, 2], vec![0, 1, 3]], 3, 7));
        assert!(!is_rref(&[vec![0, 1, 3], vec![1, 0, 2]], 3, 7));
        assert!(!is_rref(&[vec![2, 0, 0]], 3, 7));
        assert!(!is_rref(&[vec![0, 0, 0]], 3, 7));
    }
}
