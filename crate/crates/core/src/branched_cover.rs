//! `H_1` of the p-fold cyclic branched cover with `F_q` coefficients, carried
//! as an explicit vector space with the covering-transformation matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff_algebra::{is_odd_prime, Fq, PairedRoots};
use crate::knot_model::{IntLaurentPoly, KnotBundle, Orientation};
use crate::linalg::{dot, FqMatrix};

/// `x` for copies of the knot as given, `y` for mirrored copies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisLabel {
    pub copy: usize,
    pub tag: Tag,
    /// Eigen index `j` once the basis is an eigenbasis, `None` for the raw
    /// monomial basis of the quotient.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigen: Option<usize>,
}

/// A contiguous coordinate range coming from one prime summand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub copy: usize,
    pub tag: Tag,
    pub orientation: Orientation,
    pub offset: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverHomology {
    p: u32,
    field: Fq,
    t_action: FqMatrix,
    basis_labels: Vec<BasisLabel>,
    blocks: Vec<Block>,
}

impl CoverHomology {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn field(&self) -> Fq {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.t_action.rows()
    }

    pub fn t_action(&self) -> &FqMatrix {
        &self.t_action
    }

    pub fn basis_labels(&self) -> &[BasisLabel] {
        &self.basis_labels
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    fn checked(self) -> Result<Self> {
        if !self.t_action.pow(self.p as u64).is_identity() {
            return Err(Error::MismatchedCover(format!(
                "covering action does not satisfy t^{} = 1",
                self.p
            )));
        }
        Ok(self)
    }

    /// Re-expresses the homology in an eigenbasis `x_j` of the covering action,
    /// ordered by eigen index. Labels record `j`.
    pub fn diagonalize(&self, roots: &PairedRoots) -> Result<CoverHomology> {
        let decomp = eigen_decompose(self, roots)?;
        let mut spaces: Vec<&EigenSpace> = decomp.spaces.iter().collect();
        spaces.sort_by_key(|s| s.index);
        let mut columns = Vec::new();
        let mut diag = Vec::new();
        let mut labels = Vec::new();
        for s in spaces {
            for v in &s.basis {
                columns.push(v.clone());
                diag.push(s.eigenvalue);
                labels.push(BasisLabel {
                    copy: 1,
                    tag: Tag::X,
                    eigen: Some(s.index),
                });
            }
        }
        Ok(CoverHomology {
            p: self.p,
            field: self.field,
            t_action: FqMatrix::diagonal(self.field, &diag),
            basis_labels: labels,
            blocks: vec![Block {
                copy: 1,
                tag: Tag::X,
                orientation: Orientation::default(),
                offset: 0,
                dim: diag.len(),
            }],
        })
    }
}

/// `F_q[t] / (a(t), t^p - 1)` as an explicit quotient of `F_q^p`.
///
/// `F_q^p` has basis `1, t, ..., t^(p-1)` with `t` acting by cyclic shift; the
/// relations are the shifts `t^i a(t) mod (t^p - 1)`. The returned basis is the
/// set of non-pivot monomials of the reduced relation matrix.
pub fn branched_cover_homology(alexander: &IntLaurentPoly, p: u32, q: u32) -> Result<CoverHomology> {
    if !is_odd_prime(p as u64) {
        return Err(Error::InvalidBasePrime(p as u64));
    }
    let field = Fq::new(q)?;
    let coeffs = alexander.coeffs();
    if coeffs.is_empty() {
        return Err(Error::InvalidParameter("zero Alexander polynomial".into()));
    }
    if field.reduce(coeffs[0]) == 0 || field.reduce(*coeffs.last().unwrap()) == 0 {
        return Err(Error::BadReductionPrime { q });
    }
    let n = p as usize;
    // a(t) folded into F_q[t]/(t^p - 1); t is a unit there, so the Laurent offset is harmless.
    let mut folded = vec![0u32; n];
    for (i, &c) in coeffs.iter().enumerate() {
        let e = (alexander.offset() + i as i64).rem_euclid(n as i64) as usize;
        folded[e] = field.add(folded[e], field.reduce(c));
    }
    let relations: Vec<Vec<u32>> = (0..n)
        .map(|shift| (0..n).map(|k| folded[(k + n - shift) % n]).collect())
        .collect();
    let (reduced, pivots) = FqMatrix::from_rows(field, n, &relations).rref();
    let mut is_pivot = vec![false; n];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();

    // Express a vector of F_q^p in the quotient basis by clearing pivot coordinates.
    let project = |mut v: Vec<u32>| -> Vec<u32> {
        for (row, &pc) in pivots.iter().enumerate() {
            let factor = v[pc];
            if factor != 0 {
                for (k, x) in v.iter_mut().enumerate() {
                    *x = field.sub(*x, field.mul(factor, reduced.get(row, k)));
                }
            }
        }
        free.iter().map(|&c| v[c]).collect()
    };

    let d = free.len();
    let mut t_action = FqMatrix::zeros(field, d, d);
    for (col, &c) in free.iter().enumerate() {
        let mut shifted = vec![0u32; n];
        shifted[(c + 1) % n] = 1;
        for (row, x) in project(shifted).into_iter().enumerate() {
            t_action.set(row, col, x);
        }
    }
    CoverHomology {
        p,
        field,
        t_action,
        basis_labels: (0..d)
            .map(|_| BasisLabel {
                copy: 1,
                tag: Tag::X,
                eigen: None,
            })
            .collect(),
        blocks: vec![Block {
            copy: 1,
            tag: Tag::X,
            orientation: Orientation::default(),
            offset: 0,
            dim: d,
        }],
    }
    .checked()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenSpace {
    /// Eigen index `j` of the root `a_j`.
    pub index: usize,
    pub eigenvalue: u32,
    /// Basis vectors in ambient coordinates.
    pub basis: Vec<Vec<u32>>,
}

impl EigenSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Eigenspaces with nonzero dimension, in ascending eigenvalue order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenDecomposition {
    pub spaces: Vec<EigenSpace>,
}

impl EigenDecomposition {
    pub fn total_dim(&self) -> usize {
        self.spaces.iter().map(EigenSpace::dim).sum()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.spaces.iter().map(EigenSpace::dim).collect()
    }

    pub fn by_index(&self, j: usize) -> Option<(usize, &EigenSpace)> {
        self.spaces.iter().enumerate().find(|(_, s)| s.index == j)
    }
}

pub fn eigen_decompose(h: &CoverHomology, roots: &PairedRoots) -> Result<EigenDecomposition> {
    if roots.field() != h.field || roots.p() != h.p {
        return Err(Error::MismatchedCover("roots do not match the cover".into()));
    }
    let mut spaces: Vec<EigenSpace> = (1..h.p as usize)
        .filter_map(|j| {
            let a = roots.root(j)?;
            let basis = h.t_action.shift(a).null_space();
            (!basis.is_empty()).then_some(EigenSpace {
                index: j,
                eigenvalue: a,
                basis,
            })
        })
        .collect();
    let total: usize = spaces.iter().map(EigenSpace::dim).sum();
    if total != h.dim() {
        return Err(Error::NotSemisimple);
    }
    spaces.sort_by_key(|s| s.eigenvalue);
    Ok(EigenDecomposition { spaces })
}

/// Direct sum of covers. Reversed parts contribute the inverse action;
/// mirrored parts are tagged `y`. Copy indices count separately per tag.
pub fn assemble_sum(parts: &[(CoverHomology, Orientation)]) -> Result<CoverHomology> {
    let Some((first, _)) = parts.first() else {
        return Err(Error::EmptySum);
    };
    let (p, field) = (first.p, first.field);
    let mut matrices = Vec::new();
    let mut labels = Vec::new();
    let mut blocks = Vec::new();
    let mut next_copy = [1usize, 1usize];
    let mut offset = 0;
    for (h, outer) in parts {
        if h.p != p || h.field != field {
            return Err(Error::MismatchedCover(format!(
                "(p, q) = ({}, {}) vs ({}, {})",
                h.p,
                h.field.modulus(),
                p,
                field.modulus()
            )));
        }
        let action = if outer.reversed {
            h.t_action.inverse().ok_or_else(|| {
                Error::MismatchedCover("covering action is not invertible".into())
            })?
        } else {
            h.t_action.clone()
        };
        matrices.push(action);
        for b in &h.blocks {
            let orientation = outer.compose(b.orientation);
            let tag = if orientation.mirrored { Tag::Y } else { Tag::X };
            let slot = &mut next_copy[tag as usize];
            let copy = *slot;
            *slot += 1;
            for l in &h.basis_labels[b.offset..b.offset + b.dim] {
                labels.push(BasisLabel {
                    copy,
                    tag,
                    eigen: l.eigen,
                });
            }
            blocks.push(Block {
                copy,
                tag,
                orientation,
                offset: offset + b.offset,
                dim: b.dim,
            });
        }
        offset += h.dim();
    }
    CoverHomology {
        p,
        field,
        t_action: FqMatrix::block_diagonal(field, &matrices),
        basis_labels: labels,
        blocks,
    }
    .checked()
}

/// Cover homology of a (possibly composite) knot, each prime summand
/// expressed in its `x_j` eigenbasis.
pub fn knot_cover(k: &KnotBundle, roots: &PairedRoots) -> Result<CoverHomology> {
    let p = roots.p();
    let q = roots.field().modulus();
    let parts = k
        .prime_summands()
        .into_iter()
        .map(|(prime, orientation)| {
            let alexander = prime.alexander.as_ref().ok_or_else(|| {
                Error::InvalidParameter(format!("{} has no Alexander polynomial", prime.label))
            })?;
            let h = branched_cover_homology(alexander, p, q)?.diagonalize(roots)?;
            Ok((h, orientation))
        })
        .collect::<Result<Vec<_>>>()?;
    assemble_sum(&parts)
}

/// A character `H_1 -> Z_q`, given by its values on the homology basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Character {
    pub values: Vec<u32>,
    pub order: u32,
}

impl Character {
    pub fn new(values: Vec<u32>, order: u32) -> Self {
        Self { values, order }
    }

    pub fn zero(dim: usize, order: u32) -> Self {
        Self::new(vec![0; dim], order)
    }

    pub fn evaluate(&self, v: &[u32]) -> u32 {
        dot(Fq::new(self.order).expect("character order is prime"), &self.values, v)
    }

    pub fn vanishes_on(&self, vectors: &[Vec<u32>]) -> bool {
        vectors.iter().all(|v| self.evaluate(v) == 0)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn restrict(&self, offset: usize, dim: usize) -> Character {
        Character::new(self.values[offset..offset + dim].to_vec(), self.order)
    }

    /// Canonical text form of the coordinate values, used as a map key.
    pub fn fingerprint(&self) -> String {
        self.values
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }
}
