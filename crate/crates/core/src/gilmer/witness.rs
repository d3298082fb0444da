use serde::{Deserialize, Serialize};

use super::enumerate::{advance, InvariantSubspace};
use super::{Budget, ObstructionContext};
use crate::branched_cover::Character;
use crate::cg_engine::{guaranteed_exceeds, AffineValue};
use crate::error::{Error, Result};
use crate::linalg::{combine, FqMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessMethod {
    Constructive,
    BruteForce,
}

/// A character vanishing on `subspace` whose value provably exceeds the
/// threshold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub subspace: InvariantSubspace,
    pub character: Vec<u32>,
    pub value: AffineValue,
    pub method: WitnessMethod,
}

/// A way of producing a witness for one invariant subspace.
pub trait WitnessStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn find(&self, ctx: &ObstructionContext, h: &InvariantSubspace, budget: &Budget) -> Result<Option<Witness>>;
}

pub struct Constructive;

impl WitnessStrategy for Constructive {
    fn name(&self) -> &'static str {
        "constructive"
    }

    fn find(&self, ctx: &ObstructionContext, h: &InvariantSubspace, budget: &Budget) -> Result<Option<Witness>> {
        budget.charge(1)?;
        constructive_witness(h, ctx)
    }
}

pub struct BruteForce;

impl WitnessStrategy for BruteForce {
    fn name(&self) -> &'static str {
        "brute-force"
    }

    fn find(&self, ctx: &ObstructionContext, h: &InvariantSubspace, budget: &Budget) -> Result<Option<Witness>> {
        brute_force_witness(h, ctx, ctx.threshold, budget)
    }
}

/// Pick an eigenspace `B_j` not contained in `H` (smallest `j`), take the
/// first standard vector of `B_j` outside `H`, and use the character dual to it
/// in an eigenbasis extending a basis of `H`. Returns `None` when the
/// resulting value does not clear the threshold.
pub fn constructive_witness(h: &InvariantSubspace, ctx: &ObstructionContext) -> Result<Option<Witness>> {
    let decomp = &ctx.decomposition;
    let field = ctx.field;
    let chosen = (1..ctx.p as usize).find_map(|j| {
        let (pos, space) = decomp.by_index(j)?;
        let part = &h.per_eigen[pos];
        (part.rows.len() < space.dim()).then_some((pos, part))
    });
    let Some((pos, part)) = chosen else {
        return Err(Error::InvalidParameter(
            "subspace is the whole homology; no character vanishes on it".into(),
        ));
    };

    let pivots: Vec<usize> = part
        .rows
        .iter()
        .map(|r| r.iter().position(|&x| x != 0).expect("echelon rows are nonzero"))
        .collect();
    let c0 = (0..part.dim)
        .find(|c| !pivots.contains(c))
        .expect("rank below dimension leaves a free column");
    // Functional on B_j: 1 on e_{c0}, 0 on the other free vectors and on H cap B_j.
    let mut local = vec![0u32; part.dim];
    local[c0] = 1;
    for (row, &pc) in part.rows.iter().zip(&pivots) {
        local[pc] = field.neg(row[c0]);
    }

    let mut eigen_coords = Vec::with_capacity(ctx.homology.dim());
    for (i, space) in decomp.spaces.iter().enumerate() {
        if i == pos {
            eigen_coords.extend_from_slice(&local);
        } else {
            eigen_coords.extend(std::iter::repeat_n(0, space.dim()));
        }
    }
    let character = ctx.eigen_to_ambient_character(&eigen_coords);
    let rows = h.ambient_rows(decomp, field, ctx.homology.dim());
    let chi = Character::new(character, ctx.q);
    if !chi.vanishes_on(&rows) {
        return Err(Error::InvalidParameter(
            "constructed character does not vanish on the subspace".into(),
        ));
    }
    let value = ctx.value_of(&chi)?;
    Ok(guaranteed_exceeds(&value, ctx.threshold).then(|| Witness {
        subspace: h.clone(),
        character: chi.values,
        value,
        method: WitnessMethod::Constructive,
    }))
}

/// Basis of the characters vanishing on `H`.
pub fn annihilator_basis(h: &InvariantSubspace, ctx: &ObstructionContext) -> Vec<Vec<u32>> {
    let dim = ctx.homology.dim();
    let rows = h.ambient_rows(&ctx.decomposition, ctx.field, dim);
    FqMatrix::from_rows(ctx.field, dim, &rows).null_space()
}

/// Every character vanishing on `H`, in lexicographic order of coefficients
/// over [`annihilator_basis`], the zero character first.
pub fn annihilator(h: &InvariantSubspace, ctx: &ObstructionContext) -> impl Iterator<Item = Character> {
    let basis = annihilator_basis(h, ctx);
    let (field, q, dim) = (ctx.field, ctx.q, ctx.homology.dim());
    let mut coeffs = vec![0u32; basis.len()];
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let chi = Character::new(combine(field, dim, &coeffs, &basis), q);
        done = !advance(&mut coeffs, q);
        Some(chi)
    })
}

/// Scan the whole annihilator of `H` for a qualifying character.
pub fn brute_force_witness(
    h: &InvariantSubspace,
    ctx: &ObstructionContext,
    threshold: u64,
    budget: &Budget,
) -> Result<Option<Witness>> {
    let free = ctx.homology.dim() - h.rank();
    let size = (ctx.q as u128).checked_pow(free as u32).unwrap_or(u128::MAX);
    if size > budget.limit() as u128 {
        return Err(Error::BudgetExceeded {
            needed: size,
            limit: budget.limit(),
        });
    }
    for chi in annihilator(h, ctx) {
        budget.charge(1)?;
        let value = ctx.value_of(&chi)?;
        if guaranteed_exceeds(&value, threshold) {
            return Ok(Some(Witness {
                subspace: h.clone(),
                character: chi.values,
                value,
                method: WitnessMethod::BruteForce,
            }));
        }
    }
    Ok(None)
}

/// All values attained on the annihilator of `H`, with their characters.
pub fn annihilator_values(h: &InvariantSubspace, ctx: &ObstructionContext) -> Result<Vec<(Character, AffineValue)>> {
    annihilator(h, ctx)
        .map(|chi| ctx.value_of(&chi).map(|v| (chi, v)))
        .collect()
}
