//! Exhaustive verification of the slice-genus obstruction.
//!
//! If `g_4(K # -K^r) <= g`, then for the p-fold cover there is an invariant
//! subspace of `H_1(; F_q)` of rank at most `(p-1)(2g+1)` on which every
//! vanishing character has Casson-Gordon signature at most `2pg` in absolute
//! value (the Tristram-Levine root sum vanishes here). Any smaller invariant
//! subspace sits inside one of exactly that rank, and characters vanishing on
//! the larger one vanish on the smaller, so it is enough to exhibit, for every
//! invariant subspace of rank `(p-1)(2g+1)`, one vanishing character whose
//! value exceeds `2pg` for every admissible value of the base-knot unknowns.

mod certificate;
mod check;
mod enumerate;
mod witness;

use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use certificate::{
    wrap_transfer, Certificate, Parameters, TransferCertificate, TransferRecord, Verdict,
    CERTIFICATE_SCHEMA, TRANSFER_SCHEMA,
};
pub use check::{check_certificate, check_certificate_with_budget, check_transfer, CheckReport};
pub use enumerate::{
    compositions, echelon_forms, gaussian_binomial, subspace_count, EigenPart, InvariantSubspace,
    SubspaceEnumerator,
};
pub use witness::{
    annihilator, annihilator_basis, annihilator_values, brute_force_witness, constructive_witness,
    BruteForce, Constructive, Witness, WitnessMethod, WitnessStrategy,
};

use crate::branched_cover::{eigen_decompose, knot_cover, Character, CoverHomology, EigenDecomposition};
use crate::cg_engine::{sum_value, AffineValue, BlockSpec, SatelliteFormula};
use crate::error::{Error, Result};
use crate::ff_algebra::{factor_cyclotomic, is_odd_prime, smallest_splitting_prime, Fq, PairedRoots};
use crate::knot_model::{
    connected_sum, infect, make_levine_knot, make_step_knot_bundle, mirror, reverse, InfectionSpec,
    KnotBundle, SumExpression,
};
use crate::linalg::FqMatrix;
use crate::registry::{satellite_formulas, witness_strategies};
use crate::tl_signature::{synthesize_sigmas, total_root_sum, SigmaChoice};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// `(p - 1)(2g + 1)`.
pub fn target_rank(p: u32, g: u32) -> usize {
    (p as usize - 1) * (2 * g as usize + 1)
}

/// Which knot is tested: `K # -K^r` or the control `K # -K`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    #[default]
    MirrorReverse,
    MirrorOnly,
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mirror-reverse" => Ok(Variant::MirrorReverse),
            "mirror-only" => Ok(Variant::MirrorOnly),
            other => Err(Error::InvalidParameter(format!(
                "unknown variant '{other}' (expected mirror-reverse or mirror-only)"
            ))),
        }
    }
}

/// Shared cap on elementary evaluations (subspaces plus characters).
#[derive(Debug)]
pub struct Budget {
    limit: u64,
    used: AtomicU64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Self {
            limit,
            used: AtomicU64::new(0),
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    pub fn charge(&self, n: u128) -> Result<()> {
        let n64 = u64::try_from(n).unwrap_or(u64::MAX);
        let before = self.used.fetch_add(n64, Ordering::Relaxed);
        let after = before as u128 + n;
        if after > self.limit as u128 {
            return Err(Error::BudgetExceeded {
                needed: after,
                limit: self.limit,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub q: Option<u32>,
    pub variant: Variant,
    pub budget: u64,
    /// Witness strategies, tried in order for each subspace.
    pub strategies: Vec<String>,
    pub formula: String,
    /// Winding number recorded with the certificate (1 for the identity pattern).
    pub m: i64,
    /// Fixed infection heights instead of the minimal ones for `c`.
    pub sigmas: Option<(i64, i64)>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            q: None,
            variant: Variant::MirrorReverse,
            budget: DEFAULT_BUDGET,
            strategies: vec!["constructive".into(), "brute-force".into()],
            formula: "closed-form".into(),
            m: 1,
            sigmas: None,
        }
    }
}

/// Everything the witness search needs: the assembled knot, its cover
/// homology, eigen decomposition, per-block infection data and the threshold.
pub struct ObstructionContext {
    pub p: u32,
    pub q: u32,
    pub g: u32,
    pub c: u32,
    pub field: Fq,
    pub roots: PairedRoots,
    pub sigmas: SigmaChoice,
    pub variant: Variant,
    pub knot: KnotBundle,
    pub homology: CoverHomology,
    pub decomposition: EigenDecomposition,
    pub block_specs: Vec<BlockSpec>,
    pub root_sum: i64,
    pub threshold: u64,
    pub rank: usize,
    pub formula: Arc<dyn SatelliteFormula>,
    /// Inverse of the matrix whose columns are the eigenbasis vectors in
    /// decomposition order.
    eigen_inverse: FqMatrix,
}

impl ObstructionContext {
    pub fn build(p: u32, g: u32, c: u32, options: &VerifyOptions) -> Result<Self> {
        if !is_odd_prime(p as u64) {
            return Err(Error::InvalidBasePrime(p as u64));
        }
        let q = match options.q {
            Some(q) => q,
            None => smallest_splitting_prime(p)?.q,
        };
        let roots = factor_cyclotomic(p, q)?;
        let field = roots.field();
        let sigmas = match options.sigmas {
            None => synthesize_sigmas(p, g, c),
            Some((sigma_a, sigma_b)) => {
                let minimal = synthesize_sigmas(p, g, c);
                let bound_b = (g as i64 + 1) * p as i64 * sigma_a + minimal.bound_a;
                SigmaChoice {
                    sigma_a,
                    sigma_b,
                    bound_a: minimal.bound_a,
                    bound_b,
                }
            }
        };
        let a = make_step_knot_bundle("A", q, sigmas.sigma_a)?;
        let b = make_step_knot_bundle("B", q, sigmas.sigma_b)?;
        let j0 = make_levine_knot(p, q, c)?;
        let spec = InfectionSpec::standard(j0, roots.clone(), &a, &b)?;
        let jg = infect(format!("J{g}"), spec);
        let k = connected_sum(&SumExpression {
            summands: vec![(jg, g + 1)],
        })?;
        let other = match options.variant {
            Variant::MirrorReverse => mirror(&reverse(&k)),
            Variant::MirrorOnly => mirror(&k),
        };
        let knot = connected_sum(&SumExpression {
            summands: vec![(k, 1), (other, 1)],
        })?;
        knot.validate()?;

        let homology = knot_cover(&knot, &roots)?;
        let decomposition = eigen_decompose(&homology, &roots)?;
        let block_specs: Vec<BlockSpec> = knot
            .prime_summands()
            .into_iter()
            .map(|(prime, _)| BlockSpec {
                infection: prime.infection.clone(),
                bound: prime.cg_bound,
            })
            .collect();
        let root_sum = total_root_sum(&knot.effective_profile(), p);
        let threshold = 2 * p as u64 * g as u64 + root_sum.unsigned_abs();
        let columns: Vec<Vec<u32>> = decomposition
            .spaces
            .iter()
            .flat_map(|s| s.basis.iter().cloned())
            .collect();
        let eigen_inverse = FqMatrix::from_columns(field, homology.dim(), &columns)
            .inverse()
            .ok_or(Error::NotSemisimple)?;
        let formula = satellite_formulas().get(&options.formula)?;
        Ok(Self {
            p,
            q,
            g,
            c,
            field,
            roots,
            sigmas,
            variant: options.variant,
            knot,
            homology,
            decomposition,
            block_specs,
            root_sum,
            threshold,
            rank: target_rank(p, g),
            formula,
            eigen_inverse,
        })
    }

    /// Converts a functional given on the eigenbasis (decomposition order) to
    /// its values on the ambient homology basis.
    pub fn eigen_to_ambient_character(&self, eigen_coords: &[u32]) -> Vec<u32> {
        let f = self.field;
        let n = self.homology.dim();
        (0..n)
            .map(|k| {
                (0..n).fold(0, |acc, m| {
                    f.add(acc, f.mul(eigen_coords[m], self.eigen_inverse.get(m, k)))
                })
            })
            .collect()
    }

    pub fn value_of(&self, chi: &Character) -> Result<AffineValue> {
        sum_value(&self.homology, &self.block_specs, chi, self.formula.as_ref())
    }

    pub fn value_with(&self, chi: &Character, formula: &dyn SatelliteFormula) -> Result<AffineValue> {
        sum_value(&self.homology, &self.block_specs, chi, formula)
    }

    pub fn enumerator(&self) -> Result<SubspaceEnumerator> {
        SubspaceEnumerator::new(&self.decomposition, self.rank, self.field)
    }
}

enum Outcome {
    Witnessed(Witness),
    Unwitnessed(InvariantSubspace),
}

/// Runs the full search and assembles a certificate.
pub fn verify_genus_bound(p: u32, g: u32, c: u32, options: &VerifyOptions) -> Result<Certificate> {
    let ctx = ObstructionContext::build(p, g, c, options)?;
    let registry = witness_strategies();
    let strategies = options
        .strategies
        .iter()
        .map(|name| registry.get(name))
        .collect::<Result<Vec<_>>>()?;
    if strategies.is_empty() {
        return Err(Error::InvalidParameter("no witness strategy selected".into()));
    }

    let expected = subspace_count(&ctx.decomposition.dims(), ctx.rank, ctx.q);
    let budget = Budget::new(options.budget);
    let expected_u64 = enumerate::count_as_u64(&expected).ok_or(Error::BudgetExceeded {
        needed: u128::MAX,
        limit: options.budget,
    })?;
    budget.charge(expected_u64 as u128)?;
    let enumerator = ctx.enumerator()?;
    if enumerator.len() != expected_u64 {
        return Err(Error::InvalidParameter(format!(
            "enumerated {} subspaces, Gaussian binomial count is {expected}",
            enumerator.len()
        )));
    }

    let outcomes = (0..enumerator.len())
        .into_par_iter()
        .map(|i| {
            let h = enumerator.get(i);
            for s in &strategies {
                if let Some(w) = s.find(&ctx, &h, &budget)? {
                    return Ok(Outcome::Witnessed(w));
                }
            }
            Ok(Outcome::Unwitnessed(h))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut witnesses = Vec::new();
    let mut unwitnessed = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Witnessed(w) => witnesses.push(w),
            Outcome::Unwitnessed(h) => unwitnessed.push(h),
        }
    }
    Ok(Certificate::assemble(
        &ctx,
        options,
        expected_u64,
        witnesses,
        unwitnessed,
    ))
}
