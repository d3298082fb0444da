//! Casson-Gordon signatures of characters on the infected knots, as affine
//! forms: an exact integer part from the satellite lift sums plus one bounded
//! unknown per prime summand for the base knot's own contribution.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::branched_cover::{Character, CoverHomology, Tag};
use crate::error::{Error, Result};
use crate::ff_algebra::FieldElement;
use crate::knot_model::InfectionSpec;
use crate::tl_signature::lift_sum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CopyId {
    pub index: usize,
    pub tag: Tag,
}

/// Identifies one unknown base-knot value: which copy, and the character it
/// induces on that copy's base homology.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UnknownKey {
    pub copy: CopyId,
    pub character: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub copy: usize,
    pub tag: Tag,
    pub character: String,
    pub coeff: i64,
}

/// `det + sum coeff_k u_k` where every unknown satisfies `|u_k| <= bound`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "AffineRecord", from = "AffineRecord")]
pub struct AffineValue {
    pub det: i64,
    pub terms: BTreeMap<UnknownKey, i64>,
    pub bound: u32,
}

#[derive(Serialize, Deserialize)]
struct AffineRecord {
    det: i64,
    bound: u32,
    terms: Vec<Term>,
}

impl From<AffineValue> for AffineRecord {
    fn from(v: AffineValue) -> Self {
        AffineRecord {
            det: v.det,
            bound: v.bound,
            terms: v
                .terms
                .into_iter()
                .map(|(k, coeff)| Term {
                    copy: k.copy.index,
                    tag: k.copy.tag,
                    character: k.character,
                    coeff,
                })
                .collect(),
        }
    }
}

impl From<AffineRecord> for AffineValue {
    fn from(r: AffineRecord) -> Self {
        let terms = r
            .terms
            .into_iter()
            .map(|t| {
                (
                    UnknownKey {
                        copy: CopyId {
                            index: t.copy,
                            tag: t.tag,
                        },
                        character: t.character,
                    },
                    t.coeff,
                )
            })
            .collect();
        AffineValue {
            det: r.det,
            terms,
            bound: r.bound,
        }
    }
}

impl AffineValue {
    pub fn constant(det: i64) -> Self {
        Self {
            det,
            ..Self::default()
        }
    }

    pub fn unknown(key: UnknownKey, coeff: i64, bound: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(key, coeff);
        Self {
            det: 0,
            terms,
            bound,
        }
    }

    /// Sum of two values; the bound of the result is the larger bound.
    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            *terms.entry(k.clone()).or_insert(0) += c;
        }
        terms.retain(|_, c| *c != 0);
        Self {
            det: self.det + other.det,
            terms,
            bound: self.bound.max(other.bound),
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            det: -self.det,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
            bound: self.bound,
        }
    }

    /// `sum |coeff_k| * bound`: the largest possible displacement from `det`.
    pub fn slack(&self) -> i128 {
        self.terms.values().map(|c| c.unsigned_abs() as i128).sum::<i128>() * self.bound as i128
    }

    /// Exact value for a given assignment of the unknowns, in `terms` order.
    pub fn instantiate(&self, assignment: &[i64]) -> i64 {
        self.det
            + self
                .terms
                .values()
                .zip(assignment)
                .map(|(c, u)| c * u)
                .sum::<i64>()
    }
}

pub fn delta_indicator(chi_on_xj: FieldElement) -> u8 {
    (!chi_on_xj.is_zero()) as u8
}

fn check_character(spec: &InfectionSpec, chi: &Character) -> Result<()> {
    if chi.order != spec.q || chi.values.len() != spec.p as usize - 1 {
        return Err(Error::BlockSpecMismatch(format!(
            "character of length {} and order {} on a base homology of rank {} over F_{}",
            chi.values.len(),
            chi.order,
            spec.p - 1,
            spec.q
        )));
    }
    Ok(())
}

fn chi_at(spec: &InfectionSpec, chi: &Character, j: usize) -> FieldElement {
    spec.roots.field().elem(chi.values[j - 1] as i64)
}

/// Litherland's formula taken literally: for each infection index `j`, sum the
/// infecting knot's signature over the `p` lifts `t^k x_j = a_j^k x_j`.
pub fn satellite_value_general(base_unknown: UnknownKey, spec: &InfectionSpec, chi: &Character) -> Result<AffineValue> {
    check_character(spec, chi)?;
    let mut det = 0;
    for (&j, knot) in &spec.eigen_assignment {
        let a = spec.roots.element(j).ok_or(Error::InfectionIndex(j))?;
        det += lift_sum(&knot.effective_profile(), a, chi_at(spec, chi, j), spec.p);
    }
    Ok(AffineValue::constant(det).add(&AffineValue::unknown(base_unknown, 1, spec.base.cg_bound)))
}

/// Closed form for step-function infections: each index with `chi(x_j) != 0`
/// contributes `p * sigma_{A_j}(omega_q)`.
pub fn closed_form_value(base_unknown: UnknownKey, spec: &InfectionSpec, chi: &Character) -> Result<AffineValue> {
    check_character(spec, chi)?;
    let mut det = 0;
    for (&j, knot) in &spec.eigen_assignment {
        let height = knot.effective_profile().constant_on_roots(spec.q).ok_or_else(|| {
            Error::ClosedFormInapplicable(format!(
                "{} is not constant on the nontrivial {}-th roots of unity",
                knot.label, spec.q
            ))
        })?;
        det += spec.p as i64 * height * delta_indicator(chi_at(spec, chi, j)) as i64;
    }
    Ok(AffineValue::constant(det).add(&AffineValue::unknown(base_unknown, 1, spec.base.cg_bound)))
}

/// One way of evaluating the Casson-Gordon signature of an infected knot.
pub trait SatelliteFormula: Send + Sync {
    fn name(&self) -> &'static str;
    fn value(&self, base_unknown: UnknownKey, spec: &InfectionSpec, chi: &Character) -> Result<AffineValue>;
}

pub struct LitherlandGeneral;

impl SatelliteFormula for LitherlandGeneral {
    fn name(&self) -> &'static str {
        "litherland-general"
    }

    fn value(&self, base_unknown: UnknownKey, spec: &InfectionSpec, chi: &Character) -> Result<AffineValue> {
        satellite_value_general(base_unknown, spec, chi)
    }
}

pub struct ClosedForm;

impl SatelliteFormula for ClosedForm {
    fn name(&self) -> &'static str {
        "closed-form"
    }

    fn value(&self, base_unknown: UnknownKey, spec: &InfectionSpec, chi: &Character) -> Result<AffineValue> {
        closed_form_value(base_unknown, spec, chi)
    }
}

/// What a block of the assembled homology is a copy of.
#[derive(Clone, Debug)]
pub struct BlockSpec {
    /// `None` for a summand with no infection: only the unknown term remains.
    pub infection: Option<InfectionSpec>,
    pub bound: u32,
}

/// Casson-Gordon signature of `chi` on a connected sum, block by block.
///
/// The identification of a mirrored or reversed copy with the base homology
/// is coordinatewise (`y_j <-> x_j`), so the pulled-back character has the same
/// coordinates. Mirrored blocks enter with the opposite sign.
pub fn sum_value(
    assembled: &CoverHomology,
    specs: &[BlockSpec],
    chi: &Character,
    formula: &dyn SatelliteFormula,
) -> Result<AffineValue> {
    let blocks = assembled.blocks();
    if blocks.len() != specs.len() {
        return Err(Error::BlockSpecMismatch(format!(
            "{} blocks but {} specs",
            blocks.len(),
            specs.len()
        )));
    }
    if chi.values.len() != assembled.dim() {
        return Err(Error::BlockSpecMismatch(format!(
            "character of length {} on homology of rank {}",
            chi.values.len(),
            assembled.dim()
        )));
    }
    let mut total = AffineValue::default();
    for (block, spec) in blocks.iter().zip(specs) {
        let local = chi.restrict(block.offset, block.dim);
        let key = UnknownKey {
            copy: CopyId {
                index: block.copy,
                tag: block.tag,
            },
            character: local.fingerprint(),
        };
        let value = match &spec.infection {
            Some(inf) => formula.value(key, inf, &local)?,
            None => AffineValue::unknown(key, 1, spec.bound),
        };
        total = if block.orientation.mirrored {
            total.add(&value.negated())
        } else {
            total.add(&value)
        };
    }
    Ok(total)
}

/// True iff every attainable value has absolute value above `threshold`.
pub fn guaranteed_exceeds(v: &AffineValue, threshold: u64) -> bool {
    (v.det as i128).abs() - v.slack() > threshold as i128
}

/// Cabling transfer along `C_{m,1}`: the values are unchanged when
/// `gcd(m, p) = 1`.
pub fn relprime_transfer(m: i64, p: u32, value: &AffineValue) -> Result<AffineValue> {
    let gcd = (m.unsigned_abs()).gcd(&(p as u64));
    if m == 0 || gcd != 1 {
        return Err(Error::WindingGcd { m, p, gcd });
    }
    Ok(value.clone())
}
