use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{InvariantSubspace, ObstructionContext, Variant, VerifyOptions, Witness};
use crate::branched_cover::BasisLabel;
use crate::cg_engine::relprime_transfer;
use crate::error::Result;

pub const CERTIFICATE_SCHEMA: &str = "cgslice.certificate/v1";
pub const TRANSFER_SCHEMA: &str = "cgslice.transfer/v1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameters {
    pub p: u32,
    pub q: u32,
    pub g: u32,
    pub c: u32,
    pub sigma_a: i64,
    pub sigma_b: i64,
    pub bound_a: i64,
    pub bound_b: i64,
    pub margin_a: i64,
    pub margin_b: i64,
    pub m: i64,
    pub variant: Variant,
    pub target_rank: usize,
    pub threshold: u64,
    pub root_sum: i64,
    pub formula: String,
    pub strategies: Vec<String>,
    /// Only the signature bound is used in the decision; the presentation
    /// condition is noted here for the record.
    pub gilmer_clause_1: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Obstructed,
    NotObstructed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenvalueRecord {
    pub index: usize,
    pub value: u32,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub parameters: Parameters,
    pub eigenvalues: Vec<EigenvalueRecord>,
    /// Labels of the ambient homology basis that characters are written in.
    pub basis: Vec<BasisLabel>,
    pub subspace_count: u64,
    pub witnesses: Vec<Witness>,
    /// Subspaces for which no strategy found a witness, in enumeration order.
    pub unwitnessed: Vec<InvariantSubspace>,
    pub verdict: Verdict,
}

impl Certificate {
    pub(super) fn assemble(
        ctx: &ObstructionContext,
        options: &VerifyOptions,
        subspace_count: u64,
        witnesses: Vec<Witness>,
        unwitnessed: Vec<InvariantSubspace>,
    ) -> Self {
        let verdict = if unwitnessed.is_empty() {
            Verdict::Obstructed
        } else {
            Verdict::NotObstructed
        };
        Certificate {
            schema: CERTIFICATE_SCHEMA.into(),
            parameters: Parameters {
                p: ctx.p,
                q: ctx.q,
                g: ctx.g,
                c: ctx.c,
                sigma_a: ctx.sigmas.sigma_a,
                sigma_b: ctx.sigmas.sigma_b,
                bound_a: ctx.sigmas.bound_a,
                bound_b: ctx.sigmas.bound_b,
                margin_a: ctx.sigmas.margin_a(ctx.p),
                margin_b: ctx.sigmas.margin_b(ctx.p),
                m: options.m,
                variant: ctx.variant,
                target_rank: ctx.rank,
                threshold: ctx.threshold,
                root_sum: ctx.root_sum,
                formula: ctx.formula.name().into(),
                strategies: options.strategies.clone(),
                gilmer_clause_1: "recorded, unused".into(),
            },
            eigenvalues: eigenvalue_records(ctx),
            basis: ctx.homology.basis_labels().to_vec(),
            subspace_count,
            witnesses,
            unwitnessed,
            verdict,
        }
    }

    pub fn counterexample(&self) -> Option<&InvariantSubspace> {
        self.unwitnessed.first()
    }

    pub fn is_obstructed(&self) -> bool {
        self.verdict == Verdict::Obstructed
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec(self).expect("certificate serializes");
        out.push(b'\n');
        out
    }

    pub fn from_json(bytes: &[u8]) -> serde_json::Result<Self> {
        serde_json::from_slice(bytes)
    }
}

pub(super) fn eigenvalue_records(ctx: &ObstructionContext) -> Vec<EigenvalueRecord> {
    ctx.decomposition
        .spaces
        .iter()
        .map(|s| EigenvalueRecord {
            index: s.index,
            value: s.eigenvalue,
            dim: s.dim(),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferRecord {
    pub pattern: String,
    pub m: i64,
    pub p: u32,
    pub gcd: u64,
    pub identification: String,
    pub transferred_values: u64,
    pub conclusion: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferCertificate {
    pub schema: String,
    pub transfer: TransferRecord,
    pub certificate: Certificate,
}

impl TransferCertificate {
    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec(self).expect("certificate serializes");
        out.push(b'\n');
        out
    }
}

pub(super) fn transfer_conclusion(g: u32) -> String {
    format!("g4(C_{{m,1}}(K) # -C_{{m,1}}^r(K)) > {g}")
}

/// Carries every witness value across the `(m,1)`-cable. Fails if
/// `gcd(m, p) != 1`.
pub fn wrap_transfer(cert: Certificate, m: i64) -> Result<TransferCertificate> {
    let p = cert.parameters.p;
    relprime_transfer(m, p, &Default::default())?;
    let mut transferred = 0u64;
    for w in &cert.witnesses {
        let v = relprime_transfer(m, p, &w.value)?;
        debug_assert_eq!(v, w.value);
        transferred += 1;
    }
    Ok(TransferCertificate {
        schema: TRANSFER_SCHEMA.into(),
        transfer: TransferRecord {
            pattern: "C_{m,1}".into(),
            m,
            p,
            gcd: m.unsigned_abs().gcd(&(p as u64)),
            identification: "H_1 of the p-fold branched cover and its covering action are unchanged by the cable; characters correspond coordinatewise".into(),
            transferred_values: transferred,
            conclusion: transfer_conclusion(cert.parameters.g),
        },
        certificate: cert,
    })
}
