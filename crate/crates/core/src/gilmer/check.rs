use std::collections::HashMap;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use super::certificate::{eigenvalue_records, transfer_conclusion};
use super::{
    brute_force_witness, subspace_count, target_rank, Budget, Certificate, InvariantSubspace,
    ObstructionContext, TransferCertificate, Verdict, VerifyOptions, Witness, CERTIFICATE_SCHEMA,
    DEFAULT_BUDGET, TRANSFER_SCHEMA,
};
use crate::branched_cover::Character;
use crate::cg_engine::guaranteed_exceeds;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub valid: bool,
    pub diagnoses: Vec<String>,
}

impl CheckReport {
    fn finish(diagnoses: Vec<String>) -> Self {
        CheckReport {
            valid: diagnoses.is_empty(),
            diagnoses,
        }
    }

    pub fn mentions(&self, needle: &str) -> bool {
        self.diagnoses.iter().any(|d| d.contains(needle))
    }
}

pub fn check_certificate(cert: &Certificate) -> CheckReport {
    check_certificate_with_budget(cert, DEFAULT_BUDGET)
}

/// Re-derives everything in `cert` from its parameters. Witness values are
/// recomputed with the general lift-sum formula whatever formula produced them.
pub fn check_certificate_with_budget(cert: &Certificate, budget: u64) -> CheckReport {
    let mut diag = Vec::new();
    let par = &cert.parameters;
    if cert.schema != CERTIFICATE_SCHEMA {
        diag.push(format!("schema mismatch: {}", cert.schema));
    }
    diag.extend(check_parameters(cert));

    let options = VerifyOptions {
        q: Some(par.q),
        variant: par.variant,
        sigmas: Some((par.sigma_a, par.sigma_b)),
        formula: "litherland-general".into(),
        ..VerifyOptions::default()
    };
    let ctx = match ObstructionContext::build(par.p, par.g, par.c, &options) {
        Ok(ctx) => ctx,
        Err(e) => {
            diag.push(format!("cannot rebuild the knot from the parameters: {e}"));
            return CheckReport::finish(diag);
        }
    };

    if ctx.root_sum != par.root_sum {
        diag.push(format!("root sum is {}, certificate says {}", ctx.root_sum, par.root_sum));
    }
    if ctx.root_sum != 0 {
        diag.push(format!("nonzero Tristram-Levine root sum {}", ctx.root_sum));
    }
    if eigenvalue_records(&ctx) != cert.eigenvalues {
        diag.push("eigenvalue data does not match the recomputed decomposition".into());
    }
    if ctx.homology.basis_labels() != cert.basis.as_slice() {
        diag.push("basis labels do not match the recomputed homology".into());
    }

    let expected = subspace_count(&ctx.decomposition.dims(), ctx.rank, ctx.q);
    if expected != cert.subspace_count.into() {
        diag.push(format!(
            "subspace count {} differs from the Gaussian binomial count {expected}",
            cert.subspace_count
        ));
    }
    let enumerator = match ctx.enumerator() {
        Ok(e) => e,
        Err(e) => {
            diag.push(format!("cannot enumerate subspaces: {e}"));
            return CheckReport::finish(diag);
        }
    };
    if enumerator.len() != cert.subspace_count {
        diag.push(format!(
            "re-enumeration yields {} subspaces, certificate says {}",
            enumerator.len(),
            cert.subspace_count
        ));
    }

    diag.extend(check_coverage(cert, &ctx, enumerator.iter()));

    let mut witness_diag: Vec<Vec<String>> = cert
        .witnesses
        .par_iter()
        .enumerate()
        .map(|(i, w)| check_witness(i, w, &ctx))
        .collect();
    diag.extend(witness_diag.drain(..).flatten());

    let consistent = match cert.verdict {
        Verdict::Obstructed => cert.unwitnessed.is_empty(),
        Verdict::NotObstructed => !cert.unwitnessed.is_empty(),
    };
    if !consistent {
        diag.push(format!(
            "verdict {:?} inconsistent with {} unwitnessed subspaces",
            cert.verdict,
            cert.unwitnessed.len()
        ));
    }

    let budget = Budget::new(budget);
    for (i, h) in cert.unwitnessed.iter().enumerate() {
        if !h.is_canonical_for(&ctx.decomposition, ctx.q) {
            continue;
        }
        match brute_force_witness(h, &ctx, ctx.threshold, &budget) {
            Ok(None) => {}
            Ok(Some(_)) => diag.push(format!("unwitnessed subspace {i} does have a witness")),
            Err(e) => diag.push(format!("unwitnessed subspace {i} not rechecked: {e}")),
        }
    }

    CheckReport::finish(diag)
}

fn check_parameters(cert: &Certificate) -> Vec<String> {
    let par = &cert.parameters;
    let mut diag = Vec::new();
    let (p, g, c) = (par.p as i64, par.g as i64, par.c as i64);
    let bound_a = 2 * (g + 1) * c + 2 * p * g;
    let bound_b = (g + 1) * p * par.sigma_a + bound_a;
    if par.bound_a != bound_a || par.bound_b != bound_b {
        diag.push("recorded sigma bounds do not match g, c and p".into());
    }
    if par.sigma_a <= 0 || par.sigma_a % 2 != 0 || p * par.sigma_a <= bound_a {
        diag.push(format!("sigma_a = {} violates p sigma_a > {bound_a}", par.sigma_a));
    }
    if par.sigma_b <= 0 || par.sigma_b % 2 != 0 || p * par.sigma_b <= bound_b {
        diag.push(format!("sigma_b = {} violates p sigma_b > {bound_b}", par.sigma_b));
    }
    if par.margin_a != p * par.sigma_a - bound_a || par.margin_b != p * par.sigma_b - bound_b {
        diag.push("recorded sigma margins are wrong".into());
    }
    if par.target_rank != target_rank(par.p, par.g) {
        diag.push(format!("target rank {} is not (p-1)(2g+1)", par.target_rank));
    }
    if par.threshold != 2 * par.p as u64 * par.g as u64 + par.root_sum.unsigned_abs() {
        diag.push(format!("threshold {} is not 2pg + |root sum|", par.threshold));
    }
    let gcd = par.m.unsigned_abs().gcd(&(par.p as u64));
    if par.m == 0 || gcd != 1 {
        diag.push(format!("winding number {} shares a factor with p = {}", par.m, par.p));
    }
    if par.gilmer_clause_1 != "recorded, unused" {
        diag.push("unexpected use of the presentation condition".into());
    }
    diag
}

fn check_coverage(
    cert: &Certificate,
    ctx: &ObstructionContext,
    enumerated: impl Iterator<Item = InvariantSubspace>,
) -> Vec<String> {
    let mut diag = Vec::new();
    let mut recorded: HashMap<&InvariantSubspace, usize> = HashMap::new();
    for h in cert.witnesses.iter().map(|w| &w.subspace).chain(&cert.unwitnessed) {
        *recorded.entry(h).or_default() += 1;
    }
    let mut gaps = 0u64;
    for h in enumerated {
        match recorded.get_mut(&h) {
            Some(n) if *n > 0 => *n -= 1,
            _ => {
                if gaps < 5 {
                    diag.push(format!("coverage gap: no record for subspace {}", describe(&h)));
                }
                gaps += 1;
            }
        }
    }
    if gaps > 5 {
        diag.push(format!("coverage gap: {gaps} subspaces missing in total"));
    }
    let extra: usize = recorded.values().sum();
    if extra > 0 {
        diag.push(format!("{extra} duplicate or non-canonical subspace records"));
    }
    for (i, w) in cert.witnesses.iter().enumerate() {
        if w.subspace.rank() != ctx.rank || !w.subspace.is_canonical_for(&ctx.decomposition, ctx.q) {
            diag.push(format!("witness {i}: subspace is not a canonical rank-{} form", ctx.rank));
        }
    }
    diag
}

fn check_witness(i: usize, w: &Witness, ctx: &ObstructionContext) -> Vec<String> {
    let mut diag = Vec::new();
    let dim = ctx.homology.dim();
    if w.character.len() != dim || w.character.iter().any(|&v| v >= ctx.q) {
        diag.push(format!("witness {i}: malformed character"));
        return diag;
    }
    if !w.subspace.is_canonical_for(&ctx.decomposition, ctx.q) {
        return diag;
    }
    let chi = Character::new(w.character.clone(), ctx.q);
    let rows = w.subspace.ambient_rows(&ctx.decomposition, ctx.field, dim);
    if !chi.vanishes_on(&rows) {
        diag.push(format!("witness {i}: vanishing violated"));
    }
    match ctx.value_of(&chi) {
        Ok(v) if v == w.value => {}
        Ok(v) => diag.push(format!(
            "witness {i}: recorded value det {} differs from recomputed det {}",
            w.value.det, v.det
        )),
        Err(e) => diag.push(format!("witness {i}: value not recomputable: {e}")),
    }
    if !guaranteed_exceeds(&w.value, ctx.threshold) {
        diag.push(format!("witness {i}: value does not exceed threshold {}", ctx.threshold));
    }
    diag
}

fn describe(h: &InvariantSubspace) -> String {
    let parts: Vec<String> = h
        .per_eigen
        .iter()
        .map(|p| format!("B{}:{:?}", p.eigen, p.rows))
        .collect();
    parts.join(" ")
}

/// Checks the cabling record and the certificate it wraps.
pub fn check_transfer(tc: &TransferCertificate) -> CheckReport {
    let mut diag = Vec::new();
    let rec = &tc.transfer;
    if tc.schema != TRANSFER_SCHEMA {
        diag.push(format!("schema mismatch: {}", tc.schema));
    }
    if rec.pattern != "C_{m,1}" {
        diag.push(format!("unknown pattern {}", rec.pattern));
    }
    let p = tc.certificate.parameters.p;
    if rec.p != p || rec.m != tc.certificate.parameters.m {
        diag.push("transfer record disagrees with the certificate parameters".into());
    }
    let gcd = rec.m.unsigned_abs().gcd(&(p as u64));
    if rec.m == 0 || gcd != 1 || rec.gcd != gcd {
        diag.push(format!("winding number {} is not prime to p = {p}", rec.m));
    }
    if rec.transferred_values != tc.certificate.witnesses.len() as u64 {
        diag.push("not every witness value was transferred".into());
    }
    if rec.conclusion != transfer_conclusion(tc.certificate.parameters.g) {
        diag.push("conclusion does not match the genus bound".into());
    }
    if !tc.certificate.is_obstructed() {
        diag.push("wrapped certificate is not obstructed".into());
    }
    let inner = check_certificate(&tc.certificate);
    diag.extend(inner.diagnoses);
    CheckReport::finish(diag)
}
