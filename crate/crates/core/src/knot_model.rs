//! Knots represented by their invariant data rather than by diagrams.
//!
//! A [`KnotBundle`] carries exactly what the obstruction consumes: an
//! Alexander polynomial (when known), a Tristram-Levine profile, the bound
//! `c` on the Casson-Gordon signatures of the underlying base knot, and an
//! optional infection description. Mirror and reverse only toggle flags; the
//! cover and signature code interpret them.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff_algebra::{is_odd_prime, is_prime, PairedRoots};
use crate::tl_signature::{make_step_knot, SignatureProfile};

/// Integer Laurent polynomial `sum_i coeffs[i] t^(offset + i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntLaurentPoly {
    offset: i64,
    coeffs: Vec<i64>,
}

impl IntLaurentPoly {
    pub fn new(offset: i64, coeffs: Vec<i64>) -> Self {
        let Some(first) = coeffs.iter().position(|&c| c != 0) else {
            return Self::zero();
        };
        let last = coeffs.iter().rposition(|&c| c != 0).unwrap();
        Self {
            offset: offset + first as i64,
            coeffs: coeffs[first..=last].to_vec(),
        }
    }

    pub fn zero() -> Self {
        Self {
            offset: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Self::new(0, vec![1])
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = a
                    .checked_mul(b)
                    .and_then(|x| out[i + j].checked_add(x))
                    .expect("Alexander polynomial coefficient overflow");
            }
        }
        Self::new(self.offset + other.offset, out)
    }

    pub fn eval_at_one(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    /// Symmetric up to a unit `+-t^k`.
    pub fn is_palindromic(&self) -> bool {
        self.coeffs.iter().eq(self.coeffs.iter().rev())
    }
}

impl fmt::Display for IntLaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let e = self.offset + i as i64;
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.unsigned_abs();
            match (a, e) {
                (_, 0) => write!(f, "{a}")?,
                (1, 1) => write!(f, "t")?,
                (1, _) => write!(f, "t^{e}")?,
                (_, 1) => write!(f, "{a}t")?,
                _ => write!(f, "{a}t^{e}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// `a(t) = k Phi_p(t) - q t^((p-1)/2)` with `q = kp + 1`.
pub fn levine_alexander(p: u32, q: u32) -> Result<IntLaurentPoly> {
    if !is_odd_prime(p as u64) {
        return Err(Error::InvalidBasePrime(p as u64));
    }
    if !is_prime(q as u64) || q % p != 1 {
        return Err(Error::CyclotomicDoesNotSplit { p, q });
    }
    let k = ((q - 1) / p) as i64;
    let mut coeffs = vec![k; p as usize];
    coeffs[(p as usize - 1) / 2] -= q as i64;
    Ok(IntLaurentPoly::new(0, coeffs))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Orientation {
    pub mirrored: bool,
    pub reversed: bool,
}

impl Orientation {
    pub fn compose(self, other: Orientation) -> Orientation {
        Orientation {
            mirrored: self.mirrored ^ other.mirrored,
            reversed: self.reversed ^ other.reversed,
        }
    }

    fn as_str(self) -> &'static str {
        match (self.mirrored, self.reversed) {
            (false, false) => "plain",
            (true, false) => "mirrored",
            (false, true) => "reversed",
            (true, true) => "mirrored-reversed",
        }
    }
}

impl Serialize for Orientation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Orientation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let (mirrored, reversed) = match s.as_str() {
            "plain" => (false, false),
            "mirrored" => (true, false),
            "reversed" => (false, true),
            "mirrored-reversed" => (true, true),
            other => {
                return Err(serde::de::Error::custom(format!(
                    "unknown orientation '{other}'"
                )))
            }
        };
        Ok(Orientation { mirrored, reversed })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnotBundle {
    pub label: String,
    /// `None` for knots known only through their signature profile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alexander: Option<IntLaurentPoly>,
    /// Profile of the knot as constructed, before orientation flags.
    pub profile: SignatureProfile,
    pub cg_bound: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infection: Option<InfectionSpec>,
    pub orientation: Orientation,
    /// Prime summands when this bundle is a connected sum.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub summands: Vec<KnotBundle>,
}

/// Infection of a base knot along unknotted, null-homologous curves, one per
/// eigen index `j`, each labelled by the eigenvector `x_j` it lifts to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfectionSpec {
    pub base: Box<KnotBundle>,
    pub p: u32,
    pub q: u32,
    pub roots: PairedRoots,
    pub eigen_assignment: BTreeMap<usize, KnotBundle>,
}

impl InfectionSpec {
    pub fn new(
        base: KnotBundle,
        roots: PairedRoots,
        eigen_assignment: BTreeMap<usize, KnotBundle>,
    ) -> Result<Self> {
        let p = roots.p();
        for &j in eigen_assignment.keys() {
            if roots.root(j).is_none() {
                return Err(Error::InfectionIndex(j));
            }
        }
        Ok(Self {
            base: Box::new(base),
            p,
            q: roots.field().modulus(),
            roots,
            eigen_assignment,
        })
    }

    /// `A` on indices `1..=(p-1)/2`, `B` on `(p+1)/2..=p-1`.
    pub fn standard(base: KnotBundle, roots: PairedRoots, a: &KnotBundle, b: &KnotBundle) -> Result<Self> {
        let p = roots.p() as usize;
        let assignment = (1..p)
            .map(|j| (j, if j <= (p - 1) / 2 { a.clone() } else { b.clone() }))
            .collect();
        Self::new(base, roots, assignment)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumExpression {
    pub summands: Vec<(KnotBundle, u32)>,
}

impl KnotBundle {
    pub fn new(label: impl Into<String>, alexander: Option<IntLaurentPoly>, profile: SignatureProfile, cg_bound: u32) -> Self {
        Self {
            label: label.into(),
            alexander,
            profile,
            cg_bound,
            infection: None,
            orientation: Orientation::default(),
            summands: Vec::new(),
        }
    }

    pub fn is_sum(&self) -> bool {
        !self.summands.is_empty()
    }

    /// Signature profile with the orientation flags applied. Reversal does
    /// not change Tristram-Levine signatures; mirroring negates them.
    pub fn effective_profile(&self) -> SignatureProfile {
        let base = if self.is_sum() {
            self.summands
                .iter()
                .fold(SignatureProfile::zero(), |acc, s| acc.plus(&s.effective_profile()))
        } else {
            self.profile.clone()
        };
        if self.orientation.mirrored {
            base.negated()
        } else {
            base
        }
    }

    /// Prime summands paired with their net orientation, in summand order.
    pub fn prime_summands(&self) -> Vec<(&KnotBundle, Orientation)> {
        let mut out = Vec::new();
        self.collect_prime(Orientation::default(), &mut out);
        out
    }

    fn collect_prime<'a>(&'a self, outer: Orientation, out: &mut Vec<(&'a KnotBundle, Orientation)>) {
        let net = outer.compose(self.orientation);
        if self.is_sum() {
            for s in &self.summands {
                s.collect_prime(net, out);
            }
        } else {
            out.push((self, net));
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(a) = &self.alexander {
            if !a.is_palindromic() || a.eval_at_one().abs() != 1 {
                return Err(Error::InvalidParameter(format!(
                    "{}: Alexander polynomial {a} is not symmetric with |a(1)| = 1",
                    self.label
                )));
            }
        }
        self.summands.iter().try_for_each(KnotBundle::validate)
    }
}

pub fn make_levine_knot(p: u32, q: u32, c: u32) -> Result<KnotBundle> {
    let a = levine_alexander(p, q)?;
    Ok(KnotBundle::new(
        format!("J0({p},{q})"),
        Some(a),
        SignatureProfile::zero(),
        c,
    ))
}

/// A knot whose only signature jumps sit just inside `omega_q` and its
/// conjugate, with height `sigma`.
pub fn make_step_knot_bundle(label: impl Into<String>, q: u32, sigma: i64) -> Result<KnotBundle> {
    Ok(KnotBundle::new(label, None, make_step_knot(q, sigma)?, 0))
}

/// The satellite of `spec.base` obtained by the infections in `spec`.
///
/// The infection curves are null-homologous, so the Alexander polynomial and
/// signature profile are those of the base knot.
pub fn infect(label: impl Into<String>, spec: InfectionSpec) -> KnotBundle {
    let alexander = spec.base.alexander.clone();
    let profile = spec.base.effective_profile();
    let cg_bound = spec.base.cg_bound;
    KnotBundle {
        label: label.into(),
        alexander,
        profile,
        cg_bound,
        infection: Some(spec),
        orientation: Orientation::default(),
        summands: Vec::new(),
    }
}

pub fn mirror(k: &KnotBundle) -> KnotBundle {
    let mut out = k.clone();
    out.orientation.mirrored = !out.orientation.mirrored;
    out
}

pub fn reverse(k: &KnotBundle) -> KnotBundle {
    let mut out = k.clone();
    out.orientation.reversed = !out.orientation.reversed;
    out
}

fn display_label(k: &KnotBundle) -> String {
    match (k.orientation.mirrored, k.orientation.reversed) {
        (false, false) => k.label.clone(),
        (true, false) => format!("-{}", k.label),
        (false, true) => format!("{}^r", k.label),
        (true, true) => format!("-{}^r", k.label),
    }
}

pub fn connected_sum(parts: &SumExpression) -> Result<KnotBundle> {
    if parts.summands.is_empty() {
        return Err(Error::EmptySum);
    }
    if parts.summands.iter().any(|(_, m)| *m == 0) {
        return Err(Error::InvalidParameter("summand multiplicity must be positive".into()));
    }
    if let [(k, 1)] = parts.summands.as_slice() {
        return Ok(k.clone());
    }
    let expanded: Vec<KnotBundle> = parts
        .summands
        .iter()
        .flat_map(|(k, m)| std::iter::repeat_n(k, *m as usize).cloned())
        .collect();
    let alexander = expanded.iter().try_fold(IntLaurentPoly::one(), |acc, k| {
        k.alexander.as_ref().map(|a| acc.mul(a))
    });
    let profile = expanded
        .iter()
        .fold(SignatureProfile::zero(), |acc, k| acc.plus(&k.effective_profile()));
    let cg_bound = expanded.iter().map(|k| k.cg_bound).max().unwrap_or(0);
    let label = parts
        .summands
        .iter()
        .map(|(k, m)| match m {
            1 => display_label(k),
            _ => format!("#^{m} {}", display_label(k)),
        })
        .collect::<Vec<_>>()
        .join(" # ");
    Ok(KnotBundle {
        label,
        alexander,
        profile,
        cg_bound,
        infection: None,
        orientation: Orientation::default(),
        summands: expanded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff_algebra::factor_cyclotomic;
    use proptest::prelude::*;

    #[test]
    fn levine_polynomials() {
        let a = levine_alexander(3, 7).unwrap();
        assert_eq!(a, IntLaurentPoly::new(0, vec![2, -5, 2]));
        assert_eq!(a.to_string(), "2t^2 - 5t + 2");
        let a = levine_alexander(5, 11).unwrap();
        assert_eq!(a, IntLaurentPoly::new(0, vec![2, 2, -9, 2, 2]));
        assert_eq!(a.eval_at_one(), -1);
        assert!(levine_alexander(3, 5).is_err());
    }

    #[test]
    fn levine_polynomials_are_symmetric() {
        for p in [3u32, 5, 7, 11, 13] {
            let sp = crate::ff_algebra::smallest_splitting_prime(p).unwrap();
            for q in [sp.q, (1..200).map(|k| k * p + 1).filter(|&q| is_prime(q as u64)).nth(1).unwrap()] {
                let a = levine_alexander(p, q).unwrap();
                assert_eq!(a.eval_at_one(), -1);
                assert!(a.is_palindromic());
            }
        }
    }

    #[test]
    fn levine_knot_bundle() {
        let k = make_levine_knot(3, 7, 0).unwrap();
        assert_eq!(k.label, "J0(3,7)");
        assert_eq!(k.cg_bound, 0);
        assert!(k.profile.is_zero());
        assert_eq!(make_levine_knot(3, 7, 4).unwrap().cg_bound, 4);
        assert_eq!(
            make_levine_knot(5, 11, 0).unwrap().alexander.unwrap().coeffs(),
            &[2, 2, -9, 2, 2]
        );
        k.validate().unwrap();
    }

    #[test]
    fn involutions() {
        let k = make_step_knot_bundle("C", 7, 2).unwrap();
        assert_eq!(mirror(&mirror(&k)), k);
        assert_eq!(reverse(&reverse(&k)), k);
        assert_eq!(mirror(&reverse(&k)), reverse(&mirror(&k)));
        assert_eq!(reverse(&k).effective_profile(), k.effective_profile());
        assert_eq!(mirror(&k).effective_profile(), k.profile.negated());
        let z = make_levine_knot(3, 7, 0).unwrap();
        assert!(mirror(&z).effective_profile().is_zero());
    }

    #[test]
    fn sums() {
        let j = make_levine_knot(3, 7, 0).unwrap();
        assert_eq!(connected_sum(&SumExpression { summands: vec![(j.clone(), 1)] }).unwrap(), j);
        let jj = connected_sum(&SumExpression { summands: vec![(j.clone(), 2)] }).unwrap();
        assert_eq!(jj.alexander.unwrap(), IntLaurentPoly::new(0, vec![4, -20, 33, -20, 4]));
        assert_eq!(connected_sum(&SumExpression { summands: vec![] }), Err(Error::EmptySum));

        let c = make_step_knot_bundle("C", 7, 2).unwrap();
        let s = connected_sum(&SumExpression {
            summands: vec![(c.clone(), 1), (mirror(&reverse(&c)), 1)],
        })
        .unwrap();
        assert!(s.effective_profile().is_zero());
        let s = connected_sum(&SumExpression {
            summands: vec![(c.clone(), 1), (mirror(&c), 1)],
        })
        .unwrap();
        assert!(s.effective_profile().is_zero());
    }

    #[test]
    fn prime_summands_compose_orientation() {
        let j = make_levine_knot(3, 7, 0).unwrap();
        let k = connected_sum(&SumExpression { summands: vec![(j.clone(), 2)] }).unwrap();
        let total = connected_sum(&SumExpression {
            summands: vec![(k.clone(), 1), (mirror(&reverse(&k)), 1)],
        })
        .unwrap();
        let flags: Vec<_> = total.prime_summands().iter().map(|(_, o)| *o).collect();
        let plain = Orientation::default();
        let mr = Orientation { mirrored: true, reversed: true };
        assert_eq!(flags, vec![plain, plain, mr, mr]);
    }

    #[test]
    fn infection_indices_are_checked() {
        let roots = factor_cyclotomic(3, 7).unwrap();
        let j = make_levine_knot(3, 7, 0).unwrap();
        let a = make_step_knot_bundle("A", 7, 2).unwrap();
        let bad = InfectionSpec::new(j.clone(), roots.clone(), [(3usize, a.clone())].into());
        assert_eq!(bad.unwrap_err(), Error::InfectionIndex(3));
        let spec = InfectionSpec::standard(j, roots, &a, &a).unwrap();
        assert_eq!(spec.eigen_assignment.len(), 2);
    }

    #[test]
    fn bundle_json_round_trip() {
        let roots = factor_cyclotomic(3, 7).unwrap();
        let j = make_levine_knot(3, 7, 2).unwrap();
        let a = make_step_knot_bundle("A", 7, 2).unwrap();
        let b = make_step_knot_bundle("B", 7, 4).unwrap();
        let jg = infect("J", InfectionSpec::standard(j, roots, &a, &b).unwrap());
        let expr = SumExpression { summands: vec![(jg.clone(), 1), (mirror(&reverse(&jg)), 1)] };
        let text = serde_json::to_string(&expr).unwrap();
        assert!(!text.contains("true") && !text.contains("false"));
        let back: SumExpression = serde_json::from_str(&text).unwrap();
        assert_eq!(back, expr);
    }

    fn arb_poly() -> impl Strategy<Value = IntLaurentPoly> {
        (-2i64..3, prop::collection::vec(-4i64..5, 1..5)).prop_map(|(o, c)| IntLaurentPoly::new(o, c))
    }

    proptest! {
        #[test]
        fn alexander_product_is_commutative_and_associative(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }

        #[test]
        fn sum_profile_is_order_independent(s1 in 1i64..5, s2 in 1i64..5, m in any::<bool>()) {
            let x = make_step_knot_bundle("X", 7, 2 * s1).unwrap();
            let y = make_step_knot_bundle("Y", 11, 2 * s2).unwrap();
            let y = if m { mirror(&y) } else { y };
            let xy = connected_sum(&SumExpression { summands: vec![(x.clone(), 1), (y.clone(), 1)] }).unwrap();
            let yx = connected_sum(&SumExpression { summands: vec![(y.clone(), 1), (x.clone(), 1)] }).unwrap();
            prop_assert_eq!(xy.effective_profile(), yx.effective_profile());
        }
    }
}
