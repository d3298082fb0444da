//! Tristram-Levine signature functions as exact step functions on the circle.
//!
//! A point `e^{2 pi i theta}` is addressed by its rational angle `theta` in
//! `[0, 1)`. A profile is a finite list of jumps; its value at `theta` is the
//! sum of the jumps strictly between `0` and `theta`, read on the upper half
//! circle and reflected onto the lower half.

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff_algebra::FieldElement;

pub type Angle = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Jump {
    pub angle: Angle,
    pub jump: i64,
}

/// Conjugate-closed jump data: a jump `j` at `theta` always comes with `-j`
/// at `1 - theta`, and every jump is even.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Jump>", into = "Vec<Jump>")]
pub struct SignatureProfile {
    jumps: Vec<Jump>,
}

impl TryFrom<Vec<Jump>> for SignatureProfile {
    type Error = Error;
    fn try_from(jumps: Vec<Jump>) -> Result<Self> {
        SignatureProfile::new(jumps)
    }
}

impl From<SignatureProfile> for Vec<Jump> {
    fn from(p: SignatureProfile) -> Self {
        p.jumps
    }
}

fn frac(theta: Angle) -> Angle {
    theta - theta.floor()
}

impl SignatureProfile {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(jumps: impl IntoIterator<Item = Jump>) -> Result<Self> {
        let mut merged: Vec<Jump> = Vec::new();
        for j in jumps {
            if j.angle <= Angle::zero() || j.angle >= Angle::one() {
                return Err(Error::InvalidSignature(format!(
                    "angle {} outside (0, 1)",
                    j.angle
                )));
            }
            if j.jump % 2 != 0 {
                return Err(Error::InvalidSignature(format!(
                    "odd jump {} at {}",
                    j.jump, j.angle
                )));
            }
            match merged.iter_mut().find(|m| m.angle == j.angle) {
                Some(m) => m.jump += j.jump,
                None => merged.push(j),
            }
        }
        merged.retain(|j| j.jump != 0);
        merged.sort_by_key(|a| a.angle);
        for j in &merged {
            let mirror = Angle::one() - j.angle;
            let partner = merged.iter().find(|m| m.angle == mirror).map(|m| m.jump);
            if partner != Some(-j.jump) {
                return Err(Error::InvalidSignature(format!(
                    "jump {} at {} has no conjugate partner",
                    j.jump, j.angle
                )));
            }
        }
        Ok(Self { jumps: merged })
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn is_zero(&self) -> bool {
        self.jumps.is_empty()
    }

    pub fn evaluate(&self, angle: Angle) -> i64 {
        let theta = frac(angle);
        let half = Ratio::new(1, 2);
        let theta = if theta > half { Angle::one() - theta } else { theta };
        self.jumps
            .iter()
            .take_while(|j| j.angle < theta)
            .map(|j| j.jump)
            .sum()
    }

    pub fn negated(&self) -> Self {
        Self {
            jumps: self
                .jumps
                .iter()
                .map(|j| Jump {
                    angle: j.angle,
                    jump: -j.jump,
                })
                .collect(),
        }
    }

    /// Pointwise sum.
    pub fn plus(&self, other: &Self) -> Self {
        Self::new(self.jumps.iter().chain(&other.jumps).copied())
            .expect("sum of conjugate-closed profiles is conjugate-closed")
    }

    /// `Some(s)` when the profile takes the value `s` at every nontrivial
    /// `q`-th root of unity (and hence 0 at 1).
    pub fn constant_on_roots(&self, q: u32) -> Option<i64> {
        let s = self.evaluate(Ratio::new(1, q as i64));
        (2..q as i64)
            .all(|k| self.evaluate(Ratio::new(k, q as i64)) == s)
            .then_some(s)
    }
}

/// Profile with a single conjugate pair of jumps placed just before `omega_q`
/// and just after its conjugate: `+sigma` at `1/q - eps`, `-sigma` at
/// `1 - 1/q + eps` with `eps = 1/(2 q^2)`.
pub fn make_step_knot(q: u32, sigma: i64) -> Result<SignatureProfile> {
    if sigma <= 0 || sigma % 2 != 0 {
        return Err(Error::InvalidSignature(format!(
            "step height {sigma} must be positive and even"
        )));
    }
    let q = q as i64;
    let eps = Ratio::new(1, 2 * q * q);
    let before = Ratio::new(1, q) - eps;
    SignatureProfile::new([
        Jump {
            angle: before,
            jump: sigma,
        },
        Jump {
            angle: Angle::one() - before,
            jump: -sigma,
        },
    ])
}

/// Signature heights for the two infection knots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaChoice {
    pub sigma_a: i64,
    pub sigma_b: i64,
    /// `2(g+1)c + 2pg`.
    pub bound_a: i64,
    /// `(g+1) p sigma_a + 2(g+1)c + 2pg`.
    pub bound_b: i64,
}

impl SigmaChoice {
    pub fn margin_a(&self, p: u32) -> i64 {
        p as i64 * self.sigma_a - self.bound_a
    }

    pub fn margin_b(&self, p: u32) -> i64 {
        p as i64 * self.sigma_b - self.bound_b
    }
}

fn least_even_above(p: i64, bound: i64) -> i64 {
    // smallest positive even s with p * s > bound
    let s = (bound.div_euclid(p) + 1).max(1);
    if s % 2 == 0 {
        s
    } else {
        s + 1
    }
}

pub fn synthesize_sigmas(p: u32, g: u32, c: u32) -> SigmaChoice {
    let (p, g, c) = (p as i64, g as i64, c as i64);
    let slack = 2 * (g + 1) * c + 2 * p * g;
    let sigma_a = least_even_above(p, slack);
    let bound_b = (g + 1) * p * sigma_a + slack;
    let sigma_b = least_even_above(p, bound_b);
    SigmaChoice {
        sigma_a,
        sigma_b,
        bound_a: slack,
        bound_b,
    }
}

/// `sum_{k=1}^{p} sigma(omega_q^{a^k chi_x})`, evaluated literally.
pub fn lift_sum(profile: &SignatureProfile, a: FieldElement, chi_x: FieldElement, p: u32) -> i64 {
    assert_eq!(a.modulus(), chi_x.modulus(), "modulus mismatch");
    let q = a.modulus() as i64;
    (1..=p as u64)
        .map(|k| {
            let exponent = (a.pow(k) * chi_x).value() as i64;
            profile.evaluate(Ratio::new(exponent, q))
        })
        .sum()
}

/// `sum_{i=1}^{n} sigma(omega_n^i)`.
pub fn total_root_sum(profile: &SignatureProfile, n: u32) -> i64 {
    (1..=n as i64)
        .map(|i| profile.evaluate(Ratio::new(i, n as i64)))
        .sum()
}
