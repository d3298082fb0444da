//! Prime fields `F_q`, polynomials over them, and the splitting of the
//! cyclotomic polynomial `Phi_p` over `F_q` when `q = 1 (mod p)`.
//!
//! Everything here is exact integer arithmetic.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn is_odd_prime(n: u64) -> bool {
    n != 2 && is_prime(n)
}

/// Arithmetic context for the prime field `F_q` with `q` odd.
///
/// Residues are plain `u32` values in `[0, q)`; the hot loops of the verifier
/// work on these directly rather than on [`FieldElement`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Fq {
    q: u32,
}

impl TryFrom<u32> for Fq {
    type Error = Error;
    fn try_from(q: u32) -> Result<Self> {
        Fq::new(q)
    }
}

impl From<Fq> for u32 {
    fn from(f: Fq) -> u32 {
        f.q
    }
}

impl Fq {
    pub fn new(q: u32) -> Result<Self> {
        if !is_odd_prime(q as u64) {
            return Err(Error::InvalidModulus(q as u64));
        }
        Ok(Self { q })
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.q
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.q as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.q as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.q as u64 - b as u64) % self.q as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub fn pow(self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.q;
        let mut acc = 1 % self.q;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(self, a: u32) -> Result<u32> {
        if a.is_multiple_of(self.q) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.q as u64 - 2))
    }

    pub fn elem(self, v: i64) -> FieldElement {
        FieldElement {
            value: self.reduce(v),
            modulus: self.q,
        }
    }
}

/// An element of `F_q`, carrying its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement {
    value: u32,
    modulus: u32,
}

impl FieldElement {
    pub fn new(value: i64, modulus: u32) -> Result<Self> {
        Ok(Fq::new(modulus)?.elem(value))
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn field(self) -> Fq {
        Fq { q: self.modulus }
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, e: u64) -> Self {
        Self {
            value: self.field().pow(self.value, e),
            modulus: self.modulus,
        }
    }

    pub fn inv(self) -> Result<Self> {
        ff_inv(self)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident) => {
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                assert_eq!(self.modulus, rhs.modulus, "modulus mismatch in F_q arithmetic");
                FieldElement {
                    value: self.field().$method(self.value, rhs.value),
                    modulus: self.modulus,
                }
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            value: self.field().neg(self.value),
            modulus: self.modulus,
        }
    }
}

/// Multiplicative inverse in `F_q`.
pub fn ff_inv(x: FieldElement) -> Result<FieldElement> {
    Ok(FieldElement {
        value: x.field().inv(x.value)?,
        modulus: x.modulus,
    })
}

/// A polynomial over `F_q`, coefficients in ascending degree, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyOverField {
    field: Fq,
    coeffs: Vec<u32>,
}

impl PolyOverField {
    pub fn new(field: Fq, coeffs: impl IntoIterator<Item = u32>) -> Self {
        let coeffs = coeffs.into_iter().map(|c| c % field.modulus()).collect();
        let mut poly = Self { field, coeffs };
        poly.trim();
        poly
    }

    pub fn from_ints(field: Fq, coeffs: &[i64]) -> Self {
        Self::new(field, coeffs.iter().map(|&c| field.reduce(c)))
    }

    pub fn zero(field: Fq) -> Self {
        Self {
            field,
            coeffs: Vec::new(),
        }
    }

    /// `t - a`.
    pub fn linear(field: Fq, a: u32) -> Self {
        Self::new(field, [field.neg(a % field.modulus()), 1])
    }

    /// `Phi_p(t) = t^(p-1) + ... + t + 1`.
    pub fn cyclotomic(field: Fq, p: u32) -> Self {
        Self::new(field, std::iter::repeat_n(1, p as usize))
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> Fq {
        self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.field, other.field, "modulus mismatch");
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.field);
        }
        let f = self.field;
        let mut out = vec![0u32; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Self::new(f, out)
    }

    pub fn eval_residue(&self, x: u32) -> u32 {
        let f = self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }
}

/// Horner evaluation.
pub fn poly_eval(f: &PolyOverField, x: FieldElement) -> Result<FieldElement> {
    if f.field.modulus() != x.modulus() {
        return Err(Error::ModulusMismatch(f.field.modulus(), x.modulus()));
    }
    Ok(FieldElement {
        value: f.eval_residue(x.value()),
        modulus: x.modulus(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingPrime {
    pub q: u32,
    /// `(q - 1) / p`.
    pub k: u32,
}

/// Least prime `q` with `q = 1 (mod p)`.
pub fn smallest_splitting_prime(p: u32) -> Result<SplittingPrime> {
    if !is_odd_prime(p as u64) {
        return Err(Error::InvalidBasePrime(p as u64));
    }
    (1u64..)
        .map(|k| (k, k * p as u64 + 1))
        .find(|&(_, q)| is_prime(q))
        .and_then(|(k, q)| {
            Some(SplittingPrime {
                q: u32::try_from(q).ok()?,
                k: k as u32,
            })
        })
        .ok_or(Error::InvalidBasePrime(p as u64))
}

/// The `p - 1` roots of `Phi_p` in `F_q`, indexed so that `a_{p-j} = a_j^{-1}`.
///
/// `a_j = zeta^j` where `zeta` is the least residue that is a root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairedRoots {
    p: u32,
    field: Fq,
    roots: Vec<u32>,
}

impl PairedRoots {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn field(&self) -> Fq {
        self.field
    }

    /// Residues `a_1, ..., a_{p-1}`.
    pub fn residues(&self) -> &[u32] {
        &self.roots
    }

    /// `a_j` for `1 <= j <= p - 1`.
    pub fn root(&self, j: usize) -> Option<u32> {
        j.checked_sub(1).and_then(|i| self.roots.get(i)).copied()
    }

    pub fn element(&self, j: usize) -> Option<FieldElement> {
        self.root(j).map(|v| FieldElement {
            value: v,
            modulus: self.field.modulus(),
        })
    }

    /// Index of the inverse root: `j -> p - j`.
    pub fn partner(&self, j: usize) -> usize {
        self.p as usize - j
    }

    pub fn index_of(&self, value: u32) -> Option<usize> {
        self.roots.iter().position(|&r| r == value).map(|i| i + 1)
    }
}

pub fn factor_cyclotomic(p: u32, q: u32) -> Result<PairedRoots> {
    if !is_odd_prime(p as u64) {
        return Err(Error::InvalidBasePrime(p as u64));
    }
    let field = Fq::new(q)?;
    if q % p != 1 {
        return Err(Error::CyclotomicDoesNotSplit { p, q });
    }
    let phi = PolyOverField::cyclotomic(field, p);
    let found: Vec<u32> = (1..q).filter(|&a| phi.eval_residue(a) == 0).collect();
    if found.len() != p as usize - 1 {
        return Err(Error::RepeatedRoot { p, q });
    }
    let zeta = found[0];
    let roots: Vec<u32> = (1..p as u64).map(|j| field.pow(zeta, j)).collect();

    let mut sorted = roots.clone();
    sorted.sort_unstable();
    if sorted != found {
        return Err(Error::RepeatedRoot { p, q });
    }
    let product = roots
        .iter()
        .fold(PolyOverField::new(field, [1]), |acc, &a| {
            acc.mul(&PolyOverField::linear(field, a))
        });
    if product != phi {
        return Err(Error::RepeatedRoot { p, q });
    }
    Ok(PairedRoots { p, field, roots })
}
