//! Finite group kernel.
//!
//! Every group is described by a small, copyable [`GroupSpec`]; elements carry their
//! spec and a canonical `u64` representative, so element equality is representation
//! equality. Orders used by the enumeration helpers are capped at [`MAX_ORDER`].

pub(crate) mod gf2;

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

/// Largest group order the enumeration and brute-force helpers will walk.
pub const MAX_ORDER: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("group mismatch: {left} vs {right}")]
    SpecMismatch { left: GroupSpec, right: GroupSpec },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{generator} does not generate {group}")]
    BadGenerator { group: String, generator: u64 },
    #[error("{value} is not a canonical element of {spec}")]
    NotCanonical { spec: GroupSpec, value: u64 },
    #[error("matrix {0:#x} is not invertible over GF(2)")]
    NotInvertible(u64),
    #[error("{value} is not in the kernel of the projection out of {spec}")]
    NotInKernel { spec: GroupSpec, value: u64 },
    #[error("{0} is not an extension chain of sufficient depth")]
    NotExtChain(GroupSpec),
    #[error("{0} has no configured generator")]
    NoGenerator(GroupSpec),
    #[error("group order exceeds the enumeration cap of 2^20")]
    TooLarge,
    #[error("invalid group parameter: {0}")]
    InvalidParameter(String),
}

/// The shape of a group, with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupKind {
    /// `(Z/p)^*`, written multiplicatively, with a generator of order `p - 1`.
    CyclicMul { p: u64, generator: u64 },
    /// `Z/m`, written additively; `generator` defines `exp(k) = k * generator`.
    CyclicAdd { m: u64, generator: u64 },
    /// `(Z/2)^bits` under xor.
    XorVec { bits: u32 },
    /// Invertible `n x n` matrices over GF(2).
    MatGl { n: u32 },
    /// `Z/p^depth` together with its filtration `p^i Z / p^depth`.
    ExtChain { p: u64, depth: u32 },
}

/// A validated group descriptor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "GroupDescriptor", into = "GroupDescriptor")]
pub struct GroupSpec {
    kind: GroupKind,
}

/// Serialized form of a group, as written in scenario files:
/// `{ kind = "cyclic_mul", p = 7, generator = 3 }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupDescriptor {
    CyclicMul {
        p: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        generator: Option<u64>,
    },
    CyclicAdd {
        m: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        generator: Option<u64>,
    },
    XorVec {
        bits: u32,
    },
    MatGl {
        n: u32,
    },
    ExtChain {
        p: u64,
        depth: u32,
    },
}

impl TryFrom<GroupDescriptor> for GroupSpec {
    type Error = GroupError;

    fn try_from(d: GroupDescriptor) -> Result<Self, Self::Error> {
        match d {
            GroupDescriptor::CyclicMul {
                p,
                generator: Some(g),
            } => GroupSpec::cyclic_mul(p, g),
            GroupDescriptor::CyclicMul { p, generator: None } => GroupSpec::cyclic_mul_default(p),
            GroupDescriptor::CyclicAdd { m, generator } => {
                GroupSpec::cyclic_add_with_generator(m, generator.unwrap_or(1 % m.max(1)))
            }
            GroupDescriptor::XorVec { bits } => GroupSpec::xor_vec(bits),
            GroupDescriptor::MatGl { n } => GroupSpec::mat_gl(n),
            GroupDescriptor::ExtChain { p, depth } => GroupSpec::ext_chain(p, depth),
        }
    }
}

impl From<GroupSpec> for GroupDescriptor {
    fn from(s: GroupSpec) -> Self {
        match s.kind {
            GroupKind::CyclicMul { p, generator } => GroupDescriptor::CyclicMul {
                p,
                generator: Some(generator),
            },
            GroupKind::CyclicAdd { m, generator } => GroupDescriptor::CyclicAdd {
                m,
                generator: Some(generator),
            },
            GroupKind::XorVec { bits } => GroupDescriptor::XorVec { bits },
            GroupKind::MatGl { n } => GroupDescriptor::MatGl { n },
            GroupKind::ExtChain { p, depth } => GroupDescriptor::ExtChain { p, depth },
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn mod_pow(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc
}

fn checked_prime_power(p: u64, depth: u32) -> Option<u64> {
    p.checked_pow(depth).filter(|&q| q <= MAX_ORDER)
}

impl GroupSpec {
    /// `(Z/p)^*` with an explicit generator, which must have order `p - 1`.
    pub fn cyclic_mul(p: u64, generator: u64) -> Result<Self, GroupError> {
        if p > MAX_ORDER {
            return Err(GroupError::TooLarge);
        }
        if !is_prime(p) {
            return Err(GroupError::NotPrime(p));
        }
        let bad = || GroupError::BadGenerator {
            group: format!("(Z/{p})*"),
            generator,
        };
        if generator == 0 || generator >= p {
            return Err(bad());
        }
        let order = p - 1;
        if prime_factors(order)
            .into_iter()
            .any(|q| mod_pow(generator, order / q, p) == 1)
        {
            return Err(bad());
        }
        Ok(Self {
            kind: GroupKind::CyclicMul { p, generator },
        })
    }

    /// `(Z/p)^*` with its smallest primitive root.
    pub fn cyclic_mul_default(p: u64) -> Result<Self, GroupError> {
        if p > MAX_ORDER {
            return Err(GroupError::TooLarge);
        }
        if !is_prime(p) {
            return Err(GroupError::NotPrime(p));
        }
        (1..p)
            .find_map(|g| Self::cyclic_mul(p, g).ok())
            .ok_or(GroupError::NotPrime(p))
    }

    /// `Z/m` with generator 1.
    pub fn cyclic_add(m: u64) -> Result<Self, GroupError> {
        Self::cyclic_add_with_generator(m, 1 % m.max(1))
    }

    pub fn cyclic_add_with_generator(m: u64, generator: u64) -> Result<Self, GroupError> {
        if m == 0 {
            return Err(GroupError::InvalidParameter(
                "modulus must be positive".into(),
            ));
        }
        if m > MAX_ORDER {
            return Err(GroupError::TooLarge);
        }
        if generator >= m || gcd(generator, m) != 1 {
            return Err(GroupError::BadGenerator {
                group: format!("Z/{m}"),
                generator,
            });
        }
        Ok(Self {
            kind: GroupKind::CyclicAdd { m, generator },
        })
    }

    pub fn xor_vec(bits: u32) -> Result<Self, GroupError> {
        if bits == 0 || bits > 20 {
            return Err(GroupError::InvalidParameter(format!(
                "xor vector width {bits} outside 1..=20"
            )));
        }
        Ok(Self {
            kind: GroupKind::XorVec { bits },
        })
    }

    pub fn mat_gl(n: u32) -> Result<Self, GroupError> {
        if n == 0 || n > gf2::MAX_DIM {
            return Err(GroupError::InvalidParameter(format!(
                "matrix dimension {n} outside 1..={}",
                gf2::MAX_DIM
            )));
        }
        Ok(Self {
            kind: GroupKind::MatGl { n },
        })
    }

    pub fn ext_chain(p: u64, depth: u32) -> Result<Self, GroupError> {
        if !is_prime(p) {
            return Err(GroupError::NotPrime(p));
        }
        if depth == 0 {
            return Err(GroupError::InvalidParameter(
                "depth must be at least 1".into(),
            ));
        }
        checked_prime_power(p, depth).ok_or(GroupError::TooLarge)?;
        Ok(Self {
            kind: GroupKind::ExtChain { p, depth },
        })
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn order(&self) -> u64 {
        match self.kind {
            GroupKind::CyclicMul { p, .. } => p - 1,
            GroupKind::CyclicAdd { m, .. } => m,
            GroupKind::XorVec { bits } => 1 << bits,
            GroupKind::MatGl { n } => {
                (0..n).fold(1u64, |acc, i| acc.saturating_mul((1u64 << n) - (1u64 << i)))
            }
            GroupKind::ExtChain { p, depth } => p.pow(depth),
        }
    }

    pub fn is_abelian(&self) -> bool {
        !matches!(self.kind, GroupKind::MatGl { n } if n >= 2)
    }

    /// The `(p, depth)` of an extension chain.
    pub fn ext_params(&self) -> Option<(u64, u32)> {
        match self.kind {
            GroupKind::ExtChain { p, depth } => Some((p, depth)),
            _ => None,
        }
    }

    pub fn identity(&self) -> GroupElement {
        let value = match self.kind {
            GroupKind::CyclicMul { .. } => 1,
            GroupKind::MatGl { n } => gf2::identity(n),
            _ => 0,
        };
        GroupElement { spec: *self, value }
    }

    /// The configured generator used for `exp`; matrix and xor groups have none.
    pub fn generator(&self) -> Option<GroupElement> {
        let value = match self.kind {
            GroupKind::CyclicMul { generator, .. } | GroupKind::CyclicAdd { generator, .. } => {
                generator
            }
            GroupKind::ExtChain { .. } => 1,
            GroupKind::XorVec { .. } | GroupKind::MatGl { .. } => return None,
        };
        Some(GroupElement { spec: *self, value })
    }

    /// `exp(k) = generator^k` (or `k * generator` additively).
    pub fn exp(&self, k: i64) -> Result<GroupElement, GroupError> {
        self.generator()
            .map(|g| g.power(k))
            .ok_or(GroupError::NoGenerator(*self))
    }

    fn is_canonical(&self, value: u64) -> bool {
        match self.kind {
            GroupKind::CyclicMul { p, .. } => (1..p).contains(&value),
            GroupKind::CyclicAdd { m, .. } => value < m,
            GroupKind::XorVec { bits } => value < 1 << bits,
            GroupKind::MatGl { n } => {
                (n * n == 64 || value < 1u64 << (n * n)) && gf2::inverse(n, value).is_some()
            }
            GroupKind::ExtChain { p, depth } => value < p.pow(depth),
        }
    }

    /// Wraps a canonical representative; rejects anything outside canonical form.
    pub fn element(&self, value: u64) -> Result<GroupElement, GroupError> {
        if self.is_canonical(value) {
            Ok(GroupElement { spec: *self, value })
        } else if let GroupKind::MatGl { .. } = self.kind {
            Err(GroupError::NotInvertible(value))
        } else {
            Err(GroupError::NotCanonical { spec: *self, value })
        }
    }

    /// Reduces an arbitrary integer into the group (residue groups only).
    pub fn reduce(&self, value: i64) -> Result<GroupElement, GroupError> {
        let m = match self.kind {
            GroupKind::CyclicAdd { m, .. } => m,
            GroupKind::ExtChain { p, depth } => p.pow(depth),
            GroupKind::CyclicMul { p, .. } => {
                let v = value.rem_euclid(p as i64) as u64;
                return self.element(v);
            }
            _ => return self.element(value.max(0) as u64),
        };
        Ok(GroupElement {
            spec: *self,
            value: value.rem_euclid(m as i64) as u64,
        })
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> Result<Vec<GroupElement>, GroupError> {
        if self.order() > MAX_ORDER {
            return Err(GroupError::TooLarge);
        }
        let spec = *self;
        let wrap = move |value| GroupElement { spec, value };
        Ok(match self.kind {
            GroupKind::CyclicMul { p, .. } => (1..p).map(wrap).collect(),
            GroupKind::CyclicAdd { m, .. } => (0..m).map(wrap).collect(),
            GroupKind::XorVec { bits } => (0..1u64 << bits).map(wrap).collect(),
            GroupKind::MatGl { n } => (0..1u64 << (n * n))
                .filter(|&v| gf2::inverse(n, v).is_some())
                .map(wrap)
                .collect(),
            GroupKind::ExtChain { p, depth } => (0..p.pow(depth)).map(wrap).collect(),
        })
    }

    /// The `index`-th element in the order of [`GroupSpec::elements`].
    pub fn element_at(&self, index: u64) -> Result<GroupElement, GroupError> {
        if index >= self.order() {
            return Err(GroupError::InvalidParameter(format!(
                "index {index} outside a group of order {}",
                self.order()
            )));
        }
        let value = match self.kind {
            GroupKind::CyclicMul { .. } => index + 1,
            GroupKind::MatGl { n } => (0..)
                .filter(|&v| gf2::inverse(n, v).is_some())
                .nth(index as usize)
                .expect("index below the order"),
            _ => index,
        };
        Ok(GroupElement { spec: *self, value })
    }

    /// Inverse of [`GroupSpec::element_at`].
    pub fn index_of(&self, e: &GroupElement) -> u64 {
        match self.kind {
            GroupKind::CyclicMul { .. } => e.value - 1,
            GroupKind::MatGl { n } => (0..e.value)
                .filter(|&v| gf2::inverse(n, v).is_some())
                .count() as u64,
            _ => e.value,
        }
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        let value = match self.kind {
            GroupKind::CyclicMul { p, .. } => rng.random_range(1..p),
            GroupKind::CyclicAdd { m, .. } => rng.random_range(0..m),
            GroupKind::XorVec { bits } => rng.random_range(0..1u64 << bits),
            GroupKind::MatGl { n } => loop {
                let v = if n * n == 64 {
                    rng.random::<u64>()
                } else {
                    rng.random_range(0..1u64 << (n * n))
                };
                if gf2::inverse(n, v).is_some() {
                    break v;
                }
            },
            GroupKind::ExtChain { p, depth } => rng.random_range(0..p.pow(depth)),
        };
        GroupElement { spec: *self, value }
    }

    fn op(&self, a: u64, b: u64) -> u64 {
        match self.kind {
            GroupKind::CyclicMul { p, .. } => a * b % p,
            GroupKind::CyclicAdd { m, .. } => (a + b) % m,
            GroupKind::XorVec { .. } => a ^ b,
            GroupKind::MatGl { n } => gf2::mul(n, a, b),
            GroupKind::ExtChain { p, depth } => (a + b) % p.pow(depth),
        }
    }

    fn inv(&self, a: u64) -> u64 {
        match self.kind {
            GroupKind::CyclicMul { p, .. } => mod_pow(a, p - 2, p),
            GroupKind::CyclicAdd { m, .. } => (m - a) % m,
            GroupKind::XorVec { .. } => a,
            GroupKind::MatGl { n } => {
                gf2::inverse(n, a).expect("canonical matrices are invertible")
            }
            GroupKind::ExtChain { p, depth } => {
                let q = p.pow(depth);
                (q - a) % q
            }
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GroupKind::CyclicMul { p, generator } => write!(f, "(Z/{p})* <{generator}>"),
            GroupKind::CyclicAdd { m, .. } => write!(f, "Z/{m}"),
            GroupKind::XorVec { bits } => write!(f, "(Z/2)^{bits}"),
            GroupKind::MatGl { n } => write!(f, "GL({n},2)"),
            GroupKind::ExtChain { p, depth } => write!(f, "Z/{p}^{depth}"),
        }
    }
}

/// An element of a finite group in canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    spec: GroupSpec,
    value: u64,
}

impl GroupElement {
    pub fn spec(&self) -> GroupSpec {
        self.spec
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn is_identity(&self) -> bool {
        *self == self.spec.identity()
    }

    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement, GroupError> {
        if self.spec != other.spec {
            return Err(GroupError::SpecMismatch {
                left: self.spec,
                right: other.spec,
            });
        }
        Ok(GroupElement {
            spec: self.spec,
            value: self.spec.op(self.value, other.value),
        })
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            spec: self.spec,
            value: self.spec.inv(self.value),
        }
    }

    /// `self^e` by square-and-multiply; negative exponents invert first.
    pub fn power(&self, e: i64) -> GroupElement {
        let (mut base, mut e) = if e < 0 {
            (self.inverse(), e.unsigned_abs())
        } else {
            (*self, e as u64)
        };
        let mut acc = self.spec.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Reduction `Z/p^k -> Z/p^(k-1)`.
    pub fn ext_project(&self) -> Result<GroupElement, GroupError> {
        match self.spec.ext_params() {
            Some((p, depth)) if depth >= 2 => {
                let spec = GroupSpec::ext_chain(p, depth - 1)?;
                Ok(GroupElement {
                    spec,
                    value: self.value % p.pow(depth - 1),
                })
            }
            _ => Err(GroupError::NotExtChain(self.spec)),
        }
    }

    /// Canonical section `Z/p^k -> Z/p^(k+1)`, keeping the representative in `[0, p^k)`.
    pub fn ext_lift(&self) -> Result<GroupElement, GroupError> {
        let (_, depth) = self
            .spec
            .ext_params()
            .ok_or(GroupError::NotExtChain(self.spec))?;
        self.lift_to(depth + 1)
    }

    /// Iterated canonical section into `Z/p^depth`.
    pub fn lift_to(&self, depth: u32) -> Result<GroupElement, GroupError> {
        match self.spec.ext_params() {
            Some((p, d)) if depth >= d => Ok(GroupElement {
                spec: GroupSpec::ext_chain(p, depth)?,
                value: self.value,
            }),
            _ => Err(GroupError::NotExtChain(self.spec)),
        }
    }

    /// Identifies the kernel `p^(k-1) Z / p^k` with `Z/p`.
    pub fn ext_kernel_div(&self) -> Result<GroupElement, GroupError> {
        let (p, depth) = self
            .spec
            .ext_params()
            .ok_or(GroupError::NotExtChain(self.spec))?;
        let step = p.pow(depth - 1);
        if !self.value.is_multiple_of(step) {
            return Err(GroupError::NotInKernel {
                spec: self.spec,
                value: self.value,
            });
        }
        Ok(GroupElement {
            spec: GroupSpec::ext_chain(p, 1)?,
            value: self.value / step,
        })
    }
}

impl std::ops::Mul for GroupElement {
    type Output = GroupElement;

    /// Group law. Panics when the operands belong to different groups; use
    /// [`GroupElement::compose`] for a fallible version.
    fn mul(self, rhs: GroupElement) -> GroupElement {
        self.compose(&rhs)
            .expect("composing elements of different groups")
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(self.value)
    }
}

/// Least `e` in `[0, bound)` with `base^e = target`, by exhaustive scan.
pub fn discrete_log(base: &GroupElement, target: &GroupElement, bound: u64) -> Option<u64> {
    if base.spec != target.spec {
        return None;
    }
    let mut acc = base.spec.identity();
    for e in 0..bound {
        if acc == *target {
            return Some(e);
        }
        acc = acc * *base;
    }
    None
}
