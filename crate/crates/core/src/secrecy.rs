//! Exact ciphertext distributions, perfect secrecy and entropy along paths.
//!
//! Plaintexts at every node and keys on every hop are chosen independently. A path
//! event is a chain `(P_1, u_1), ..., (P_h, u_h)` with `u_p(P_p) = P_(p+1)` and final
//! cipher `C = u_h(P_h)`; the joint law is the product law conditioned on the chain
//! being consistent.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::groups::{GroupError, GroupSpec};

/// Enumeration bound on the product outcome space.
pub const MAX_OUTCOMES: u64 = 1 << 24;

/// Absolute tolerance of the floating point entropy identities.
pub const ENTROPY_TOLERANCE: f64 = 1e-9;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SecrecyError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("outcome space of size {0} exceeds the enumeration bound")]
    TooLarge(u128),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("key {key} of hop {hop} is not a bijection of the fibre")]
    NotBijective { hop: usize, key: usize },
    #[error("fibre has {fiber} elements but hop {hop} has {keys} keys")]
    SizeMismatch {
        hop: usize,
        fiber: usize,
        keys: usize,
    },
    #[error("malformed model: {0}")]
    Shape(String),
    #[error("no consistent chain has positive probability")]
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalRepr {
    pub num: String,
    pub den: String,
}

impl From<&Rational> for RationalRepr {
    fn from(r: &Rational) -> Self {
        Self {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

pub fn serialize_rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    RationalRepr::from(r).serialize(s)
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Probability law on the outcomes `0..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    probs: Vec<Rational>,
}

impl Serialize for Distribution {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.probs.len()))?;
        for p in &self.probs {
            seq.serialize_element(&RationalRepr::from(p))?;
        }
        seq.end()
    }
}

impl Distribution {
    pub fn new(probs: Vec<Rational>) -> Result<Self, SecrecyError> {
        if probs.is_empty() {
            return Err(SecrecyError::InvalidDistribution("no outcomes".into()));
        }
        if let Some(p) = probs.iter().find(|p| p.is_negative()) {
            return Err(SecrecyError::InvalidDistribution(format!(
                "negative probability {p}"
            )));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(SecrecyError::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { probs })
    }

    pub fn from_ratios(ratios: &[(i64, i64)]) -> Result<Self, SecrecyError> {
        if ratios.iter().any(|&(_, d)| d == 0) {
            return Err(SecrecyError::InvalidDistribution("zero denominator".into()));
        }
        Self::new(ratios.iter().map(|&(n, d)| ratio(n, d)).collect())
    }

    pub fn uniform(len: usize) -> Self {
        Self {
            probs: vec![ratio(1, len as i64); len],
        }
    }

    pub fn point(len: usize, at: usize) -> Self {
        let mut probs = vec![Rational::zero(); len];
        probs[at] = Rational::one();
        Self { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, i: usize) -> &Rational {
        &self.probs[i]
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn is_uniform(&self) -> bool {
        let u = ratio(1, self.len() as i64);
        self.probs.iter().all(|p| *p == u)
    }

    pub fn full_support(&self) -> bool {
        self.probs.iter().all(|p| p.is_positive())
    }
}

/// A hop: a law on keys and, per key, the induced bijection of the fibre.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hop {
    pub keys: Distribution,
    /// `table[k][p]` is the image of plaintext `p` under key `k`.
    pub table: Vec<Vec<usize>>,
}

impl Hop {
    /// Keys acting on the group itself by left translation.
    pub fn translation(group: GroupSpec, keys: Distribution) -> Result<Self, SecrecyError> {
        let elems = group.elements()?;
        if keys.len() != elems.len() {
            return Err(SecrecyError::Shape(format!(
                "key law has {} outcomes, group has {}",
                keys.len(),
                elems.len()
            )));
        }
        let table = elems
            .iter()
            .map(|k| {
                elems
                    .iter()
                    .map(|p| group.index_of(&(*k * *p)) as usize)
                    .collect()
            })
            .collect();
        Ok(Self { keys, table })
    }

    /// `M[p][q] = Pr(u(p) = q)`.
    fn kernel(&self, m: usize) -> Vec<Vec<Rational>> {
        let mut out = vec![vec![Rational::zero(); m]; m];
        for (k, row) in self.table.iter().enumerate() {
            let d = self.keys.prob(k);
            if d.is_zero() {
                continue;
            }
            for (p, &q) in row.iter().enumerate() {
                out[p][q] += d;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathModel {
    nodes: Vec<String>,
    fiber: usize,
    plaintexts: Vec<Distribution>,
    hops: Vec<Hop>,
}

impl PathModel {
    /// `plaintexts[p]` is the law at the sender of hop `p`; `nodes` has one more entry
    /// than `hops`.
    pub fn new(
        nodes: Vec<String>,
        fiber: usize,
        plaintexts: Vec<Distribution>,
        hops: Vec<Hop>,
    ) -> Result<Self, SecrecyError> {
        if hops.is_empty() {
            return Err(SecrecyError::Shape("a path needs at least one hop".into()));
        }
        if plaintexts.len() != hops.len() || nodes.len() != hops.len() + 1 {
            return Err(SecrecyError::Shape(format!(
                "{} nodes, {} plaintext laws, {} hops",
                nodes.len(),
                plaintexts.len(),
                hops.len()
            )));
        }
        if let Some(d) = plaintexts.iter().find(|d| d.len() != fiber) {
            return Err(SecrecyError::Shape(format!(
                "plaintext law over {} outcomes on a fibre of {fiber}",
                d.len()
            )));
        }
        for (h, hop) in hops.iter().enumerate() {
            if hop.table.len() != hop.keys.len() {
                return Err(SecrecyError::Shape(format!(
                    "hop {h}: table and key law differ in size"
                )));
            }
            for (k, row) in hop.table.iter().enumerate() {
                let mut seen = vec![false; fiber];
                if row.len() != fiber {
                    return Err(SecrecyError::NotBijective { hop: h, key: k });
                }
                for &q in row {
                    if q >= fiber || seen[q] {
                        return Err(SecrecyError::NotBijective { hop: h, key: k });
                    }
                    seen[q] = true;
                }
            }
        }
        let size = hops.iter().fold(1u128, |acc, h| {
            acc.saturating_mul((h.keys.len() * fiber) as u128)
        });
        let tuples = (fiber as u128).saturating_pow(hops.len() as u32 + 1);
        if size.max(tuples) > MAX_OUTCOMES as u128 {
            return Err(SecrecyError::TooLarge(size.max(tuples)));
        }
        Ok(Self {
            nodes,
            fiber,
            plaintexts,
            hops,
        })
    }

    /// Every hop translates by a key of `group`, which is also the fibre.
    pub fn translation(
        group: GroupSpec,
        nodes: Vec<String>,
        plaintexts: Vec<Distribution>,
        keys: Vec<Distribution>,
    ) -> Result<Self, SecrecyError> {
        let hops = keys
            .into_iter()
            .map(|d| Hop::translation(group, d))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(nodes, group.order() as usize, plaintexts, hops)
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn fiber(&self) -> usize {
        self.fiber
    }

    pub fn plaintexts(&self) -> &[Distribution] {
        &self.plaintexts
    }

    pub fn hops(&self) -> &[Hop] {
        &self.hops
    }

    /// The one-hop model of hop `p`.
    pub fn hop_model(&self, p: usize) -> PathModel {
        PathModel {
            nodes: self.nodes[p..p + 2].to_vec(),
            fiber: self.fiber,
            plaintexts: vec![self.plaintexts[p].clone()],
            hops: vec![self.hops[p].clone()],
        }
    }

    /// Unnormalized weights `w[t][c]` over plaintext tuples `t` (mixed radix, first
    /// node most significant) and ciphers `c`.
    fn weights(&self) -> Vec<Vec<Rational>> {
        let m = self.fiber;
        let h = self.hops.len();
        let kernels: Vec<_> = self.hops.iter().map(|hop| hop.kernel(m)).collect();
        let tuples = m.pow(h as u32);
        let mut out = Vec::with_capacity(tuples);
        let mut digits = vec![0usize; h];
        for _ in 0..tuples {
            let mut w = Rational::one();
            for p in 0..h {
                w *= self.plaintexts[p].prob(digits[p]);
                if p + 1 < h {
                    w *= &kernels[p][digits[p]][digits[p + 1]];
                }
                if w.is_zero() {
                    break;
                }
            }
            let last = &kernels[h - 1][digits[h - 1]];
            out.push((0..m).map(|c| &w * &last[c]).collect());
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < m {
                    break;
                }
                *d = 0;
            }
        }
        out
    }

    fn tuple_digits(&self, mut t: usize) -> Vec<usize> {
        let h = self.hops.len();
        let mut digits = vec![0; h];
        for p in (0..h).rev() {
            digits[p] = t % self.fiber;
            t /= self.fiber;
        }
        digits
    }
}

/// Law of the cipher received at the end of the path.
pub fn ciphertext_dist(m: &PathModel) -> Result<Distribution, SecrecyError> {
    let w = m.weights();
    let mut totals = vec![Rational::zero(); m.fiber];
    for row in &w {
        for (c, v) in row.iter().enumerate() {
            totals[c] += v;
        }
    }
    let z: Rational = totals.iter().sum();
    if z.is_zero() {
        return Err(SecrecyError::Inconsistent);
    }
    Distribution::new(totals.into_iter().map(|t| t / &z).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SecrecyWitness {
    pub plaintexts: Vec<usize>,
    pub cipher: usize,
    #[serde(serialize_with = "serialize_rational")]
    pub posterior: Rational,
    #[serde(serialize_with = "serialize_rational")]
    pub prior: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SecrecyVerdict {
    pub perfect: bool,
    pub witness: Option<SecrecyWitness>,
}

/// Perfect secrecy: for every cipher `C` of positive probability and every plaintext
/// tuple, `Pr(tuple | C)` equals the product of the node laws.
pub fn perfect_secrecy_path(m: &PathModel) -> Result<SecrecyVerdict, SecrecyError> {
    let w = m.weights();
    let mut totals = vec![Rational::zero(); m.fiber];
    for row in &w {
        for (c, v) in row.iter().enumerate() {
            totals[c] += v;
        }
    }
    if totals.iter().all(|t| t.is_zero()) {
        return Err(SecrecyError::Inconsistent);
    }
    for (c, total) in totals.iter().enumerate() {
        if total.is_zero() {
            continue;
        }
        for (t, row) in w.iter().enumerate() {
            let digits = m.tuple_digits(t);
            let prior: Rational = digits
                .iter()
                .enumerate()
                .map(|(p, &d)| m.plaintexts[p].prob(d).clone())
                .product();
            let posterior = &row[c] / total;
            if posterior != prior {
                return Ok(SecrecyVerdict {
                    perfect: false,
                    witness: Some(SecrecyWitness {
                        plaintexts: digits,
                        cipher: c,
                        posterior,
                        prior,
                    }),
                });
            }
        }
    }
    Ok(SecrecyVerdict {
        perfect: true,
        witness: None,
    })
}

/// Perfect secrecy of every hop taken alone.
pub fn perfect_secrecy_nodes(m: &PathModel) -> Result<Vec<SecrecyVerdict>, SecrecyError> {
    (0..m.hops.len())
        .map(|p| perfect_secrecy_path(&m.hop_model(p)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShannonReport {
    /// Per hop: every key has probability `1/|K|`.
    pub uniform_keys: Vec<bool>,
    /// Per hop: each pair `(P, P')` is joined by exactly one key.
    pub unique_transitive: Vec<bool>,
    pub holds: bool,
    /// Verdict of the exact check, computed when both conditions hold.
    pub perfect_secrecy: Option<bool>,
}

pub fn shannon_conditions(m: &PathModel) -> Result<ShannonReport, SecrecyError> {
    let f = m.fiber;
    for (h, hop) in m.hops.iter().enumerate() {
        if hop.keys.len() != f {
            return Err(SecrecyError::SizeMismatch {
                hop: h,
                fiber: f,
                keys: hop.keys.len(),
            });
        }
    }
    let uniform_keys: Vec<bool> = m.hops.iter().map(|h| h.keys.is_uniform()).collect();
    let unique_transitive: Vec<bool> = m
        .hops
        .iter()
        .map(|hop| {
            let mut count = vec![vec![0usize; f]; f];
            for row in &hop.table {
                for (p, &q) in row.iter().enumerate() {
                    count[p][q] += 1;
                }
            }
            count.iter().all(|r| r.iter().all(|&c| c == 1))
        })
        .collect();
    let holds = uniform_keys.iter().chain(&unique_transitive).all(|&b| b);
    let perfect_secrecy = if holds {
        Some(perfect_secrecy_path(m)?.perfect)
    } else {
        None
    };
    Ok(ShannonReport {
        uniform_keys,
        unique_transitive,
        holds,
        perfect_secrecy,
    })
}

fn h_term(p: &Rational) -> f64 {
    let x = p.to_f64().unwrap_or(0.0);
    if x > 0.0 {
        -x * x.ln()
    } else {
        0.0
    }
}

/// Shannon entropy in nats.
pub fn entropy(d: &Distribution) -> f64 {
    d.probs.iter().map(h_term).sum()
}

fn entropy_of(probs: &[Rational]) -> f64 {
    probs.iter().map(h_term).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CondEntropyReport {
    /// `H(V | C)` from the joint law of key and cipher.
    pub direct: f64,
    /// `H(V) + H(P_in) - H(P_out)`.
    pub identity: f64,
    pub agree: bool,
}

/// Conditional entropy of the key given the cipher on one hop fed by `plain`.
pub fn cond_entropy_key_given_cipher(plain: &Distribution, hop: &Hop) -> CondEntropyReport {
    let f = plain.len();
    let k = hop.keys.len();
    let mut joint = vec![vec![Rational::zero(); f]; k];
    let mut cipher = vec![Rational::zero(); f];
    for (key, row) in hop.table.iter().enumerate() {
        for (p, &c) in row.iter().enumerate() {
            let w = hop.keys.prob(key) * plain.prob(p);
            joint[key][c] += &w;
            cipher[c] += w;
        }
    }
    let mut direct = 0.0;
    for (c, pc) in cipher.iter().enumerate() {
        if pc.is_zero() {
            continue;
        }
        let cond: Vec<Rational> = (0..k).map(|key| &joint[key][c] / pc).collect();
        direct += pc.to_f64().unwrap_or(0.0) * entropy_of(&cond);
    }
    let identity = entropy(&hop.keys) + entropy(plain) - entropy_of(&cipher);
    CondEntropyReport {
        direct,
        identity,
        agree: (direct - identity).abs() <= ENTROPY_TOLERANCE,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyCocycleReport {
    pub h_ij: f64,
    pub h_jl: f64,
    /// Entropy of the product space of key pairs.
    pub h_il_product: f64,
    pub additive: bool,
    /// Entropy of the law of the composed key.
    pub h_il_collapsed: f64,
    pub collapsed_differs: bool,
    /// `H(V_lj | P_l) - H(V_li | P_l) + H(V_ji | P_j)` from the definitions.
    pub conditional_cocycle_direct: f64,
    /// The same sum through `H(V|P_out) = H(V) + H(P_in) - H(P_out)`.
    pub conditional_cocycle_identity: f64,
    pub conditional_cocycle_holds: bool,
}

/// Entropy cocycle relations on a triangle `i -> j -> l` whose hops translate by
/// `group` with key laws `first` and `second`, fed by the plaintext law `plain` at `i`.
pub fn entropy_cocycle_check(
    group: GroupSpec,
    first: &Distribution,
    second: &Distribution,
    plain: &Distribution,
) -> Result<EntropyCocycleReport, SecrecyError> {
    let elems = group.elements()?;
    let n = elems.len();
    if first.len() != n || second.len() != n || plain.len() != n {
        return Err(SecrecyError::Shape("laws must range over the group".into()));
    }
    let hop1 = Hop::translation(group, first.clone())?;
    let hop2 = Hop::translation(group, second.clone())?;

    let h_ij = entropy(first);
    let h_jl = entropy(second);
    let product: Vec<Rational> = first
        .probs
        .iter()
        .flat_map(|a| second.probs.iter().map(move |b| a * b))
        .collect();
    let h_il_product = entropy_of(&product);

    let mut collapsed = vec![Rational::zero(); n];
    for (a, pa) in elems.iter().zip(&first.probs) {
        for (b, pb) in elems.iter().zip(&second.probs) {
            collapsed[group.index_of(&(*b * *a)) as usize] += pa * pb;
        }
    }
    let h_il_collapsed = entropy_of(&collapsed);

    // the pair hop i -> l on the product key space
    let pair_table: Vec<Vec<usize>> = hop1
        .table
        .iter()
        .flat_map(|r1| {
            hop2.table
                .iter()
                .map(move |r2| r1.iter().map(|&q| r2[q]).collect())
        })
        .collect();
    let pair_hop = Hop {
        keys: Distribution::new(product)?,
        table: pair_table,
    };
    let p_j = push(plain, &hop1);
    let c_ji = cond_entropy_key_given_cipher(plain, &hop1);
    let c_lj = cond_entropy_key_given_cipher(&p_j, &hop2);
    let c_li = cond_entropy_key_given_cipher(plain, &pair_hop);
    let direct = c_lj.direct - c_li.direct + c_ji.direct;
    let identity = c_lj.identity - c_li.identity + c_ji.identity;

    Ok(EntropyCocycleReport {
        h_ij,
        h_jl,
        h_il_product,
        additive: (h_il_product - h_ij - h_jl).abs() <= ENTROPY_TOLERANCE,
        h_il_collapsed,
        collapsed_differs: (h_il_collapsed - h_il_product).abs() > ENTROPY_TOLERANCE,
        conditional_cocycle_direct: direct,
        conditional_cocycle_identity: identity,
        conditional_cocycle_holds: direct.abs() <= ENTROPY_TOLERANCE
            && identity.abs() <= ENTROPY_TOLERANCE,
    })
}

/// Law of `u(P)` for independent `u` and `P`.
fn push(plain: &Distribution, hop: &Hop) -> Distribution {
    let mut out = vec![Rational::zero(); plain.len()];
    for (key, row) in hop.table.iter().enumerate() {
        for (p, &c) in row.iter().enumerate() {
            out[c] += hop.keys.prob(key) * plain.prob(p);
        }
    }
    Distribution { probs: out }
}
