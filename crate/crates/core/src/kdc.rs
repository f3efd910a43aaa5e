//! Key distribution center.
//!
//! The center `D` shares a master key `u_id` with every user `i`. A session between
//! `i` and `j` takes three messages: a request from `i` to `D` naming both parties, a
//! reply carrying `u_ji` back to `i`, and a push carrying `u_ij` and `i`'s identifier
//! to `j`. Encryption under a key `k` translates every block: `c = k * m`.
//!
//! There are no nonces or freshness checks, so recorded replies can be replayed.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::groups::{GroupElement, GroupError, GroupSpec};
use crate::network::Network;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KdcError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("unknown user `{0}`")]
    UnknownUser(String),
    #[error("a user cannot open a session with itself")]
    SelfSession,
    #[error("the center has no edge to `{0}`")]
    NotInitial(String),
    #[error("master keys: {0}")]
    MasterKeys(String),
    #[error("ciphertext is not a whole number of blocks")]
    Malformed,
    #[error("cost parameters out of range: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Purpose {
    Request,
    ReplyToInitiator,
    PushToResponder,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MessageRecord {
    pub from: usize,
    pub to: usize,
    pub purpose: Purpose,
    /// Encrypted blocks, eight little-endian bytes each.
    pub ciphertext: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Session {
    pub initiator: usize,
    pub responder: usize,
    /// `u_ij` as drawn by the center.
    pub key: GroupElement,
    /// What the initiator decrypts from the reply: `u_ji`.
    pub initiator_view: GroupElement,
    /// What the responder decrypts from the push: `u_ij`.
    pub responder_view: GroupElement,
}

#[derive(Debug, Clone)]
pub struct KdcState {
    network: Network,
    center: usize,
    spec: GroupSpec,
    master_keys: BTreeMap<usize, GroupElement>,
    log: Vec<MessageRecord>,
}

fn encode(blocks: &[GroupElement]) -> Vec<u8> {
    blocks
        .iter()
        .flat_map(|b| b.value().to_le_bytes())
        .collect()
}

impl KdcState {
    pub fn new(
        network: Network,
        center: usize,
        master_keys: BTreeMap<usize, GroupElement>,
    ) -> Result<Self, KdcError> {
        if center >= network.vertex_count() {
            return Err(KdcError::UnknownUser(format!("#{center}")));
        }
        let spec = master_keys
            .values()
            .next()
            .map(|k| k.spec())
            .ok_or_else(|| KdcError::MasterKeys("no master keys".into()))?;
        for v in 0..network.vertex_count() {
            if v == center {
                if master_keys.contains_key(&v) {
                    return Err(KdcError::MasterKeys(
                        "the center holds no master key of its own".into(),
                    ));
                }
                continue;
            }
            if !network.adjacent(center, v) {
                return Err(KdcError::NotInitial(network.name(v).to_string()));
            }
            match master_keys.get(&v) {
                None => {
                    return Err(KdcError::MasterKeys(format!(
                        "`{}` has none",
                        network.name(v)
                    )))
                }
                Some(k) if k.spec() != spec => {
                    return Err(KdcError::MasterKeys(
                        "master keys live in different groups".into(),
                    ))
                }
                Some(_) => {}
            }
        }
        if let Some(&bad) = master_keys.keys().find(|&&v| v >= network.vertex_count()) {
            return Err(KdcError::UnknownUser(format!("#{bad}")));
        }
        Ok(Self {
            network,
            center,
            spec,
            master_keys,
            log: Vec::new(),
        })
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn spec(&self) -> GroupSpec {
        self.spec
    }

    pub fn log(&self) -> &[MessageRecord] {
        &self.log
    }

    pub fn master_key(&self, user: usize) -> Option<GroupElement> {
        self.master_keys.get(&user).copied()
    }

    /// Fixed-width identifier of a user: the `(index + 1)`-th group element, wrapping.
    pub fn identifier(&self, user: usize) -> GroupElement {
        let idx = (user as u64 + 1) % self.spec.order();
        self.spec
            .element_at(idx)
            .expect("index reduced below the order")
    }

    fn user(&self, v: usize) -> Result<GroupElement, KdcError> {
        self.master_keys.get(&v).copied().ok_or_else(|| {
            KdcError::UnknownUser(
                self.network
                    .vertices()
                    .get(v)
                    .cloned()
                    .unwrap_or(format!("#{v}")),
            )
        })
    }

    fn record(
        &mut self,
        from: usize,
        to: usize,
        purpose: Purpose,
        key: GroupElement,
        plain: &[GroupElement],
    ) {
        let blocks: Vec<_> = plain.iter().map(|&m| key * m).collect();
        self.log.push(MessageRecord {
            from,
            to,
            purpose,
            ciphertext: encode(&blocks),
        });
    }

    /// Runs the three-message protocol; the session key is drawn from a ChaCha8
    /// stream seeded with `seed`.
    pub fn establish_session(
        &mut self,
        initiator: usize,
        responder: usize,
        seed: u64,
    ) -> Result<Session, KdcError> {
        let ki = self.user(initiator)?;
        let kj = self.user(responder)?;
        if initiator == responder {
            return Err(KdcError::SelfSession);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u_ij = self.spec.random(&mut rng);
        let u_ji = u_ij.inverse();
        let (id_i, id_j) = (self.identifier(initiator), self.identifier(responder));
        let d = self.center;
        let start = self.log.len();
        self.record(initiator, d, Purpose::Request, ki, &[id_i, id_j]);
        self.record(d, initiator, Purpose::ReplyToInitiator, ki, &[u_ji]);
        self.record(d, responder, Purpose::PushToResponder, kj, &[u_ij, id_i]);
        let initiator_view = decrypt(self.spec, &self.log[start + 1], &ki)?[0];
        let responder_view = decrypt(self.spec, &self.log[start + 2], &kj)?[0];
        Ok(Session {
            initiator,
            responder,
            key: u_ij,
            initiator_view,
            responder_view,
        })
    }
}

/// Decrypts a logged message under `key`: `m = key^-1 * c` per block.
pub fn decrypt(
    spec: GroupSpec,
    record: &MessageRecord,
    key: &GroupElement,
) -> Result<Vec<GroupElement>, KdcError> {
    if !record.ciphertext.len().is_multiple_of(8) {
        return Err(KdcError::Malformed);
    }
    let inv = key.inverse();
    record
        .ciphertext
        .chunks_exact(8)
        .map(|c| {
            let v = u64::from_le_bytes(c.try_into().expect("chunk of eight"));
            Ok(inv * spec.element(v)?)
        })
        .collect()
}

/// Master keys consistent with an observed record, optionally given the plaintext.
/// Without a known plaintext every group element survives.
pub fn master_key_candidates(
    spec: GroupSpec,
    record: &MessageRecord,
    known_plaintext: Option<&[GroupElement]>,
) -> Result<Vec<GroupElement>, KdcError> {
    let all = spec.elements()?;
    let Some(plain) = known_plaintext else {
        return Ok(all);
    };
    let mut out = Vec::new();
    for k in all {
        if decrypt(spec, record, &k)? == plain {
            out.push(k);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteForceCost {
    pub users: u64,
    pub bits: u32,
    /// `C(N, 2) * (2^n)!`, when small enough to write out (`n <= 12`).
    #[serde(serialize_with = "decimal")]
    pub exact: Option<BigUint>,
    pub log10: f64,
}

fn decimal<S: serde::Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(n) => s.serialize_str(&n.to_str_radix(10)),
        None => s.serialize_none(),
    }
}

/// Exhaustive key search over every pair of `N` users with `n`-bit headers, each key
/// being an arbitrary permutation of the `2^n` headers.
pub fn brute_force_cost(users: u64, bits: u32) -> Result<BruteForceCost, KdcError> {
    if users < 2 || bits == 0 || bits > 64 {
        return Err(KdcError::InvalidParameter(format!(
            "N = {users}, n = {bits}"
        )));
    }
    let pairs = BigUint::from(users) * BigUint::from(users - 1) / 2u32;
    let log10 = (users as f64 * (users - 1) as f64 / 2.0).log10()
        + ln_gamma(2f64.powi(bits as i32) + 1.0) / std::f64::consts::LN_10;
    let exact = (bits <= 12).then(|| {
        let mut f = BigUint::from(1u32);
        for k in 2..=(1u64 << bits) {
            f *= k;
        }
        pairs * f
    });
    Ok(BruteForceCost {
        users,
        bits,
        exact,
        log10,
    })
}

/// Number of holonomy images an attacker must find for a genus-`g` surface.
pub fn holonomy_cost(genus: u64) -> u64 {
    2 * genus
}
