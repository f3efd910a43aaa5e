//! Public-key agreement on torsors, gerbes and towers.
//!
//! `exp` is `k -> generator^k` in the configured group and `Log` is its brute-force
//! inverse ([`discrete_log`](crate::groups::discrete_log)). On an extension chain the
//! generator is 1, so a private key is the integer representative of the public one.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cochain::{coboundary, Cochain, CochainError, KeySchedule};
use crate::groups::{GroupElement, GroupError, GroupSpec};
use crate::network::Network;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PubKeyError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error("private key {private} outside [1, {order})")]
    PrivateOutOfRange { private: u64, order: u64 },
    #[error("{0} has no generator, so exponentiation forms are unavailable")]
    UnsupportedForm(GroupSpec),
    #[error("c1 does not project onto the coboundary of c0 at {pair:?}")]
    NotAConnectiveStructure { pair: Vec<usize> },
    #[error("level {level} outside 1..={levels}")]
    LevelOutOfRange { level: u32, levels: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Torsor,
    Gerbe,
    Tower(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KeyPair {
    pub private: u64,
    pub public: GroupElement,
    pub level: Level,
}

impl KeyPair {
    pub fn new(spec: GroupSpec, private: u64, level: Level) -> Result<Self, PubKeyError> {
        let order = spec.order();
        if private == 0 || private >= order {
            return Err(PubKeyError::PrivateOutOfRange { private, order });
        }
        let public = spec
            .exp(private as i64)
            .map_err(|_| PubKeyError::UnsupportedForm(spec))?;
        Ok(Self {
            private,
            public,
            level,
        })
    }

    pub fn generate<R: Rng + ?Sized>(
        spec: GroupSpec,
        rng: &mut R,
        level: Level,
    ) -> Result<Self, PubKeyError> {
        if spec.order() < 2 {
            return Err(PubKeyError::PrivateOutOfRange {
                private: 1,
                order: spec.order(),
            });
        }
        Self::new(spec, rng.random_range(1..spec.order()), level)
    }
}

/// `their_public ^ my.private`.
pub fn dh_shared(my: &KeyPair, their_public: &GroupElement) -> Result<GroupElement, PubKeyError> {
    if my.public.spec() != their_public.spec() {
        return Err(GroupError::SpecMismatch {
            left: my.public.spec(),
            right: their_public.spec(),
        }
        .into());
    }
    Ok(their_public.power(my.private as i64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConnectionForm {
    /// `L(a, y) = y^a`.
    Dh,
    /// `L(a, y) = exp(a) * y^-1`, the transition key of the trivial torsor.
    CoordinateChange,
}

/// Key derived by the holder of the exponent `alpha_i` from the public `their_public`.
pub fn connection_scheme_key(
    alpha_i: i64,
    their_public: &GroupElement,
    form: ConnectionForm,
) -> Result<GroupElement, PubKeyError> {
    let spec = their_public.spec();
    spec.generator().ok_or(PubKeyError::UnsupportedForm(spec))?;
    Ok(match form {
        ConnectionForm::Dh => their_public.power(alpha_i),
        ConnectionForm::CoordinateChange => spec.exp(alpha_i)? * their_public.inverse(),
    })
}

/// A pair `(c0, c1)` with `c0` a 0-chain over `Z/p` and `c1` a 1-chain over `Z/p^2`
/// projecting onto `δc0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectiveStructure {
    c0: Cochain,
    c1: Cochain,
}

impl ConnectiveStructure {
    pub fn new(c0: Cochain, c1: Cochain) -> Result<Self, PubKeyError> {
        let (p, k0) = c0
            .spec()
            .ext_params()
            .ok_or(GroupError::NotExtChain(c0.spec()))?;
        let (p1, k1) = c1
            .spec()
            .ext_params()
            .ok_or(GroupError::NotExtChain(c1.spec()))?;
        if c0.degree() != 0 || c1.degree() != 1 || k0 != 1 || k1 != 2 || p != p1 {
            return Err(CochainError::Mismatch.into());
        }
        let d = coboundary(&c0)?;
        let proj = c1.project()?;
        if let Some((pair, _)) = d.entries().into_iter().find(|(t, v)| proj.get(t) != *v) {
            return Err(PubKeyError::NotAConnectiveStructure { pair });
        }
        Ok(Self { c0, c1 })
    }

    /// The structure whose `c1` is the canonical lift of `δc0`.
    pub fn canonical(c0: Cochain) -> Result<Self, PubKeyError> {
        let c1 = coboundary(&c0)?.lift_to(2)?;
        Self::new(c0, c1)
    }

    pub fn c0(&self) -> &Cochain {
        &self.c0
    }

    pub fn c1(&self) -> &Cochain {
        &self.c1
    }

    /// Public key of `i`: the canonical lift `c'_i` of `c_i` into `Z/p^2`.
    pub fn public(&self, i: usize) -> Result<GroupElement, PubKeyError> {
        Ok(self.c0.get(&[i]).ext_lift()?)
    }

    /// Private key of `i`: `Log(c'_i)`.
    pub fn private(&self, i: usize) -> Result<u64, PubKeyError> {
        Ok(self.public(i)?.value())
    }
}

/// The agreement function on `Z/p^depth` for the ordered pair `(x, y)`: the canonical
/// lift of `exp(a_x) - c'_y` taken modulo `p`, with the pair orientation fixed by
/// vertex order so that `J(y, x)` is the inverse of `J(x, y)`.
pub fn j_form(
    x: usize,
    y: usize,
    private_x: u64,
    public_y: &GroupElement,
) -> Result<GroupElement, PubKeyError> {
    let spec = public_y.spec();
    let (p, depth) = spec.ext_params().ok_or(GroupError::NotExtChain(spec))?;
    let base = GroupSpec::ext_chain(p, 1)?;
    let mine = spec.exp(private_x as i64)?;
    let to_base = |v: GroupElement| base.reduce(v.value() as i64);
    if x < y {
        Ok(to_base(mine * public_y.inverse())?.lift_to(depth)?)
    } else {
        Ok(to_base(*public_y * mine.inverse())?
            .lift_to(depth)?
            .inverse())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Agreement {
    /// `u_ij` computed by `i` from its private key and `j`'s public key.
    pub initiator: GroupElement,
    /// `u_ji^-1` computed by `j` from its private key and `i`'s public key.
    pub responder: GroupElement,
}

impl Agreement {
    pub fn agrees(&self) -> bool {
        self.initiator == self.responder
    }
}

/// Gerbe key `u_ij` negotiated from a connective structure.
pub fn gerbe_public_key(
    cs: &ConnectiveStructure,
    i: usize,
    j: usize,
) -> Result<Agreement, PubKeyError> {
    let initiator = j_form(i, j, cs.private(i)?, &cs.public(j)?)?;
    let responder = j_form(j, i, cs.private(j)?, &cs.public(i)?)?.inverse();
    Ok(Agreement {
        initiator,
        responder,
    })
}

/// The gerbe-style schedule `c1` of a connective structure.
pub fn gerbe_schedule(
    network: Network,
    cs: &ConnectiveStructure,
) -> Result<KeySchedule, PubKeyError> {
    Ok(KeySchedule::new(network, cs.c1.clone())?)
}

/// Level-`level` key of a tower with `levels` levels whose base 0-chain `c0` lives in
/// `Z/p`: the agreement runs in `Z/p^(level+1)` on the lifted public keys.
pub fn tower_public_key(
    c0: &Cochain,
    levels: u32,
    level: u32,
    i: usize,
    j: usize,
) -> Result<Agreement, PubKeyError> {
    if level == 0 || level > levels {
        return Err(PubKeyError::LevelOutOfRange { level, levels });
    }
    let lift = |v: usize| c0.get(&[v]).lift_to(level + 1);
    let (pi, pj) = (lift(i)?, lift(j)?);
    let initiator = j_form(i, j, pi.value(), &pj)?;
    let responder = j_form(j, i, pj.value(), &pi)?.inverse();
    Ok(Agreement {
        initiator,
        responder,
    })
}
