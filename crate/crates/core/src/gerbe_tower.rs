//! Gerbe schedules from the extension `Z/p -> Z/p^k -> Z/p^(k-1)` and towers of
//! torsors classified by iterated Bockstein lifts.

use serde::Serialize;
use thiserror::Error;

use crate::cochain::{bockstein_lift, coboundary, is_cocycle, Cochain, CochainError};
use crate::groups::{GroupElement, GroupError, GroupSpec};
use crate::network::Network;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GerbeError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error("projected keys fail the composition law at {witness:?}")]
    ProjectionNotCocycle { witness: Vec<usize> },
    #[error("a tower with {levels} levels needs {needed} vertices, the network has {have}")]
    NotEnoughVertices {
        levels: u32,
        needed: usize,
        have: usize,
    },
    #[error("tower base is not a cocycle; witness {witness:?}")]
    BaseNotCocycle { witness: Vec<usize> },
    #[error("level {level} outside 0..={levels}")]
    LevelOutOfRange { level: u32, levels: u32 },
    #[error("keys must be a 1-cochain on the network over an extension chain of depth >= 2")]
    BadKeys,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GerbeSchedule {
    network: Network,
    keys: Cochain,
    derived: Cochain,
}

impl GerbeSchedule {
    pub fn network(&self) -> &Network {
        &self.network
    }

    /// Pairwise keys in `Z/p^k`.
    pub fn keys(&self) -> &Cochain {
        &self.keys
    }

    /// The band-valued 2-cocycle `(δ keys) / p^(k-1)` over `Z/p`.
    pub fn derived(&self) -> &Cochain {
        &self.derived
    }

    pub fn band(&self) -> GroupSpec {
        self.derived.spec()
    }
}

/// Builds the gerbe whose keys are `keys`. The keys must project to a cocycle, so that
/// every `u_li * u_ij * u_jl` lands in the kernel of the projection.
pub fn build_gerbe(network: Network, keys: Cochain) -> Result<GerbeSchedule, GerbeError> {
    match keys.spec().ext_params() {
        Some((_, k))
            if k >= 2 && keys.degree() == 1 && keys.vertex_count() == network.vertex_count() => {}
        _ => return Err(GerbeError::BadKeys),
    }
    let check = is_cocycle(&keys.project()?)?;
    if let Some(witness) = check.witness {
        return Err(GerbeError::ProjectionNotCocycle { witness });
    }
    let d = coboundary(&keys)?;
    let (p, _) = keys.spec().ext_params().expect("checked above");
    let derived = d.map_values(GroupSpec::ext_chain(p, 1)?, |v| v.ext_kernel_div())?;
    Ok(GerbeSchedule {
        network,
        keys,
        derived,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerSchedule {
    network: Network,
    p: u64,
    levels: u32,
    classifying: Vec<Cochain>,
}

impl TowerSchedule {
    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    /// `(c_1, ..., c_{n+1})`, with `c_k` of degree `k`.
    pub fn classifying(&self) -> &[Cochain] {
        &self.classifying
    }

    pub fn base(&self) -> &Cochain {
        &self.classifying[0]
    }

    /// Key between `i` and `j` at `level`: the canonical lift of the base key into
    /// `Z/p^(level+1)`. Level 0 is the base key itself.
    pub fn session_key(&self, i: usize, j: usize, level: u32) -> Result<GroupElement, GerbeError> {
        Ok(self.level_keys(level)?.get(&[i, j]))
    }

    /// All level-`level` keys as a 1-cochain over `Z/p^(level+1)`.
    pub fn level_keys(&self, level: u32) -> Result<Cochain, GerbeError> {
        if level > self.levels {
            return Err(GerbeError::LevelOutOfRange {
                level,
                levels: self.levels,
            });
        }
        Ok(self.base().lift_to(level + 1)?)
    }
}

/// Builds an `n`-level tower over `Z/p` from a base 1-cocycle:
/// `c_1 = base` and `c_{k+1} = bockstein(c_k)`.
pub fn build_tower(
    network: Network,
    p: u64,
    levels: u32,
    base: Cochain,
) -> Result<TowerSchedule, GerbeError> {
    let band = GroupSpec::ext_chain(p, 1)?;
    if base.spec() != band || base.degree() != 1 || base.vertex_count() != network.vertex_count() {
        return Err(GerbeError::BadKeys);
    }
    let needed = levels as usize + 2;
    if needed > network.vertex_count() {
        return Err(GerbeError::NotEnoughVertices {
            levels,
            needed,
            have: network.vertex_count(),
        });
    }
    if let Some(witness) = is_cocycle(&base)?.witness {
        return Err(GerbeError::BaseNotCocycle { witness });
    }
    let mut classifying = vec![base];
    for _ in 0..levels {
        let next = bockstein_lift(classifying.last().expect("non-empty"))?;
        classifying.push(next);
    }
    Ok(TowerSchedule {
        network,
        p,
        levels,
        classifying,
    })
}

/// Serializable summary of a classifying sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassifyingEntry {
    pub degree: usize,
    pub cocycle: bool,
    pub values: Vec<(Vec<usize>, GroupElement)>,
}

pub fn describe_tower(t: &TowerSchedule) -> Result<Vec<ClassifyingEntry>, GerbeError> {
    t.classifying
        .iter()
        .map(|c| {
            Ok(ClassifyingEntry {
                degree: c.degree(),
                cocycle: is_cocycle(c)?.holds,
                values: c.entries(),
            })
        })
        .collect()
}
