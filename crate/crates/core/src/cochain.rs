//! Čech cochains on the complete tuple complex of a network.
//!
//! A degree-`k` cochain assigns a group element to every ordered `(k+1)`-tuple of
//! distinct vertices. Values are stored once per ascending tuple and the other
//! orderings are reconstructed: in degree 1 by `value(j, i) = value(i, j)^-1`, in
//! higher abelian degrees by the sign of the sorting permutation. Non-abelian
//! cochains of degree 2 (coboundaries of non-abelian 1-cochains) keep every ordering.
//!
//! Orientation: `value(i, j)` carries `j`'s fiber to `i`'s, composites read left to
//! right (`value(i, j) * value(j, l)`), and `(δu)(i, j) = u_i * u_j^-1`.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::groups::{GroupElement, GroupError, GroupSpec};
use crate::network::{Network, NetworkError};

/// Highest cochain degree handled.
pub const MAX_DEGREE: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CochainError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("degree {0} exceeds the supported maximum")]
    DegreeTooHigh(usize),
    #[error("non-abelian cochains are only supported up to degree 1 (got degree {0})")]
    NonAbelianDegree(usize),
    #[error("cochains live on different groups or supports")]
    Mismatch,
    #[error("expected a cochain of degree {expected}, got {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error("cochain is not a cocycle; witness {witness:?}")]
    NotACocycle { witness: Vec<usize> },
    #[error("coboundary value at {tuple:?} left the kernel of the extension")]
    LiftLeak { tuple: Vec<usize> },
    #[error("network is disconnected")]
    Disconnected,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Storage {
    /// One value per ascending tuple, indexed by combinatorial (colex) rank.
    Ascending(Vec<GroupElement>),
    /// Every ordered tuple of distinct vertices.
    Ordered(BTreeMap<Vec<usize>, GroupElement>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cochain {
    degree: usize,
    spec: GroupSpec,
    vertex_count: usize,
    storage: Storage,
}

pub(crate) fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn rank(tuple: &[usize]) -> usize {
    tuple
        .iter()
        .enumerate()
        .map(|(t, &a)| binom(a, t + 1))
        .sum()
}

/// Sorts in place, returning whether the permutation was odd.
fn sort_with_parity(tuple: &mut [usize]) -> bool {
    let mut odd = false;
    for i in 1..tuple.len() {
        let mut j = i;
        while j > 0 && tuple[j - 1] > tuple[j] {
            tuple.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    odd
}

/// Strictly increasing `len`-tuples of `0..n`, lexicographic order.
pub fn ascending_tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binom(n, len));
    if len > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..len).collect();
    loop {
        out.push(cur.clone());
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - len + i {
                cur[i] += 1;
                for t in i + 1..len {
                    cur[t] = cur[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Ordered `len`-tuples of distinct elements of `0..n`, lexicographic order.
pub fn ordered_tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn rec(n: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !cur.contains(&v) {
                cur.push(v);
                rec(n, len, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, len, &mut cur, &mut out);
    out
}

impl Cochain {
    fn check_shape(degree: usize, spec: &GroupSpec) -> Result<bool, CochainError> {
        if degree > MAX_DEGREE {
            return Err(CochainError::DegreeTooHigh(degree));
        }
        Ok(degree >= 2 && !spec.is_abelian())
    }

    /// The cochain that is the identity on every tuple.
    pub fn identity(
        degree: usize,
        spec: GroupSpec,
        vertex_count: usize,
    ) -> Result<Self, CochainError> {
        Self::from_fn(degree, spec, vertex_count, |_| spec.identity())
    }

    /// Builds a cochain by sampling `f` on each stored tuple: ascending tuples, or
    /// every ordered tuple for non-abelian degree 2 and up.
    pub fn from_fn<F>(
        degree: usize,
        spec: GroupSpec,
        vertex_count: usize,
        mut f: F,
    ) -> Result<Self, CochainError>
    where
        F: FnMut(&[usize]) -> GroupElement,
    {
        let ordered = Self::check_shape(degree, &spec)?;
        let mut check = |t: &[usize]| {
            let v = f(t);
            if v.spec() != spec {
                return Err(CochainError::Mismatch);
            }
            Ok(v)
        };
        let storage = if ordered {
            let mut map = BTreeMap::new();
            for t in ordered_tuples(vertex_count, degree + 1) {
                let v = check(&t)?;
                map.insert(t, v);
            }
            Storage::Ordered(map)
        } else {
            let mut values = vec![spec.identity(); binom(vertex_count, degree + 1)];
            for t in ascending_tuples(vertex_count, degree + 1) {
                values[rank(&t)] = check(&t)?;
            }
            Storage::Ascending(values)
        };
        Ok(Self {
            degree,
            spec,
            vertex_count,
            storage,
        })
    }

    /// Degree-1 cochain from `(i, j) -> value` assignments; unassigned pairs default to
    /// the identity and a pair given as `(j, i)` is stored inverted.
    pub fn from_pairs<I>(
        spec: GroupSpec,
        vertex_count: usize,
        pairs: I,
    ) -> Result<Self, CochainError>
    where
        I: IntoIterator<Item = ((usize, usize), GroupElement)>,
    {
        let mut c = Self::identity(1, spec, vertex_count)?;
        for ((i, j), v) in pairs {
            c.set(&[i, j], v)?;
        }
        Ok(c)
    }

    /// Degree-0 cochain from a list of vertex values.
    pub fn from_vertex_values(values: &[GroupElement]) -> Result<Self, CochainError> {
        let spec = values
            .first()
            .map(|v| v.spec())
            .ok_or(CochainError::Mismatch)?;
        Self::from_fn(0, spec, values.len(), |t| values[t[0]])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn spec(&self) -> GroupSpec {
        self.spec
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Value at an arbitrary tuple of the right arity. Tuples with a repeated vertex
    /// evaluate to the identity.
    ///
    /// # Panics
    /// On a tuple of the wrong length or with a vertex out of range.
    pub fn get(&self, tuple: &[usize]) -> GroupElement {
        assert_eq!(tuple.len(), self.degree + 1, "tuple arity");
        assert!(
            tuple.iter().all(|&v| v < self.vertex_count),
            "vertex out of range"
        );
        match &self.storage {
            Storage::Ordered(map) => map
                .get(tuple)
                .copied()
                .unwrap_or_else(|| self.spec.identity()),
            Storage::Ascending(values) => {
                let mut sorted = tuple.to_vec();
                let odd = sort_with_parity(&mut sorted);
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return self.spec.identity();
                }
                let v = values[rank(&sorted)];
                if odd {
                    v.inverse()
                } else {
                    v
                }
            }
        }
    }

    /// Sets the value at `tuple` (and, through the antisymmetry rule, at its
    /// reorderings).
    pub fn set(&mut self, tuple: &[usize], value: GroupElement) -> Result<(), CochainError> {
        if value.spec() != self.spec || tuple.len() != self.degree + 1 {
            return Err(CochainError::Mismatch);
        }
        if tuple.iter().any(|&v| v >= self.vertex_count) {
            return Err(CochainError::Mismatch);
        }
        match &mut self.storage {
            Storage::Ordered(map) => {
                map.insert(tuple.to_vec(), value);
            }
            Storage::Ascending(values) => {
                let mut sorted = tuple.to_vec();
                let odd = sort_with_parity(&mut sorted);
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return Err(CochainError::Mismatch);
                }
                values[rank(&sorted)] = if odd { value.inverse() } else { value };
            }
        }
        Ok(())
    }

    /// Stored entries: ascending tuples in lexicographic order, or every ordered tuple.
    pub fn entries(&self) -> Vec<(Vec<usize>, GroupElement)> {
        match &self.storage {
            Storage::Ordered(map) => map.iter().map(|(k, v)| (k.clone(), *v)).collect(),
            Storage::Ascending(_) => ascending_tuples(self.vertex_count, self.degree + 1)
                .into_iter()
                .map(|t| {
                    let v = self.get(&t);
                    (t, v)
                })
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        match &self.storage {
            Storage::Ordered(map) => map.values().all(|v| v.is_identity()),
            Storage::Ascending(values) => values.iter().all(|v| v.is_identity()),
        }
    }

    /// Applies `f` to every stored value, producing a cochain over `target`. Used for
    /// projections and canonical lifts along extension chains.
    pub fn map_values<F>(&self, target: GroupSpec, mut f: F) -> Result<Cochain, CochainError>
    where
        F: FnMut(GroupElement) -> Result<GroupElement, GroupError>,
    {
        let ordered = Self::check_shape(self.degree, &target)?;
        let storage = match (&self.storage, ordered) {
            (Storage::Ascending(values), false) => {
                Storage::Ascending(values.iter().map(|&v| f(v)).collect::<Result<_, _>>()?)
            }
            (Storage::Ordered(map), true) => Storage::Ordered(
                map.iter()
                    .map(|(k, &v)| Ok((k.clone(), f(v)?)))
                    .collect::<Result<_, GroupError>>()?,
            ),
            _ => return Err(CochainError::NonAbelianDegree(self.degree)),
        };
        let out = Cochain {
            degree: self.degree,
            spec: target,
            vertex_count: self.vertex_count,
            storage,
        };
        if let Storage::Ascending(values) = &out.storage {
            if values.iter().any(|v| v.spec() != target) {
                return Err(CochainError::Mismatch);
            }
        }
        Ok(out)
    }

    /// Reduction of every value along `Z/p^k -> Z/p^(k-1)`.
    pub fn project(&self) -> Result<Cochain, CochainError> {
        let (p, k) = self
            .spec
            .ext_params()
            .filter(|&(_, k)| k >= 2)
            .ok_or(GroupError::NotExtChain(self.spec))?;
        self.map_values(GroupSpec::ext_chain(p, k - 1)?, |v| v.ext_project())
    }

    /// Canonical section applied to the stored (ascending) representatives, into
    /// `Z/p^depth`. Reversed orderings are the inverses of the lifted values.
    pub fn lift_to(&self, depth: u32) -> Result<Cochain, CochainError> {
        let (p, _) = self
            .spec
            .ext_params()
            .ok_or(GroupError::NotExtChain(self.spec))?;
        self.map_values(GroupSpec::ext_chain(p, depth)?, |v| v.lift_to(depth))
    }

    fn same_shape(&self, other: &Cochain) -> Result<(), CochainError> {
        if self.spec != other.spec
            || self.vertex_count != other.vertex_count
            || self.degree != other.degree
        {
            Err(CochainError::Mismatch)
        } else {
            Ok(())
        }
    }

    /// Pointwise product `self * other`.
    pub fn compose(&self, other: &Cochain) -> Result<Cochain, CochainError> {
        self.same_shape(other)?;
        if !self.spec.is_abelian() && self.degree >= 1 {
            return Err(CochainError::NonAbelianDegree(self.degree));
        }
        Cochain::from_fn(self.degree, self.spec, self.vertex_count, |t| {
            self.get(t) * other.get(t)
        })
    }

    /// Pointwise inverse.
    pub fn inverse(&self) -> Result<Cochain, CochainError> {
        if !self.spec.is_abelian() && self.degree >= 1 {
            return Err(CochainError::NonAbelianDegree(self.degree));
        }
        Cochain::from_fn(self.degree, self.spec, self.vertex_count, |t| {
            self.get(t).inverse()
        })
    }
}

/// The Čech coboundary.
///
/// * degree 0: `(δu)(i, j) = u_i * u_j^-1`
/// * degree 1: `(δu)(i, j, l) = u_li * u_ij * u_jl`
/// * degree k >= 2 (abelian): the alternating sum over omitted positions.
pub fn coboundary(c: &Cochain) -> Result<Cochain, CochainError> {
    let degree = c.degree + 1;
    if degree > MAX_DEGREE {
        return Err(CochainError::DegreeTooHigh(degree));
    }
    let n = c.vertex_count;
    match c.degree {
        0 => Cochain::from_fn(1, c.spec, n, |t| c.get(&[t[0]]) * c.get(&[t[1]]).inverse()),
        1 => Cochain::from_fn(2, c.spec, n, |t| {
            let (i, j, l) = (t[0], t[1], t[2]);
            c.get(&[l, i]) * c.get(&[i, j]) * c.get(&[j, l])
        }),
        k => {
            if !c.spec.is_abelian() {
                return Err(CochainError::NonAbelianDegree(k));
            }
            let mut face = Vec::with_capacity(k + 1);
            Cochain::from_fn(degree, c.spec, n, |t| {
                let mut acc = c.spec.identity();
                for omit in 0..t.len() {
                    face.clear();
                    face.extend(
                        t.iter()
                            .enumerate()
                            .filter(|&(s, _)| s != omit)
                            .map(|(_, &v)| v),
                    );
                    let v = c.get(&face);
                    acc = acc * if omit % 2 == 0 { v } else { v.inverse() };
                }
                acc
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CocycleCheck {
    pub holds: bool,
    /// First ascending tuple (lexicographic) where the coboundary is not the identity.
    pub witness: Option<Vec<usize>>,
}

pub fn is_cocycle(c: &Cochain) -> Result<CocycleCheck, CochainError> {
    if c.degree == 0 {
        return Err(CochainError::WrongDegree {
            expected: 1,
            got: 0,
        });
    }
    if !c.spec.is_abelian() && c.degree >= 2 {
        return Err(CochainError::NonAbelianDegree(c.degree));
    }
    let d = coboundary(c)?;
    let witness = ascending_tuples(c.vertex_count, c.degree + 2)
        .into_iter()
        .find(|t| !d.get(t).is_identity());
    Ok(CocycleCheck {
        holds: witness.is_none(),
        witness,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    /// Keys satisfy the composition law on every triple.
    Torsor,
    /// Keys fail the composition law somewhere; the failure is a 2-cochain.
    GerbeStyle,
}

/// Pairwise keys on a network: a degree-1 cochain tagged by whether it is a cocycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeySchedule {
    network: Network,
    keys: Cochain,
    kind: ScheduleKind,
}

impl KeySchedule {
    pub fn new(network: Network, keys: Cochain) -> Result<Self, CochainError> {
        if keys.degree != 1 {
            return Err(CochainError::WrongDegree {
                expected: 1,
                got: keys.degree,
            });
        }
        if keys.vertex_count != network.vertex_count() {
            return Err(CochainError::Mismatch);
        }
        let kind = if is_cocycle(&keys)?.holds {
            ScheduleKind::Torsor
        } else {
            ScheduleKind::GerbeStyle
        };
        Ok(Self {
            network,
            keys,
            kind,
        })
    }

    /// The trivial schedule `δu` of a 0-chain.
    pub fn from_chain(network: Network, chain: &Cochain) -> Result<Self, CochainError> {
        if chain.degree != 0 {
            return Err(CochainError::WrongDegree {
                expected: 0,
                got: chain.degree,
            });
        }
        Self::new(network, coboundary(chain)?)
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn keys(&self) -> &Cochain {
        &self.keys
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn is_torsor(&self) -> bool {
        self.kind == ScheduleKind::Torsor
    }

    pub fn spec(&self) -> GroupSpec {
        self.keys.spec
    }

    /// `value(i, j)`: the key carrying `j`'s fiber to `i`'s.
    pub fn key(&self, i: usize, j: usize) -> GroupElement {
        self.keys.get(&[i, j])
    }
}

/// Holonomy of one fundamental loop: `value(v0, v1) * value(v1, v2) * ...`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoopHolonomy {
    pub vertices: Vec<usize>,
    pub value: GroupElement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Trivialization {
    Trivial(Cochain),
    Obstructed(Vec<LoopHolonomy>),
}

/// Looks for a 0-chain `u` with `value(i, j) = u_i * u_j^-1`.
///
/// `u` is fixed to the identity at the spanning-tree root and propagated along tree
/// edges; every remaining pair is then checked. On failure the holonomy of the loop
/// closed by each non-tree pair is reported (oriented along a network edge when one
/// joins the pair, otherwise in ascending order).
pub fn trivialize(s: &KeySchedule) -> Result<Trivialization, CochainError> {
    let net = &s.network;
    let tree = net
        .spanning_tree()
        .map_err(|_| CochainError::Disconnected)?;
    let spec = s.spec();
    let n = net.vertex_count();
    let mut u = vec![spec.identity(); n];
    for &v in &tree.order[1..] {
        let (p, _) = tree.parent[v].expect("non-root vertices have parents");
        u[v] = s.key(p, v).inverse() * u[p];
    }
    let consistent = ascending_tuples(n, 2)
        .iter()
        .all(|t| s.key(t[0], t[1]) == u[t[0]] * u[t[1]].inverse());
    if consistent {
        return Ok(Trivialization::Trivial(Cochain::from_vertex_values(&u)?));
    }
    let is_tree_pair = |a: usize, b: usize| {
        tree.parent[a].map(|(p, _)| p) == Some(b) || tree.parent[b].map(|(p, _)| p) == Some(a)
    };
    let mut loops = Vec::new();
    for t in ascending_tuples(n, 2) {
        let (mut a, mut b) = (t[0], t[1]);
        if is_tree_pair(a, b) {
            continue;
        }
        if let Some(e) = net
            .edges()
            .iter()
            .find(|e| (e.from == a && e.to == b) || (e.from == b && e.to == a))
        {
            (a, b) = (e.from, e.to);
        }
        let mut verts = tree.path_from_root(a);
        let mut back = tree.path_from_root(b);
        back.reverse();
        verts.extend(back);
        let value = verts
            .windows(2)
            .fold(spec.identity(), |acc, w| acc * s.key(w[0], w[1]));
        loops.push(LoopHolonomy {
            vertices: verts,
            value,
        });
    }
    Ok(Trivialization::Obstructed(loops))
}

/// Connecting map along `Z/p^2 -> Z/p`: lift the stored values of a cocycle over
/// `Z/p` by the canonical section, take the coboundary and divide it into the kernel.
pub fn bockstein_lift(c: &Cochain) -> Result<Cochain, CochainError> {
    match c.spec.ext_params() {
        Some((_, 1)) => {}
        _ => return Err(GroupError::NotExtChain(c.spec).into()),
    }
    let check = is_cocycle(c)?;
    if let Some(witness) = check.witness {
        return Err(CochainError::NotACocycle { witness });
    }
    let lifted = c.lift_to(2)?;
    let d = coboundary(&lifted)?;
    let band = c.spec;
    let mut leak = None;
    let out = Cochain::from_fn(c.degree + 1, band, c.vertex_count, |t| {
        match d.get(t).ext_kernel_div() {
            Ok(v) => v,
            Err(_) => {
                leak.get_or_insert_with(|| t.to_vec());
                band.identity()
            }
        }
    })?;
    match leak {
        Some(tuple) => Err(CochainError::LiftLeak { tuple }),
        None => Ok(out),
    }
}
