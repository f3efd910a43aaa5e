//! Link-to-link header encryption over key schedules.
//!
//! A header travelling along a path `(i_1, ..., i_n)` is re-encrypted at every hop by
//! `value(i_{t+1}, i_t)`. Keys act on headers by left translation when both live in
//! the same group, or as matrices when the keys are `GL(n,2)` and the headers are
//! `(Z/2)^n` vectors.

pub mod block;

use serde::Serialize;
use thiserror::Error;

pub use crate::cochain::ScheduleKind;
use crate::cochain::{ascending_tuples, binom, Cochain, CochainError, KeySchedule};
use crate::groups::{gf2, GroupElement, GroupError, GroupKind, GroupSpec};
use crate::network::{Edge, Network, NetworkError, Path};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error("invalid path: {0}")]
    PathInvalid(String),
    #[error("key group {key} cannot act on headers in {header}")]
    ActionMismatch { key: GroupSpec, header: GroupSpec },
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("schedules are not over GL(n,2)")]
    NotLinear,
    #[error("schedules live on different networks")]
    NetworkMismatch,
}

fn check_path(s: &KeySchedule, path: &Path) -> Result<(), LinkError> {
    s.network()
        .validate_path(path)
        .map_err(|e| LinkError::PathInvalid(e.to_string()))
}

/// Action of a key on a header.
pub fn act(key: &GroupElement, header: &GroupElement) -> Result<GroupElement, LinkError> {
    let (ks, hs) = (key.spec(), header.spec());
    if ks == hs {
        return Ok(*key * *header);
    }
    match (ks.kind(), hs.kind()) {
        (GroupKind::MatGl { n }, GroupKind::XorVec { bits }) if n == bits => {
            Ok(hs.element(gf2::apply(n, key.value(), header.value()))?)
        }
        _ => Err(LinkError::ActionMismatch {
            key: ks,
            header: hs,
        }),
    }
}

/// Per-hop header values, starting with the plaintext header.
pub fn send_header(
    s: &KeySchedule,
    path: &Path,
    header: GroupElement,
) -> Result<Vec<GroupElement>, LinkError> {
    check_path(s, path)?;
    let mut out = Vec::with_capacity(path.vertices.len());
    out.push(header);
    let mut h = header;
    for (a, b) in path.steps() {
        h = act(&s.key(b, a), &h)?;
        out.push(h);
    }
    Ok(out)
}

/// Holonomy of a flat connection `u` along a path: the composite
/// `Hol_{n-1} * ... * Hol_1` of the steps `value(b, a) * u_a^-1 * u_b`.
pub fn holonomy_map(
    s: &KeySchedule,
    conn: &Cochain,
    path: &Path,
) -> Result<GroupElement, LinkError> {
    check_path(s, path)?;
    if conn.degree() != 0
        || conn.vertex_count() != s.network().vertex_count()
        || conn.spec() != s.spec()
    {
        return Err(LinkError::SizeMismatch(
            "connection must be a 0-chain on the schedule's group".into(),
        ));
    }
    let mut acc = s.spec().identity();
    for (a, b) in path.steps() {
        let step = s.key(b, a) * conn.get(&[a]).inverse() * conn.get(&[b]);
        acc = step * acc;
    }
    Ok(acc)
}

/// Result of the genus key-entry procedure.
#[derive(Debug, Clone)]
pub struct GenusExpansion {
    pub schedule: KeySchedule,
    /// Number of generator values entered.
    pub inputs: usize,
    /// Number of unordered pairs in the full key table, `C(2n + p, 2)`.
    pub table_size: usize,
    /// Whether every triple of boundary vertices satisfies the composition law.
    pub boundary_cocycle: bool,
}

/// Expands `n` holonomy generators into a full key table on a polygon with `2n`
/// boundary vertices and `p` interior vertices.
///
/// Consecutive boundary keys are `u_{i,i+1} = g_i` for `i = 1..n` and
/// `u_{n+k,n+k+1} = g_k^-1` for `k = 1..n-1`; every other boundary pair is filled by
/// `u_ij = u_{i,j-1} * u_{j-1,j}` and all keys touching an interior vertex are the
/// identity. The network is the boundary cycle plus an edge from the first boundary
/// vertex to each interior vertex.
pub fn expand_genus_keys<S: AsRef<str>>(
    generators: &[GroupElement],
    boundary: &[S],
    interior: &[S],
) -> Result<GenusExpansion, LinkError> {
    let n = generators.len();
    if n == 0 {
        return Err(LinkError::SizeMismatch(
            "at least one generator is required".into(),
        ));
    }
    if boundary.len() != 2 * n {
        return Err(LinkError::SizeMismatch(format!(
            "{} generators need {} boundary vertices, got {}",
            n,
            2 * n,
            boundary.len()
        )));
    }
    let spec = generators[0].spec();
    if generators.iter().any(|g| g.spec() != spec) {
        return Err(GroupError::SpecMismatch {
            left: spec,
            right: generators
                .iter()
                .find(|g| g.spec() != spec)
                .expect("exists")
                .spec(),
        }
        .into());
    }
    let b = 2 * n;
    let names: Vec<String> = boundary
        .iter()
        .chain(interior)
        .map(|s| s.as_ref().to_string())
        .collect();
    let mut edges: Vec<Edge> = (0..b).map(|i| Edge::new(i, (i + 1) % b)).collect();
    if b == 2 {
        edges.pop();
    }
    edges.extend((b..names.len()).map(|v| Edge::new(0, v)));
    let network = Network::new(names, edges)?;
    let total = network.vertex_count();

    let mut step = Vec::with_capacity(b - 1);
    step.extend_from_slice(generators);
    step.extend(generators[..n - 1].iter().map(|g| g.inverse()));
    let mut keys = Cochain::identity(1, spec, total)?;
    for i in 0..b {
        let mut acc = spec.identity();
        for j in i + 1..b {
            acc = acc * step[j - 1];
            keys.set(&[i, j], acc)?;
        }
    }
    let boundary_cocycle = ascending_tuples(b, 3)
        .iter()
        .all(|t| keys.get(&[t[0], t[1]]) * keys.get(&[t[1], t[2]]) == keys.get(&[t[0], t[2]]));
    let schedule = KeySchedule::new(network, keys)?;
    Ok(GenusExpansion {
        schedule,
        inputs: n,
        table_size: binom(total, 2),
        boundary_cocycle,
    })
}

/// Keys on the pointed connected sum. Each side keeps its own keys (the glued vertex
/// carries the basepoint keys of both sides); a pair across the two sides is keyed
/// through the glued vertex, `u_ab = u_{aU} * u_{U'b}`.
pub fn schedule_connected_sum(
    s1: &KeySchedule,
    s2: &KeySchedule,
) -> Result<KeySchedule, LinkError> {
    if s1.spec() != s2.spec() {
        return Err(GroupError::SpecMismatch {
            left: s1.spec(),
            right: s2.spec(),
        }
        .into());
    }
    let (net, maps) = s1.network().connected_sum(s2.network())?;
    let glued = net.basepoint().expect("sums are pointed");
    let n = net.vertex_count();
    let (b1, b2) = (
        s1.network().basepoint().expect("pointed"),
        s2.network().basepoint().expect("pointed"),
    );
    let mut left_of = vec![None; n];
    let mut right_of = vec![None; n];
    for (old, &new) in maps.left.iter().enumerate() {
        left_of[new] = Some(old);
    }
    for (old, &new) in maps.right.iter().enumerate() {
        right_of[new] = Some(old);
    }
    let keys = Cochain::from_fn(1, s1.spec(), n, |t| {
        let (a, b) = (t[0], t[1]);
        match (left_of[a], left_of[b], right_of[a], right_of[b]) {
            (Some(x), Some(y), _, _) => s1.key(x, y),
            (_, _, Some(x), Some(y)) => s2.key(x, y),
            (Some(x), None, _, Some(y)) => s1.key(x, b1) * s2.key(b2, y),
            (None, Some(y), Some(x), _) => s2.key(x, b2) * s1.key(b1, y),
            _ => unreachable!("every vertex of the sum comes from a side"),
        }
    })?;
    debug_assert!(left_of[glued].is_some() && right_of[glued].is_some());
    Ok(KeySchedule::new(net, keys)?)
}

/// Keys after suppressing the unique edge between `u` and `u_prime`. A vertex `x`
/// that was adjacent to `u_prime` but not to `u` is rekeyed to
/// `value(x, u) = value(x, u') * value(u', u)`; every other key is kept.
pub fn schedule_contract(
    s: &KeySchedule,
    u: usize,
    u_prime: usize,
) -> Result<KeySchedule, LinkError> {
    let old = s.network();
    let (net, map) = old.contract_edge(u, u_prime)?;
    let mut back = vec![0usize; net.vertex_count()];
    for (o, &nw) in map.iter().enumerate() {
        if o != u_prime {
            back[nw] = o;
        }
    }
    let keys = Cochain::from_fn(1, s.spec(), net.vertex_count(), |t| {
        let (a, b) = (back[t[0]], back[t[1]]);
        let rekey = |x: usize| old.adjacent(x, u_prime) && !old.adjacent(x, u);
        if b == u && rekey(a) {
            s.key(a, u_prime) * s.key(u_prime, u)
        } else if a == u && rekey(b) {
            s.key(u, u_prime) * s.key(u_prime, b)
        } else {
            s.key(a, b)
        }
    })?;
    Ok(KeySchedule::new(net, keys)?)
}

fn linear_dim(spec: GroupSpec) -> Result<u32, LinkError> {
    match spec.kind() {
        GroupKind::MatGl { n } => Ok(n),
        _ => Err(LinkError::NotLinear),
    }
}

/// Pointwise Kronecker product of two `GL`-valued schedules on the same network.
pub fn tensor_schedule(s1: &KeySchedule, s2: &KeySchedule) -> Result<KeySchedule, LinkError> {
    let (n1, n2) = (linear_dim(s1.spec())?, linear_dim(s2.spec())?);
    if s1.network() != s2.network() {
        return Err(LinkError::NetworkMismatch);
    }
    let spec = GroupSpec::mat_gl(n1 * n2)?;
    let count = s1.network().vertex_count();
    let mut err = None;
    let keys = Cochain::from_fn(1, spec, count, |t| {
        let m = gf2::kronecker(
            n1,
            s1.key(t[0], t[1]).value(),
            n2,
            s2.key(t[0], t[1]).value(),
        );
        spec.element(m).unwrap_or_else(|e| {
            err.get_or_insert(e);
            spec.identity()
        })
    })?;
    if let Some(e) = err {
        return Err(e.into());
    }
    Ok(KeySchedule::new(s1.network().clone(), keys)?)
}

/// Pointwise inverse transpose.
pub fn dual_schedule(s: &KeySchedule) -> Result<KeySchedule, LinkError> {
    let n = linear_dim(s.spec())?;
    let keys = s.keys().map_values(s.spec(), |k| {
        s.spec().element(gf2::transpose(n, k.inverse().value()))
    })?;
    Ok(KeySchedule::new(s.network().clone(), keys)?)
}

/// Per-hop trace for reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HopTrace {
    pub from: usize,
    pub to: usize,
    pub key: GroupElement,
    pub header: GroupElement,
}

/// `send_header` with the key used at each hop.
pub fn trace_header(
    s: &KeySchedule,
    path: &Path,
    header: GroupElement,
) -> Result<Vec<HopTrace>, LinkError> {
    let values = send_header(s, path, header)?;
    Ok(path
        .steps()
        .zip(values.into_iter().skip(1))
        .map(|((a, b), h)| HopTrace {
            from: a,
            to: b,
            key: s.key(b, a),
            header: h,
        })
        .collect())
}
