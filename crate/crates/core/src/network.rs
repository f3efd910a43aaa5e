//! Networks of users: finite directed multigraphs with an optional basepoint.
//!
//! Vertices are addressed by their index in declaration order; that order fixes every
//! tie-break (spanning trees, path enumeration, cochain storage).

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("self-loop at `{0}` is not allowed")]
    SelfLoop(String),
    #[error("network has no basepoint")]
    Unpointed,
    #[error("{count} edges join `{a}` and `{b}`; contraction needs exactly one")]
    NotUnique { a: String, b: String, count: usize },
    #[error("no edge joins `{0}` and `{1}`")]
    NoSuchEdge(String, String),
    #[error("network is disconnected")]
    Disconnected,
    #[error("invalid path: {0}")]
    PathInvalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Edge {
    pub fn new(from: usize, to: usize) -> Self {
        Self {
            from,
            to,
            label: None,
        }
    }

    fn joins(&self, a: usize, b: usize) -> bool {
        (self.from == a && self.to == b) || (self.from == b && self.to == a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Network {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    basepoint: Option<usize>,
}

/// A walk in the underlying undirected graph. `forward[t]` records whether step `t`
/// follows an edge `vertices[t] -> vertices[t+1]` or traverses one backwards.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Path {
    pub vertices: Vec<usize>,
    pub forward: Vec<bool>,
}

impl Path {
    pub fn trivial(v: usize) -> Self {
        Self {
            vertices: vec![v],
            forward: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self
            .vertices
            .last()
            .expect("paths have at least one vertex")
    }

    pub fn is_loop(&self) -> bool {
        self.start() == self.end()
    }

    /// The formal inverse.
    pub fn inverse(&self) -> Path {
        Path {
            vertices: self.vertices.iter().rev().copied().collect(),
            forward: self.forward.iter().rev().map(|f| !f).collect(),
        }
    }

    /// `self` followed by `other`; `None` when the endpoints do not meet.
    pub fn concat(&self, other: &Path) -> Option<Path> {
        if self.end() != other.start() {
            return None;
        }
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices[1..]);
        let mut forward = self.forward.clone();
        forward.extend_from_slice(&other.forward);
        Some(Path { vertices, forward })
    }

    pub fn steps(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }
}

/// Index maps produced by [`Network::connected_sum`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumMaps {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    pub root: usize,
    /// BFS visiting order, starting at the root.
    pub order: Vec<usize>,
    /// `parent[v] = Some((parent vertex, edge index))`; `None` at the root.
    pub parent: Vec<Option<(usize, usize)>>,
}

impl SpanningTree {
    /// Tree path from the root down to `v`.
    pub fn path_from_root(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut cur = v;
        while let Some((p, _)) = self.parent[cur] {
            out.push(p);
            cur = p;
        }
        out.reverse();
        out
    }

    pub fn is_tree_edge(&self, edge: usize) -> bool {
        self.parent.iter().flatten().any(|&(_, e)| e == edge)
    }
}

impl Network {
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>) -> Result<Self, NetworkError> {
        let mut seen = HashSet::new();
        for v in &vertices {
            if !seen.insert(v.as_str()) {
                return Err(NetworkError::DuplicateVertex(v.clone()));
            }
        }
        for e in &edges {
            for end in [e.from, e.to] {
                if end >= vertices.len() {
                    return Err(NetworkError::UnknownVertex(format!("#{end}")));
                }
            }
            if e.from == e.to {
                return Err(NetworkError::SelfLoop(vertices[e.from].clone()));
            }
        }
        Ok(Self {
            vertices,
            edges,
            basepoint: None,
        })
    }

    /// Builds a network from vertex names and named edge pairs.
    pub fn from_names<S: AsRef<str>>(
        vertices: &[S],
        edges: &[(S, S)],
    ) -> Result<Self, NetworkError> {
        let names: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        let index = |s: &S| {
            names
                .iter()
                .position(|n| n == s.as_ref())
                .ok_or_else(|| NetworkError::UnknownVertex(s.as_ref().to_string()))
        };
        let edges = edges
            .iter()
            .map(|(a, b)| Ok(Edge::new(index(a)?, index(b)?)))
            .collect::<Result<Vec<_>, NetworkError>>()?;
        Self::new(names, edges)
    }

    /// Vertices `V0..V{n-1}` with an edge `Vi -> Vj` for every `i < j`.
    pub fn complete(n: usize) -> Self {
        let vertices = (0..n).map(|i| format!("V{i}")).collect();
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| Edge::new(i, j)))
            .collect();
        Self::new(vertices, edges).expect("complete graphs are valid")
    }

    pub fn with_basepoint(mut self, name: &str) -> Result<Self, NetworkError> {
        self.basepoint = Some(self.require(name)?);
        Ok(self)
    }

    pub fn with_basepoint_index(mut self, v: usize) -> Self {
        assert!(v < self.vertices.len(), "basepoint out of range");
        self.basepoint = Some(v);
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn basepoint(&self) -> Option<usize> {
        self.basepoint
    }

    pub fn name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn require(&self, name: &str) -> Result<usize, NetworkError> {
        self.index_of(name)
            .ok_or_else(|| NetworkError::UnknownVertex(name.to_string()))
    }

    /// Number of edges between `a` and `b` in either direction.
    pub fn edges_between(&self, a: usize, b: usize) -> usize {
        self.edges.iter().filter(|e| e.joins(a, b)).count()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.edges_between(a, b) > 0
    }

    pub fn has_arrow(&self, from: usize, to: usize) -> bool {
        self.edges.iter().any(|e| e.from == from && e.to == to)
    }

    /// Number of edge ends at `v`.
    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(e.from == v) + usize::from(e.to == v))
            .sum()
    }

    fn undirected_neighbors(&self, v: usize) -> BTreeSet<usize> {
        self.edges
            .iter()
            .filter_map(|e| {
                if e.from == v {
                    Some(e.to)
                } else if e.to == v {
                    Some(e.from)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.spanning_tree().is_ok()
    }

    /// Builds the path through the named vertices, preferring a forward arrow at each
    /// step and falling back to traversing an edge backwards.
    pub fn path(&self, vertices: &[usize]) -> Result<Path, NetworkError> {
        if vertices.is_empty() {
            return Err(NetworkError::PathInvalid("empty vertex sequence".into()));
        }
        if let Some(&bad) = vertices.iter().find(|&&v| v >= self.vertices.len()) {
            return Err(NetworkError::PathInvalid(format!(
                "vertex #{bad} out of range"
            )));
        }
        let mut forward = Vec::with_capacity(vertices.len() - 1);
        for w in vertices.windows(2) {
            if self.has_arrow(w[0], w[1]) {
                forward.push(true);
            } else if self.has_arrow(w[1], w[0]) {
                forward.push(false);
            } else {
                return Err(NetworkError::PathInvalid(format!(
                    "`{}` and `{}` are not adjacent",
                    self.name(w[0]),
                    self.name(w[1])
                )));
            }
        }
        Ok(Path {
            vertices: vertices.to_vec(),
            forward,
        })
    }

    pub fn path_by_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Path, NetworkError> {
        let idx = names
            .iter()
            .map(|n| self.require(n.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        self.path(&idx)
    }

    /// Checks that every step of `path` is backed by an edge in the stated direction.
    pub fn validate_path(&self, path: &Path) -> Result<(), NetworkError> {
        if path.vertices.is_empty() || path.forward.len() + 1 != path.vertices.len() {
            return Err(NetworkError::PathInvalid("malformed path".into()));
        }
        for (t, (a, b)) in path.steps().enumerate() {
            let ok = if path.forward[t] {
                self.has_arrow(a, b)
            } else {
                self.has_arrow(b, a)
            };
            if !ok {
                return Err(NetworkError::PathInvalid(format!(
                    "step {t} has no backing edge"
                )));
            }
        }
        Ok(())
    }

    /// Pointed connected sum: the two basepoints are identified into a fresh vertex
    /// named `"{b1}.{b2}"`, which becomes the new basepoint. Vertices of `other` whose
    /// name collides with one already present get primes appended.
    pub fn connected_sum(&self, other: &Network) -> Result<(Network, SumMaps), NetworkError> {
        let b1 = self.basepoint.ok_or(NetworkError::Unpointed)?;
        let b2 = other.basepoint.ok_or(NetworkError::Unpointed)?;
        let glued = format!("{}.{}", self.name(b1), other.name(b2));
        let mut names: Vec<String> = self.vertices.clone();
        names[b1] = glued;
        let left: Vec<usize> = (0..self.vertices.len()).collect();
        let mut right = vec![b1; other.vertices.len()];
        for (v, name) in other.vertices.iter().enumerate() {
            if v == b2 {
                continue;
            }
            let mut fresh = name.clone();
            while names.contains(&fresh) {
                fresh.push('\'');
            }
            right[v] = names.len();
            names.push(fresh);
        }
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|e| Edge {
            from: right[e.from],
            to: right[e.to],
            label: e.label.clone(),
        }));
        let mut sum = Network::new(names, edges)?;
        sum.basepoint = Some(b1);
        Ok((sum, SumMaps { left, right }))
    }

    /// Suppresses the unique edge between `u` and `u_prime`: `u_prime` disappears and
    /// every other edge at `u_prime` is rerouted to `u`. Returns the old-to-new vertex map
    /// (`u_prime` maps to the image of `u`).
    pub fn contract_edge(
        &self,
        u: usize,
        u_prime: usize,
    ) -> Result<(Network, Vec<usize>), NetworkError> {
        if u >= self.vertices.len() || u_prime >= self.vertices.len() {
            return Err(NetworkError::UnknownVertex(format!("#{}", u.max(u_prime))));
        }
        match self.edges_between(u, u_prime) {
            0 => {
                return Err(NetworkError::NoSuchEdge(
                    self.name(u).to_string(),
                    self.name(u_prime).to_string(),
                ))
            }
            1 => {}
            count => {
                return Err(NetworkError::NotUnique {
                    a: self.name(u).to_string(),
                    b: self.name(u_prime).to_string(),
                    count,
                })
            }
        }
        let map: Vec<usize> = (0..self.vertices.len())
            .map(|v| {
                let v = if v == u_prime { u } else { v };
                if v > u_prime {
                    v - 1
                } else {
                    v
                }
            })
            .collect();
        let names = self
            .vertices
            .iter()
            .enumerate()
            .filter(|&(v, _)| v != u_prime)
            .map(|(_, n)| n.clone())
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| !e.joins(u, u_prime))
            .map(|e| Edge {
                from: map[e.from],
                to: map[e.to],
                label: e.label.clone(),
            })
            .collect();
        let mut out = Network::new(names, edges)?;
        out.basepoint = self.basepoint.map(|b| map[b]);
        Ok((out, map))
    }

    /// Breadth-first spanning tree of the underlying undirected graph, rooted at the
    /// basepoint or vertex 0. Neighbours are visited in index order and the first edge
    /// found to a new vertex becomes its tree edge.
    pub fn spanning_tree(&self) -> Result<SpanningTree, NetworkError> {
        let n = self.vertices.len();
        if n == 0 {
            return Err(NetworkError::Disconnected);
        }
        let root = self.basepoint.unwrap_or(0);
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for w in self.undirected_neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    let edge = self
                        .edges
                        .iter()
                        .position(|e| e.joins(v, w))
                        .expect("neighbour implies an edge");
                    parent[w] = Some((v, edge));
                    queue.push_back(w);
                }
            }
        }
        if order.len() != n {
            return Err(NetworkError::Disconnected);
        }
        Ok(SpanningTree {
            root,
            order,
            parent,
        })
    }

    /// One fundamental loop per non-tree edge, in edge order: the tree path from the
    /// root to the edge's tail, the edge itself, then the tree path back to the root.
    pub fn cycle_basis(&self) -> Result<Vec<Path>, NetworkError> {
        let tree = self.spanning_tree()?;
        let mut loops = Vec::new();
        for (idx, e) in self.edges.iter().enumerate() {
            if tree.is_tree_edge(idx) {
                continue;
            }
            let mut verts = tree.path_from_root(e.from);
            let mut back = tree.path_from_root(e.to);
            back.reverse();
            verts.extend(back);
            let mut forward = Vec::with_capacity(verts.len() - 1);
            let split = tree.path_from_root(e.from).len() - 1;
            for (t, w) in verts.windows(2).enumerate() {
                if t == split {
                    forward.push(true);
                    continue;
                }
                // tree steps: orientation of the recorded tree edge
                let child = if tree.parent[w[1]].map(|(p, _)| p) == Some(w[0]) {
                    w[1]
                } else {
                    w[0]
                };
                let (_, te) = tree.parent[child].expect("non-root vertex has a tree edge");
                forward.push(self.edges[te].from == w[0]);
            }
            loops.push(Path {
                vertices: verts,
                forward,
            });
        }
        Ok(loops)
    }

    /// Simple directed paths from `from` to `to` with at most `max_len` edges, in
    /// lexicographic order of their vertex sequences.
    pub fn enumerate_paths(
        &self,
        from: &str,
        to: &str,
        max_len: usize,
    ) -> Result<Vec<Path>, NetworkError> {
        let from = self.require(from)?;
        let to = self.require(to)?;
        Ok(self.enumerate_paths_idx(from, to, max_len))
    }

    pub fn enumerate_paths_idx(&self, from: usize, to: usize, max_len: usize) -> Vec<Path> {
        if from == to {
            return vec![Path::trivial(from)];
        }
        let succ: Vec<BTreeSet<usize>> = (0..self.vertices.len())
            .map(|v| {
                self.edges
                    .iter()
                    .filter(|e| e.from == v)
                    .map(|e| e.to)
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut stack = vec![from];
        let mut on_path = vec![false; self.vertices.len()];
        on_path[from] = true;
        fn dfs(
            succ: &[BTreeSet<usize>],
            to: usize,
            max_len: usize,
            stack: &mut Vec<usize>,
            on_path: &mut [bool],
            out: &mut Vec<Path>,
        ) {
            let v = *stack.last().expect("stack is never empty");
            if v == to {
                out.push(Path {
                    vertices: stack.clone(),
                    forward: vec![true; stack.len() - 1],
                });
                return;
            }
            if stack.len() > max_len {
                return;
            }
            for &w in &succ[v] {
                if !on_path[w] {
                    on_path[w] = true;
                    stack.push(w);
                    dfs(succ, to, max_len, stack, on_path, out);
                    stack.pop();
                    on_path[w] = false;
                }
            }
        }
        dfs(&succ, to, max_len, &mut stack, &mut on_path, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(c: &str, leaves: [&str; 2]) -> Network {
        Network::from_names(
            &[c, leaves[0], leaves[1]],
            &[(c, leaves[0]), (c, leaves[1])],
        )
        .unwrap()
        .with_basepoint(c)
        .unwrap()
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            Network::from_names(&["A", "A"], &[]),
            Err(NetworkError::DuplicateVertex(_))
        ));
        assert!(matches!(
            Network::from_names(&["A"], &[("A", "B")]),
            Err(NetworkError::UnknownVertex(_))
        ));
        assert!(matches!(
            Network::from_names(&["A"], &[("A", "A")]),
            Err(NetworkError::SelfLoop(_))
        ));
    }

    #[test]
    fn connected_sum_of_stars_at_centres_has_degree_four_vertex() {
        let (sum, _) = star("U1", ["U2", "U3"])
            .connected_sum(&star("V1", ["V2", "V3"]))
            .unwrap();
        assert_eq!(sum.vertex_count(), 5);
        assert_eq!(sum.edges().len(), 4);
        assert!((0..5).any(|v| sum.degree(v) == 4));
    }

    #[test]
    fn connected_sum_at_a_leaf_has_no_degree_four_vertex() {
        let other = star("V1", ["V2", "V3"]).with_basepoint("V2").unwrap();
        let (sum, _) = star("U1", ["U2", "U3"]).connected_sum(&other).unwrap();
        assert!((0..sum.vertex_count()).all(|v| sum.degree(v) < 4));
    }

    #[test]
    fn connected_sum_with_one_point_is_neutral() {
        let n = star("U1", ["U2", "U3"]);
        let unit = Network::from_names::<&str>(&["E"], &[])
            .unwrap()
            .with_basepoint("E")
            .unwrap();
        let (sum, maps) = n.connected_sum(&unit).unwrap();
        assert_eq!(sum.vertex_count(), 3);
        assert_eq!(maps.left, vec![0, 1, 2]);
        let degrees: Vec<_> = (0..3).map(|v| sum.degree(v)).collect();
        assert_eq!(degrees, vec![2, 1, 1]);
        assert_eq!(sum.edges(), n.edges());
    }

    #[test]
    fn connected_sum_of_single_edges_at_heads() {
        let a = Network::from_names(&["A", "B"], &[("A", "B")])
            .unwrap()
            .with_basepoint("B")
            .unwrap();
        let c = Network::from_names(&["C", "D"], &[("C", "D")])
            .unwrap()
            .with_basepoint("D")
            .unwrap();
        let (sum, maps) = a.connected_sum(&c).unwrap();
        assert_eq!(sum.vertex_count(), 3);
        assert_eq!(sum.edges().len(), 2);
        assert_eq!(sum.name(1), "B.D");
        assert_eq!(maps.right, vec![2, 1]);
        assert_eq!(sum.basepoint(), Some(1));
        assert_eq!(sum.degree(1), 2);
    }

    #[test]
    fn connected_sum_requires_basepoints() {
        let a = Network::from_names(&["A"], &[] as &[(&str, &str)]).unwrap();
        assert_eq!(a.connected_sum(&a).unwrap_err(), NetworkError::Unpointed);
    }

    #[test]
    fn connected_sum_renames_collisions() {
        let a = star("U", ["X", "Y"]);
        let (sum, _) = a.connected_sum(&a).unwrap();
        let names: Vec<_> = sum.vertices().to_vec();
        assert_eq!(names, vec!["U.U", "X", "Y", "X'", "Y'"]);
    }

    #[test]
    fn contract_examples() {
        let one = Network::from_names(&["A", "B"], &[("A", "B")]).unwrap();
        let (c, _) = one.contract_edge(0, 1).unwrap();
        assert_eq!(c.vertex_count(), 1);
        assert!(c.edges().is_empty());

        let path = Network::from_names(&["A", "B", "C"], &[("A", "B"), ("B", "C")]).unwrap();
        let (c, map) = path.contract_edge(0, 1).unwrap();
        assert_eq!(c.vertices(), &["A".to_string(), "C".to_string()]);
        assert_eq!(c.edges(), &[Edge::new(0, 1)]);
        assert_eq!(map, vec![0, 0, 1]);

        let doubled = Network::from_names(
            &["A", "B", "C"],
            &[("A", "B"), ("B", "A"), ("B", "C"), ("A", "C")],
        )
        .unwrap();
        assert!(matches!(
            doubled.contract_edge(0, 1),
            Err(NetworkError::NotUnique { count: 2, .. })
        ));
        assert!(matches!(
            path.contract_edge(0, 2),
            Err(NetworkError::NoSuchEdge(..))
        ));
    }

    #[test]
    fn cycle_basis_counts() {
        let tree = Network::from_names(&["A", "B", "C"], &[("A", "B"), ("A", "C")]).unwrap();
        assert!(tree.cycle_basis().unwrap().is_empty());
        let tri =
            Network::from_names(&["A", "B", "C"], &[("A", "B"), ("B", "C"), ("C", "A")]).unwrap();
        let loops = tri.cycle_basis().unwrap();
        assert_eq!(loops.len(), 1);
        for l in &loops {
            assert!(l.is_loop());
            tri.validate_path(l).unwrap();
        }
        let k5 = Network::complete(5);
        let loops = k5.cycle_basis().unwrap();
        assert_eq!(loops.len(), 10 - 5 + 1);
        for l in &loops {
            assert_eq!(l.start(), 0);
            k5.validate_path(l).unwrap();
        }
        let split = Network::from_names::<&str>(&["A", "B"], &[]).unwrap();
        assert_eq!(split.cycle_basis().unwrap_err(), NetworkError::Disconnected);
    }

    #[test]
    fn enumerate_square_paths() {
        let sq = Network::from_names(
            &["U1", "U2", "U3", "U4"],
            &[("U1", "U2"), ("U2", "U4"), ("U1", "U3"), ("U3", "U4")],
        )
        .unwrap();
        let paths = sq.enumerate_paths("U1", "U4", 3).unwrap();
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[0].vertices, vec![0, 1, 3]);
        assert_eq!(paths[1].vertices, vec![0, 2, 3]);
        assert_eq!(
            sq.enumerate_paths("U2", "U2", 3).unwrap(),
            vec![Path::trivial(1)]
        );
        assert!(sq.enumerate_paths("U4", "U1", 3).unwrap().is_empty());
        assert!(matches!(
            sq.enumerate_paths("U1", "Z", 3),
            Err(NetworkError::UnknownVertex(_))
        ));
        assert!(sq.enumerate_paths("U1", "U4", 1).unwrap().is_empty());
    }

    #[test]
    fn path_inverse_and_concat() {
        let tri = Network::from_names(&["A", "B", "C"], &[("A", "B"), ("B", "C")]).unwrap();
        let p = tri.path(&[0, 1, 2]).unwrap();
        assert_eq!(p.forward, vec![true, true]);
        let q = p.inverse();
        assert_eq!(q.forward, vec![false, false]);
        tri.validate_path(&q).unwrap();
        let lp = p.concat(&q).unwrap();
        assert!(lp.is_loop());
        assert_eq!(lp.len(), 4);
        assert!(tri.path(&[0, 2]).is_err());
    }
}
