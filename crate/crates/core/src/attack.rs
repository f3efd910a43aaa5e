//! Attacks by coalitions of registered users.
//!
//! Adversary model: group parameters and the construction of the schedule are public;
//! intruders know every key incident to one of them; keys between two honest users
//! are secret. Optionally some values of the band-valued 2-cochain are disclosed
//! (`band_observations`), standing in for whatever session traffic leaks.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::cochain::{ascending_tuples, Cochain, CochainError};
use crate::gerbe_tower::{GerbeError, TowerSchedule};
use crate::groups::{GroupElement, GroupError, GroupSpec};

/// Exhaustive searches refuse groups larger than this.
pub const EXHAUSTIVE_ORDER_LIMIT: u64 = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AttackError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error(transparent)]
    Gerbe(#[from] GerbeError),
    #[error("the coalition does not know the key between #{0} and #{1}")]
    MissingKey(usize, usize),
    #[error("the band must be commutative")]
    NonAbelianBand,
    #[error("attack needs {expected} intruders, got {got}")]
    WrongIntruderCount { expected: usize, got: usize },
    #[error("exhaustive search over a group of order {0} is out of range")]
    TooLarge(u64),
    #[error("invalid target: {0}")]
    InvalidTarget(String),
}

/// What a coalition of intruders knows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntruderView {
    pub intruders: Vec<usize>,
    pub spec: GroupSpec,
    pub vertex_count: usize,
    /// Keys `value(a, b)` for `a < b` with `a` or `b` an intruder.
    pub known: BTreeMap<(usize, usize), GroupElement>,
    /// Disclosed values of the derived 2-cochain on ascending triples.
    pub band_observations: BTreeMap<Vec<usize>, GroupElement>,
}

impl IntruderView {
    pub fn observe(keys: &Cochain, intruders: &[usize]) -> Result<Self, AttackError> {
        if keys.degree() != 1 {
            return Err(CochainError::WrongDegree {
                expected: 1,
                got: keys.degree(),
            }
            .into());
        }
        let n = keys.vertex_count();
        if let Some(&bad) = intruders.iter().find(|&&v| v >= n) {
            return Err(AttackError::InvalidTarget(format!(
                "intruder #{bad} out of range"
            )));
        }
        let set: BTreeSet<usize> = intruders.iter().copied().collect();
        let known = ascending_tuples(n, 2)
            .into_iter()
            .filter(|t| set.contains(&t[0]) || set.contains(&t[1]))
            .map(|t| ((t[0], t[1]), keys.get(&t)))
            .collect();
        Ok(Self {
            intruders: intruders.to_vec(),
            spec: keys.spec(),
            vertex_count: n,
            known,
            band_observations: BTreeMap::new(),
        })
    }

    pub fn with_observations(mut self, obs: BTreeMap<Vec<usize>, GroupElement>) -> Self {
        self.band_observations = obs;
        self
    }

    pub fn key(&self, a: usize, b: usize) -> Option<GroupElement> {
        if a == b {
            return Some(self.spec.identity());
        }
        if a < b {
            self.known.get(&(a, b)).copied()
        } else {
            self.known.get(&(b, a)).map(|v| v.inverse())
        }
    }

    fn require(&self, a: usize, b: usize) -> Result<GroupElement, AttackError> {
        self.key(a, b).ok_or(AttackError::MissingKey(a, b))
    }
}

/// Single-intruder meet in the middle: `value(l, i)^-1 * value(l, j)`.
pub fn mitm_torsor(
    view: &IntruderView,
    l: usize,
    i: usize,
    j: usize,
) -> Result<GroupElement, AttackError> {
    Ok(view.require(l, i)?.inverse() * view.require(l, j)?)
}

/// Pairs where the meet-in-the-middle guess through `l` differs from the true key.
pub fn mitm_failures(keys: &Cochain, l: usize) -> Result<Vec<(usize, usize)>, AttackError> {
    let view = IntruderView::observe(keys, &[l])?;
    let mut out = Vec::new();
    for t in ascending_tuples(keys.vertex_count(), 2) {
        let (i, j) = (t[0], t[1]);
        if i == l || j == l {
            continue;
        }
        if mitm_torsor(&view, l, i, j)? != keys.get(&t) {
            out.push((i, j));
        }
    }
    Ok(out)
}

/// Band value of a triple given its three keys: `u_li * u_ij * u_jl`, divided into
/// the kernel when the keys live in `Z/p^k` with `k >= 2`. `None` when the product
/// leaves the kernel (the projected keys are not a cocycle there).
fn band_value(
    spec: GroupSpec,
    u_li: GroupElement,
    u_ij: GroupElement,
    u_jl: GroupElement,
) -> Option<GroupElement> {
    let d = u_li * u_ij * u_jl;
    match spec.ext_params() {
        Some((_, k)) if k >= 2 => d.ext_kernel_div().ok(),
        _ => Some(d),
    }
}

fn band_spec(spec: GroupSpec) -> Result<GroupSpec, GroupError> {
    match spec.ext_params() {
        Some((p, k)) if k >= 2 => GroupSpec::ext_chain(p, 1),
        _ => Ok(spec),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhaseA {
    /// `u_ljd - u_ljc - u_ijd + u_ijc`, which the cocycle relations equate with
    /// `u_lcd - u_icd`.
    pub delta: GroupElement,
    /// Whether `u_lcd - u_icd` takes the same value for every candidate `u_cd`.
    pub ucd_cancels: bool,
    /// The exceptional case `u_dl * u_lc = (u_di * u_ic)^-1`.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Recovered { key: GroupElement },
    Degenerate { candidates: Vec<GroupElement> },
    CandidateSet { candidates: Vec<GroupElement> },
}

impl Verdict {
    pub fn candidates(&self) -> Vec<GroupElement> {
        match self {
            Verdict::Recovered { key } => vec![*key],
            Verdict::Degenerate { candidates } | Verdict::CandidateSet { candidates } => {
                candidates.clone()
            }
        }
    }

    pub fn contains(&self, key: &GroupElement) -> bool {
        self.candidates().contains(key)
    }

    fn from_candidates(candidates: Vec<GroupElement>, degenerate: bool) -> Self {
        match candidates.as_slice() {
            [only] => Verdict::Recovered { key: *only },
            _ if degenerate => Verdict::Degenerate { candidates },
            _ => Verdict::CandidateSet { candidates },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GerbeAttackReport {
    /// `None` when the target key is already in the view.
    pub phase_a: Option<PhaseA>,
    pub verdict: Verdict,
}

/// Three-intruder attack on the key between `c` and `d`.
///
/// Phase A evaluates the literal chain of cocycle relations. Phase B keeps every value
/// `x` of `u_cd` for which the keys restricted to `{i, j, l, c, d}` stay consistent:
/// every triple has a band value, every disclosed band value is reproduced and the
/// band values satisfy the cocycle relation on each 4-subset.
pub fn gerbe_attack_3(
    view: &IntruderView,
    c: usize,
    d: usize,
) -> Result<GerbeAttackReport, AttackError> {
    if view.intruders.len() != 3 {
        return Err(AttackError::WrongIntruderCount {
            expected: 3,
            got: view.intruders.len(),
        });
    }
    if !view.spec.is_abelian() {
        return Err(AttackError::NonAbelianBand);
    }
    if c == d || c >= view.vertex_count || d >= view.vertex_count {
        return Err(AttackError::InvalidTarget(format!("({c}, {d})")));
    }
    if let Some(key) = view.key(c, d) {
        return Ok(GerbeAttackReport {
            phase_a: None,
            verdict: Verdict::Recovered { key },
        });
    }
    let (i, j, l) = (view.intruders[0], view.intruders[1], view.intruders[2]);
    let local = [i, j, l, c, d];
    let spec = view.spec;
    let band = band_spec(spec)?;
    let ident = band.identity();

    // keys on the five vertices; slot (3, 4) is the unknown
    let mut k = [[spec.identity(); 5]; 5];
    for a in 0..5 {
        for b in 0..5 {
            if a != b && !(a >= 3 && b >= 3) {
                k[a][b] = view.require(local[a], local[b])?;
            }
        }
    }
    let triple = |k: &[[GroupElement; 5]; 5], a: usize, b: usize, e: usize| {
        band_value(spec, k[e][a], k[a][b], k[b][e])
    };

    // observations whose three keys sit on the five vertices
    let slot = |v: usize| local.iter().position(|&x| x == v);
    let mut obs = Vec::new();
    for (t, &val) in &view.band_observations {
        if let (Some(a), Some(b), Some(e)) = (slot(t[0]), slot(t[1]), slot(t[2])) {
            obs.push((a, b, e, val));
        }
    }

    let groups = spec.elements()?;
    let triples = ascending_tuples(5, 3);
    let quads = ascending_tuples(5, 4);
    let mut candidates = Vec::new();
    let mut cancels = BTreeSet::new();
    'values: for &x in &groups {
        k[3][4] = x;
        k[4][3] = x.inverse();
        // band values on every ordered triple, filled by antisymmetry
        let mut vals = [[[ident; 5]; 5]; 5];
        for t in &triples {
            let (a, b, e) = (t[0], t[1], t[2]);
            let Some(v) = triple(&k, a, b, e) else {
                continue 'values;
            };
            let w = v.inverse();
            (vals[a][b][e], vals[b][e][a], vals[e][a][b]) = (v, v, v);
            (vals[b][a][e], vals[a][e][b], vals[e][b][a]) = (w, w, w);
        }
        let get = |a: usize, b: usize, e: usize| vals[a][b][e];
        cancels.insert(get(2, 3, 4) * get(0, 3, 4).inverse());
        if obs.iter().any(|&(a, b, e, val)| get(a, b, e) != val) {
            continue;
        }
        let rel = quads.iter().all(|q| {
            get(q[1], q[2], q[3])
                * get(q[0], q[2], q[3]).inverse()
                * get(q[0], q[1], q[3])
                * get(q[0], q[1], q[2]).inverse()
                == ident
        });
        if rel {
            candidates.push(x);
        }
    }
    k[3][4] = spec.identity();
    k[4][3] = spec.identity();

    // Phase A: the combination of the relations on {i,j,c,d} and {l,j,c,d}
    let band_at = |a: usize, b: usize, e: usize| triple(&k, a, b, e).unwrap_or(ident);
    let delta = band_at(2, 1, 4)
        * band_at(2, 1, 3).inverse()
        * band_at(0, 1, 4).inverse()
        * band_at(0, 1, 3);
    let degenerate = k[4][2] * k[2][3] == (k[4][0] * k[0][3]).inverse();
    let phase_a = PhaseA {
        delta,
        ucd_cancels: cancels.len() <= 1,
        degenerate,
    };
    Ok(GerbeAttackReport {
        phase_a: Some(phase_a),
        verdict: Verdict::from_candidates(candidates, degenerate),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImpossibilityCase {
    pub intruders: [usize; 2],
    pub target: [usize; 2],
    pub views: u64,
    /// Views for which every group value of `u_cd` was exhibited.
    pub full_views: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImpossibilityReport {
    pub group: GroupSpec,
    pub vertex_count: usize,
    pub cases: Vec<ImpossibilityCase>,
    /// True when every view admits every value of `u_cd`.
    pub all_values_attainable: bool,
    /// On torsor schedules the meet-in-the-middle key is the only admissible value.
    pub torsor_contrast_unique: bool,
}

/// Checks, for every choice of two intruders and two honest targets and for every
/// assignment of the keys the intruders see, that each group value `x` of `u_cd` is
/// realised by a schedule reproducing the view: the exhibited schedule takes the view's
/// keys, `u_cd = x`, and the identity on the remaining honest pairs, and is checked
/// against the view's keys and against every band value the view determines.
pub fn gerbe_impossibility_2(
    group: GroupSpec,
    vertex_count: usize,
) -> Result<ImpossibilityReport, AttackError> {
    let order = group.order();
    if order > EXHAUSTIVE_ORDER_LIMIT || vertex_count > 5 {
        return Err(AttackError::TooLarge(order));
    }
    if !group.is_abelian() {
        return Err(AttackError::NonAbelianBand);
    }
    if vertex_count < 4 {
        return Err(AttackError::InvalidTarget(
            "two intruders and two targets need 4 vertices".into(),
        ));
    }
    let elems = group.elements()?;
    let n = vertex_count;
    let pairs = ascending_tuples(n, 2);
    let mut cases = Vec::new();
    let mut all_full = true;
    let mut contrast_unique = true;
    for inter in ascending_tuples(n, 2) {
        let (a, b) = (inter[0], inter[1]);
        let honest: Vec<usize> = (0..n).filter(|&v| v != a && v != b).collect();
        let incident: Vec<usize> = (0..pairs.len())
            .filter(|&p| pairs[p].contains(&a) || pairs[p].contains(&b))
            .collect();
        let is_known = |x: usize, y: usize| x == a || x == b || y == a || y == b;
        let determined: Vec<Vec<usize>> = ascending_tuples(n, 3)
            .into_iter()
            .filter(|t| is_known(t[0], t[1]) && is_known(t[1], t[2]) && is_known(t[0], t[2]))
            .collect();
        for tgt in ascending_tuples(honest.len(), 2) {
            let (c, d) = (honest[tgt[0]], honest[tgt[1]]);
            let views = order.pow(incident.len() as u32);
            let mut full_views = 0;
            let mut view = [[group.identity(); 5]; 5];
            let mut s = view;
            for code in 0..views {
                let mut rest = code;
                for &p in &incident {
                    let (x, y) = (pairs[p][0], pairs[p][1]);
                    view[x][y] = elems[(rest % order) as usize];
                    view[y][x] = view[x][y].inverse();
                    rest /= order;
                }
                let mut attained = 0;
                for &x in &elems {
                    // view keys, u_cd = x, identity on the other honest pairs
                    for p in 0..n {
                        for q in 0..n {
                            s[p][q] = if is_known(p, q) {
                                view[p][q]
                            } else {
                                group.identity()
                            };
                        }
                    }
                    s[c][d] = x;
                    s[d][c] = x.inverse();
                    let reproduces = incident.iter().all(|&p| {
                        let (u, v) = (pairs[p][0], pairs[p][1]);
                        s[u][v] == view[u][v]
                    }) && determined.iter().all(|t| {
                        let (i, j, l) = (t[0], t[1], t[2]);
                        view[l][i] * view[i][j] * view[j][l] == s[l][i] * s[i][j] * s[j][l]
                    });
                    if reproduces && s[c][d] == x {
                        attained += 1;
                    }
                }
                if attained == order {
                    full_views += 1;
                } else {
                    all_full = false;
                }
            }
            if code_contrast(group, n, a, c, d)? != 1 {
                contrast_unique = false;
            }
            cases.push(ImpossibilityCase {
                intruders: [a, b],
                target: [c, d],
                views,
                full_views,
            });
        }
    }
    Ok(ImpossibilityReport {
        group,
        vertex_count,
        cases,
        all_values_attainable: all_full,
        torsor_contrast_unique: contrast_unique,
    })
}

/// Number of values of `u_cd` compatible with a torsor schedule whose keys at the
/// intruder `a` are fixed (the honest pairs other than `(c, d)` are routed through
/// `a`). A torsor pins `u_cd` to `u_ca * u_ad`.
fn code_contrast(
    group: GroupSpec,
    n: usize,
    a: usize,
    c: usize,
    d: usize,
) -> Result<usize, AttackError> {
    let elems = group.elements()?;
    let base: Vec<GroupElement> = (0..n).map(|v| elems[(v * 3 + 1) % elems.len()]).collect();
    let torsor = crate::cochain::coboundary(&Cochain::from_vertex_values(&base)?)?;
    let mut count = 0;
    for &x in &elems {
        let mut s = torsor.clone();
        s.set(&[c, d], x)?;
        if crate::cochain::is_cocycle(&s)?.holds {
            count += 1;
            debug_assert_eq!(x, torsor.get(&[c, a]) * torsor.get(&[a, d]));
        }
    }
    Ok(count)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerAttackReport {
    pub level: u32,
    /// Base key recovered through the anchor intruder.
    pub base_key: Option<GroupElement>,
    pub verdict: Verdict,
    /// Candidate sets of the recursion, from level 1 up.
    pub trail: Vec<Vec<GroupElement>>,
}

/// Recursive attack on the level-`n` key between `i` and `j` with `n + 3` intruders.
///
/// Level 1 runs the three-intruder gerbe attack on the level-1 keys with the last three
/// intruders. Level `n >= 2` restricts to the first intruder: it recovers the base key
/// `b_ij` by meet in the middle through it, recurses on level `n - 1` with the other
/// intruders, and keeps the level-`n` values that project into the lower candidate set
/// and agree with the lift of `b_ij`.
pub fn tower_attack(
    t: &TowerSchedule,
    intruders: &[usize],
    i: usize,
    j: usize,
    observations: &BTreeMap<Vec<usize>, GroupElement>,
) -> Result<TowerAttackReport, AttackError> {
    tower_attack_at(t, t.levels(), intruders, i, j, observations)
}

fn tower_attack_at(
    t: &TowerSchedule,
    level: u32,
    intruders: &[usize],
    i: usize,
    j: usize,
    observations: &BTreeMap<Vec<usize>, GroupElement>,
) -> Result<TowerAttackReport, AttackError> {
    let expected = level as usize + 3;
    if intruders.len() != expected {
        return Err(AttackError::WrongIntruderCount {
            expected,
            got: intruders.len(),
        });
    }
    if level == 0 {
        return Err(GerbeError::LevelOutOfRange {
            level,
            levels: t.levels(),
        }
        .into());
    }
    let keys = t.level_keys(level)?;
    if level == 1 {
        let view =
            IntruderView::observe(&keys, &intruders[1..])?.with_observations(observations.clone());
        let report = gerbe_attack_3(&view, i, j)?;
        let cands = report.verdict.candidates();
        return Ok(TowerAttackReport {
            level,
            base_key: None,
            verdict: report.verdict,
            trail: vec![cands],
        });
    }
    let lower = tower_attack_at(t, level - 1, &intruders[1..], i, j, observations)?;
    let base_view = IntruderView::observe(t.base(), &intruders[..1])?;
    let b = mitm_torsor(&base_view, intruders[0], i, j)?;
    let lifted = b.lift_to(level + 1)?;
    let lower_cands = lower.verdict.candidates();
    let candidates: Vec<GroupElement> = keys
        .spec()
        .elements()?
        .into_iter()
        .filter(|y| {
            y.ext_project()
                .map(|p| lower_cands.contains(&p))
                .unwrap_or(false)
                && *y == lifted
        })
        .collect();
    let mut trail = lower.trail;
    trail.push(candidates.clone());
    Ok(TowerAttackReport {
        level,
        base_key: Some(b),
        verdict: Verdict::from_candidates(candidates, false),
        trail,
    })
}
