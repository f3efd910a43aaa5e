//! Scenario files.

use std::collections::BTreeMap;
use std::str::FromStr;

use cochain_net::cochain::{coboundary, Cochain, KeySchedule};
use cochain_net::groups::{GroupDescriptor, GroupElement, GroupSpec};
use cochain_net::linkcrypt::expand_genus_keys;
use cochain_net::network::{Edge, Network};
use cochain_net::secrecy::{Distribution, Rational};
use serde::Deserialize;

use crate::error::CliError;

pub const SEED_ENV: &str = "COCHAIN_NET_SEED";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub seed: Option<u64>,
    group: Option<toml::Spanned<GroupDescriptor>>,
    #[serde(skip)]
    resolved: Option<GroupSpec>,
    pub network: Option<NetworkSection>,
    pub keys: Option<BTreeMap<String, u64>>,
    pub chain: Option<BTreeMap<String, u64>>,
    pub gerbe: Option<GerbeSection>,
    pub tower: Option<TowerSection>,
    pub genus: Option<GenusSection>,
    pub connection: Option<BTreeMap<String, u64>>,
    pub kdc: Option<KdcSection>,
    pub dh: Option<DhSection>,
    pub distributions: Option<DistributionsSection>,
    pub attack: Option<AttackSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    pub basepoint: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GerbeSection {
    pub p: Option<u64>,
    /// Private 0-chain over `Z/p`.
    pub chain: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerSection {
    pub p: Option<u64>,
    pub levels: u32,
    /// Base 1-cocycle, given directly ...
    pub base: Option<BTreeMap<String, u64>>,
    /// ... or as the coboundary of a 0-chain.
    pub base_chain: Option<BTreeMap<String, u64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenusSection {
    pub generators: Vec<u64>,
    pub boundary: Vec<String>,
    #[serde(default)]
    pub interior: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KdcSection {
    pub center: String,
    pub master: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DhSection {
    #[serde(default)]
    pub privates: BTreeMap<String, u64>,
    #[serde(default = "default_form")]
    pub form: cochain_net::pubkey::ConnectionForm,
}

fn default_form() -> cochain_net::pubkey::ConnectionForm {
    cochain_net::pubkey::ConnectionForm::Dh
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionsSection {
    /// Plaintext law per vertex, as rationals `"n/d"` listed in element order.
    #[serde(default)]
    pub plaintext: BTreeMap<String, Vec<String>>,
    /// Key law per directed hop `"A-B"` (keys used by A to send to B).
    #[serde(default)]
    pub keys: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackSection {
    pub intruders: Vec<String>,
    pub target: (String, String),
    /// Disclosed band values on triples `"A-B-C"`.
    #[serde(default)]
    pub observations: BTreeMap<String, u64>,
}

/// Which key-schedule section a scenario carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Keys,
    Chain,
    Gerbe,
    Tower,
    Genus,
}

impl Flavor {
    pub fn name(self) -> &'static str {
        match self {
            Flavor::Keys => "keys",
            Flavor::Chain => "chain",
            Flavor::Gerbe => "gerbe",
            Flavor::Tower => "tower",
            Flavor::Genus => "genus",
        }
    }
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    (line, col)
}

impl Scenario {
    pub fn parse(src: &str) -> Result<Self, CliError> {
        let mut sc: Scenario = toml::from_str(src).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| line_col(src, s.start));
            CliError::Parse {
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        if let Some(g) = &sc.group {
            let spec = GroupSpec::try_from(g.get_ref().clone()).map_err(|e| {
                let (line, column) = line_col(src, g.span().start);
                CliError::Located {
                    line,
                    column,
                    inner: Box::new(e.into()),
                }
            })?;
            sc.resolved = Some(spec);
        }
        sc.flavor()?;
        sc.group()?;
        Ok(sc)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&src)
    }

    pub fn flavor(&self) -> Result<Flavor, CliError> {
        let present: Vec<Flavor> = [
            (self.keys.is_some(), Flavor::Keys),
            (self.chain.is_some(), Flavor::Chain),
            (self.gerbe.is_some(), Flavor::Gerbe),
            (self.tower.is_some(), Flavor::Tower),
            (self.genus.is_some(), Flavor::Genus),
        ]
        .into_iter()
        .filter_map(|(p, f)| p.then_some(f))
        .collect();
        match present.as_slice() {
            [] => Err(CliError::MissingSection("keys".into())),
            [one] => Ok(*one),
            many => Err(CliError::Invalid(format!(
                "a scenario carries one key schedule, found [{}]",
                many.iter().map(|f| f.name()).collect::<Vec<_>>().join(", ")
            ))),
        }
    }

    /// The `[group]` table, or `Z/p` implied by a `[tower]` or `[gerbe]` prime.
    pub fn group(&self) -> Result<GroupSpec, CliError> {
        let implied = match (&self.tower, &self.gerbe) {
            (Some(TowerSection { p: Some(p), .. }), _)
            | (_, Some(GerbeSection { p: Some(p), .. })) => Some(GroupSpec::ext_chain(*p, 1)?),
            _ => None,
        };
        match (self.resolved, implied) {
            (Some(g), Some(i)) if g != i => Err(CliError::Invalid(format!(
                "[group] is {g} but the prime implies {i}"
            ))),
            (Some(g), _) | (None, Some(g)) => Ok(g),
            (None, None) => Err(CliError::MissingSection("group".into())),
        }
    }

    pub fn network(&self) -> Result<Network, CliError> {
        if let Some(g) = &self.genus {
            return Ok(self.genus_schedule(g)?.network().clone());
        }
        let sec = self
            .network
            .as_ref()
            .ok_or_else(|| CliError::MissingSection("network".into()))?;
        let index = |name: &str| {
            sec.vertices
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| CliError::UnknownVertex(name.to_string()))
        };
        let mut edges = Vec::with_capacity(sec.edges.len());
        for (a, b) in &sec.edges {
            edges.push(Edge::new(index(a)?, index(b)?));
        }
        let net = Network::new(sec.vertices.clone(), edges)?;
        match &sec.basepoint {
            Some(b) => Ok(net.with_basepoint(b)?),
            None => Ok(net),
        }
    }

    pub fn element(&self, value: u64) -> Result<GroupElement, CliError> {
        Ok(self.group()?.element(value)?)
    }

    /// The pairwise key schedule of the scenario's key section.
    pub fn schedule(&self) -> Result<KeySchedule, CliError> {
        let flavor = self.flavor()?;
        let net = self.network()?;
        let n = net.vertex_count();
        let keys = match flavor {
            Flavor::Keys => self.pairs(&net, self.keys.as_ref().expect("flavor"))?,
            Flavor::Chain => coboundary(&self.chain0(&net, self.chain.as_ref().expect("flavor"))?)?,
            Flavor::Gerbe => {
                let c0 = self.chain0(&net, &self.gerbe.as_ref().expect("flavor").chain)?;
                cochain_net::pubkey::ConnectiveStructure::canonical(c0)?
                    .c1()
                    .clone()
            }
            Flavor::Tower => self.tower_base(&net)?,
            Flavor::Genus => return self.genus_schedule(self.genus.as_ref().expect("flavor")),
        };
        debug_assert_eq!(keys.vertex_count(), n);
        Ok(KeySchedule::new(net, keys)?)
    }

    pub fn tower_base(&self, net: &Network) -> Result<Cochain, CliError> {
        let t = self
            .tower
            .as_ref()
            .ok_or_else(|| CliError::MissingSection("tower".into()))?;
        match (&t.base, &t.base_chain) {
            (Some(b), None) => self.pairs(net, b),
            (None, Some(c)) => Ok(coboundary(&self.chain0(net, c)?)?),
            _ => Err(CliError::Invalid(
                "[tower] needs exactly one of `base` and `base_chain`".into(),
            )),
        }
    }

    fn genus_schedule(&self, g: &GenusSection) -> Result<KeySchedule, CliError> {
        let gens = g
            .generators
            .iter()
            .map(|&v| self.element(v))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(expand_genus_keys(&gens, &g.boundary, &g.interior)?.schedule)
    }

    pub fn chain0(&self, net: &Network, vals: &BTreeMap<String, u64>) -> Result<Cochain, CliError> {
        let mut values = vec![self.group()?.identity(); net.vertex_count()];
        for (name, &v) in vals {
            values[vertex(net, name)?] = self.element(v)?;
        }
        Ok(Cochain::from_vertex_values(&values)?)
    }

    /// Pairwise keys; unlisted pairs get the identity.
    pub fn pairs(&self, net: &Network, vals: &BTreeMap<String, u64>) -> Result<Cochain, CliError> {
        let mut c = Cochain::identity(1, self.group()?, net.vertex_count())?;
        let mut seen = BTreeMap::new();
        for (label, &v) in vals {
            let t = tuple(net, label, 2)?;
            let key = (t[0].min(t[1]), t[0].max(t[1]));
            if let Some(prev) = seen.insert(key, label.clone()) {
                return Err(CliError::Invalid(format!(
                    "`{label}` and `{prev}` key the same pair"
                )));
            }
            c.set(&t, self.element(v)?)?;
        }
        Ok(c)
    }

    pub fn connection(&self, net: &Network) -> Result<Cochain, CliError> {
        match &self.connection {
            Some(c) => self.chain0(net, c),
            None => Ok(Cochain::identity(0, self.group()?, net.vertex_count())?),
        }
    }
}

pub fn vertex(net: &Network, name: &str) -> Result<usize, CliError> {
    net.index_of(name)
        .ok_or_else(|| CliError::UnknownVertex(name.to_string()))
}

/// Parses `"A-B-C"`, or names written back to back (`"ABC"`) when the split is unique.
pub fn tuple(net: &Network, label: &str, len: usize) -> Result<Vec<usize>, CliError> {
    if label.contains('-') {
        let parts: Vec<&str> = label.split('-').collect();
        if parts.len() == len {
            let t = parts
                .iter()
                .map(|p| vertex(net, p))
                .collect::<Result<Vec<_>, _>>()?;
            return distinct(label, t);
        }
    }
    let mut found = Vec::new();
    split_names(net, label, len, &mut Vec::new(), &mut found);
    match found.len() {
        1 => distinct(label, found.pop().expect("one")),
        0 => Err(CliError::UnknownVertex(label.to_string())),
        _ => Err(CliError::Invalid(format!(
            "`{label}` splits into vertex names in several ways"
        ))),
    }
}

fn distinct(label: &str, t: Vec<usize>) -> Result<Vec<usize>, CliError> {
    let mut s = t.clone();
    s.sort_unstable();
    s.dedup();
    if s.len() != t.len() {
        return Err(CliError::Invalid(format!("`{label}` repeats a vertex")));
    }
    Ok(t)
}

fn split_names(
    net: &Network,
    rest: &str,
    len: usize,
    acc: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
) {
    if acc.len() == len {
        if rest.is_empty() {
            found.push(acc.clone());
        }
        return;
    }
    for (v, name) in net.vertices().iter().enumerate() {
        if let Some(tail) = rest.strip_prefix(name.as_str()) {
            acc.push(v);
            split_names(net, tail, len, acc, found);
            acc.pop();
        }
    }
}

pub fn parse_path(net: &Network, spec: &str) -> Result<Vec<usize>, CliError> {
    spec.split(',').map(|s| vertex(net, s.trim())).collect()
}

pub fn distribution(values: &[String]) -> Result<Distribution, CliError> {
    let probs = values
        .iter()
        .map(|s| {
            Rational::from_str(s.trim())
                .map_err(|_| CliError::Invalid(format!("`{s}` is not a rational")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Distribution::new(probs)?)
}
