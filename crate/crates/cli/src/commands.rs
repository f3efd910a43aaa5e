use std::collections::BTreeMap;
use std::time::Instant;

use cochain_net::attack::{
    gerbe_attack_3, mitm_failures, mitm_torsor, tower_attack, IntruderView, Verdict,
};
use cochain_net::cochain::{ascending_tuples, is_cocycle, trivialize, Cochain, Trivialization};
use cochain_net::gerbe_tower::{build_gerbe, build_tower, describe_tower, TowerSchedule};
use cochain_net::groups::{GroupElement, GroupKind, GroupSpec};
use cochain_net::kdc::{brute_force_cost, holonomy_cost, KdcState};
use cochain_net::linkcrypt::{act, holonomy_map, trace_header, GenusExpansion};
use cochain_net::network::Network;
use cochain_net::pubkey::{
    connection_scheme_key, dh_shared, gerbe_public_key, tower_public_key, ConnectionForm,
    ConnectiveStructure, KeyPair, Level,
};
use cochain_net::secrecy::{
    ciphertext_dist, cond_entropy_key_given_cipher, entropy, entropy_cocycle_check,
    perfect_secrecy_nodes, perfect_secrecy_path, shannon_conditions, Distribution, Hop, PathModel,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::scenario::{distribution, parse_path, tuple, vertex, Flavor, Scenario};

/// Exit status of a report whose attack did not pin the key.
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug)]
pub struct Outcome {
    pub json: Value,
    pub exit: i32,
}

impl Outcome {
    fn ok(json: Value) -> Self {
        Self { json, exit: 0 }
    }
}

fn names(net: &Network, t: &[usize]) -> Vec<String> {
    t.iter().map(|&v| net.name(v).to_string()).collect()
}

fn label(net: &Network, t: &[usize]) -> String {
    names(net, t).join("-")
}

fn cochain_json(net: &Network, c: &Cochain) -> Value {
    let map: Map<String, Value> = c
        .entries()
        .into_iter()
        .map(|(t, v)| (label(net, &t), json!(v)))
        .collect();
    Value::Object(map)
}

fn verdict_exit(v: &Verdict) -> i32 {
    match v {
        Verdict::Recovered { .. } => 0,
        _ => EXIT_INFEASIBLE,
    }
}

pub fn verify_cocycle(sc: &Scenario) -> Result<Outcome, CliError> {
    let s = sc.schedule()?;
    let net = s.network();
    let check = is_cocycle(s.keys())?;
    let mut out = json!({
        "cocycle": check.holds,
        "kind": s.kind(),
        "group": s.spec().to_string(),
        "witness": check.witness.as_ref().map(|w| names(net, w)),
        "keys": cochain_json(net, s.keys()),
    });
    if let Some(w) = &check.witness {
        let (i, j, l) = (w[0], w[1], w[2]);
        out["witness_values"] = json!({
            "direct": s.key(i, l),
            "composed": s.key(i, j) * s.key(j, l),
        });
    }
    if let Some(g) = genus_summary(sc)? {
        out["genus"] = g;
    }
    Ok(Outcome::ok(out))
}

pub fn trivialize_cmd(sc: &Scenario) -> Result<Outcome, CliError> {
    let s = sc.schedule()?;
    let net = s.network();
    let out = match trivialize(&s)? {
        Trivialization::Trivial(u) => json!({
            "trivial": true,
            "chain": (0..net.vertex_count()).map(|v| (net.name(v).to_string(), json!(u.get(&[v])))).collect::<Map<_, _>>(),
        }),
        Trivialization::Obstructed(loops) => json!({
            "trivial": false,
            "holonomy": loops
                .iter()
                .map(|l| json!({ "loop": names(net, &l.vertices), "value": l.value }))
                .collect::<Vec<_>>(),
        }),
    };
    Ok(Outcome::ok(out))
}

/// Headers live in the key group, or in `(Z/2)^n` when keys are `n x n` matrices.
fn header_group(keys: GroupSpec) -> Result<GroupSpec, CliError> {
    match keys.kind() {
        GroupKind::MatGl { n } => Ok(GroupSpec::xor_vec(n)?),
        _ => Ok(keys),
    }
}

pub fn parse_u64(s: &str) -> Result<u64, CliError> {
    let t = s.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|_| CliError::Invalid(format!("`{s}` is not an unsigned integer")))
}

pub fn send(sc: &Scenario, path: &str, header: Option<&str>) -> Result<Outcome, CliError> {
    let s = sc.schedule()?;
    let net = s.network();
    let verts = parse_path(net, path)?;
    let p = net.path(&verts)?;
    let hg = header_group(s.spec())?;
    let h = match header {
        Some(v) => hg.element(parse_u64(v)?)?,
        None => hg.identity(),
    };
    let trace = trace_header(&s, &p, h)?;
    let received = trace.last().map_or(h, |t| t.header);
    let (first, last) = (p.start(), p.end());
    let (direct_key, direct) = if first == last {
        (s.spec().identity(), h)
    } else {
        let k = s.key(last, first);
        (k, act(&k, &h)?)
    };
    let conn = sc.connection(net)?;
    Ok(Outcome::ok(json!({
        "path": names(net, &verts),
        "header": h,
        "hops": trace
            .iter()
            .map(|t| json!({ "from": net.name(t.from), "to": net.name(t.to), "key": t.key, "header": t.header }))
            .collect::<Vec<_>>(),
        "received": received,
        "direct": { "key": direct_key, "received": direct },
        "path_independent": received == direct,
        "holonomy": holonomy_map(&s, &conn, &p)?,
    })))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn kdc_session(sc: &Scenario, from: &str, to: &str, seed: u64) -> Result<Outcome, CliError> {
    let sec = sc
        .kdc
        .as_ref()
        .ok_or_else(|| CliError::MissingSection("kdc".into()))?;
    let net = sc.network()?;
    let center = vertex(&net, &sec.center)?;
    let mut masters = BTreeMap::new();
    for (name, &v) in &sec.master {
        masters.insert(vertex(&net, name)?, sc.element(v)?);
    }
    let mut kdc = KdcState::new(net.clone(), center, masters)?;
    let (i, j) = (vertex(&net, from)?, vertex(&net, to)?);
    let session = kdc.establish_session(i, j, seed)?;
    Ok(Outcome::ok(json!({
        "seed": seed,
        "center": net.name(center),
        "session": {
            "initiator": net.name(session.initiator),
            "responder": net.name(session.responder),
            "key": session.key,
            "initiator_view": session.initiator_view,
            "responder_view": session.responder_view,
        },
        "consistent": session.initiator_view == session.key.inverse() && session.responder_view == session.key,
        "log": kdc
            .log()
            .iter()
            .map(|r| json!({
                "from": net.name(r.from),
                "to": net.name(r.to),
                "purpose": r.purpose,
                "ciphertext": hex(&r.ciphertext),
            }))
            .collect::<Vec<_>>(),
    })))
}

/// Pairwise agreement among named users; private keys not given are drawn from `seed`.
fn dh_report(
    group: GroupSpec,
    users: &[String],
    given: &BTreeMap<usize, u64>,
    form: ConnectionForm,
    seed: u64,
) -> Result<Value, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs_of_keys = Vec::with_capacity(users.len());
    for u in 0..users.len() {
        let kp = match given.get(&u) {
            Some(&a) => KeyPair::new(group, a, Level::Torsor)?,
            None => KeyPair::generate(group, &mut rng, Level::Torsor)?,
        };
        pairs_of_keys.push(kp);
    }
    let mut agreements = Vec::new();
    let mut all = true;
    for t in ascending_tuples(users.len(), 2) {
        let (a, b) = (&pairs_of_keys[t[0]], &pairs_of_keys[t[1]]);
        let (mine, theirs, agrees) = match form {
            ConnectionForm::Dh => {
                let x = dh_shared(a, &b.public)?;
                let y = dh_shared(b, &a.public)?;
                (x, y, x == y)
            }
            ConnectionForm::CoordinateChange => {
                let x = connection_scheme_key(a.private as i64, &b.public, form)?;
                let y = connection_scheme_key(b.private as i64, &a.public, form)?;
                (x, y, x == y.inverse())
            }
        };
        all &= agrees;
        agreements.push(json!({
            "pair": [users[t[0]], users[t[1]]],
            "initiator": mine,
            "responder": theirs,
            "agrees": agrees,
        }));
    }
    let users_json: Map<String, Value> = users
        .iter()
        .zip(&pairs_of_keys)
        .map(|(n, k)| {
            (
                n.clone(),
                json!({ "private": k.private, "public": k.public }),
            )
        })
        .collect();
    Ok(json!({
        "group": group.to_string(),
        "form": form,
        "seed": seed,
        "users": users_json,
        "agreements": agreements,
        "all_agree": all,
    }))
}

pub fn dh_scenario(sc: &Scenario, seed: u64) -> Result<Outcome, CliError> {
    let sec = sc
        .dh
        .as_ref()
        .ok_or_else(|| CliError::MissingSection("dh".into()))?;
    let net = sc.network()?;
    let mut given = BTreeMap::new();
    for (name, &a) in &sec.privates {
        given.insert(vertex(&net, name)?, a);
    }
    Ok(Outcome::ok(dh_report(
        sc.group()?,
        net.vertices(),
        &given,
        sec.form,
        seed,
    )?))
}

pub fn dh_flags(p: u64, alpha: Option<u64>, seed: u64) -> Result<Outcome, CliError> {
    let group = match alpha {
        Some(a) => GroupSpec::cyclic_mul(p, a)?,
        None => GroupSpec::cyclic_mul_default(p)?,
    };
    let users = vec!["U".to_string(), "V".to_string()];
    Ok(Outcome::ok(dh_report(
        group,
        &users,
        &BTreeMap::new(),
        ConnectionForm::Dh,
        seed,
    )?))
}

pub fn gerbe_keys(sc: &Scenario) -> Result<Outcome, CliError> {
    let sec = sc
        .gerbe
        .as_ref()
        .ok_or_else(|| CliError::MissingSection("gerbe".into()))?;
    let net = sc.network()?;
    let cs = ConnectiveStructure::canonical(sc.chain0(&net, &sec.chain)?)?;
    let publics: Map<String, Value> = (0..net.vertex_count())
        .map(|v| Ok((net.name(v).to_string(), json!(cs.public(v)?))))
        .collect::<Result<_, CliError>>()?;
    let mut agreements = Vec::new();
    let mut all = true;
    for t in ascending_tuples(net.vertex_count(), 2) {
        let a = gerbe_public_key(&cs, t[0], t[1])?;
        let matches = a.initiator == cs.c1().get(&t);
        all &= a.agrees() && matches;
        agreements.push(json!({
            "pair": names(&net, &t),
            "initiator": a.initiator,
            "responder": a.responder,
            "agrees": a.agrees(),
            "matches_c1": matches,
        }));
    }
    let keys_check = is_cocycle(cs.c1())?;
    let gerbe = build_gerbe(net.clone(), cs.c1().clone())?;
    let derived_check = is_cocycle(gerbe.derived())?;
    Ok(Outcome::ok(json!({
        "group": cs.c1().spec().to_string(),
        "band": gerbe.band().to_string(),
        "public": publics,
        "agreements": agreements,
        "all_agree": all,
        "keys": cochain_json(&net, cs.c1()),
        "keys_cocycle": keys_check.holds,
        "derived": cochain_json(&net, gerbe.derived()),
        "derived_cocycle": derived_check.holds,
    })))
}

fn tower(sc: &Scenario) -> Result<TowerSchedule, CliError> {
    let sec = sc
        .tower
        .as_ref()
        .ok_or_else(|| CliError::MissingSection("tower".into()))?;
    let net = sc.network()?;
    let p = match sc.group()?.kind() {
        GroupKind::ExtChain { p, depth: 1 } => p,
        _ => {
            return Err(CliError::Invalid(
                "a tower base lives in an extension chain of depth 1".into(),
            ))
        }
    };
    let base = sc.tower_base(&net)?;
    Ok(build_tower(net, p, sec.levels, base)?)
}

pub fn tower_build(sc: &Scenario) -> Result<Outcome, CliError> {
    let t = tower(sc)?;
    let net = t.network();
    let classifying: Vec<Value> = describe_tower(&t)?
        .into_iter()
        .map(|e| {
            let values: Map<String, Value> = e
                .values
                .iter()
                .map(|(tup, v)| (label(net, tup), json!(v)))
                .collect();
            json!({ "degree": e.degree, "cocycle": e.cocycle, "values": values })
        })
        .collect();
    let mut sessions = Map::new();
    for pair in ascending_tuples(net.vertex_count(), 2) {
        let keys = (0..=t.levels())
            .map(|lvl| t.session_key(pair[0], pair[1], lvl))
            .collect::<Result<Vec<_>, _>>()?;
        sessions.insert(label(net, &pair), json!(keys));
    }
    let mut out = json!({
        "p": t.p(),
        "levels": t.levels(),
        "classifying": classifying,
        "session_keys": sessions,
    });
    if let Some(c) = sc.tower.as_ref().and_then(|s| s.base_chain.as_ref()) {
        let c0 = sc.chain0(net, c)?;
        let mut all = true;
        for level in 1..=t.levels() {
            for pair in ascending_tuples(net.vertex_count(), 2) {
                all &= tower_public_key(&c0, t.levels(), level, pair[0], pair[1])?.agrees();
            }
        }
        out["public_key_agreement"] = json!(all);
    }
    Ok(Outcome::ok(out))
}

/// Intruders and target from the flags, falling back on the `[attack]` section.
struct AttackSetup {
    intruders: Vec<usize>,
    target: (usize, usize),
    observations: BTreeMap<Vec<usize>, GroupElement>,
}

fn band_group(keys: GroupSpec) -> Result<GroupSpec, CliError> {
    match keys.ext_params() {
        Some((p, k)) if k >= 2 => Ok(GroupSpec::ext_chain(p, 1)?),
        _ => Ok(keys),
    }
}

fn attack_setup(
    sc: &Scenario,
    net: &Network,
    band: GroupSpec,
    intruders: Option<&str>,
    target: Option<&str>,
) -> Result<AttackSetup, CliError> {
    let sec = sc.attack.as_ref();
    let intruders = match (intruders, sec) {
        (Some(s), _) => parse_path(net, s)?,
        (None, Some(a)) => a
            .intruders
            .iter()
            .map(|n| vertex(net, n))
            .collect::<Result<_, _>>()?,
        (None, None) => return Err(CliError::MissingSection("attack".into())),
    };
    let target = match (target, sec) {
        (Some(s), _) => match parse_path(net, s)?.as_slice() {
            [c, d] => (*c, *d),
            _ => return Err(CliError::Invalid("--target names two vertices".into())),
        },
        (None, Some(a)) => (vertex(net, &a.target.0)?, vertex(net, &a.target.1)?),
        (None, None) => return Err(CliError::MissingSection("attack".into())),
    };
    let mut observations = BTreeMap::new();
    for (lab, &v) in sec.map(|a| &a.observations).into_iter().flatten() {
        let mut t = tuple(net, lab, 3)?;
        let mut value = band.element(v)?;
        // sort into ascending order, inverting once per transposition
        for a in 0..3 {
            for b in 0..2 - a {
                if t[b] > t[b + 1] {
                    t.swap(b, b + 1);
                    value = value.inverse();
                }
            }
        }
        observations.insert(t, value);
    }
    Ok(AttackSetup {
        intruders,
        target,
        observations,
    })
}

fn elapsed(start: Instant, timing: bool, out: &mut Value) {
    if timing {
        out["elapsed_ms"] = json!(start.elapsed().as_secs_f64() * 1e3);
    }
}

pub fn attack_mitm(
    sc: &Scenario,
    intruders: Option<&str>,
    target: Option<&str>,
    timing: bool,
) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let s = sc.schedule()?;
    let net = s.network();
    let setup = attack_setup(sc, net, s.spec(), intruders, target)?;
    let l = match setup.intruders.as_slice() {
        [l] => *l,
        other => {
            return Err(CliError::from(
                cochain_net::attack::AttackError::WrongIntruderCount {
                    expected: 1,
                    got: other.len(),
                },
            ))
        }
    };
    let (i, j) = setup.target;
    let view = IntruderView::observe(s.keys(), &[l])?;
    let recovered = mitm_torsor(&view, l, i, j)?;
    let truth = s.key(i, j);
    let failures: Vec<Vec<String>> = mitm_failures(s.keys(), l)?
        .into_iter()
        .map(|(a, b)| names(net, &[a, b]))
        .collect();
    let correct = recovered == truth;
    let mut out = json!({
        "intruder": net.name(l),
        "target": names(net, &[i, j]),
        "kind": s.kind(),
        "recovered": recovered,
        "true_key": truth,
        "correct": correct,
        "failures": failures,
    });
    elapsed(start, timing, &mut out);
    Ok(Outcome {
        json: out,
        exit: if correct { 0 } else { EXIT_INFEASIBLE },
    })
}

pub fn attack_gerbe3(
    sc: &Scenario,
    intruders: Option<&str>,
    target: Option<&str>,
    timing: bool,
) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let s = sc.schedule()?;
    let net = s.network();
    let setup = attack_setup(sc, net, band_group(s.spec())?, intruders, target)?;
    let (c, d) = setup.target;
    let view = IntruderView::observe(s.keys(), &setup.intruders)?
        .with_observations(setup.observations.clone());
    let report = gerbe_attack_3(&view, c, d)?;
    let truth = s.key(c, d);
    let obs: Map<String, Value> = setup
        .observations
        .iter()
        .map(|(t, v)| (label(net, t), json!(v)))
        .collect();
    let mut out = json!({
        "intruders": names(net, &setup.intruders),
        "target": names(net, &[c, d]),
        "observations": obs,
        "phase_a": report.phase_a,
        "true_key": truth,
        "contains_true_key": report.verdict.contains(&truth),
    });
    merge_verdict(&mut out, &report.verdict);
    elapsed(start, timing, &mut out);
    Ok(Outcome {
        json: out,
        exit: verdict_exit(&report.verdict),
    })
}

fn merge_verdict(out: &mut Value, v: &Verdict) {
    if let (Value::Object(o), Value::Object(vm)) = (out, json!(v)) {
        o.extend(vm);
    }
}

pub fn attack_tower(
    sc: &Scenario,
    intruders: Option<&str>,
    target: Option<&str>,
    timing: bool,
) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let t = tower(sc)?;
    let net = t.network().clone();
    let band = GroupSpec::ext_chain(t.p(), 1)?;
    let setup = attack_setup(sc, &net, band, intruders, target)?;
    let (i, j) = setup.target;
    let report = tower_attack(&t, &setup.intruders, i, j, &setup.observations)?;
    let truth = t.session_key(i, j, t.levels())?;
    let mut out = json!({
        "intruders": names(&net, &setup.intruders),
        "target": names(&net, &[i, j]),
        "level": report.level,
        "base_key": report.base_key,
        "trail": report.trail,
        "true_key": truth,
        "contains_true_key": report.verdict.contains(&truth),
    });
    merge_verdict(&mut out, &report.verdict);
    elapsed(start, timing, &mut out);
    Ok(Outcome {
        json: out,
        exit: verdict_exit(&report.verdict),
    })
}

fn plaintext_law(
    sc: &Scenario,
    net: &Network,
    v: usize,
    size: usize,
) -> Result<Distribution, CliError> {
    let given = sc
        .distributions
        .as_ref()
        .and_then(|d| d.plaintext.get(net.name(v)));
    law(given, size, net.name(v))
}

fn key_law(
    sc: &Scenario,
    net: &Network,
    a: usize,
    b: usize,
    size: usize,
) -> Result<Distribution, CliError> {
    let mut found = None;
    if let Some(d) = &sc.distributions {
        for (lab, probs) in &d.keys {
            if tuple(net, lab, 2)? == [a, b] {
                found = Some(probs);
            }
        }
    }
    law(found, size, &label(net, &[a, b]))
}

fn law(given: Option<&Vec<String>>, size: usize, what: &str) -> Result<Distribution, CliError> {
    match given {
        None => Ok(Distribution::uniform(size)),
        Some(p) if p.len() == size => distribution(p),
        Some(p) => Err(CliError::Invalid(format!(
            "law for `{what}` lists {} probabilities, the group has {size} elements",
            p.len()
        ))),
    }
}

fn group_size(g: GroupSpec) -> Result<usize, CliError> {
    g.elements()?;
    Ok(g.order() as usize)
}

pub fn secrecy_audit(sc: &Scenario, path: &str) -> Result<Outcome, CliError> {
    let net = sc.network()?;
    let group = sc.group()?;
    let size = group_size(group)?;
    let verts = parse_path(&net, path)?;
    net.path(&verts)?;
    if verts.len() < 2 {
        return Err(CliError::Invalid(
            "a secrecy path has at least one hop".into(),
        ));
    }
    let mut plains = Vec::new();
    let mut keys = Vec::new();
    for w in verts.windows(2) {
        plains.push(plaintext_law(sc, &net, w[0], size)?);
        keys.push(key_law(sc, &net, w[0], w[1], size)?);
    }
    let model = PathModel::translation(group, names(&net, &verts), plains.clone(), keys.clone())?;
    let cipher = ciphertext_dist(&model)?;
    let hops: Vec<Value> = verts
        .windows(2)
        .enumerate()
        .map(|(k, w)| {
            let hop = Hop::translation(group, keys[k].clone())?;
            Ok(json!({
                "from": net.name(w[0]),
                "to": net.name(w[1]),
                "key_entropy": entropy(&keys[k]),
                "plaintext_entropy": entropy(&plains[k]),
                "key_given_cipher": cond_entropy_key_given_cipher(&plains[k], &hop),
            }))
        })
        .collect::<Result<_, CliError>>()?;
    Ok(Outcome::ok(json!({
        "path": names(&net, &verts),
        "group": group.to_string(),
        "ciphertext": cipher,
        "ciphertext_entropy": entropy(&cipher),
        "perfect_secrecy": perfect_secrecy_path(&model)?,
        "nodes": perfect_secrecy_nodes(&model)?,
        "shannon": shannon_conditions(&model)?,
        "hops": hops,
    })))
}

pub fn entropy_report(sc: &Scenario, triangle: &str) -> Result<Outcome, CliError> {
    let net = sc.network()?;
    let group = sc.group()?;
    let size = group_size(group)?;
    let t = match parse_path(&net, triangle)?.as_slice() {
        [i, j, l] => [*i, *j, *l],
        _ => return Err(CliError::Invalid("--triangle names three vertices".into())),
    };
    let first = key_law(sc, &net, t[0], t[1], size)?;
    let second = key_law(sc, &net, t[1], t[2], size)?;
    let plain = plaintext_law(sc, &net, t[0], size)?;
    let report = entropy_cocycle_check(group, &first, &second, &plain)?;
    Ok(Outcome::ok(json!({
        "triangle": names(&net, &t),
        "group": group.to_string(),
        "report": report,
    })))
}

pub fn cost(users: u64, bits: u32, genus: Option<u64>) -> Result<Outcome, CliError> {
    let mut out = json!({ "brute_force": brute_force_cost(users, bits)? });
    if let Some(g) = genus {
        out["holonomy"] = json!({ "genus": g, "images": holonomy_cost(g) });
    }
    Ok(Outcome::ok(out))
}

/// Genus expansion summary, attached to `verify-cocycle` for `[genus]` scenarios.
pub fn genus_summary(sc: &Scenario) -> Result<Option<Value>, CliError> {
    if sc.flavor()? != Flavor::Genus {
        return Ok(None);
    }
    let g = sc.genus.as_ref().expect("flavor");
    let gens = g
        .generators
        .iter()
        .map(|&v| sc.element(v))
        .collect::<Result<Vec<_>, _>>()?;
    let e: GenusExpansion =
        cochain_net::linkcrypt::expand_genus_keys(&gens, &g.boundary, &g.interior)?;
    Ok(Some(json!({
        "inputs": e.inputs,
        "table_size": e.table_size,
        "boundary_cocycle": e.boundary_cocycle,
    })))
}
