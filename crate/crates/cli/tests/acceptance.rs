//! One line per acceptance criterion; exits non-zero when any criterion fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use cochain_net::attack::{
    gerbe_attack_3, gerbe_impossibility_2, mitm_failures, mitm_torsor, tower_attack, IntruderView,
};
use cochain_net::cochain::{
    ascending_tuples, coboundary, is_cocycle, trivialize, Cochain, KeySchedule, Trivialization,
};
use cochain_net::gerbe_tower::{build_gerbe, build_tower};
use cochain_net::groups::{discrete_log, GroupElement, GroupSpec};
use cochain_net::kdc::brute_force_cost;
use cochain_net::linkcrypt::{expand_genus_keys, send_header};
use cochain_net::network::{Edge, Network};
use cochain_net::pubkey::{dh_shared, KeyPair, Level};
use cochain_net::secrecy::{
    cond_entropy_key_given_cipher, entropy, entropy_cocycle_check, perfect_secrecy_nodes,
    perfect_secrecy_path, ratio, shannon_conditions, Distribution, Hop, PathModel, Rational,
};
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e(g: GroupSpec, v: u64) -> GroupElement {
    g.element(v).unwrap()
}

fn digits(mut code: u64, base: u64, len: usize) -> Vec<u64> {
    (0..len)
        .map(|_| {
            let d = code % base;
            code /= base;
            d
        })
        .collect()
}

fn random_chain(rng: &mut ChaCha8Rng, g: GroupSpec, n: usize) -> Cochain {
    let vals: Vec<_> = (0..n).map(|_| g.random(rng)).collect();
    Cochain::from_vertex_values(&vals).unwrap()
}

fn random_connected(rng: &mut ChaCha8Rng, n: usize) -> Network {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push(Edge::new(rng.random_range(0..v), v));
    }
    for _ in 0..rng.random_range(0..n) {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a != b {
            edges.push(Edge::new(a, b));
        }
    }
    Network::new((0..n).map(|i| format!("V{i}")).collect(), edges).unwrap()
}

fn c1_cochain_algebra() -> Check {
    let start = Instant::now();
    let mut count = 0u64;
    for m in [2u64, 3, 5] {
        let g = GroupSpec::cyclic_add(m).unwrap();
        for code in 0..m.pow(4) {
            let vals: Vec<_> = digits(code, m, 4).into_iter().map(|v| e(g, v)).collect();
            let u = Cochain::from_vertex_values(&vals).unwrap();
            ensure(
                coboundary(&coboundary(&u).unwrap()).unwrap().is_identity(),
                || format!("0-chain {code} over Z/{m}"),
            )?;
            count += 1;
        }
        let pairs = ascending_tuples(4, 2);
        for code in 0..m.pow(6) {
            let mut c = Cochain::identity(1, g, 4).unwrap();
            for (t, v) in pairs.iter().zip(digits(code, m, 6)) {
                c.set(t, e(g, v)).unwrap();
            }
            ensure(
                coboundary(&coboundary(&c).unwrap()).unwrap().is_identity(),
                || format!("1-chain {code} over Z/{m}"),
            )?;
            count += 1;
        }
    }
    let exhaustive = start.elapsed();
    ensure(exhaustive < Duration::from_secs(10), || {
        format!("exhaustive pass took {exhaustive:?}")
    })?;
    let groups = [
        GroupSpec::cyclic_mul(11, 2).unwrap(),
        GroupSpec::cyclic_add(12).unwrap(),
        GroupSpec::xor_vec(3).unwrap(),
        GroupSpec::mat_gl(2).unwrap(),
        GroupSpec::mat_gl(3).unwrap(),
        GroupSpec::ext_chain(3, 2).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for k in 0..1000 {
        let g = groups[k % groups.len()];
        let n = rng.random_range(2..=6);
        let d = coboundary(&random_chain(&mut rng, g, n)).unwrap();
        let s = KeySchedule::new(random_connected(&mut rng, n), d.clone()).unwrap();
        match trivialize(&s).unwrap() {
            Trivialization::Trivial(u) => ensure(coboundary(&u).unwrap() == d, || {
                format!("round trip {k} over {g}")
            })?,
            Trivialization::Obstructed(_) => {
                return Err(format!("coboundary {k} over {g} reported obstructed"))
            }
        }
    }
    Ok(format!("{count} cochains with dd = 1 in {exhaustive:.2?}; 1000 trivialization round trips over 6 group kinds"))
}

fn c2_path_independence() -> Check {
    let groups = [
        GroupSpec::cyclic_add(2).unwrap(),
        GroupSpec::cyclic_add(3).unwrap(),
        GroupSpec::cyclic_add(4).unwrap(),
        GroupSpec::cyclic_add(5).unwrap(),
        GroupSpec::xor_vec(2).unwrap(),
        GroupSpec::cyclic_mul(3, 2).unwrap(),
        GroupSpec::cyclic_mul(5, 2).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut networks, mut comparisons) = (0u64, 0u64);
    for n in 2..=5usize {
        let pairs = ascending_tuples(n, 2);
        for mask in 0u64..1 << pairs.len() {
            let edges: Vec<Edge> = pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .flat_map(|(_, t)| [Edge::new(t[0], t[1]), Edge::new(t[1], t[0])])
                .collect();
            let net = Network::new((0..n).map(|i| format!("V{i}")).collect(), edges).unwrap();
            if !net.is_connected() {
                continue;
            }
            networks += 1;
            let paths: Vec<_> = pairs
                .iter()
                .map(|t| net.enumerate_paths_idx(t[0], t[1], n))
                .collect();
            for g in groups {
                let s = KeySchedule::new(
                    net.clone(),
                    coboundary(&random_chain(&mut rng, g, n)).unwrap(),
                )
                .unwrap();
                let headers = g.elements().unwrap();
                for ps in &paths {
                    for &h in &headers {
                        let reference = *send_header(&s, &ps[0], h).unwrap().last().unwrap();
                        for p in &ps[1..] {
                            let got = *send_header(&s, p, h).unwrap().last().unwrap();
                            ensure(got == reference, || {
                                format!("{g}: {:?} vs {:?}", p.vertices, ps[0].vertices)
                            })?;
                            comparisons += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "{networks} connected networks on 2..5 vertices, 7 groups, {comparisons} path pairs agree"
    ))
}

fn c3_diffie_hellman() -> Check {
    let g = GroupSpec::cyclic_mul_default(65537).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 0..1000 {
        let a = KeyPair::generate(g, &mut rng, Level::Torsor).unwrap();
        let b = KeyPair::generate(g, &mut rng, Level::Torsor).unwrap();
        ensure(
            dh_shared(&a, &b.public).unwrap() == dh_shared(&b, &a.public).unwrap(),
            || format!("instance {k}"),
        )?;
    }
    let mut slowest = Duration::ZERO;
    let base = g.generator().unwrap();
    for _ in 0..20 {
        let kp = KeyPair::generate(g, &mut rng, Level::Torsor).unwrap();
        let start = Instant::now();
        let found = discrete_log(&base, &kp.public, g.order());
        slowest = slowest.max(start.elapsed());
        ensure(found == Some(kp.private), || {
            format!("log of {} gave {found:?}", kp.public.value())
        })?;
    }
    ensure(slowest < Duration::from_secs(5), || {
        format!("slowest log took {slowest:?}")
    })?;
    Ok(format!(
        "1000 agreements at p = 65537; 20 private keys recovered, slowest {slowest:.2?}"
    ))
}

fn c4_mitm() -> Check {
    let groups = [
        GroupSpec::cyclic_add(5).unwrap(),
        GroupSpec::mat_gl(2).unwrap(),
        GroupSpec::cyclic_mul(11, 2).unwrap(),
        GroupSpec::xor_vec(3).unwrap(),
        GroupSpec::ext_chain(2, 3).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut torsors, mut gerbes) = (0, 0);
    for k in 0..500 {
        let g = groups[k % groups.len()];
        let n = rng.random_range(3..=6);
        let keys = coboundary(&random_chain(&mut rng, g, n)).unwrap();
        for l in 0..n {
            let view = IntruderView::observe(&keys, &[l]).unwrap();
            for t in ascending_tuples(n, 2)
                .into_iter()
                .filter(|t| !t.contains(&l))
            {
                let got = mitm_torsor(&view, l, t[0], t[1]).unwrap();
                ensure(got == keys.get(&t), || {
                    format!("torsor {k} over {g}, intruder {l}, pair {t:?}")
                })?;
            }
        }
        torsors += 1;
        let noisy = Cochain::from_fn(1, g, n, |_| g.random(&mut rng)).unwrap();
        if let Some(w) = is_cocycle(&noisy).unwrap().witness {
            ensure(!mitm_failures(&noisy, w[0]).unwrap().is_empty(), || {
                format!("gerbe-style {k} over {g}")
            })?;
            gerbes += 1;
        }
    }
    Ok(format!("{torsors} torsors exact through every intruder; {gerbes} gerbe-style schedules each with a failure"))
}

fn c5_gerbe_cocycle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let primes = [2u64, 3, 5];
    for k in 0..1000 {
        let p = primes[k % 3];
        let n = rng.random_range(3..=6);
        let g1 = GroupSpec::ext_chain(p, 1).unwrap();
        let g2 = GroupSpec::ext_chain(p, 2).unwrap();
        let base = coboundary(&random_chain(&mut rng, g1, n)).unwrap();
        let lift = base.lift_to(2).unwrap();
        let mut keys = lift.clone();
        for t in ascending_tuples(n, 2) {
            keys.set(&t, keys.get(&t) * e(g2, p * rng.random_range(0..p)))
                .unwrap();
        }
        let s = build_gerbe(Network::complete(n), keys).unwrap();
        ensure(is_cocycle(s.derived()).unwrap().holds, || {
            format!("instance {k}: derived not a cocycle")
        })?;
        let plain = build_gerbe(Network::complete(n), lift).unwrap();
        let tower = build_tower(Network::complete(n), p, 1, base).unwrap();
        ensure(&tower.classifying()[1] == plain.derived(), || {
            format!("instance {k}: tower c2 differs")
        })?;
    }
    Ok("1000 derived cochains are cocycles and match the one-level tower".into())
}

fn c6_gerbe_attacks() -> Check {
    let m = 5u64;
    let g = GroupSpec::cyclic_add(m).unwrap();
    let pairs = ascending_tuples(5, 2);
    let free: Vec<usize> = (0..pairs.len())
        .filter(|&k| pairs[k].iter().any(|&v| v >= 3))
        .collect();
    let fixed: Vec<usize> = (0..pairs.len()).filter(|k| !free.contains(k)).collect();
    let mut attacks = 0u64;
    // every value of the seven keys touching the targets, for every intruder-side assignment
    for inner in 0..m.pow(fixed.len() as u32) {
        let mut keys = Cochain::identity(1, g, 5).unwrap();
        for (&k, v) in fixed.iter().zip(digits(inner, m, fixed.len())) {
            keys.set(&pairs[k], e(g, v)).unwrap();
        }
        let mut view = IntruderView::observe(&keys, &[0, 1, 2]).unwrap();
        for code in 0..m.pow(free.len() as u32) {
            let mut truth = g.identity();
            for (&k, v) in free.iter().zip(digits(code, m, free.len())) {
                let (a, b) = (pairs[k][0], pairs[k][1]);
                if a < 3 {
                    view.known.insert((a, b), e(g, v));
                } else {
                    truth = e(g, v);
                }
            }
            let r = gerbe_attack_3(&view, 3, 4).unwrap();
            ensure(r.verdict.contains(&truth), || {
                format!("keys {inner}/{code}")
            })?;
            attacks += 1;
        }
    }
    let mut cases = 0;
    for (group, n) in [
        (GroupSpec::cyclic_add(2).unwrap(), 4),
        (GroupSpec::cyclic_add(5).unwrap(), 5),
    ] {
        let r = gerbe_impossibility_2(group, n).unwrap();
        ensure(r.all_values_attainable, || {
            format!("{group} on {n}: some key value unattainable")
        })?;
        ensure(r.torsor_contrast_unique, || {
            format!("{group} on {n}: torsor contrast failed")
        })?;
        cases += r.cases.len();
    }
    Ok(format!(
        "{attacks} three-intruder attacks over every Z/5 key table on 5 vertices keep the true key; \
         {cases} two-intruder cases leave the whole group"
    ))
}

fn c7_tower() -> Check {
    let start = Instant::now();
    let mut towers = 0;
    for p in [2u64, 3] {
        let g = GroupSpec::ext_chain(p, 1).unwrap();
        for n in 1..=3u32 {
            for verts in (n as usize + 2)..=6 {
                // every 1-cocycle is the coboundary of a 0-chain vanishing at vertex 0
                for code in 0..p.pow(verts as u32 - 1) {
                    let mut vals = vec![0];
                    vals.extend(digits(code, p, verts - 1));
                    let u = Cochain::from_vertex_values(
                        &vals.iter().map(|&v| e(g, v)).collect::<Vec<_>>(),
                    )
                    .unwrap();
                    let t = build_tower(Network::complete(verts), p, n, coboundary(&u).unwrap())
                        .unwrap();
                    for (k, c) in t.classifying().iter().enumerate() {
                        ensure(is_cocycle(c).unwrap().holds, || {
                            format!("p={p} n={n} v={verts} base {code} c_{}", k + 1)
                        })?;
                    }
                    towers += 1;
                }
            }
        }
    }
    let exhaustive = start.elapsed();
    ensure(exhaustive < Duration::from_secs(60), || {
        format!("took {exhaustive:?}")
    })?;
    let mut attacks = 0;
    let none = BTreeMap::new();
    for n in 1..=2u32 {
        let verts = n as usize + 5;
        let g = GroupSpec::ext_chain(2, 1).unwrap();
        for code in 0..2u64.pow(verts as u32 - 1) {
            let mut vals = vec![0];
            vals.extend(digits(code, 2, verts - 1));
            let u = Cochain::from_vertex_values(&vals.iter().map(|&v| e(g, v)).collect::<Vec<_>>())
                .unwrap();
            let t = build_tower(Network::complete(verts), 2, n, coboundary(&u).unwrap()).unwrap();
            let intruders: Vec<usize> = (0..n as usize + 3).collect();
            let (i, j) = (verts - 2, verts - 1);
            let r = tower_attack(&t, &intruders, i, j, &none).unwrap();
            ensure(r.verdict.contains(&t.session_key(i, j, n).unwrap()), || {
                format!("n={n} base {code}")
            })?;
            for (k, cands) in r.trail.iter().enumerate() {
                ensure(
                    cands.contains(&t.session_key(i, j, k as u32 + 1).unwrap()),
                    || format!("n={n} base {code} level {}", k + 1),
                )?;
            }
            attacks += 1;
        }
    }
    Ok(format!("{towers} towers with cocycle classifying sequences in {exhaustive:.2?}; {attacks} sound tower attacks"))
}

fn random_dist(rng: &mut ChaCha8Rng, n: usize, full: bool) -> Distribution {
    let lo = if full { 1 } else { 0 };
    let mut w: Vec<i64> = (0..n).map(|_| rng.random_range(lo..6)).collect();
    if w.iter().all(|&x| x == 0) {
        w[0] = 1;
    }
    let s: i64 = w.iter().sum();
    Distribution::new(w.into_iter().map(|x| ratio(x, s)).collect()).unwrap()
}

fn latin_hop(rng: &mut ChaCha8Rng, f: usize, keys: Distribution) -> Hop {
    let mut perm: Vec<usize> = (0..f).collect();
    perm.shuffle(rng);
    let mut rows: Vec<usize> = (0..f).collect();
    rows.shuffle(rng);
    let table = rows
        .iter()
        .map(|&k| (0..f).map(|p| perm[(p + k) % f]).collect())
        .collect();
    Hop { keys, table }
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("U{i}")).collect()
}

fn c8_perfect_secrecy() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut instances = 0;
    for k in 1..=3u32 {
        let f = 1usize << k;
        for group in [
            GroupSpec::xor_vec(k).unwrap(),
            GroupSpec::cyclic_add(f as u64).unwrap(),
        ] {
            for hops in 1..=4 {
                for trial in 0..3 {
                    let plains: Vec<_> =
                        (0..hops).map(|_| random_dist(&mut rng, f, false)).collect();
                    let m = if trial == 0 {
                        PathModel::translation(
                            group,
                            names(hops + 1),
                            plains,
                            vec![Distribution::uniform(f); hops],
                        )
                    } else {
                        let hs = (0..hops)
                            .map(|_| latin_hop(&mut rng, f, Distribution::uniform(f)))
                            .collect();
                        PathModel::new(names(hops + 1), f, plains, hs)
                    }
                    .unwrap();
                    let s = shannon_conditions(&m).unwrap();
                    ensure(s.holds, || {
                        format!("{group} hops={hops}: conditions should hold")
                    })?;
                    ensure(perfect_secrecy_path(&m).unwrap().perfect, || {
                        format!("{group} hops={hops} trial {trial}")
                    })?;
                    instances += 1;
                }
            }
        }
    }
    let exact = start.elapsed();
    ensure(exact < Duration::from_secs(10), || {
        format!("took {exact:?}")
    })?;
    let mut premise = 0;
    for s in 0..1000 {
        let f = rng.random_range(2..4);
        let h = rng.random_range(1..4);
        let hops: Vec<Hop> = (0..h)
            .map(|_| {
                let keys = if rng.random_bool(0.8) {
                    Distribution::uniform(f)
                } else {
                    random_dist(&mut rng, f, false)
                };
                latin_hop(&mut rng, f, keys)
            })
            .collect();
        let plains = (0..h).map(|_| random_dist(&mut rng, f, true)).collect();
        let m = PathModel::new(names(h + 1), f, plains, hops).unwrap();
        if perfect_secrecy_nodes(&m).unwrap().iter().all(|v| v.perfect) {
            premise += 1;
            ensure(perfect_secrecy_path(&m).unwrap().perfect, || {
                format!("sample {s}: nodes perfect, path not")
            })?;
        }
    }
    ensure(premise > 0, || {
        "no sample met the node-wise hypothesis".into()
    })?;
    Ok(format!("{instances} exact path checks in {exact:.2?}; node-wise implied path-wise on {premise}/1000 samples"))
}

fn h(ps: &[f64]) -> f64 {
    ps.iter().filter(|&&p| p > 0.0).map(|p| -p * p.ln()).sum()
}

fn f64s(d: &Distribution) -> Vec<f64> {
    d.probs()
        .iter()
        .map(|r: &Rational| r.to_f64().unwrap())
        .collect()
}

fn c9_entropy() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let f = rng.random_range(2..6);
        let keys = random_dist(&mut rng, f, false);
        let hop = latin_hop(&mut rng, f, keys.clone());
        let plain = random_dist(&mut rng, f, false);
        // oracle: H(V|C) = sum over c of P(c) H(V | C = c) in floating point
        let (kp, pp) = (f64s(&keys), f64s(&plain));
        let mut joint = vec![vec![0.0; f]; f];
        for key in 0..f {
            for p in 0..f {
                joint[hop.table[key][p]][key] += kp[key] * pp[p];
            }
        }
        let oracle: f64 = joint
            .iter()
            .map(|row| {
                let pc: f64 = row.iter().sum();
                if pc == 0.0 {
                    0.0
                } else {
                    pc * h(&row.iter().map(|x| x / pc).collect::<Vec<_>>())
                }
            })
            .sum();
        let r = cond_entropy_key_given_cipher(&plain, &hop);
        worst = worst
            .max((r.direct - oracle).abs())
            .max((r.identity - oracle).abs());
        ensure(r.agree && (r.identity - oracle).abs() <= 1e-9, || {
            format!("instance {k}: {r:?} vs {oracle}")
        })?;
    }
    let mut differs = 0;
    let groups = [
        GroupSpec::cyclic_add(3).unwrap(),
        GroupSpec::xor_vec(2).unwrap(),
        GroupSpec::cyclic_add(5).unwrap(),
    ];
    for k in 0..1000 {
        let g = groups[k % 3];
        let n = g.order() as usize;
        let (a, b, p) = (
            random_dist(&mut rng, n, false),
            random_dist(&mut rng, n, false),
            random_dist(&mut rng, n, false),
        );
        let r = entropy_cocycle_check(g, &a, &b, &p).unwrap();
        let oracle = h(&f64s(&a)) + h(&f64s(&b));
        ensure(
            r.additive && (r.h_il_product - oracle).abs() <= 1e-9,
            || format!("product instance {k}"),
        )?;
        ensure(
            (r.h_il_product - entropy(&a) - entropy(&b)).abs() <= 1e-9,
            || format!("instance {k}"),
        )?;
        ensure(r.conditional_cocycle_holds, || {
            format!("conditional relation, instance {k}")
        })?;
        differs += r.collapsed_differs as usize;
    }
    Ok(format!(
        "H(V|C) identity on 1000 hops (max error {worst:.1e}); additivity on 1000 product spaces, \
         collapsed law differs on {differs}"
    ))
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn c10_genus() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut sizes = Vec::new();
    for g in [
        GroupSpec::cyclic_add(7).unwrap(),
        GroupSpec::xor_vec(3).unwrap(),
        GroupSpec::mat_gl(2).unwrap(),
    ] {
        for n in 1..=4usize {
            for interior in 0..=2usize {
                let gens: Vec<_> = (0..n).map(|_| g.random(&mut rng)).collect();
                let boundary: Vec<String> = (0..2 * n).map(|i| format!("P{i}")).collect();
                let inner: Vec<String> = (0..interior).map(|i| format!("Q{i}")).collect();
                let x = expand_genus_keys(&gens, &boundary, &inner).unwrap();
                ensure(x.boundary_cocycle, || format!("{g} n={n}"))?;
                for t in ascending_tuples(2 * n, 3) {
                    let s = &x.schedule;
                    ensure(
                        s.key(t[0], t[1]) * s.key(t[1], t[2]) == s.key(t[0], t[2]),
                        || format!("{g} n={n} {t:?}"),
                    )?;
                }
                ensure(
                    x.inputs == n && x.table_size == binomial(2 * n + interior, 2),
                    || format!("{g} n={n} sizes"),
                )?;
                if g == GroupSpec::cyclic_add(7).unwrap() && interior == 1 {
                    sizes.push(format!("{}->{}", x.inputs, x.table_size));
                }
            }
        }
    }
    let cost = brute_force_cost(3, 1).unwrap();
    ensure(
        cost.exact.as_ref().map(|c| c.to_string()) == Some("6".into()),
        || format!("{cost:?}"),
    )?;
    Ok(format!(
        "boundary triples compose; inputs vs table ({}); brute_force_cost(3,1) = 6",
        sizes.join(", ")
    ))
}

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn invocations() -> Vec<Vec<String>> {
    let mut files = Vec::new();
    for dir in [fixtures_dir(), fixtures_dir().join("invalid")] {
        let mut here: Vec<PathBuf> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|x| x == "toml"))
            .collect();
        here.sort();
        files.extend(here);
    }
    let mut out = Vec::new();
    for f in files {
        let src = std::fs::read_to_string(&f).unwrap();
        for line in src.lines().filter_map(|l| l.strip_prefix("# run:")) {
            let mut args: Vec<String> = line.split_whitespace().map(String::from).collect();
            args.extend(["--scenario".into(), f.to_string_lossy().into_owned()]);
            out.push(args);
        }
    }
    for flags in [
        "cost --users 3 --bits 1 --genus 2",
        "cost --users 1000 --bits 16",
        "dh --p 65537 --alpha 3 --seed 1",
    ] {
        out.push(flags.split(' ').map(String::from).collect());
    }
    out
}

fn c11_determinism() -> Check {
    let runs = invocations();
    for args in &runs {
        let once = || {
            let o = Command::new(env!("CARGO_BIN_EXE_cochain-net"))
                .args(args)
                .env_remove("COCHAIN_NET_SEED")
                .output()
                .unwrap();
            (o.status.code(), o.stdout, o.stderr)
        };
        let first = once();
        ensure(matches!(first.0, Some(0 | 2 | 3)), || {
            format!("{args:?} exited {:?}", first.0)
        })?;
        for _ in 0..2 {
            ensure(once() == first, || format!("{args:?} differs between runs"))?;
        }
    }
    Ok(format!(
        "{} invocations over the fixture corpus byte-identical across 3 runs",
        runs.len()
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("cochain algebra", c1_cochain_algebra),
        ("torsor path independence", c2_path_independence),
        ("Diffie-Hellman torsor", c3_diffie_hellman),
        ("meet in the middle", c4_mitm),
        ("gerbe classifying cocycle", c5_gerbe_cocycle),
        ("gerbe attacks", c6_gerbe_attacks),
        ("tower", c7_tower),
        ("perfect secrecy", c8_perfect_secrecy),
        ("entropy identities", c9_entropy),
        ("genus key expansion", c10_genus),
        ("determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({secs:.1}s): {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({secs:.1}s): {why}", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
