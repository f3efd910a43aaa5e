use cochain_net::cochain::{
    ascending_tuples, bockstein_lift, coboundary, is_cocycle, trivialize, Cochain, KeySchedule,
    Trivialization,
};
use cochain_net::groups::{discrete_log, GroupElement, GroupSpec};
use cochain_net::network::Network;
use proptest::prelude::*;

fn e(g: GroupSpec, v: u64) -> GroupElement {
    g.element(v).unwrap()
}

fn triangle() -> Network {
    Network::from_names(&["A", "B", "C"], &[("A", "B"), ("B", "C"), ("A", "C")]).unwrap()
}

#[test]
fn group_examples() {
    let m7 = GroupSpec::cyclic_mul(7, 3).unwrap();
    assert_eq!((e(m7, 3) * e(m7, 5)).value(), 15 % 7);
    assert_eq!(e(m7, 3).power(6).value(), 1);
    assert_eq!(e(m7, 3).power(2).value(), 9 % 7);
    assert!(e(m7, 3).power(0).is_identity());
    assert_eq!(discrete_log(&e(m7, 3), &e(m7, 2), 6), Some(2));
    assert_eq!(discrete_log(&e(m7, 3), &e(m7, 4), 6), Some(4));
    assert_eq!(discrete_log(&e(m7, 3), &m7.identity(), 6), Some(0));

    let x3 = GroupSpec::xor_vec(3).unwrap();
    assert_eq!((e(x3, 0b101) * e(x3, 0b110)).value(), 0b101 ^ 0b110);

    let z25 = GroupSpec::ext_chain(5, 2).unwrap();
    assert_eq!(e(z25, 17).ext_project().unwrap().value(), 17 % 5);
    let z5 = GroupSpec::ext_chain(5, 1).unwrap();
    assert_eq!(e(z5, 2).ext_lift().unwrap(), e(z25, 2));
    assert_eq!(e(z25, 15).ext_kernel_div().unwrap().value(), 3);
    assert!(e(z25, 16).ext_kernel_div().is_err());
}

#[test]
fn group_laws_exhaustive() {
    let specs = [
        GroupSpec::cyclic_mul(7, 3).unwrap(),
        GroupSpec::cyclic_mul_default(31).unwrap(),
        GroupSpec::cyclic_add(12).unwrap(),
        GroupSpec::xor_vec(4).unwrap(),
        GroupSpec::ext_chain(3, 2).unwrap(),
        GroupSpec::mat_gl(2).unwrap(),
        GroupSpec::mat_gl(3).unwrap(),
    ];
    for g in specs {
        let all = g.elements().unwrap();
        assert_eq!(all.len() as u64, g.order(), "{g}");
        let distinct: std::collections::BTreeSet<u64> = all.iter().map(|x| x.value()).collect();
        assert_eq!(distinct.len(), all.len());
        for &a in &all {
            assert!((a * a.inverse()).is_identity());
            assert_eq!(a * g.identity(), a);
            for &b in &all {
                if g.is_abelian() {
                    assert_eq!(a * b, b * a);
                }
                if all.len() <= 64 {
                    for &c in &all {
                        assert_eq!((a * b) * c, a * (b * c));
                    }
                }
            }
        }
    }
    // GL(3, 2) has order 168 and is not commutative
    let gl3 = GroupSpec::mat_gl(3).unwrap();
    assert_eq!(gl3.order(), 168);
    assert!(!gl3.is_abelian());
}

#[test]
fn extension_projection_is_a_homomorphism_with_kernel_of_order_p() {
    for (p, k) in [(2u64, 2u32), (3, 3), (5, 2)] {
        let g = GroupSpec::ext_chain(p, k).unwrap();
        let all = g.elements().unwrap();
        let kernel: Vec<_> = all
            .iter()
            .filter(|x| x.ext_project().unwrap().is_identity())
            .collect();
        assert_eq!(kernel.len() as u64, p);
        let divided: std::collections::BTreeSet<u64> = kernel
            .iter()
            .map(|x| x.ext_kernel_div().unwrap().value())
            .collect();
        assert_eq!(divided.len() as u64, p);
        for &a in &all {
            for &b in &all {
                assert_eq!(
                    (a * b).ext_project().unwrap(),
                    a.ext_project().unwrap() * b.ext_project().unwrap()
                );
            }
        }
    }
}

#[test]
fn coboundary_example_z5() {
    let g = GroupSpec::cyclic_add(5).unwrap();
    let u = Cochain::from_vertex_values(&[e(g, 1), e(g, 2), e(g, 4)]).unwrap();
    let d = coboundary(&u).unwrap();
    // u_i - u_j mod 5
    let oracle = |i: i64, j: i64| (i - j).rem_euclid(5) as u64;
    assert_eq!(d.get(&[0, 1]).value(), oracle(1, 2));
    assert_eq!(d.get(&[1, 2]).value(), oracle(2, 4));
    assert_eq!(d.get(&[0, 2]).value(), oracle(1, 4));
    assert_eq!(d.get(&[0, 1]).value(), 4);
    assert_eq!(d.get(&[1, 2]).value(), 3);
    assert_eq!(d.get(&[0, 2]).value(), 2);
    assert!(is_cocycle(&d).unwrap().holds);
}

#[test]
fn non_cocycle_witness() {
    let g = GroupSpec::cyclic_add(5).unwrap();
    let c = Cochain::from_pairs(g, 3, [((0, 1), e(g, 1)), ((1, 2), e(g, 1))]).unwrap();
    let check = is_cocycle(&c).unwrap();
    assert!(!check.holds);
    assert_eq!(check.witness, Some(vec![0, 1, 2]));
}

/// Every 1-cochain over Z/3 on 4 vertices (3^6 of them): δδ = 0 and δc is a cocycle.
#[test]
fn delta_squared_vanishes_exhaustive_z3() {
    let g = GroupSpec::cyclic_add(3).unwrap();
    let pairs = ascending_tuples(4, 2);
    for code in 0..3u64.pow(6) {
        let mut c = Cochain::identity(1, g, 4).unwrap();
        let mut r = code;
        for t in &pairs {
            c.set(t, e(g, r % 3)).unwrap();
            r /= 3;
        }
        let d = coboundary(&c).unwrap();
        assert!(is_cocycle(&d).unwrap().holds);
        assert!(coboundary(&d).unwrap().is_identity());
    }
    for code in 0..3u64.pow(4) {
        let vals: Vec<_> = (0..4).map(|i| e(g, code / 3u64.pow(i) % 3)).collect();
        let u = Cochain::from_vertex_values(&vals).unwrap();
        assert!(coboundary(&coboundary(&u).unwrap()).unwrap().is_identity());
    }
}

#[test]
fn trivialize_round_trip_and_obstruction() {
    let g = GroupSpec::cyclic_add(5).unwrap();
    for code in 0..125u64 {
        let vals: Vec<_> = (0..3).map(|i| e(g, code / 5u64.pow(i) % 5)).collect();
        let d = coboundary(&Cochain::from_vertex_values(&vals).unwrap()).unwrap();
        let s = KeySchedule::new(triangle(), d.clone()).unwrap();
        match trivialize(&s).unwrap() {
            Trivialization::Trivial(u) => assert_eq!(coboundary(&u).unwrap(), d),
            other => panic!("{other:?}"),
        }
    }
    // u_AB = u_BC = u_CA = 1; around the loop the keys add to 3
    let keys = Cochain::from_pairs(
        g,
        3,
        [((0, 1), e(g, 1)), ((1, 2), e(g, 1)), ((2, 0), e(g, 1))],
    )
    .unwrap();
    match trivialize(&KeySchedule::new(triangle(), keys).unwrap()).unwrap() {
        Trivialization::Obstructed(loops) => {
            assert_eq!(loops.len(), 1);
            let v = loops[0].value.value();
            assert!(
                v == 3 || v == 2,
                "loop value {v} is +-3 mod 5 depending on orientation"
            );
        }
        other => panic!("{other:?}"),
    }
    let edge = Network::from_names(&["A", "B"], &[("A", "B")]).unwrap();
    let single = Cochain::from_pairs(g, 2, [((0, 1), e(g, 4))]).unwrap();
    assert!(matches!(
        trivialize(&KeySchedule::new(edge, single).unwrap()).unwrap(),
        Trivialization::Trivial(_)
    ));
}

#[test]
fn bockstein_triangle_example() {
    let g = GroupSpec::ext_chain(2, 1).unwrap();
    let c = Cochain::from_pairs(g, 3, [((0, 1), e(g, 1)), ((1, 2), e(g, 1))]).unwrap();
    let b = bockstein_lift(&c).unwrap();
    // lifts {1,1,0} in Z/4: -0 + 1 + 1 = 2, divided by 2
    assert_eq!(b.get(&[0, 1, 2]).value(), 1);
    assert_eq!(b.spec(), g);
}

/// Every Z/2 1-cocycle on 4 vertices lifts to a 2-cocycle.
#[test]
fn bockstein_of_cocycles_is_cocycle() {
    for p in [2u64, 3] {
        let g = GroupSpec::ext_chain(p, 1).unwrap();
        let pairs = ascending_tuples(4, 2);
        let mut seen = 0;
        for code in 0..p.pow(6) {
            let mut c = Cochain::identity(1, g, 4).unwrap();
            let mut r = code;
            for t in &pairs {
                c.set(t, e(g, r % p)).unwrap();
                r /= p;
            }
            if !is_cocycle(&c).unwrap().holds {
                continue;
            }
            seen += 1;
            let b = bockstein_lift(&c).unwrap();
            assert!(is_cocycle(&b).unwrap().holds);
        }
        assert_eq!(
            seen,
            p.pow(3),
            "cocycles on 4 vertices are the coboundaries of 0-chains mod constants"
        );
    }
    let g = GroupSpec::ext_chain(2, 1).unwrap();
    let constant = Cochain::from_vertex_values(&[e(g, 1); 4]).unwrap();
    assert!(bockstein_lift(&coboundary(&constant).unwrap())
        .unwrap()
        .is_identity());
}

#[test]
fn three_vertex_schedules_are_always_gerbes() {
    // one triple, no degree-3 relation: δ of any key table is a 2-cocycle
    let g = GroupSpec::cyclic_add(5).unwrap();
    for code in 0..125u64 {
        let c = Cochain::from_pairs(
            g,
            3,
            [
                ((0, 1), e(g, code % 5)),
                ((1, 2), e(g, code / 5 % 5)),
                ((0, 2), e(g, code / 25)),
            ],
        )
        .unwrap();
        assert!(is_cocycle(&coboundary(&c).unwrap()).unwrap().holds);
        let s = KeySchedule::new(triangle(), c.clone()).unwrap();
        assert_eq!(s.is_torsor(), is_cocycle(&c).unwrap().holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn large_group_laws(a in 1u64..65537, b in 1u64..65537, c in 1u64..65537) {
        let g = GroupSpec::cyclic_mul(65537, 3).unwrap();
        let (a, b, c) = (e(g, a), e(g, b), e(g, c));
        prop_assert_eq!((a * b) * c, a * (b * c));
        prop_assert_eq!((a * b).value(), a.value() * b.value() % 65537);
        prop_assert!((a * a.inverse()).is_identity());
    }

    #[test]
    fn degree_two_delta_squared(vals in proptest::collection::vec(0u64..7, 10)) {
        let g = GroupSpec::cyclic_add(7).unwrap();
        let mut c = Cochain::identity(2, g, 5).unwrap();
        for (t, v) in ascending_tuples(5, 3).iter().zip(vals) {
            c.set(t, e(g, v)).unwrap();
        }
        prop_assert!(coboundary(&coboundary(&c).unwrap()).unwrap().is_identity());
    }

    #[test]
    fn antisymmetry(v in 0u64..25, i in 0usize..4, j in 0usize..4) {
        prop_assume!(i != j);
        let g = GroupSpec::ext_chain(5, 2).unwrap();
        let mut c = Cochain::identity(1, g, 4).unwrap();
        c.set(&[i, j], e(g, v)).unwrap();
        prop_assert_eq!(c.get(&[j, i]), e(g, v).inverse());
    }
}
