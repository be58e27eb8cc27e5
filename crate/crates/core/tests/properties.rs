//! Property tests over randomly generated ends, cones and rationals.

use proptest::prelude::*;
use treelike::*;

fn end() -> impl Strategy<Value = End> {
    prop::collection::btree_set(-10i64..=10, 0..8).prop_map(End::new)
}

fn distinct_ends(n: usize) -> impl Strategy<Value = Vec<End>> {
    prop::collection::btree_set(prop::collection::btree_set(-6i64..=6, 0..6), n).prop_map(|sets| {
        sets.into_iter().map(End::new).collect()
    })
}

fn cone() -> impl Strategy<Value = Cone> {
    (end(), -5i64..=5, 0usize..3)
        .prop_map(|(x, level, dir)| Cone::at(&TreeVertex::on_end(&x, level), Direction::ALL[dir]))
}

fn generator() -> impl Strategy<Value = Generator> {
    prop_oneof![
        end().prop_map(Generator::GlobalXor),
        (-4i64..=4).prop_map(Generator::Shift),
        Just(Generator::Reflect),
        (end(), -4i64..=4, end()).prop_map(|(x, level, mask)| {
            Generator::cone_xor(Cone::prefix(TreeVertex::on_end(&x, level)), mask.restrict_from(level)).unwrap()
        }),
    ]
}

fn automorphism() -> impl Strategy<Value = Automorphism> {
    prop::collection::vec(generator(), 0..5).prop_map(Automorphism::from_gens)
}

fn rational() -> impl Strategy<Value = Rational> {
    (-500i64..=500, 1i64..=500).prop_map(|(n, d)| Rational::new(n, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn tree_and_sequence_relations_agree(x in end(), y in end(), z in end(), w in end()) {
        prop_assert_eq!(d_from_tree(&x, &y, &z, &w), d_from_c(&x, &y, &z, &w));
    }

    #[test]
    fn d_is_symmetric_in_and_across_pairs(x in end(), y in end(), z in end(), w in end()) {
        let d = d_from_c(&x, &y, &z, &w);
        prop_assert_eq!(d, d_from_c(&y, &x, &z, &w));
        prop_assert_eq!(d, d_from_c(&x, &y, &w, &z));
        prop_assert_eq!(d, d_from_c(&z, &w, &x, &y));
    }

    #[test]
    fn automorphisms_preserve_d_and_invert(g in automorphism(), q in prop::array::uniform4(end())) {
        let [x, y, z, w] = &q;
        let img = q.clone().map(|e| g.apply(&e));
        prop_assert_eq!(d_from_c(x, y, z, w), d_from_c(&img[0], &img[1], &img[2], &img[3]));
        let back = g.inverse();
        for e in &q {
            prop_assert_eq!(&back.apply(&g.apply(e)), e);
        }
    }

    #[test]
    fn automorphisms_carry_cones_to_cones(g in automorphism(), c in cone(), x in end()) {
        let v = g.apply_vertex(c.vertex());
        let image_cone = cone_containing(&v, &g.apply(&c.canonical_end()));
        prop_assert_eq!(c.contains(&x), image_cone.contains(&g.apply(&x)));
    }

    #[test]
    fn jordan_witness_fixes_the_outside(c in cone(), seeds in prop::array::uniform3(any::<u64>()), z in end()) {
        use rand::SeedableRng;
        let s = EndSampler::new(10);
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seeds[0]);
        let x = c.sample(&s, &mut r);
        let y = c.sample(&s, &mut r);
        let g = jordan_witness(&c, &x, &y).unwrap();
        prop_assert_eq!(g.apply(&x), y);
        if !c.contains(&z) {
            prop_assert_eq!(g.apply(&z), z);
        }
    }

    #[test]
    fn three_cones_at_a_vertex_partition_the_ends(x in end(), level in -6i64..=6, y in end()) {
        let v = TreeVertex::on_end(&x, level);
        let hits = cones_at(&v).iter().filter(|c| c.contains(&y)).count();
        prop_assert_eq!(hits, 1);
        prop_assert!(cone_containing(&v, &y).contains(&y));
    }

    #[test]
    fn complement_of_a_cone_is_its_opposite(c in cone(), x in end()) {
        prop_assert_eq!(c.complement().contains(&x), !c.contains(&x));
        prop_assert_eq!(c.complement().complement(), c);
    }

    #[test]
    fn definable_set_algebra_matches_pointwise_logic(
        a in prop::collection::vec(cone(), 1..4),
        b in prop::collection::vec(cone(), 1..4),
        x in end(),
    ) {
        let sa = union_collapse(&a);
        let sb = union_collapse(&b);
        let in_a = a.iter().any(|c| c.contains(&x));
        let in_b = b.iter().any(|c| c.contains(&x));
        prop_assert_eq!(sa.contains(&x), in_a);
        prop_assert_eq!(sa.complement().contains(&x), !in_a);
        prop_assert_eq!(sa.union(&sb).contains(&x), in_a || in_b);
        prop_assert_eq!(sa.intersect(&sb).contains(&x), in_a && in_b);
        prop_assert_eq!(sa.difference(&sb).contains(&x), in_a && !in_b);
    }

    #[test]
    fn qf_type_by_shape_matches_atom_tables(t1 in distinct_ends(4), t2 in distinct_ends(4)) {
        let by_shape = qf_type_equal(&t1, &t2).unwrap();
        prop_assert_eq!(by_shape, AtomTable::of(&t1) == AtomTable::of(&t2));
    }

    #[test]
    fn automorphic_tuples_have_equal_shapes(t in distinct_ends(5), g in automorphism()) {
        let image: Vec<End> = t.iter().map(|x| g.apply(x)).collect();
        prop_assert!(qf_type_equal(&t, &image).unwrap());
    }

    #[test]
    fn outside_ends_are_claimed_once(a in distinct_ends(4), x in end()) {
        let cls = orbit_classification(&a).unwrap();
        let expected = usize::from(!a.contains(&x));
        prop_assert_eq!(cls.claims(&x).len(), expected);
    }

    #[test]
    fn valuation_is_additive(p in prop::sample::select(vec![2u64, 3, 5, 7]), x in rational(), y in rational()) {
        prop_assume!(!x.is_zero() && !y.is_zero());
        let p = Prime::new(p).unwrap();
        let (Valuation::Finite(a), Valuation::Finite(b), Valuation::Finite(c)) =
            (v_p(p, &x), v_p(p, &y), v_p(p, &(&x * &y)))
        else {
            panic!("nonzero rationals have finite valuation");
        };
        prop_assert_eq!(a + b, c);
    }

    #[test]
    fn c_p_is_translation_and_scaling_invariant(
        p in prop::sample::select(vec![2u64, 3, 5]),
        t in prop::array::uniform3(rational()),
        a in rational(),
        b in rational(),
    ) {
        prop_assume!(!a.is_zero());
        let p = Prime::new(p).unwrap();
        let m = AffineMap::new(a, b).unwrap();
        let img = t.clone().map(|x| m.apply(&x));
        prop_assert_eq!(c_p(p, &t[0], &t[1], &t[2]), c_p(p, &img[0], &img[1], &img[2]));
    }

    #[test]
    fn separation_matches_circular_order(q in prop::array::uniform4(rational())) {
        if let Ok(s) = s_rel(&q[0], &q[1], &q[2], &q[3]) {
            prop_assert_eq!(s, k_rel(&q[0], &q[2], &q[1]) != k_rel(&q[0], &q[3], &q[1]));
        }
    }
}

#[test]
fn ball_size_is_the_sum_of_spheres() {
    for (k, l) in [(2, 3), (3, 3), (2, 4), (4, 2), (3, 5)] {
        let mut total = 0;
        for s in 0..6 {
            total += gamma_s(k, l, s).unwrap();
            assert_eq!(ball_size(k, l, s), Some(total), "k={k} l={l} s={s}");
        }
    }
}
