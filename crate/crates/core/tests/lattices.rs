use proptest::prelude::*;
use realstrata::fqf::rational;
use realstrata::lattices::*;
use realstrata::FiniteQuadraticForm;

fn spec(s: &str) -> RootSpec {
    s.parse().unwrap()
}

fn cyc(m: i64, n: i64) -> FiniteQuadraticForm {
    FiniteQuadraticForm::cyclic(m, n).unwrap()
}

#[test]
fn golden_polarized_discriminants() {
    let cases = [
        (
            "D7+A6+A3+A2",
            4,
            vec![(1, 4), (-6, 7), (-3, 4), (-2, 3), (1, 4)],
        ),
        (
            "A7+A6+A3+A2",
            4,
            vec![(-7, 8), (-6, 7), (-3, 4), (-2, 3), (1, 4)],
        ),
        (
            "A7+A6+A5",
            2,
            vec![(-7, 8), (-6, 7), (2, 3), (1, 2), (1, 2)],
        ),
    ];
    for (s, h2, parts) in cases {
        let pf = polarized_disc(&spec(s), h2).unwrap();
        let expected = parts
            .iter()
            .fold(FiniteQuadraticForm::trivial(), |acc, &(m, n)| {
                acc.direct_sum(&cyc(m, n))
            });
        assert_eq!(pf.form, expected, "{s}");
    }
    // [-5/6] is presented by its primary parts, larger prime first
    let a5 = disc_root(&AdeLabel::a(5)).unwrap();
    assert_eq!(a5, cyc(2, 3).direct_sum(&cyc(1, 2)));
}

#[test]
fn root_discriminant_orders() {
    for n in 1..=19 {
        assert_eq!(
            disc_root(&AdeLabel::a(n)).unwrap().order(),
            u64::from(n) + 1
        );
    }
    for n in 4..=19 {
        let d = disc_root(&AdeLabel::d(n)).unwrap();
        assert_eq!(d.order(), 4);
        assert_eq!(d.rank(), if n % 2 == 0 { 2 } else { 1 });
        assert_eq!(
            d.q_value(0),
            &realstrata::fqf::reduce_mod(&rational(-(n as i128), 4), 2)
        );
    }
    assert_eq!(disc_root(&AdeLabel::e(6)).unwrap().order(), 3);
    assert_eq!(disc_root(&AdeLabel::e(7)).unwrap().order(), 2);
}

#[test]
fn tags_reproduce_component_discriminants() {
    let s = spec("D6+A7+E6+2*A2+E8");
    let pf = polarized_disc(&s, 6).unwrap();
    for (c, label) in s.components().iter().enumerate() {
        let gens = pf.component_generators(c);
        let orders: Vec<i64> = pf.component_ranges[c]
            .clone()
            .map(|i| pf.form.orders()[i])
            .collect();
        let restricted = pf.form.restrict(&gens, &orders).unwrap();
        assert_eq!(restricted, disc_root(label).unwrap());
    }
    assert_eq!(pf.tags[pf.h_index], GeneratorTag::H);
    assert_eq!(pf.form.q_value(pf.h_index), &rational(1, 6));
}

#[test]
fn involution_counts() {
    let pf = polarized_disc(&spec("A7+A6+A3+A2"), 4).unwrap();
    assert_eq!(disc_involutions(&pf).unwrap().len(), 32);
    // E8 contributes nothing: only ±id on h
    let pf = polarized_disc(&spec("E8"), 4).unwrap();
    assert_eq!(disc_involutions(&pf).unwrap().len(), 2);
    // h² = 2 makes ±id_h coincide
    let pf = polarized_disc(&spec("E8"), 2).unwrap();
    assert_eq!(disc_involutions(&pf).unwrap().len(), 1);
    // D4: identity and three transpositions, times ±id_h
    let pf = polarized_disc(&spec("D4"), 4).unwrap();
    assert_eq!(disc_involutions(&pf).unwrap().len(), 8);
}

#[test]
fn two_a1_contains_swap() {
    let pf = polarized_disc(&spec("2*A1"), 4).unwrap();
    let invs = disc_involutions(&pf).unwrap();
    let swap = DiscAutomorphism::new(vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]);
    assert!(invs.contains(&swap));
    // identity and swap, times ±id_h
    assert_eq!(invs.len(), 4);
}

#[test]
fn involutions_are_isometric_involutions() {
    for (s, h2) in [
        ("A7+A6+A3+A2", 4),
        ("D4+D6+E6", 2),
        ("3*A2+A3", 6),
        ("2*D5+E7", 4),
    ] {
        let pf = polarized_disc(&spec(s), h2).unwrap();
        for inv in disc_involutions(&pf).unwrap() {
            inv.validate(&pf.form).unwrap();
            assert!(inv.is_involution(&pf.form));
            assert!(is_diagram_symmetry(&pf, &inv).unwrap());
        }
    }
}

#[test]
fn non_symmetry_rejected() {
    // multiplication by 4 on [-14/15] preserves q but is not ±1: it negates
    // the 5-part and fixes the 3-part
    let pf = polarized_disc(&spec("A14"), 2).unwrap();
    let three = DiscAutomorphism::new(vec![vec![-1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    three.validate(&pf.form).unwrap();
    assert!(!is_diagram_symmetry(&pf, &three).unwrap());
}

#[test]
fn skew_reflections() {
    // reflections of [[2,0],[0,6]] act trivially on disc T
    let pf = polarized_disc(&spec("E8+E8+A2+A1"), 2).unwrap();
    let t = BinaryLattice::new(2, 0, 6).unwrap();
    assert!(maximizing_has_skew(&t, &pf).unwrap());
    // hexagonal T: a norm-2 reflection witnesses the skew involution
    let pf = polarized_disc(&spec("E8+E8+A1+A2"), 2).unwrap();
    let hex = BinaryLattice::new(2, 1, 2).unwrap();
    assert!(maximizing_has_skew(&hex, &pf).is_err());
    let pf = polarized_disc(&spec("E8+E8+A3"), 2).unwrap();
    let t = BinaryLattice::new(2, 0, 4).unwrap();
    let found = skew_search(&t, &pf).unwrap();
    assert!(found.found);
    let w = found.witness.unwrap();
    assert_eq!(w.det, -1);
    // reflections exist but act on disc T outside the diagram symmetries
    let pf = polarized_disc(&spec("E8+A11"), 2).unwrap();
    let t = BinaryLattice::new(4, 0, 6).unwrap();
    let res = skew_search(&t, &pf).unwrap();
    assert!(res.reflections > 0);
    assert!(!res.found);
}

#[test]
fn skew_mismatch_is_error() {
    let pf = polarized_disc(&spec("A18+A1"), 2).unwrap();
    let t = BinaryLattice::new(2, 0, 2).unwrap();
    assert!(matches!(
        skew_search(&t, &pf),
        Err(realstrata::Error::DiscMismatch(_))
    ));
}

fn small_binary() -> impl Strategy<Value = BinaryLattice> {
    (1i64..8, -8i64..8, 1i64..12).prop_filter_map("positive definite", |(a, b, d)| {
        BinaryLattice::new(2 * a, b, 2 * d).ok()
    })
}

proptest! {
    #[test]
    fn binary_autos_form_a_group(t in small_binary()) {
        let g = binary_autos(&t);
        let id = g.iter().find(|x| x.matrix == [[1, 0], [0, 1]]).cloned();
        prop_assert!(id.is_some());
        prop_assert!(g.iter().any(|x| x.matrix == [[-1, 0], [0, -1]]));
        for x in &g {
            for y in &g {
                prop_assert!(g.contains(&x.compose(y)));
            }
            prop_assert!(g.iter().any(|y| x.compose(y).matrix == [[1, 0], [0, 1]]));
            if x.is_reflection() {
                prop_assert_eq!(x.trace(), 0);
            }
        }
    }

    #[test]
    fn spec_canonical_roundtrip(parts in proptest::collection::vec((0usize..3, 1u32..9, 1usize..3), 0..5)) {
        let labels: Vec<AdeLabel> = parts
            .iter()
            .flat_map(|&(k, n, c)| {
                let l = match k {
                    0 => AdeLabel::a(n),
                    1 => AdeLabel::d(n.max(4)),
                    _ => AdeLabel::e(6 + n % 3),
                };
                std::iter::repeat_n(l, c)
            })
            .collect();
        let s = RootSpec::new(labels);
        let back: RootSpec = s.canonical().parse().unwrap();
        prop_assert_eq!(back, s);
    }
}
