mod common;

use milnor_cover::brunnian::{band_sum, milnor_link, MilnorLinkSpec};
use milnor_cover::cover::{all_selections, double_cover, mu_bar_over};
use milnor_cover::freealg::{magnus_expand, standard_assignment, AlgebraCtx, GroupWord, TruncatedSeries};
use milnor_cover::milnor::Index;
use milnor_cover::tanglediag::{parse_tangle, Rewrite, TangleWord};
use milnor_cover::{Exec, MilnorEngine, Modulus};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn word_from(seed: u64, m: usize, len: usize) -> TangleWord {
    common::random_word(&mut ChaCha8Rng::seed_from_u64(seed), m, len)
}

fn arb_word() -> impl Strategy<Value = TangleWord> {
    (any::<u64>(), 0usize..=4, 0usize..=10).prop_map(|(s, m, len)| word_from(s, m, len))
}

fn arb_group_word(n: usize) -> impl Strategy<Value = GroupWord> {
    prop::collection::vec((1..=n, prop::bool::ANY), 0..8)
        .prop_map(|v| GroupWord::from_pairs(&v.iter().map(|&(g, pos)| (g, if pos { 1 } else { -1 })).collect::<Vec<_>>()))
}

/// Band sum of Milnor links on three components including the axis.
fn arb_brunnian() -> impl Strategy<Value = TangleWord> {
    let spec = (Just(vec![1usize, 2, 3]).prop_shuffle(), prop_oneof![Just(1i8), Just(-1i8)]);
    prop::collection::vec(spec, 1..=3).prop_map(|specs| {
        specs
            .into_iter()
            .map(|(idx, sign)| milnor_link(&MilnorLinkSpec::new(idx, sign).unwrap()).unwrap())
            .reduce(|a, b| band_sum(&a, &b).unwrap())
            .unwrap()
    })
}

fn arb_rewrite(t: &TangleWord, pick: u64, sign: bool) -> Rewrite {
    let widths = t.layer_widths();
    let spots: Vec<(usize, usize)> =
        (0..widths.len()).flat_map(|l| (1..widths[l].max(1)).map(move |p| (l, p))).collect();
    if pick.is_multiple_of(3) || spots.is_empty() {
        Rewrite::Rotate
    } else {
        let (at, pos) = spots[(pick as usize / 3) % spots.len()];
        Rewrite::InsertR2 { at, pos, positive_first: sign }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_round_trip(t in arb_word()) {
        prop_assert_eq!(parse_tangle(&t.to_text()).unwrap(), t);
    }

    #[test]
    fn tracing_partitions_segments(t in arb_word()) {
        let tr = t.trace().unwrap();
        let widths = t.layer_widths();
        let mut per_comp = vec![0usize; tr.len()];
        for (l, &w) in widths.iter().enumerate().take(widths.len().saturating_sub(1).max(1)) {
            for s in 0..w {
                let (c, _) = tr.at((l, s)).expect("every segment is owned");
                per_comp[c] += 1;
            }
        }
        prop_assert!(per_comp.iter().all(|&k| k > 0));
    }

    #[test]
    fn axis_is_unknotted_and_links_as_traced(t in arb_word()) {
        let ml = t.insert_axis().unwrap();
        prop_assert_eq!(ml.diagram.writhe(ml.axis), 0);
        let o = common::linking_oracle(&t);
        for i in 0..t.component_count() {
            prop_assert_eq!(ml.axis_linking[i], ml.diagram.linking_number(i, ml.axis));
            prop_assert_eq!(ml.axis_linking[i], o.axis[i + 1]);
        }
    }

    #[test]
    fn axis_keeps_the_closure(t in arb_word()) {
        let plain = t.annular_closure().unwrap();
        let ml = t.insert_axis().unwrap();
        let n = t.component_count();
        prop_assert_eq!(ml.diagram.sublink(&(0..n).collect::<Vec<_>>()).unwrap().relabelled(), plain.relabelled());
    }

    #[test]
    fn rewrites_keep_linking(t in arb_word(), moves in prop::collection::vec((any::<u64>(), any::<bool>()), 1..5)) {
        let before = common::linking_oracle(&t);
        let mut r = t.clone();
        for (pick, sign) in moves {
            let mv = arb_rewrite(&r, pick, sign);
            if matches!(mv, Rewrite::Rotate) && r.events().is_empty() {
                continue;
            }
            r = r.rewrite(mv).unwrap();
        }
        let after = common::linking_oracle(&r);
        prop_assert_eq!(before.axis, after.axis);
        prop_assert_eq!(before.lk, after.lk);
    }

    #[test]
    fn mirror_signs(t in arb_brunnian()) {
        let d = t.insert_axis().unwrap().diagram;
        let e = MilnorEngine::new(&d, Modulus::INTEGERS, 4).unwrap();
        let m = MilnorEngine::new(&d.mirror(), Modulus::INTEGERS, 4).unwrap();
        // The word mirror keeps the axis convention, which reverses the axis.
        let w = MilnorEngine::new(&t.mirror().insert_axis().unwrap().diagram, Modulus::INTEGERS, 4).unwrap();
        for i in (2..=3).flat_map(|k| Index::all(3, k, true)) {
            let base = e.mu(&i).unwrap();
            let odd = (i.len() - 1) % 2 == 1;
            let mirrored = if odd { -base.clone() } else { base.clone() };
            prop_assert_eq!(m.mu(&i).unwrap(), mirrored.clone());
            let axis = i.seq().iter().filter(|&&c| c == 3).count() % 2 == 1;
            prop_assert_eq!(w.mu(&i).unwrap(), if axis { -mirrored } else { mirrored });
        }
    }

    #[test]
    fn cyclic_symmetry(t in arb_brunnian()) {
        let e = MilnorEngine::new(&t.insert_axis().unwrap().diagram, Modulus::INTEGERS, 4).unwrap();
        for i in Index::all(3, 3, true) {
            prop_assert_eq!(e.mu_bar(&i).unwrap(), e.mu_bar(&i.rotate(1)).unwrap());
        }
    }

    #[test]
    fn covering_translation_symmetry(t in arb_brunnian()) {
        let model = double_cover(&t).unwrap();
        let all = all_selections(model.n(), false);
        let (zero, one): (Vec<_>, Vec<_>) = all.into_iter().partition(|e| e[0] == 0);
        let i = Index::parse("12").unwrap();
        let vals = |sel: &[Vec<u8>]| {
            let mut v: Vec<BigInt> = mu_bar_over(&model, sel, &i, Modulus::INTEGERS, 4, Exec::Sequential)
                .unwrap()
                .into_iter()
                .map(|e| e.result.mubar)
                .collect();
            v.sort();
            v
        };
        prop_assert_eq!(vals(&zero), vals(&one));
    }

    #[test]
    fn strategies_agree(t in arb_brunnian()) {
        let e = MilnorEngine::new(&t.insert_axis().unwrap().diagram, Modulus::INTEGERS, 4).unwrap();
        let indices: Vec<Index> = (2..=3).flat_map(|k| Index::all(3, k, false)).collect();
        let a: Vec<_> = e.mu_bar_many(Exec::Sequential, &indices).into_iter().map(Result::unwrap).collect();
        let b: Vec<_> = e.mu_bar_many(Exec::Parallel, &indices).into_iter().map(Result::unwrap).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn magnus_is_a_homomorphism(u in arb_group_word(3), v in arb_group_word(3)) {
        let ctx = AlgebraCtx::new(3, 4, Modulus::INTEGERS).unwrap();
        let asg = standard_assignment(ctx);
        let mu = magnus_expand(ctx, &u, &asg).unwrap();
        let mv = magnus_expand(ctx, &v, &asg).unwrap();
        prop_assert_eq!(magnus_expand(ctx, &u.concat(&v), &asg).unwrap(), mu.mul(&mv).unwrap());
        let cancel = magnus_expand(ctx, &u.concat(&u.inverse()), &asg).unwrap();
        prop_assert_eq!(cancel, TruncatedSeries::one(ctx));
        prop_assert_eq!(magnus_expand(ctx, &u.free_reduce(), &asg).unwrap(), mu);
    }

    #[test]
    fn reduction_commutes_with_products(u in arb_group_word(2), v in arb_group_word(2), p in prop_oneof![Just(2u64), Just(3), Just(5), Just(7)]) {
        let z = AlgebraCtx::new(2, 4, Modulus::INTEGERS).unwrap();
        let zp = AlgebraCtx::new(2, 4, Modulus::new(p).unwrap()).unwrap();
        let a = magnus_expand(z, &u.concat(&v), &standard_assignment(z)).unwrap();
        let b = magnus_expand(zp, &u.concat(&v), &standard_assignment(zp)).unwrap();
        prop_assert_eq!(a.reduce_mod(Modulus::new(p).unwrap()), b);
    }
}
