use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use totnet::survey::{run_survey, MatchTarget, SurveyConfig};
use totnet::tot::{collect_matches, group_by_curve, neuron_loss_signature, MatchedSet};
use totnet::{
    exact_recall_count, recall_curve, BipolarVector, Conventions, CuePlacement, DamageSpec,
    DiagonalPolicy, Link, RationalProb, TiePolicy, TrainedNet,
};
use totnet_oracle as oracle;

/// Cut sets grouped by oracle curve.
type CurveGroups = BTreeMap<Vec<(u64, u64)>, BTreeSet<Vec<Link>>>;

fn to_oracle(c: Conventions) -> (bool, oracle::Tie, oracle::Cue) {
    let tie = match c.tie {
        TiePolicy::StrictMinus => oracle::Tie::Strict,
        TiePolicy::LenientPlus => oracle::Tie::Lenient,
        TiePolicy::TieFails => oracle::Tie::Fails,
    };
    let cue = match c.cue {
        CuePlacement::Averaged => oracle::Cue::Averaged,
        CuePlacement::Leading => oracle::Cue::Leading,
    };
    (c.diagonal == DiagonalPolicy::Keep, tie, cue)
}

fn oracle_curve(x: &[i32], c: Conventions, damage: &DamageSpec) -> Vec<(u64, u64)> {
    let (keep, tie, cue) = to_oracle(c);
    let deleted: Vec<usize> = damage.deleted_inputs.iter().copied().collect();
    let cuts: Vec<(usize, usize)> = damage.cut_links.iter().map(|l| (l.input, l.output)).collect();
    let w = oracle::lesion(&oracle::train(x, keep), &deleted, &cuts);
    oracle::curve(&w, x, tie, cue)
}

fn as_prob((a, b): (u64, u64)) -> RationalProb {
    let (a, b) = oracle::reduce((a, b));
    RationalProb::new(a, b).unwrap()
}

fn signs(x: &BipolarVector) -> Vec<i32> {
    x.signs().into_iter().map(i32::from).collect()
}

#[test]
fn intact_nine_neuron_values_from_oracle() {
    let x = vec![1; 9];
    let w = oracle::train(&x, true);
    let count = |m| oracle::recall_count(&w, &x, oracle::Tie::Strict, oracle::Cue::Averaged, m);
    assert_eq!(oracle::reduce(count(9)), (1, 1));
    assert_eq!(oracle::reduce(count(0)), (1, 2));
    assert_eq!(oracle::reduce(count(3)), (57, 64));

    let net = TrainedNet::train(BipolarVector::all_plus(9).unwrap(), Conventions::default());
    let curve = recall_curve(&net);
    assert_eq!(curve.points[9], RationalProb::one());
    assert_eq!(curve.points[0], "1/2".parse().unwrap());
    assert_eq!(curve.points[3], "57/64".parse().unwrap());
}

#[test]
fn neuron_loss_signature_matches_oracle_for_every_subset() {
    let x = vec![1; 9];
    let c = Conventions::default();
    let sig = neuron_loss_signature(BipolarVector::all_plus(9).unwrap(), 4, c).unwrap();
    let sig = sig.unique().expect("126 subsets share one curve");
    for subset in oracle::combinations(9, 4) {
        let w = oracle::lesion(&oracle::train(&x, true), &subset, &[]);
        let expect: Vec<RationalProb> = oracle::curve(&w, &x, oracle::Tie::Strict, oracle::Cue::Averaged)
            .into_iter()
            .map(as_prob)
            .collect();
        assert_eq!(sig.points, expect, "{subset:?}");
    }
}

fn cut_set_from_mask(mask: u32) -> Vec<Link> {
    (0..9).filter(|b| mask >> b & 1 == 1).map(|b| Link::new(b / 3, b % 3)).collect()
}

/// Every one of the 2^9 cut masks on a 3-neuron net, all conventions.
#[test]
fn three_neuron_exhaustive_curves_and_classes() {
    let x = BipolarVector::from_signs(&[1, -1, 1]).unwrap();
    for c in Conventions::all() {
        let template = TrainedNet::train(x, c);
        let mut by_size: BTreeMap<usize, Vec<MatchedSet>> = BTreeMap::new();
        let mut oracle_groups: BTreeMap<usize, CurveGroups> =
            BTreeMap::new();
        for mask in 0u32..512 {
            let links = cut_set_from_mask(mask);
            let damage = DamageSpec::cut(links.iter().copied());
            let expect = oracle_curve(&signs(&x), c, &damage);
            let net = template.apply_damage(&damage).unwrap();
            let got = recall_curve(&net);
            let reduced: Vec<RationalProb> = expect.iter().copied().map(as_prob).collect();
            assert_eq!(got.points, reduced, "{c} mask {mask:#b}");
            for (m, &(hits, total)) in expect.iter().enumerate() {
                let count = exact_recall_count(&net, m).unwrap();
                assert_eq!((count.successes, count.total), (hits, total));
            }
            let nd = links.len();
            by_size.entry(nd).or_default().push(MatchedSet { links: links.clone(), per_series: vec![1] });
            oracle_groups.entry(nd).or_default().entry(expect.into_iter().map(oracle::reduce).collect()).or_default().insert(links);
        }
        for (nd, sets) in by_size {
            let classes = group_by_curve(&sets, &template, sets.len() as u64).unwrap();
            let ours: BTreeSet<BTreeSet<Vec<Link>>> = classes
                .iter()
                .map(|cl| cl.members.iter().map(|m| m.links.clone()).collect())
                .collect();
            let theirs: BTreeSet<BTreeSet<Vec<Link>>> = oracle_groups[&nd].values().cloned().collect();
            assert_eq!(ours, theirs, "{c} n_d = {nd}");
            let member_total: u64 = classes.iter().map(|cl| cl.frequency.total).sum();
            assert_eq!(member_total as usize, sets.len());
        }
    }
}

#[test]
fn three_neuron_target_lands_in_matches() {
    let x = BipolarVector::all_plus(3).unwrap();
    let chosen = vec![Link::new(0, 0), Link::new(1, 2)];
    let damage = DamageSpec::cut(chosen.iter().copied());
    let pfr = oracle_curve(&signs(&x), Conventions::default(), &damage)[0];
    assert_eq!(pfr.1, 8);
    let target = RationalProb::from_counts(pfr.0, pfr.1);
    let config = SurveyConfig {
        n: 3,
        n_d: 2,
        trials_per_series: 2000,
        series: 2,
        seed: 5,
        conventions: Conventions::default(),
        reference: x,
        target: Some(MatchTarget::Exact(target.clone())),
    };
    let survey = run_survey(&config).unwrap();
    let matches = collect_matches(&survey, &target).unwrap();
    assert!(matches.iter().any(|m| m.links == chosen));
    for m in &matches {
        let d = DamageSpec::cut(m.links.iter().copied());
        assert_eq!(oracle_curve(&signs(&x), Conventions::default(), &d)[0].0, pfr.0);
    }
}

fn conventions() -> impl Strategy<Value = Conventions> {
    (0..12usize).prop_map(|i| Conventions::all()[i])
}

fn lesioned(max_n: usize) -> impl Strategy<Value = (BipolarVector, DamageSpec)> {
    (2..=max_n).prop_flat_map(|n| {
        (
            proptest::collection::vec(prop_oneof![Just(1i64), Just(-1i64)], n),
            proptest::collection::btree_set(0..n, 0..=2),
            proptest::collection::btree_set((0..n, 0..n).prop_map(|(i, j)| Link::new(i, j)), 0..=n * n / 2),
        )
            .prop_map(|(s, del, cuts)| {
                (BipolarVector::from_signs(&s).unwrap(), DamageSpec { deleted_inputs: del, cut_links: cuts })
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn curves_agree_with_oracle((x, damage) in lesioned(7), c in conventions()) {
        let net = TrainedNet::train(x, c).apply_damage(&damage).unwrap();
        let expect = oracle_curve(&signs(&x), c, &damage);
        let got = recall_curve(&net);
        prop_assert_eq!(got.points, expect.iter().copied().map(as_prob).collect::<Vec<_>>());
        for (m, &(hits, total)) in expect.iter().enumerate() {
            let count = exact_recall_count(&net, m).unwrap();
            prop_assert_eq!((count.successes, count.total), (hits, total));
        }
    }
}
