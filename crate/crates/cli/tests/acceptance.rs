//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
//!
//! Run with `cargo test --release -p totnet-cli --test acceptance`.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use totnet::survey::{run_survey_with_workers, sample_cut_set, MatchTarget, SurveyConfig};
use totnet::tot::{group_by_curve, reported, MatchedSet};
use totnet::{
    exact_recall_prob, mc_recall_estimate, recall_curve, BipolarVector, Conventions, CuePlacement,
    DamageSpec, DiagonalPolicy, Link, RationalProb, TiePolicy, TrainedNet,
};
use totnet_cli::commands::{
    cmd_classify, cmd_conventions, cmd_survey, ClassifyArgs, ConventionsArgs, NetArgs, SurveyArgs,
};
use totnet_oracle as oracle;

/// Cut sets grouped by oracle curve.
type CurveGroups = BTreeMap<Vec<(u64, u64)>, BTreeSet<Vec<Link>>>;

/// MC estimates must lie within this many standard errors of the exact value.
const MC_SIGMAS: f64 = 4.0;
const MC_TRIALS: u64 = 100_000;
const RANDOM_CASES: usize = 100;
const SUITE_1_BUDGET: Duration = Duration::from_secs(60);
const CONVENTION_BUDGET: Duration = Duration::from_secs(10);
const SURVEY_BUDGET: Duration = Duration::from_secs(600);
const SURVEY_SEED: u64 = 2001;
/// Accepted distinct-value band when a convention reproduces the printed P_FR.
const DISTINCT_BAND: (usize, usize) = (60, 66);
/// mean ± 3 std of the reported link-cut TOT frequency, percent.
const TOT_BAND_PCT: (f64, f64) = (3.9e-3, 10.9e-3);
const REPORTED_CLASSES: usize = 2;
const INTACT_CEILING_PCT: f64 = 0.2;
/// Relative tolerance for the printed approximation of C(81,10).
const BINOMIAL_REL_TOL: f64 = 0.01;

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: &'static str, pass: bool, detail: impl Into<String>) -> Outcome {
    let o = Outcome { id, pass, detail: detail.into() };
    println!("[{}] {:<4} {}", if o.pass { "PASS" } else { "FAIL" }, o.id, o.detail);
    o
}

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

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> BipolarVector {
    BipolarVector::from_bits(n, rng.random::<u32>() & ((1u32 << n) - 1)).unwrap()
}

fn random_damage(rng: &mut ChaCha8Rng, n: usize) -> DamageSpec {
    let n_deleted = rng.random_range(0..=2.min(n));
    let n_cut = rng.random_range(0..=n * n / 2);
    let mut inputs: Vec<usize> = (0..n).collect();
    inputs.shuffle(rng);
    DamageSpec {
        deleted_inputs: inputs[..n_deleted].iter().copied().collect(),
        cut_links: sample_cut_set(rng, n, n_cut).unwrap().into_iter().collect(),
    }
}

fn determinism() -> Outcome {
    let mut configs = vec![
        SurveyConfig {
            trials_per_series: 20_000,
            series: 3,
            target: Some(MatchTarget::Exact("146/512".parse().unwrap())),
            ..SurveyConfig::default_protocol(7)
        },
        SurveyConfig {
            n: 6,
            n_d: 5,
            trials_per_series: 30_000,
            series: 2,
            seed: 8,
            conventions: Conventions { diagonal: DiagonalPolicy::Zero, tie: TiePolicy::TieFails, ..Conventions::default() },
            reference: BipolarVector::from_signs(&[1, -1, 1, 1, -1, -1]).unwrap(),
            target: Some(MatchTarget::NeuronLoss { n_k: 2 }),
        },
    ];
    configs.push(SurveyConfig {
        n: 12,
        n_d: 30,
        trials_per_series: 2_000,
        series: 2,
        seed: 9,
        conventions: Conventions { tie: TiePolicy::LenientPlus, cue: CuePlacement::Leading, ..Conventions::default() },
        reference: BipolarVector::all_plus(12).unwrap(),
        target: None,
    });
    let mut identical = 0;
    for config in &configs {
        let runs: Vec<String> = [1, 4, 8]
            .iter()
            .map(|&w| serde_json::to_string(&run_survey_with_workers(config, w).unwrap()).unwrap())
            .collect();
        if runs.iter().all(|r| *r == runs[0]) {
            identical += 1;
        }
    }
    outcome(
        "1a",
        identical == configs.len(),
        format!("survey bytes identical for 1/4/8 workers in {identical}/{} configs", configs.len()),
    )
}

fn monte_carlo() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1b);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    let mut checks = 0;
    for case in 0..RANDOM_CASES {
        let n_d = rng.random_range(1..=20);
        let x = random_vector(&mut rng, 9);
        let cuts = sample_cut_set(&mut rng, 9, n_d).unwrap();
        let net = TrainedNet::train(x, Conventions::default()).apply_damage(&DamageSpec::cut(cuts)).unwrap();
        for m in [0, 3, 9] {
            let p = exact_recall_prob(&net, m).unwrap().to_f64();
            let est = mc_recall_estimate(&net, m, MC_TRIALS, case as u64 * 16 + m as u64).unwrap();
            let se = (p * (1.0 - p) / MC_TRIALS as f64).sqrt();
            let dev = (est.estimate - p).abs();
            let ok = if se == 0.0 { dev == 0.0 } else { dev <= MC_SIGMAS * se };
            if se > 0.0 {
                worst = worst.max(dev / se);
            }
            checks += 1;
            if !ok {
                failures += 1;
            }
        }
    }
    outcome(
        "1b",
        failures == 0,
        format!(
            "{RANDOM_CASES} lesioned nets x m in {{0,3,9}}: {}/{checks} MC estimates within {MC_SIGMAS} SE (worst {worst:.2} SE)",
            checks - failures
        ),
    )
}

fn three_neuron_oracle() -> Outcome {
    let x = [1, -1, 1];
    let bx = BipolarVector::from_signs(&[1, -1, 1]).unwrap();
    let mut curve_mismatch = 0;
    let mut class_mismatch = 0;
    for c in Conventions::all() {
        let (keep, tie, cue) = to_oracle(c);
        let template = TrainedNet::train(bx, c);
        let mut ours: BTreeMap<usize, Vec<MatchedSet>> = BTreeMap::new();
        let mut theirs: BTreeMap<usize, CurveGroups> = BTreeMap::new();
        for mask in 0u32..512 {
            let links: Vec<Link> = (0..9).filter(|b| mask >> b & 1 == 1).map(|b| Link::new(b / 3, b % 3)).collect();
            let cuts: Vec<(usize, usize)> = links.iter().map(|l| (l.input, l.output)).collect();
            let w = oracle::lesion(&oracle::train(&x, keep), &[], &cuts);
            let expect: Vec<(u64, u64)> = oracle::curve(&w, &x, tie, cue).into_iter().map(oracle::reduce).collect();
            let got = recall_curve(&template.apply_damage(&DamageSpec::cut(links.iter().copied())).unwrap());
            let expect_p: Vec<RationalProb> =
                expect.iter().map(|&(a, b)| RationalProb::new(a, b).unwrap()).collect();
            if got.points != expect_p {
                curve_mismatch += 1;
            }
            ours.entry(links.len()).or_default().push(MatchedSet { links: links.clone(), per_series: vec![1] });
            theirs.entry(links.len()).or_default().entry(expect).or_default().insert(links);
        }
        for (nd, sets) in ours {
            let classes = group_by_curve(&sets, &template, 1).unwrap();
            let a: BTreeSet<BTreeSet<Vec<Link>>> =
                classes.iter().map(|k| k.members.iter().map(|m| m.links.clone()).collect()).collect();
            let b: BTreeSet<BTreeSet<Vec<Link>>> = theirs[&nd].values().cloned().collect();
            if a != b {
                class_mismatch += 1;
            }
        }
    }
    outcome(
        "1c",
        curve_mismatch == 0 && class_mismatch == 0,
        format!(
            "n=3, 512 cut masks x 12 conventions: {curve_mismatch} curve mismatches, {class_mismatch} class-partition mismatches"
        ),
    )
}

fn gauge_and_permutation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1d);
    let all = Conventions::all();
    let mut gauge_fail: BTreeMap<TiePolicy, usize> = BTreeMap::new();
    let mut gauge_cases: BTreeMap<TiePolicy, usize> = BTreeMap::new();
    let mut perm_fail = 0;
    for _ in 0..RANDOM_CASES {
        let n = rng.random_range(2..=9);
        let c = all[rng.random_range(0..all.len())];
        let x = random_vector(&mut rng, n);
        let eps = random_vector(&mut rng, n);
        let damage = random_damage(&mut rng, n);

        let base = TrainedNet::train(x, c).apply_damage(&damage).unwrap();
        let gauged = TrainedNet::train(x.hadamard(&eps).unwrap(), c).apply_damage(&damage).unwrap();
        let commutes = (0..1u32 << n).all(|bits| {
            let u = BipolarVector::from_bits(n, bits).unwrap();
            let a = base.forward(&u).unwrap();
            let b = gauged.forward(&u.hadamard(&eps).unwrap()).unwrap();
            let untied = !a.ties & ((1u32 << n) - 1);
            a.ties == b.ties && (a.output.hadamard(&eps).unwrap().bits() ^ b.output.bits()) & untied == 0
        });
        *gauge_cases.entry(c.tie).or_default() += 1;
        if !commutes || recall_curve(&base) != recall_curve(&gauged) {
            *gauge_fail.entry(c.tie).or_default() += 1;
        }

        let pc = Conventions { cue: CuePlacement::Averaged, ..c };
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let a = TrainedNet::train(x, pc).apply_damage(&damage).unwrap();
        let b = TrainedNet::train(x.permuted(&perm).unwrap(), pc).apply_damage(&damage.permuted(&perm)).unwrap();
        if recall_curve(&a) != recall_curve(&b) {
            perm_fail += 1;
        }
    }
    let total_gauge_fail: usize = gauge_fail.values().sum();
    let breakdown: Vec<String> = gauge_cases
        .iter()
        .map(|(t, k)| format!("{t}: {}/{k} fail", gauge_fail.get(t).copied().unwrap_or(0)))
        .collect();
    outcome(
        "1d",
        total_gauge_fail == 0 && perm_fail == 0,
        format!(
            "{RANDOM_CASES} random cases: permutation {perm_fail} fail; gauge {total_gauge_fail} fail ({}). \
             A zero field maps to a fixed sign under strict_minus/lenient_plus, so gauge invariance holds only under tie_fails",
            breakdown.join(", ")
        ),
    )
}

fn intact_properties() -> Outcome {
    let net = TrainedNet::train(BipolarVector::all_plus(9).unwrap(), Conventions::default());
    let curve = recall_curve(&net);
    let monotone = curve.points.windows(2).all(|w| w[0] <= w[1]);
    let ok = curve.points[9] == RationalProb::one() && curve.points[0] == "1/2".parse().unwrap() && monotone;
    outcome(
        "1e",
        ok,
        format!("P(m=9) = {}, P(m=0) = {}, monotone = {monotone}", curve.points[9], curve.points[0]),
    )
}

fn main() -> ExitCode {
    let mut results = Vec::new();

    let start = Instant::now();
    results.push(determinism());
    results.push(monte_carlo());
    results.push(three_neuron_oracle());
    results.push(gauge_and_permutation());
    results.push(intact_properties());
    let suite_1 = start.elapsed();
    results.push(outcome(
        "1t",
        suite_1 <= SUITE_1_BUDGET,
        format!("suite 1 runtime {:.1} s (budget {} s)", suite_1.as_secs_f64(), SUITE_1_BUDGET.as_secs()),
    ));

    let start = Instant::now();
    let conv = cmd_conventions(&ConventionsArgs::default()).unwrap();
    let elapsed = start.elapsed();
    let winning = conv.report.matching().first().copied();
    let explicit = winning.is_some() || conv.statement.starts_with("NO convention combination reproduces");
    let distinct_values: BTreeSet<String> = conv.report.rows.iter().map(|r| r.rendered.clone()).collect();
    results.push(outcome(
        "2",
        conv.report.rows.len() == Conventions::all().len() && explicit && elapsed <= CONVENTION_BUDGET,
        format!(
            "{} combinations in {:.2} s; printed values {:?}; {}",
            conv.report.rows.len(),
            elapsed.as_secs_f64(),
            distinct_values,
            conv.statement
        ),
    ));
    let mode = if winning.is_some() { "reported-value mode" } else { "documented-discrepancy mode" };
    let conventions = winning.unwrap_or_default();
    let net_args = NetArgs {
        n: Some(9),
        diagonal: Some(conventions.diagonal),
        tie_policy: Some(conventions.tie),
        cue: Some(conventions.cue),
        ..NetArgs::default()
    };

    let dir = tempfile::tempdir().unwrap();
    let survey_args = SurveyArgs {
        net: net_args.clone(),
        nd: Some(10),
        trials: Some(100_000),
        series: Some(10),
        seed: Some(SURVEY_SEED),
        target: Some("auto-nk4".into()),
        out: Some(dir.path().to_path_buf()),
        ..SurveyArgs::default()
    };
    let start = Instant::now();
    let survey = cmd_survey(&survey_args).unwrap();
    let elapsed = start.elapsed();
    let summary_json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    let distinct = summary_json["distinct_pfr_values"].as_u64().map(|d| d as usize);
    let in_band = distinct.is_some_and(|d| (DISTINCT_BAND.0..=DISTINCT_BAND.1).contains(&d));
    results.push(outcome(
        "3",
        elapsed <= SURVEY_BUDGET && distinct.is_some() && (winning.is_none() || in_band),
        format!(
            "[{mode}, {conventions}] 10 x 1e5 trials in {:.1} s; distinct P_FR values {} (reported {}, band {}-{}: {})",
            elapsed.as_secs_f64(),
            distinct.map_or("missing".into(), |d| d.to_string()),
            reported::DISTINCT_PFR_VALUES,
            DISTINCT_BAND.0,
            DISTINCT_BAND.1,
            if in_band { "inside" } else { "outside" }
        ),
    ));

    let classified = cmd_classify(&ClassifyArgs { survey: dir.path().join("survey.json"), ..ClassifyArgs::default() })
        .unwrap()
        .classification;
    let tot = &classified.tot_frequency;
    let tot_in_band = (TOT_BAND_PCT.0..=TOT_BAND_PCT.1).contains(&tot.mean_pct);
    let n_classes = classified.classes.len();
    results.push(outcome(
        "4",
        winning.is_none() || (tot_in_band && n_classes == REPORTED_CLASSES),
        format!(
            "[{mode}] target P_FR {} ({}) vs intact {}; matched trials {}; TOT frequency {:.3e} ± {:.3e} % \
             (reported band {:.1e}-{:.1e} %: {}); signature classes {n_classes} (reported {REPORTED_CLASSES})",
            classified.target_pfr,
            classified.target_pfr_float,
            survey.summary.intact_pfr,
            survey.summary.matched_trials,
            tot.mean_pct,
            tot.std_pct,
            TOT_BAND_PCT.0,
            TOT_BAND_PCT.1,
            if tot_in_band { "inside" } else { "outside" }
        ),
    ));

    let intact = &survey.summary.intact_equivalent_freq_pct;
    results.push(outcome(
        "5",
        intact.mean_pct < INTACT_CEILING_PCT,
        format!(
            "[{mode}] intact-equivalent frequency {:.4} ± {:.4} % (ceiling {INTACT_CEILING_PCT} %; reported just under 0.1 %)",
            intact.mean_pct, intact.std_pct
        ),
    ));

    let implied = 4.8 / 7.0e-3;
    let rep = &classified.reported_ratio;
    let ratio_ok = (rep.implied.ratio.unwrap() - implied).abs() < 1e-9
        && rep.quoted == 1.5e3
        && rep.quoted_std == 0.3e3
        && !rep.consistent
        && classified.ratio.numerator_pct == reported::NEURON_LOSS_TOT_PCT
        && classified.ratio.denominator_mean_pct == tot.mean_pct;
    results.push(outcome(
        "6",
        ratio_ok,
        format!(
            "measured ratio {}; implied by reported pair {:.0} ± {:.0}; quoted {:.1e} ± {:.1e}; flagged inconsistent: {}",
            classified.ratio_text,
            rep.implied.ratio.unwrap(),
            rep.implied.ratio_std.unwrap(),
            rep.quoted,
            rep.quoted_std,
            !rep.consistent
        ),
    ));

    let space = &survey.summary.cut_set_space;
    let exact = oracle::binomial(81, 10);
    let ok7 = space.exact == exact.to_string()
        && ((exact as f64) / 1.88e12 - 1.0).abs() < BINOMIAL_REL_TOL
        && space.reported_approx == Some(reported::CUT_SET_SPACE)
        && space.note.is_some();
    results.push(outcome(
        "7",
        ok7,
        format!("C(81,10) = {} (≈ {:.3e}); reported ≈ {:.1e}; {}", space.exact, space.approx, reported::CUT_SET_SPACE, space.note.as_deref().unwrap_or("")),
    ));

    // The printed P_FR value itself, treated as an exact target under the same conventions.
    let info_dir = tempfile::tempdir().unwrap();
    let info = cmd_survey(&SurveyArgs {
        target: Some("146/512".into()),
        out: Some(info_dir.path().to_path_buf()),
        ..survey_args
    })
    .unwrap();
    let c = cmd_classify(&ClassifyArgs { survey: info_dir.path().join("survey.json"), ..ClassifyArgs::default() })
        .unwrap()
        .classification;
    let bin_pct: f64 = c.classes.iter().map(|k| k.freq_mean_pct).sum();
    println!(
        "[INFO] 146/512 bin: {} trials ({bin_pct:.4} %), {} signature classes with multiplicities {:?}",
        info.summary.matched_trials,
        c.classes.len(),
        c.classes.iter().map(|k| k.trials).collect::<Vec<_>>()
    );

    let failed: Vec<&str> = results.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    println!(
        "acceptance: {}/{} criteria passed{}",
        results.len() - failed.len(),
        results.len(),
        if failed.is_empty() { String::new() } else { format!("; failed: {}", failed.join(", ")) }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
