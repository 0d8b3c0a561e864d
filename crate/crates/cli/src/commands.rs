//! Subcommand arguments and their implementations.
//!
//! Each `cmd_*` function computes its result in memory and writes files only
//! when an output path was given, so tests can drive them directly.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use totnet::net::parse_links;
use totnet::survey::{
    histogram_stats, run_survey_with_workers, sample_cut_set, trial_rng, LesionSurvey,
    MatchTarget, SurveyConfig,
};
use totnet::tot::{
    collect_matches, convention_search, estimate_ratio, group_by_curve, label_classes,
    neuron_loss_signature, reported, reported_ratio_check, ClassLabel, ConventionReport,
    NeuronLossSignature, RatioEstimate, ReportedRatioCheck,
};
use totnet::{
    binomial, recall_curve, BipolarVector, Conventions, CuePlacement, DamageSpec, DiagonalPolicy,
    RationalProb, RecallCurve, TiePolicy, TrainedNet,
};

use crate::csvio::{
    curve_from_rows, curve_rows, histogram_rows, pct, read_csv, to_csv_string, ClassRow, CurveRow,
    HistogramRow, CLASS_HEADER, CURVE_HEADER, HISTOGRAM_HEADER, PLACES,
};
use crate::error::{CliError, CliResult};
use crate::manifest::{sha256_hex, RunManifest};
use crate::settings::{pick, worker_count, FileConfig};
use crate::svg::{curves_svg, histogram_svg};

pub const DEFAULT_N: usize = 9;
pub const DEFAULT_NEURON_LOSS_NK: usize = 4;

#[derive(Parser, Debug)]
#[command(name = "totnet", version, about = "Lesion studies of a single-pattern bipolar autoassociative network")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact recall curve of one (possibly lesioned) net.
    Curve(CurveArgs),
    /// Monte Carlo survey of free recall over random cut-link sets.
    Survey(SurveyArgs),
    /// Group a survey's matched damage sets into signature classes.
    Classify(ClassifyArgs),
    /// Sweep decoding conventions against a printed probability.
    Conventions(ConventionsArgs),
    /// Render curve and histogram CSVs as SVG figures.
    Report(ReportArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct NetArgs {
    /// Neurons per layer.
    #[arg(long)]
    pub n: Option<usize>,
    /// Reference pattern as a sign string ("+-+...") or comma list; default all +1.
    #[arg(long, allow_hyphen_values = true)]
    pub reference: Option<String>,
    #[arg(long)]
    pub diagonal: Option<DiagonalPolicy>,
    #[arg(long = "tie-policy")]
    pub tie_policy: Option<TiePolicy>,
    #[arg(long)]
    pub cue: Option<CuePlacement>,
    /// Flat TOML file with defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse_file_enum<T: std::str::FromStr<Err = totnet::Error>>(v: Option<&String>) -> CliResult<Option<T>> {
    v.map(|s| s.parse::<T>().map_err(CliError::usage)).transpose()
}

/// Reference pattern and conventions from flags, config file and defaults.
pub fn resolve_net(args: &NetArgs, file: &FileConfig) -> CliResult<(BipolarVector, Conventions)> {
    let reference_text = args.reference.clone().or_else(|| file.reference.clone());
    let n_flag = args.n.or(file.n);
    let reference = match reference_text {
        Some(text) => {
            let r: BipolarVector = text.parse().map_err(CliError::usage)?;
            if let Some(n) = n_flag {
                if n != r.len() {
                    return Err(CliError::Usage(format!(
                        "--n {n} does not match the {}-component reference",
                        r.len()
                    )));
                }
            }
            r
        }
        None => BipolarVector::all_plus(n_flag.unwrap_or(DEFAULT_N)).map_err(CliError::usage)?,
    };
    let conventions = Conventions {
        diagonal: pick(args.diagonal, parse_file_enum(file.diagonal.as_ref())?, DiagonalPolicy::Keep),
        tie: pick(args.tie_policy, parse_file_enum(file.tie_policy.as_ref())?, TiePolicy::StrictMinus),
        cue: pick(args.cue, parse_file_enum(file.cue.as_ref())?, CuePlacement::Averaged),
        ..Conventions::default()
    };
    Ok((reference, conventions))
}

// ---------------------------------------------------------------- curve

#[derive(Args, Debug, Clone, Default)]
pub struct CurveArgs {
    #[command(flatten)]
    pub net: NetArgs,
    /// Deleted input neurons, e.g. "0,1,2,3".
    #[arg(long = "delete-inputs")]
    pub delete_inputs: Option<String>,
    /// Cut links as "i,j" pairs separated by ';', e.g. "0,0;0,1".
    #[arg(long = "cut-links")]
    pub cut_links: Option<String>,
    /// Cut this many uniformly random links instead of an explicit list.
    #[arg(long = "sample-cuts", conflicts_with = "cut_links")]
    pub sample_cuts: Option<usize>,
    /// Seed for --sample-cuts.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Curve CSV path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the curve as SVG.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Serialize)]
struct CurveConfig<'a> {
    reference: &'a BipolarVector,
    conventions: Conventions,
    damage: &'a DamageSpec,
}

pub struct CurveOutput {
    pub damage: DamageSpec,
    pub curve: RecallCurve,
    pub csv: String,
    pub manifest: RunManifest,
}

pub fn parse_deletions(s: &str) -> CliResult<BTreeSet<usize>> {
    let mut out = BTreeSet::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let i: usize = part
            .parse()
            .map_err(|e| CliError::Usage(format!("--delete-inputs {part:?}: {e}")))?;
        if !out.insert(i) {
            return Err(CliError::Usage(format!("--delete-inputs lists {i} twice")));
        }
    }
    Ok(out)
}

pub fn cmd_curve(args: &CurveArgs) -> CliResult<CurveOutput> {
    let file = FileConfig::load(args.net.config.as_deref())?;
    let (reference, conventions) = resolve_net(&args.net, &file)?;
    let n = reference.len();
    let mut damage = DamageSpec::none();
    if let Some(s) = &args.delete_inputs {
        damage.deleted_inputs = parse_deletions(s)?;
    }
    if let Some(s) = &args.cut_links {
        damage.cut_links = parse_links(s).map_err(CliError::usage)?;
    }
    if let Some(n_d) = args.sample_cuts {
        let mut rng = trial_rng(args.seed.unwrap_or(0), 0, 0);
        damage.cut_links =
            sample_cut_set(&mut rng, n, n_d).map_err(CliError::usage)?.into_iter().collect();
    }
    damage.validate(n).map_err(CliError::usage)?;
    let net = TrainedNet::train(reference, conventions).apply_damage(&damage)?;
    let curve = recall_curve(&net);
    let csv = to_csv_string(&CURVE_HEADER, &curve_rows(&curve))?;
    let mut manifest = RunManifest::new(
        "curve",
        &CurveConfig { reference: &reference, conventions, damage: &damage },
        args.seed,
        conventions,
    )?;
    manifest.finish(csv.as_bytes());
    if let Some(path) = &args.out {
        write_file(path, &csv)?;
        write_json(&sidecar(path), &manifest)?;
    }
    if let Some(path) = &args.svg {
        let label = if damage.is_empty() { "intact".to_string() } else { "lesioned".to_string() };
        write_file(path, &curves_svg(&[(label, curve_points(&curve))]))?;
    }
    Ok(CurveOutput { damage, curve, csv, manifest })
}

fn curve_points(curve: &RecallCurve) -> Vec<(f64, f64)> {
    curve
        .points
        .iter()
        .enumerate()
        .map(|(m, p)| (1.0 - curve.cue_intensity(m), p.to_f64()))
        .collect()
}

// ---------------------------------------------------------------- survey

#[derive(Args, Debug, Clone, Default)]
pub struct SurveyArgs {
    #[command(flatten)]
    pub net: NetArgs,
    /// Links cut per trial.
    #[arg(long)]
    pub nd: Option<usize>,
    /// Trials per series.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub series: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Free-recall value whose damage sets are logged: "auto-nk4" (any
    /// "auto-nk<k>"), an exact fraction such as "146/512", or "none".
    #[arg(long)]
    pub target: Option<String>,
    /// Worker threads; capped by TOTNET_THREADS.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Deleted-neuron count defining the TOT signature when --target is a fraction.
    #[arg(long)]
    pub nk: Option<usize>,
    /// TOT probability under neuron loss, percent.
    #[arg(long = "neuron-loss-pct")]
    pub neuron_loss_pct: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_target(s: &str) -> CliResult<Option<MatchTarget>> {
    let s = s.trim();
    if s == "none" {
        return Ok(None);
    }
    if let Some(k) = s.strip_prefix("auto-nk") {
        let n_k = k.parse().map_err(|e| CliError::Usage(format!("--target {s:?}: {e}")))?;
        return Ok(Some(MatchTarget::NeuronLoss { n_k }));
    }
    let p: RationalProb = s.parse().map_err(CliError::usage)?;
    Ok(Some(MatchTarget::Exact(p)))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurveyFile {
    pub manifest: RunManifest,
    pub survey: LesionSurvey,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrequencyPct {
    pub mean_pct: f64,
    pub std_pct: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CutSetSpace {
    pub links: usize,
    pub cut: usize,
    pub exact: String,
    pub approx: f64,
    pub reported_approx: Option<f64>,
    pub note: Option<String>,
}

pub fn cut_set_space(n: usize, n_d: usize) -> CutSetSpace {
    let exact = binomial((n * n) as u64, n_d as u64);
    let approx: f64 = exact.to_string().parse().unwrap_or(f64::INFINITY);
    let (reported_approx, note) = if (n, n_d) == (9, 10) {
        (
            Some(reported::CUT_SET_SPACE),
            Some(format!(
                "exact C(81,10) = {exact} ≈ {approx:.3e}; the quoted ≈ {:.1e} is {:.1}x smaller",
                reported::CUT_SET_SPACE,
                approx / reported::CUT_SET_SPACE
            )),
        )
    } else {
        (None, None)
    };
    CutSetSpace { links: n * n, cut: n_d, exact: exact.to_string(), approx, reported_approx, note }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurveySummary {
    pub manifest: RunManifest,
    pub distinct_pfr_values: usize,
    pub reported_distinct_pfr_values: Option<usize>,
    pub intact_pfr: String,
    pub intact_equivalent_freq_pct: FrequencyPct,
    pub target_pfr: Option<String>,
    pub target_pfr_float: Option<String>,
    pub matched_trials: usize,
    pub classification: Option<Classification>,
    pub cut_set_space: CutSetSpace,
}

pub struct SurveyOutput {
    pub survey: LesionSurvey,
    pub manifest: RunManifest,
    pub survey_json: String,
    pub histogram_csv: String,
    pub matches_log: Option<String>,
    pub summary: SurveySummary,
}

impl SurveyOutput {
    /// Bytes that must not depend on worker count or timing.
    pub fn payload(&self) -> String {
        let mut p = serde_json::to_string(&self.survey).expect("survey serializes");
        p.push_str(&self.histogram_csv);
        p.push_str(self.matches_log.as_deref().unwrap_or(""));
        p
    }
}

pub fn survey_config(args: &SurveyArgs, file: &FileConfig) -> CliResult<SurveyConfig> {
    let (reference, conventions) = resolve_net(&args.net, file)?;
    let target_text = args.target.clone().or_else(|| file.target.clone());
    let target = parse_target(target_text.as_deref().unwrap_or("auto-nk4"))?;
    let config = SurveyConfig {
        n: reference.len(),
        n_d: pick(args.nd, file.nd, 10),
        trials_per_series: pick(args.trials, file.trials, 100_000),
        series: pick(args.series, file.series, 10),
        seed: pick(args.seed, file.seed, 0),
        conventions,
        reference,
        target,
    };
    config.validate().map_err(CliError::usage)?;
    config.target_count().map_err(CliError::usage)?;
    Ok(config)
}

pub fn matches_log(survey: &LesionSurvey, config_hash: &str) -> String {
    let mut out = format!("#manifest {config_hash}\n");
    for rec in &survey.matched {
        out.push_str(&totnet::net::format_links(&rec.links));
        out.push('\n');
    }
    out
}

pub fn cmd_survey(args: &SurveyArgs) -> CliResult<SurveyOutput> {
    let file = FileConfig::load(args.net.config.as_deref())?;
    let config = survey_config(args, &file)?;
    let workers = worker_count(args.threads.or(file.threads));
    let neuron_loss_pct = pick(args.neuron_loss_pct, file.neuron_loss_pct, reported::NEURON_LOSS_TOT_PCT);
    let nk = args.nk.or(file.nk);

    let mut manifest = RunManifest::new("survey", &config, Some(config.seed), config.conventions)?;
    let survey = run_survey_with_workers(&config, workers)?;
    let survey_json = serde_json::to_string(&survey).map_err(|e| CliError::Data(e.to_string()))?;
    manifest.finish(survey_json.as_bytes());
    manifest.total_trials = Some(survey.total_trials());
    manifest.workers = Some(workers);

    let stats = histogram_stats(&survey);
    let histogram_csv = to_csv_string(&HISTOGRAM_HEADER, &histogram_rows(&survey, &stats))?;
    let log = survey.target_count.map(|_| matches_log(&survey, &manifest.config_hash));
    let classification = match survey.target_count {
        Some(_) => Some(classify_survey(&survey, nk, neuron_loss_pct)?),
        None => None,
    };
    let intact = survey.intact_bin();
    let summary = SurveySummary {
        manifest: manifest.clone(),
        distinct_pfr_values: survey.distinct_values(),
        reported_distinct_pfr_values: ((config.n, config.n_d) == (9, 10))
            .then_some(reported::DISTINCT_PFR_VALUES),
        intact_pfr: survey.key_probability(survey.intact_count).to_string(),
        intact_equivalent_freq_pct: FrequencyPct { mean_pct: intact.mean * 100.0, std_pct: intact.std * 100.0 },
        target_pfr: survey.target_count.map(|k| survey.key_probability(k).to_string()),
        target_pfr_float: survey.target_count.map(|k| survey.key_probability(k).render(PLACES)),
        matched_trials: survey.matched.len(),
        classification,
        cut_set_space: cut_set_space(config.n, config.n_d),
    };

    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let file = SurveyFile { manifest: manifest.clone(), survey: survey.clone() };
        write_json(&dir.join("survey.json"), &file)?;
        write_file(&dir.join("histogram.csv"), &histogram_csv)?;
        write_json(&dir.join("summary.json"), &summary)?;
        if let Some(log) = &log {
            write_file(&dir.join("matches.log"), log)?;
        }
    }
    Ok(SurveyOutput { survey, manifest, survey_json, histogram_csv, matches_log: log, summary })
}

// ---------------------------------------------------------------- classify

#[derive(Args, Debug, Clone, Default)]
pub struct ClassifyArgs {
    /// survey.json written by `totnet survey --out`.
    #[arg(long)]
    pub survey: PathBuf,
    /// Deleted-neuron count defining the TOT signature (default: from the survey target, else 4).
    #[arg(long)]
    pub nk: Option<usize>,
    #[arg(long = "neuron-loss-pct")]
    pub neuron_loss_pct: Option<f64>,
    /// Output directory for classification.csv and classification.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassSummary {
    pub class_id: usize,
    pub label: ClassLabel,
    pub members: usize,
    pub trials: u64,
    pub freq_mean_pct: f64,
    pub freq_std_pct: f64,
    pub curve: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Classification {
    pub target_pfr: String,
    pub target_pfr_float: String,
    pub neuron_loss_nk: usize,
    pub signature_unique: bool,
    pub tot_signature: Vec<String>,
    pub intact_curve: Vec<String>,
    pub classes: Vec<ClassSummary>,
    pub tot_frequency: FrequencyPct,
    pub ratio: RatioEstimate,
    pub ratio_text: String,
    pub reported_tot_frequency: FrequencyPct,
    pub reported_ratio: ReportedRatioCheck,
    pub note: String,
}

fn curve_strings(curve: &RecallCurve) -> Vec<String> {
    curve.points.iter().map(RationalProb::to_string).collect()
}

pub fn classify_survey(
    survey: &LesionSurvey,
    nk: Option<usize>,
    neuron_loss_pct: f64,
) -> CliResult<Classification> {
    let key = survey.target_count.ok_or_else(|| {
        CliError::Data(
            "survey has no matched-set log; rerun `totnet survey` with --target set".into(),
        )
    })?;
    let config = &survey.config;
    let target = survey.key_probability(key);
    let matches = collect_matches(survey, &target)?;
    let n_k = match (&config.target, nk) {
        (_, Some(k)) => k,
        (Some(MatchTarget::NeuronLoss { n_k }), None) => *n_k,
        _ => DEFAULT_NEURON_LOSS_NK,
    };
    let template = config.intact_net();
    let signature = neuron_loss_signature(config.reference, n_k, config.conventions)?;
    let (tot_curve, signature_unique) = match &signature {
        NeuronLossSignature::Unique(c) => (c.clone(), true),
        NeuronLossSignature::Family(f) => (f[0].1.clone(), false),
    };
    let intact = recall_curve(&template);
    let mut classes = if matches.is_empty() {
        Vec::new()
    } else {
        group_by_curve(&matches, &template, config.trials_per_series)?
    };
    label_classes(&mut classes, &tot_curve, &intact)?;

    let mut tot_series = vec![0u64; config.series as usize];
    for class in classes.iter().filter(|c| c.label == ClassLabel::TotMatch) {
        for (acc, c) in tot_series.iter_mut().zip(&class.per_series) {
            *acc += c;
        }
    }
    let tot = totnet::survey::frequency_stats(&tot_series, config.trials_per_series);
    let ratio = estimate_ratio(tot.mean * 100.0, tot.std * 100.0, neuron_loss_pct);
    let reported_check = reported_ratio_check();
    let note = format!(
        "reported link-cut TOT frequency ({:.1e} ± {:.1e} %) and neuron-loss probability ({} %) imply a ratio of {:.0}, \
         which lies outside the quoted ({:.1} ± {:.1})·10^3; the two reported figures are mutually inconsistent",
        reported::LINK_CUT_TOT_PCT.0,
        reported::LINK_CUT_TOT_PCT.1,
        reported::NEURON_LOSS_TOT_PCT,
        reported_check.implied.ratio.unwrap_or(f64::NAN),
        reported_check.quoted / 1e3,
        reported_check.quoted_std / 1e3,
    );
    Ok(Classification {
        target_pfr_float: target.render(PLACES),
        target_pfr: target.to_string(),
        neuron_loss_nk: n_k,
        signature_unique,
        tot_signature: curve_strings(&tot_curve),
        intact_curve: curve_strings(&intact),
        classes: classes
            .iter()
            .enumerate()
            .map(|(i, c)| ClassSummary {
                class_id: i,
                label: c.label,
                members: c.members.len(),
                trials: c.frequency.total,
                freq_mean_pct: c.frequency.mean * 100.0,
                freq_std_pct: c.frequency.std * 100.0,
                curve: curve_strings(&c.curve),
            })
            .collect(),
        tot_frequency: FrequencyPct { mean_pct: tot.mean * 100.0, std_pct: tot.std * 100.0 },
        ratio_text: ratio.describe(),
        ratio,
        reported_tot_frequency: FrequencyPct {
            mean_pct: reported::LINK_CUT_TOT_PCT.0,
            std_pct: reported::LINK_CUT_TOT_PCT.1,
        },
        reported_ratio: reported_check,
        note,
    })
}

pub fn class_rows(c: &Classification) -> Vec<ClassRow> {
    c.classes
        .iter()
        .map(|s| {
            let probs: Vec<RationalProb> =
                s.curve.iter().map(|p| p.parse().expect("own output")).collect();
            ClassRow {
                label: s.label.as_str().to_string(),
                class_id: s.class_id,
                members: s.members,
                freq_mean_pct: format!("{:.6}", s.freq_mean_pct),
                freq_std_pct: format!("{:.6}", s.freq_std_pct),
                curve_p_num_list: probs.iter().map(|p| p.numer().to_string()).collect::<Vec<_>>().join(";"),
                curve_p_den_list: probs.iter().map(|p| p.denom().to_string()).collect::<Vec<_>>().join(";"),
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassificationFile {
    pub manifest: RunManifest,
    pub survey_config_hash: String,
    pub classification: Classification,
}

pub struct ClassifyOutput {
    pub classification: Classification,
    pub csv: String,
    pub json: String,
}

pub fn read_survey(path: &Path) -> CliResult<SurveyFile> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn cmd_classify(args: &ClassifyArgs) -> CliResult<ClassifyOutput> {
    let file = read_survey(&args.survey)?;
    let pct = args.neuron_loss_pct.unwrap_or(reported::NEURON_LOSS_TOT_PCT);
    let classification = classify_survey(&file.survey, args.nk, pct)?;
    let csv = to_csv_string(&CLASS_HEADER, &class_rows(&classification))?;
    #[derive(Serialize)]
    struct ClassifyConfig<'a> {
        survey_config_hash: &'a str,
        nk: Option<usize>,
        neuron_loss_pct: f64,
    }
    let mut manifest = RunManifest::new(
        "classify",
        &ClassifyConfig { survey_config_hash: &file.manifest.config_hash, nk: args.nk, neuron_loss_pct: pct },
        file.manifest.seed,
        file.survey.config.conventions,
    )?;
    manifest.finish(csv.as_bytes());
    manifest.total_trials = Some(file.survey.total_trials());
    let out = ClassificationFile {
        manifest,
        survey_config_hash: file.manifest.config_hash.clone(),
        classification: classification.clone(),
    };
    let json = serde_json::to_string_pretty(&out).map_err(|e| CliError::Data(e.to_string()))?;
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        write_file(&dir.join("classification.csv"), &csv)?;
        write_file(&dir.join("classification.json"), &json)?;
    }
    Ok(ClassifyOutput { classification, csv, json })
}

// ---------------------------------------------------------------- conventions

#[derive(Args, Debug, Clone)]
pub struct ConventionsArgs {
    /// Printed probability to reproduce.
    #[arg(long, default_value = reported::NEURON_LOSS_PFR)]
    pub target: String,
    #[arg(long, default_value_t = DEFAULT_N)]
    pub n: usize,
    /// Deleted input neurons (positions 0..nk).
    #[arg(long, default_value_t = DEFAULT_NEURON_LOSS_NK)]
    pub nk: usize,
    /// Cue size; 0 is free recall.
    #[arg(long, default_value_t = 0)]
    pub m: usize,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Default for ConventionsArgs {
    fn default() -> Self {
        Self {
            target: reported::NEURON_LOSS_PFR.into(),
            n: DEFAULT_N,
            nk: DEFAULT_NEURON_LOSS_NK,
            m: 0,
            out: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConventionsFile {
    pub manifest: RunManifest,
    pub report: ConventionReport,
    pub matching: Vec<Conventions>,
    pub statement: String,
}

pub struct ConventionsOutput {
    pub report: ConventionReport,
    pub table: String,
    pub statement: String,
    pub file: ConventionsFile,
}

#[derive(Serialize)]
struct ConventionRowCsv {
    diagonal: DiagonalPolicy,
    tie_policy: TiePolicy,
    success_rule: totnet::SuccessRule,
    cue: CuePlacement,
    p_num: String,
    p_den: String,
    p_float: String,
    signature_unique: bool,
    r#match: bool,
}

pub const CONVENTIONS_HEADER: [&str; 9] = [
    "diagonal",
    "tie_policy",
    "success_rule",
    "cue",
    "p_num",
    "p_den",
    "p_float",
    "signature_unique",
    "match",
];

pub fn cmd_conventions(args: &ConventionsArgs) -> CliResult<ConventionsOutput> {
    if args.m > args.n || args.nk > args.n {
        return Err(CliError::Usage(format!(
            "--m {} and --nk {} must not exceed --n {}",
            args.m, args.nk, args.n
        )));
    }
    let report = convention_search(&args.target, args.n, args.nk, args.m).map_err(CliError::usage)?;
    let rows: Vec<ConventionRowCsv> = report
        .rows
        .iter()
        .map(|r| ConventionRowCsv {
            diagonal: r.conventions.diagonal,
            tie_policy: r.conventions.tie,
            success_rule: r.conventions.success,
            cue: r.conventions.cue,
            p_num: r.probability.numer().to_string(),
            p_den: r.probability.denom().to_string(),
            p_float: r.rendered.clone(),
            signature_unique: r.signature_unique,
            r#match: r.matches,
        })
        .collect();
    let table = to_csv_string(&CONVENTIONS_HEADER, &rows)?;
    let matching = report.matching();
    let statement = if matching.is_empty() {
        format!(
            "NO convention combination reproduces {} (n = {}, nk = {}, m = {}); \
             downstream comparisons run under default conventions with measured values",
            report.target, report.n, report.n_k, report.m
        )
    } else {
        format!(
            "{} of {} convention combinations reproduce {}: {}",
            matching.len(),
            report.rows.len(),
            report.target,
            matching.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
        )
    };
    let mut manifest = RunManifest::new(
        "conventions",
        &(&args.target, args.n, args.nk, args.m),
        None,
        matching.first().copied().unwrap_or_default(),
    )?;
    manifest.finish(table.as_bytes());
    let file = ConventionsFile { manifest, report: report.clone(), matching, statement: statement.clone() };
    if let Some(path) = &args.out {
        write_json(path, &file)?;
    }
    Ok(ConventionsOutput { report, table, statement, file })
}

// ---------------------------------------------------------------- report

#[derive(Args, Debug, Clone, Default)]
pub struct ReportArgs {
    /// Curve CSV, optionally labelled as "label=path"; repeatable.
    #[arg(long)]
    pub curve: Vec<String>,
    /// Histogram CSV from `totnet survey`.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
    /// Directory for curves.svg and histogram.svg.
    #[arg(long = "out-dir")]
    pub out_dir: PathBuf,
}

pub struct ReportOutput {
    pub curves_svg: Option<String>,
    pub histogram_svg: Option<String>,
}

fn open_csv(path: &Path) -> CliResult<fs::File> {
    fs::File::open(path).map_err(|e| CliError::io(path, e))
}

pub fn cmd_report(args: &ReportArgs) -> CliResult<ReportOutput> {
    if args.curve.is_empty() && args.histogram.is_none() {
        return Err(CliError::Usage("report needs at least one --curve or --histogram".into()));
    }
    let mut curves = Vec::new();
    for spec in &args.curve {
        let (label, path) = match spec.split_once('=') {
            Some((l, p)) => (l.to_string(), PathBuf::from(p)),
            None => {
                let p = PathBuf::from(spec);
                let l = p.file_stem().map_or_else(|| spec.clone(), |s| s.to_string_lossy().into_owned());
                (l, p)
            }
        };
        let rows: Vec<CurveRow> = read_csv(open_csv(&path)?, &CURVE_HEADER)?;
        let curve = curve_from_rows(&rows)?;
        curves.push((label, curve_points(&curve)));
    }
    let curves_svg = (!curves.is_empty()).then(|| curves_svg(&curves));
    let histogram_svg = match &args.histogram {
        Some(path) => {
            let rows: Vec<HistogramRow> = read_csv(open_csv(path)?, &HISTOGRAM_HEADER)?;
            let bins = rows
                .iter()
                .map(|r| {
                    let p: f64 = r.pfr_float.parse().map_err(|e| CliError::Data(format!("pfr_float: {e}")))?;
                    let f: f64 =
                        r.freq_mean_pct.parse().map_err(|e| CliError::Data(format!("freq_mean_pct: {e}")))?;
                    Ok((p, f))
                })
                .collect::<CliResult<Vec<_>>>()?;
            Some(histogram_svg(&bins))
        }
        None => None,
    };
    fs::create_dir_all(&args.out_dir).map_err(|e| CliError::io(&args.out_dir, e))?;
    if let Some(svg) = &curves_svg {
        write_file(&args.out_dir.join("curves.svg"), svg)?;
    }
    if let Some(svg) = &histogram_svg {
        write_file(&args.out_dir.join("histogram.svg"), svg)?;
    }
    Ok(ReportOutput { curves_svg, histogram_svg })
}

// ---------------------------------------------------------------- io

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Data(e.to_string()))?;
    write_file(path, &(text + "\n"))
}

/// Payload hash of a classification CSV, for cross-referencing.
pub fn csv_hash(csv: &str) -> String {
    sha256_hex(csv.as_bytes())
}

pub fn format_pct(fraction: f64) -> String {
    pct(fraction)
}
