//! Tip-of-the-tongue classification of lesioned nets.
//!
//! A damage set is a TOT candidate when its free-recall probability equals
//! that of the canonical neuron-loss net. Candidates are grouped by their
//! exact recall curve; a group whose curve coincides with the neuron-loss
//! curve at every grid point is a TOT state.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{BipolarVector, Conventions, DamageSpec, Link, TrainedNet};
use crate::rational::RationalProb;
use crate::recall::{exact_recall_prob, recall_curve, RecallCurve};
use crate::survey::{frequency_stats, FrequencyStats, LesionSurvey};

/// Reported literature values the measurements are compared against.
pub mod reported {
    /// Free-recall probability of the four-neuron-loss net, as printed.
    pub const NEURON_LOSS_PFR: &str = "0.28516";
    /// TOT probability under loss of four input neurons, percent.
    pub const NEURON_LOSS_TOT_PCT: f64 = 4.8;
    /// TOT frequency under ten random link cuts, percent (mean, spread).
    pub const LINK_CUT_TOT_PCT: (f64, f64) = (7.0e-3, 1.3e-3);
    /// Quoted neuron-loss to link-cut ratio (value, spread).
    pub const RATIO: (f64, f64) = (1.5e3, 0.3e3);
    /// Distinct free-recall values observed over 10^6 trials.
    pub const DISTINCT_PFR_VALUES: usize = 66;
    /// Quoted size of the ten-of-81 cut-set space.
    pub const CUT_SET_SPACE: f64 = 2.3e11;
    /// Number of signature groups at the TOT free-recall value.
    pub const SIGNATURE_GROUPS: usize = 2;
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeuronLossSignature {
    /// Every deletion subset of the given size yields this curve.
    Unique(RecallCurve),
    /// Subsets disagree; one curve per subset.
    Family(Vec<(BTreeSet<usize>, RecallCurve)>),
}

impl NeuronLossSignature {
    pub fn unique(&self) -> Option<&RecallCurve> {
        match self {
            NeuronLossSignature::Unique(c) => Some(c),
            NeuronLossSignature::Family(_) => None,
        }
    }
}

/// Recall curves of every `n_k`-subset deletion of input neurons.
pub fn neuron_loss_signature(
    reference: BipolarVector,
    n_k: usize,
    conventions: Conventions,
) -> Result<NeuronLossSignature> {
    let n = reference.len();
    if n_k > n {
        return Err(Error::IndexOutOfRange { index: n_k, n });
    }
    let intact = TrainedNet::train(reference, conventions);
    let family = subsets(n, n_k)
        .into_par_iter()
        .map(|set| {
            let net = intact.apply_damage(&DamageSpec::delete_inputs(set.iter().copied()))?;
            Ok((set, recall_curve(&net)))
        })
        .collect::<Result<Vec<_>>>()?;
    let first = &family[0].1;
    if family.iter().all(|(_, c)| c == first) {
        Ok(NeuronLossSignature::Unique(first.clone()))
    } else {
        Ok(NeuronLossSignature::Family(family))
    }
}

fn subsets(n: usize, k: usize) -> Vec<BTreeSet<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<BTreeSet<usize>>) {
        if cur.len() == k {
            out.push(cur.iter().copied().collect());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// A distinct matched damage set with its per-series multiplicity.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct MatchedSet {
    pub links: Vec<Link>,
    pub per_series: Vec<u64>,
}

impl MatchedSet {
    pub fn multiplicity(&self) -> u64 {
        self.per_series.iter().sum()
    }
}

/// Deduplicated damage sets from a survey whose P_FR equals `target`.
pub fn collect_matches(survey: &LesionSurvey, target: &RationalProb) -> Result<Vec<MatchedSet>> {
    let key = survey.target_count.ok_or(Error::NoTarget)?;
    let configured = survey.key_probability(key);
    if &configured != target {
        return Err(Error::TargetMismatch {
            requested: target.to_string(),
            configured: configured.to_string(),
        });
    }
    let series = survey.config.series as usize;
    let mut sets: BTreeMap<&[Link], Vec<u64>> = BTreeMap::new();
    for rec in &survey.matched {
        sets.entry(&rec.links).or_insert_with(|| vec![0; series])[rec.series as usize] += 1;
    }
    Ok(sets
        .into_iter()
        .map(|(links, per_series)| MatchedSet { links: links.to_vec(), per_series })
        .collect())
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassLabel {
    TotMatch,
    IntactEquivalent,
    Other,
}

impl ClassLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassLabel::TotMatch => "tot_match",
            ClassLabel::IntactEquivalent => "intact_equivalent",
            ClassLabel::Other => "other",
        }
    }
}

/// Damage sets sharing one exact recall curve.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct SignatureClass {
    pub curve: RecallCurve,
    pub members: Vec<MatchedSet>,
    pub per_series: Vec<u64>,
    pub frequency: FrequencyStats,
    /// Set by [`label_classes`]; `Other` until then.
    pub label: ClassLabel,
}

/// Groups matched sets by exact recall curve, most frequent class first.
///
/// `template` is the undamaged net the sets are cut from.
pub fn group_by_curve(
    matches: &[MatchedSet],
    template: &TrainedNet,
    trials_per_series: u64,
) -> Result<Vec<SignatureClass>> {
    let curves = matches
        .par_iter()
        .map(|m| {
            let net = template.apply_damage(&DamageSpec::cut(m.links.iter().copied()))?;
            Ok(recall_curve(&net))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut groups: BTreeMap<RecallCurve, Vec<MatchedSet>> = BTreeMap::new();
    for (curve, m) in curves.into_iter().zip(matches) {
        groups.entry(curve).or_default().push(m.clone());
    }
    let mut classes: Vec<SignatureClass> = groups
        .into_iter()
        .map(|(curve, members)| {
            let series = members.first().map_or(0, |m| m.per_series.len());
            let mut per_series = vec![0u64; series];
            for m in &members {
                for (acc, c) in per_series.iter_mut().zip(&m.per_series) {
                    *acc += c;
                }
            }
            let frequency = frequency_stats(&per_series, trials_per_series);
            SignatureClass { curve, members, per_series, frequency, label: ClassLabel::Other }
        })
        .collect();
    // Stable sort keeps the curve order among equally frequent classes.
    classes.sort_by_key(|c| std::cmp::Reverse(c.frequency.total));
    Ok(classes)
}

pub fn classify_class(
    class: &SignatureClass,
    tot_signature: &RecallCurve,
    intact: &RecallCurve,
) -> Result<ClassLabel> {
    for other in [tot_signature, intact] {
        if other.n != class.curve.n || other.points.len() != class.curve.points.len() {
            return Err(Error::GridMismatch(class.curve.n, other.n));
        }
    }
    Ok(if class.curve == *tot_signature {
        ClassLabel::TotMatch
    } else if class.curve == *intact {
        ClassLabel::IntactEquivalent
    } else {
        ClassLabel::Other
    })
}

pub fn label_classes(
    classes: &mut [SignatureClass],
    tot_signature: &RecallCurve,
    intact: &RecallCurve,
) -> Result<()> {
    for class in classes.iter_mut() {
        class.label = classify_class(class, tot_signature, intact)?;
    }
    Ok(())
}

/// Neuron-loss TOT probability over link-cut TOT frequency.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub numerator_pct: f64,
    pub denominator_mean_pct: f64,
    pub denominator_std_pct: f64,
    /// `None` when no TOT state was observed.
    pub ratio: Option<f64>,
    pub ratio_std: Option<f64>,
}

impl RatioEstimate {
    pub fn describe(&self) -> String {
        match (self.ratio, self.ratio_std) {
            (Some(r), Some(s)) => format!("{r:.1} ± {s:.1}"),
            _ => "no TOT observed; ratio undefined".to_string(),
        }
    }
}

/// Ratio with the denominator's relative spread carried over; the numerator
/// is treated as exact.
pub fn estimate_ratio(tot_mean_pct: f64, tot_std_pct: f64, neuron_loss_pct: f64) -> RatioEstimate {
    let (ratio, ratio_std) = if tot_mean_pct > 0.0 {
        let r = neuron_loss_pct / tot_mean_pct;
        (Some(r), Some(r * tot_std_pct / tot_mean_pct))
    } else {
        (None, None)
    };
    RatioEstimate {
        numerator_pct: neuron_loss_pct,
        denominator_mean_pct: tot_mean_pct,
        denominator_std_pct: tot_std_pct,
        ratio,
        ratio_std,
    }
}

/// The ratio implied by the two reported frequencies next to the quoted one.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ReportedRatioCheck {
    pub implied: RatioEstimate,
    pub quoted: f64,
    pub quoted_std: f64,
    /// Whether the implied ratio falls inside the quoted interval.
    pub consistent: bool,
}

pub fn reported_ratio_check() -> ReportedRatioCheck {
    let (mean, std) = reported::LINK_CUT_TOT_PCT;
    let implied = estimate_ratio(mean, std, reported::NEURON_LOSS_TOT_PCT);
    let (quoted, quoted_std) = reported::RATIO;
    let r = implied.ratio.expect("nonzero reported frequency");
    ReportedRatioCheck { consistent: (r - quoted).abs() <= quoted_std, implied, quoted, quoted_std }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ConventionRow {
    pub conventions: Conventions,
    pub probability: RationalProb,
    pub rendered: String,
    pub matches: bool,
    /// Whether all `n_k`-subset deletions give one curve under this convention.
    pub signature_unique: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ConventionReport {
    pub target: String,
    pub n: usize,
    pub n_k: usize,
    pub m: usize,
    pub rows: Vec<ConventionRow>,
}

impl ConventionReport {
    pub fn matching(&self) -> Vec<Conventions> {
        self.rows.iter().filter(|r| r.matches).map(|r| r.conventions).collect()
    }
}

/// Sweeps every convention combination and compares the probability at cue
/// size `m` of the net with inputs `0..n_k` deleted to a printed target.
pub fn convention_search(target: &str, n: usize, n_k: usize, m: usize) -> Result<ConventionReport> {
    let target = target.trim();
    let places = match target.split_once('.') {
        Some((_, frac)) => frac.len() as u32,
        None => 0,
    };
    if target.parse::<f64>().is_err() {
        return Err(Error::Parse(format!("target {target:?} is not a decimal number")));
    }
    if n_k > n {
        return Err(Error::IndexOutOfRange { index: n_k, n });
    }
    let reference = BipolarVector::all_plus(n)?;
    let rows = Conventions::all()
        .into_iter()
        .map(|conventions| {
            let net = TrainedNet::train(reference, conventions)
                .apply_damage(&DamageSpec::delete_inputs(0..n_k))?;
            let probability = exact_recall_prob(&net, m)?;
            let rendered = probability.render(places);
            let signature_unique =
                neuron_loss_signature(reference, n_k, conventions)?.unique().is_some();
            Ok(ConventionRow {
                matches: rendered == target,
                conventions,
                probability,
                rendered,
                signature_unique,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConventionReport { target: target.to_string(), n, n_k, m, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recall::recall_curve;

    fn x9() -> BipolarVector {
        BipolarVector::all_plus(9).unwrap()
    }

    #[test]
    fn signature_edge_cases() {
        let c = Conventions::default();
        let intact = recall_curve(&TrainedNet::train(x9(), c));
        assert_eq!(neuron_loss_signature(x9(), 0, c).unwrap().unique(), Some(&intact));
        let all = neuron_loss_signature(x9(), 9, c).unwrap();
        assert!(all.unique().unwrap().points.iter().all(|p| *p == RationalProb::zero()));
        assert!(neuron_loss_signature(x9(), 10, c).is_err());
    }

    #[test]
    fn four_neuron_signature_is_unique() {
        let sig = neuron_loss_signature(x9(), 4, Conventions::default()).unwrap();
        assert!(sig.unique().is_some());
        assert_eq!(subsets(9, 4).len(), 126);
    }

    fn class_with(curve: RecallCurve) -> SignatureClass {
        SignatureClass {
            curve,
            members: vec![],
            per_series: vec![],
            frequency: frequency_stats(&[0], 1),
            label: ClassLabel::Other,
        }
    }

    #[test]
    fn classify_examples() {
        let c = Conventions::default();
        let intact = recall_curve(&TrainedNet::train(x9(), c));
        let tot = neuron_loss_signature(x9(), 4, c).unwrap().unique().unwrap().clone();
        let label = |curve: &RecallCurve| classify_class(&class_with(curve.clone()), &tot, &intact);
        assert_eq!(label(&tot).unwrap(), ClassLabel::TotMatch);
        assert_eq!(label(&intact).unwrap(), ClassLabel::IntactEquivalent);
        let mut off = tot.clone();
        off.points[5] = RationalProb::zero();
        assert_eq!(label(&off).unwrap(), ClassLabel::Other);
        let small = recall_curve(&TrainedNet::train(BipolarVector::all_plus(3).unwrap(), c));
        assert_eq!(label(&small), Err(Error::GridMismatch(3, 9)));
    }

    #[test]
    fn relabelled_sets_share_a_class() {
        let template = TrainedNet::train(x9(), Conventions::default());
        let a = vec![Link::new(0, 1), Link::new(2, 2), Link::new(5, 7)];
        let perm = [3, 4, 5, 6, 7, 8, 0, 1, 2];
        let mut b: Vec<Link> = a.iter().map(|l| Link::new(perm[l.input], perm[l.output])).collect();
        b.sort();
        let matches = vec![
            MatchedSet { links: a, per_series: vec![1, 0] },
            MatchedSet { links: b, per_series: vec![0, 2] },
        ];
        let classes = group_by_curve(&matches, &template, 10).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].per_series, vec![1, 2]);
        assert!((classes[0].frequency.mean - 0.15).abs() < 1e-12);
    }

    #[test]
    fn ratio_examples() {
        let r = estimate_ratio(4.8, 0.0, 4.8);
        assert_eq!((r.ratio, r.ratio_std), (Some(1.0), Some(0.0)));

        let r = estimate_ratio(7.0e-3, 1.3e-3, 4.8);
        assert!((r.ratio.unwrap() - 685.714).abs() < 1e-2);
        assert!((r.ratio_std.unwrap() / r.ratio.unwrap() - 0.1857).abs() < 1e-3);

        let r = estimate_ratio(0.0, 0.0, 4.8);
        assert_eq!(r.ratio, None);
        assert_eq!(r.describe(), "no TOT observed; ratio undefined");

        assert!(!reported_ratio_check().consistent);
    }

    #[test]
    fn convention_search_examples() {
        let rec = convention_search("1.00000", 9, 0, 9).unwrap();
        assert_eq!(rec.rows.len(), 12);
        assert!(rec.rows.iter().all(|r| r.matches));

        let half = convention_search("0.50000", 9, 0, 0).unwrap();
        assert!(half.matching().contains(&Conventions::default()));

        assert!(convention_search("abc", 9, 4, 0).is_err());
    }
}
