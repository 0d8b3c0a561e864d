//! Single-pattern bipolar autoassociative network.
//!
//! A net stores one reference pattern `x0` through the outer-product rule
//! `w_ij = x0_i * x0_j` and maps an input `u` to `y_j = step(sum_i w_ij * u_i)`
//! in one feedforward pass. Lesions only ever force weight entries to zero.
//!
//! Patterns are packed into a `u32` with bit `i` set when component `i` is
//! `+1`; [`SuccessKernel`] uses that packing to evaluate whole nets with
//! bitwise conjunction and popcounts.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported layer size. Exact enumeration walks all `2^n` inputs.
pub const MAX_NEURONS: usize = 20;

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_NEURONS {
        Err(Error::NeuronCount(n))
    } else {
        Ok(())
    }
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// A length-`n` vector of `+1`/`-1` components.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct BipolarVector {
    n: usize,
    bits: u32,
}

impl BipolarVector {
    /// Builds a vector from its bit packing (bit `i` set means `+1`).
    pub fn from_bits(n: usize, bits: u32) -> Result<Self> {
        check_n(n)?;
        if bits & !full_mask(n) != 0 {
            return Err(Error::Parse(format!(
                "bit pattern {bits:#x} has bits beyond {n} components"
            )));
        }
        Ok(Self { n, bits })
    }

    pub fn from_signs(signs: &[i64]) -> Result<Self> {
        check_n(signs.len())?;
        let mut bits = 0u32;
        for (i, &s) in signs.iter().enumerate() {
            match s {
                1 => bits |= 1 << i,
                -1 => {}
                other => return Err(Error::NotBipolar(other)),
            }
        }
        Ok(Self { n: signs.len(), bits })
    }

    pub fn all_plus(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self { n, bits: full_mask(n) })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn bits(&self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn get(&self, i: usize) -> i8 {
        if self.bits >> i & 1 == 1 {
            1
        } else {
            -1
        }
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.n).map(|i| self.get(i)).collect()
    }

    pub fn negated(&self) -> Self {
        Self { n: self.n, bits: !self.bits & full_mask(self.n) }
    }

    /// Component-wise product `self ∘ other`.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { expected: self.n, got: other.n });
        }
        // (+1)(+1) = (-1)(-1) = +1: product is +1 where the bits agree.
        Ok(Self { n: self.n, bits: !(self.bits ^ other.bits) & full_mask(self.n) })
    }

    /// Relabels components so that component `i` moves to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        let mut bits = 0u32;
        for (i, &p) in perm.iter().enumerate() {
            bits |= (self.bits >> i & 1) << p;
        }
        Ok(Self { n: self.n, bits })
    }

    /// Number of positions where `self` and `other` agree.
    #[inline]
    pub fn agreement(&self, other: &Self) -> u32 {
        (!(self.bits ^ other.bits) & full_mask(self.n)).count_ones()
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: perm.len() });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::Parse(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        seen[p] = true;
    }
    Ok(())
}

impl fmt::Display for BipolarVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(if self.get(i) > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// Parses either a sign string (`"+-+"`) or a comma list (`"1,-1,1"`).
impl FromStr for BipolarVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains(',') {
            let signs = s
                .split(',')
                .map(|t| t.trim().parse::<i64>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            return Self::from_signs(&signs);
        }
        let signs = s
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(Error::Parse(format!("unexpected character {other:?} in sign string"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_signs(&signs)
    }
}

impl Serialize for BipolarVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BipolarVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! string_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];
        }

        /// The first listed variant.
        impl Default for $name {
            fn default() -> Self {
                $name::ALL[0]
            }
        }

        impl $name {

            pub fn as_str(&self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.trim() {
                    $($text => Ok($name::$variant),)+
                    other => Err(Error::Parse(format!(
                        concat!("unknown ", stringify!($name), " {:?}"), other
                    ))),
                }
            }
        }
    };
}

string_enum! {
    /// Whether self-weights `w_ii` are stored or forced to zero at training time.
    DiagonalPolicy { Keep => "keep", Zero => "zero" }
}

string_enum! {
    /// Step behavior at a zero local field.
    TiePolicy {
        StrictMinus => "strict_minus",
        LenientPlus => "lenient_plus",
        TieFails => "tie_fails",
    }
}

string_enum! {
    SuccessRule { FullMatch => "full_match" }
}

string_enum! {
    /// Which input positions carry the cue when `m` components are fixed.
    ///
    /// `Averaged` averages over every `m`-subset; `Leading` always cues
    /// positions `0..m`.
    CuePlacement { Averaged => "averaged", Leading => "leading" }
}

/// Decoding conventions fixed at training time.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize, Deserialize)]
pub struct Conventions {
    pub diagonal: DiagonalPolicy,
    pub tie: TiePolicy,
    pub success: SuccessRule,
    pub cue: CuePlacement,
}

impl Conventions {
    /// Every combination of diagonal, tie and cue policy.
    pub fn all() -> Vec<Conventions> {
        let mut out = Vec::new();
        for &diagonal in DiagonalPolicy::ALL {
            for &tie in TiePolicy::ALL {
                for &cue in CuePlacement::ALL {
                    out.push(Conventions { diagonal, tie, success: SuccessRule::FullMatch, cue });
                }
            }
        }
        out
    }
}

impl fmt::Display for Conventions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}/{}", self.diagonal, self.tie, self.success, self.cue)
    }
}

/// A single synaptic link from input neuron `input` to output neuron `output`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Link {
    pub input: usize,
    pub output: usize,
}

impl Link {
    pub fn new(input: usize, output: usize) -> Self {
        Self { input, output }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.input, self.output)
    }
}

impl FromStr for Link {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("link {s:?} is not of the form i,j")))?;
        let parse = |t: &str| {
            t.trim().parse::<usize>().map_err(|e| Error::Parse(format!("link {s:?}: {e}")))
        };
        Ok(Link::new(parse(a)?, parse(b)?))
    }
}

/// A lesion: deleted input neurons and/or individually cut links.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct DamageSpec {
    pub deleted_inputs: BTreeSet<usize>,
    pub cut_links: BTreeSet<Link>,
}

impl DamageSpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn delete_inputs(inputs: impl IntoIterator<Item = usize>) -> Self {
        Self { deleted_inputs: inputs.into_iter().collect(), cut_links: BTreeSet::new() }
    }

    pub fn cut(links: impl IntoIterator<Item = Link>) -> Self {
        Self { deleted_inputs: BTreeSet::new(), cut_links: links.into_iter().collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.deleted_inputs.is_empty() && self.cut_links.is_empty()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for &i in &self.deleted_inputs {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
        }
        for l in &self.cut_links {
            for index in [l.input, l.output] {
                if index >= n {
                    return Err(Error::IndexOutOfRange { index, n });
                }
            }
        }
        Ok(())
    }

    /// Relabels neurons: index `i` becomes `perm[i]` in both damage kinds.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            deleted_inputs: self.deleted_inputs.iter().map(|&i| perm[i]).collect(),
            cut_links: self.cut_links.iter().map(|l| Link::new(perm[l.input], perm[l.output])).collect(),
        }
    }

    /// Canonical text form of the cut links: sorted `i,j` pairs joined by `;`.
    pub fn links_to_string(&self) -> String {
        format_links(self.cut_links.iter())
    }
}

pub fn format_links<'a>(links: impl IntoIterator<Item = &'a Link>) -> String {
    links.into_iter().map(Link::to_string).collect::<Vec<_>>().join(";")
}

/// Parses a `;`-separated list of `i,j` pairs. An empty string is an empty list.
pub fn parse_links(s: &str) -> Result<BTreeSet<Link>> {
    let mut out = BTreeSet::new();
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let link: Link = part.parse()?;
        if !out.insert(link) {
            return Err(Error::Parse(format!("duplicate link {link}")));
        }
    }
    Ok(out)
}

/// Result of one forward pass.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Response {
    pub output: BipolarVector,
    /// Bit `j` set when output `j` had a zero field under [`TiePolicy::TieFails`].
    pub ties: u32,
}

/// A trained (and possibly lesioned) network.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TrainedNet {
    n: usize,
    reference: BipolarVector,
    /// Row-major: `weights[i * n + j]` is the link from input `i` to output `j`.
    weights: Vec<i8>,
    conventions: Conventions,
}

impl TrainedNet {
    /// Outer-product training on a single reference pattern.
    pub fn train(reference: BipolarVector, conventions: Conventions) -> Self {
        let n = reference.len();
        let mut weights = vec![0i8; n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j && conventions.diagonal == DiagonalPolicy::Zero {
                    continue;
                }
                weights[i * n + j] = reference.get(i) * reference.get(j);
            }
        }
        Self { n, reference, weights, conventions }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn reference(&self) -> &BipolarVector {
        &self.reference
    }

    pub fn conventions(&self) -> Conventions {
        self.conventions
    }

    #[inline]
    pub fn weight(&self, input: usize, output: usize) -> i8 {
        self.weights[input * self.n + output]
    }

    pub fn weights(&self) -> &[i8] {
        &self.weights
    }

    /// Returns a lesioned copy; `self` is left untouched.
    pub fn apply_damage(&self, spec: &DamageSpec) -> Result<TrainedNet> {
        spec.validate(self.n)?;
        let mut net = self.clone();
        for &i in &spec.deleted_inputs {
            net.weights[i * self.n..(i + 1) * self.n].fill(0);
        }
        for l in &spec.cut_links {
            net.weights[l.input * self.n + l.output] = 0;
        }
        Ok(net)
    }

    /// Same net with the cue-placement convention swapped.
    pub fn with_cue_placement(&self, cue: CuePlacement) -> TrainedNet {
        let mut net = self.clone();
        net.conventions.cue = cue;
        net
    }

    fn check_len(&self, u: &BipolarVector) -> Result<()> {
        if u.len() != self.n {
            Err(Error::LengthMismatch { expected: self.n, got: u.len() })
        } else {
            Ok(())
        }
    }

    /// `h_j = sum_i w_ij * u_i`, computed straight from the weight matrix.
    pub fn local_field(&self, u: &BipolarVector) -> Result<Vec<i32>> {
        self.check_len(u)?;
        let mut h = vec![0i32; self.n];
        for i in 0..self.n {
            let ui = i32::from(u.get(i));
            for (j, hj) in h.iter_mut().enumerate() {
                *hj += i32::from(self.weight(i, j)) * ui;
            }
        }
        Ok(h)
    }

    pub fn forward(&self, u: &BipolarVector) -> Result<Response> {
        let h = self.local_field(u)?;
        let mut bits = 0u32;
        let mut ties = 0u32;
        for (j, &hj) in h.iter().enumerate() {
            let plus = match self.conventions.tie {
                TiePolicy::StrictMinus => hj > 0,
                TiePolicy::LenientPlus => hj >= 0,
                TiePolicy::TieFails => {
                    if hj == 0 {
                        ties |= 1 << j;
                    }
                    hj > 0
                }
            };
            if plus {
                bits |= 1 << j;
            }
        }
        Ok(Response { output: BipolarVector { n: self.n, bits }, ties })
    }

    /// Full-match comparison against the stored reference.
    pub fn is_success(&self, response: &Response) -> bool {
        match self.conventions.success {
            SuccessRule::FullMatch => response.ties == 0 && response.output == self.reference,
        }
    }

    pub fn kernel(&self) -> SuccessKernel {
        SuccessKernel::new(self)
    }
}

#[derive(Clone, Copy, Debug)]
struct OutputUnit {
    pos: u32,
    neg: u32,
    /// `|neg| - |pos|`; the field is `2 * (pc(pos & u) - pc(neg & u)) + offset`.
    offset: i32,
    wants_plus: bool,
}

/// Bit-parallel success test for a fixed net.
///
/// Output `j` is correct on input bits `u` iff its field has the reference
/// sign under the tie policy. Evaluation stops at the first wrong output.
#[derive(Clone, Debug)]
pub struct SuccessKernel {
    n: usize,
    tie: TiePolicy,
    units: Vec<OutputUnit>,
}

impl SuccessKernel {
    pub fn new(net: &TrainedNet) -> Self {
        let n = net.n;
        let units = (0..n)
            .map(|j| {
                let mut pos = 0u32;
                let mut neg = 0u32;
                for i in 0..n {
                    match net.weight(i, j) {
                        1 => pos |= 1 << i,
                        -1 => neg |= 1 << i,
                        _ => {}
                    }
                }
                OutputUnit {
                    pos,
                    neg,
                    offset: neg.count_ones() as i32 - pos.count_ones() as i32,
                    wants_plus: net.reference.get(j) > 0,
                }
            })
            .collect();
        Self { n, tie: net.conventions.tie, units }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_success(&self, input: u32) -> bool {
        for u in &self.units {
            let h = 2 * ((u.pos & input).count_ones() as i32 - (u.neg & input).count_ones() as i32)
                + u.offset;
            let ok = match (self.tie, u.wants_plus) {
                (TiePolicy::StrictMinus, true) => h > 0,
                (TiePolicy::StrictMinus, false) => h <= 0,
                (TiePolicy::LenientPlus, true) => h >= 0,
                (TiePolicy::LenientPlus, false) => h < 0,
                (TiePolicy::TieFails, true) => h > 0,
                (TiePolicy::TieFails, false) => h < 0,
            };
            if !ok {
                return false;
            }
        }
        true
    }

    /// Number of the `2^n` inputs that recall the reference (free recall count).
    pub fn success_count(&self) -> u64 {
        (0..=full_mask(self.n)).filter(|&b| self.is_success(b)).count() as u64
    }
}
