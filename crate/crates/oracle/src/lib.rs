//! Slow, direct reference computations for cross-checking `totnet`.
//!
//! Nothing here shares code with the library: vectors are plain `i32`
//! slices, weights are nested `Vec`s, cue subsets come from recursive
//! combination generation and noise from counting in base two.

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Tie {
    Strict,
    Lenient,
    Fails,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Cue {
    Averaged,
    Leading,
}

/// `w[i][j] = x_i x_j`, optionally with a zero diagonal.
pub fn train(reference: &[i32], keep_diagonal: bool) -> Vec<Vec<i32>> {
    let n = reference.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j && !keep_diagonal { 0 } else { reference[i] * reference[j] })
                .collect()
        })
        .collect()
}

pub fn lesion(w: &[Vec<i32>], deleted: &[usize], cuts: &[(usize, usize)]) -> Vec<Vec<i32>> {
    let mut w = w.to_vec();
    for &i in deleted {
        for x in w[i].iter_mut() {
            *x = 0;
        }
    }
    for &(i, j) in cuts {
        w[i][j] = 0;
    }
    w
}

/// True when the single feedforward pass reproduces `reference` exactly.
pub fn recalls(w: &[Vec<i32>], reference: &[i32], tie: Tie, input: &[i32]) -> bool {
    let n = reference.len();
    (0..n).all(|j| {
        let h: i32 = (0..n).map(|i| w[i][j] * input[i]).sum();
        let y = if h > 0 {
            Some(1)
        } else if h < 0 {
            Some(-1)
        } else {
            match tie {
                Tie::Strict => Some(-1),
                Tie::Lenient => Some(1),
                Tie::Fails => None,
            }
        };
        y == Some(reference[j])
    })
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if k > n {
        return vec![];
    }
    let mut out = Vec::new();
    for last in (k - 1)..n {
        for mut c in combinations(last, k - 1) {
            c.push(last);
            out.push(c);
        }
    }
    out
}

/// `(successes, configurations)` with `m` cued components.
pub fn recall_count(w: &[Vec<i32>], reference: &[i32], tie: Tie, cue: Cue, m: usize) -> (u64, u64) {
    let n = reference.len();
    let subsets = match cue {
        Cue::Averaged => combinations(n, m),
        Cue::Leading => vec![(0..m).collect()],
    };
    let mut hits = 0;
    let mut total = 0;
    for s in subsets {
        let free: Vec<usize> = (0..n).filter(|i| !s.contains(i)).collect();
        for code in 0..(1u64 << free.len()) {
            let mut input = reference.to_vec();
            for (b, &i) in free.iter().enumerate() {
                input[i] = if code >> b & 1 == 1 { 1 } else { -1 };
            }
            total += 1;
            if recalls(w, reference, tie, &input) {
                hits += 1;
            }
        }
    }
    (hits, total)
}

pub fn curve(w: &[Vec<i32>], reference: &[i32], tie: Tie, cue: Cue) -> Vec<(u64, u64)> {
    (0..=reference.len()).map(|m| recall_count(w, reference, tie, cue, m)).collect()
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn reduce((a, b): (u64, u64)) -> (u64, u64) {
    let g = gcd(a, b).max(1);
    (a / g, b / g)
}

/// Pascal's triangle.
pub fn binomial(n: usize, k: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![1u128; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row.get(k).copied().unwrap_or(0)
}
