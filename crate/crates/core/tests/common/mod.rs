//! Independent reference computations shared by the integration tests.
//!
//! Nothing in here touches the observers or `VarStats`: statistics are
//! recomputed from raw values with compensated two-pass sums.

#![allow(dead_code)]

/// Neumaier-compensated sum.
pub fn sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let t = s + v;
        if s.abs() >= v.abs() {
            c += (s - t) + v;
        } else {
            c += (v - t) + s;
        }
        s = t;
    }
    s + c
}

/// Count, mean and sum of squared deviations by two passes.
pub fn two_pass(values: &[f64]) -> (f64, f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = sum(values.iter().copied()) / n;
    let m2 = sum(values.iter().map(|v| (v - mean) * (v - mean)));
    (n, mean, m2)
}

pub fn sample_variance(values: &[f64]) -> f64 {
    let (n, _, m2) = two_pass(values);
    if n <= 1.0 {
        0.0
    } else {
        m2 / (n - 1.0)
    }
}

/// Variance reduction of a partition, from raw values.
pub fn vr(parent: &[f64], left: &[f64], right: &[f64]) -> f64 {
    let n = parent.len() as f64;
    if n <= 1.0 {
        return 0.0;
    }
    sample_variance(parent)
        - left.len() as f64 / n * sample_variance(left)
        - right.len() as f64 / n * sample_variance(right)
}

/// Merits closer than this fraction of the parent variance are ties.
pub const TIE_TOL: f64 = 1e-12;

/// Evaluates `x <= c` for every candidate `c` (ascending) and returns the
/// first maximizer as `(cut, merit)`.
pub fn best_of_candidates(pairs: &[(f64, f64)], candidates: &[f64]) -> Option<(f64, f64)> {
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let tie = TIE_TOL * sample_variance(&ys);
    let mut best: Option<(f64, f64)> = None;
    for &c in candidates {
        let left: Vec<f64> = pairs.iter().filter(|p| p.0 <= c).map(|p| p.1).collect();
        let right: Vec<f64> = pairs.iter().filter(|p| p.0 > c).map(|p| p.1).collect();
        let merit = vr(&ys, &left, &right);
        if best.is_none_or(|(_, m)| merit > m + tie) {
            best = Some((c, merit));
        }
    }
    best
}

/// Sort-and-scan evaluation of every distinct observed feature value except
/// the largest.
pub fn brute_force_ebst(pairs: &[(f64, f64)]) -> Option<(f64, f64)> {
    let mut thresholds: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    if thresholds.len() < 2 {
        return None;
    }
    // cutting at the maximum leaves nothing on the right
    thresholds.pop();
    best_of_candidates(pairs, &thresholds)
}

/// Groups raw values into `floor(x / r)` buckets and evaluates every
/// bucket-prefix partition, with the cut placed midway between the mean
/// feature values of the two buckets on either side.
pub fn brute_force_qo(pairs: &[(f64, f64)], radius: f64) -> Option<(f64, f64)> {
    let mut keyed: Vec<(f64, f64, f64)> = pairs.iter().map(|&(x, y)| ((x / radius).floor(), x, y)).collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    // (prototype, targets) per bucket, ascending
    let mut buckets: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut i = 0;
    while i < keyed.len() {
        let key = keyed[i].0;
        let members: Vec<(f64, f64)> = keyed[i..].iter().take_while(|k| k.0 == key).map(|k| (k.1, k.2)).collect();
        i += members.len();
        let prototype = sum(members.iter().map(|m| m.0)) / members.len() as f64;
        buckets.push((prototype, members.into_iter().map(|m| m.1).collect()));
    }
    if buckets.len() < 2 {
        return None;
    }
    let ys: Vec<f64> = buckets.iter().flat_map(|b| b.1.iter().copied()).collect();
    let tie = TIE_TOL * sample_variance(&ys);
    let mut best: Option<(f64, f64)> = None;
    for split in 1..buckets.len() {
        let left: Vec<f64> = buckets[..split].iter().flat_map(|b| b.1.iter().copied()).collect();
        let right: Vec<f64> = buckets[split..].iter().flat_map(|b| b.1.iter().copied()).collect();
        let merit = vr(&ys, &left, &right);
        if best.is_none_or(|(_, m)| merit > m + tie) {
            best = Some(((buckets[split - 1].0 + buckets[split].0) / 2.0, merit));
        }
    }
    best
}

/// Radius small enough that every distinct value gets its own slot.
pub fn singleton_radius(xs: &[f64]) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let gap = sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if gap.is_finite() {
        gap / 4.0
    } else {
        1.0
    }
}

/// Naive single-pass variance from running sums of `y` and `y²`.
pub fn naive_variance(values: &[f64]) -> f64 {
    let (mut s, mut s2) = (0.0f64, 0.0f64);
    for &v in values {
        s += v;
        s2 += v * v;
    }
    let n = values.len() as f64;
    (s2 - s * s / n) / (n - 1.0)
}

pub fn rel_err(got: f64, expected: f64) -> f64 {
    if got == expected {
        0.0
    } else {
        (got - expected).abs() / expected.abs().max(f64::MIN_POSITIVE)
    }
}
