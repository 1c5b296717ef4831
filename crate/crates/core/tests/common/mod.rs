//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use gospa_core::{DetectionVector, ExistenceEvent, LabeledPoint, MultiBernoulli, TargetSet};

pub fn euclid(a: &LabeledPoint, b: &LabeledPoint) -> f64 {
    a.coords()
        .iter()
        .zip(b.coords())
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Calls `f` with every injection of `0..m` into `0..n` (`m <= n`).
pub fn for_each_injection(m: usize, n: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(m: usize, n: usize, used: &mut Vec<bool>, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == m {
            f(cur);
            return;
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                go(m, n, used, cur, f);
                cur.pop();
                used[j] = false;
            }
        }
    }
    go(m, n, &mut vec![false; n], &mut Vec::new(), f);
}

/// Smallest `Σ min(d, c)^p` over injections of the smaller set into the larger.
fn min_matched(x: &TargetSet, y: &TargetSet, p: f64, c: f64) -> (f64, usize, usize) {
    let (s, l) = if x.len() <= y.len() { (x, y) } else { (y, x) };
    let mut best = f64::INFINITY;
    for_each_injection(s.len(), l.len(), &mut |perm| {
        let cost: f64 = perm
            .iter()
            .enumerate()
            .map(|(i, &j)| euclid(&s.points()[i], &l.points()[j]).min(c).powf(p))
            .sum();
        best = best.min(cost);
    });
    (best, s.len(), l.len())
}

/// GOSPA by minimising over permutations of the larger set.
pub fn gospa_by_permutation(x: &TargetSet, y: &TargetSet, p: f64, c: f64, alpha: f64) -> f64 {
    let (matched, m, n) = min_matched(x, y, p, c);
    (matched + c.powf(p) / alpha * (n - m) as f64).powf(1.0 / p)
}

pub fn ospa_by_permutation(x: &TargetSet, y: &TargetSet, p: f64, c: f64) -> f64 {
    let (matched, m, n) = min_matched(x, y, p, c);
    if n == 0 {
        return 0.0;
    }
    ((matched + c.powf(p) * (n - m) as f64) / n as f64).powf(1.0 / p)
}

/// `α = 2` GOSPA as the minimum over all partial assignments of
/// `Σ d^p + c^p/2 · (#unassigned)` with uncut distances.
pub fn gospa2_by_partial_assignment(x: &TargetSet, y: &TargetSet, p: f64, c: f64) -> f64 {
    let half = c.powf(p) / 2.0;
    let (m, n) = (x.len(), y.len());
    // choice[i] == n leaves x[i] unassigned
    let mut choice = vec![0usize; m];
    let mut best = f64::INFINITY;
    loop {
        let mut used = vec![false; n];
        let mut valid = true;
        let mut cost = 0.0;
        let mut pairs = 0;
        for (i, &j) in choice.iter().enumerate() {
            if j < n {
                if used[j] {
                    valid = false;
                    break;
                }
                used[j] = true;
                pairs += 1;
                cost += euclid(&x.points()[i], &y.points()[j]).powf(p);
            }
        }
        if valid {
            best = best.min(cost + half * (m + n - 2 * pairs) as f64);
        }
        // next choice vector in base n + 1
        let mut k = 0;
        while k < m && choice[k] == n {
            choice[k] = 0;
            k += 1;
        }
        if k == m {
            break;
        }
        choice[k] += 1;
    }
    best.powf(1.0 / p)
}

/// Expected squared metric by enumerating events with a plain sum, using a
/// caller-supplied squared distance.
pub fn enumerate_events(mb: &MultiBernoulli, mut sq: impl FnMut(&ExistenceEvent, &TargetSet) -> f64) -> f64 {
    let n = mb.len();
    let mut total = 0.0;
    for mask in 0..1u64 << n {
        let e = ExistenceEvent::from_mask(n, mask);
        let p = mb.event_probability(&e).unwrap();
        total += p * sq(&e, &mb.realize(&e).unwrap());
    }
    total
}

pub fn all_vectors(n: usize) -> impl Iterator<Item = DetectionVector> {
    (0..1u64 << n).map(move |m| DetectionVector::from_mask(n, m))
}
