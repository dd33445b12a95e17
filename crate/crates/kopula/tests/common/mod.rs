//! Reference evaluations written independently of the library kernels.
#![allow(dead_code)]

use kopula::epd::{Epd1, MarginalSet};
use kopula::EventSetContext;
use rand::Rng;

/// Π_{k∈X} p_k Π_{k∉X} (1 − p_k) by direct enumeration.
pub fn product_epd(p: &[f64]) -> Vec<f64> {
    (0..1usize << p.len())
        .map(|x| {
            p.iter()
                .enumerate()
                .map(|(k, &pk)| if x >> k & 1 == 1 { pk } else { 1.0 - pk })
                .product()
        })
        .collect()
}

/// Σ_{Y ⊇ X} v[Y] by direct enumeration.
pub fn superset_sums(v: &[f64]) -> Vec<f64> {
    (0..v.len())
        .map(|x| (0..v.len()).filter(|y| y & x == x).map(|y| v[y]).sum())
        .collect()
}

/// Σ_{Y ⊇ X} (−1)^{|Y∖X|} v[Y] by direct enumeration.
pub fn inclusion_exclusion(v: &[f64]) -> Vec<f64> {
    (0..v.len())
        .map(|x| {
            (0..v.len())
                .filter(|y| y & x == x)
                .map(|y| if (y ^ x).count_ones() % 2 == 0 { v[y] } else { -v[y] })
                .sum()
        })
        .collect()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn assert_close(a: &[f64], b: &[f64], tol: f64) {
    let d = max_diff(a, b);
    assert!(d <= tol, "max difference {d:e} > {tol:e}\n left: {a:?}\nright: {b:?}");
}

pub fn ctx(n: usize) -> EventSetContext {
    EventSetContext::new(n).unwrap()
}

pub fn marginal_set(p: &[f64]) -> MarginalSet<f64> {
    MarginalSet::new(ctx(p.len()), p.to_vec()).unwrap()
}

pub fn epd(values: &[f64]) -> Epd1<f64> {
    let n = values.len().trailing_zeros() as usize;
    Epd1::new(ctx(n), values.to_vec()).unwrap()
}

/// Random distribution with exponential weights (uniform on the simplex).
pub fn random_epd_values<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..1usize << n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

/// Random half-rare marginals sorted nonincreasing.
pub fn random_ordered_half_rare<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut p: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..0.5)).collect();
    p.sort_by(|a, b| b.partial_cmp(a).unwrap());
    p
}

/// Terrace table of the complement-or-keep map, by direct enumeration of
/// which half-rare events occur: q(Y) with y_k = x_k for k ∈ keep, x_kᶜ
/// otherwise.
pub fn phenomenon_table(d: &[f64], n: usize, keep: u32) -> Vec<f64> {
    let mut q = vec![0.0; d.len()];
    for (z, &v) in d.iter().enumerate() {
        let mut y = 0;
        for k in 0..n {
            let occurs = z >> k & 1 == 1;
            let kept = keep >> k & 1 == 1;
            if occurs == kept {
                y |= 1 << k;
            }
        }
        q[y] += v;
    }
    q
}
