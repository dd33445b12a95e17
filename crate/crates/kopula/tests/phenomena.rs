mod common;

use common::*;
use kopula::epd::{marginals, validate_epd1};
use kopula::phenomena::{
    half_rare_projection, phenomenon_marginals, phenomenon_point, renumber_epd1, renumber_table,
    HypercubePoint, PhenomenonMask,
};
use kopula::SubsetIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn point(w: &[f64]) -> HypercubePoint<f64> {
    HypercubePoint::from_coords(w.to_vec()).unwrap()
}

fn keep(events: &[usize]) -> PhenomenonMask {
    PhenomenonMask::new(SubsetIndex::from_events(events.iter().copied()))
}

#[test]
fn point_phenomena() {
    let w = point(&[0.3, 0.2]);
    assert_eq!(phenomenon_point(&w, keep(&[0, 1])).coords(), vec![0.3, 0.2]);
    let flipped = phenomenon_point(&w, keep(&[0]));
    assert_eq!(flipped.coord(0), 0.3);
    assert!((flipped.coord(1) - 0.8).abs() < 1e-15);
    let twice = phenomenon_point(&phenomenon_point(&w, keep(&[])), keep(&[]));
    assert_eq!(twice.coords(), vec![0.3, 0.2]);
    assert_eq!(twice, w);
}

#[test]
fn involution_is_exact_for_awkward_coordinates() {
    let w = point(&[0.1, 0.7, 1.0 / 3.0, 0.123456789]);
    let ph = keep(&[1, 3]);
    let back = phenomenon_point(&phenomenon_point(&w, ph), ph);
    assert_eq!(back.coords(), w.coords());
}

#[test]
fn points_outside_cube_rejected() {
    assert!(HypercubePoint::from_coords(vec![0.2, 1.2]).is_err());
    assert!(HypercubePoint::from_coords(vec![-0.1]).is_err());
}

#[test]
fn projection_examples() {
    let r = half_rare_projection(&point(&[0.7, 0.2]));
    assert_close(&r.projected.coords(), &[0.3, 0.2], 1e-15);
    assert_eq!(r.terrace, SubsetIndex(2));

    let r = half_rare_projection(&point(&[0.5, 0.5]));
    assert_eq!(r.projected.coords(), vec![0.5, 0.5]);
    assert_eq!(r.terrace, SubsetIndex(3));

    let r = half_rare_projection(&point(&[0.9, 0.8, 0.1]));
    assert_close(&r.projected.coords(), &[0.1, 0.2, 0.1], 1e-15);
    assert_eq!(r.terrace, SubsetIndex(4));
    assert_eq!(r.permutation, vec![1, 0, 2]);
}

#[test]
fn terrace_partition_of_grid() {
    for n in 1..=4usize {
        let total = 10usize.pow(n as u32);
        for idx in 0..total {
            let w: Vec<f64> = (0..n).map(|k| (idx / 10usize.pow(k as u32) % 10) as f64 / 9.0).collect();
            let r = half_rare_projection(&point(&w));
            let members: Vec<u32> = (0..1u32 << n)
                .filter(|&x| (0..n).all(|k| (x >> k & 1 == 1) == (w[k] <= 0.5)))
                .collect();
            assert_eq!(members, vec![r.terrace.0]);
            for k in 0..n {
                assert_eq!(r.projected.coord(k), w[k].min(1.0 - w[k]));
            }
        }
    }
}

#[test]
fn renumber_examples() {
    let d = epd(&[0.56, 0.24, 0.14, 0.06]);
    assert_eq!(renumber_epd1(&d, keep(&[0, 1])).values(), d.values());
    assert_eq!(renumber_epd1(&d, keep(&[0])).values(), &[0.14, 0.06, 0.56, 0.24]);
    assert_eq!(renumber_epd1(&d, keep(&[])).values(), &[0.06, 0.14, 0.24, 0.56]);
}

#[test]
fn renumber_matches_enumerated_phenomenon() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=5 {
        for _ in 0..20 {
            let v = random_epd_values(&mut rng, n);
            let s = rng.gen_range(0..1u32 << n);
            let out = renumber_table(&v, n, SubsetIndex(s));
            assert_eq!(out, phenomenon_table(&v, n, s));
        }
    }
}

#[test]
fn renumbered_marginals_are_complemented_outside_keep() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 1..=5 {
        let d = epd(&random_epd_values(&mut rng, n));
        let s = rng.gen_range(0..1u32 << n);
        let r = renumber_epd1(&d, PhenomenonMask::new(SubsetIndex(s)));
        assert!(validate_epd1(&r, 1e-12).is_clean());
        let p = marginals(&d).probs();
        let q = marginals(&r).probs();
        let expected: Vec<f64> = (0..n).map(|k| if s >> k & 1 == 1 { p[k] } else { 1.0 - p[k] }).collect();
        assert_close(&q, &expected, 1e-12);
        let mq = phenomenon_marginals(&marginals(&d), PhenomenonMask::new(SubsetIndex(s))).probs();
        assert_close(&q, &mq, 1e-12);
    }
}

#[test]
fn marginal_phenomena() {
    let p = marginal_set(&[0.3, 0.2]);
    assert_eq!(phenomenon_marginals(&p, keep(&[0, 1])).probs(), vec![0.3, 0.2]);
    let q = phenomenon_marginals(&p, keep(&[1]));
    assert_close(&q.probs(), &[0.7, 0.2], 1e-15);
    let half = marginal_set(&[0.5, 0.5]);
    for s in 0..4 {
        assert_eq!(phenomenon_marginals(&half, PhenomenonMask::new(SubsetIndex(s))).probs(), vec![0.5, 0.5]);
    }
    let twice = phenomenon_marginals(&q, keep(&[1]));
    assert_eq!(twice.probs(), p.probs());
}
