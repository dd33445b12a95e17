mod common;

use common::*;
use kopula::epd::{marginals, validate_epd1, Epd1};
use kopula::frame::{
    build_nset_epd, conditional_epd, conditional_from_pseudo, decompose, frame_compose,
    frame_split, frechet_bounds, full_probability_check, pseudo_from_conditional, quadruplet_epd, triplet_epd,
    BoundsPolicy, FrameParams, PseudoDistribution, QuadrupletParams, Side, TripletParams,
};
use kopula::{KopulaError, SubsetIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn s(events: &[usize]) -> SubsetIndex {
    SubsetIndex::from_events(events.iter().copied())
}

fn pseudo(values: &[f64], mass: f64) -> PseudoDistribution<f64> {
    let n = values.len().trailing_zeros() as usize;
    PseudoDistribution::new(ctx(n), mass, values.to_vec()).unwrap()
}

fn independent_quadruplet(p: &[f64]) -> QuadrupletParams<f64> {
    let (x, y, z, v) = (p[0], p[1], p[2], p[3]);
    QuadrupletParams {
        s1: x * y,
        t1: x * z,
        u1: x * v,
        st1: x * y * z,
        su1: x * y * v,
        tu1: x * z * v,
        stu1: x * y * z * v,
        st2: (1.0 - x) * y * z,
        su2: (1.0 - x) * y * v,
        tu2: (1.0 - x) * z * v,
        stu2: (1.0 - x) * y * z * v,
    }
}

#[test]
fn conditional_examples() {
    let y = s(&[1]);
    let joint = epd(&product_epd(&[0.4, 0.3]));
    assert_close(conditional_epd(&joint, y, y).unwrap().values(), &[0.6, 0.4], 1e-15);
    let joint = epd(&[0.42, 0.28, 0.18, 0.12]);
    assert_close(conditional_epd(&joint, y, y).unwrap().values(), &[0.6, 0.4], 1e-15);
    let joint = epd(&[0.6, 0.4, 0.0, 0.0]);
    assert!(matches!(conditional_epd(&joint, y, y), Err(KopulaError::Conditioning(_))));
}

#[test]
fn pseudo_scaling() {
    let cond = epd(&[0.6, 0.4]);
    let p = pseudo_from_conditional(&cond, 0.3).unwrap();
    assert_close(p.values(), &[0.18, 0.12], 1e-15);
    assert_eq!(pseudo_from_conditional(&cond, 1.0).unwrap().values(), cond.values());
    assert!(pseudo_from_conditional(&cond, 0.0).is_err());

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 1..=5 {
        let c = epd(&random_epd_values(&mut rng, n));
        let m = rng.gen_range(0.01..1.0);
        let back = conditional_from_pseudo(&pseudo_from_conditional(&c, m).unwrap()).unwrap();
        assert_close(back.values(), c.values(), 1e-12);
    }
}

#[test]
fn doublet_composition() {
    let (px, py, s1) = (0.4, 0.3, 0.12);
    let inner = pseudo(&[px - s1, s1], px);
    let outer = pseudo(&[1.0 - px - py + s1, py - s1], 1.0 - px);
    let d = frame_compose(&inner, &outer, px).unwrap();
    assert_close(d.values(), &[0.42, 0.28, 0.18, 0.12], 1e-15);
    assert!((marginals(&d).prob(0) - px).abs() < 1e-15);

    let mut params = FrameParams::new(2);
    params.set(s(&[0, 1]), s1).unwrap();
    let built = build_nset_epd(&marginal_set(&[px, py]), &params, BoundsPolicy::Check).unwrap();
    assert_close(built.values(), &[0.42, 0.28, 0.18, 0.12], 1e-15);

    assert!(matches!(frame_compose(&inner, &outer, 0.5), Err(KopulaError::Composition(_))));
}

#[test]
fn independent_doublets_from_product_parameter() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let p = random_ordered_half_rare(&mut rng, 2);
        let mut params = FrameParams::new(2);
        params.set(s(&[0, 1]), p[0] * p[1]).unwrap();
        let d = build_nset_epd(&marginal_set(&p), &params, BoundsPolicy::Check).unwrap();
        assert_close(d.values(), &product_epd(&p), 1e-15);
    }
}

#[test]
fn fair_frame_coin_with_shared_inner_distribution() {
    let inner = [0.1, 0.2, 0.3, 0.4];
    let half: Vec<f64> = inner.iter().map(|v| v * 0.5).collect();
    let d = frame_compose(&pseudo(&half, 0.5), &pseudo(&half, 0.5), 0.5).unwrap();
    for z in 0..8 {
        assert!((d.values()[z] - 0.5 * inner[z >> 1]).abs() < 1e-15);
    }
}

#[test]
fn split_reassembles_joint() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for n in 2..=6 {
        let d = epd(&random_epd_values(&mut rng, n));
        let (inner, outer) = frame_split(&d).unwrap();
        let p0 = marginals(&d).prob(0);
        assert!((inner.frame_prob() - p0).abs() < 1e-12);
        let back = frame_compose(&inner, &outer, p0).unwrap();
        assert_close(back.values(), d.values(), 0.0);
        let rest: Vec<f64> = inner.values().iter().zip(outer.values()).map(|(a, b)| a + b).collect();
        let direct: Vec<f64> = (0..1usize << (n - 1)).map(|x| d.values()[x << 1] + d.values()[x << 1 | 1]).collect();
        assert_close(&rest, &direct, 1e-15);
        let ins = inner.inserted_epd();
        assert!((ins.values().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn triplet_examples() {
    let p = marginal_set(&[0.5, 0.4, 0.3]);
    let ind = TripletParams { s1: 0.2, t1: 0.15, st1: 0.06, st2: 0.06 };
    let d = triplet_epd(&p, &ind).unwrap();
    assert_close(d.values(), &product_epd(&[0.5, 0.4, 0.3]), 1e-15);
    assert_close(d.values(), &[0.21, 0.21, 0.14, 0.14, 0.09, 0.09, 0.06, 0.06], 1e-15);

    let top = TripletParams { st1: 0.15, ..ind };
    let d = triplet_epd(&p, &top).unwrap();
    assert!(d.values()[0b011] == 0.0 || d.values()[0b101] == 0.0);

    let bad = TripletParams { s1: 0.45, ..ind };
    match triplet_epd(&p, &bad) {
        Err(KopulaError::Infeasible(msg)) => assert!(msg.contains("p_s'"), "{msg}"),
        other => panic!("expected infeasibility, got {other:?}"),
    }
    assert!(triplet_epd(&marginal_set(&[0.3, 0.4, 0.2]), &ind).is_err());
    assert!(triplet_epd(&marginal_set(&[0.6, 0.4, 0.2]), &ind).is_err());
}

#[test]
fn triplet_tolerates_numeric_noise_at_bounds() {
    let p = marginal_set(&[0.5, 0.4, 0.3]);
    let params = TripletParams { s1: 0.4 + 5e-10, t1: 0.15, st1: 0.06, st2: 0.0 };
    let d = triplet_epd(&p, &params).unwrap();
    assert!(d.clamped());
    assert!(validate_epd1(&d, 1e-12).is_clean());
}

#[test]
fn triplet_marginals_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let pv = random_ordered_half_rare(&mut rng, 3);
        let p = marginal_set(&pv);
        let s1 = rng.gen_range(0.0..=pv[1]);
        let t1 = rng.gen_range(0.0..=pv[2]);
        let lo = (s1 + t1 - pv[0]).max(0.0);
        let st1 = rng.gen_range(lo..=s1.min(t1));
        let lo2 = (pv[0] + pv[1] + pv[2] - 1.0 - s1 - t1).max(0.0);
        let st2 = rng.gen_range(lo2..=(pv[1] - s1).min(pv[2] - t1));
        let d = triplet_epd(&p, &TripletParams { s1, t1, st1, st2 }).unwrap();
        assert_close(&marginals(&d).probs(), &pv, 1e-12);
    }
}

#[test]
fn quadruplet_examples() {
    let pv = [0.5, 0.4, 0.3, 0.2];
    let p = marginal_set(&pv);
    let ind = independent_quadruplet(&pv);
    let d = quadruplet_epd(&p, &ind).unwrap();
    assert_close(d.values(), &product_epd(&pv), 1e-15);

    let top = QuadrupletParams { stu1: ind.st1.min(ind.su1).min(ind.tu1), ..ind };
    let d = quadruplet_epd(&p, &top).unwrap();
    assert!(d.values()[0b1101].abs() < 1e-15);

    let bottom = QuadrupletParams { stu2: 0.0, ..ind };
    let d = quadruplet_epd(&p, &bottom).unwrap();
    assert_eq!(d.values()[0b1110], 0.0);

    let at_cap = QuadrupletParams { s1: 0.4, ..ind };
    assert!(quadruplet_epd(&p, &at_cap).is_err() || quadruplet_epd(&p, &at_cap).unwrap().values()[0b0010] == 0.0);

    let over = QuadrupletParams { stu1: ind.tu1 + 0.01, ..ind };
    match quadruplet_epd(&p, &over) {
        Err(KopulaError::Infeasible(msg)) => assert!(msg.contains("p_s't'u'"), "{msg}"),
        other => panic!("expected infeasibility, got {other:?}"),
    }
}

#[test]
fn closed_forms_agree_with_recursion() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for n in [3usize, 4] {
        for _ in 0..50 {
            let d = epd(&random_epd_values(&mut rng, n));
            let (p, params) = FrameParams::from_epd(&d).unwrap();
            let (h, _) = kopula::phenomena::half_rare_coords(&p.probs());
            let perm = kopula::phenomena::ordering_permutation(&h);
            let mut inv = vec![0; n];
            for (i, &k) in perm.iter().enumerate() {
                inv[k] = i;
            }
            let ordered = marginal_set(&perm.iter().map(|&k| h[k]).collect::<Vec<_>>());
            let op = params.permuted(&inv);
            let recursive = build_nset_epd(&ordered, &op, BoundsPolicy::Check).unwrap();
            let closed = if n == 3 {
                triplet_epd(&ordered, &op.to_triplet().unwrap()).unwrap()
            } else {
                quadruplet_epd(&ordered, &op.to_quadruplet().unwrap()).unwrap()
            };
            assert_close(closed.values(), recursive.values(), 1e-14);
        }
    }
}

#[test]
fn bounds_examples() {
    let p = marginal_set(&[0.5, 0.4, 0.3]);
    let mut params = FrameParams::new(3);
    params.set(s(&[0, 1]), 0.2).unwrap();
    params.set(s(&[0, 2]), 0.15).unwrap();
    for side in [Side::Primed, Side::DoublePrimed] {
        let b = frechet_bounds(&params, s(&[1, 2]), &p, side).unwrap();
        assert!(b.lower.abs() < 1e-15 && (b.upper - 0.15).abs() < 1e-15, "{side:?}: {b:?}");
    }

    let pair = marginal_set(&[0.4, 0.3]);
    let b = frechet_bounds(&FrameParams::new(2), s(&[1]), &pair, Side::Primed).unwrap();
    assert_eq!((b.lower, b.upper), (0.0, 0.3));

    let q = marginal_set(&[0.45, 0.4, 0.35, 0.3]);
    let mut params = FrameParams::new(4);
    let (st, su, tu) = (0.4, 0.38, 0.36);
    params.set(s(&[0, 1, 2]), st).unwrap();
    params.set(s(&[0, 1, 3]), su).unwrap();
    params.set(s(&[0, 2, 3]), tu).unwrap();
    let b = frechet_bounds(&params, s(&[1, 2, 3]), &q, Side::Primed).unwrap();
    assert!((b.lower - (st + su + tu - 2.0 * 0.45)).abs() < 1e-15);
    assert_eq!(b.upper, 0.36);
    assert!(b.lower > 0.2);

    let missing = frechet_bounds(&FrameParams::new(4), s(&[1, 2, 3]), &q, Side::Primed);
    assert!(matches!(missing, Err(KopulaError::Dependency(_))));
    assert!(frechet_bounds(&params, s(&[0, 1]), &q, Side::Primed).is_err());
}

#[test]
fn builder_examples() {
    let p = marginal_set(&[0.7, 0.2]);
    let d = build_nset_epd(&p, &FrameParams::independent(&p), BoundsPolicy::Check).unwrap();
    assert_close(d.values(), &product_epd(&[0.7, 0.2]), 1e-15);
    assert!((marginals(&d).prob(0) - 0.7).abs() < 1e-15);

    let pv = [0.2, 0.45, 0.3];
    let shuffled = build_nset_epd(&marginal_set(&pv), &FrameParams::independent(&marginal_set(&pv)), BoundsPolicy::Check).unwrap();
    let ordered = [0.45, 0.3, 0.2];
    let base = build_nset_epd(&marginal_set(&ordered), &FrameParams::independent(&marginal_set(&ordered)), BoundsPolicy::Check).unwrap();
    let to_ordered = [2usize, 0, 1];
    for x in 0..8u32 {
        let y = SubsetIndex::from_events(SubsetIndex(x).events().map(|k| to_ordered[k]));
        assert!((shuffled.values()[x as usize] - base.values()[y.index()]).abs() < 1e-15);
    }

    let pv = [0.9, 0.15, 0.6, 0.33, 0.5];
    let p = marginal_set(&pv);
    let d = build_nset_epd(&p, &FrameParams::independent(&p), BoundsPolicy::Check).unwrap();
    assert_close(d.values(), &product_epd(&pv), 1e-12);
}

#[test]
fn builder_reproduces_any_distribution() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for n in 1..=7 {
        for _ in 0..10 {
            let d = epd(&random_epd_values(&mut rng, n));
            let (p, params) = FrameParams::from_epd(&d).unwrap();
            assert_eq!(params.len(), FrameParams::<f64>::expected_len(n));
            assert!(params.is_complete());
            let back = build_nset_epd(&p, &params, BoundsPolicy::Check).unwrap();
            assert_close(back.values(), d.values(), 1e-12);
        }
    }
}

#[test]
fn builder_rejects_out_of_bound_parameters() {
    let p = marginal_set(&[0.5, 0.4, 0.3]);
    let mut params = FrameParams::independent(&p);
    params.set(s(&[0, 1, 2]), 0.2).unwrap();
    match build_nset_epd(&p, &params, BoundsPolicy::Check) {
        Err(KopulaError::Infeasible(msg)) => assert!(msg.contains("outside"), "{msg}"),
        other => panic!("expected infeasibility, got {other:?}"),
    }
    assert!(build_nset_epd(&p, &params, BoundsPolicy::Skip).is_err());
    let mut incomplete = FrameParams::new(3);
    incomplete.set(s(&[0, 1]), 0.2).unwrap();
    assert!(matches!(build_nset_epd(&p, &incomplete, BoundsPolicy::Check), Err(KopulaError::Dependency(_))));
    assert!(FrameParams::<f64>::new(3).set(s(&[1]), 0.1).is_err());
}

#[test]
fn full_probability_examples() {
    let joint = epd(&product_epd(&[0.3, 0.6, 0.25]));
    let frame = s(&[2]);
    let (f, conds) = decompose(&joint, frame).unwrap();
    let r = full_probability_check(&joint, frame, &conds, &f).unwrap();
    assert!(r.conditional_residual < 1e-12 && r.pseudo_residual < 1e-12 && r.joint_residual < 1e-12);
    assert_close(f.values(), &[0.75, 0.25], 1e-15);

    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let joint = epd(&random_epd_values(&mut rng, 4));
    let frame = s(&[0, 3]);
    let (f, mut conds) = decompose(&joint, frame).unwrap();
    let r = full_probability_check(&joint, frame, &conds, &f).unwrap();
    assert!(r.conditional_residual < 1e-12 && r.joint_residual < 1e-12);

    let delta = 0.01;
    let mut v = conds[2].values().to_vec();
    v[0] += delta;
    v[3] -= delta;
    conds[2] = Epd1::new(conds[2].context().clone(), v).unwrap();
    let r = full_probability_check(&joint, frame, &conds, &f).unwrap();
    let mass = f.values()[2];
    assert!((r.conditional_residual - delta * mass).abs() < 1e-12);
    assert!((r.pseudo_residual - delta * mass).abs() < 1e-12);
}

#[test]
fn single_precision_builder() {
    let p = kopula::single::MarginalSet::from_probs(vec![0.7f32, 0.2, 0.4]).unwrap();
    let d = build_nset_epd(&p, &FrameParams::independent(&p), BoundsPolicy::Check).unwrap();
    let oracle = product_epd(&[0.7, 0.2, 0.4]);
    for (a, b) in d.values().iter().zip(&oracle) {
        assert!((*a as f64 - b).abs() < 1e-6);
    }
}
