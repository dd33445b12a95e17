//! Cross-checks of the fast kernels against direct reference evaluations on
//! random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::epd::{epd1_from_epd2, epd2_from_epd1, marginals, max_abs_diff, Epd1, MarginalSet};
use crate::error::{KopulaError, Result};
use crate::families::independent_kopula;
use crate::frame::{build_nset_epd, quadruplet_epd, triplet_epd, BoundsPolicy, FrameParams};
use crate::lattice::{EventSetContext, SubsetIndex};
use crate::mobius::{superset_diff_naive, superset_sum_naive};
use crate::phenomena::{renumber_epd1, PhenomenonMask};

/// Discrepancy above which the oracle reports a mismatch.
pub const ORACLE_TOL: f64 = 1e-10;

pub const MAX_ORACLE_EVENTS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleCheck {
    pub name: String,
    pub trials: usize,
    pub max_diff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub n: usize,
    pub seed: u64,
    pub checks: Vec<OracleCheck>,
}

impl OracleReport {
    pub fn max_diff(&self) -> f64 {
        self.checks.iter().map(|c| c.max_diff).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.max_diff <= ORACLE_TOL)
    }
}

/// A random first-kind distribution with exponential weights.
pub fn random_epd<R: Rng>(rng: &mut R, ctx: &EventSetContext) -> Epd1<f64> {
    let w: Vec<f64> = (0..ctx.size()).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    Epd1::from_unchecked(ctx.clone(), w.iter().map(|v| v / s).collect())
}

/// A random distribution whose marginals are half-rare and nonincreasing.
fn random_ordered_half_rare<R: Rng>(rng: &mut R, n: usize) -> Result<Epd1<f64>> {
    let ctx = EventSetContext::new(n)?;
    loop {
        let d = random_epd(rng, &ctx);
        let p = marginals(&d).probs();
        let (h, terrace) = crate::phenomena::half_rare_coords(&p);
        let q = renumber_epd1(&d, PhenomenonMask::new(terrace));
        let perm = crate::phenomena::ordering_permutation(&h);
        let mut values = vec![0.0; ctx.size()];
        for x in ctx.subsets() {
            let orig = SubsetIndex::from_events(x.events().map(|i| perm[i]));
            values[x.index()] = q.value(orig);
        }
        let ordered = Epd1::from_unchecked(ctx.clone(), values);
        if marginals(&ordered).is_ordered_half_rare() {
            return Ok(ordered);
        }
    }
}

/// Runs every check `trials` times on `n`-event instances.
pub fn run_oracle(n: usize, trials: usize, seed: u64) -> Result<OracleReport> {
    if n == 0 || n > MAX_ORACLE_EVENTS {
        return Err(KopulaError::Argument(format!(
            "oracle runs on 1..={MAX_ORACLE_EVENTS} events, got {n}"
        )));
    }
    let ctx = EventSetContext::new(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let mut record = |name: &str, diff: f64| match checks.iter_mut().find(|c: &&mut OracleCheck| c.name == name) {
        Some(c) => {
            c.trials += 1;
            c.max_diff = c.max_diff.max(diff);
        }
        None => checks.push(OracleCheck { name: name.into(), trials: 1, max_diff: diff }),
    };
    for _ in 0..trials {
        let d = random_epd(&mut rng, &ctx);
        let d2 = epd2_from_epd1(&d);
        let naive2 = superset_sum_naive(d.values());
        // The fast transform pins the empty-set entry to exactly 1.
        record("mobius forward: fast vs naive", max_abs_diff(&d2.values()[1..], &naive2[1..]));
        record("mobius inverse: fast vs naive", {
            let back = epd1_from_epd2(&d2)?;
            max_abs_diff(back.values(), &superset_diff_naive(d2.values()))
        });
        record("marginals: transform vs direct sum", {
            let m = marginals(&d).probs();
            let direct: Vec<f64> = (0..n)
                .map(|k| ctx.subsets().filter(|x| x.contains(k)).map(|x| d.value(x)).sum())
                .collect();
            max_abs_diff(&m, &direct)
        });
        record("independent Kopula vs product enumeration", {
            let w: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
            let table = independent_kopula::<f64>(&ctx).table(&w);
            let direct: Vec<f64> = ctx
                .subsets()
                .map(|x| (0..n).map(|k| if x.contains(k) { w[k] } else { 1.0 - w[k] }).product())
                .collect();
            max_abs_diff(&table, &direct)
        });
        record("renumber involution", {
            let keep = SubsetIndex(rng.gen_range(0..ctx.size() as u32));
            let ph = PhenomenonMask::new(keep);
            let twice = renumber_epd1(&renumber_epd1(&d, ph), ph);
            if twice.values() == d.values() { 0.0 } else { f64::INFINITY }
        });
        record("frame recursion vs Möbius inversion", {
            let q = random_ordered_half_rare(&mut rng, n)?;
            let (p, params) = FrameParams::from_epd(&q)?;
            let built = build_nset_epd(&p, &params, BoundsPolicy::Check)?;
            max_abs_diff(built.values(), q.values())
        });
        for (k, name) in [(3, "triplet closed form vs frame recursion"), (4, "quadruplet closed form vs frame recursion")] {
            let q = random_ordered_half_rare(&mut rng, k)?;
            let (p, params) = FrameParams::from_epd(&q)?;
            let p = MarginalSet::new(p.context().clone(), p.probs())?;
            let closed = if k == 3 {
                triplet_epd(&p, &params.to_triplet()?)?
            } else {
                quadruplet_epd(&p, &params.to_quadruplet()?)?
            };
            let recursive = build_nset_epd(&p, &params, BoundsPolicy::Check)?;
            record(name, max_abs_diff(closed.values(), recursive.values()));
        }
    }
    Ok(OracleReport { n, seed, checks })
}
