//! Kopulas: 1-functions on the unit hypercube and the shipped families.
//!
//! A Kopula is evaluated as a whole terrace table: for a point w̆ it returns
//! K(w̆^{(c|X)}) for every X ⊆ 𝔛, indexed by mask.

use std::sync::Arc;

use rayon::prelude::*;

use crate::epd::{clamp_small_negatives, Epd1, MarginalSet};
use crate::error::{KopulaError, Result};
use crate::lattice::{EventSetContext, SubsetIndex};
use crate::phenomena::{half_rare_coords, renumber_table};
use crate::scalar::Scalar;

pub trait Kopula<T: Scalar>: Send + Sync {
    fn n_events(&self) -> usize;

    fn name(&self) -> String;

    /// Terrace table K(w̆^{(c|X)}) for all X. Values are not clamped; an
    /// infeasible family shows up as negative entries.
    fn table(&self, w: &[T]) -> Vec<T>;

    fn value(&self, w: &[T], x: SubsetIndex) -> T {
        self.table(w)[x.index()]
    }
}

pub type KopulaFamily<T> = Arc<dyn Kopula<T>>;

/// w_xy(a, b): the probability of the double intersection of two events.
pub type PairParamFn<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;

/// α(w̆) ∈ [−1, 1].
pub type WeightFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;

fn check_point<T: Scalar>(k: &dyn Kopula<T>, w: &[T]) {
    assert_eq!(w.len(), k.n_events(), "point dimension does not match {}", k.name());
}

/// Π_{x∈X} w_x · Π_{x∉X} (1 − w_x).
pub struct Independent {
    n: usize,
}

impl<T: Scalar> Kopula<T> for Independent {
    fn n_events(&self) -> usize {
        self.n
    }

    fn name(&self) -> String {
        format!("independent-{}", self.n)
    }

    fn table(&self, w: &[T]) -> Vec<T> {
        check_point(self, w);
        let mut values = vec![T::one()];
        for &wk in w {
            let q = T::one() - wk;
            let mut next = Vec::with_capacity(values.len() * 2);
            next.extend(values.iter().map(|&v| v * q));
            next.extend(values.iter().map(|&v| v * wk));
            values = next;
        }
        values
    }
}

pub fn independent_kopula<T: Scalar>(ctx: &EventSetContext) -> KopulaFamily<T> {
    Arc::new(Independent { n: ctx.n() })
}

/// A 2-Kopula driven by a pair parameter function.
///
/// The point is projected onto its half-rare form (a, b) with terrace T, the
/// half-rare table (1 − a − b + f, a − f, b − f, f) with f = w_xy(a, b) is
/// formed, and the result is that table renumbered by T. Off the seam
/// w_k = 1/2 this is the four-branch terrace formula; on the seam it keeps
/// the marginal equalities exact.
pub struct Parametric2<T> {
    name: String,
    f: PairParamFn<T>,
}

impl<T: Scalar> Kopula<T> for Parametric2<T> {
    fn n_events(&self) -> usize {
        2
    }

    fn name(&self) -> String {
        self.name.clone()
    }

    fn table(&self, w: &[T]) -> Vec<T> {
        check_point(self, w);
        let (h, terrace) = half_rare_coords(w);
        let (a, b) = (h[0], h[1]);
        let f = (self.f)(a, b);
        let q = [T::one() - (a + b) + f, a - f, b - f, f];
        renumber_table(&q, 2, terrace)
    }
}

pub fn parametric_2kopula<T: Scalar>(name: &str, f: PairParamFn<T>) -> KopulaFamily<T> {
    Arc::new(Parametric2 { name: name.to_string(), f })
}

pub fn frechet_upper<T: Scalar>(a: T, b: T) -> T {
    a.min(b)
}

pub fn frechet_lower<T: Scalar>(a: T, b: T) -> T {
    (a + b - T::one()).max(T::zero())
}

pub fn frechet_upper_2<T: Scalar>() -> KopulaFamily<T> {
    parametric_2kopula("upper", Arc::new(frechet_upper))
}

pub fn frechet_lower_2<T: Scalar>() -> KopulaFamily<T> {
    parametric_2kopula("lower", Arc::new(frechet_lower))
}

/// w_xy = (1 − α)/2 · w⁻ + (1 + α)/2 · w⁺, with α taken at the half-rare point.
pub fn convex_updown_2kopula<T: Scalar>(alpha: WeightFn<T>) -> KopulaFamily<T> {
    let f = move |a: T, b: T| {
        let al = alpha(&[a, b]);
        let two = T::lit(2.0);
        (T::one() - al) / two * frechet_lower(a, b) + (T::one() + al) / two * frechet_upper(a, b)
    };
    parametric_2kopula("convex-updown", Arc::new(f))
}

/// w_xy = w⁺·max·(1 + α) for α ≤ 0 and w⁺·(max·(1 − α) + α) for α > 0.
pub fn conjugated_2kopula<T: Scalar>(alpha: WeightFn<T>) -> KopulaFamily<T> {
    let f = move |a: T, b: T| {
        let al = alpha(&[a, b]);
        let (lo, hi) = (a.min(b), a.max(b));
        if al <= T::zero() {
            lo * (hi * (T::one() + al))
        } else {
            lo * (hi * (T::one() - al) + al)
        }
    };
    parametric_2kopula("conjugated", Arc::new(f))
}

/// α(w̆) = sin(15(w_x − w_y)).
pub fn alpha_sin15<T: Scalar>() -> WeightFn<T> {
    Arc::new(|w: &[T]| (T::lit(15.0) * (w[0] - w[1])).sin())
}

pub fn alpha_const<T: Scalar>(a: T) -> WeightFn<T> {
    Arc::new(move |_: &[T]| a)
}

/// w_xy = w_x w_y / 2.
pub fn half_independent_2kopula<T: Scalar>() -> KopulaFamily<T> {
    parametric_2kopula("half-independent", Arc::new(|a: T, b: T| a * b / T::lit(2.0)))
}

/// w_xy = min(w_x, w_y) / 2.
pub fn half_embedded_2kopula<T: Scalar>() -> KopulaFamily<T> {
    parametric_2kopula("half-embedded", Arc::new(|a: T, b: T| a.min(b) / T::lit(2.0)))
}

fn arbitrary_embedded<T: Scalar>(a: T, b: T) -> T {
    a.min(b) * (T::one() + (T::lit(15.0) * (a - b)).sin()) / T::lit(2.0)
}

/// w_xy = min(w_x, w_y)(1 + sin(15(w_x − w_y)))/2.
pub fn arbitrary_embedded_2kopula<T: Scalar>() -> KopulaFamily<T> {
    parametric_2kopula("arbitrary-embedded", Arc::new(arbitrary_embedded))
}

/// w_xy = w_x w_y + (α − w_x w_y)·β with α the arbitrary-embedded parameter
/// and β = ((1/2 − w_x)(1/2 − w_y))^{1/4}.
pub fn continuous_arbitrary_embedded_2kopula<T: Scalar>() -> KopulaFamily<T> {
    let f = |a: T, b: T| {
        let beta = ((T::half() - a) * (T::half() - b)).max(T::zero()).powf(T::lit(0.25));
        a * b + (arbitrary_embedded(a, b) - a * b) * beta
    };
    parametric_2kopula("continuous-arbitrary-embedded", Arc::new(f))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassicalFamily {
    AliMikhailHaq,
    Clayton,
    Frank,
    Gumbel,
    Joe,
}

impl ClassicalFamily {
    pub fn name(self) -> &'static str {
        match self {
            Self::AliMikhailHaq => "amh",
            Self::Clayton => "clayton",
            Self::Frank => "frank",
            Self::Gumbel => "gumbel",
            Self::Joe => "joe",
        }
    }

    pub fn theta_in_range(self, theta: f64) -> bool {
        if !theta.is_finite() {
            return false;
        }
        match self {
            Self::AliMikhailHaq => (-1.0..1.0).contains(&theta),
            Self::Clayton => theta >= -1.0 && theta != 0.0,
            Self::Frank => theta != 0.0,
            Self::Gumbel | Self::Joe => theta >= 1.0,
        }
    }
}

/// Closed-form w_xy of a classical copula family.
///
/// Gumbel and Joe use the continuity conventions w_xy = 0 when either
/// argument is 0 and w_xy = min(a, b) when either argument is 1.
pub fn classical_pair_param<T: Scalar>(family: ClassicalFamily, theta: T) -> Result<PairParamFn<T>> {
    let th = theta.to_f64().unwrap_or(f64::NAN);
    if !family.theta_in_range(th) {
        return Err(KopulaError::Argument(format!(
            "theta = {th} outside the parameter range of {}",
            family.name()
        )));
    }
    let one = T::one();
    let f: PairParamFn<T> = match family {
        ClassicalFamily::AliMikhailHaq => {
            Arc::new(move |a: T, b: T| a * b / (one - theta * ((one - a) * (one - b))))
        }
        ClassicalFamily::Clayton => Arc::new(move |a: T, b: T| {
            let s = a.powf(-theta) + b.powf(-theta) - one;
            if s > T::zero() {
                s.powf(-one / theta)
            } else {
                T::zero()
            }
        }),
        ClassicalFamily::Frank => Arc::new(move |a: T, b: T| {
            let num = (-theta * a).exp_m1() * (-theta * b).exp_m1();
            -(num / (-theta).exp_m1()).ln_1p() / theta
        }),
        ClassicalFamily::Gumbel => Arc::new(move |a: T, b: T| {
            if a <= T::zero() || b <= T::zero() {
                T::zero()
            } else if a >= one || b >= one {
                a.min(b)
            } else {
                let s = (-a.ln()).powf(theta) + (-b.ln()).powf(theta);
                (-s.powf(one / theta)).exp()
            }
        }),
        ClassicalFamily::Joe => Arc::new(move |a: T, b: T| {
            if a <= T::zero() || b <= T::zero() {
                T::zero()
            } else if a >= one || b >= one {
                a.min(b)
            } else {
                let u = (one - a).powf(theta);
                let v = (one - b).powf(theta);
                one - (u + v - u * v).powf(one / theta)
            }
        }),
    };
    Ok(f)
}

pub fn classical_2kopula<T: Scalar>(family: ClassicalFamily, theta: T) -> Result<KopulaFamily<T>> {
    let f = classical_pair_param(family, theta)?;
    Ok(parametric_2kopula(&format!("{}({theta})", family.name()), f))
}

/// Table entry X is ψ evaluated at the phenomenon point w̆^{(c|X)}.
///
/// This is how an arbitrary function on the hypercube is tested for the
/// 1-function property.
pub struct Pointwise<T> {
    name: String,
    n: usize,
    psi: Arc<dyn Fn(&[T]) -> T + Send + Sync>,
}

impl<T: Scalar> Kopula<T> for Pointwise<T> {
    fn n_events(&self) -> usize {
        self.n
    }

    fn name(&self) -> String {
        self.name.clone()
    }

    fn table(&self, w: &[T]) -> Vec<T> {
        check_point(self, w);
        let full = SubsetIndex::full(self.n);
        let mut arg = w.to_vec();
        (0..1u32 << self.n)
            .map(|x| {
                let keep = SubsetIndex(x);
                for (k, a) in arg.iter_mut().enumerate() {
                    *a = if keep.contains(k) { w[k] } else { T::one() - w[k] };
                }
                debug_assert!(keep.is_subset_of(full));
                (self.psi)(&arg)
            })
            .collect()
    }
}

pub fn pointwise_kopula<T: Scalar>(
    name: &str,
    n: usize,
    psi: Arc<dyn Fn(&[T]) -> T + Send + Sync>,
) -> KopulaFamily<T> {
    Arc::new(Pointwise { name: name.to_string(), n, psi })
}

/// ψ(w_x, w_y) = (w_x + w_y)/4: normalized, but not a 1-function.
pub fn quarter_sum<T: Scalar>() -> KopulaFamily<T> {
    pointwise_kopula("quarter-sum", 2, Arc::new(|w: &[T]| (w[0] + w[1]) / T::lit(4.0)))
}

pub struct Convex<T> {
    parts: Vec<KopulaFamily<T>>,
    weights: Vec<T>,
}

impl<T: Scalar> Kopula<T> for Convex<T> {
    fn n_events(&self) -> usize {
        self.parts[0].n_events()
    }

    fn name(&self) -> String {
        let parts: Vec<String> = self
            .parts
            .iter()
            .zip(&self.weights)
            .map(|(k, w)| format!("{w}*{}", k.name()))
            .collect();
        format!("convex({})", parts.join(" + "))
    }

    fn table(&self, w: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); 1 << self.n_events()];
        for (k, &c) in self.parts.iter().zip(&self.weights) {
            for (o, v) in out.iter_mut().zip(k.table(w)) {
                *o = *o + c * v;
            }
        }
        out
    }
}

pub fn convex_combination<T: Scalar>(
    parts: Vec<KopulaFamily<T>>,
    weights: Vec<T>,
) -> Result<KopulaFamily<T>> {
    if parts.is_empty() || parts.len() != weights.len() {
        return Err(KopulaError::Argument(
            "convex combination needs one weight per part and at least one part".into(),
        ));
    }
    let n = parts[0].n_events();
    if parts.iter().any(|k| k.n_events() != n) {
        return Err(KopulaError::Context("convex combination of Kopulas of different sizes".into()));
    }
    if weights.iter().any(|&w| !(w >= T::zero())) {
        return Err(KopulaError::Argument("convex weights must be nonnegative".into()));
    }
    let sum: T = weights.iter().copied().sum();
    if (sum - T::one()).abs() > T::lit(1e-12) {
        return Err(KopulaError::Argument(format!("convex weights sum to {sum}, not 1")));
    }
    Ok(Arc::new(Convex { parts, weights }))
}

/// Characterization: p(X//𝔛) = K(p̆^{(c|X)}).
pub fn epd_from_kopula<T: Scalar>(k: &dyn Kopula<T>, p: &MarginalSet<T>) -> Result<Epd1<T>> {
    if p.n() != k.n_events() {
        return Err(KopulaError::Context(format!(
            "{} events in marginals, {} in Kopula {}",
            p.n(),
            k.n_events(),
            k.name()
        )));
    }
    let mut values = k.table(&p.probs());
    let (clamped, bad) = clamp_small_negatives(&mut values, T::validation_tol());
    if let Some((s, v)) = bad {
        return Err(KopulaError::Infeasible(format!(
            "Kopula {} is negative at X = {}: {v}",
            k.name(),
            p.context().subset_label(s)
        )));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(KopulaError::Infeasible(format!(
            "Kopula {} is not finite at X = {}",
            k.name(),
            p.context().subset_label(SubsetIndex(i as u32))
        )));
    }
    Ok(Epd1::new(p.context().clone(), values)?.mark_clamped(clamped))
}

/// |Σ_{X ∋ x} table[X] − w_x| for each event x.
pub fn marginal_residuals<T: Scalar>(table: &[T], w: &[T]) -> Vec<T> {
    let mut sums = vec![T::zero(); w.len()];
    for (x, &v) in table.iter().enumerate() {
        for (k, s) in sums.iter_mut().enumerate() {
            if x >> k & 1 == 1 {
                *s = *s + v;
            }
        }
    }
    sums.iter().zip(w).map(|(&s, &wk)| (s - wk).abs()).collect()
}

/// A grid point with the worst value of one check.
#[derive(Clone, Debug, PartialEq)]
pub struct Offender<T> {
    pub residual: T,
    pub point: Vec<T>,
    /// Subset mask (nonnegativity) or event index (marginals); unused otherwise.
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport<T> {
    pub points: usize,
    pub tol: T,
    /// Most negative terrace value (residual = −min when negative, else 0).
    pub negativity: Offender<T>,
    pub marginal: Offender<T>,
    pub normalization: Offender<T>,
}

impl<T: Scalar> VerifyReport<T> {
    pub fn nonnegative(&self) -> bool {
        self.negativity.residual <= self.tol
    }

    pub fn marginals_hold(&self) -> bool {
        self.marginal.residual <= self.tol
    }

    pub fn normalized(&self) -> bool {
        self.normalization.residual <= self.tol
    }

    pub fn is_clean(&self) -> bool {
        self.nonnegative() && self.marginals_hold() && self.normalized()
    }
}

fn worse<T: Scalar>(a: Offender<T>, b: Offender<T>) -> Offender<T> {
    // NaN residuals always win so they cannot hide.
    if b.residual.is_nan() || b.residual > a.residual {
        b
    } else {
        a
    }
}

/// Grid coordinate i of a resolution-r axis: i/(r − 1).
pub fn grid_coordinate<T: Scalar>(i: usize, resolution: usize) -> T {
    T::lit(i as f64 / (resolution - 1) as f64)
}

/// Checks nonnegativity, the x-marginal equalities and normalization of a
/// Kopula on the grid {0, 1/(r−1), …, 1}^N, including every phenomenon image
/// of each grid point (they are part of the terrace table).
pub fn verify_one_function<T: Scalar>(
    k: &dyn Kopula<T>,
    grid_resolution: usize,
    tol: T,
) -> Result<VerifyReport<T>> {
    if grid_resolution < 2 {
        return Err(KopulaError::Argument("grid resolution must be at least 2".into()));
    }
    let n = k.n_events();
    let points = grid_resolution
        .checked_pow(n as u32)
        .ok_or_else(|| KopulaError::Argument("grid too large".into()))?;
    let zero = || Offender { residual: T::zero(), point: Vec::new(), index: 0 };
    let (neg, marg, norm) = (0..points)
        .into_par_iter()
        .map(|idx| {
            let mut rest = idx;
            let w: Vec<T> = (0..n)
                .map(|_| {
                    let i = rest % grid_resolution;
                    rest /= grid_resolution;
                    grid_coordinate(i, grid_resolution)
                })
                .collect();
            let table = k.table(&w);
            let (imin, vmin) = table
                .iter()
                .copied()
                .enumerate()
                .fold((0, T::infinity()), |acc, (i, v)| if v < acc.1 || v.is_nan() { (i, v) } else { acc });
            let neg = Offender { residual: (-vmin).max(T::zero()), point: w.clone(), index: imin };
            let neg = if vmin.is_nan() { Offender { residual: T::nan(), ..neg } } else { neg };
            let res = marginal_residuals(&table, &w);
            let (ek, rk) = res
                .iter()
                .copied()
                .enumerate()
                .fold((0, T::zero()), |acc, (i, r)| if r > acc.1 || r.is_nan() { (i, r) } else { acc });
            let marg = Offender { residual: rk, point: w.clone(), index: ek };
            let sum: T = table.iter().copied().sum();
            let norm = Offender { residual: (sum - T::one()).abs(), point: w, index: 0 };
            (neg, marg, norm)
        })
        .reduce(
            || (zero(), zero(), zero()),
            |a, b| (worse(a.0, b.0), worse(a.1, b.1), worse(a.2, b.2)),
        );
    Ok(VerifyReport { points, tol, negativity: neg, marginal: marg, normalization: norm })
}
