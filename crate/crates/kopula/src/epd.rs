//! Event-probability distributions of the first and second kind.

use crate::error::{KopulaError, Result};
use crate::lattice::{EventSetContext, FlipCoords, SubsetIndex};
use crate::mobius::{superset_diff, superset_sum};
use crate::scalar::Scalar;

/// Terrace probabilities p(X//𝔛) for every X ⊆ 𝔛, in mask order.
#[derive(Clone, Debug, PartialEq)]
pub struct Epd1<T> {
    ctx: EventSetContext,
    values: Vec<T>,
    clamped: bool,
}

/// Intersection probabilities p_X for every X ⊆ 𝔛, with p_∅ = 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Epd2<T> {
    ctx: EventSetContext,
    values: Vec<T>,
}

/// Marginal probabilities p̆ = {p_x}.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalSet<T: Scalar> {
    ctx: EventSetContext,
    probs: FlipCoords<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation<T> {
    Length { expected: usize, actual: usize },
    Negative { subset: SubsetIndex, value: T },
    Sum { sum: T },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport<T> {
    pub sum: T,
    pub violations: Vec<Violation<T>>,
}

impl<T> ValidationReport<T> {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_len(ctx: &EventSetContext, len: usize) -> Result<()> {
    if len != ctx.size() {
        return Err(KopulaError::Context(format!(
            "expected {} values for {} events, got {len}",
            ctx.size(),
            ctx.n()
        )));
    }
    Ok(())
}

/// Clamps values in (−tol, 0) to zero; returns the first value below −tol.
pub(crate) fn clamp_small_negatives<T: Scalar>(
    values: &mut [T],
    tol: T,
) -> (bool, Option<(SubsetIndex, T)>) {
    let mut clamped = false;
    for (i, v) in values.iter_mut().enumerate() {
        if *v < T::zero() {
            if *v < -tol {
                return (clamped, Some((SubsetIndex(i as u32), *v)));
            }
            *v = T::zero();
            clamped = true;
        }
    }
    (clamped, None)
}

impl<T: Scalar> Epd1<T> {
    /// Validates with the scalar's default tolerance. Negative values within
    /// tolerance are clamped to zero and flagged.
    pub fn new(ctx: EventSetContext, mut values: Vec<T>) -> Result<Self> {
        check_len(&ctx, values.len())?;
        let tol = T::validation_tol();
        let (clamped, bad) = clamp_small_negatives(&mut values, tol);
        if let Some((s, v)) = bad {
            return Err(KopulaError::Infeasible(format!(
                "negative terrace probability p({}) = {v}",
                ctx.subset_label(s)
            )));
        }
        let sum: T = values.iter().copied().sum();
        if (sum - T::one()).abs() > tol {
            return Err(KopulaError::Infeasible(format!(
                "terrace probabilities sum to {sum}, not 1"
            )));
        }
        Ok(Self { ctx, values, clamped })
    }

    /// Wraps values without validation; see [`validate_epd1`].
    pub fn from_unchecked(ctx: EventSetContext, values: Vec<T>) -> Self {
        Self { ctx, values, clamped: false }
    }

    pub fn point_mass(ctx: EventSetContext, at: SubsetIndex) -> Result<Self> {
        ctx.check_mask(at)?;
        let mut values = vec![T::zero(); ctx.size()];
        values[at.index()] = T::one();
        Ok(Self { ctx, values, clamped: false })
    }

    /// Distribution of independent events with the given marginals.
    pub fn independent(p: &MarginalSet<T>) -> Self {
        let mut values = vec![T::one()];
        for k in 0..p.n() {
            let pk = p.prob(k);
            let q = T::one() - pk;
            let mut next = Vec::with_capacity(values.len() * 2);
            next.extend(values.iter().map(|&v| v * q));
            next.extend(values.iter().map(|&v| v * pk));
            // Bit k is the highest bit so far, so the upper half carries it.
            values = next;
        }
        Self { ctx: p.context().clone(), values, clamped: false }
    }

    pub fn context(&self) -> &EventSetContext {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.ctx.n()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn value(&self, s: SubsetIndex) -> T {
        self.values[s.index()]
    }

    /// Whether construction clamped tiny negative values to zero.
    pub fn clamped(&self) -> bool {
        self.clamped
    }

    pub(crate) fn mark_clamped(mut self, clamped: bool) -> Self {
        self.clamped |= clamped;
        self
    }

    pub fn max_abs_diff(&self, other: &Epd1<T>) -> T {
        max_abs_diff(&self.values, &other.values)
    }
}

pub(crate) fn max_abs_diff<T: Scalar>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).abs())
        .fold(T::zero(), T::max)
}

impl<T: Scalar> Epd2<T> {
    /// Requires p_∅ = 1 exactly and every value in [0, 1] within tolerance.
    pub fn new(ctx: EventSetContext, values: Vec<T>) -> Result<Self> {
        check_len(&ctx, values.len())?;
        if values[0] != T::one() {
            return Err(KopulaError::Argument(format!(
                "second-kind value at the empty set must be 1, got {}",
                values[0]
            )));
        }
        let tol = T::validation_tol();
        if let Some(i) = values
            .iter()
            .position(|&v| !(v >= -tol && v <= T::one() + tol))
        {
            return Err(KopulaError::Argument(format!(
                "second-kind value p_{{{}}} = {} outside [0, 1]",
                ctx.subset_label(SubsetIndex(i as u32)),
                values[i]
            )));
        }
        Ok(Self { ctx, values })
    }

    pub fn context(&self) -> &EventSetContext {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.ctx.n()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, s: SubsetIndex) -> T {
        self.values[s.index()]
    }

    /// X ⊆ Y ⇒ p_X ≥ p_Y − tol, checked on covering pairs.
    pub fn is_superset_monotone(&self, tol: T) -> bool {
        let n = self.n();
        self.ctx.subsets().all(|x| {
            (0..n)
                .filter(|&k| !x.contains(k))
                .all(|k| self.value(x) >= self.value(x.with(k)) - tol)
        })
    }
}

impl<T: Scalar> MarginalSet<T> {
    pub fn new(ctx: EventSetContext, probs: Vec<T>) -> Result<Self> {
        if probs.len() != ctx.n() {
            return Err(KopulaError::Context(format!(
                "expected {} marginals, got {}",
                ctx.n(),
                probs.len()
            )));
        }
        if let Some(k) = probs
            .iter()
            .position(|&p| !(p >= T::zero() && p <= T::one()))
        {
            return Err(KopulaError::Argument(format!(
                "marginal of {} = {} outside [0, 1]",
                ctx.label(k),
                probs[k]
            )));
        }
        Ok(Self { ctx, probs: FlipCoords::new(probs) })
    }

    pub fn from_probs(probs: Vec<T>) -> Result<Self> {
        Self::new(EventSetContext::new(probs.len())?, probs)
    }

    /// Like [`MarginalSet::new`] but also requires every marginal ≤ 1/2.
    pub fn half_rare(ctx: EventSetContext, probs: Vec<T>) -> Result<Self> {
        let m = Self::new(ctx, probs)?;
        if !m.is_half_rare() {
            return Err(KopulaError::Argument("marginals are not all ≤ 1/2".into()));
        }
        Ok(m)
    }

    pub fn context(&self) -> &EventSetContext {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.ctx.n()
    }

    pub fn prob(&self, k: usize) -> T {
        self.probs.get(k)
    }

    pub fn probs(&self) -> Vec<T> {
        self.probs.to_vec()
    }

    pub fn is_half_rare(&self) -> bool {
        (0..self.n()).all(|k| self.prob(k) <= T::half())
    }

    /// Half-rare and nonincreasing up to the roundtrip tolerance.
    pub fn is_ordered_half_rare(&self) -> bool {
        let tol = T::roundtrip_tol();
        self.is_half_rare() && (1..self.n()).all(|k| self.prob(k - 1) >= self.prob(k) - tol)
    }

    pub(crate) fn coords(&self) -> &FlipCoords<T> {
        &self.probs
    }

    pub(crate) fn from_coords(ctx: EventSetContext, probs: FlipCoords<T>) -> Self {
        Self { ctx, probs }
    }
}

/// p_X = Σ_{Y ⊇ X} p(Y).
pub fn epd2_from_epd1<T: Scalar>(d: &Epd1<T>) -> Epd2<T> {
    let mut values = d.values.clone();
    superset_sum(&mut values);
    // Normalization is exact by definition of the second kind.
    values[0] = T::one();
    Epd2 { ctx: d.ctx.clone(), values }
}

/// p(X) = Σ_{Y ⊇ X} (−1)^{|Y|−|X|} p_Y; fails if some p(X) < −tolerance.
pub fn epd1_from_epd2<T: Scalar>(d: &Epd2<T>) -> Result<Epd1<T>> {
    let mut values = d.values.clone();
    superset_diff(&mut values);
    let (clamped, bad) = clamp_small_negatives(&mut values, T::validation_tol());
    if let Some((s, v)) = bad {
        return Err(KopulaError::NotSecondKind {
            subset: d.ctx.subset_label(s),
            mask: s.0,
            value: v.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(Epd1 { ctx: d.ctx.clone(), values, clamped })
}

/// p_x = Σ_{X ∋ x} p(X), read off the second-kind table.
pub fn marginals<T: Scalar>(d: &Epd1<T>) -> MarginalSet<T> {
    let d2 = epd2_from_epd1(d);
    let probs = (0..d.n())
        .map(|k| d2.value(SubsetIndex::singleton(k)).max(T::zero()).min(T::one()))
        .collect();
    MarginalSet { ctx: d.ctx.clone(), probs: FlipCoords::new(probs) }
}

/// Kov_ij = p_ij − p_i p_j.
pub fn covariance_pair<T: Scalar>(d2: &Epd2<T>, i: usize, j: usize) -> Result<T> {
    let n = d2.n();
    if i == j || i >= n || j >= n {
        return Err(KopulaError::Argument(format!(
            "covariance needs two distinct events below {n}, got {i} and {j}"
        )));
    }
    let pi = d2.value(SubsetIndex::singleton(i));
    let pj = d2.value(SubsetIndex::singleton(j));
    let pij = d2.value(SubsetIndex::from_events([i, j]));
    Ok(pij - pi * pj)
}

/// Lists negative terraces (below −tol) and a normalization defect.
pub fn validate_values<T: Scalar>(
    ctx: &EventSetContext,
    values: &[T],
    tol: T,
) -> ValidationReport<T> {
    let mut violations = Vec::new();
    if values.len() != ctx.size() {
        violations.push(Violation::Length { expected: ctx.size(), actual: values.len() });
    }
    for (i, &v) in values.iter().enumerate() {
        if !(v >= -tol) {
            violations.push(Violation::Negative { subset: SubsetIndex(i as u32), value: v });
        }
    }
    let sum: T = values.iter().copied().sum();
    if !((sum - T::one()).abs() <= tol) {
        violations.push(Violation::Sum { sum });
    }
    ValidationReport { sum, violations }
}

pub fn validate_epd1<T: Scalar>(d: &Epd1<T>, tol: T) -> ValidationReport<T> {
    validate_values(&d.ctx, &d.values, tol)
}
