//! Set-phenomena: complementing events outside a kept subset, and the
//! half-rare projection of hypercube points.

use crate::epd::{Epd1, MarginalSet};
use crate::error::{KopulaError, Result};
use crate::lattice::{EventSetContext, FlipCoords, SubsetIndex};
use crate::scalar::Scalar;

/// Events in `keep` stay as they are; all others are complemented.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhenomenonMask {
    pub keep: SubsetIndex,
}

impl PhenomenonMask {
    pub fn new(keep: SubsetIndex) -> Self {
        Self { keep }
    }

    pub fn identity(ctx: &EventSetContext) -> Self {
        Self { keep: ctx.full() }
    }
}

/// A point w̆ of the unit hypercube [0,1]^N.
#[derive(Clone, Debug, PartialEq)]
pub struct HypercubePoint<T: Scalar> {
    ctx: EventSetContext,
    coords: FlipCoords<T>,
}

impl<T: Scalar> HypercubePoint<T> {
    pub fn new(ctx: EventSetContext, coords: Vec<T>) -> Result<Self> {
        if coords.len() != ctx.n() {
            return Err(KopulaError::Context(format!(
                "expected {} coordinates, got {}",
                ctx.n(),
                coords.len()
            )));
        }
        if coords.iter().any(|&w| !(w >= T::zero() && w <= T::one())) {
            return Err(KopulaError::Argument("hypercube coordinate outside [0, 1]".into()));
        }
        Ok(Self { ctx, coords: FlipCoords::new(coords) })
    }

    pub fn from_coords(coords: Vec<T>) -> Result<Self> {
        Self::new(EventSetContext::new(coords.len())?, coords)
    }

    pub fn context(&self) -> &EventSetContext {
        &self.ctx
    }

    pub fn coord(&self, k: usize) -> T {
        self.coords.get(k)
    }

    pub fn coords(&self) -> Vec<T> {
        self.coords.to_vec()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HalfRareProjection<T: Scalar> {
    /// min(w_k, 1 − w_k) per coordinate.
    pub projected: HypercubePoint<T>,
    /// Events with w_k ≤ 1/2.
    pub terrace: SubsetIndex,
    /// Events by nonincreasing projected coordinate, ties by index.
    pub permutation: Vec<usize>,
}

/// w_k if k ∈ keep, else 1 − w_k.
pub fn phenomenon_point<T: Scalar>(w: &HypercubePoint<T>, ph: PhenomenonMask) -> HypercubePoint<T> {
    HypercubePoint { ctx: w.ctx.clone(), coords: w.coords.phenomenon(ph.keep) }
}

pub fn phenomenon_marginals<T: Scalar>(p: &MarginalSet<T>, ph: PhenomenonMask) -> MarginalSet<T> {
    MarginalSet::from_coords(p.context().clone(), p.coords().phenomenon(ph.keep))
}

/// Raw half-rare projection: projected coordinates and the terrace mask.
pub fn half_rare_coords<T: Scalar>(w: &[T]) -> (Vec<T>, SubsetIndex) {
    let mut terrace = SubsetIndex::EMPTY;
    let projected = w
        .iter()
        .enumerate()
        .map(|(k, &wk)| {
            if wk <= T::half() {
                terrace = terrace.with(k);
                wk
            } else {
                T::one() - wk
            }
        })
        .collect();
    (projected, terrace)
}

/// Indices sorted by nonincreasing value; the sort is stable. Values are
/// compared after rounding to the roundtrip tolerance, so 1 − 0.9 and 0.1
/// count as tied.
pub fn ordering_permutation<T: Scalar>(values: &[T]) -> Vec<usize> {
    let keys: Vec<T> = values.iter().map(|&v| (v / T::roundtrip_tol()).round()).collect();
    let mut perm: Vec<usize> = (0..values.len()).collect();
    perm.sort_by(|&a, &b| keys[b].partial_cmp(&keys[a]).unwrap_or(std::cmp::Ordering::Equal));
    perm
}

pub fn half_rare_projection<T: Scalar>(w: &HypercubePoint<T>) -> HalfRareProjection<T> {
    let (projected, terrace) = half_rare_coords(&w.coords());
    let permutation = ordering_permutation(&projected);
    HalfRareProjection {
        projected: HypercubePoint { ctx: w.ctx.clone(), coords: FlipCoords::new(projected) },
        terrace,
        permutation,
    }
}

/// Index remap of a terrace table: `out[T] = values[(S Δ T)^c]`.
pub fn renumber_table<V: Copy>(values: &[V], n: usize, keep: SubsetIndex) -> Vec<V> {
    assert_eq!(values.len(), 1 << n);
    (0..values.len() as u32)
        .map(|t| values[keep.sym_diff(SubsetIndex(t)).complement(n).index()])
        .collect()
}

/// Distribution of the set-phenomenon: terrace T of the result is terrace
/// (S Δ T)^c of the input.
pub fn renumber_epd1<T: Scalar>(d: &Epd1<T>, ph: PhenomenonMask) -> Epd1<T> {
    let values = renumber_table(d.values(), d.n(), ph.keep);
    Epd1::from_unchecked(d.context().clone(), values).mark_clamped(d.clamped())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_half_is_half_rare() {
        let (p, t) = half_rare_coords(&[0.5, 0.5000001]);
        assert_eq!(t, SubsetIndex(0b01));
        assert_eq!(p[0], 0.5);
    }

    #[test]
    fn stable_permutation() {
        assert_eq!(ordering_permutation(&[0.1, 0.2, 0.1]), vec![1, 0, 2]);
    }
}
