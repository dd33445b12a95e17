//! Fréchet covariances and correlations, and the parametrization of frame
//! parameters by correlation values in [−1, 1].

use crate::epd::MarginalSet;
use crate::error::{KopulaError, Result};
use crate::families::Kopula;
use crate::frame::{triplet_epd, FrechetInterval, TripletParams};
use crate::lattice::{EventSetContext, SubsetIndex};
use crate::phenomena::{half_rare_coords, ordering_permutation, renumber_table};
use crate::scalar::Scalar;

/// A Fréchet correlation in [−1, 1].
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct KorValue<T>(T);

impl<T: Scalar> KorValue<T> {
    pub fn new(v: T) -> Result<Self> {
        if !(v.abs() <= T::one()) {
            return Err(KopulaError::Argument(format!("correlation {v} outside [-1, 1]")));
        }
        Ok(Self(v))
    }

    pub fn zero() -> Self {
        Self(T::zero())
    }

    pub fn value(self) -> T {
        self.0
    }
}

/// Signed distances from a baseline to the lower and upper Fréchet bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KovBounds<T> {
    pub kov_minus: T,
    pub kov_plus: T,
}

impl<T: Scalar> KovBounds<T> {
    fn around(baseline: T, iv: FrechetInterval<T>) -> Self {
        Self { kov_minus: iv.lower - baseline, kov_plus: iv.upper - baseline }
    }

    /// Covariance reached by a correlation value.
    pub fn kov_of(&self, kor: KorValue<T>) -> T {
        let k = kor.value();
        if k >= T::zero() {
            k * self.kov_plus
        } else {
            -k * self.kov_minus
        }
    }

    /// Correlation of a covariance; zero-width sides give 0 for zero
    /// covariance and an error otherwise.
    pub fn kor_of(&self, kov: T) -> Result<T> {
        let tol = T::lit(1e-15);
        if kov.abs() <= tol {
            return Ok(T::zero());
        }
        let scale = if kov < T::zero() { self.kov_minus.abs() } else { self.kov_plus };
        if scale <= T::zero() {
            return Err(KopulaError::UndefinedCorrelation(format!(
                "covariance {kov} against a zero-width Fréchet side"
            )));
        }
        Ok((kov / scale).max(-T::one()).min(T::one()))
    }
}

/// [max(0, p_x + p_y − 1), min(p_x, p_y)].
pub fn pair_interval<T: Scalar>(px: T, py: T) -> FrechetInterval<T> {
    FrechetInterval { lower: (px + py - T::one()).max(T::zero()), upper: px.min(py) }
}

/// Kov⁻ and Kov⁺ of a pair of events.
pub fn kov2_bounds<T: Scalar>(px: T, py: T) -> KovBounds<T> {
    KovBounds::around(px * py, pair_interval(px, py))
}

/// Kor_xy = Kov/|Kov⁻| for negative covariance, Kov/Kov⁺ otherwise.
pub fn kor2<T: Scalar>(px: T, py: T, pxy: T) -> Result<KorValue<T>> {
    let iv = pair_interval(px, py);
    if !iv.contains(pxy, T::validation_tol()) {
        return Err(KopulaError::Argument(format!(
            "p_xy = {pxy} outside its Fréchet interval [{}, {}]",
            iv.lower, iv.upper
        )));
    }
    let k = kov2_bounds(px, py).kor_of(pxy - px * py)?;
    Ok(KorValue(k))
}

/// Inverse of [`kor2`]: p_x p_y + Kor·Kov⁺ for Kor ≥ 0, p_x p_y + Kor·|Kov⁻|
/// otherwise.
pub fn pxy_from_kor2<T: Scalar>(px: T, py: T, kor: KorValue<T>) -> T {
    let b = px * py;
    let v = b + kov2_bounds(px, py).kov_of(kor);
    pair_interval(px, py).clamp(v)
}

/// Which inserted pair of a triplet a covariance refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InsertMode {
    /// p_{s't'}, inside the frame event x; baseline p_x p_y p_z.
    Frame,
    /// p_{s''t''}, outside the frame event; baseline (1 − p_x) p_y p_z.
    Complement,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Modification {
    /// Covariance from the independence baseline; degenerate when the
    /// baseline is outside the Fréchet interval.
    #[default]
    First,
    /// Baseline moved inside the interval by the reflection formula.
    Second,
}

fn triplet_parts<T: Scalar>(p: &MarginalSet<T>) -> Result<(T, T, T)> {
    if p.n() != 3 || !p.is_ordered_half_rare() {
        return Err(KopulaError::Argument(
            "triplet marginals must be half-rare and nonincreasing".into(),
        ));
    }
    Ok((p.prob(0), p.prob(1), p.prob(2)))
}

/// Fréchet interval of p_{s't'} or p_{s''t''} given p_{s'} and p_{t'}.
pub fn inserted_triple_interval<T: Scalar>(
    mode: InsertMode,
    p: &MarginalSet<T>,
    s1: T,
    t1: T,
) -> Result<FrechetInterval<T>> {
    let (px, py, pz) = triplet_parts(p)?;
    let zero = T::zero();
    Ok(match mode {
        InsertMode::Frame => FrechetInterval { lower: (s1 + t1 - px).max(zero), upper: s1.min(t1) },
        InsertMode::Complement => FrechetInterval {
            lower: (px + py + pz - T::one() - s1 - t1).max(zero),
            upper: (py - s1).min(pz - t1),
        },
    })
}

fn raw_baseline<T: Scalar>(mode: InsertMode, px: T, py: T, pz: T) -> T {
    match mode {
        InsertMode::Frame => px * py * pz,
        InsertMode::Complement => (T::one() - px) * py * pz,
    }
}

/// First modification: Kov is measured from the raw baseline p⋆. Inside
/// the interval the bounds are p∓ − p⋆; outside it both bounds equal the
/// nearer endpoint minus p⋆, so every correlation lands on that endpoint.
fn first_modification<T: Scalar>(raw: T, iv: FrechetInterval<T>) -> (T, KovBounds<T>) {
    let edge = if raw < iv.lower {
        iv.lower
    } else if raw > iv.upper {
        iv.upper
    } else {
        return (raw, KovBounds::around(raw, iv));
    };
    let d = edge - raw;
    (raw, KovBounds { kov_minus: d, kov_plus: d })
}

/// Second modification: an outside baseline is replaced by
/// p₀ = p⁻ + (p⁻ − p⋆)(p⁺ − p⁻)/(p⁺ + p⁻ − 2p⋆), which lies inside the
/// interval. Near a vanishing denominator the first modification is used.
fn second_modification<T: Scalar>(raw: T, iv: FrechetInterval<T>) -> (T, KovBounds<T>) {
    if raw >= iv.lower && raw <= iv.upper {
        return (raw, KovBounds::around(raw, iv));
    }
    let den = iv.upper + iv.lower - T::lit(2.0) * raw;
    if den.abs() <= T::lit(1e-9) {
        return first_modification(raw, iv);
    }
    let p0 = iv.clamp(iv.lower + (iv.lower - raw) * iv.width() / den);
    (p0, KovBounds::around(p0, iv))
}

/// Baseline and Kov bounds of an inserted triple intersection.
///
/// The returned baseline is the reference point of the covariance: p⋆ in
/// the first modification, p₀ in the second. In the first modification a
/// baseline outside the Fréchet interval makes both bounds equal, so the
/// correlation degenerates and every value maps to the nearer endpoint.
pub fn inserted_triple_kov_bounds_with<T: Scalar>(
    mode: InsertMode,
    modification: Modification,
    p: &MarginalSet<T>,
    s1: T,
    t1: T,
) -> Result<(T, KovBounds<T>)> {
    let (px, py, pz) = triplet_parts(p)?;
    let tol = T::validation_tol();
    if !(s1 >= -tol && s1 <= py + tol && t1 >= -tol && t1 <= pz + tol) {
        return Err(KopulaError::Argument(format!(
            "p_s' = {s1} or p_t' = {t1} outside [0, p_y] x [0, p_z]"
        )));
    }
    let iv = inserted_triple_interval(mode, p, s1, t1)?;
    let raw = raw_baseline(mode, px, py, pz);
    Ok(match modification {
        Modification::First => first_modification(raw, iv),
        Modification::Second => second_modification(raw, iv),
    })
}

/// First-modification baseline and Kov bounds.
pub fn inserted_triple_kov_bounds<T: Scalar>(
    mode: InsertMode,
    p: &MarginalSet<T>,
    s1: T,
    t1: T,
) -> Result<(T, KovBounds<T>)> {
    inserted_triple_kov_bounds_with(mode, Modification::First, p, s1, t1)
}

/// The four correlations that drive a triplet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kor3<T> {
    pub xy: KorValue<T>,
    pub xz: KorValue<T>,
    /// Inserted correlation inside the frame event.
    pub inner: KorValue<T>,
    /// Inserted correlation outside the frame event.
    pub outer: KorValue<T>,
}

impl<T: Scalar> Kor3<T> {
    pub fn new(xy: T, xz: T, inner: T, outer: T) -> Result<Self> {
        Ok(Self {
            xy: KorValue::new(xy)?,
            xz: KorValue::new(xz)?,
            inner: KorValue::new(inner)?,
            outer: KorValue::new(outer)?,
        })
    }

    pub fn uniform(k: T) -> Result<Self> {
        Self::new(k, k, k, k)
    }
}

/// Triplet frame parameters from four correlations; every result lies in
/// its Fréchet interval.
pub fn params_from_kor3<T: Scalar>(
    p: &MarginalSet<T>,
    kor: &Kor3<T>,
    modification: Modification,
) -> Result<TripletParams<T>> {
    let (px, py, pz) = triplet_parts(p)?;
    let s1 = pxy_from_kor2(px, py, kor.xy);
    let t1 = pxy_from_kor2(px, pz, kor.xz);
    let inserted = |mode, k: KorValue<T>| -> Result<T> {
        let (b, bounds) = inserted_triple_kov_bounds_with(mode, modification, p, s1, t1)?;
        let iv = inserted_triple_interval(mode, p, s1, t1)?;
        Ok(iv.clamp(b + bounds.kov_of(k)))
    };
    Ok(TripletParams {
        s1,
        t1,
        st1: inserted(InsertMode::Frame, kor.inner)?,
        st2: inserted(InsertMode::Complement, kor.outer)?,
    })
}

/// Correlations of given triplet parameters (inverse of [`params_from_kor3`]
/// wherever the baselines lie inside their intervals).
pub fn kor3_from_params<T: Scalar>(
    p: &MarginalSet<T>,
    params: &TripletParams<T>,
    modification: Modification,
) -> Result<Kor3<T>> {
    let (px, py, pz) = triplet_parts(p)?;
    let inner = |mode, v: T| -> Result<KorValue<T>> {
        let (b, bounds) = inserted_triple_kov_bounds_with(mode, modification, p, params.s1, params.t1)?;
        Ok(KorValue(bounds.kor_of(v - b)?))
    };
    Ok(Kor3 {
        xy: kor2(px, py, params.s1)?,
        xz: kor2(px, pz, params.t1)?,
        inner: inner(InsertMode::Frame, params.st1)?,
        outer: inner(InsertMode::Complement, params.st2)?,
    })
}

/// 3-Kopula whose functional parameters follow four fixed correlations.
///
/// At a point w̆ the half-rare projection is sorted, the triplet parameters
/// are obtained from the correlations, and the triplet distribution is mapped
/// back to the original events and phenomenon.
pub struct Kor3Kopula<T> {
    kor: Kor3<T>,
    modification: Modification,
}

impl<T: Scalar> Kor3Kopula<T> {
    pub fn new(kor: Kor3<T>, modification: Modification) -> Self {
        Self { kor, modification }
    }
}

impl<T: Scalar> Kopula<T> for Kor3Kopula<T> {
    fn n_events(&self) -> usize {
        3
    }

    fn name(&self) -> String {
        format!(
            "kor3(xy={}, xz={}, in={}, out={}, {:?})",
            self.kor.xy.value(),
            self.kor.xz.value(),
            self.kor.inner.value(),
            self.kor.outer.value(),
            self.modification
        )
    }

    fn table(&self, w: &[T]) -> Vec<T> {
        assert_eq!(w.len(), 3);
        let (h, terrace) = half_rare_coords(w);
        let perm = ordering_permutation(&h);
        let ordered = |ctx| MarginalSet::new(ctx, perm.iter().map(|&k| h[k]).collect());
        let epd = EventSetContext::new(3)
            .and_then(ordered)
            .and_then(|p| {
                let params = params_from_kor3(&p, &self.kor, self.modification)?;
                triplet_epd(&p, &params)
            });
        let Ok(epd) = epd else {
            return vec![T::nan(); 8];
        };
        let mut half_rare = vec![T::zero(); 8];
        for (x, &v) in epd.values().iter().enumerate() {
            let orig = SubsetIndex::from_events(SubsetIndex(x as u32).events().map(|i| perm[i]));
            half_rare[orig.index()] = v;
        }
        renumber_table(&half_rare, 3, terrace)
    }
}
