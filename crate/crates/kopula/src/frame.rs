//! The frame method: a distinguished frame event x₀ splits the remaining
//! events into two inserted sets, {x₀ ∩ x_k} and {x₀ᶜ ∩ x_k}, whose
//! pseudo-distributions are composed recursively into the joint distribution.
//!
//! Frame parameters are the second-kind probabilities p_X (|X| ≥ 2) of the
//! half-rare events. The primed inserted quantities are p_{X'} = p_{X ∪ x₀} and
//! the double-primed ones p_{X''} = p_X − p_{X ∪ x₀}.

use std::collections::BTreeMap;

use crate::epd::{clamp_small_negatives, epd2_from_epd1, Epd1, MarginalSet};
use crate::error::{KopulaError, Result};
use crate::lattice::{deposit_bits, EventSetContext, SubsetIndex};
use crate::phenomena::{half_rare_coords, ordering_permutation, renumber_table};
use crate::scalar::Scalar;

/// Sub-probability table of an inserted set; sums to the frame mass.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoDistribution<T> {
    ctx: EventSetContext,
    frame_prob: T,
    values: Vec<T>,
}

impl<T: Scalar> PseudoDistribution<T> {
    pub fn new(ctx: EventSetContext, frame_prob: T, mut values: Vec<T>) -> Result<Self> {
        if values.len() != ctx.size() {
            return Err(KopulaError::Context(format!(
                "expected {} pseudo-distribution values, got {}",
                ctx.size(),
                values.len()
            )));
        }
        let tol = T::validation_tol();
        if !(frame_prob >= -tol && frame_prob <= T::one() + tol) {
            return Err(KopulaError::Argument(format!("frame probability {frame_prob} outside [0, 1]")));
        }
        let (_, bad) = clamp_small_negatives(&mut values, tol);
        if let Some((s, v)) = bad {
            return Err(KopulaError::Infeasible(format!(
                "negative pseudo-probability at {}: {v}",
                ctx.subset_label(s)
            )));
        }
        let sum: T = values.iter().copied().sum();
        if (sum - frame_prob).abs() > tol {
            return Err(KopulaError::Infeasible(format!(
                "pseudo-distribution sums to {sum}, frame mass is {frame_prob}"
            )));
        }
        Ok(Self { ctx, frame_prob, values })
    }

    pub fn context(&self) -> &EventSetContext {
        &self.ctx
    }

    pub fn frame_prob(&self) -> T {
        self.frame_prob
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Distribution of the inserted set as an event set of its own: it
    /// differs from the pseudo-distribution only at ∅, which also absorbs
    /// the mass outside the frame terrace.
    pub fn inserted_epd(&self) -> Epd1<T> {
        let mut values = self.values.clone();
        values[0] = values[0] + T::one() - self.frame_prob;
        Epd1::from_unchecked(self.ctx.clone(), values)
    }
}

fn sub_context(joint: &EventSetContext, events: SubsetIndex) -> Result<EventSetContext> {
    match joint.labels() {
        Some(_) => EventSetContext::with_labels(events.events().map(|k| joint.label(k)).collect()),
        None => EventSetContext::new(events.len()),
    }
}

fn split_events<T: Scalar>(
    joint: &Epd1<T>,
    frame_events: SubsetIndex,
    y: SubsetIndex,
) -> Result<(SubsetIndex, EventSetContext)> {
    let n = joint.n();
    joint.context().check_mask(frame_events)?;
    if !y.is_subset_of(frame_events) {
        return Err(KopulaError::Argument("frame terrace is not inside the frame events".into()));
    }
    let rest = frame_events.complement(n);
    if rest.is_empty() {
        return Err(KopulaError::Argument("no events left outside the frame".into()));
    }
    Ok((rest, sub_context(joint.context(), rest)?))
}

/// Slice {p(X + Y), X ⊆ 𝒳} of a joint over 𝒳 + 𝒴 at the frame terrace Y.
pub fn pseudo_slice<T: Scalar>(
    joint: &Epd1<T>,
    frame_events: SubsetIndex,
    y: SubsetIndex,
) -> Result<PseudoDistribution<T>> {
    let (rest, ctx) = split_events(joint, frame_events, y)?;
    let values: Vec<T> = (0..ctx.size() as u32)
        .map(|x| joint.value(SubsetIndex(deposit_bits(x, rest.0) | y.0)))
        .collect();
    let frame_prob = values.iter().copied().sum();
    Ok(PseudoDistribution { ctx, frame_prob, values })
}

/// p(X | Y) = p(X + Y) / p(Y) over the events outside `frame_events`.
pub fn conditional_epd<T: Scalar>(
    joint: &Epd1<T>,
    frame_events: SubsetIndex,
    y: SubsetIndex,
) -> Result<Epd1<T>> {
    let pseudo = pseudo_slice(joint, frame_events, y)?;
    conditional_from_pseudo(&pseudo)
}

pub fn pseudo_from_conditional<T: Scalar>(cond: &Epd1<T>, frame_prob: T) -> Result<PseudoDistribution<T>> {
    if !(frame_prob > T::zero() && frame_prob <= T::one()) {
        return Err(KopulaError::Argument(format!("frame probability {frame_prob} outside (0, 1]")));
    }
    let values = cond.values().iter().map(|&v| v * frame_prob).collect();
    Ok(PseudoDistribution { ctx: cond.context().clone(), frame_prob, values })
}

pub fn conditional_from_pseudo<T: Scalar>(pseudo: &PseudoDistribution<T>) -> Result<Epd1<T>> {
    if !(pseudo.frame_prob > T::lit(1e-12)) {
        return Err(KopulaError::Conditioning(format!(
            "frame terrace has probability {}",
            pseudo.frame_prob
        )));
    }
    let values = pseudo.values.iter().map(|&v| v / pseudo.frame_prob).collect();
    Epd1::new(pseudo.ctx.clone(), values)
}

/// Joint over {x₀} + 𝒳 with x₀ as event 0: terraces containing x₀ come from
/// the inner pseudo-distribution, the others from the outer one.
pub fn frame_compose<T: Scalar>(
    pseudo_in: &PseudoDistribution<T>,
    pseudo_out: &PseudoDistribution<T>,
    p0: T,
) -> Result<Epd1<T>> {
    let tol = T::validation_tol();
    if pseudo_in.ctx.n() != pseudo_out.ctx.n() {
        return Err(KopulaError::Composition("inserted sets differ in size".into()));
    }
    if (pseudo_in.frame_prob - p0).abs() > tol || (pseudo_out.frame_prob - (T::one() - p0)).abs() > tol {
        return Err(KopulaError::Composition(format!(
            "frame masses {} and {} do not match p0 = {p0}",
            pseudo_in.frame_prob, pseudo_out.frame_prob
        )));
    }
    let labels = pseudo_in.ctx.labels().map(|l| {
        let mut all = vec!["x0".to_string()];
        all.extend(l.iter().cloned());
        all
    });
    let ctx = match labels {
        Some(l) if !l[1..].contains(&l[0]) => EventSetContext::with_labels(l)?,
        _ => EventSetContext::new(pseudo_in.ctx.n() + 1)?,
    };
    Epd1::new(ctx, interleave(&pseudo_in.values, &pseudo_out.values))
}

fn interleave<T: Copy>(inner: &[T], outer: &[T]) -> Vec<T> {
    (0..inner.len() * 2)
        .map(|z| if z & 1 == 1 { inner[z >> 1] } else { outer[z >> 1] })
        .collect()
}

/// Inverse of [`frame_compose`] on event 0.
pub fn frame_split<T: Scalar>(d: &Epd1<T>) -> Result<(PseudoDistribution<T>, PseudoDistribution<T>)> {
    let frame = SubsetIndex::singleton(0);
    Ok((pseudo_slice(d, frame, frame)?, pseudo_slice(d, frame, SubsetIndex::EMPTY)?))
}

/// Recursive frame composition of a pseudo-distribution from its
/// second-kind table `e` (e[∅] is the mass), splitting on event 0 each level.
fn compose_second_kind<T: Scalar>(e: &[T]) -> Vec<T> {
    if e.len() == 1 {
        return vec![e[0]];
    }
    let half = e.len() / 2;
    let inner: Vec<T> = (0..half).map(|x| e[x << 1 | 1]).collect();
    let outer: Vec<T> = (0..half).map(|x| e[x << 1] - e[x << 1 | 1]).collect();
    interleave(&compose_second_kind(&inner), &compose_second_kind(&outer))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrechetInterval<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Scalar> FrechetInterval<T> {
    pub fn contains(&self, v: T, tol: T) -> bool {
        v >= self.lower - tol && v <= self.upper + tol
    }

    pub fn clamp(&self, v: T) -> T {
        v.max(self.lower).min(self.upper)
    }

    pub fn width(&self) -> T {
        self.upper - self.lower
    }
}

/// Which inserted set a quantity belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Inside the frame event: {x₀ ∩ x_k}.
    Primed,
    /// Outside the frame event: {x₀ᶜ ∩ x_k}.
    DoublePrimed,
}

/// p_{s'}, p_{t'}, p_{s't'}, p_{s''t''} for an ordered triplet {x, y, z}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TripletParams<T> {
    pub s1: T,
    pub t1: T,
    pub st1: T,
    pub st2: T,
}

/// The eleven inserted intersection probabilities of an ordered quadruplet
/// {x, y, z, v}: singles s', t', u'; primed pairs and triple; double-primed
/// pairs and triple.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadrupletParams<T> {
    pub s1: T,
    pub t1: T,
    pub u1: T,
    pub st1: T,
    pub su1: T,
    pub tu1: T,
    pub stu1: T,
    pub st2: T,
    pub su2: T,
    pub tu2: T,
    pub stu2: T,
}

/// Second-kind probabilities p_X, |X| ≥ 2, keyed by event mask.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameParams<T> {
    n: usize,
    values: BTreeMap<SubsetIndex, T>,
}

impl<T: Scalar> FrameParams<T> {
    pub fn new(n: usize) -> Self {
        Self { n, values: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 2^N − N − 1.
    pub fn expected_len(n: usize) -> usize {
        (1 << n) - n - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.len() == Self::expected_len(self.n)
    }

    pub fn set(&mut self, s: SubsetIndex, v: T) -> Result<()> {
        if s.len() < 2 || s.index() >= 1 << self.n {
            return Err(KopulaError::Argument(format!(
                "frame parameter key {s} must name at least two of {} events",
                self.n
            )));
        }
        self.values.insert(s, v);
        Ok(())
    }

    pub fn get(&self, s: SubsetIndex) -> Option<T> {
        self.values.get(&s).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (SubsetIndex, T)> + '_ {
        self.values.iter().map(|(&k, &v)| (k, v))
    }

    fn need(&self, s: SubsetIndex) -> Result<T> {
        self.get(s)
            .ok_or_else(|| KopulaError::Dependency(format!("no parameter for intersection {s}")))
    }

    /// Parameters of independent half-rare events: p_X = Π h_k with
    /// h_k = min(p_k, 1 − p_k).
    pub fn independent(p: &MarginalSet<T>) -> Self {
        let (h, _) = half_rare_coords(&p.probs());
        let mut out = Self::new(p.n());
        for x in 0..1u32 << p.n() {
            let s = SubsetIndex(x);
            if s.len() >= 2 {
                out.values.insert(s, s.events().map(|k| h[k]).fold(T::one(), |a, b| a * b));
            }
        }
        out
    }

    /// Marginals and frame parameters of a distribution: the second-kind
    /// table of its half-rare phenomenon.
    pub fn from_epd(d: &Epd1<T>) -> Result<(MarginalSet<T>, Self)> {
        let n = d.n();
        let p = crate::epd::marginals(d);
        let (_, terrace) = half_rare_coords(&p.probs());
        let q = Epd1::from_unchecked(d.context().clone(), renumber_table(d.values(), n, terrace));
        let q2 = epd2_from_epd1(&q);
        let mut out = Self::new(n);
        for x in 0..1u32 << n {
            let s = SubsetIndex(x);
            if s.len() >= 2 {
                out.values.insert(s, q2.value(s));
            }
        }
        Ok((p, out))
    }

    pub fn from_triplet(tp: &TripletParams<T>) -> Self {
        let mut out = Self::new(3);
        let m = |e: &[usize]| SubsetIndex::from_events(e.iter().copied());
        out.values.insert(m(&[0, 1]), tp.s1);
        out.values.insert(m(&[0, 2]), tp.t1);
        out.values.insert(m(&[0, 1, 2]), tp.st1);
        out.values.insert(m(&[1, 2]), tp.st2 + tp.st1);
        out
    }

    pub fn to_triplet(&self) -> Result<TripletParams<T>> {
        if self.n != 3 {
            return Err(KopulaError::Context("triplet parameters need three events".into()));
        }
        let g = |e: &[usize]| self.need(SubsetIndex::from_events(e.iter().copied()));
        let st1 = g(&[0, 1, 2])?;
        Ok(TripletParams { s1: g(&[0, 1])?, t1: g(&[0, 2])?, st1, st2: g(&[1, 2])? - st1 })
    }

    pub fn from_quadruplet(qp: &QuadrupletParams<T>) -> Self {
        let mut out = Self::new(4);
        let m = |e: &[usize]| SubsetIndex::from_events(e.iter().copied());
        out.values.insert(m(&[0, 1]), qp.s1);
        out.values.insert(m(&[0, 2]), qp.t1);
        out.values.insert(m(&[0, 3]), qp.u1);
        out.values.insert(m(&[0, 1, 2]), qp.st1);
        out.values.insert(m(&[0, 1, 3]), qp.su1);
        out.values.insert(m(&[0, 2, 3]), qp.tu1);
        out.values.insert(m(&[0, 1, 2, 3]), qp.stu1);
        out.values.insert(m(&[1, 2]), qp.st2 + qp.st1);
        out.values.insert(m(&[1, 3]), qp.su2 + qp.su1);
        out.values.insert(m(&[2, 3]), qp.tu2 + qp.tu1);
        out.values.insert(m(&[1, 2, 3]), qp.stu2 + qp.stu1);
        out
    }

    pub fn to_quadruplet(&self) -> Result<QuadrupletParams<T>> {
        if self.n != 4 {
            return Err(KopulaError::Context("quadruplet parameters need four events".into()));
        }
        let g = |e: &[usize]| self.need(SubsetIndex::from_events(e.iter().copied()));
        let (st1, su1, tu1, stu1) = (g(&[0, 1, 2])?, g(&[0, 1, 3])?, g(&[0, 2, 3])?, g(&[0, 1, 2, 3])?);
        Ok(QuadrupletParams {
            s1: g(&[0, 1])?,
            t1: g(&[0, 2])?,
            u1: g(&[0, 3])?,
            st1,
            su1,
            tu1,
            stu1,
            st2: g(&[1, 2])? - st1,
            su2: g(&[1, 3])? - su1,
            tu2: g(&[2, 3])? - tu1,
            stu2: g(&[1, 2, 3])? - stu1,
        })
    }

    /// Same parameters with events relabeled: event k becomes `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let values = self
            .values
            .iter()
            .map(|(s, &v)| (SubsetIndex::from_events(s.events().map(|k| perm[k])), v))
            .collect();
        Self { n: self.n, values }
    }
}

/// Second-kind value of an ordered half-rare set: 1 at ∅, marginals at
/// singletons, parameters above.
fn second_kind<T: Scalar>(params: &FrameParams<T>, p: &MarginalSet<T>, s: SubsetIndex) -> Result<T> {
    match s.len() {
        0 => Ok(T::one()),
        1 => Ok(p.prob(s.events().next().unwrap_or(0))),
        _ => params.need(s),
    }
}

/// Inserted quantity of `side` for a subset of the non-frame events.
fn inserted<T: Scalar>(params: &FrameParams<T>, p: &MarginalSet<T>, side: Side, x: SubsetIndex) -> Result<T> {
    let with_frame = second_kind(params, p, x.with(0))?;
    match side {
        Side::Primed => Ok(with_frame),
        Side::DoublePrimed => Ok(second_kind(params, p, x)? - with_frame),
    }
}

/// Recurrent Fréchet interval of an inserted intersection.
///
/// `target` is a nonempty subset of the non-frame events 1..N of an ordered
/// half-rare set; event 0 is the frame. For |target| = m ≥ 2 the upper bound
/// is the least of its (m − 1)-order sub-intersections and the lower bound
/// max(0, Σ sub-intersections − (m − 1)·cap), with cap = p₀ inside the frame
/// and 1 − p₀ outside. Single inserted events lie in
/// [max(0, p_k − (1 − cap)), min(cap, p_k)].
pub fn frechet_bounds<T: Scalar>(
    params: &FrameParams<T>,
    target: SubsetIndex,
    p: &MarginalSet<T>,
    side: Side,
) -> Result<FrechetInterval<T>> {
    let n = p.n();
    if params.n() != n {
        return Err(KopulaError::Context("parameters and marginals differ in size".into()));
    }
    if target.is_empty() || target.contains(0) || target.index() >= 1 << n {
        return Err(KopulaError::Argument(format!(
            "target {target} must be a nonempty set of non-frame events"
        )));
    }
    recurrent_bounds(|s| inserted(params, p, side, s), target, p, side)
}

fn recurrent_bounds<T: Scalar>(
    inserted_of: impl Fn(SubsetIndex) -> Result<T>,
    target: SubsetIndex,
    p: &MarginalSet<T>,
    side: Side,
) -> Result<FrechetInterval<T>> {
    let p0 = p.prob(0);
    let cap = match side {
        Side::Primed => p0,
        Side::DoublePrimed => T::one() - p0,
    };
    let m = target.len();
    if m == 1 {
        let pk = p.prob(target.events().next().unwrap_or(0));
        return Ok(FrechetInterval {
            lower: (pk - (T::one() - cap)).max(T::zero()),
            upper: cap.min(pk),
        });
    }
    let mut upper = T::infinity();
    let mut sum = T::zero();
    for k in target.events() {
        let v = inserted_of(target.without(k))?;
        upper = upper.min(v);
        sum = sum + v;
    }
    let lower = (sum - T::lit((m - 1) as f64) * cap).max(T::zero());
    Ok(FrechetInterval { lower, upper })
}

fn check_ordered<T: Scalar>(p: &MarginalSet<T>, n: usize) -> Result<()> {
    if p.n() != n {
        return Err(KopulaError::Context(format!("expected {n} marginals, got {}", p.n())));
    }
    if !p.is_ordered_half_rare() {
        return Err(KopulaError::Argument(
            "marginals must be half-rare and nonincreasing".into(),
        ));
    }
    Ok(())
}

/// Checks `v` against its interval: within the validation tolerance outside
/// it is clamped, beyond that it is an error.
fn admit<T: Scalar>(name: &str, v: T, iv: FrechetInterval<T>, clamped: &mut bool) -> Result<T> {
    let tol = T::validation_tol();
    if !v.is_finite() || !iv.contains(v, tol) || iv.lower > iv.upper + tol {
        return Err(KopulaError::Infeasible(format!(
            "{name} = {v} violates {} <= {name} <= {}",
            iv.lower, iv.upper
        )));
    }
    let c = iv.clamp(v);
    *clamped |= c != v;
    Ok(c)
}

fn iv<T>(lower: T, upper: T) -> FrechetInterval<T> {
    FrechetInterval { lower, upper }
}

/// Triplet distribution from the four inserted parameters.
///
/// Requires ordered half-rare marginals (p_x ≥ p_y ≥ p_z) and parameters
/// inside the triplet Fréchet restrictions.
pub fn triplet_epd<T: Scalar>(p: &MarginalSet<T>, params: &TripletParams<T>) -> Result<Epd1<T>> {
    check_ordered(p, 3)?;
    let (px, py, pz) = (p.prob(0), p.prob(1), p.prob(2));
    let zero = T::zero();
    let mut clamped = false;
    let s1 = admit("p_s'", params.s1, iv(zero, py), &mut clamped)?;
    let t1 = admit("p_t'", params.t1, iv(zero, pz), &mut clamped)?;
    let st1 = admit("p_s't'", params.st1, iv((s1 + t1 - px).max(zero), s1.min(t1)), &mut clamped)?;
    let st2 = admit(
        "p_s''t''",
        params.st2,
        iv((px + py + pz - T::one() - s1 - t1).max(zero), (py - s1).min(pz - t1)),
        &mut clamped,
    )?;
    let mut v = vec![zero; 8];
    let (x, y, z) = (1, 2, 4);
    v[x | y | z] = st1;
    v[x | y] = s1 - st1;
    v[x | z] = t1 - st1;
    v[x] = px - s1 - t1 + st1;
    v[y | z] = st2;
    v[y] = py - s1 - st2;
    v[z] = pz - t1 - st2;
    v[0] = T::one() - px - py - pz + s1 + t1 + st2;
    finish(p.context(), v, clamped)
}

fn finish<T: Scalar>(ctx: &EventSetContext, mut v: Vec<T>, clamped: bool) -> Result<Epd1<T>> {
    let (c, bad) = clamp_small_negatives(&mut v, T::validation_tol());
    if let Some((s, val)) = bad {
        return Err(KopulaError::Infeasible(format!(
            "terrace {} gets negative probability {val}",
            ctx.subset_label(s)
        )));
    }
    Ok(Epd1::new(ctx.clone(), v)?.mark_clamped(clamped || c))
}

/// Quadruplet distribution from the eleven inserted parameters: an inner
/// octuple inside the frame event (mass p_x) and an outer one outside it.
pub fn quadruplet_epd<T: Scalar>(p: &MarginalSet<T>, params: &QuadrupletParams<T>) -> Result<Epd1<T>> {
    check_ordered(p, 4)?;
    let (px, py, pz, pv) = (p.prob(0), p.prob(1), p.prob(2), p.prob(3));
    let zero = T::zero();
    let one = T::one();
    let two = T::lit(2.0);
    let qx = one - px;
    let mut c = false;
    let pair_lo = |a: T, b: T, cap: T| (a + b - cap).max(zero);
    let s1 = admit("p_s'", params.s1, iv(zero, py.min(px)), &mut c)?;
    let t1 = admit("p_t'", params.t1, iv(zero, pz.min(px)), &mut c)?;
    let u1 = admit("p_u'", params.u1, iv(zero, pv.min(px)), &mut c)?;
    let st1 = admit("p_s't'", params.st1, iv(pair_lo(s1, t1, px), s1.min(t1)), &mut c)?;
    let su1 = admit("p_s'u'", params.su1, iv(pair_lo(s1, u1, px), s1.min(u1)), &mut c)?;
    let tu1 = admit("p_t'u'", params.tu1, iv(pair_lo(t1, u1, px), t1.min(u1)), &mut c)?;
    let stu1 = admit(
        "p_s't'u'",
        params.stu1,
        iv((st1 + su1 + tu1 - two * px).max(zero), st1.min(su1).min(tu1)),
        &mut c,
    )?;
    let (s2, t2, u2) = (py - s1, pz - t1, pv - u1);
    let st2 = admit("p_s''t''", params.st2, iv(pair_lo(s2, t2, qx), s2.min(t2)), &mut c)?;
    let su2 = admit("p_s''u''", params.su2, iv(pair_lo(s2, u2, qx), s2.min(u2)), &mut c)?;
    let tu2 = admit("p_t''u''", params.tu2, iv(pair_lo(t2, u2, qx), t2.min(u2)), &mut c)?;
    let stu2 = admit(
        "p_s''t''u''",
        params.stu2,
        iv((st2 + su2 + tu2 - two * qx).max(zero), st2.min(su2).min(tu2)),
        &mut c,
    )?;
    let (x, y, z, w) = (1, 2, 4, 8);
    let mut v = vec![zero; 16];
    v[x | y | z | w] = stu1;
    v[x | y | z] = st1 - stu1;
    v[x | y | w] = su1 - stu1;
    v[x | z | w] = tu1 - stu1;
    v[x | y] = s1 - st1 - su1 + stu1;
    v[x | z] = t1 - st1 - tu1 + stu1;
    v[x | w] = u1 - su1 - tu1 + stu1;
    v[x] = px - s1 - t1 - u1 + st1 + su1 + tu1 - stu1;
    v[y | z | w] = stu2;
    v[y | z] = st2 - stu2;
    v[y | w] = su2 - stu2;
    v[z | w] = tu2 - stu2;
    v[y] = py - s1 - st2 - su2 + stu2;
    v[z] = pz - t1 - st2 - tu2 + stu2;
    v[w] = pv - u1 - su2 - tu2 + stu2;
    v[0] = one - px - py - pz - pv + s1 + t1 + u1 + st2 + su2 + tu2 - stu2;
    finish(p.context(), v, c)
}

/// How [`build_nset_epd`] treats the recurrent Fréchet restrictions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundsPolicy {
    /// Check every inserted parameter against its interval before building.
    Check,
    /// Skip interval checks; only the composed distribution is validated.
    Skip,
}

impl Default for BoundsPolicy {
    fn default() -> Self {
        Self::Check
    }
}

/// Builds the distribution of an arbitrary N-set from its marginals and
/// frame parameters.
///
/// The events are reduced to their half-rare phenomenon and sorted by
/// nonincreasing marginal (stable), the parameters are checked against the
/// recurrent restrictions of the two inserted sets, the ordered set is
/// composed by the frame recursion, and the result is mapped back to the
/// original events and phenomenon. Parameter keys refer to the original
/// event indices and are intersection probabilities of the half-rare events.
pub fn build_nset_epd<T: Scalar>(
    p: &MarginalSet<T>,
    params: &FrameParams<T>,
    policy: BoundsPolicy,
) -> Result<Epd1<T>> {
    let n = p.n();
    if params.n() != n {
        return Err(KopulaError::Context(format!(
            "{} events in parameters, {n} in marginals",
            params.n()
        )));
    }
    let ctx = p.context();
    let (h, terrace) = half_rare_coords(&p.probs());
    let perm = ordering_permutation(&h);
    let to_orig = |s: SubsetIndex| SubsetIndex::from_events(s.events().map(|i| perm[i]));

    let mut table = vec![T::zero(); 1 << n];
    for x in 0..1u32 << n {
        let s = SubsetIndex(x);
        table[x as usize] = match s.len() {
            0 => T::one(),
            1 => h[perm[s.events().next().unwrap_or(0)]],
            _ => params.get(to_orig(s)).ok_or_else(|| {
                KopulaError::Dependency(format!(
                    "no parameter for intersection {}",
                    ctx.subset_label(to_orig(s))
                ))
            })?,
        };
    }

    let mut clamped = false;
    if policy == BoundsPolicy::Check && n >= 2 {
        let ordered_ctx = EventSetContext::new(n)?;
        let ordered_p = MarginalSet::new(ordered_ctx, (0..n).map(|i| h[perm[i]]).collect())?;
        let tol = T::validation_tol();
        for m in 1..n {
            for x in 0..1u32 << n {
                let s = SubsetIndex(x);
                if s.contains(0) || s.len() != m {
                    continue;
                }
                for side in [Side::Primed, Side::DoublePrimed] {
                    if side == Side::DoublePrimed && m == 1 {
                        continue;
                    }
                    let from_table = |t: &[T], s: SubsetIndex| match side {
                        Side::Primed => t[s.with(0).index()],
                        Side::DoublePrimed => t[s.index()] - t[s.with(0).index()],
                    };
                    let bounds =
                        recurrent_bounds(|sub| Ok(from_table(&table, sub)), s, &ordered_p, side)?;
                    let key = match side {
                        Side::Primed => s.with(0),
                        Side::DoublePrimed => s,
                    };
                    let current = from_table(&table, s);
                    if !bounds.contains(current, tol) || bounds.lower > bounds.upper + tol {
                        let prime = if side == Side::Primed { "'" } else { "''" };
                        return Err(KopulaError::Infeasible(format!(
                            "inserted intersection of {}{prime} = {current} outside [{}, {}]",
                            ctx.subset_label(to_orig(s)),
                            bounds.lower,
                            bounds.upper
                        )));
                    }
                    let c = bounds.clamp(current);
                    if c != current {
                        clamped = true;
                        table[key.index()] = table[key.index()] + (c - current);
                    }
                }
            }
        }
    }

    let ordered = compose_second_kind(&table);
    let mut half_rare = vec![T::zero(); 1 << n];
    for (x, &v) in ordered.iter().enumerate() {
        half_rare[to_orig(SubsetIndex(x as u32)).index()] = v;
    }
    let mut values = renumber_table(&half_rare, n, terrace);
    let (c, bad) = clamp_small_negatives(&mut values, T::validation_tol());
    if let Some((s, v)) = bad {
        return Err(KopulaError::Infeasible(format!(
            "terrace {} gets negative probability {v}",
            ctx.subset_label(s)
        )));
    }
    Ok(Epd1::new(ctx.clone(), values)?.mark_clamped(clamped || c))
}

/// Residuals of the full-probability formulas for a joint over 𝒳 + 𝒴.
#[derive(Clone, Debug, PartialEq)]
pub struct FullProbabilityReport<T> {
    /// max_X |p(X//𝒳) − Σ_Y p(X | Y) p(Y//𝒴)|.
    pub conditional_residual: T,
    /// max_X |p(X//𝒳) − Σ_Y pseudo_Y(X)| with pseudo_Y = p(· | Y) p(Y//𝒴).
    pub pseudo_residual: T,
    /// max_{X,Y} |p(X + Y) − p(X | Y) p(Y//𝒴)|.
    pub joint_residual: T,
}

/// Compares a joint distribution with its decomposition into a frame
/// distribution over `frame_events` and one conditional per frame terrace
/// (indexed by the compact mask of the terrace within the frame events).
pub fn full_probability_check<T: Scalar>(
    joint: &Epd1<T>,
    frame_events: SubsetIndex,
    conditionals: &[Epd1<T>],
    frame_epd: &Epd1<T>,
) -> Result<FullProbabilityReport<T>> {
    let (rest, rest_ctx) = split_events(joint, frame_events, SubsetIndex::EMPTY)?;
    let ny = frame_events.len();
    if frame_epd.n() != ny || conditionals.len() != 1 << ny {
        return Err(KopulaError::Context(
            "frame distribution or conditionals do not match the frame events".into(),
        ));
    }
    if conditionals.iter().any(|c| c.n() != rest_ctx.n()) {
        return Err(KopulaError::Context("conditional over the wrong number of events".into()));
    }
    let nx = rest_ctx.size();
    let mut conditional_residual = T::zero();
    let mut pseudo_residual = T::zero();
    let mut joint_residual = T::zero();
    for x in 0..nx as u32 {
        let xs = deposit_bits(x, rest.0);
        let mut marginal = T::zero();
        let mut mix = T::zero();
        let mut pseudo_sum = T::zero();
        for y in 0..1u32 << ny {
            let ys = deposit_bits(y, frame_events.0);
            let pj = joint.value(SubsetIndex(xs | ys));
            let py = frame_epd.value(SubsetIndex(y));
            let c = conditionals[y as usize].value(SubsetIndex(x));
            marginal = marginal + pj;
            mix = mix + c * py;
            pseudo_sum = pseudo_sum + py * c;
            joint_residual = joint_residual.max((pj - c * py).abs());
        }
        conditional_residual = conditional_residual.max((marginal - mix).abs());
        pseudo_residual = pseudo_residual.max((marginal - pseudo_sum).abs());
    }
    Ok(FullProbabilityReport { conditional_residual, pseudo_residual, joint_residual })
}

/// Frame distribution and conditionals of a joint (conditionals on null
/// frame terraces are taken as point masses at ∅).
pub fn decompose<T: Scalar>(joint: &Epd1<T>, frame_events: SubsetIndex) -> Result<(Epd1<T>, Vec<Epd1<T>>)> {
    let ny = frame_events.len();
    let mut frame_values = Vec::with_capacity(1 << ny);
    let mut conds = Vec::with_capacity(1 << ny);
    for y in 0..1u32 << ny {
        let ys = SubsetIndex(deposit_bits(y, frame_events.0));
        let pseudo = pseudo_slice(joint, frame_events, ys)?;
        frame_values.push(pseudo.frame_prob);
        conds.push(match conditional_from_pseudo(&pseudo) {
            Ok(c) => c,
            Err(KopulaError::Conditioning(_)) => Epd1::point_mass(pseudo.ctx.clone(), SubsetIndex::EMPTY)?,
            Err(e) => return Err(e),
        });
    }
    let frame_ctx = sub_context(joint.context(), frame_events)?;
    Ok((Epd1::from_unchecked(frame_ctx, frame_values), conds))
}
