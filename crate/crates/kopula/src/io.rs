//! Serialized forms: distribution documents (JSON and CSV), frame parameter
//! maps, family descriptors and build configurations.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::epd::{Epd1, Epd2, MarginalSet};
use crate::error::{KopulaError, Result};
use crate::families::{
    alpha_const, alpha_sin15, arbitrary_embedded_2kopula, classical_2kopula, conjugated_2kopula,
    continuous_arbitrary_embedded_2kopula, convex_combination, convex_updown_2kopula,
    epd_from_kopula, frechet_lower_2, frechet_upper_2, half_embedded_2kopula,
    half_independent_2kopula, independent_kopula, quarter_sum, ClassicalFamily, KopulaFamily,
    WeightFn,
};
use crate::frame::{build_nset_epd, BoundsPolicy, FrameParams};
use crate::kor::{Kor3, Kor3Kopula, Modification};
use crate::lattice::{EventSetContext, SubsetIndex};
use crate::scalar::Scalar;

fn parse_err(e: impl std::fmt::Display) -> KopulaError {
    KopulaError::Parse(e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EpdKind {
    Epd1,
    Epd2,
}

/// `{"n": N, "labels": [...], "kind": "epd1"|"epd2", "values": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpdDocument {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub kind: EpdKind,
    pub values: Vec<f64>,
}

fn to_f64s<T: Scalar>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}

impl EpdDocument {
    pub fn from_epd1<T: Scalar>(d: &Epd1<T>) -> Self {
        Self {
            n: d.n(),
            labels: d.context().labels().map(|l| l.to_vec()),
            kind: EpdKind::Epd1,
            values: to_f64s(d.values()),
        }
    }

    pub fn from_epd2<T: Scalar>(d: &Epd2<T>) -> Self {
        Self {
            n: d.n(),
            labels: d.context().labels().map(|l| l.to_vec()),
            kind: EpdKind::Epd2,
            values: to_f64s(d.values()),
        }
    }

    pub fn context(&self) -> Result<EventSetContext> {
        let ctx = match &self.labels {
            Some(l) => EventSetContext::with_labels(l.clone())?,
            None => EventSetContext::new(self.n)?,
        };
        if ctx.n() != self.n {
            return Err(KopulaError::Parse(format!(
                "document declares {} events but has {} labels",
                self.n,
                ctx.n()
            )));
        }
        Ok(ctx)
    }

    pub fn to_epd1(&self) -> Result<Epd1<f64>> {
        if self.kind != EpdKind::Epd1 {
            return Err(KopulaError::Parse("expected a document of kind epd1".into()));
        }
        Epd1::new(self.context()?, self.values.clone())
    }

    pub fn to_epd2(&self) -> Result<Epd2<f64>> {
        if self.kind != EpdKind::Epd2 {
            return Err(KopulaError::Parse("expected a document of kind epd2".into()));
        }
        Epd2::new(self.context()?, self.values.clone())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(parse_err)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

/// CSV with columns `mask,subset_labels,value`, one row per subset.
pub fn write_table_csv<W: Write>(ctx: &EventSetContext, values: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["mask", "subset_labels", "value"]).map_err(parse_err)?;
    for (x, v) in values.iter().enumerate() {
        let s = SubsetIndex(x as u32);
        w.write_record([x.to_string(), ctx.subset_label(s), format!("{v:?}")])
            .map_err(parse_err)?;
    }
    w.flush().map_err(parse_err)
}

/// Reads a table written by [`write_table_csv`]; labels are recovered from
/// the singleton rows.
pub fn read_table_csv<R: Read>(input: R) -> Result<(EventSetContext, Vec<f64>)> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows: Vec<(usize, String, f64)> = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(parse_err)?;
        if rec.len() != 3 {
            return Err(KopulaError::Parse(format!("expected 3 columns, got {}", rec.len())));
        }
        let mask: usize = rec[0].trim().parse().map_err(parse_err)?;
        let value: f64 = rec[2].trim().parse().map_err(parse_err)?;
        rows.push((mask, rec[1].to_string(), value));
    }
    let len = rows.len();
    if !len.is_power_of_two() || len < 2 {
        return Err(KopulaError::Parse(format!("{len} rows is not a power of two above 1")));
    }
    let n = len.trailing_zeros() as usize;
    let mut values = vec![f64::NAN; len];
    let mut labels = vec![String::new(); n];
    for (mask, label, v) in rows {
        if mask >= len || !values[mask].is_nan() {
            return Err(KopulaError::Parse(format!("bad or repeated mask {mask}")));
        }
        values[mask] = v;
        if mask.is_power_of_two() {
            labels[mask.trailing_zeros() as usize] = label;
        }
    }
    let default = (0..n).all(|k| labels[k] == format!("x{k}"));
    let ctx = if default { EventSetContext::new(n)? } else { EventSetContext::with_labels(labels)? };
    Ok((ctx, values))
}

/// Frame parameters from a map like `{"x0&x1": 0.12}`.
pub fn frame_params_from_map(
    ctx: &EventSetContext,
    map: &BTreeMap<String, f64>,
) -> Result<FrameParams<f64>> {
    let mut params = FrameParams::new(ctx.n());
    for (label, &v) in map {
        let s = ctx.parse_subset(label)?;
        if s.len() < 2 {
            return Err(KopulaError::Parse(format!(
                "frame parameter '{label}' must name at least two events"
            )));
        }
        params.set(s, v)?;
    }
    Ok(params)
}

pub fn frame_params_to_map<T: Scalar>(ctx: &EventSetContext, params: &FrameParams<T>) -> BTreeMap<String, f64> {
    params
        .iter()
        .map(|(s, v)| (ctx.subset_label(s), v.to_f64().unwrap_or(f64::NAN)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedAlpha {
    Sin15,
}

/// A weight function: a constant or `"sin15"` for sin(15(w_x − w_y)).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Constant(f64),
    Named(NamedAlpha),
}

impl AlphaSpec {
    fn build<T: Scalar>(self) -> Result<WeightFn<T>> {
        match self {
            AlphaSpec::Constant(a) if (-1.0..=1.0).contains(&a) => Ok(alpha_const(T::lit(a))),
            AlphaSpec::Constant(a) => Err(KopulaError::Argument(format!("alpha {a} outside [-1, 1]"))),
            AlphaSpec::Named(NamedAlpha::Sin15) => Ok(alpha_sin15()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KorSpec {
    #[serde(default)]
    pub xy: f64,
    #[serde(default)]
    pub xz: f64,
    #[serde(default, rename = "in")]
    pub inner: f64,
    #[serde(default, rename = "out")]
    pub outer: f64,
}

impl KorSpec {
    pub fn to_kor3<T: Scalar>(&self) -> Result<Kor3<T>> {
        Kor3::new(T::lit(self.xy), T::lit(self.xz), T::lit(self.inner), T::lit(self.outer))
    }
}

pub fn modification_from_number(m: u8) -> Result<Modification> {
    match m {
        1 => Ok(Modification::First),
        2 => Ok(Modification::Second),
        _ => Err(KopulaError::Argument(format!("modification must be 1 or 2, got {m}"))),
    }
}

fn default_modification() -> u8 {
    1
}

/// Family descriptor, e.g. `{"family": "clayton", "theta": 2.0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Independent {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
    },
    Upper,
    Lower,
    HalfIndependent,
    HalfEmbedded,
    ArbitraryEmbedded,
    ContinuousArbitraryEmbedded,
    ConvexUpdown {
        alpha: AlphaSpec,
    },
    Conjugated {
        alpha: AlphaSpec,
    },
    Amh {
        theta: f64,
    },
    Clayton {
        theta: f64,
    },
    Frank {
        theta: f64,
    },
    Gumbel {
        theta: f64,
    },
    Joe {
        theta: f64,
    },
    QuarterSum,
    Kor3 {
        kor: KorSpec,
        #[serde(default = "default_modification")]
        modification: u8,
    },
    Convex {
        weights: Vec<f64>,
        parts: Vec<FamilySpec>,
    },
}

impl FamilySpec {
    pub fn from_value(v: &Value) -> Result<Self> {
        Self::deserialize(v).map_err(parse_err)
    }

    /// Builds the family; `n_hint` fixes the number of events where the
    /// family leaves it open and is checked against fixed-size families.
    pub fn build<T: Scalar>(&self, n_hint: Option<usize>) -> Result<KopulaFamily<T>> {
        let k: KopulaFamily<T> = match self {
            FamilySpec::Independent { n } => {
                let n = n.or(n_hint).ok_or_else(|| {
                    KopulaError::Argument("independent family needs a number of events".into())
                })?;
                independent_kopula(&EventSetContext::new(n)?)
            }
            FamilySpec::Upper => frechet_upper_2(),
            FamilySpec::Lower => frechet_lower_2(),
            FamilySpec::HalfIndependent => half_independent_2kopula(),
            FamilySpec::HalfEmbedded => half_embedded_2kopula(),
            FamilySpec::ArbitraryEmbedded => arbitrary_embedded_2kopula(),
            FamilySpec::ContinuousArbitraryEmbedded => continuous_arbitrary_embedded_2kopula(),
            FamilySpec::ConvexUpdown { alpha } => convex_updown_2kopula(alpha.build()?),
            FamilySpec::Conjugated { alpha } => conjugated_2kopula(alpha.build()?),
            FamilySpec::Amh { theta } => classical_2kopula(ClassicalFamily::AliMikhailHaq, T::lit(*theta))?,
            FamilySpec::Clayton { theta } => classical_2kopula(ClassicalFamily::Clayton, T::lit(*theta))?,
            FamilySpec::Frank { theta } => classical_2kopula(ClassicalFamily::Frank, T::lit(*theta))?,
            FamilySpec::Gumbel { theta } => classical_2kopula(ClassicalFamily::Gumbel, T::lit(*theta))?,
            FamilySpec::Joe { theta } => classical_2kopula(ClassicalFamily::Joe, T::lit(*theta))?,
            FamilySpec::QuarterSum => quarter_sum(),
            FamilySpec::Kor3 { kor, modification } => std::sync::Arc::new(Kor3Kopula::new(
                kor.to_kor3()?,
                modification_from_number(*modification)?,
            )),
            FamilySpec::Convex { weights, parts } => {
                let built = parts
                    .iter()
                    .map(|p| p.build::<T>(n_hint))
                    .collect::<Result<Vec<_>>>()?;
                convex_combination(built, weights.iter().map(|&w| T::lit(w)).collect())?
            }
        };
        if let Some(n) = n_hint {
            if k.n_events() != n {
                return Err(KopulaError::Context(format!(
                    "family {} has {} events, {n} requested",
                    k.name(),
                    k.n_events()
                )));
            }
        }
        Ok(k)
    }
}

/// Builds a first-kind distribution from a JSON configuration:
///
/// * a family descriptor plus `"marginals"`,
/// * `"marginals"` plus a `"params"` map of frame parameters,
/// * `"marginals"` (three events) plus `"kor"` and optional `"modification"`.
///
/// Optional `"labels"` name the events.
pub fn build_from_config(config: &Value) -> Result<Epd1<f64>> {
    let obj = config
        .as_object()
        .ok_or_else(|| KopulaError::Parse("configuration must be a JSON object".into()))?;
    let marginals: Vec<f64> = obj
        .get("marginals")
        .ok_or_else(|| KopulaError::Parse("configuration needs \"marginals\"".into()))
        .and_then(|v| Vec::<f64>::deserialize(v).map_err(parse_err))?;
    let ctx = match obj.get("labels") {
        Some(l) => EventSetContext::with_labels(Vec::<String>::deserialize(l).map_err(parse_err)?)?,
        None => EventSetContext::new(marginals.len())?,
    };
    let p = MarginalSet::new(ctx.clone(), marginals)?;
    if let Some(params) = obj.get("params") {
        let map = BTreeMap::<String, f64>::deserialize(params).map_err(parse_err)?;
        let params = frame_params_from_map(&ctx, &map)?;
        return build_nset_epd(&p, &params, BoundsPolicy::Check);
    }
    let family = if obj.contains_key("family") {
        FamilySpec::from_value(config)?
    } else if let Some(kor) = obj.get("kor") {
        let kor = KorSpec::deserialize(kor).map_err(parse_err)?;
        let modification = match obj.get("modification") {
            Some(m) => u8::deserialize(m).map_err(parse_err)?,
            None => 1,
        };
        FamilySpec::Kor3 { kor, modification }
    } else {
        return Err(KopulaError::Parse(
            "configuration needs \"family\", \"params\" or \"kor\"".into(),
        ));
    };
    let k = family.build::<f64>(Some(p.n()))?;
    epd_from_kopula(k.as_ref(), &p)
}
