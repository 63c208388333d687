//! JSON documents: a header `{p, format_version, kind}` followed by one payload.
//!
//! Rationals and p-adic numbers are written as strings (`"3/4"`, `"5/2^3"`),
//! scalars as `{"conductor_exp": n, "a": [...], "b": [...]}` holding the
//! power-basis coordinates of `a + b sqrt(p)`. On input a scalar may also be a
//! bare rational string or integer.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::affine::{GroupElement, Rep, RepSystem, SpecialSubgroup};
use crate::cwt::{Entry, SampledTransform};
use crate::error::{Error, Result};
use crate::frames::FrameSpec;
use crate::padic::{check_prime, PAdicNumber};
use crate::scalars::{CycloScalar, ScaledScalar};
use crate::stepfn::StepFunction;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub p: u32,
    pub format_version: u32,
    #[serde(flatten)]
    pub payload: Payload,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    StepFunction(StepFunctionDto),
    FrameSpec(FrameSpecDto),
    SampledTransform(SampledDto),
    Coefficients(SampledDto),
    Report { report: serde_json::Value },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarDto {
    Int(i64),
    Rational(String),
    Full {
        conductor_exp: u32,
        a: Vec<String>,
        b: Vec<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermDto {
    pub center: String,
    pub coeff: ScalarDto,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepFunctionDto {
    pub resolution: i64,
    pub terms: Vec<TermDto>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupDto {
    pub k: i64,
    pub m: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepSystemDto {
    pub k: i64,
    pub m: u32,
    pub n_range: [i64; 2],
    pub gamma_window: [i64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameSpecDto {
    pub wavelets: Vec<StepFunctionDto>,
    pub subgroup: SubgroupDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryDto {
    /// The representative `(x, h)`.
    pub r: [String; 2],
    /// Wavelet index, starting at 1.
    pub j: usize,
    pub value: ScalarDto,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledDto {
    pub subgroup: SubgroupDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<RepSystemDto>,
    #[serde(default = "one")]
    pub wavelet_count: usize,
    pub entries: Vec<EntryDto>,
}

fn one() -> usize {
    1
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(s.parse::<BigInt>().map_err(|_| bad())?)),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
    }
}

pub fn scalar_to_dto(v: &ScaledScalar) -> ScalarDto {
    let n = v.conductor_exp();
    let coords = |c: &CycloScalar| c.coords_at(n).iter().map(|r| r.to_string()).collect();
    ScalarDto::Full {
        conductor_exp: n,
        a: coords(v.a()),
        b: coords(v.b()),
    }
}

pub fn scalar_from_dto(p: u32, d: &ScalarDto) -> Result<ScaledScalar> {
    match d {
        ScalarDto::Int(k) => Ok(ScaledScalar::from_int(p, *k)),
        ScalarDto::Rational(s) => Ok(ScaledScalar::from_rational(p, &parse_rational(s)?)),
        ScalarDto::Full { conductor_exp, a, b } => {
            let parse = |v: &[String]| -> Result<CycloScalar> {
                let coords = v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
                CycloScalar::from_coords(p, *conductor_exp, &coords)
            };
            Ok(ScaledScalar::new(parse(a)?, parse(b)?))
        }
    }
}

pub fn step_to_dto(f: &StepFunction) -> StepFunctionDto {
    StepFunctionDto {
        resolution: f.resolution(),
        terms: f
            .terms()
            .map(|(c, v)| TermDto {
                center: c.to_string(),
                coeff: scalar_to_dto(v),
            })
            .collect(),
    }
}

pub fn step_from_dto(p: u32, d: &StepFunctionDto) -> Result<StepFunction> {
    let values = d
        .terms
        .iter()
        .map(|t| Ok((PAdicNumber::parse(p, &t.center)?, scalar_from_dto(p, &t.coeff)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(StepFunction::from_values(p, d.resolution, values))
}

fn sub_to_dto(s: &SpecialSubgroup) -> SubgroupDto {
    SubgroupDto { k: s.k, m: s.m }
}

fn sub_from_dto(d: &SubgroupDto) -> SpecialSubgroup {
    SpecialSubgroup::new(d.k, d.m)
}

pub fn repsystem_to_dto(rs: &RepSystem) -> RepSystemDto {
    RepSystemDto {
        k: rs.subgroup.k,
        m: rs.subgroup.m,
        n_range: [rs.n_range.0, rs.n_range.1],
        gamma_window: [rs.gamma_window.0, rs.gamma_window.1],
    }
}

pub fn repsystem_from_dto(p: u32, d: &RepSystemDto) -> Result<RepSystem> {
    RepSystem::new(
        p,
        SpecialSubgroup::new(d.k, d.m),
        (d.n_range[0], d.n_range[1]),
        (d.gamma_window[0], d.gamma_window[1]),
    )
}

pub fn frame_to_dto(fs: &FrameSpec) -> FrameSpecDto {
    FrameSpecDto {
        wavelets: fs.wavelets.iter().map(step_to_dto).collect(),
        subgroup: sub_to_dto(&fs.subgroup),
        constant: fs.constant.as_ref().map(|c| c.to_string()),
    }
}

pub fn frame_from_dto(p: u32, d: &FrameSpecDto) -> Result<FrameSpec> {
    let wavelets = d
        .wavelets
        .iter()
        .map(|w| step_from_dto(p, w))
        .collect::<Result<Vec<_>>>()?;
    let mut fs = FrameSpec::new(p, wavelets, sub_from_dto(&d.subgroup))?;
    fs.constant = d.constant.as_deref().map(parse_rational).transpose()?;
    Ok(fs)
}

pub fn entry_to_dto(e: &Entry) -> EntryDto {
    let g = e.rep.element();
    EntryDto {
        r: [g.x().to_string(), g.h().to_string()],
        j: e.j + 1,
        value: scalar_to_dto(&e.value),
    }
}

pub fn entry_from_dto(p: u32, sub: &SpecialSubgroup, d: &EntryDto) -> Result<Entry> {
    if d.j == 0 {
        return Err(Error::Parse("wavelet indices start at 1".into()));
    }
    let g = GroupElement::new(PAdicNumber::parse(p, &d.r[0])?, PAdicNumber::parse(p, &d.r[1])?)?;
    Ok(Entry {
        rep: Rep::from_element(&g, sub)?,
        j: d.j - 1,
        value: scalar_from_dto(p, &d.value)?,
    })
}

pub fn sampled_to_dto(st: &SampledTransform) -> Result<SampledDto> {
    Ok(SampledDto {
        subgroup: sub_to_dto(&st.subgroup()),
        window: Some(repsystem_to_dto(st.window())),
        wavelet_count: st.wavelet_count(),
        entries: st.entries()?.iter().map(entry_to_dto).collect(),
    })
}

/// Entries of a sampled document, in the given subgroup.
pub fn entries_from_dto(p: u32, d: &SampledDto) -> Result<Vec<Entry>> {
    let sub = sub_from_dto(&d.subgroup);
    d.entries.iter().map(|e| entry_from_dto(p, &sub, e)).collect()
}

pub fn sampled_from_dto(p: u32, d: &SampledDto) -> Result<SampledTransform> {
    let sub = sub_from_dto(&d.subgroup);
    let entries = entries_from_dto(p, d)?;
    let window = match &d.window {
        Some(w) => {
            let rs = repsystem_from_dto(p, w)?;
            if rs.subgroup != sub {
                return Err(Error::Parse(
                    "window subgroup differs from the document subgroup".into(),
                ));
            }
            rs
        }
        None => {
            let (mut n0, mut n1, mut g0) = (0i64, 0i64, sub.k);
            for e in &entries {
                n0 = n0.min(e.rep.n);
                n1 = n1.max(e.rep.n);
                if let Some(v) = e.rep.gamma.valuation() {
                    g0 = g0.min(v);
                }
            }
            RepSystem::new(p, sub, (n0, n1), (g0, sub.k))?
        }
    };
    SampledTransform::from_entries(p, window, d.wavelet_count, entries)
}

impl Document {
    pub fn new(p: u32, payload: Payload) -> Self {
        Document {
            p,
            format_version: FORMAT_VERSION,
            payload,
        }
    }

    pub fn step_function(f: &StepFunction) -> Self {
        Self::new(f.p(), Payload::StepFunction(step_to_dto(f)))
    }

    pub fn frame_spec(fs: &FrameSpec) -> Self {
        Self::new(fs.p, Payload::FrameSpec(frame_to_dto(fs)))
    }

    pub fn sampled(st: &SampledTransform) -> Result<Self> {
        Ok(Self::new(st.p(), Payload::SampledTransform(sampled_to_dto(st)?)))
    }

    pub fn coefficients(st: &SampledTransform) -> Result<Self> {
        Ok(Self::new(st.p(), Payload::Coefficients(sampled_to_dto(st)?)))
    }

    pub fn report(p: u32, report: serde_json::Value) -> Self {
        Self::new(p, Payload::Report { report })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: Document = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported format version {}",
                doc.format_version
            )));
        }
        check_prime(doc.p)?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn kind(&self) -> &'static str {
        match &self.payload {
            Payload::StepFunction(_) => "step_function",
            Payload::FrameSpec(_) => "frame_spec",
            Payload::SampledTransform(_) => "sampled_transform",
            Payload::Coefficients(_) => "coefficients",
            Payload::Report { .. } => "report",
        }
    }

    fn wrong_kind(&self, want: &str) -> Error {
        Error::Parse(format!("expected a {want} document, got {}", self.kind()))
    }

    pub fn as_step_function(&self) -> Result<StepFunction> {
        match &self.payload {
            Payload::StepFunction(d) => step_from_dto(self.p, d),
            _ => Err(self.wrong_kind("step_function")),
        }
    }

    pub fn as_frame_spec(&self) -> Result<FrameSpec> {
        match &self.payload {
            Payload::FrameSpec(d) => frame_from_dto(self.p, d),
            _ => Err(self.wrong_kind("frame_spec")),
        }
    }

    /// Either a sampled transform or a coefficient map.
    pub fn as_sampled(&self) -> Result<SampledTransform> {
        match &self.payload {
            Payload::SampledTransform(d) | Payload::Coefficients(d) => sampled_from_dto(self.p, d),
            _ => Err(self.wrong_kind("sampled_transform")),
        }
    }
}
