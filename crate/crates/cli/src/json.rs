//! Problem-file serialization: a small JSON schema covering the base torus,
//! the fan, the twist homomorphism, and the piecewise-linear divisor data.
//!
//! Rational entries are strings ("2", "-4/7", "0.25"); classes may be given
//! in the divisor basis ("f"), the Lorentz basis ("l"), or with explicit
//! sqrt-3 parts ("ext"). Emission is canonical and re-parses bit-exactly.

use boxnef::ext::Ext;
use boxnef::fan::{Fan, PlFunction};
use boxnef::scalar::{rat_parse, Rat, Scalar};
use boxnef::torus::{NsClass, TorusBase};
use boxnef::BundleProblem;
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize)]
pub struct ProblemFile {
    pub base: BaseSpec,
    pub fiber_rank: usize,
    pub fan: FanSpec,
    #[serde(rename = "L_hom")]
    pub l_hom: Vec<ClassSpec>,
    #[serde(rename = "L0")]
    pub l0: ClassSpec,
    pub h: Vec<i64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum BaseSpec {
    #[serde(rename = "ExE")]
    ExE,
    #[serde(rename = "hermitian")]
    Hermitian { d: usize, forms: Vec<Vec<Vec<String>>> },
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FanSpec {
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub enum ClassSpec {
    #[serde(rename = "f")]
    F(Vec<String>),
    #[serde(rename = "l")]
    L(Vec<String>),
    #[serde(rename = "ext")]
    Ext(Vec<[String; 2]>),
}

pub fn parse_rat(s: &str) -> Result<Rat, String> {
    rat_parse(s).ok_or_else(|| format!("cannot parse rational '{s}'"))
}

fn parse_class(spec: &ClassSpec, base: &TorusBase) -> Result<NsClass, String> {
    match base {
        TorusBase::ExE => match spec {
            ClassSpec::F(v) => {
                if v.len() != 3 {
                    return Err("divisor-basis class needs three entries".into());
                }
                Ok(NsClass::from_f(parse_rat(&v[0])?, parse_rat(&v[1])?, parse_rat(&v[2])?))
            }
            ClassSpec::L(v) => {
                if v.len() != 3 {
                    return Err("Lorentz-basis class needs three entries".into());
                }
                Ok(NsClass::from_l(parse_rat(&v[0])?, parse_rat(&v[1])?, parse_rat(&v[2])?))
            }
            ClassSpec::Ext(v) => {
                if v.len() != 3 {
                    return Err("ext class needs three coordinate pairs".into());
                }
                let mut coords = Vec::new();
                for [p, q] in v {
                    coords.push(Ext { p: parse_rat(p)?, q: parse_rat(q)? });
                }
                Ok(NsClass::ExE([coords[0].clone(), coords[1].clone(), coords[2].clone()]))
            }
        },
        TorusBase::GenericHermitian { forms, .. } => match spec {
            ClassSpec::F(v) => {
                if v.len() != forms.len() {
                    return Err(format!("class needs {} entries", forms.len()));
                }
                let coords = v.iter().map(|s| parse_rat(s)).collect::<Result<_, _>>()?;
                Ok(NsClass::Generic(coords))
            }
            _ => Err("hermitian-base classes use the \"f\" coefficient form".into()),
        },
    }
}

fn emit_class(cls: &NsClass) -> ClassSpec {
    match cls {
        NsClass::ExE(coords) => {
            if coords.iter().all(|e| e.q == Rat::from_integer(0.into())) {
                ClassSpec::F(coords.iter().map(|e| rat_str(&e.p)).collect())
            } else if let Ok(l) = cls.l_coords() {
                if l.iter().all(|e| e.is_rational().is_some()) {
                    ClassSpec::L(l.iter().map(|e| rat_str(e.is_rational().unwrap())).collect())
                } else {
                    ClassSpec::Ext(
                        coords.iter().map(|e| [rat_str(&e.p), rat_str(&e.q)]).collect(),
                    )
                }
            } else {
                ClassSpec::Ext(coords.iter().map(|e| [rat_str(&e.p), rat_str(&e.q)]).collect())
            }
        }
        NsClass::Generic(coords) => ClassSpec::F(coords.iter().map(rat_str).collect()),
    }
}

fn rat_str(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_problem(file: &ProblemFile) -> Result<BundleProblem, String> {
    let base = match &file.base {
        BaseSpec::ExE => TorusBase::ExE,
        BaseSpec::Hermitian { d, forms } => {
            let parsed: Vec<Vec<Vec<Scalar>>> = forms
                .iter()
                .map(|m| {
                    m.iter()
                        .map(|row| {
                            row.iter()
                                .map(|s| parse_rat(s).map(Scalar::Exact))
                                .collect::<Result<_, _>>()
                        })
                        .collect::<Result<_, _>>()
                })
                .collect::<Result<_, _>>()?;
            TorusBase::GenericHermitian { d: *d, forms: parsed }
        }
    };
    let fan = Fan::new(file.fiber_rank, file.fan.rays.clone(), file.fan.max_cones.clone())
        .map_err(|e| e.to_string())?;
    let l0 = parse_class(&file.l0, &base)?;
    let l_hom = file
        .l_hom
        .iter()
        .map(|c| parse_class(c, &base))
        .collect::<Result<Vec<_>, _>>()?;
    let problem =
        BundleProblem { base, fan, l_hom, l0, h: PlFunction { values: file.h.clone() } };
    problem.validate().map_err(|e| e.to_string())?;
    Ok(problem)
}

pub fn from_problem(problem: &BundleProblem) -> ProblemFile {
    let base = match &problem.base {
        TorusBase::ExE => BaseSpec::ExE,
        TorusBase::GenericHermitian { d, forms } => BaseSpec::Hermitian {
            d: *d,
            forms: forms
                .iter()
                .map(|m| {
                    m.iter()
                        .map(|row| {
                            row.iter()
                                .map(|s| match s.as_exact() {
                                    Some(r) => rat_str(r),
                                    None => format!("{}", s.to_f64()),
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        },
    };
    ProblemFile {
        base,
        fiber_rank: problem.fan.n,
        fan: FanSpec { rays: problem.fan.rays.clone(), max_cones: problem.fan.max_cones.clone() },
        l_hom: problem.l_hom.iter().map(emit_class).collect(),
        l0: emit_class(&problem.l0),
        h: problem.h.values.clone(),
    }
}
