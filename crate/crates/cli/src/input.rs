//! JSON input documents: function specs, domain presets and typed field access.

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;
use slicereg::domains::{gamma_tube, CassiniRegion, DomainSpec};
use slicereg::douren::{self, DourenConfig};
use slicereg::error::{Result, SliceError};
use slicereg::poly::{QPoly, QRational, RealPoly};
use slicereg::quaternion::{ImaginaryUnit, Quaternion};
use slicereg::series::{eval_spherical, SphericalSeries};
use slicereg::slicefn::SliceFunction;

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "preset", rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainPreset {
    Ball {
        center: Quaternion,
        radius: f64,
    },
    Cassini {
        x0: f64,
        y0: f64,
        #[serde(default)]
        r1: Option<f64>,
        r2: f64,
    },
    Tube {
        samples: Vec<Quaternion>,
        eps: f64,
    },
    Douren {
        #[serde(default)]
        unit: Option<ImaginaryUnit>,
    },
}

impl DomainPreset {
    pub fn build(&self) -> Result<DomainSpec> {
        Ok(match self {
            DomainPreset::Ball { center, radius } => DomainSpec::ball(*center, *radius),
            DomainPreset::Cassini { x0, y0, r1, r2 } => DomainSpec::cassini(CassiniRegion { x0: *x0, y0: *y0, r1: *r1, r2: *r2 }),
            DomainPreset::Tube { samples, eps } => DomainSpec::new(gamma_tube(samples.clone(), *eps)?),
            DomainPreset::Douren { unit } => DomainSpec::new(douren::Omega(douren_config(*unit, None))),
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FunctionSpec {
    Poly {
        coeffs: Vec<Quaternion>,
        #[serde(default)]
        domain: Option<DomainPreset>,
    },
    Rational {
        num: Vec<Quaternion>,
        den: Vec<f64>,
    },
    /// One of the fixtures `f`, `d`, `g`, `l`, `m`, `h`, or `f_t` when `t` is set.
    Douren {
        #[serde(default)]
        unit: Option<ImaginaryUnit>,
        #[serde(default = "default_fixture")]
        fixture: String,
        #[serde(default)]
        i0: Option<ImaginaryUnit>,
        #[serde(default)]
        t: Option<f64>,
    },
    Series {
        series: SphericalSeries,
    },
}

fn default_fixture() -> String {
    "f".into()
}

pub fn douren_config(unit: Option<ImaginaryUnit>, tol: Option<f64>) -> DourenConfig {
    let mut cfg = DourenConfig::new(unit.unwrap_or(ImaginaryUnit::I));
    if let Some(t) = tol {
        cfg.tol = t;
    }
    cfg
}

impl FunctionSpec {
    pub fn build(&self) -> Result<SliceFunction> {
        match self {
            FunctionSpec::Poly { coeffs, domain } => {
                let p = QPoly::new(coeffs.clone());
                Ok(match domain {
                    Some(d) => SliceFunction::poly_on(p, d.build()?),
                    None => SliceFunction::poly(p),
                })
            }
            FunctionSpec::Rational { num, den } => {
                Ok(SliceFunction::rational(QRational::new(QPoly::new(num.clone()), RealPoly::new(den.clone()))?))
            }
            FunctionSpec::Douren { unit, fixture, i0, t } => {
                let cfg = douren_config(*unit, None);
                if let Some(t) = t {
                    return douren::douren_ft(cfg, *t);
                }
                if fixture == "f" {
                    return Ok(douren::douren_f(cfg));
                }
                let fx = douren::fixtures(&cfg, *i0)?;
                Ok(match fixture.as_str() {
                    "d" => fx.d,
                    "g" => fx.g,
                    "l" => fx.ell,
                    "m" => fx.m,
                    "h" => fx.h,
                    other => return Err(SliceError::InvalidInput(format!("unknown fixture `{other}`"))),
                })
            }
            FunctionSpec::Series { series } => {
                let s = series.clone();
                let dom = DomainSpec::cassini(s.cassini);
                Ok(SliceFunction::sampled(dom, "series", move |q: &Quaternion| eval_spherical(&s, q)))
            }
        }
    }

    /// The domain before singular sets were removed: what a singularity's
    /// cap is resolved in.
    pub fn base_region(&self) -> Result<DomainSpec> {
        match self {
            FunctionSpec::Poly { domain: Some(d), .. } => d.build(),
            FunctionSpec::Douren { unit, .. } => Ok(DomainSpec::new(douren::Omega(douren_config(*unit, None)))),
            FunctionSpec::Series { series } => Ok(DomainSpec::cassini(series.cassini)),
            _ => Ok(DomainSpec::whole()),
        }
    }

    pub fn poly(&self) -> Option<QPoly> {
        match self {
            FunctionSpec::Poly { coeffs, domain: None } => Some(QPoly::new(coeffs.clone())),
            _ => None,
        }
    }

    pub fn rational(&self) -> Option<QRational> {
        match self {
            FunctionSpec::Poly { coeffs, domain: None } => Some(QRational::from_poly(QPoly::new(coeffs.clone()))),
            FunctionSpec::Rational { num, den } => QRational::new(QPoly::new(num.clone()), RealPoly::new(den.clone())).ok(),
            _ => None,
        }
    }
}

/// Reads `--input`: inline JSON when it starts with `{`, a file path otherwise.
pub fn load(arg: Option<&str>) -> Result<Value> {
    let Some(a) = arg else { return Ok(Value::Object(Default::default())) };
    let text = if a.trim_start().starts_with('{') {
        a.to_string()
    } else {
        std::fs::read_to_string(a).map_err(|e| SliceError::InvalidInput(format!("cannot read {a}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| SliceError::InvalidInput(format!("bad JSON: {e}")))
}

pub fn field<T: DeserializeOwned>(doc: &Value, key: &str) -> Result<T> {
    let v = doc.get(key).ok_or_else(|| SliceError::InvalidInput(format!("missing field `{key}`")))?;
    serde_json::from_value(v.clone()).map_err(|e| SliceError::InvalidInput(format!("field `{key}`: {e}")))
}

pub fn opt<T: DeserializeOwned>(doc: &Value, key: &str) -> Result<Option<T>> {
    match doc.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(_) => field(doc, key).map(Some),
    }
}

pub fn function(doc: &Value, key: &str) -> Result<(FunctionSpec, SliceFunction)> {
    let spec: FunctionSpec = field(doc, key)?;
    let f = spec.build()?;
    Ok((spec, f))
}

/// `points` as a list, or a single `point`.
pub fn points(doc: &Value) -> Result<Vec<Quaternion>> {
    if let Some(p) = opt::<Vec<Quaternion>>(doc, "points")? {
        return Ok(p);
    }
    Ok(opt::<Quaternion>(doc, "point")?.into_iter().collect())
}

/// Parses `NxM`.
pub fn grid(s: &str) -> Result<(usize, usize)> {
    let bad = || SliceError::InvalidInput(format!("grid `{s}` is not of the form NxM"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let (n, m) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if n == 0 || m == 0 {
        return Err(bad());
    }
    Ok((n, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn grid_parsing() {
        assert_eq!(grid("12x7").unwrap(), (12, 7));
        assert!(grid("12").is_err());
        assert!(grid("0x3").is_err());
    }

    #[test]
    fn poly_spec_evaluates() {
        let doc = json!({"f": {"kind": "poly", "coeffs": [[0, 0, 0, 1], [0, -1, -1, 0], [1, 0, 0, 0]]}});
        let (_, f) = function(&doc, "f").unwrap();
        assert!(f.eval(&Quaternion::I).unwrap().norm() < 1e-15);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let doc = json!({"f": {"kind": "poly", "coefs": [[1, 0, 0, 0]]}});
        assert!(matches!(function(&doc, "f"), Err(SliceError::InvalidInput(_))));
    }

    #[test]
    fn domain_presets_build() {
        let doc = json!({"d": {"preset": "cassini", "x0": 0.0, "y0": 1.0, "r2": 0.5}});
        let d: DomainPreset = field(&doc, "d").unwrap();
        let dom = d.build().unwrap();
        assert!(dom.contains(&Quaternion::J));
        assert!(!dom.contains(&Quaternion::real(3.0)));
    }
}
