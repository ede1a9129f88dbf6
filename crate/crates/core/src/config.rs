//! Weight descriptions read from manifests, and the catalog of built-in
//! families with their known classification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weight::{RadialWeight, WeightDensity, DEFAULT_LOG_CUTOFF};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    Power,
    PowerLog,
    ExpCusp,
    Tabulated,
    Unit,
}

impl WeightKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            WeightKind::Power => "power",
            WeightKind::PowerLog => "power_log",
            WeightKind::ExpCusp => "exp_cusp",
            WeightKind::Tabulated => "tabulated",
            WeightKind::Unit => "unit",
        }
    }
}

fn default_dim() -> usize {
    1
}

/// A radial weight as written in a manifest. The density is the profile in
/// t = |z|²; for d = 1 it is the line density itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub kind: WeightKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default = "default_dim")]
    pub dim: usize,
}

impl WeightConfig {
    pub fn power(alpha: f64) -> WeightConfig {
        WeightConfig {
            kind: WeightKind::Power,
            alpha: Some(alpha),
            beta: None,
            cutoff: None,
            t: None,
            values: None,
            dim: 1,
        }
    }

    pub fn with_dim(mut self, dim: usize) -> WeightConfig {
        self.dim = dim;
        self
    }

    fn need<T: Clone>(v: &Option<T>, name: &str, kind: WeightKind) -> Result<T> {
        v.clone()
            .ok_or_else(|| Error::param(name, format!("required for kind {}", kind.as_str())))
    }

    fn forbid<T>(&self, v: &Option<T>, name: &str) -> Result<()> {
        if v.is_some() {
            return Err(Error::param(name, format!("not a parameter of kind {}", self.kind.as_str())));
        }
        Ok(())
    }

    pub fn profile(&self) -> Result<WeightDensity> {
        let k = self.kind;
        match k {
            WeightKind::Power => {
                self.forbid(&self.beta, "beta")?;
                self.forbid(&self.cutoff, "cutoff")?;
                self.forbid(&self.t, "t")?;
                self.forbid(&self.values, "values")?;
                WeightDensity::power(Self::need(&self.alpha, "alpha", k)?)
            }
            WeightKind::PowerLog => {
                self.forbid(&self.t, "t")?;
                self.forbid(&self.values, "values")?;
                WeightDensity::power_log_with_cutoff(
                    Self::need(&self.alpha, "alpha", k)?,
                    Self::need(&self.beta, "beta", k)?,
                    self.cutoff.unwrap_or(DEFAULT_LOG_CUTOFF),
                )
            }
            WeightKind::ExpCusp => {
                self.forbid(&self.alpha, "alpha")?;
                self.forbid(&self.cutoff, "cutoff")?;
                self.forbid(&self.t, "t")?;
                self.forbid(&self.values, "values")?;
                WeightDensity::exp_cusp(self.beta.unwrap_or(0.0))
            }
            WeightKind::Tabulated => {
                self.forbid(&self.alpha, "alpha")?;
                self.forbid(&self.beta, "beta")?;
                self.forbid(&self.cutoff, "cutoff")?;
                WeightDensity::tabulated(Self::need(&self.t, "t", k)?, Self::need(&self.values, "values", k)?)
            }
            WeightKind::Unit => {
                self.forbid(&self.alpha, "alpha")?;
                self.forbid(&self.beta, "beta")?;
                self.forbid(&self.cutoff, "cutoff")?;
                self.forbid(&self.t, "t")?;
                self.forbid(&self.values, "values")?;
                Ok(WeightDensity::unit())
            }
        }
    }

    pub fn radial(&self) -> Result<RadialWeight> {
        if self.dim == 0 {
            return Err(Error::param("dim", "must be ≥ 1"));
        }
        RadialWeight::from_profile(self.dim, self.profile()?)
    }

    pub fn label(&self) -> String {
        let mut s = self.kind.as_str().to_string();
        let mut args = Vec::new();
        if let Some(a) = self.alpha {
            args.push(format!("alpha={a}"));
        }
        if let Some(b) = self.beta {
            args.push(format!("beta={b}"));
        }
        if let Some(c) = self.cutoff {
            args.push(format!("cutoff={c}"));
        }
        if let Some(t) = &self.t {
            args.push(format!("nodes={}", t.len()));
        }
        if self.dim != 1 {
            args.push(format!("d={}", self.dim));
        }
        if !args.is_empty() {
            s.push('(');
            s.push_str(&args.join(","));
            s.push(')');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSchema {
    pub name: &'static str,
    pub required: bool,
    pub constraint: &'static str,
}

/// Known classification of a family near t = 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    /// Whether the hat ∫_t¹ v is doubling.
    pub doubling: &'static str,
    pub weakly_normal: &'static str,
    pub bekolle_b2: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub kind: WeightKind,
    pub formula: &'static str,
    pub params: Vec<ParamSchema>,
    pub classification: Classification,
}

const DIM: ParamSchema = ParamSchema {
    name: "dim",
    required: false,
    constraint: "integer ≥ 1, default 1",
};

pub fn builtin_weights() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            kind: WeightKind::Power,
            formula: "(1 - t)^alpha",
            params: vec![
                ParamSchema {
                    name: "alpha",
                    required: true,
                    constraint: "alpha > -1",
                },
                DIM,
            ],
            classification: Classification {
                doubling: "doubling, constant 2^(alpha+1)",
                weakly_normal: "weakly normal of order alpha",
                bekolle_b2: "in B2(eta) iff eta > (alpha - 1)/2",
            },
        },
        CatalogEntry {
            kind: WeightKind::PowerLog,
            formula: "(1 - t)^alpha (ln 1/(1 - t))^beta for t >= cutoff, constant below",
            params: vec![
                ParamSchema {
                    name: "alpha",
                    required: true,
                    constraint: "alpha > -1",
                },
                ParamSchema {
                    name: "beta",
                    required: true,
                    constraint: "real",
                },
                ParamSchema {
                    name: "cutoff",
                    required: false,
                    constraint: "0 < cutoff < 1, default 0.5",
                },
                DIM,
            ],
            classification: Classification {
                doubling: "doubling, constant tends to 2^(alpha+1)",
                weakly_normal: "weakly normal of order alpha",
                bekolle_b2: "in B2(eta) for eta > (alpha - 1)/2",
            },
        },
        CatalogEntry {
            kind: WeightKind::ExpCusp,
            formula: "(1 - t)^beta exp(-1/(1 - t))",
            params: vec![
                ParamSchema {
                    name: "beta",
                    required: false,
                    constraint: "real, default 0",
                },
                DIM,
            ],
            classification: Classification {
                doubling: "not doubling",
                weakly_normal: "not weakly normal",
                bekolle_b2: "in no B2(eta)",
            },
        },
        CatalogEntry {
            kind: WeightKind::Tabulated,
            formula: "log-linear interpolation of (t, values)",
            params: vec![
                ParamSchema {
                    name: "t",
                    required: true,
                    constraint: "increasing nodes in [0, 1]",
                },
                ParamSchema {
                    name: "values",
                    required: true,
                    constraint: "nonnegative, one per node",
                },
                DIM,
            ],
            classification: Classification {
                doubling: "determined by the data",
                weakly_normal: "determined by the data",
                bekolle_b2: "determined by the data",
            },
        },
        CatalogEntry {
            kind: WeightKind::Unit,
            formula: "1",
            params: vec![DIM],
            classification: Classification {
                doubling: "doubling, constant 2",
                weakly_normal: "weakly normal of order 0",
                bekolle_b2: "in B2(eta) iff eta > -1/2",
            },
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_annotations() {
        let cat = builtin_weights();
        for k in [WeightKind::Power, WeightKind::PowerLog, WeightKind::ExpCusp, WeightKind::Tabulated] {
            assert!(cat.iter().any(|e| e.kind == k));
        }
        let cusp = cat.iter().find(|e| e.kind == WeightKind::ExpCusp).unwrap();
        assert_eq!(cusp.classification.weakly_normal, "not weakly normal");
        let p = cat.iter().find(|e| e.kind == WeightKind::Power).unwrap();
        assert_eq!(p.classification.weakly_normal, "weakly normal of order alpha");
    }

    #[test]
    fn parameter_validation() {
        assert!(WeightConfig::power(0.5).radial().is_ok());
        let mut bad = WeightConfig::power(0.5);
        bad.beta = Some(1.0);
        assert!(bad.profile().is_err());
        bad.kind = WeightKind::PowerLog;
        bad.alpha = None;
        assert!(bad.profile().is_err());
        assert!(WeightConfig::power(-1.0).profile().is_err());
        assert_eq!(WeightConfig::power(1.0).with_dim(2).label(), "power(alpha=1,d=2)");
    }
}
