//! JSON description of a curvature function.
//!
//! ```json
//! {"kind": "product", "n": 2,
//!  "params": {"factors": [
//!     {"gamma": {"kind": "mean"}, "exponent": "1"},
//!     {"gamma": {"kind": "sigma-root", "params": {"k": 2}}, "exponent": "2"}]}}
//! ```
//!
//! `kind` is one of `mean`, `sigma-root` (param `k`), `harmonic-inverse`
//! (param `k`), `hessian-quotient` (params `k`, `l`), `product` (param
//! `factors`) or the alias `h-times-sn`. Factors inherit `n` from the
//! enclosing spec. `scale` is an optional positive multiplier. Converting a
//! parsed spec back with [`GammaSpec::from`] yields the canonical form,
//! which round-trips exactly.

use serde::{Deserialize, Serialize};

use super::{Exponent, Factor, Kind, SymmetricCurvature};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "GammaParams::is_empty")]
    pub params: GammaParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<FactorSpec>>,
}

impl GammaParams {
    fn is_empty(&self) -> bool {
        self.k.is_none() && self.l.is_none() && self.factors.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub gamma: GammaSpec,
    pub exponent: Exponent,
}

/// Nesting limit for product factors.
const MAX_DEPTH: usize = 8;

impl GammaSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("gamma spec serializes")
    }

    pub fn build(&self) -> Result<SymmetricCurvature> {
        let n = self.n.ok_or_else(|| Error::Invalid("gamma spec needs `n`".into()))?;
        self.build_in(n, 0)
    }

    fn build_in(&self, n: usize, depth: usize) -> Result<SymmetricCurvature> {
        if depth > MAX_DEPTH {
            return Err(Error::Invalid("product factors nested too deeply".into()));
        }
        if let Some(m) = self.n {
            if m != n {
                return Err(Error::DimensionMismatch { expected: n, got: m });
            }
        }
        let need = |name: &str, v: Option<usize>| {
            v.ok_or_else(|| Error::Invalid(format!("kind {:?} needs parameter `{name}`", self.kind)))
        };
        let unexpected = |ok: [bool; 3]| -> Result<()> {
            let p = &self.params;
            let given = [p.k.is_some(), p.l.is_some(), p.factors.is_some()];
            for (name, (g, allowed)) in ["k", "l", "factors"].iter().zip(given.iter().zip(ok)) {
                if *g && !allowed {
                    return Err(Error::Invalid(format!("kind {:?} does not take `{name}`", self.kind)));
                }
            }
            Ok(())
        };
        let gamma = match self.kind.as_str() {
            "mean" => {
                unexpected([false, false, false])?;
                SymmetricCurvature::mean(n)?
            }
            "sigma-root" => {
                unexpected([true, false, false])?;
                SymmetricCurvature::sigma_root(n, need("k", self.params.k)?)?
            }
            "harmonic-inverse" => {
                unexpected([true, false, false])?;
                SymmetricCurvature::harmonic_inverse(n, need("k", self.params.k)?)?
            }
            "hessian-quotient" => {
                unexpected([true, true, false])?;
                SymmetricCurvature::hessian_quotient(n, need("k", self.params.k)?, need("l", self.params.l)?)?
            }
            "h-times-sn" => {
                unexpected([false, false, false])?;
                SymmetricCurvature::h_times_sn(n)?
            }
            "product" => {
                unexpected([false, false, true])?;
                let specs = self.params.factors.as_ref().ok_or_else(|| {
                    Error::Invalid("kind \"product\" needs parameter `factors`".into())
                })?;
                let factors = specs
                    .iter()
                    .map(|f| Ok(Factor { gamma: f.gamma.build_in(n, depth + 1)?, exponent: f.exponent }))
                    .collect::<Result<Vec<_>>>()?;
                SymmetricCurvature::product(n, factors)?
            }
            other => return Err(Error::Invalid(format!("unknown curvature kind {other:?}"))),
        };
        match self.scale {
            Some(c) => gamma.scaled(c),
            None => Ok(gamma),
        }
    }

    fn canonical(g: &SymmetricCurvature, with_n: bool) -> Self {
        let mut params = GammaParams::default();
        let kind = match g.kind() {
            Kind::Mean => "mean",
            Kind::SigmaKRoot { k } => {
                params.k = Some(*k);
                "sigma-root"
            }
            Kind::HarmonicSumInverse { k } => {
                params.k = Some(*k);
                "harmonic-inverse"
            }
            Kind::HessianQuotient { k, l } => {
                params.k = Some(*k);
                params.l = Some(*l);
                "hessian-quotient"
            }
            Kind::Product(factors) => {
                params.factors = Some(
                    factors
                        .iter()
                        .map(|f| FactorSpec { gamma: Self::canonical(&f.gamma, false), exponent: f.exponent })
                        .collect(),
                );
                "product"
            }
        };
        Self {
            kind: kind.to_string(),
            n: with_n.then_some(g.n()),
            params,
            scale: (g.scale() != 1.0).then_some(g.scale()),
        }
    }
}

impl From<&SymmetricCurvature> for GammaSpec {
    fn from(g: &SymmetricCurvature) -> Self {
        Self::canonical(g, true)
    }
}

impl TryFrom<&GammaSpec> for SymmetricCurvature {
    type Error = Error;
    fn try_from(spec: &GammaSpec) -> Result<Self> {
        spec.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_example() {
        let text = r#"{"kind": "product", "n": 2,
            "params": {"factors": [
                {"gamma": {"kind": "mean"}, "exponent": "1"},
                {"gamma": {"kind": "sigma-root", "params": {"k": 2}}, "exponent": "2"}]}}"#;
        let g = GammaSpec::from_json(text).unwrap().build().unwrap();
        assert_eq!(g, SymmetricCurvature::h_times_sn(2).unwrap());
    }

    #[test]
    fn alias_canonicalizes_to_product() {
        let g = GammaSpec::from_json(r#"{"kind":"h-times-sn","n":3}"#).unwrap().build().unwrap();
        let spec = GammaSpec::from(&g);
        assert_eq!(spec.kind, "product");
        assert_eq!(spec.build().unwrap(), g);
    }

    #[test]
    fn rejects_malformed_specs() {
        for text in [
            r#"{"kind":"mean"}"#,
            r#"{"kind":"sigma-root","n":3}"#,
            r#"{"kind":"mean","n":3,"params":{"k":1}}"#,
            r#"{"kind":"warp","n":3}"#,
            r#"{"kind":"mean","n":3,"extra":1}"#,
            r#"{"kind":"product","n":2,"params":{"factors":[{"gamma":{"kind":"mean","n":3},"exponent":"1"}]}}"#,
            r#"{"kind":"product","n":2,"params":{"factors":[{"gamma":{"kind":"mean"},"exponent":"-1"}]}}"#,
            r#"{"kind":"mean","n":3,"scale":0}"#,
        ] {
            assert!(GammaSpec::from_json(text).and_then(|s| s.build()).is_err(), "{text}");
        }
    }
}
