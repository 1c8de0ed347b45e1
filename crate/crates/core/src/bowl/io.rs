//! Profile export.
//!
//! The CSV has the header `r,v,u,lambda1,lambdatan` and one row per node.
//! Every value is written in Rust's shortest round-trip exponent form
//! (`{:e}`, e.g. `1.5e0`, `-2.25e-3`, `0e0`), so parsing a file gives back
//! the exact doubles. Non-finite values are written as `inf` or `NaN`.

use serde::{Deserialize, Serialize};

use super::{
    blow_up_radius, curvature_asymptotics, entire_growth_coefficient, BlowUpRadius, CylinderReport, GrowthFit,
    ProfileSolution, ProfileStatus, SolverConfig,
};
use crate::curvature::{GammaSpec, SymmetricCurvature};
use crate::error::{Error, Result};

pub const PROFILE_CSV_HEADER: &str = "r,v,u,lambda1,lambdatan";

/// Parsed CSV columns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProfileTable {
    pub r: Vec<f64>,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub lambda1: Vec<f64>,
    pub lambdatan: Vec<f64>,
}

fn write_csv(cols: [&[f64]; 5]) -> String {
    let rows = cols[0].len();
    let mut out = String::with_capacity(64 * (rows + 1));
    out.push_str(PROFILE_CSV_HEADER);
    out.push('\n');
    for i in 0..rows {
        out.push_str(&format!("{:e},{:e},{:e},{:e},{:e}\n", cols[0][i], cols[1][i], cols[2][i], cols[3][i], cols[4][i]));
    }
    out
}

impl ProfileSolution {
    pub fn to_csv(&self) -> String {
        write_csv([&self.r, &self.v, &self.u, &self.lambda_radial, &self.lambda_tangential])
    }
}

impl ProfileTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == PROFILE_CSV_HEADER => {}
            Some((_, h)) => return Err(Error::Parse(format!("unexpected header {h:?}"))),
            None => return Err(Error::Parse("empty profile".into())),
        }
        let mut t = ProfileTable::default();
        for (no, line) in lines {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 5 {
                return Err(Error::Parse(format!("line {}: expected 5 fields, got {}", no + 1, fields.len())));
            }
            let mut vals = [0.0; 5];
            for (slot, f) in vals.iter_mut().zip(&fields) {
                *slot = f.parse().map_err(|_| Error::Parse(format!("line {}: bad number {f:?}", no + 1)))?;
            }
            t.r.push(vals[0]);
            t.v.push(vals[1]);
            t.u.push(vals[2]);
            t.lambda1.push(vals[3]);
            t.lambdatan.push(vals[4]);
        }
        Ok(t)
    }

    pub fn to_csv(&self) -> String {
        write_csv([&self.r, &self.v, &self.u, &self.lambda1, &self.lambdatan])
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// Run metadata written next to the CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileMetadata {
    pub version: String,
    pub gamma: GammaSpec,
    pub label: String,
    pub alpha: f64,
    pub c0: f64,
    pub epsilon: f64,
    pub config: SolverConfig,
    pub status: ProfileStatus,
    pub nodes: usize,
    pub max_translator_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blow_up: Option<BlowUpRadius>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotics: Option<CylinderReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthFit>,
}

impl ProfileMetadata {
    /// Collects the run parameters and whichever end analysis applies.
    /// An analysis whose precondition fails is left out.
    pub fn new(sol: &ProfileSolution, gamma: &SymmetricCurvature) -> Self {
        let ball = sol.is_ball();
        Self {
            version: crate::VERSION.to_string(),
            gamma: sol.gamma.clone(),
            label: gamma.label(),
            alpha: sol.alpha,
            c0: sol.c0,
            epsilon: sol.epsilon,
            config: sol.config.clone(),
            status: sol.status,
            nodes: sol.len(),
            max_translator_residual: sol.max_translator_residual(gamma),
            blow_up: if ball { blow_up_radius(sol).ok() } else { None },
            asymptotics: if ball { curvature_asymptotics(sol).ok() } else { None },
            growth: if ball { None } else { entire_growth_coefficient(sol, gamma).ok() },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metadata serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bowl::{integrate_profile, SolverConfig};
    use crate::curvature::SymmetricCurvature;

    #[test]
    fn csv_round_trips_bit_exactly() {
        let g = SymmetricCurvature::mean(2).unwrap();
        let sol = integrate_profile(&g, &SolverConfig { r_budget: Some(3.0), ..Default::default() }).unwrap();
        let text = sol.to_csv();
        assert!(text.starts_with("r,v,u,lambda1,lambdatan\n0e0,0e0,0e0,"));
        let t = ProfileTable::parse(&text).unwrap();
        assert_eq!(t.len(), sol.len());
        assert_eq!(t.r, sol.r);
        assert_eq!(t.v, sol.v);
        assert_eq!(t.lambdatan, sol.lambda_tangential);
        assert_eq!(t.to_csv(), text);
    }

    #[test]
    fn metadata_picks_the_matching_analysis() {
        let g = SymmetricCurvature::h_times_sn(2).unwrap();
        let sol = integrate_profile(&g, &SolverConfig::default()).unwrap();
        let m = ProfileMetadata::new(&sol, &g);
        assert!(m.blow_up.is_some() && m.asymptotics.is_some() && m.growth.is_none());
        assert_eq!(m.nodes, sol.len());
        let back: ProfileMetadata = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_malformed_csv() {
        for text in ["", "r,v\n1,2\n", "r,v,u,lambda1,lambdatan\n1,2,3\n", "r,v,u,lambda1,lambdatan\n1,2,x,4,5\n"] {
            assert!(ProfileTable::parse(text).is_err(), "{text:?}");
        }
        let t = ProfileTable::parse("r,v,u,lambda1,lambdatan\n1e0,inf,2.5e-1,0e0,1e0\n").unwrap();
        assert!(t.v[0].is_infinite());
    }
}
