//! Symmetric, homogeneous curvature functions of the principal curvatures.
//!
//! A [`SymmetricCurvature`] is one of the built-in families (mean
//! curvature, `k`-th roots of elementary symmetric polynomials, inverse
//! harmonic sums, Hessian quotients) or a product of rational powers of
//! those, optionally multiplied by a positive constant. Every family has
//! an analytic gradient; finite differences only appear in tests.

mod axioms;
mod spec;
pub mod symmetric;

pub use axioms::{verify_axioms, AxiomReport, ConeSampler};
pub use spec::{FactorSpec, GammaParams, GammaSpec};

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use symmetric::{elementary, elementary_gradient};

/// Largest dimension supported by the built-in families.
pub const MAX_DIM: usize = 16;

/// Bound on numerator and denominator of product exponents; keeps the
/// exact homogeneity arithmetic far from `i64` overflow.
pub const MAX_EXPONENT_PART: i64 = 1_000_000;

/// A vector of principal curvatures. Entries are finite; cone membership
/// is checked separately by the operations that need it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct EigenvalueVector(Vec<f64>);

impl EigenvalueVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Invalid("empty eigenvalue vector".into()));
        }
        if let Some(bad) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::Invalid(format!("non-finite principal curvature {bad}")));
        }
        Ok(Self(values))
    }

    /// The umbilic vector `(c, …, c)`.
    pub fn umbilic(n: usize, c: f64) -> Self {
        Self(vec![c; n])
    }

    /// `(x, y, …, y)` with `n - 1` copies of `y`.
    pub fn split(n: usize, x: f64, y: f64) -> Self {
        let mut v = vec![y; n];
        v[0] = x;
        Self(v)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for EigenvalueVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for EigenvalueVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<EigenvalueVector> for Vec<f64> {
    fn from(v: EigenvalueVector) -> Self {
        v.0
    }
}

/// Positive rational exponent of a product factor, written `p` or `p/q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Exponent(Ratio<i64>);

impl Exponent {
    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::Parse("zero denominator in exponent".into()));
        }
        if numer.abs() > MAX_EXPONENT_PART || denom.abs() > MAX_EXPONENT_PART {
            return Err(Error::Invalid(format!("exponent {numer}/{denom} has oversized terms")));
        }
        let r = Ratio::new(numer, denom);
        if r <= Ratio::from_integer(0) {
            return Err(Error::Invalid(format!("exponent {r} must be positive")));
        }
        Ok(Self(r))
    }

    pub fn integer(p: i64) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<i64>()
                .map_err(|e| Error::Parse(format!("bad exponent {s:?}: {e}")))
        };
        match s.split_once('/') {
            Some((p, q)) => Self::new(parse(p)?, parse(q)?),
            None => Self::new(parse(s)?, 1),
        }
    }
}

impl TryFrom<String> for Exponent {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Exponent> for String {
    fn from(e: Exponent) -> String {
        e.to_string()
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// One factor `γ_f^p` of a product curvature function.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub gamma: SymmetricCurvature,
    pub exponent: Exponent,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    Mean,
    SigmaKRoot { k: usize },
    HarmonicSumInverse { k: usize },
    HessianQuotient { k: usize, l: usize },
    Product(Vec<Factor>),
}

/// Admissible cone of a curvature function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cone {
    /// All entries positive.
    Positive,
    /// `S_1, …, S_k > 0`.
    Garding(usize),
    /// The sum of the `k` smallest entries is positive.
    HalfSum(usize),
    /// Intersection of the listed cones (used for products).
    Intersection(Vec<Cone>),
}

impl Cone {
    /// Membership test. The closed test (`strict = false`) allows a
    /// relative slack of `1e-12` for rounding on the boundary.
    pub fn contains(&self, lambda: &[f64], strict: bool) -> bool {
        let scale = lambda.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        let slack = if strict { 0.0 } else { 1e-12 };
        match self {
            Cone::Positive => lambda.iter().all(|&x| {
                if strict {
                    x > 0.0
                } else {
                    x >= -slack * scale
                }
            }),
            Cone::Garding(k) => {
                let e = symmetric::elementary_all(lambda, *k);
                (1..=*k).all(|l| {
                    if strict {
                        e[l] > 0.0
                    } else {
                        e[l] >= -slack * scale.powi(l as i32) * binomial(lambda.len(), l)
                    }
                })
            }
            Cone::HalfSum(k) => {
                let mut sorted = lambda.to_vec();
                sorted.sort_by(f64::total_cmp);
                let s: f64 = sorted.iter().take(*k).sum();
                if strict {
                    s > 0.0
                } else {
                    s >= -slack * scale * *k as f64
                }
            }
            Cone::Intersection(parts) => parts.iter().all(|c| c.contains(lambda, strict)),
        }
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cone::Positive => write!(f, "positive"),
            Cone::Garding(k) => write!(f, "Garding({k})"),
            Cone::HalfSum(k) => write!(f, "half-sum({k})"),
            Cone::Intersection(parts) => {
                let names: Vec<String> = parts.iter().map(|c| c.to_string()).collect();
                write!(f, "{}", names.join(" ∩ "))
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Behaviour shared by every curvature function the checks operate on.
///
/// The library's own families implement it through [`SymmetricCurvature`];
/// tests implement it for deliberately broken functions to exercise the
/// axiom checker.
pub trait CurvatureFunction {
    fn dim(&self) -> usize;
    fn alpha(&self) -> f64;
    /// Value at a point assumed to lie in the open cone.
    fn value(&self, lambda: &[f64]) -> f64;
    /// Gradient at a point assumed to lie in the open cone.
    fn grad(&self, lambda: &[f64]) -> Vec<f64>;
    fn in_cone(&self, lambda: &[f64], strict: bool) -> bool;
}

/// A curvature function `γ` together with its dimension, homogeneity and cone.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricCurvature {
    kind: Kind,
    n: usize,
    scale: f64,
    alpha: Ratio<i64>,
    cone: Cone,
}

impl SymmetricCurvature {
    pub fn new(kind: Kind, n: usize) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&n) {
            return Err(Error::Invalid(format!("dimension n = {n} outside 2..={MAX_DIM}")));
        }
        let (alpha, cone) = match &kind {
            Kind::Mean => (Ratio::from_integer(1), Cone::Garding(1)),
            Kind::SigmaKRoot { k } => {
                check_k(*k, n)?;
                (Ratio::from_integer(1), Cone::Garding(*k))
            }
            Kind::HarmonicSumInverse { k } => {
                check_k(*k, n)?;
                (Ratio::from_integer(1), Cone::HalfSum(*k))
            }
            Kind::HessianQuotient { k, l } => {
                check_k(*k, n)?;
                if l >= k {
                    return Err(Error::Invalid(format!("Hessian quotient needs l < k, got k={k}, l={l}")));
                }
                (Ratio::from_integer(1), Cone::Garding(*k))
            }
            Kind::Product(factors) => {
                if factors.is_empty() {
                    return Err(Error::Invalid("product needs at least one factor".into()));
                }
                let mut alpha = Ratio::from_integer(0);
                let mut cones = Vec::new();
                for f in factors {
                    if f.gamma.n != n {
                        return Err(Error::DimensionMismatch { expected: n, got: f.gamma.n });
                    }
                    alpha = f
                        .gamma
                        .alpha
                        .checked_mul(&f.exponent.ratio())
                        .and_then(|a| alpha.checked_add(&a))
                        .ok_or_else(|| Error::Invalid("homogeneity degree of the product overflows".into()))?;
                    push_cone(&mut cones, f.gamma.cone.clone());
                }
                let cone = if cones.len() == 1 { cones.pop().unwrap() } else { Cone::Intersection(cones) };
                (alpha, cone)
            }
        };
        Ok(Self { kind, n, scale: 1.0, alpha, cone })
    }

    pub fn mean(n: usize) -> Result<Self> {
        Self::new(Kind::Mean, n)
    }

    pub fn sigma_root(n: usize, k: usize) -> Result<Self> {
        Self::new(Kind::SigmaKRoot { k }, n)
    }

    pub fn harmonic_inverse(n: usize, k: usize) -> Result<Self> {
        Self::new(Kind::HarmonicSumInverse { k }, n)
    }

    pub fn hessian_quotient(n: usize, k: usize, l: usize) -> Result<Self> {
        Self::new(Kind::HessianQuotient { k, l }, n)
    }

    pub fn product(n: usize, factors: Vec<Factor>) -> Result<Self> {
        Self::new(Kind::Product(factors), n)
    }

    /// `H · S_n`, homogeneous of degree `n + 1` and supported in the positive cone.
    pub fn h_times_sn(n: usize) -> Result<Self> {
        Self::product(
            n,
            vec![
                Factor { gamma: Self::mean(n)?, exponent: Exponent::integer(1)? },
                Factor { gamma: Self::sigma_root(n, n)?, exponent: Exponent::integer(n as i64)? },
            ],
        )
    }

    /// `c · γ`; same homogeneity and cone.
    pub fn scaled(mut self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Invalid(format!("scale factor {c} must be positive and finite")));
        }
        self.scale *= c;
        Ok(self)
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Exact homogeneity degree.
    pub fn alpha_exact(&self) -> Ratio<i64> {
        self.alpha
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    /// Short human-readable label, e.g. `H*S_2` or `S_2^(1/2)`.
    pub fn label(&self) -> String {
        let base = match &self.kind {
            Kind::Mean => "H".to_string(),
            Kind::SigmaKRoot { k } => format!("S_{k}^(1/{k})"),
            Kind::HarmonicSumInverse { k } => format!("HarmInv_{k}"),
            Kind::HessianQuotient { k, l } => format!("Q_{k},{l}"),
            Kind::Product(factors) => factors
                .iter()
                .map(|f| {
                    if f.exponent.ratio() == Ratio::from_integer(1) {
                        f.gamma.label()
                    } else {
                        format!("({})^{}", f.gamma.label(), f.exponent)
                    }
                })
                .collect::<Vec<_>>()
                .join("*"),
        };
        if self.scale == 1.0 {
            format!("{base} (n={})", self.n)
        } else {
            format!("{}*{base} (n={})", self.scale, self.n)
        }
    }

    /// Whether `γ` extends continuously by zero to the cone boundary.
    pub fn is_extendable(&self) -> bool {
        match &self.kind {
            Kind::HessianQuotient { .. } => false,
            Kind::Product(factors) => factors.iter().all(|f| f.gamma.is_extendable()),
            _ => true,
        }
    }

    fn check_input(&self, lambda: &[f64]) -> Result<()> {
        if lambda.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: lambda.len() });
        }
        if let Some(bad) = lambda.iter().find(|x| !x.is_finite()) {
            return Err(Error::Invalid(format!("non-finite principal curvature {bad}")));
        }
        Ok(())
    }

    fn violation(&self, lambda: &[f64]) -> Error {
        Error::ConeViolation { lambda: lambda.to_vec(), cone: self.cone.to_string() }
    }

    /// `γ(λ)` for `λ` in the open cone.
    pub fn evaluate(&self, lambda: &[f64]) -> Result<f64> {
        self.check_input(lambda)?;
        if !self.cone.contains(lambda, true) {
            return Err(self.violation(lambda));
        }
        Ok(self.value(lambda))
    }

    /// Analytic gradient for `λ` in the open cone.
    pub fn gradient(&self, lambda: &[f64]) -> Result<EigenvalueVector> {
        self.check_input(lambda)?;
        if !self.cone.contains(lambda, true) {
            return Err(self.violation(lambda));
        }
        Ok(EigenvalueVector(self.grad(lambda)))
    }

    /// Continuous extension to the closed cone, vanishing on its boundary.
    pub fn extend_to_boundary(&self, lambda: &[f64]) -> Result<f64> {
        if !self.is_extendable() {
            return Err(Error::NotExtendable(self.label()));
        }
        self.check_input(lambda)?;
        if !self.cone.contains(lambda, false) {
            return Err(self.violation(lambda));
        }
        Ok(self.scale * self.extended_unscaled(lambda))
    }

    pub fn cone_contains(&self, lambda: &[f64], strict: bool) -> bool {
        lambda.len() == self.n && lambda.iter().all(|x| x.is_finite()) && self.cone.contains(lambda, strict)
    }

    /// `γ(1, …, 1)`.
    pub fn at_ones(&self) -> f64 {
        self.value(&vec![1.0; self.n])
    }

    /// `γ(0, 1, …, 1)` through the boundary extension.
    pub fn gamma0(&self) -> Result<f64> {
        self.extend_to_boundary(&EigenvalueVector::split(self.n, 0.0, 1.0))
    }

    /// Umbilic curvature `c0` with `γ(c0, …, c0) = 1`.
    pub fn umbilic_curvature(&self) -> f64 {
        self.at_ones().powf(-1.0 / self.alpha())
    }

    fn value_unscaled(&self, l: &[f64]) -> f64 {
        match &self.kind {
            Kind::Mean => l.iter().sum(),
            Kind::SigmaKRoot { k } => elementary(l, *k).powf(1.0 / *k as f64),
            Kind::HarmonicSumInverse { k } => {
                let mut total = 0.0;
                for_each_subset(l.len(), *k, |idx| {
                    let s: f64 = idx.iter().map(|&i| l[i]).sum();
                    total += 1.0 / s;
                });
                1.0 / total
            }
            Kind::HessianQuotient { k, l: low } => {
                (elementary(l, *k) / elementary(l, *low)).powf(1.0 / (*k - *low) as f64)
            }
            Kind::Product(factors) => factors
                .iter()
                .map(|f| f.gamma.value(l).powf(f.exponent.to_f64()))
                .product(),
        }
    }

    fn grad_unscaled(&self, l: &[f64]) -> Vec<f64> {
        let n = l.len();
        match &self.kind {
            Kind::Mean => vec![1.0; n],
            Kind::SigmaKRoot { k } => {
                let s = elementary(l, *k);
                let g = s.powf(1.0 / *k as f64);
                let c = g / (*k as f64 * s);
                elementary_gradient(l, *k).into_iter().map(|d| c * d).collect()
            }
            Kind::HarmonicSumInverse { k } => {
                let mut total = 0.0;
                let mut acc = vec![0.0; n];
                for_each_subset(n, *k, |idx| {
                    let s: f64 = idx.iter().map(|&i| l[i]).sum();
                    total += 1.0 / s;
                    let w = 1.0 / (s * s);
                    for &i in idx {
                        acc[i] += w;
                    }
                });
                let g = 1.0 / total;
                acc.into_iter().map(|a| g * g * a).collect()
            }
            Kind::HessianQuotient { k, l: low } => {
                let sk = elementary(l, *k);
                let sl = elementary(l, *low);
                let g = (sk / sl).powf(1.0 / (*k - *low) as f64);
                let dk = elementary_gradient(l, *k);
                let dl = elementary_gradient(l, *low);
                let c = g / (*k - *low) as f64;
                (0..n).map(|i| c * (dk[i] / sk - dl[i] / sl)).collect()
            }
            Kind::Product(factors) => {
                let mut out = vec![0.0; n];
                let mut total = 1.0;
                for f in factors {
                    let p = f.exponent.to_f64();
                    let v = f.gamma.value(l);
                    total *= v.powf(p);
                    let dg = f.gamma.grad(l);
                    for i in 0..n {
                        out[i] += p * dg[i] / v;
                    }
                }
                out.into_iter().map(|d| total * d).collect()
            }
        }
    }

    fn extended_unscaled(&self, l: &[f64]) -> f64 {
        if self.cone.contains(l, true) {
            return self.value_unscaled(l);
        }
        match &self.kind {
            Kind::Mean => l.iter().sum::<f64>().max(0.0),
            Kind::SigmaKRoot { k } => elementary(l, *k).max(0.0).powf(1.0 / *k as f64),
            // some partial sum vanishes, so the harmonic sum diverges
            Kind::HarmonicSumInverse { .. } => 0.0,
            Kind::HessianQuotient { .. } => f64::NAN,
            Kind::Product(factors) => factors
                .iter()
                .map(|f| (f.gamma.scale * f.gamma.extended_unscaled(l)).powf(f.exponent.to_f64()))
                .product(),
        }
    }
}

impl CurvatureFunction for SymmetricCurvature {
    fn dim(&self) -> usize {
        self.n
    }

    fn alpha(&self) -> f64 {
        self.alpha.to_f64().unwrap_or(f64::NAN)
    }

    fn value(&self, lambda: &[f64]) -> f64 {
        self.scale * self.value_unscaled(lambda)
    }

    fn grad(&self, lambda: &[f64]) -> Vec<f64> {
        let mut g = self.grad_unscaled(lambda);
        if self.scale != 1.0 {
            g.iter_mut().for_each(|x| *x *= self.scale);
        }
        g
    }

    fn in_cone(&self, lambda: &[f64], strict: bool) -> bool {
        self.cone_contains(lambda, strict)
    }
}

impl<T: CurvatureFunction + ?Sized> CurvatureFunction for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn alpha(&self) -> f64 {
        (**self).alpha()
    }
    fn value(&self, lambda: &[f64]) -> f64 {
        (**self).value(lambda)
    }
    fn grad(&self, lambda: &[f64]) -> Vec<f64> {
        (**self).grad(lambda)
    }
    fn in_cone(&self, lambda: &[f64], strict: bool) -> bool {
        (**self).in_cone(lambda, strict)
    }
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::Invalid(format!("k = {k} outside 1..={n}")));
    }
    Ok(())
}

fn push_cone(out: &mut Vec<Cone>, cone: Cone) {
    match cone {
        Cone::Intersection(parts) => parts.into_iter().for_each(|c| push_cone(out, c)),
        c => {
            if !out.contains(&c) {
                out.push(c)
            }
        }
    }
}

/// Calls `f` with every strictly increasing index tuple of length `k` in `0..n`.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k == 0 || k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 {
            i -= 1;
            if idx[i] != i + n - k {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return;
            }
        }
    }
}
