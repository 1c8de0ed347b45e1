use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::CurvatureFunction;

/// Draws points strictly inside a curvature function's cone.
///
/// Entry magnitudes are log-uniform in `[min_magnitude, max_magnitude]`;
/// a fraction of entries is given a negative sign so that cones larger
/// than the positive cone are explored. A candidate is kept only if it
/// remains in the open cone after being pushed towards the boundary by
/// `margin · max|λ_i|` along `(1, …, 1)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeSampler {
    pub count: usize,
    pub seed: u64,
    pub min_magnitude: f64,
    pub max_magnitude: f64,
    pub negative_fraction: f64,
    pub margin: f64,
}

impl Default for ConeSampler {
    fn default() -> Self {
        Self {
            count: 1000,
            seed: 0x5eed,
            min_magnitude: 0.1,
            max_magnitude: 10.0,
            negative_fraction: 0.25,
            margin: 0.05,
        }
    }
}

impl ConeSampler {
    pub fn with_count(count: usize, seed: u64) -> Self {
        Self { count, seed, ..Self::default() }
    }

    pub fn sample<F: CurvatureFunction>(&self, f: &F) -> Vec<Vec<f64>> {
        let n = f.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let (lo, hi) = (self.min_magnitude.ln(), self.max_magnitude.ln());
        let mut out = Vec::with_capacity(self.count);
        let mut attempts = 0usize;
        while out.len() < self.count {
            attempts += 1;
            // give up on negative entries if the cone rejects them persistently
            let neg = if attempts > 200 * self.count.max(1) { 0.0 } else { self.negative_fraction };
            let lambda: Vec<f64> = (0..n)
                .map(|_| {
                    let m = rng.gen_range(lo..=hi).exp();
                    if rng.gen::<f64>() < neg {
                        -m
                    } else {
                        m
                    }
                })
                .collect();
            let big = lambda.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            let pushed: Vec<f64> = lambda.iter().map(|x| x - self.margin * big).collect();
            if f.in_cone(&lambda, true) && f.in_cone(&pushed, true) {
                out.push(lambda);
            }
        }
        out
    }
}

/// Worst observed violations of the structural properties of a curvature
/// function over a cone sample. Violations are relative errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub samples: usize,
    pub symmetry: f64,
    pub euler: f64,
    /// Smallest gradient component seen, divided by the gradient norm.
    pub min_gradient_component: f64,
    pub gradient_positivity_failures: usize,
    pub homogeneity: f64,
}

impl AxiomReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.symmetry <= tol
            && self.euler <= tol
            && self.gradient_positivity_failures == 0
            && self.homogeneity <= tol
    }
}

/// Measures permutation symmetry, the Euler identity `⟨∇γ, λ⟩ = αγ`,
/// gradient positivity and `γ(cλ) = c^α γ(λ)` for `c ∈ [0.1, 10]`.
pub fn verify_axioms<F: CurvatureFunction>(f: &F, sampler: &ConeSampler) -> AxiomReport {
    let alpha = f.alpha();
    let points = sampler.sample(f);
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut report = AxiomReport {
        samples: points.len(),
        symmetry: 0.0,
        euler: 0.0,
        min_gradient_component: f64::INFINITY,
        gradient_positivity_failures: 0,
        homogeneity: 0.0,
    };
    for lambda in &points {
        let value = f.value(lambda);
        let scale = value.abs().max(f64::MIN_POSITIVE);

        let mut permuted = lambda.clone();
        permuted.shuffle(&mut rng);
        report.symmetry = report.symmetry.max((f.value(&permuted) - value).abs() / scale);

        let grad = f.grad(lambda);
        let dot: f64 = grad.iter().zip(lambda).map(|(g, l)| g * l).sum();
        report.euler = report.euler.max((dot - alpha * value).abs() / (alpha * scale));

        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        for &g in &grad {
            if !(g > 0.0) {
                report.gradient_positivity_failures += 1;
            }
            report.min_gradient_component = report.min_gradient_component.min(g / norm);
        }

        let c = rng.gen_range(0.1f64.ln()..=10f64.ln()).exp();
        let scaled: Vec<f64> = lambda.iter().map(|x| c * x).collect();
        let expect = c.powf(alpha) * value;
        report.homogeneity = report.homogeneity.max((f.value(&scaled) - expect).abs() / expect.abs());
    }
    report
}
