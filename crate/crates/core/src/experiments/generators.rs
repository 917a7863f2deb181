//! Synthetic scenario generators.

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::rng::{derive_seed, rng_from_seed, TAG_EVAL};

/// Gaussian AR(1) features with `corr(X_a, X_b) = rho^|a-b|`, the first `s`
/// coefficients equal to one and noise scaled to the requested SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinearScenario {
    pub n: usize,
    pub n_test: usize,
    pub p: usize,
    pub s: usize,
    pub rho: f64,
    pub snr: f64,
    pub seed: u64,
}

impl Default for LinearScenario {
    fn default() -> Self {
        Self {
            n: 500,
            n_test: 1000,
            p: 20,
            s: 10,
            rho: 0.35,
            snr: 1.0,
            seed: 0,
        }
    }
}

impl LinearScenario {
    /// Population variance of the linear signal, `beta' Sigma beta`.
    pub fn signal_variance(&self) -> f64 {
        let s = self.s.min(self.p);
        let mut v = 0.0;
        for a in 0..s {
            for b in 0..s {
                v += self.rho.powi((a as i32 - b as i32).abs());
            }
        }
        v
    }

    pub fn noise_variance(&self) -> f64 {
        self.signal_variance() / self.snr
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn with_snr(&self, snr: f64) -> Self {
        Self { snr, ..self.clone() }
    }

    fn draw(&self, n: usize, seed: u64) -> Dataset {
        let mut rng = rng_from_seed(seed);
        let noise_sd = self.noise_variance().sqrt();
        let innov = (1.0 - self.rho * self.rho).sqrt();
        let mut columns = vec![Vec::with_capacity(n); self.p];
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let mut prev = 0.0;
            let mut signal = 0.0;
            for (a, col) in columns.iter_mut().enumerate() {
                let e: f64 = StandardNormal.sample(&mut rng);
                let x = if a == 0 { e } else { self.rho * prev + innov * e };
                prev = x;
                if a < self.s {
                    signal += x;
                }
                col.push(x);
            }
            let eps: f64 = StandardNormal.sample(&mut rng);
            y.push(signal + noise_sd * eps);
        }
        Dataset::from_numeric(columns, y).expect("generated data is well formed")
    }
}

/// Training and test sets for a linear scenario.
pub fn gen_linear(sc: &LinearScenario) -> (Dataset, Dataset) {
    (
        sc.draw(sc.n, sc.seed),
        sc.draw(sc.n_test, derive_seed(sc.seed, TAG_EVAL, 0)),
    )
}

/// `x1, x2` bivariate normal with correlation `rho`, `x3` independent,
/// `y = x1 + x3 + noise`: `x2` carries no signal given `x1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatedPair {
    pub n: usize,
    pub rho: f64,
    pub noise_sd: f64,
    pub seed: u64,
}

pub const CORRELATED_PAIR_NOISE_SD: f64 = 0.5;

impl CorrelatedPair {
    pub fn generate(&self) -> Dataset {
        let mut rng = rng_from_seed(self.seed);
        let innov = (1.0 - self.rho * self.rho).sqrt();
        let noise = Normal::new(0.0, self.noise_sd).expect("noise sd is finite");
        let (mut x1, mut x2, mut x3, mut y) = (vec![], vec![], vec![], vec![]);
        for _ in 0..self.n {
            let a: f64 = StandardNormal.sample(&mut rng);
            let e: f64 = StandardNormal.sample(&mut rng);
            let c: f64 = StandardNormal.sample(&mut rng);
            x1.push(a);
            x2.push(self.rho * a + innov * e);
            x3.push(c);
            y.push(a + c + noise.sample(&mut rng));
        }
        Dataset::from_numeric(vec![x1, x2, x3], y).expect("generated data is well formed")
    }
}

pub fn gen_correlated_null_pair(n: usize, rho: f64, seed: u64) -> Dataset {
    CorrelatedPair {
        n,
        rho,
        noise_sd: CORRELATED_PAIR_NOISE_SD,
        seed,
    }
    .generate()
}

/// Feature `i` uniform over `distinct_counts[i]` values; pure-noise response.
pub fn gen_cardinality(n: usize, distinct_counts: &[usize], seed: u64) -> Dataset {
    let mut rng = rng_from_seed(seed);
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(n); distinct_counts.len()];
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        for (col, &c) in columns.iter_mut().zip(distinct_counts) {
            col.push(rng.random_range(0..c.max(1)) as f64);
        }
        y.push(StandardNormal.sample(&mut rng));
    }
    let names = distinct_counts
        .iter()
        .enumerate()
        .map(|(i, c)| format!("f{}_{}", i + 1, c))
        .collect();
    Dataset::new(names, vec![crate::data::FeatureKind::Numeric; distinct_counts.len()], columns, y)
        .expect("generated data is well formed")
}

/// Mean surface in the first two features of [`gen_surface`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Surface {
    /// `x1 + x2`: no interaction.
    Additive,
    /// `x1 * x2`: pure interaction.
    Product,
}

impl Surface {
    pub fn eval(self, x1: f64, x2: f64) -> f64 {
        match self {
            Surface::Additive => x1 + x2,
            Surface::Product => x1 * x2,
        }
    }

    /// Variance of the surface under independent standard normal inputs.
    pub fn variance(self) -> f64 {
        match self {
            Surface::Additive => 2.0,
            Surface::Product => 1.0,
        }
    }
}

/// `p >= 2` independent standard normal features with the response
/// depending on the first two through `surface`, at the given SNR.
pub fn gen_surface(n: usize, p: usize, surface: Surface, snr: f64, seed: u64) -> Dataset {
    let mut rng = rng_from_seed(seed);
    let noise_sd = (surface.variance() / snr).sqrt();
    let p = p.max(2);
    let mut columns = vec![Vec::with_capacity(n); p];
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        for col in columns.iter_mut() {
            col.push(StandardNormal.sample(&mut rng));
        }
        let eps: f64 = StandardNormal.sample(&mut rng);
        let (a, b) = (columns[0][columns[0].len() - 1], columns[1][columns[1].len() - 1]);
        y.push(surface.eval(a, b) + noise_sd * eps);
    }
    Dataset::from_numeric(columns, y).expect("generated data is well formed")
}
