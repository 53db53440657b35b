//! Location-scale data generator with analytically known conditional
//! quantiles, for consistency and calibration testing.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::design::{ColumnMeta, DesignMatrix};
use crate::error::{Error, Result};
use crate::features::{
    CovariateKind, CovariateSchema, CovariateSpec, Dataset, Observation, ResponseSpec, Transform,
    Value,
};
use crate::qr::Tau;
use crate::stats::normal_quantile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    Gaussian,
    Laplace,
}

/// Specification of the model
///
/// ```text
/// y = x' beta_true + (1 + hetero_gamma * x_1) * noise_scale * eps
/// ```
///
/// with covariates drawn uniformly on (0, 1) and `eps` a standard draw of
/// the chosen noise family. The conditional tau-quantile plane is then
/// `beta_true` shifted in the intercept and the x_1 slope only, which
/// [`SyntheticSpec::true_beta`] returns in closed form.
#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub n: usize,
    /// Intercept followed by the p covariate slopes.
    pub beta_true: Vec<f64>,
    /// Scale slope on the first covariate; 0 gives homoscedastic noise.
    pub hetero_gamma: f64,
    pub noise: NoiseKind,
    /// Scale parameter of the noise family (sigma for gaussian, b for
    /// laplace).
    pub noise_scale: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn p(&self) -> usize {
        self.beta_true.len() - 1
    }

    fn validate(&self) -> Result<()> {
        if self.beta_true.is_empty() {
            return Err(Error::schema("beta_true must include the intercept"));
        }
        if self.n < self.beta_true.len() {
            return Err(Error::schema("need at least as many rows as coefficients"));
        }
        if !(self.noise_scale > 0.0) {
            return Err(Error::schema("noise_scale must be positive"));
        }
        Ok(())
    }

    /// Quantile of the noise term at level `tau`.
    pub fn noise_quantile(&self, tau: Tau) -> f64 {
        let t = tau.value();
        match self.noise {
            NoiseKind::Gaussian => self.noise_scale * normal_quantile(t),
            NoiseKind::Laplace => {
                if t < 0.5 {
                    self.noise_scale * (2.0 * t).ln()
                } else {
                    -self.noise_scale * (2.0 * (1.0 - t)).ln()
                }
            }
        }
    }

    /// Closed-form conditional quantile coefficients at level `tau`.
    pub fn true_beta(&self, tau: Tau) -> DVector<f64> {
        let q = self.noise_quantile(tau);
        let mut beta = DVector::from_vec(self.beta_true.clone());
        beta[0] += q;
        if self.p() >= 1 {
            beta[1] += self.hetero_gamma * q;
        }
        beta
    }

    /// Draws the design and response.
    pub fn generate_design(&self) -> Result<(DesignMatrix, DVector<f64>)> {
        self.validate()?;
        let m = self.beta_true.len();
        let p = self.p();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);

        let mut values = DMatrix::zeros(self.n, m);
        let mut y = DVector::zeros(self.n);
        for i in 0..self.n {
            values[(i, 0)] = 1.0;
            for j in 1..m {
                values[(i, j)] = rng.gen::<f64>();
            }
            let scale = if p >= 1 {
                1.0 + self.hetero_gamma * values[(i, 1)]
            } else {
                1.0
            };
            if scale <= 0.0 {
                return Err(Error::schema(format!(
                    "noise scale 1 + hetero_gamma * x_1 = {scale} is not positive at row {i}"
                )));
            }
            let eps = self.draw_noise(&mut rng);
            let mean: f64 = (0..m).map(|j| self.beta_true[j] * values[(i, j)]).sum();
            y[i] = mean + scale * eps;
        }

        let mut columns = vec![ColumnMeta::intercept()];
        for j in 1..m {
            columns.push(ColumnMeta::continuous(format!("x{j}"), format!("x{j}")));
        }
        Ok((DesignMatrix::new(values, columns)?, y))
    }

    /// Same draw packaged as an observation table (response `y`, covariates
    /// `x1..xp`).
    pub fn generate(&self) -> Result<Dataset> {
        let (design, y) = self.generate_design()?;
        let schema = CovariateSchema {
            response: ResponseSpec {
                name: "y".into(),
                transform: Transform::None,
            },
            covariates: (1..=self.p())
                .map(|j| CovariateSpec {
                    name: format!("x{j}"),
                    kind: CovariateKind::Continuous,
                    transform: Transform::None,
                })
                .collect(),
        };
        let rows = (0..self.n)
            .map(|i| Observation {
                response: y[i],
                values: (1..=self.p())
                    .map(|j| Value::Number(design.values()[(i, j)]))
                    .collect(),
            })
            .collect();
        Dataset::new(schema, rows)
    }

    /// Inverse-CDF sampling keeps the draw sequence bitwise reproducible.
    fn draw_noise<R: Rng>(&self, rng: &mut R) -> f64 {
        let mut u: f64 = rng.gen();
        while u == 0.0 {
            u = rng.gen();
        }
        match self.noise {
            NoiseKind::Gaussian => self.noise_scale * normal_quantile(u),
            NoiseKind::Laplace => {
                if u < 0.5 {
                    self.noise_scale * (2.0 * u).ln()
                } else {
                    -self.noise_scale * (2.0 * (1.0 - u)).ln()
                }
            }
        }
    }
}
