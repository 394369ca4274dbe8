//! Latent representation: pooled-pixel PCA, the latent-distance reward and a
//! Gaussian kernel density over latents.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::image::Image;

/// Images are 2×2 average-pooled before projection.
pub const POOL_FACTOR: usize = 2;
pub const DEFAULT_SUPPORT_CAP: usize = 512;
pub const DEFAULT_BANDWIDTH: f64 = 0.5;

/// A frozen PCA projection of pooled images.
#[derive(Clone, Debug, PartialEq)]
pub struct PcaModel {
    image_height: usize,
    image_width: usize,
    input_dim: usize,
    latent_dim: usize,
    mean: Vec<f64>,
    /// `latent_dim × input_dim`, row-major, orthonormal rows.
    components: Vec<f64>,
    /// Transposed copy (`input_dim × latent_dim`) for the projection loop.
    components_t: Vec<f64>,
    explained_variance: Vec<f64>,
}

/// Fits a PCA with `d` components on the pooled, flattened images.
pub fn fit_pca(samples: &[Image], d: usize) -> Result<PcaModel> {
    let first = samples.first().ok_or(Error::InsufficientData { needed: d.max(1), got: 0 })?;
    let (h, w) = (first.height(), first.width());
    let pooled = samples
        .iter()
        .map(|img| {
            if img.height() != h || img.width() != w {
                return Err(Error::DimensionMismatch {
                    expected: h * w * 3,
                    got: img.height() * img.width() * 3,
                });
            }
            img.downsample(POOL_FACTOR)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<&[f32]> = pooled.iter().map(Vec::as_slice).collect();
    PcaModel::fit_pooled(&rows, d, (h, w))
}

pub fn embed(model: &PcaModel, image: &Image) -> Result<Vec<f64>> {
    model.embed(image)
}

/// Eigenpairs of a sample covariance. The unbounded symmetric solver can
/// overflow on heavily rank-deficient input, so it runs with a tolerance and
/// an iteration cap, falling back to an SVD of the centered data.
fn covariance_eigen(cov: DMatrix<f64>, centered: DMatrix<f64>, denom: f64) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if let Some(eig) = SymmetricEigen::try_new(cov, 1e-13, 100_000) {
        if eig.eigenvalues.iter().all(|v| v.is_finite()) {
            return Ok((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors));
        }
    }
    let svd = centered.svd(false, true);
    let v_t = svd.v_t.ok_or(Error::Numerical("SVD did not return right singular vectors".into()))?;
    let values = svd.singular_values.iter().map(|s| s * s / denom).collect();
    Ok((values, v_t.transpose()))
}

impl PcaModel {
    /// Fits on already pooled rows taken from `image_shape`-sized images.
    pub fn fit_pooled(rows: &[&[f32]], d: usize, image_shape: (usize, usize)) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("latent dimension must be positive".into()));
        }
        if rows.len() < d {
            return Err(Error::InsufficientData { needed: d, got: rows.len() });
        }
        let (h, w) = image_shape;
        let dim = (h / POOL_FACTOR) * (w / POOL_FACTOR) * 3;
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: bad.len() });
        }
        if d > dim {
            return Err(Error::InvalidArgument(format!(
                "latent dimension {d} exceeds input dimension {dim}"
            )));
        }
        let n = rows.len();
        let mut mean = vec![0.0; dim];
        for r in rows {
            for (m, &v) in mean.iter_mut().zip(r.iter()) {
                *m += v as f64;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);

        let centered = DMatrix::from_fn(n, dim, |i, j| rows[i][j] as f64 - mean[j]);
        let denom = (n.max(2) - 1) as f64;
        let cov = centered.tr_mul(&centered) / denom;
        let (values, vectors) = covariance_eigen(cov, centered, denom)?;

        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));

        let mut components = Vec::with_capacity(d * dim);
        let mut explained_variance = Vec::with_capacity(d);
        for &k in order.iter().take(d) {
            let col = vectors.column(k);
            // Sign convention: the largest-magnitude entry is positive.
            let mut pivot = 0;
            for j in 1..dim {
                if col[j].abs() > col[pivot].abs() {
                    pivot = j;
                }
            }
            let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
            components.extend(col.iter().map(|v| v * sign));
            explained_variance.push(values[k].max(0.0));
        }
        Ok(Self::from_parts(h, w, mean, components, explained_variance))
    }

    fn from_parts(
        image_height: usize,
        image_width: usize,
        mean: Vec<f64>,
        components: Vec<f64>,
        explained_variance: Vec<f64>,
    ) -> Self {
        let input_dim = mean.len();
        let latent_dim = explained_variance.len();
        let mut components_t = vec![0.0; input_dim * latent_dim];
        for k in 0..latent_dim {
            for j in 0..input_dim {
                components_t[j * latent_dim + k] = components[k * input_dim + j];
            }
        }
        Self {
            image_height,
            image_width,
            input_dim,
            latent_dim,
            mean,
            components,
            components_t,
            explained_variance,
        }
    }

    pub fn latent_dim(&self) -> usize {
        self.latent_dim
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn image_shape(&self) -> (usize, usize) {
        (self.image_height, self.image_width)
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Component `k` as a unit vector in pooled-pixel space.
    pub fn component(&self, k: usize) -> &[f64] {
        &self.components[k * self.input_dim..(k + 1) * self.input_dim]
    }

    pub fn explained_variance(&self) -> &[f64] {
        &self.explained_variance
    }

    /// Pools an image to the model's input space.
    pub fn pool(&self, image: &Image) -> Result<Vec<f32>> {
        if (image.height(), image.width()) != (self.image_height, self.image_width) {
            return Err(Error::DimensionMismatch {
                expected: self.image_height * self.image_width * 3,
                got: image.height() * image.width() * 3,
            });
        }
        image.downsample(POOL_FACTOR)
    }

    pub fn embed(&self, image: &Image) -> Result<Vec<f64>> {
        self.embed_pooled(&self.pool(image)?)
    }

    pub fn embed_pooled(&self, pooled: &[f32]) -> Result<Vec<f64>> {
        if pooled.len() != self.input_dim {
            return Err(Error::DimensionMismatch { expected: self.input_dim, got: pooled.len() });
        }
        let mut out = vec![0.0; self.latent_dim];
        self.embed_pooled_into(pooled, &mut out);
        Ok(out)
    }

    /// Unchecked projection used on hot paths; lengths must already match.
    pub fn embed_pooled_into(&self, pooled: &[f32], out: &mut [f64]) {
        debug_assert_eq!(pooled.len(), self.input_dim);
        debug_assert_eq!(out.len(), self.latent_dim);
        out.iter_mut().for_each(|v| *v = 0.0);
        let d = self.latent_dim;
        for ((&x, &m), row) in pooled
            .iter()
            .zip(self.mean.iter())
            .zip(self.components_t.chunks_exact(d))
        {
            let v = x as f64 - m;
            for (o, &c) in out.iter_mut().zip(row) {
                *o += c * v;
            }
        }
    }

    /// Maps a latent back to pooled-pixel space.
    pub fn reconstruct(&self, latent: &[f64]) -> Result<Vec<f64>> {
        if latent.len() != self.latent_dim {
            return Err(Error::DimensionMismatch { expected: self.latent_dim, got: latent.len() });
        }
        let mut out = self.mean.clone();
        for (k, &z) in latent.iter().enumerate() {
            for (o, &c) in out.iter_mut().zip(self.component(k)) {
                *o += z * c;
            }
        }
        Ok(out)
    }
}

/// Negative Euclidean distance between two latents.
pub fn reward(goal_latent: &[f64], state_latent: &[f64]) -> Result<f64> {
    if goal_latent.len() != state_latent.len() {
        return Err(Error::DimensionMismatch {
            expected: goal_latent.len(),
            got: state_latent.len(),
        });
    }
    Ok(-squared_distance(goal_latent, state_latent).sqrt())
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Isotropic Gaussian kernel density over a set of support latents.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityModel {
    dim: usize,
    bandwidth: f64,
    /// `n_support × dim`, row-major.
    support: Vec<f64>,
}

/// Fits a kernel density keeping at most `cap` uniformly chosen support points.
pub fn fit_density<R: Rng + ?Sized>(
    latents: &[Vec<f64>],
    bandwidth: f64,
    cap: usize,
    rng: &mut R,
) -> Result<DensityModel> {
    if latents.is_empty() {
        return Err(Error::Empty("density support"));
    }
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::InvalidArgument(format!("bandwidth must be positive, got {bandwidth}")));
    }
    if cap == 0 {
        return Err(Error::InvalidArgument("support cap must be positive".into()));
    }
    let dim = latents[0].len();
    if let Some(bad) = latents.iter().find(|l| l.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: bad.len() });
    }
    let chosen: Vec<usize> = if latents.len() <= cap {
        (0..latents.len()).collect()
    } else {
        let mut idx = index::sample(rng, latents.len(), cap).into_vec();
        idx.sort_unstable();
        idx
    };
    let support = chosen.iter().flat_map(|&i| latents[i].iter().copied()).collect();
    Ok(DensityModel { dim, bandwidth, support })
}

impl DensityModel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn n_support(&self) -> usize {
        self.support.len() / self.dim.max(1)
    }

    pub fn support_point(&self, i: usize) -> &[f64] {
        &self.support[i * self.dim..(i + 1) * self.dim]
    }

    /// Density at `x`, floored at the smallest positive normal `f64` so that
    /// far-away points still get a strictly positive value.
    pub fn density(&self, x: &[f64]) -> Result<f64> {
        Ok(self.log_density(x)?.exp().max(f64::MIN_POSITIVE))
    }

    pub fn log_density(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(self.log_density_unchecked(x))
    }

    pub(crate) fn log_density_unchecked(&self, x: &[f64]) -> f64 {
        let inv = -0.5 / (self.bandwidth * self.bandwidth);
        let m = self.n_support();
        let best = self
            .support
            .chunks_exact(self.dim)
            .map(|s| squared_distance(x, s) * inv)
            .fold(f64::NEG_INFINITY, f64::max);
        // Terms more than e^-60 below the peak cannot change the sum at f64 precision.
        let sum: f64 = self
            .support
            .chunks_exact(self.dim)
            .map(|s| squared_distance(x, s) * inv - best)
            .filter(|&e| e > -60.0)
            .map(f64::exp)
            .sum();
        let log_norm = 0.5 * self.dim as f64 * (2.0 * std::f64::consts::PI * self.bandwidth.powi(2)).ln();
        best + sum.ln() - (m as f64).ln() - log_norm
    }
}

pub fn density(model: &DensityModel, x: &[f64]) -> Result<f64> {
    model.density(x)
}
