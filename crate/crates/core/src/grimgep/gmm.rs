//! Diagonal-covariance Gaussian mixtures fitted by EM, with AIC model selection.

use rand::Rng;

use crate::error::{Error, Result};

/// Floor applied to every variance entry.
pub const DEFAULT_REG: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 200;
/// Stopping threshold on the per-sample log-likelihood improvement.
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub reg: f64,
}

impl Default for EmOptions {
    fn default() -> Self {
        Self {
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
            reg: DEFAULT_REG,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GmmModel {
    k: usize,
    dim: usize,
    weights: Vec<f64>,
    /// `k × dim`, row-major.
    means: Vec<f64>,
    /// Diagonal covariances, `k × dim`, row-major.
    variances: Vec<f64>,
    /// Total log-likelihood of the training data under the final parameters.
    log_likelihood: f64,
    n_samples: usize,
    n_iter: usize,
    // Cached per-component `ln w - ½ Σ ln(2π σ²)` and `1/σ²`.
    log_norm: Vec<f64>,
    inv_var: Vec<f64>,
}

impl GmmModel {
    fn new(weights: Vec<f64>, means: Vec<f64>, variances: Vec<f64>, dim: usize) -> Self {
        let k = weights.len();
        let mut model = Self {
            k,
            dim,
            weights,
            means,
            variances,
            log_likelihood: f64::NAN,
            n_samples: 0,
            n_iter: 0,
            log_norm: vec![0.0; k],
            inv_var: vec![0.0; k * dim],
        };
        model.refresh_cache();
        model
    }

    fn refresh_cache(&mut self) {
        let ln2pi = (2.0 * std::f64::consts::PI).ln();
        for c in 0..self.k {
            let vars = &self.variances[c * self.dim..(c + 1) * self.dim];
            let log_det: f64 = vars.iter().map(|v| v.ln() + ln2pi).sum();
            self.log_norm[c] = self.weights[c].ln() - 0.5 * log_det;
            for (iv, v) in self.inv_var[c * self.dim..(c + 1) * self.dim].iter_mut().zip(vars) {
                *iv = 1.0 / v;
            }
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mean(&self, c: usize) -> &[f64] {
        &self.means[c * self.dim..(c + 1) * self.dim]
    }

    pub fn variance(&self, c: usize) -> &[f64] {
        &self.variances[c * self.dim..(c + 1) * self.dim]
    }

    pub fn log_likelihood(&self) -> f64 {
        self.log_likelihood
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_iter(&self) -> usize {
        self.n_iter
    }

    /// Free parameters: `k·2d` for means and diagonal variances plus `k−1` weights.
    pub fn n_params(&self) -> usize {
        self.k * 2 * self.dim + self.k - 1
    }

    pub fn aic(&self) -> f64 {
        2.0 * self.n_params() as f64 - 2.0 * self.log_likelihood
    }

    /// `ln w_c + ln N(x | μ_c, Σ_c)` for every component.
    pub fn log_joint(&self, x: &[f64], out: &mut [f64]) {
        for (c, o) in out.iter_mut().enumerate().take(self.k) {
            let mu = &self.means[c * self.dim..(c + 1) * self.dim];
            let iv = &self.inv_var[c * self.dim..(c + 1) * self.dim];
            let mut q = 0.0;
            for ((xi, mi), vi) in x.iter().zip(mu).zip(iv) {
                let diff = xi - mi;
                q += diff * diff * vi;
            }
            *o = self.log_norm[c] - 0.5 * q;
        }
    }

    /// Most responsible component; ties go to the lowest id.
    pub fn assign(&self, x: &[f64]) -> usize {
        let mut buf = vec![0.0; self.k];
        self.assign_with(x, &mut buf)
    }

    pub(crate) fn assign_with(&self, x: &[f64], scratch: &mut [f64]) -> usize {
        self.log_joint(x, scratch);
        let mut best = 0;
        for c in 1..self.k {
            if scratch[c] > scratch[best] {
                best = c;
            }
        }
        best
    }

    /// Total log-likelihood of `data` under this model.
    pub fn score(&self, data: &[Vec<f64>]) -> f64 {
        let mut buf = vec![0.0; self.k];
        data.iter()
            .map(|x| {
                self.log_joint(x, &mut buf);
                log_sum_exp(&buf)
            })
            .sum()
    }
}

/// Fits a `k`-component mixture with the default EM options.
pub fn fit_gmm<R: Rng + ?Sized>(latents: &[Vec<f64>], k: usize, rng: &mut R) -> Result<GmmModel> {
    fit_gmm_with(latents, k, &EmOptions::default(), rng).map(|(m, _)| m)
}

/// Fits a mixture and also returns the log-likelihood after every E-step
/// (initial parameters first).
pub fn fit_gmm_with<R: Rng + ?Sized>(
    latents: &[Vec<f64>],
    k: usize,
    opts: &EmOptions,
    rng: &mut R,
) -> Result<(GmmModel, Vec<f64>)> {
    if k == 0 {
        return Err(Error::InvalidArgument("number of components must be positive".into()));
    }
    if latents.len() < k {
        return Err(Error::InsufficientData { needed: k, got: latents.len() });
    }
    let dim = latents[0].len();
    if let Some(bad) = latents.iter().find(|x| x.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: bad.len() });
    }
    let n = latents.len();

    let mut model = initialize(latents, k, dim, opts.reg, rng);
    let mut resp = vec![0.0; n * k];
    let mut ll = e_step(&model, latents, &mut resp);
    let mut trace = vec![ll];
    let mut iters = 0;
    while iters < opts.max_iter {
        m_step(&mut model, latents, &resp, opts.reg);
        iters += 1;
        let next = e_step(&model, latents, &mut resp);
        trace.push(next);
        let improvement = (next - ll) / n as f64;
        ll = next;
        if improvement < opts.tol {
            break;
        }
    }
    model.log_likelihood = ll;
    model.n_samples = n;
    model.n_iter = iters;
    Ok((model, trace))
}

/// k-means++ seeding followed by one hard assignment to get starting parameters.
fn initialize<R: Rng + ?Sized>(data: &[Vec<f64>], k: usize, dim: usize, reg: f64, rng: &mut R) -> GmmModel {
    let n = data.len();
    let sq = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum() };

    let mut centers: Vec<usize> = vec![rng.gen_range(0..n)];
    let mut nearest: Vec<f64> = data.iter().map(|x| sq(x, &data[centers[0]])).collect();
    while centers.len() < k {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 {
            let u = rng.gen::<f64>() * total;
            let mut cum = 0.0;
            let mut pick = n - 1;
            for (i, d) in nearest.iter().enumerate() {
                cum += d;
                if u < cum && *d > 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            rng.gen_range(0..n)
        };
        centers.push(next);
        for (i, x) in data.iter().enumerate() {
            nearest[i] = nearest[i].min(sq(x, &data[next]));
        }
    }

    // Global per-dimension variance, used for components with < 2 members.
    let mut gmean = vec![0.0; dim];
    for x in data {
        gmean.iter_mut().zip(x).for_each(|(m, v)| *m += v / n as f64);
    }
    let mut gvar = vec![0.0; dim];
    for x in data {
        gvar.iter_mut().zip(x.iter().zip(&gmean)).for_each(|(g, (v, m))| *g += (v - m).powi(2) / n as f64);
    }

    let mut counts = vec![0usize; k];
    let mut sums = vec![0.0; k * dim];
    let mut sqs = vec![0.0; k * dim];
    for x in data {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (c, &ci) in centers.iter().enumerate() {
            let d = sq(x, &data[ci]);
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        counts[best] += 1;
        for j in 0..dim {
            sums[best * dim + j] += x[j];
            sqs[best * dim + j] += x[j] * x[j];
        }
    }
    let mut weights = vec![0.0; k];
    let mut means = vec![0.0; k * dim];
    let mut vars = vec![0.0; k * dim];
    for c in 0..k {
        let m = counts[c].max(1) as f64;
        weights[c] = m;
        for j in 0..dim {
            let (mu, var) = if counts[c] >= 2 {
                let mu = sums[c * dim + j] / m;
                (mu, sqs[c * dim + j] / m - mu * mu)
            } else {
                (data[centers[c]][j], gvar[j])
            };
            means[c * dim + j] = mu;
            vars[c * dim + j] = var.max(reg);
        }
    }
    let wsum: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= wsum);
    GmmModel::new(weights, means, vars, dim)
}

/// Fills responsibilities and returns the total log-likelihood.
fn e_step(model: &GmmModel, data: &[Vec<f64>], resp: &mut [f64]) -> f64 {
    let k = model.k;
    let mut total = 0.0;
    for (x, r) in data.iter().zip(resp.chunks_exact_mut(k)) {
        model.log_joint(x, r);
        let lse = log_sum_exp(r);
        total += lse;
        r.iter_mut().for_each(|v| *v = (*v - lse).exp());
    }
    total
}

fn m_step(model: &mut GmmModel, data: &[Vec<f64>], resp: &[f64], reg: f64) {
    let (k, dim, n) = (model.k, model.dim, data.len());
    let mut nk = vec![0.0; k];
    let mut sums = vec![0.0; k * dim];
    for (x, r) in data.iter().zip(resp.chunks_exact(k)) {
        for c in 0..k {
            nk[c] += r[c];
            let row = &mut sums[c * dim..(c + 1) * dim];
            row.iter_mut().zip(x).for_each(|(s, v)| *s += r[c] * v);
        }
    }
    for c in 0..k {
        if nk[c] > 1e-12 {
            for j in 0..dim {
                model.means[c * dim + j] = sums[c * dim + j] / nk[c];
            }
        }
    }
    let mut sq = vec![0.0; k * dim];
    for (x, r) in data.iter().zip(resp.chunks_exact(k)) {
        for c in 0..k {
            let mu = &model.means[c * dim..(c + 1) * dim];
            let row = &mut sq[c * dim..(c + 1) * dim];
            for j in 0..dim {
                let diff = x[j] - mu[j];
                row[j] += r[c] * diff * diff;
            }
        }
    }
    for c in 0..k {
        model.weights[c] = nk[c] / n as f64;
        if nk[c] > 1e-12 {
            for j in 0..dim {
                model.variances[c * dim + j] = (sq[c * dim + j] / nk[c]).max(reg);
            }
        }
    }
    model.refresh_cache();
}

pub(crate) fn log_sum_exp(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Fits one mixture per candidate size and keeps the lowest AIC
/// (ties go to the smaller `k`).
pub fn select_gmm_by_aic<R: Rng + ?Sized>(
    latents: &[Vec<f64>],
    candidate_ks: &[usize],
    rng: &mut R,
) -> Result<GmmModel> {
    select_gmm_by_aic_with(latents, candidate_ks, &EmOptions::default(), rng)
}

pub fn select_gmm_by_aic_with<R: Rng + ?Sized>(
    latents: &[Vec<f64>],
    candidate_ks: &[usize],
    opts: &EmOptions,
    rng: &mut R,
) -> Result<GmmModel> {
    if candidate_ks.is_empty() {
        return Err(Error::Empty("candidate cluster counts"));
    }
    let mut best: Option<GmmModel> = None;
    for &k in candidate_ks {
        let (model, _) = fit_gmm_with(latents, k, opts, rng)?;
        let better = match &best {
            None => true,
            Some(b) => model.aic() < b.aic() || (model.aic() == b.aic() && model.k < b.k),
        };
        if better {
            best = Some(model);
        }
    }
    Ok(best.expect("at least one candidate"))
}
