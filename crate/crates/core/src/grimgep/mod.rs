//! Learning-progress guided goal regions wrapped around a novelty sampler.
//!
//! Four pieces: a clustering function over observations (PCA + Gaussian
//! mixture), per-cluster absolute learning progress computed from the
//! history of attempted goals, a bandit that picks a cluster from those
//! progress values, and a masking prior restricting the underlying sampler
//! to the chosen cluster.

pub mod alp;
pub mod gmm;
pub mod prior;

pub use alp::{estimate_alp, recompute_performances, AlpEstimate, ClusterHistory, PerformanceRecord};
pub use gmm::{fit_gmm, fit_gmm_with, select_gmm_by_aic, select_gmm_by_aic_with, EmOptions, GmmModel};
pub use prior::{
    build_prior, cluster_draw_probabilities, cluster_probabilities, combine, sample_cluster, ClusterSampling,
    MaskedSampler,
};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::representation::PcaModel;

/// Maps observations to cluster ids: PCA projection then the most
/// responsible mixture component.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusteringFn {
    pca: PcaModel,
    gmm: GmmModel,
}

impl ClusteringFn {
    pub fn new(pca: PcaModel, gmm: GmmModel) -> Result<Self> {
        if pca.latent_dim() != gmm.dim() {
            return Err(Error::DimensionMismatch { expected: pca.latent_dim(), got: gmm.dim() });
        }
        Ok(Self { pca, gmm })
    }

    pub fn pca(&self) -> &PcaModel {
        &self.pca
    }

    pub fn gmm(&self) -> &GmmModel {
        &self.gmm
    }

    pub fn n_clusters(&self) -> usize {
        self.gmm.k()
    }

    pub fn assign(&self, image: &Image) -> Result<usize> {
        Ok(self.gmm.assign(&self.pca.embed(image)?))
    }

    pub fn assign_latent(&self, latent: &[f64]) -> Result<usize> {
        if latent.len() != self.gmm.dim() {
            return Err(Error::DimensionMismatch { expected: self.gmm.dim(), got: latent.len() });
        }
        Ok(self.gmm.assign(latent))
    }
}

pub fn assign_cluster(clustering: &ClusteringFn, image: &Image) -> Result<usize> {
    clustering.assign(image)
}
