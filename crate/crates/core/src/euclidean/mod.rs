//! Weighted Euclidean point clouds, rigid registration, and the embedding
//! bounds on Gromov-Monge distance.

mod cloud;
mod embedding;
mod miso;
mod procrustes;

pub use cloud::{cloud_to_network, EuclideanCloud, Isometry, IsometryGroup};
pub use embedding::{gm_em_infinity, gm_em_lower, simplex_point_embedding_value, EmbeddingValue};
pub use miso::{m_iso, MisoOptions};
pub use procrustes::procrustes_align;
