//! Gromov-Wasserstein and Gromov-Monge distances between finite measure
//! networks, metric measure spaces and weighted Euclidean point clouds.
//!
//! A [`MeasureNetwork`] is a probability vector together with an arbitrary
//! real network function `ω`. Couplings and measure-preserving maps between
//! two networks are scored by their p-distortion; the solvers minimize it
//! exactly by enumeration over maps, approximately by Frank-Wolfe over
//! couplings, or by permutation ascent on positive definite inputs.

pub mod assignment;
pub mod coupling;
pub mod distortion;
pub mod error;
pub mod euclidean;
pub mod graphs;
pub mod io;
pub mod linalg;
pub mod network;
pub mod random;
pub mod solvers;
pub mod sum;
pub mod tol;
pub mod transport;

pub use coupling::{check_measure_preserving, coupling_from_map, Coupling, MongeMap};
pub use distortion::{distortion_map, distortion_p, pullback_network, size_p};
pub use error::{Error, Result};
pub use euclidean::{
    cloud_to_network, gm_em_infinity, gm_em_lower, m_iso, procrustes_align, simplex_point_embedding_value,
    EmbeddingValue, EuclideanCloud, Isometry, IsometryGroup, MisoOptions,
};
pub use graphs::{adjacency_network, heat_kernel_network, laplacian, Graph};
pub use network::{validate_network, Exponent, MeasureNetwork, MetricFlag};
pub use solvers::{
    count_monge_maps, enumerate_monge_maps, gm_exact, gm_infinity, gm_over_split, gw_frank_wolfe, gw_spd_vertex_ascent,
    mass_split_from_coupling, Distance, FrankWolfeOptions, MassSplit, Method, SolveReport, Witness,
};
