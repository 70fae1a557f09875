//! Solvers for Gromov-Monge and Gromov-Wasserstein distances.

mod enumerate;
mod frank_wolfe;
mod mass_split;
mod monge;
mod report;
mod vertex_ascent;

pub use enumerate::{count_monge_maps, enumerate_monge_maps, MongeMaps};
pub use frank_wolfe::{gw_frank_wolfe, FrankWolfeOptions};
pub use mass_split::{gm_over_split, mass_split_from_coupling, MassSplit};
pub use monge::{gm_exact, gm_infinity, DEFAULT_CAP};
pub use report::{Distance, Method, SolveReport, Witness};
pub use vertex_ascent::{gw_spd_vertex_ascent, DEFAULT_RESTARTS};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent deterministic stream for restart `index` under `seed`.
pub(crate) fn restart_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
