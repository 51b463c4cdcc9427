//! Cover construction, tube transport forms, the two normalization steps,
//! global primitive assembly and the surjectivity witness.

mod cover;
mod pair;
mod pipeline;
mod surjectivity;

pub use cover::{build_cover, CoverData, CoverSummary, Patch, BAND_HEIGHT, BAND_MARGIN, LATTICE_MARGIN, PATCH_SIDE};
pub use pair::{make_transport, CellBox, TransportPair, TransportSummary};
pub use pipeline::{
  global_primitive, interior_grid, normalize_global, normalize_local, patch_masses, solve_primitive, GlobalNormalization,
  GlobalPrimitive, LocalNormalization, SolveReport, MASS_TOLERANCE, MIN_RADIUS, RESIDUAL_FACTOR,
};
pub use surjectivity::{check_surjectivity, surjectivity_witness, SurjectivityReport, SurjectivityWitness, SURJECTIVITY_TOLERANCE};
