//! Rake-and-compress decompositions: primitives, algorithms and verifiers.

mod algos;
mod labeling;
mod ops;
mod verify;

pub use algos::{
    decompose_knuth_io, decompose_known_n, decompose_log, decompose_poly_n, knuth_sequence,
    knuth_x, known_n_gamma, Decomposition,
};
pub use labeling::{
    parse_labeling, to_lcl, labeling_to_text, lcl_to_text, DecompLabeling, Layer, LclLabel,
    ParsedLabeling, RcLclOutput,
};
pub use ops::{
    compress, linial_distance_coloring, linial_path_power, rake, ruling_set_on_path,
    ruling_set_with_margin, PathColoring, Residual,
};
pub use verify::{verify_decomposition, verify_rc_lcl, Violation};

pub const DEFAULT_ELL: usize = 4;
