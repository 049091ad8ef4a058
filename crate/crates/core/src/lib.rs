//! Randomized recoloring of `b`-simple uniform hypergraphs.
//!
//! The crate covers the full loop around the recoloring procedure:
//!
//! * [`hypergraph`]: the data model, degrees, simplicity and trimming;
//! * [`gen`]: seeded instance generators;
//! * [`recolor`]: the procedure itself with a replayable [`recolor::Trace`];
//! * [`witness`]: h-trees extracted from failed runs and their structural checks;
//! * [`certify`]: log-domain evaluation of the Local Lemma certificate;
//! * [`oracle`]: exact colorability by backtracking, for small instances;
//! * [`soundness`]: randomized end-to-end checks of traces and witness trees.

pub mod certify;
pub mod error;
pub mod format;
pub mod gen;
pub mod hypergraph;
pub mod oracle;
pub mod recolor;
pub mod rng;
pub mod soundness;
pub mod witness;

pub use error::{CertifyError, FormatError, GenError, HypergraphError, OracleError, WitnessError};
pub use hypergraph::{Coloring, Hypergraph, Properness, SimplicityProfile};
pub use recolor::{Outcome, RecolorEvent, Trace};
