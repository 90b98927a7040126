//! The two reductions: SAT to Knossos and SUBSET-SUM to Hour-Glass.

pub mod cnf;
pub mod compile;
pub mod layout;
pub mod subset;
pub mod synth;

pub use cnf::{cnf_to_circuit, parse_dimacs, Circuit, CnfError, CnfFormula, Node};
pub use compile::{clause_inputs, compile_layout, compile_sat_to_knossos};
pub use layout::{LayoutError, LayoutMap, Net, PlacedGadget, PortRef};
pub use subset::{
    construct_path, decode_hourglass_path, subset_sum_oracle, subsetsum_to_hourglass,
    SubsetSumCertificate, SubsetSumError, SubsetSumInstance,
};
pub use synth::{decode_knossos_solution, propagate, synthesize_solution, synthesize_with};
