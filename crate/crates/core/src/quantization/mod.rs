//! Desymmetrized Bohr–Sommerfeld quantization and smooth state counting.

mod bs;
mod desym;
mod irrep;
mod weyl;

pub use bs::{bs_energy, bs_energy_from, enumerate_levels, levels_csv, BSLevel};
pub use desym::{DesymEntry, DesymTable, DEFAULT_DESYM_TABLE};
pub use irrep::Irrep;
pub use weyl::{density_of_states, symmetry_line_actions, wedge_integral, weyl_count, WeylLaw};
