//! Worked examples with closed-form references: nucleation at a junction,
//! the two-valued junction example, the half-line tanker problem, KPP fronts
//! with a jump in the reaction rate, and a homogenization cell problem.

pub mod cell;
pub mod kpp;
pub mod presets;

pub use cell::{cell_problem_effective_h, CellProblemParams};
pub use kpp::{kpp_action_j, kpp_front_times, kpp_solve_variational, FrontTimes, KppParams};
pub use presets::{preset, tanker_problem, tanker_value, Preset, PresetName, Reference};
