//! Parameter grids over the decompositions, remainder normalization and the
//! divisor-count side inequalities.

mod checks;
mod export;
mod grid;

pub use checks::{divisor_count_checks, CountCheck, DivisorChecks};
pub use export::{format_norm, read_grid_csv, write_grid_csv, CsvRow, CSV_HEADER};
pub use grid::{
    evaluate, fit_constant, growth_violations, normalized_remainder, run_grid, summarize,
    GridConfig, GridReport, GridRow, GrowthViolation, IdentitySummary, Operands, ScaleConstant,
    SkippedTuple,
};
