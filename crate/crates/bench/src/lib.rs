//! Workloads for the criterion benchmarks; run them with
//! `cargo bench -p bellforge-bench`.

use bellforge_core::functional::{load_appendix_matrix, BellFunctional};
use bellforge_core::localbound::LocalBoundOptions;
use bellforge_core::quantum::SeeSawConfig;
use bellforge_core::{Matrix, Result};

/// Leading `rows × cols` block of the packaged 30×30 matrix.
pub fn appendix_block(rows: usize, cols: usize) -> Result<BellFunctional> {
    let full = load_appendix_matrix()?;
    let m = Matrix::from_fn(rows.min(full.n_a()), cols.min(full.n_b()), |i, j| full.get(i, j));
    BellFunctional::new(format!("appendix[{rows}x{cols}]"), m)
}

/// Single-threaded see-saw settings so timings do not depend on the host.
pub fn seesaw_config(restarts: usize) -> SeeSawConfig {
    SeeSawConfig {
        restarts,
        threads: Some(1),
        ..SeeSawConfig::default()
    }
}

pub fn serial_local() -> LocalBoundOptions {
    LocalBoundOptions::serial()
}
