//! Library side of the `optsample` command line tool, exposed so the
//! integration tests can exercise the pieces directly.

pub mod commands;
pub mod config;
pub mod io;
pub mod par;
pub mod report;
pub mod runner;
pub mod setup;

/// Exit code classification: 0 success, 2 method failure (an algorithm ran
/// out of budget or refused the instance), 3 configuration error.
pub fn exit_code_for(err: &anyhow::Error) -> i32 {
    use optsample_core::Error as CoreError;
    for cause in err.chain() {
        if let Some(core) = cause.downcast_ref::<CoreError>() {
            return match core {
                CoreError::OracleExhausted { .. }
                | CoreError::RejectionBudgetExceeded { .. }
                | CoreError::RedrawCapExceeded { .. }
                | CoreError::NonConvergence { .. }
                | CoreError::IllPosedDesign { .. } => 2,
                _ => 3,
            };
        }
    }
    3
}
