//! Configuration, output encoding, commands and self-check suites behind the
//! `pam` binary.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use pam_core::PamError;

/// Process exit code for an error.
pub fn exit_code(e: &PamError) -> i32 {
    match e {
        PamError::Config(_) | PamError::Domain(_) => 2,
        PamError::Model(_) | PamError::Unsupported(_) => 3,
        PamError::NonConvergence { .. } => 4,
    }
}

/// Exit code of `pam verify` when at least one check fails.
pub const VERIFY_FAILED: i32 = 1;
