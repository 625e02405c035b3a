//! Errors of the command-line tool and their exit codes.

use nsriemann_core::Error as CoreError;

/// Exit code of a scenario or configuration problem.
pub const EXIT_SCENARIO: i32 = 2;
/// Exit code of a failed verification.
pub const EXIT_VERIFICATION: i32 = 3;
/// Exit code of a blow-up.
pub const EXIT_BLOW_UP: i32 = 4;
/// Exit code of any other failure.
pub const EXIT_OTHER: i32 = 1;

/// Failure of a command.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// The scenario file is missing, malformed or inconsistent.
    #[error("scenario error: {0}")]
    Scenario(String),
    /// A solution file could not be read or parsed.
    #[error("input error: {0}")]
    Input(String),
    /// Writing an output file failed.
    #[error("output error: {0}")]
    Output(String),
    /// A check of the verification suite failed.
    #[error("verification failed: {0}")]
    Verification(String),
    /// The flow or the scheme blew up.
    #[error("blow-up{}: {source}", context.as_deref().map(|c| format!(" in {c}")).unwrap_or_default())]
    BlowUp {
        /// Where it happened, for example a ladder rung.
        context: Option<String>,
        /// Underlying error.
        source: CoreError,
    },
    /// Any other library error.
    #[error(transparent)]
    Core(CoreError),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Config(_)
            | CoreError::ConditionH { .. }
            | CoreError::InvalidArgument(_)
            | CoreError::NotApplicable(_)
            | CoreError::AxesMismatch(_)
            | CoreError::SupportOutsideDomain { .. } => CliError::Scenario(e.to_string()),
            CoreError::BlowUp { .. } | CoreError::SchemeBlowUp { .. } | CoreError::UnboundedFlow { .. } => {
                CliError::BlowUp {
                    context: None,
                    source: e,
                }
            }
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    /// Process exit code.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Scenario(_) | CliError::Input(_) => EXIT_SCENARIO,
            CliError::Verification(_) => EXIT_VERIFICATION,
            CliError::BlowUp { .. } => EXIT_BLOW_UP,
            CliError::Output(_) | CliError::Core(_) => EXIT_OTHER,
        }
    }

    /// Attaches a location to a blow-up.
    pub fn in_context(self, ctx: impl Into<String>) -> Self {
        match self {
            CliError::BlowUp { source, .. } => CliError::BlowUp {
                context: Some(ctx.into()),
                source,
            },
            other => other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_errors_map_to_exit_codes() {
        assert_eq!(CliError::from(CoreError::Config("x".into())).exit_code(), EXIT_SCENARIO);
        assert_eq!(
            CliError::from(CoreError::ConditionH {
                min_h: -1.0,
                max_h: 1.0
            })
            .exit_code(),
            EXIT_SCENARIO
        );
        let e = CliError::from(CoreError::SchemeBlowUp { step: 3, t: 0.1 }).in_context("rung 2");
        assert_eq!(e.exit_code(), EXIT_BLOW_UP);
        assert!(e.to_string().contains("rung 2"));
        assert_eq!(CliError::from(CoreError::NoSurfacePoints).exit_code(), EXIT_OTHER);
    }
}
