//! Error type shared by every module of the crate.

use alloc::string::String;

/// Everything that can go wrong while analysing a source term, solving the
/// characteristic flow, building a wave or auditing a field.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A user-supplied function returned NaN or an infinity.
    #[error("{what} is not finite at u = {at}")]
    NonFinite {
        /// Which function misbehaved.
        what: &'static str,
        /// Argument at which it was evaluated.
        at: f64,
    },
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Two states do not share an open interval of the zero-set decomposition.
    #[error("states {s} and {u} lie in different components of the zero-set decomposition")]
    DifferentIntervals {
        /// Starting state.
        s: f64,
        /// Target state.
        u: f64,
    },
    /// The state lies outside the scanned window where no structure is known.
    #[error("state {s} lies outside the analysed window [{lo}, {hi}]")]
    OutsideWindow {
        /// Offending state.
        s: f64,
        /// Window lower edge.
        lo: f64,
        /// Window upper edge.
        hi: f64,
    },
    /// The characteristic flow escapes to infinity in finite time.
    #[error("characteristic from s = {s} blows up at t = {escape_time}")]
    BlowUp {
        /// Starting state.
        s: f64,
        /// Estimated escape time.
        escape_time: f64,
    },
    /// The flow derivative in s does not exist at a boundary zero.
    #[error("the flow is not differentiable in s at s = {s}")]
    NotDifferentiable {
        /// Offending state.
        s: f64,
    },
    /// A supplied derivative disagrees with finite differences.
    #[error("supplied {what} disagrees with finite differences (error {error:.3e} at {at})")]
    DerivativeMismatch {
        /// Name of the derivative that failed.
        what: String,
        /// Location of the worst disagreement.
        at: f64,
        /// Size of the worst disagreement.
        error: f64,
    },
    /// Condition (H) has mixed sign on the sampled surface.
    #[error("condition (H) fails: H ranges over [{min_h:.6e}, {max_h:.6e}] on the initial surface")]
    ConditionH {
        /// Smallest sampled value.
        min_h: f64,
        /// Largest sampled value.
        max_h: f64,
    },
    /// A point passed to the fan solver is not inside the rarefaction fan.
    #[error("point is outside the rarefaction fan (F(u-) = {left:.3e}, F(u+) = {right:.3e})")]
    NotInFan {
        /// Surface function at the left state.
        left: f64,
        /// Surface function at the right state.
        right: f64,
    },
    /// The surface sampler found no points of the zero level set.
    #[error("no points of the zero level set of the initial surface were found")]
    NoSurfacePoints,
    /// A bracketing root solver was handed a bracket without a sign change.
    #[error("no sign change on [{lo}, {hi}]")]
    NoBracket {
        /// Bracket lower end.
        lo: f64,
        /// Bracket upper end.
        hi: f64,
    },
    /// Grid fields with incompatible axes were combined.
    #[error("grid axes mismatch: {0}")]
    AxesMismatch(String),
    /// A test function's support is not inside the grid domain.
    #[error("test function support escapes the grid domain along axis {axis}")]
    SupportOutsideDomain {
        /// Axis index, 0 being time.
        axis: usize,
    },
    /// A scheme configuration is inconsistent.
    #[error("scheme configuration: {0}")]
    Config(String),
    /// The finite-difference scheme produced non-finite values.
    #[error("viscous scheme blew up at step {step} (t = {t})")]
    SchemeBlowUp {
        /// Step index.
        step: usize,
        /// Time reached.
        t: f64,
    },
    /// The flow is unbounded so no a-priori state bounds exist.
    #[error("flow from s = {s} is unbounded; no state bounds exist")]
    UnboundedFlow {
        /// Starting state.
        s: f64,
    },
    /// A jump was handed to an admissibility check in the wrong order.
    #[error("ordering violated: u_l = {u_l} must exceed u_r = {u_r}")]
    Ordering {
        /// Left trace.
        u_l: f64,
        /// Right trace.
        u_r: f64,
    },
    /// A closed-form branch does not apply to the requested configuration.
    #[error("closed form not applicable: {0}")]
    NotApplicable(String),
}

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
