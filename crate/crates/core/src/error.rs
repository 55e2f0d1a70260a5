use std::fmt;

/// Which part of the optimization theory a configuration falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `sup eps*H/beta <= 2/3`: unique minimizer from the multiplier family.
    Interior,
    /// `inf eps*H/beta >= 2`: insulating anywhere only increases the energy.
    NoInsulation,
    /// Anything in between; no existence or uniqueness result applies.
    OutsideTheory,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Interior => f.write_str("interior"),
            Regime::NoInsulation => f.write_str("no-insulation"),
            Regime::OutsideTheory => f.write_str("outside-theory"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("degenerate tangent at parameter t = {t} (|c'(t)| = {speed:e})")]
    DegenerateTangent { t: f64, speed: f64 },

    #[error("profile radius vanishes inside the range at z = {z}")]
    ProfileTouchesAxis { z: f64 },

    #[error("field has {got} values but the mesh has {expected} samples")]
    Misaligned { expected: usize, got: usize },

    #[error("thickness must be finite and nonnegative, got {value} at sample {index}")]
    NegativeThickness { index: usize, value: f64 },

    #[error("mass {mass} exceeds the budget {budget}")]
    MassExceeded { mass: f64, budget: f64 },

    #[error("mesh has no samples")]
    EmptyMesh,

    #[error("operation requires a mesh of dimension {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },

    #[error("mesh has negative curvature samples (min H = {min_h}); convex input required")]
    Nonconvex { min_h: f64 },

    #[error("quermassintegral W_{0} is not available from a boundary mesh (only j = 1, 2)")]
    UnsupportedQuermass(usize),

    #[error("perimeter {target} is infeasible: must exceed {lower_bound} for cap radius {r}")]
    InfeasiblePerimeter {
        target: f64,
        lower_bound: f64,
        r: f64,
    },

    #[error(
        "outside-theory regime: eps*H/beta ranges over [{min_ratio}, {max_ratio}]; \
         need sup <= 2/3 or inf >= 2"
    )]
    OutsideTheory { min_ratio: f64, max_ratio: f64 },

    #[error("multiplier k = {k} outside (0, {k0})")]
    MultiplierOutOfRange { k: f64, k0: f64 },

    #[error("point inactive: eps*H/beta = {a} > 1 - k = {bound}")]
    InactivePoint { a: f64, bound: f64 },

    #[error(
        "multiplier search did not converge: bracket [{lo}, {hi}], mass residual {residual:e}"
    )]
    NoConvergence { lo: f64, hi: f64, residual: f64 },

    #[error("empty active set: no sample carries insulation")]
    EmptyActiveSet,

    #[error("fiber Jacobian 1 + eps*h*H = {jacobian} is not positive at sample {index}")]
    NonpositiveJacobian { index: usize, jacobian: f64 },

    #[error("layer too thick for the tube: eps*h = {thickness} >= R = {radius}")]
    TubeCondition { thickness: f64, radius: f64 },

    #[error("{0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Validation and regime problems are the caller's fault; everything
    /// else is an internal or environment failure.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) | Error::NoConvergence { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

pub(crate) fn require_nonnegative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and >= 0",
        })
    }
}
