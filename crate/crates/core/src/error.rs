use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coefficient domain mismatch: cannot combine {left} and {right} polynomials")]
    DomainMismatch {
        left: &'static str,
        right: &'static str,
    },

    #[error("negative exponent {0}")]
    NegativeExponent(i64),

    #[error("polynomial must have degree at least 1 (got degree {degree})")]
    ConstantPolynomial { degree: isize },

    #[error("syntax error at byte {offset}: expected {expected}, found {found}")]
    Syntax {
        offset: usize,
        expected: String,
        found: String,
    },

    #[error("exponent at byte {offset} must be a nonnegative integer literal, found `{found}`")]
    BadExponent { offset: usize, found: String },

    #[error("expansion too large at byte {offset}: {reason}")]
    ExpansionLimit { offset: usize, reason: String },

    #[error("invalid recurrence: {0}")]
    InvalidSpec(String),

    #[error("(l, k) = ({ell}, {k}) are not coprime (gcd {gcd}); reduce the recurrence first")]
    NotCoprime { ell: usize, k: usize, gcd: usize },

    #[error("invalid tolerance configuration: {0}")]
    InvalidConfig(String),

    #[error("coefficient {index} does not fit in double precision")]
    CoefficientOverflow { index: usize },

    #[error("k must be at least 2 (got {0})")]
    OrderTooSmall(usize),

    #[error("degenerate box [{re_min}, {im_min}] x [{re_max}, {im_max}]")]
    DegenerateBox {
        re_min: f64,
        im_min: f64,
        re_max: f64,
        im_max: f64,
    },

    #[error("grid must be at least 2 x 2 (got {nx} x {ny})")]
    GridTooSmall { nx: usize, ny: usize },
}
