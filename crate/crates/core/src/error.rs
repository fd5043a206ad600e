use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of the gamma function at {0}")]
    Pole(f64),

    #[error("{name} = {value} is outside the domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("log-gamma overflow at {re}{im:+}i")]
    Overflow { re: f64, im: f64 },

    #[error("{what} failed to converge after {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("no pole-free contour strip: left poles start at {lo}, right poles at {hi}")]
    EmptyStrip { lo: f64, hi: f64 },

    #[error("abscissa {abscissa} lies outside the pole-free strip ({lo}, {hi})")]
    AbscissaOutsideStrip { abscissa: f64, lo: f64, hi: f64 },

    #[error("left-pole families collide: {offenders:?}")]
    PoleCollision { offenders: Vec<(f64, f64)> },

    #[error("residue series diverges for argument {x}")]
    Divergence { x: f64 },

    #[error("moment of order {order} diverges for m_s = {m_s}")]
    DivergentMoment { order: u32, m_s: f64 },

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("admissible adjustment interval is empty: [{lo}, {hi}]")]
    InfeasibleBound { lo: f64, hi: f64 },
}
