/// Numerical tolerances shared by every routine in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Maximum entrywise `|H - H†|` accepted as Hermitian.
    pub hermiticity: f64,
    /// Smallest eigenvalue accepted as positive semidefinite.
    pub psd_floor: f64,
    /// Eigenvalues below this are treated as exact zeros (entropy, Kraus extraction).
    pub eigenvalue_zero: f64,
    /// Maximum deviation of a trace (or partial trace) from its required value.
    pub trace: f64,
    /// Relative eigenvalue threshold used to decide the Choi rank.
    pub rank_relative: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermiticity: 1e-9,
        psd_floor: -1e-9,
        eigenvalue_zero: 1e-12,
        trace: 1e-9,
        rank_relative: 1e-9,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
