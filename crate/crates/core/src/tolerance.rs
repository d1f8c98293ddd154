/// Numerical thresholds used throughout.
///
/// `eig_cut` is a *relative* cut: eigenvalues below `eig_cut * max_eig` (with an
/// absolute floor of `ABS_FLOOR`) are treated as zero when computing supports,
/// pseudo-inverses, and square roots. `eq_tol` bounds the spectral norm of the
/// difference when two operators are compared for equality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub eig_cut: f64,
    pub eq_tol: f64,
}

impl Tolerance {
    pub const ABS_FLOOR: f64 = 1e-12;

    pub const fn new(eig_cut: f64, eq_tol: f64) -> Self {
        Self { eig_cut, eq_tol }
    }

    /// Threshold below which an eigenvalue of an operator with largest
    /// eigenvalue magnitude `max_eig` counts as zero.
    pub fn eig_threshold(&self, max_eig: f64) -> f64 {
        f64::max(self.eig_cut * max_eig, Self::ABS_FLOOR)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eig_cut: 1e-10,
            eq_tol: 1e-9,
        }
    }
}
