//! Gaussian-approximation analysis, Ω sweeps and curve utilities.

mod ga;
mod sweep;

pub use ga::{
    f_mean, fer_hypothetical, fer_theoretical, g_mean, ga_evolve, ln_phi, phi, pi_of, FerEstimate, FerKind, GaProfile,
};
pub use sweep::{linear_grid, omega_sweep, omega_sweep_with, OmegaSweep, SweepRow};

/// Eb/N0 at which a FER curve crosses `target`, interpolating linearly in
/// `log10(FER)` between the first bracketing pair of points.
///
/// `points` are `(ebn0_db, fer)` in increasing Eb/N0. Returns `None` if the
/// curve never brackets the target or a bracketing FER is zero.
pub fn ebn0_at_fer(points: &[(f64, f64)], target: f64) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let ((x0, f0), (x1, f1)) = (w[0], w[1]);
        if f0 >= target && f1 <= target && f0 > 0.0 && f1 > 0.0 {
            if f0 == f1 {
                return Some(x0);
            }
            let t = (f0.log10() - target.log10()) / (f0.log10() - f1.log10());
            Some(x0 + t * (x1 - x0))
        } else {
            None
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation() {
        let curve = [(1.0, 1e-1), (2.0, 1e-3), (3.0, 1e-5)];
        assert!((ebn0_at_fer(&curve, 1e-2).unwrap() - 1.5).abs() < 1e-12);
        assert!((ebn0_at_fer(&curve, 1e-3).unwrap() - 2.0).abs() < 1e-12);
        assert!((ebn0_at_fer(&curve, 1e-4).unwrap() - 2.5).abs() < 1e-12);
        assert_eq!(ebn0_at_fer(&curve, 1.0), None);
        assert_eq!(ebn0_at_fer(&curve, 1e-6), None);
        assert_eq!(ebn0_at_fer(&[(1.0, 1e-2), (2.0, 0.0)], 1e-3), None);
    }
}
