//! Mean-field trajectories, the 2-core threshold and the continuous-time
//! peeling process.
//!
//! With `p = e^{-t}`, the ball count and the heavy-ball count of the
//! continuous-time process concentrate around `n·B*(p)` and `n·H*(p)`. Below
//! the threshold `c^Δ_{k,1}` the gap `B* - H*` stays positive on `(0, 1]`.

mod continuous;
mod threshold;

pub use continuous::{
    check_heavy_vanish, check_proposition6, heavy_vanish_cutoff, parse_grid, simulate_continuous_peeling,
    simulate_extended, simulate_pure_death, ExtendedSample, PeelSample, PeelTrajectory, Prop6Check,
};
pub use threshold::{peeling_threshold, reference_thresholds, ReferencePair, ThresholdResult, REFERENCE_TABLE};

use crate::error::{Error, Result};

fn check_domain(p: f64, c: f64, k: usize) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p = {p} is outside [0, 1]")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("load c = {c} must be positive")));
    }
    if k < 2 {
        return Err(Error::Domain(format!("k = {k} must be at least 2")));
    }
    Ok(())
}

/// `B*(p) = c·k·p^{k/(k-1)}`, the normalised ball count at `p = e^{-t}`.
pub fn b_star(p: f64, c: f64, k: usize) -> Result<f64> {
    check_domain(p, c, k)?;
    let k = k as f64;
    Ok(c * k * p.powf(k / (k - 1.0)))
}

/// `H*(p) = c·k·p·(1 - e^{-ckp})`, the normalised heavy-ball count.
pub fn h_star(p: f64, c: f64, k: usize) -> Result<f64> {
    check_domain(p, c, k)?;
    let x = c * k as f64 * p;
    Ok(-x * (-x).exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints() {
        assert!((b_star(1.0, 0.5, 3).unwrap() - 1.5).abs() < 1e-15);
        assert_eq!(b_star(0.0, 0.5, 3).unwrap(), 0.0);
        assert_eq!(h_star(0.0, 0.5, 3).unwrap(), 0.0);
    }

    #[test]
    fn interior_values() {
        let p = (-1.0f64).exp();
        assert!((b_star(p, 0.5, 3).unwrap() - 0.334695).abs() < 1e-6);
        let direct = 1.5 * (1.0 - (-1.5f64).exp());
        assert!((h_star(1.0, 0.5, 3).unwrap() - direct).abs() < 1e-15);
        assert!((direct - 1.165305).abs() < 1e-6);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(b_star(1.5, 0.5, 3), Err(Error::Domain(_))));
        assert!(matches!(h_star(-0.1, 0.5, 3), Err(Error::Domain(_))));
        assert!(matches!(b_star(0.5, 0.0, 3), Err(Error::Domain(_))));
        assert!(matches!(h_star(0.5, 0.5, 1), Err(Error::Domain(_))));
        assert!(b_star(f64::NAN, 0.5, 3).is_err());
    }

    #[test]
    fn heavy_below_total_under_threshold() {
        for i in 1..=10_000 {
            let p = i as f64 / 10_000.0;
            assert!(h_star(p, 0.8, 3).unwrap() < b_star(p, 0.8, 3).unwrap(), "p = {p}");
        }
    }
}
