use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LAMBDA_MAX: f64 = 60.0;
const GRID_POINTS: usize = 10_000;
const TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub k: usize,
    pub lambda_star: f64,
    pub c_delta: f64,
}

/// `g(λ) = λ / (k·(1 - e^{-λ})^{k-1})`.
fn objective(lambda: f64, k: usize) -> f64 {
    lambda / (k as f64 * (-(-lambda).exp_m1()).powi(k as i32 - 1))
}

/// 2-core threshold `c^Δ_{k,1} = min_{λ>0} g(λ)`: a grid scan over
/// `(0, 60]` locates the basin, golden-section search refines it.
pub fn peeling_threshold(k: usize) -> Result<ThresholdResult> {
    if k < 3 {
        return Err(Error::invalid(format!("the 2-core threshold needs k >= 3, got {k}")));
    }
    let step = LAMBDA_MAX / GRID_POINTS as f64;
    let best = (1..=GRID_POINTS)
        .map(|i| (i, objective(i as f64 * step, k)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .expect("grid is non-empty");
    let mut lo = (best - 1) as f64 * step;
    let mut hi = ((best + 1) as f64 * step).min(LAMBDA_MAX);

    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut g1, mut g2) = (objective(x1, k), objective(x2, k));
    while hi - lo > TOLERANCE {
        if g1 <= g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - ratio * (hi - lo);
            g1 = objective(x1, k);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + ratio * (hi - lo);
            g2 = objective(x2, k);
        }
    }
    let lambda_star = 0.5 * (lo + hi);
    Ok(ThresholdResult { k, lambda_star, c_delta: objective(lambda_star, k) })
}

/// One cell of the reference table: `c^Δ_{k,l}/l` and `c^*_{k,l}/l`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferencePair {
    /// `None` where the table has no entry (`k = 2`, `l = 1`).
    pub peeling: Option<f64>,
    pub load: f64,
}

/// Published thresholds rounded to three decimals, indexed `[l-1][k-2]`
/// for `1 <= l <= 6`, `2 <= k <= 7`.
pub const REFERENCE_TABLE: [[(Option<f64>, f64); 6]; 6] = [
    [(None, 0.500), (Some(0.818), 0.918), (Some(0.772), 0.977), (Some(0.702), 0.992), (Some(0.637), 0.997), (Some(0.582), 0.999)],
    [(Some(0.838), 0.897), (Some(0.776), 0.988), (Some(0.667), 0.998), (Some(0.579), 1.0), (Some(0.511), 1.0), (Some(0.457), 1.0)],
    [(Some(0.858), 0.959), (Some(0.725), 0.997), (Some(0.604), 1.0), (Some(0.515), 1.0), (Some(0.450), 1.0), (Some(0.399), 1.0)],
    [(Some(0.850), 0.980), (Some(0.687), 0.999), (Some(0.562), 1.0), (Some(0.476), 1.0), (Some(0.412), 1.0), (Some(0.364), 1.0)],
    [(Some(0.837), 0.990), (Some(0.658), 1.0), (Some(0.533), 1.0), (Some(0.448), 1.0), (Some(0.387), 1.0), (Some(0.341), 1.0)],
    [(Some(0.823), 0.994), (Some(0.635), 1.0), (Some(0.511), 1.0), (Some(0.427), 1.0), (Some(0.368), 1.0), (Some(0.323), 1.0)],
];

pub fn reference_thresholds(k: usize, l: usize) -> Result<ReferencePair> {
    if !(2..=7).contains(&k) || !(1..=6).contains(&l) {
        return Err(Error::OutOfTable { k, l });
    }
    let (peeling, load) = REFERENCE_TABLE[l - 1][k - 2];
    Ok(ReferencePair { peeling, load })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round3(x: f64) -> f64 {
        (x * 1000.0).round() / 1000.0
    }

    #[test]
    fn matches_reference_row() {
        for k in 3..=7 {
            let r = peeling_threshold(k).unwrap();
            assert_eq!(Some(round3(r.c_delta)), reference_thresholds(k, 1).unwrap().peeling, "k = {k}");
        }
    }

    #[test]
    fn local_minimum_and_consistency() {
        for k in 3..=12 {
            let r = peeling_threshold(k).unwrap();
            let g = objective(r.lambda_star, k);
            assert!((g - r.c_delta).abs() < 1e-15);
            assert!(objective(r.lambda_star + 1e-6, k) >= g);
            assert!(objective(r.lambda_star - 1e-6, k) >= g);
        }
    }

    #[test]
    fn decreasing_in_k() {
        let values: Vec<f64> = (3..=12).map(|k| peeling_threshold(k).unwrap().c_delta).collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn rejects_k_two() {
        assert!(matches!(peeling_threshold(2), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn table_lookup() {
        assert_eq!(reference_thresholds(3, 1).unwrap(), ReferencePair { peeling: Some(0.818), load: 0.918 });
        assert_eq!(reference_thresholds(4, 1).unwrap(), ReferencePair { peeling: Some(0.772), load: 0.977 });
        assert_eq!(reference_thresholds(2, 2).unwrap(), ReferencePair { peeling: Some(0.838), load: 0.897 });
        assert_eq!(reference_thresholds(2, 1).unwrap().peeling, None);
        assert!(matches!(reference_thresholds(8, 1), Err(Error::OutOfTable { k: 8, l: 1 })));
        assert!(reference_thresholds(3, 0).is_err());
    }
}
