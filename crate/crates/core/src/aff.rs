//! Adaptive fitness: robustness rewarded up to twice its value, minus a
//! penalty on degree/edge-count deviation whose weight grows with the
//! generation index.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::robustness::robustness_r;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AffError {
    #[error("node count mismatch: original has {original}, optimized has {optimized}")]
    NodeCountMismatch { original: usize, optimized: usize },
    #[error("graph list length mismatch: {originals} originals vs {optimizeds} optimized")]
    LengthMismatch { originals: usize, optimizeds: usize },
    #[error("generation {t} outside 0..={total}")]
    GenerationOutOfRange { t: usize, total: usize },
    #[error("invalid schedule parameters: {0}")]
    InvalidParams(String),
}

/// Penalty schedule `w(t) = (t / T)^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffParams {
    pub total_generations: usize,
    pub exponent: f64,
}

impl AffParams {
    pub fn new(total_generations: usize, exponent: f64) -> Result<Self, AffError> {
        let params = Self {
            total_generations,
            exponent,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), AffError> {
        if self.total_generations == 0 {
            return Err(AffError::InvalidParams("total generations must be at least 1".into()));
        }
        if !(self.exponent > 0.0 && self.exponent.is_finite()) {
            return Err(AffError::InvalidParams(format!(
                "exponent {} must be positive",
                self.exponent
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructuralDeviation {
    pub d_diff: f64,
    pub d_max: f64,
    pub e_diff: usize,
    pub e_max: usize,
    pub y: f64,
}

fn same_size(original: &Graph, optimized: &Graph) -> Result<(), AffError> {
    if original.node_count() != optimized.node_count() {
        return Err(AffError::NodeCountMismatch {
            original: original.node_count(),
            optimized: optimized.node_count(),
        });
    }
    Ok(())
}

/// Mean and maximum per-node absolute degree difference under the shared labeling.
pub fn degree_deviation(original: &Graph, optimized: &Graph) -> Result<(f64, f64), AffError> {
    same_size(original, optimized)?;
    let n = original.node_count();
    if n == 0 {
        return Ok((0.0, 0.0));
    }
    let mut total = 0usize;
    let mut max = 0usize;
    for k in 0..n {
        let diff = original.degree(k).abs_diff(optimized.degree(k));
        total += diff;
        max = max.max(diff);
    }
    Ok((total as f64 / n as f64, max as f64))
}

pub fn edge_deviation(original: &Graph, optimized: &Graph) -> Result<(usize, usize), AffError> {
    same_size(original, optimized)?;
    let (a, b) = (original.edge_count(), optimized.edge_count());
    Ok((a.abs_diff(b), a.max(b)))
}

// 0/0 counts as no deviation
fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn deviation_y(original: &Graph, optimized: &Graph) -> Result<StructuralDeviation, AffError> {
    let (d_diff, d_max) = degree_deviation(original, optimized)?;
    let (e_diff, e_max) = edge_deviation(original, optimized)?;
    let y = ratio(d_diff, d_max) + ratio(e_diff as f64, e_max as f64);
    Ok(StructuralDeviation {
        d_diff,
        d_max,
        e_diff,
        e_max,
        y,
    })
}

pub fn weight_w(t: usize, params: &AffParams) -> Result<f64, AffError> {
    params.validate()?;
    if t > params.total_generations {
        return Err(AffError::GenerationOutOfRange {
            t,
            total: params.total_generations,
        });
    }
    Ok((t as f64 / params.total_generations as f64).powf(params.exponent))
}

/// Robustness and deviation of one optimized graph; fitness at any
/// generation is arithmetic over these.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphScore {
    pub r: f64,
    pub y: f64,
}

impl GraphScore {
    pub fn measure(original: &Graph, optimized: &Graph) -> Result<Self, AffError> {
        Ok(Self {
            r: robustness_r(optimized),
            y: deviation_y(original, optimized)?.y,
        })
    }

    pub fn term(&self, w: f64) -> f64 {
        self.r * (2.0 - w * self.y)
    }
}

pub fn fitness_from_scores(scores: &[GraphScore], t: usize, params: &AffParams) -> Result<f64, AffError> {
    let w = weight_w(t, params)?;
    Ok(scores.iter().map(|s| s.term(w)).sum())
}

/// `f = sum_j R(opt_j) * (2 - w(t) * Y(orig_j, opt_j))`.
pub fn fitness(
    originals: &[Graph],
    optimizeds: &[Graph],
    t: usize,
    params: &AffParams,
) -> Result<f64, AffError> {
    if originals.len() != optimizeds.len() {
        return Err(AffError::LengthMismatch {
            originals: originals.len(),
            optimizeds: optimizeds.len(),
        });
    }
    let scores = originals
        .iter()
        .zip(optimizeds)
        .map(|(o, g)| GraphScore::measure(o, g))
        .collect::<Result<Vec<_>, _>>()?;
    fitness_from_scores(&scores, t, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    #[test]
    fn degree_deviation_examples() {
        let p = Graph::path(3);
        assert_eq!(degree_deviation(&p, &p).unwrap(), (0.0, 0.0));
        let (d, m) = degree_deviation(&p, &Graph::complete(3)).unwrap();
        assert!((d - 2.0 / 3.0).abs() < EPS);
        assert_eq!(m, 1.0);
        let (d, m) = degree_deviation(&Graph::star(4), &Graph::new(5)).unwrap();
        assert!((d - 1.6).abs() < EPS);
        assert_eq!(m, 4.0);
    }

    #[test]
    fn edge_deviation_examples() {
        let k = Graph::complete(4);
        assert_eq!(edge_deviation(&k, &k).unwrap(), (0, 6));
        assert_eq!(edge_deviation(&Graph::path(3), &Graph::complete(3)).unwrap(), (1, 3));
        assert_eq!(edge_deviation(&Graph::new(4), &Graph::new(4)).unwrap(), (0, 0));
    }

    #[test]
    fn mismatched_sizes_error() {
        assert!(matches!(
            degree_deviation(&Graph::new(3), &Graph::new(4)),
            Err(AffError::NodeCountMismatch { .. })
        ));
        assert!(edge_deviation(&Graph::new(3), &Graph::new(4)).is_err());
    }

    #[test]
    fn y_examples() {
        let p = Graph::path(3);
        assert_eq!(deviation_y(&p, &p).unwrap().y, 0.0);
        assert!((deviation_y(&p, &Graph::complete(3)).unwrap().y - 1.0).abs() < EPS);
        assert!((deviation_y(&Graph::star(4), &Graph::new(5)).unwrap().y - 1.4).abs() < EPS);
    }

    #[test]
    fn weight_examples() {
        let params = AffParams::new(50, 1.5).unwrap();
        assert_eq!(weight_w(0, &params).unwrap(), 0.0);
        assert_eq!(weight_w(50, &params).unwrap(), 1.0);
        assert!((weight_w(25, &params).unwrap() - 0.353553).abs() < 1e-6);
        assert!(weight_w(51, &params).is_err());
        assert!(AffParams::new(0, 1.0).is_err());
        assert!(AffParams::new(5, 0.0).is_err());
    }

    #[test]
    fn fitness_examples() {
        let params = AffParams::new(50, 1.5).unwrap();
        let orig = vec![Graph::path(3)];
        let opt = vec![Graph::complete(3)];
        assert!((fitness(&orig, &opt, 50, &params).unwrap() - 1.0 / 3.0).abs() < EPS);
        assert!((fitness(&orig, &opt, 0, &params).unwrap() - 2.0 / 3.0).abs() < EPS);

        let graphs = vec![Graph::star(4), Graph::complete(4)];
        for t in [0, 10, 50] {
            let f = fitness(&graphs, &graphs, t, &params).unwrap();
            assert!((f - 2.0 * (0.16 + 0.375)).abs() < EPS);
        }
        assert!(matches!(
            fitness(&graphs, &opt, 0, &params),
            Err(AffError::LengthMismatch { .. })
        ));
    }
}
