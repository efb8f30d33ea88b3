//! Convex decomposition of fractional perfect matchings.

use rand::Rng;

use crate::error::{RapError, Result};
use crate::graph::{perfect_matching_in, BipartiteMultigraph, EdgeId, Matching};

/// Below this much unexplained mass, a support without a perfect matching
/// is attributed to rounding noise rather than a bad input.
const RESIDUAL_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexCombination {
    terms: Vec<(f64, Matching)>,
}

impl ConvexCombination {
    pub fn terms(&self) -> &[(f64, Matching)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.terms.iter().map(|(w, _)| w).sum()
    }

    /// `sum_i weight_i * indicator(M_i)` over `num_edges` coordinates.
    pub fn reconstruct(&self, num_edges: usize) -> Vec<f64> {
        let mut out = vec![0.0; num_edges];
        for (w, m) in &self.terms {
            for &e in m.edges() {
                out[e] += w;
            }
        }
        out
    }

    /// Index of the term picked by one uniform draw against the cumulative
    /// weights.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, (w, _)) in self.terms.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        self.terms.len() - 1
    }
}

/// Peels perfect matchings off `x`: each round finds a perfect matching on
/// the support `{e : x_e > eps}` minus `avoid`, subtracts its minimum value
/// along the matching, and records that value as the weight. Stops once the
/// weights reach `1 - eps`, then rescales them to sum to one.
pub fn birkhoff_decompose(
    g: &BipartiteMultigraph,
    avoid: Option<EdgeId>,
    x: &[f64],
    eps: f64,
) -> Result<ConvexCombination> {
    let mut residual: Vec<f64> = x.to_vec();
    if let Some(f) = avoid {
        residual[f] = 0.0;
    }
    let mut terms: Vec<(f64, Matching)> = Vec::new();
    let mut total = 0.0;
    while total < 1.0 - eps {
        let support: Vec<bool> = residual.iter().map(|&v| v > eps).collect();
        let Some(m) = perfect_matching_in(g, &support) else {
            let remaining = 1.0 - total;
            if remaining <= RESIDUAL_SLACK && !terms.is_empty() {
                break;
            }
            return Err(RapError::SupportNoPerfectMatching { remaining });
        };
        let lambda = m.edges().iter().map(|&e| residual[e]).fold(f64::INFINITY, f64::min).min(1.0 - total);
        for &e in m.edges() {
            residual[e] -= lambda;
            if residual[e] <= eps {
                residual[e] = 0.0;
            }
        }
        total += lambda;
        terms.push((lambda, m));
    }
    terms.retain(|(w, _)| *w > 0.0);
    for (w, _) in terms.iter_mut() {
        *w /= total;
    }
    Ok(ConvexCombination { terms })
}

/// A matching drawn with probability equal to its weight.
pub fn sample<'a, R: Rng + ?Sized>(cc: &'a ConvexCombination, rng: &mut R) -> &'a Matching {
    &cc.terms[cc.sample_index(rng)].1
}
