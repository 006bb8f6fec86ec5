use crate::error::{Error, Result};
use crate::integrator::ModelParams;
use crate::linear::{block_matrix, diagonalize};
use crate::C64;

use super::fit::ActionSeries;

/// `|ξ_j(t)|` under the linearized block equation
/// `i ∂_t (ξ_j, η_j) = A_{|j|²} (ξ_j, η_j)` on `samples + 1` equally spaced
/// times in `[0, t_max]`, for a mode `j` on the first axis.
pub fn linearized_oracle(
    j: i64,
    params: &ModelParams,
    init: [C64; 2],
    t_max: f64,
    samples: usize,
) -> Result<ActionSeries> {
    if j == 0 {
        return Err(Error::invalid("the linearized oracle needs j != 0"));
    }
    if !(t_max.is_finite() && t_max > 0.0) || samples == 0 {
        return Err(Error::invalid("oracle needs t_max > 0 and at least one sample"));
    }
    let block = block_matrix((j * j) as u64, params.lambda, params.mu)?;
    let diag = diagonalize(&block);
    let mut times = Vec::with_capacity(samples + 1);
    let mut amps = Vec::with_capacity(samples + 1);
    for k in 0..=samples {
        let t = t_max * k as f64 / samples as f64;
        times.push(t);
        amps.push(diag.propagator(t).apply(init)[0].norm());
    }
    ActionSeries::new(j, times, amps)
}
