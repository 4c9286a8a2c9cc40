use super::{check_objective, OptimizerConfig, Recorder, RunTrace};
use crate::error::Result;
use crate::objective::Objective;
use crate::rng::rng_from_seed;

/// `budget` i.i.d. uniform samples in the box.
pub fn run_random_search<O: Objective + ?Sized>(
    objective: &O,
    config: &OptimizerConfig,
) -> Result<RunTrace> {
    check_objective(objective, config)?;
    let mut rng = rng_from_seed(config.seed);
    let mut rec = Recorder::new(objective, config);
    while !rec.exhausted() {
        let x = config.bounds.sample(&mut rng);
        rec.eval(&x);
    }
    Ok(rec.finish(config))
}
