use std::sync::Arc;

use crate::error::Result;
use crate::gpr::GprModel;
use crate::objective::Objective;

/// The kriging predictor exposed as a test function.
#[derive(Clone, Debug)]
pub struct EstimationFunction {
    model: Arc<GprModel>,
}

impl EstimationFunction {
    pub fn new(model: impl Into<Arc<GprModel>>) -> Self {
        Self {
            model: model.into(),
        }
    }

    pub fn model(&self) -> &GprModel {
        &self.model
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.model.predict(x)
    }
}

pub fn make_estimation_function(model: impl Into<Arc<GprModel>>) -> EstimationFunction {
    EstimationFunction::new(model)
}

impl Objective for EstimationFunction {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.model.predict_unchecked(x)
    }
}
