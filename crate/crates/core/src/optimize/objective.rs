use crate::cycle::CycleMetrics;
use crate::registry::{Named, Registry};

/// Scalar figure of a cycle that the optimizers maximize.
pub trait Objective: Named + Send + Sync {
    /// Column name used in reports.
    fn symbol(&self) -> &'static str;

    fn evaluate(&self, metrics: &CycleMetrics) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CoolingRate;

impl Named for CoolingRate {
    fn name(&self) -> &'static str {
        "cooling-rate"
    }
}

impl Objective for CoolingRate {
    fn symbol(&self) -> &'static str {
        "R"
    }

    fn evaluate(&self, metrics: &CycleMetrics) -> f64 {
        metrics.cooling_rate
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FigureOfMerit;

impl Named for FigureOfMerit {
    fn name(&self) -> &'static str {
        "figure-of-merit"
    }
}

impl Objective for FigureOfMerit {
    fn symbol(&self) -> &'static str {
        "chi"
    }

    fn evaluate(&self, metrics: &CycleMetrics) -> f64 {
        metrics.chi
    }
}

pub fn objectives() -> Registry<dyn Objective> {
    let mut reg: Registry<dyn Objective> = Registry::new("objective");
    reg.register(Box::new(CoolingRate)).register(Box::new(FigureOfMerit));
    reg
}
