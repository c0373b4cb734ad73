/// Quality metrics of one design point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metrics {
    /// Accelerator silicon area in mm².
    pub area_mm2: f64,
    /// Network latency on the accelerator in ms.
    pub latency_ms: f64,
    /// Classification accuracy as a fraction.
    pub accuracy: f64,
}

impl Metrics {
    pub fn new(area_mm2: f64, latency_ms: f64, accuracy: f64) -> Self {
        Metrics { area_mm2, latency_ms, accuracy }
    }

    pub fn is_well_formed(&self) -> bool {
        self.area_mm2.is_finite()
            && self.area_mm2 > 0.0
            && self.latency_ms.is_finite()
            && self.latency_ms > 0.0
            && (0.0..=1.0).contains(&self.accuracy)
    }
}
