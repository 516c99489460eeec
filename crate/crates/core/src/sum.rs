//! Neumaier-compensated accumulation.
//!
//! Every integrator in the crate reduces node contributions through these
//! accumulators in a fixed node order, so results are reproducible bit for bit.

#[derive(Debug, Clone, Copy, Default)]
pub struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.carry += (self.sum - t) + value;
        } else {
            self.carry += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Component-wise compensated accumulator for vector-valued integrands.
#[derive(Debug, Clone)]
pub struct CompensatedVec {
    parts: Vec<Compensated>,
}

impl CompensatedVec {
    pub fn new(m: usize) -> Self {
        Self { parts: vec![Compensated::new(); m] }
    }

    #[inline]
    pub fn add_scaled(&mut self, values: &[f64], weight: f64) {
        for (acc, v) in self.parts.iter_mut().zip(values) {
            acc.add(weight * v);
        }
    }

    pub fn add_vec(&mut self, values: &[f64]) {
        self.add_scaled(values, 1.0);
    }

    pub fn values(&self) -> Vec<f64> {
        self.parts.iter().map(Compensated::value).collect()
    }
}

/// Compensated sum of a slice in index order.
pub fn sum(values: &[f64]) -> f64 {
    let mut acc = Compensated::new();
    for &v in values {
        acc.add(v);
    }
    acc.value()
}
