/// The acceleration sequence `θ_0 = 1`, `(1 − θ_{k+1})/θ_{k+1}² = 1/θ_k²`,
/// together with the averaging normalizer `C_k = Σ_{j≤k} 1/θ_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaSchedule {
    theta: f64,
    k: u64,
    weight_sum: f64,
}

impl Default for ThetaSchedule {
    fn default() -> Self {
        Self::new()
    }
}

impl ThetaSchedule {
    pub fn new() -> Self {
        Self {
            theta: 1.0,
            k: 0,
            weight_sum: 1.0,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// `C_k`.
    pub fn weight_sum(&self) -> f64 {
        self.weight_sum
    }

    /// Next θ is the positive root of `θ²/θ_k² + θ − 1 = 0`, i.e.
    /// `(θ_k²/2)(√(1 + 4/θ_k²) − 1)`, evaluated in the rationalized form
    /// `2/(1 + √(1 + 4/θ_k²))` which avoids cancellation.
    pub fn advance(&mut self) {
        let t2 = self.theta * self.theta;
        self.theta = 2.0 / (1.0 + (1.0 + 4.0 / t2).sqrt());
        self.k += 1;
        self.weight_sum += 1.0 / self.theta;
    }

    /// `((1 − θ_{k+1})/θ_{k+1}² − 1/θ_k²)·θ_k²`, the recurrence residual
    /// relative to the size of its terms.
    pub fn recurrence_residual(prev: f64, next: f64) -> f64 {
        ((1.0 - next) / (next * next) - 1.0 / (prev * prev)) * prev * prev
    }
}
