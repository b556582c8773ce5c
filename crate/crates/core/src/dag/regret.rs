use serde::{Deserialize, Serialize};

/// Local regret minimizer used at every decision point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RmVariant {
    /// Regret matching.
    Rm,
    /// Regret matching plus (regrets clamped at zero).
    RmPlus,
    /// Predictive RM+ with the last instantaneous regret as prediction.
    PredictiveRmPlus,
    /// Multiplicative weights with a decreasing step size.
    Mwu,
}

impl RmVariant {
    pub const ALL: [RmVariant; 4] = [RmVariant::Rm, RmVariant::RmPlus, RmVariant::PredictiveRmPlus, RmVariant::Mwu];

    pub fn name(self) -> &'static str {
        match self {
            RmVariant::Rm => "rm",
            RmVariant::RmPlus => "rm+",
            RmVariant::PredictiveRmPlus => "prm+",
            RmVariant::Mwu => "mwu",
        }
    }
}

fn normalize_positive(values: impl Iterator<Item = f64>, out: &mut [f64]) {
    let mut sum = 0.0;
    for (o, v) in out.iter_mut().zip(values) {
        *o = v.max(0.0);
        sum += *o;
    }
    if sum > 0.0 {
        out.iter_mut().for_each(|o| *o /= sum);
    } else {
        let u = 1.0 / out.len() as f64;
        out.iter_mut().for_each(|o| *o = u);
    }
}

/// Writes the strategy for the next round into `out`. `t` is the number
/// of utilities observed so far; `range` bounds the utility spread (MWU).
pub fn local_strategy(variant: RmVariant, regret: &[f64], prediction: &[f64], t: u64, range: f64, out: &mut [f64]) {
    match variant {
        RmVariant::Rm | RmVariant::RmPlus => normalize_positive(regret.iter().copied(), out),
        RmVariant::PredictiveRmPlus => {
            normalize_positive(regret.iter().zip(prediction).map(|(r, m)| r + m), out)
        }
        RmVariant::Mwu => {
            let n = out.len();
            if n == 1 {
                out[0] = 1.0;
                return;
            }
            let eta = (8.0 * (n as f64).ln() / (t + 1) as f64).sqrt() / range;
            let top = regret.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut sum = 0.0;
            for (o, r) in out.iter_mut().zip(regret) {
                *o = (eta * (r - top)).exp();
                sum += *o;
            }
            out.iter_mut().for_each(|o| *o /= sum);
        }
    }
}

/// Updates the state with the utility observed after playing `strategy`.
pub fn local_observe(variant: RmVariant, regret: &mut [f64], prediction: &mut [f64], strategy: &[f64], utility: &[f64]) {
    let value: f64 = strategy.iter().zip(utility).map(|(x, u)| x * u).sum();
    match variant {
        RmVariant::Rm | RmVariant::Mwu => {
            for (r, u) in regret.iter_mut().zip(utility) {
                *r += u - value;
            }
        }
        RmVariant::RmPlus => {
            for (r, u) in regret.iter_mut().zip(utility) {
                *r = (*r + u - value).max(0.0);
            }
        }
        RmVariant::PredictiveRmPlus => {
            for ((r, m), u) in regret.iter_mut().zip(prediction.iter_mut()).zip(utility) {
                let inst = u - value;
                *r = (*r + inst).max(0.0);
                *m = inst;
            }
        }
    }
}

/// A standalone regret minimizer over a simplex.
#[derive(Clone, Debug)]
pub struct LocalRm {
    pub variant: RmVariant,
    regret: Vec<f64>,
    prediction: Vec<f64>,
    strategy: Vec<f64>,
    t: u64,
    range: f64,
}

impl LocalRm {
    pub fn new(variant: RmVariant, actions: usize) -> Self {
        LocalRm {
            variant,
            regret: vec![0.0; actions],
            prediction: vec![0.0; actions],
            strategy: vec![1.0 / actions as f64; actions],
            t: 0,
            range: 2.0,
        }
    }

    /// Sets the utility spread used by MWU's step size (default 2, for
    /// utilities in [-1, 1]).
    pub fn with_range(mut self, range: f64) -> Self {
        self.range = range;
        self
    }

    pub fn next_strategy(&mut self) -> &[f64] {
        local_strategy(self.variant, &self.regret, &self.prediction, self.t, self.range, &mut self.strategy);
        &self.strategy
    }

    /// Observes the utility of the most recent strategy.
    pub fn observe(&mut self, utility: &[f64]) {
        local_observe(self.variant, &mut self.regret, &mut self.prediction, &self.strategy, utility);
        self.t += 1;
    }

    pub fn regret(&self) -> &[f64] {
        &self.regret
    }

    pub fn iterations(&self) -> u64 {
        self.t
    }
}
