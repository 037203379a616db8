//! Per-player feedforward regression from a strategy to its approximated
//! ideal point.
//!
//! The network has one `tanh` hidden layer and a linear output layer.
//! Inputs are mapped to `[0, 1]` through the player's strategy bounds,
//! outputs through the min-max range of the current training batch. A
//! model is trained from scratch on every call; nothing carries over
//! between generations.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domination::PayoffVector;
use crate::error::{check_dim, Error, Result};
use crate::games::{Strategy, StrategyBounds};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SurrogateParams {
    pub hidden_units: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Initial weights are uniform in `[-init_range, init_range]`.
    pub init_range: f64,
}

impl Default for SurrogateParams {
    fn default() -> Self {
        SurrogateParams {
            hidden_units: 10,
            learning_rate: 0.05,
            epochs: 500,
            init_range: 0.5,
        }
    }
}

impl SurrogateParams {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_units == 0 {
            return Err(Error::config("surrogate.hidden_units", "must be at least 1"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::config("surrogate.learning_rate", "must be positive"));
        }
        if !(self.init_range > 0.0) {
            return Err(Error::config("surrogate.init_range", "must be positive"));
        }
        Ok(())
    }
}

/// A one-hidden-layer `tanh` network with all parameters in one flat
/// buffer: `w1 (hidden × inputs) | b1 | w2 (outputs × hidden) | b2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    inputs: usize,
    hidden: usize,
    outputs: usize,
    params: Vec<f64>,
}

impl Mlp {
    pub fn new(inputs: usize, hidden: usize, outputs: usize, params: Vec<f64>) -> Result<Self> {
        check_dim(Self::param_count(inputs, hidden, outputs), params.len())?;
        Ok(Mlp {
            inputs,
            hidden,
            outputs,
            params,
        })
    }

    pub fn random<R: Rng + ?Sized>(
        inputs: usize,
        hidden: usize,
        outputs: usize,
        init_range: f64,
        rng: &mut R,
    ) -> Self {
        let params = (0..Self::param_count(inputs, hidden, outputs))
            .map(|_| rng.random_range(-init_range..=init_range))
            .collect();
        Mlp {
            inputs,
            hidden,
            outputs,
            params,
        }
    }

    pub fn param_count(inputs: usize, hidden: usize, outputs: usize) -> usize {
        hidden * inputs + hidden + outputs * hidden + outputs
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    fn split(&self) -> (&[f64], &[f64], &[f64], &[f64]) {
        let (w1, rest) = self.params.split_at(self.hidden * self.inputs);
        let (b1, rest) = rest.split_at(self.hidden);
        let (w2, b2) = rest.split_at(self.outputs * self.hidden);
        (w1, b1, w2, b2)
    }

    fn hidden_activations(&self, x: &[f64], out: &mut [f64]) {
        let (w1, b1, _, _) = self.split();
        for (h, a) in out.iter_mut().enumerate() {
            let row = &w1[h * self.inputs..(h + 1) * self.inputs];
            *a = (b1[h] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()).tanh();
        }
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let mut act = vec![0.0; self.hidden];
        self.hidden_activations(x, &mut act);
        let (_, _, w2, b2) = self.split();
        (0..self.outputs)
            .map(|o| {
                let row = &w2[o * self.hidden..(o + 1) * self.hidden];
                b2[o] + row.iter().zip(&act).map(|(w, a)| w * a).sum::<f64>()
            })
            .collect()
    }

    /// Mean over samples of the summed squared output error.
    pub fn loss(&self, xs: &[Vec<f64>], ys: &[Vec<f64>]) -> f64 {
        let total: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| {
                self.forward(x)
                    .iter()
                    .zip(y)
                    .map(|(o, t)| (o - t) * (o - t))
                    .sum::<f64>()
            })
            .sum();
        total / xs.len() as f64
    }

    /// Loss and its analytic gradient with respect to the flat parameters.
    pub fn loss_and_gradient(&self, xs: &[Vec<f64>], ys: &[Vec<f64>]) -> (f64, Vec<f64>) {
        let (n_in, n_hid, n_out) = (self.inputs, self.hidden, self.outputs);
        let (_, _, w2, b2) = self.split();
        let mut grad = vec![0.0; self.params.len()];
        let off_b1 = n_hid * n_in;
        let off_w2 = off_b1 + n_hid;
        let off_b2 = off_w2 + n_out * n_hid;
        let scale = 2.0 / xs.len() as f64;
        let mut act = vec![0.0; n_hid];
        let mut delta_hidden = vec![0.0; n_hid];
        let mut loss = 0.0;
        for (x, y) in xs.iter().zip(ys) {
            self.hidden_activations(x, &mut act);
            delta_hidden.iter_mut().for_each(|d| *d = 0.0);
            for o in 0..n_out {
                let row = &w2[o * n_hid..(o + 1) * n_hid];
                let out = b2[o] + row.iter().zip(&act).map(|(w, a)| w * a).sum::<f64>();
                let err = out - y[o];
                loss += err * err;
                let g = scale * err;
                grad[off_b2 + o] += g;
                for h in 0..n_hid {
                    grad[off_w2 + o * n_hid + h] += g * act[h];
                    delta_hidden[h] += g * row[h];
                }
            }
            for h in 0..n_hid {
                let d = delta_hidden[h] * (1.0 - act[h] * act[h]);
                grad[off_b1 + h] += d;
                for i in 0..n_in {
                    grad[h * n_in + i] += d * x[i];
                }
            }
        }
        (loss / xs.len() as f64, grad)
    }
}

/// Per-objective min-max scaling; a constant objective maps to 0.5.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputScaling {
    min: Vec<f64>,
    range: Vec<f64>,
}

impl OutputScaling {
    pub fn fit(targets: &[PayoffVector]) -> Self {
        let k = targets[0].len();
        let mut min = vec![f64::INFINITY; k];
        let mut max = vec![f64::NEG_INFINITY; k];
        for t in targets {
            for (j, v) in t.iter().enumerate() {
                min[j] = min[j].min(*v);
                max[j] = max[j].max(*v);
            }
        }
        let range = min.iter().zip(&max).map(|(lo, hi)| hi - lo).collect();
        OutputScaling { min, range }
    }

    pub fn normalize(&self, y: &[f64]) -> Vec<f64> {
        y.iter()
            .enumerate()
            .map(|(j, v)| {
                if self.range[j] > 0.0 {
                    (v - self.min[j]) / self.range[j]
                } else {
                    0.5
                }
            })
            .collect()
    }

    pub fn denormalize(&self, y: &[f64]) -> Vec<f64> {
        y.iter()
            .enumerate()
            .map(|(j, v)| {
                if self.range[j] > 0.0 {
                    self.min[j] + v * self.range[j]
                } else {
                    self.min[j]
                }
            })
            .collect()
    }
}

/// A trained surrogate for one player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateModel {
    pub network: Mlp,
    input_lower: Vec<f64>,
    input_range: Vec<f64>,
    pub output_scaling: OutputScaling,
    pub epochs_run: usize,
    pub final_loss: f64,
}

impl SurrogateModel {
    pub fn input_dim(&self) -> usize {
        self.network.inputs()
    }

    pub fn output_dim(&self) -> usize {
        self.network.outputs()
    }

    fn normalize_input(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.input_lower.iter().zip(&self.input_range))
            .map(|(v, (lo, r))| (v - lo) / r)
            .collect()
    }

    /// Prediction for a raw decision vector.
    pub fn predict_values(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.input_dim(), x.len())?;
        let out = self.network.forward(&self.normalize_input(x));
        Ok(self.output_scaling.denormalize(&out))
    }

    /// Versioned text dump: a header line, the dimensions, the scaling
    /// vectors, then the flat parameter buffer, one row per line.
    pub fn to_text(&self) -> String {
        let mut s = String::from("coevo-surrogate v1\n");
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(" ");
        let _ = writeln!(
            s,
            "{} {} {}",
            self.network.inputs, self.network.hidden, self.network.outputs
        );
        let _ = writeln!(s, "{}", join(&self.input_lower));
        let _ = writeln!(s, "{}", join(&self.input_range));
        let _ = writeln!(s, "{}", join(&self.output_scaling.min));
        let _ = writeln!(s, "{}", join(&self.output_scaling.range));
        let (w1, b1, w2, b2) = self.network.split();
        for row in w1.chunks(self.network.inputs) {
            let _ = writeln!(s, "{}", join(row));
        }
        let _ = writeln!(s, "{}", join(b1));
        for row in w2.chunks(self.network.hidden) {
            let _ = writeln!(s, "{}", join(row));
        }
        let _ = writeln!(s, "{}", join(b2));
        s
    }
}

/// Fits a fresh model on exactly the supplied batch.
pub fn train_surrogate<R: Rng + ?Sized>(
    strategies: &[Strategy],
    targets: &[PayoffVector],
    bounds: &StrategyBounds,
    params: &SurrogateParams,
    rng: &mut R,
) -> Result<SurrogateModel> {
    check_dim(strategies.len(), targets.len())?;
    if strategies.is_empty() {
        return Err(Error::domain("surrogate training needs at least one sample"));
    }
    let n_in = bounds.len();
    let k = targets[0].len();
    for (s, t) in strategies.iter().zip(targets) {
        check_dim(n_in, s.len())?;
        check_dim(k, t.len())?;
        if let Some(v) = s.values.iter().chain(t.iter()).find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("non-finite training value {v}")));
        }
    }

    let input_lower = bounds.lower().to_vec();
    let input_range: Vec<f64> = (0..n_in).map(|i| bounds.range(i)).collect();
    let output_scaling = OutputScaling::fit(targets);
    let mut model = SurrogateModel {
        network: Mlp::random(n_in, params.hidden_units, k, params.init_range, rng),
        input_lower,
        input_range,
        output_scaling,
        epochs_run: 0,
        final_loss: f64::NAN,
    };
    let xs: Vec<Vec<f64>> = strategies
        .iter()
        .map(|s| model.normalize_input(&s.values))
        .collect();
    let ys: Vec<Vec<f64>> = targets
        .iter()
        .map(|t| model.output_scaling.normalize(t.as_slice()))
        .collect();

    for _ in 0..params.epochs {
        let (_, grad) = model.network.loss_and_gradient(&xs, &ys);
        for (p, g) in model.network.params_mut().iter_mut().zip(&grad) {
            *p -= params.learning_rate * g;
        }
    }
    model.epochs_run = params.epochs;
    model.final_loss = model.network.loss(&xs, &ys);
    if !model.final_loss.is_finite() {
        return Err(Error::State(format!(
            "surrogate training diverged (learning rate {})",
            params.learning_rate
        )));
    }
    Ok(model)
}

/// Surrogate estimate of the ideal point of `s`.
pub fn predict(model: &SurrogateModel, s: &Strategy) -> Result<PayoffVector> {
    PayoffVector::new(model.predict_values(&s.values)?)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::games::StrategyId;

    fn strategies(points: &[Vec<f64>]) -> Vec<Strategy> {
        points
            .iter()
            .enumerate()
            .map(|(i, v)| Strategy::new(StrategyId(i as u64), v.clone()))
            .collect()
    }

    #[test]
    fn constant_targets_fit_exactly() {
        let bounds = StrategyBounds::new(vec![0.0, -1.0], vec![1.0, 1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let xs: Vec<Vec<f64>> = (0..20)
            .map(|_| vec![rng.random::<f64>(), rng.random_range(-1.0..1.0)])
            .collect();
        let ss = strategies(&xs);
        let targets = vec![PayoffVector::from([0.7, -1.3]); ss.len()];
        let model = train_surrogate(&ss, &targets, &bounds, &SurrogateParams::default(), &mut rng).unwrap();
        for s in &ss {
            let p = predict(&model, s).unwrap();
            assert!((p[0] - 0.7).abs() < 1e-3 && (p[1] + 1.3).abs() < 1e-3);
        }
    }

    #[test]
    fn single_sample_is_interpolated() {
        let bounds = StrategyBounds::new(vec![0.0], vec![2.0]).unwrap();
        let ss = strategies(&[vec![1.5]]);
        let targets = vec![PayoffVector::from([3.0, 4.0])];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let model = train_surrogate(&ss, &targets, &bounds, &SurrogateParams::default(), &mut rng).unwrap();
        let p = predict(&model, &ss[0]).unwrap();
        assert!((p[0] - 3.0).abs() < 1e-3 && (p[1] - 4.0).abs() < 1e-3);
    }

    #[test]
    fn training_input_errors() {
        let bounds = StrategyBounds::new(vec![0.0], vec![1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = SurrogateParams::default();
        let ss = strategies(&[vec![0.5], vec![0.2]]);
        let one = vec![PayoffVector::from([1.0, 1.0])];
        assert!(matches!(train_surrogate(&ss, &one, &bounds, &p, &mut rng), Err(Error::Dimension { .. })));
        let wide = strategies(&[vec![0.5, 0.5]]);
        assert!(matches!(train_surrogate(&wide, &one, &bounds, &p, &mut rng), Err(Error::Dimension { .. })));
        assert!(train_surrogate(&[], &[], &bounds, &p, &mut rng).is_err());
    }

    #[test]
    fn predict_checks_dimension() {
        let bounds = StrategyBounds::new(vec![0.0], vec![1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ss = strategies(&[vec![0.5]]);
        let model = train_surrogate(&ss, &[PayoffVector::from([1.0, 1.0])], &bounds, &SurrogateParams::default(), &mut rng)
            .unwrap();
        let wrong = Strategy::new(StrategyId(9), vec![0.1, 0.2]);
        assert!(matches!(predict(&model, &wrong), Err(Error::Dimension { .. })));
    }

    #[test]
    fn scaling_round_trip() {
        let targets = [PayoffVector::from([-2.0, 5.0]), PayoffVector::from([3.0, 5.0])];
        let s = OutputScaling::fit(&targets);
        let y = [0.123456789, 5.0];
        let back = s.denormalize(&s.normalize(&y));
        assert!((back[0] - y[0]).abs() < 1e-12);
        assert_eq!(back[1], 5.0);
        assert_eq!(s.normalize(&[1.0, 99.0])[1], 0.5);
    }

    #[test]
    fn text_dump_has_header_and_rows() {
        let bounds = StrategyBounds::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ss = strategies(&[vec![0.1, 0.2], vec![0.4, 0.9]]);
        let t = [PayoffVector::from([1.0, 2.0]), PayoffVector::from([0.0, 3.0])];
        let params = SurrogateParams { hidden_units: 3, epochs: 5, ..Default::default() };
        let model = train_surrogate(&ss, &t, &bounds, &params, &mut rng).unwrap();
        let text = model.to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "coevo-surrogate v1");
        assert_eq!(lines[1], "2 3 2");
        // tag, dims, 4 scaling rows, 3 w1 rows, b1, 2 w2 rows, b2
        assert_eq!(lines.len(), 6 + 3 + 1 + 2 + 1);
    }
}
