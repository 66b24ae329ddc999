//! Dense feedforward networks: JSON model loading, point evaluation, point
//! Jacobians and seeded generation.
//!
//! The model document is
//! `{"layers":[{"weights":[[..],..],"bias":[..],"activation":"tanh"|"sigmoid"|"linear"}]}`
//! with `weights` given row-major (`out x in`).

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::activation::Activation;
use crate::error::{check_dim, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl Layer {
    pub fn new(weights: Vec<Vec<f64>>, bias: Vec<f64>, activation: Activation) -> Result<Self> {
        let layer = Self {
            weights,
            bias,
            activation,
        };
        layer.validate()?;
        Ok(layer)
    }

    pub fn in_dim(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    pub fn out_dim(&self) -> usize {
        self.weights.len()
    }

    fn validate(&self) -> Result<()> {
        if self.weights.is_empty() || self.in_dim() == 0 {
            return Err(Error::Schema("layer with empty weight matrix".into()));
        }
        if let Some(row) = self.weights.iter().find(|r| r.len() != self.in_dim()) {
            return Err(Error::Schema(format!(
                "ragged weight matrix: row of length {} in a matrix with {} columns",
                row.len(),
                self.in_dim()
            )));
        }
        if self.bias.len() != self.out_dim() {
            return Err(Error::Schema(format!(
                "bias length {} does not match {} weight rows",
                self.bias.len(),
                self.out_dim()
            )));
        }
        let finite = self.weights.iter().flatten().chain(&self.bias).all(|v| v.is_finite());
        if !finite {
            return Err(Error::Domain("non-finite weight or bias".into()));
        }
        Ok(())
    }

    /// `W x + b` in plain floating point.
    pub fn affine(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(row, b)| row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b)
            .collect()
    }
}

/// An immutable stack of dense layers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Network {
    layers: Vec<Layer>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDocument {
    layers: Vec<RawLayer>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayer {
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
    activation: String,
}

impl Network {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Schema("network has no layers".into()));
        }
        for layer in &layers {
            layer.validate()?;
        }
        for (k, pair) in layers.windows(2).enumerate() {
            if pair[0].out_dim() != pair[1].in_dim() {
                return Err(Error::Schema(format!(
                    "layer {k} outputs {} values but layer {} expects {}",
                    pair[0].out_dim(),
                    k + 1,
                    pair[1].in_dim()
                )));
            }
        }
        Ok(Self { layers })
    }

    /// Parses and validates a model JSON document.
    pub fn from_json(document: &str) -> Result<Self> {
        let doc: ModelDocument =
            serde_json::from_str(document).map_err(|e| Error::Schema(e.to_string()))?;
        let layers = doc
            .layers
            .into_iter()
            .map(|raw| {
                let activation = raw.activation.parse()?;
                Ok(Layer {
                    weights: raw.weights,
                    bias: raw.bias,
                    activation,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(layers)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Serializes to the model schema. Floats are written in shortest
    /// round-trip form, so `from_json(to_json())` is bit-identical.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim()
    }

    pub fn is_square(&self) -> bool {
        self.input_dim() == self.output_dim()
    }

    pub fn forward_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.input_dim(), x.len(), "network input")?;
        let mut v = x.to_vec();
        for layer in &self.layers {
            v = layer.affine(&v);
            for e in &mut v {
                *e = layer.activation.eval(*e);
            }
        }
        Ok(v)
    }

    /// Chain-rule Jacobian `diag(f'_L(z_L)) W_L ... diag(f'_1(z_1)) W_1` at `x`,
    /// returned as rows (`output_dim x input_dim`).
    pub fn point_jacobian(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        check_dim(self.input_dim(), x.len(), "network input")?;
        let n = self.input_dim();
        let mut jac: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let mut v = x.to_vec();
        for layer in &self.layers {
            let z = layer.affine(&v);
            let next: Vec<Vec<f64>> = layer
                .weights
                .iter()
                .zip(&z)
                .map(|(row, &zi)| {
                    let d = layer.activation.deriv(zi);
                    (0..n)
                        .map(|j| d * row.iter().zip(&jac).map(|(w, r)| w * r[j]).sum::<f64>())
                        .collect()
                })
                .collect();
            jac = next;
            v = z.iter().map(|&zi| layer.activation.eval(zi)).collect();
        }
        Ok(jac)
    }

    /// Seeded network with `activation` on hidden layers and a linear output layer.
    pub fn generate(seed: u64, dims: &[usize], activation: Activation, scale: f64) -> Result<Self> {
        Self::generate_with_output(seed, dims, activation, Activation::Linear, scale)
    }

    /// Seeded network; every weight and bias is drawn uniformly from
    /// `[-scale, scale]` by a ChaCha stream keyed on `seed`, in layer-major,
    /// row-major order (weights of a layer before its bias).
    pub fn generate_with_output(
        seed: u64,
        dims: &[usize],
        hidden: Activation,
        output: Activation,
        scale: f64,
    ) -> Result<Self> {
        if dims.len() < 2 || dims.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "need at least two positive layer widths, got {dims:?}"
            )));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {scale}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let last = dims.len() - 2;
        let layers = dims
            .windows(2)
            .enumerate()
            .map(|(k, w)| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let weights = (0..fan_out)
                    .map(|_| (0..fan_in).map(|_| rng.gen_range(-scale..=scale)).collect())
                    .collect();
                let bias = (0..fan_out).map(|_| rng.gen_range(-scale..=scale)).collect();
                let activation = if k == last { output } else { hidden };
                Layer {
                    weights,
                    bias,
                    activation,
                }
            })
            .collect();
        Self::new(layers)
    }

    /// Single linear layer `x -> W x + b`.
    pub fn linear(weights: Vec<Vec<f64>>, bias: Vec<f64>) -> Result<Self> {
        Self::new(vec![Layer::new(weights, bias, Activation::Linear)?])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let w = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::linear(w, vec![0.0; n])
    }
}
