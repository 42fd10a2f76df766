use alloc::vec::Vec;
use core::sync::atomic::{AtomicUsize, Ordering};

use super::matrix::{matmul_dztx, matmul_dzw, matmul_xwt, Matrix};
use crate::error::{check_len, invalid, Error, Result};
use crate::math;
use crate::numerics::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Linear,
    Softmax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerSpec {
    pub input_width: usize,
    pub output_width: usize,
    pub activation: Activation,
}

impl LayerSpec {
    pub fn new(input_width: usize, output_width: usize, activation: Activation) -> Self {
        Self {
            input_width,
            output_width,
            activation,
        }
    }
}

/// One affine layer `z = W x + b` followed by its activation.
/// `weights` is `output_width × input_width`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    spec: LayerSpec,
    weights: Vec<f64>,
    biases: Vec<f64>,
}

impl Dense {
    pub fn from_parts(spec: LayerSpec, weights: Vec<f64>, biases: Vec<f64>) -> Result<Self> {
        if spec.input_width == 0 || spec.output_width == 0 {
            return Err(invalid("layer", "widths must be at least 1"));
        }
        check_len(spec.input_width * spec.output_width, weights.len())?;
        check_len(spec.output_width, biases.len())?;
        if weights.iter().chain(&biases).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            spec,
            weights,
            biases,
        })
    }

    /// Zero biases, weights uniform in `±√(6 / (fan_in + fan_out))`.
    pub fn glorot(spec: LayerSpec, rng: &mut RngStream) -> Result<Self> {
        let limit = math::sqrt(6.0 / (spec.input_width + spec.output_width) as f64);
        let weights = (0..spec.input_width * spec.output_width)
            .map(|_| rng.uniform_range(-limit, limit))
            .collect();
        Self::from_parts(spec, weights, alloc::vec![0.0; spec.output_width])
    }

    pub fn spec(&self) -> LayerSpec {
        self.spec
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    fn parameter_count(&self) -> usize {
        self.weights.len() + self.biases.len()
    }
}

static NEXT_ID: AtomicUsize = AtomicUsize::new(1);

fn fresh_id() -> usize {
    NEXT_ID.fetch_add(1, Ordering::Relaxed)
}

/// Feed-forward network parameters together with their layer specification.
///
/// Every mutation bumps an internal version so that a [`ForwardCache`]
/// produced before the change is rejected by [`Mlp::backward`].
#[derive(Debug, PartialEq)]
pub struct Mlp {
    layers: Vec<Dense>,
    id: usize,
    version: u64,
}

impl Clone for Mlp {
    fn clone(&self) -> Self {
        Self {
            layers: self.layers.clone(),
            id: fresh_id(),
            version: 0,
        }
    }
}

fn validate_specs(specs: &[LayerSpec]) -> Result<()> {
    if specs.is_empty() {
        return Err(invalid("layers", "network needs at least one layer"));
    }
    for (i, s) in specs.iter().enumerate() {
        if s.input_width == 0 || s.output_width == 0 {
            return Err(invalid("layers", "widths must be at least 1"));
        }
        if s.activation == Activation::Softmax && i + 1 != specs.len() {
            return Err(invalid("layers", "softmax is only allowed on the final layer"));
        }
        if i > 0 {
            check_len(specs[i - 1].output_width, s.input_width)?;
        }
    }
    Ok(())
}

impl Mlp {
    /// Randomly initialized network (see [`Dense::glorot`]).
    pub fn new(specs: &[LayerSpec], rng: &mut RngStream) -> Result<Self> {
        validate_specs(specs)?;
        let layers = specs
            .iter()
            .map(|&s| Dense::glorot(s, rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::wrap(layers))
    }

    /// Builds a stack of ReLU hidden layers and a final layer with `head`.
    pub fn stack(
        input: usize,
        hidden: &[usize],
        output: usize,
        head: Activation,
        rng: &mut RngStream,
    ) -> Result<Self> {
        Self::new(&stack_specs(input, hidden, output, head), rng)
    }

    pub fn from_layers(layers: Vec<Dense>) -> Result<Self> {
        let specs: Vec<LayerSpec> = layers.iter().map(|l| l.spec).collect();
        validate_specs(&specs)?;
        Ok(Self::wrap(layers))
    }

    fn wrap(layers: Vec<Dense>) -> Self {
        Self {
            layers,
            id: fresh_id(),
            version: 0,
        }
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn specs(&self) -> Vec<LayerSpec> {
        self.layers.iter().map(|l| l.spec).collect()
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].spec.input_width
    }

    pub fn output_width(&self) -> usize {
        self.layers[self.layers.len() - 1].spec.output_width
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(Dense::parameter_count).sum()
    }

    fn locate(&self, mut index: usize) -> (usize, bool, usize) {
        for (li, l) in self.layers.iter().enumerate() {
            if index < l.weights.len() {
                return (li, true, index);
            }
            index -= l.weights.len();
            if index < l.biases.len() {
                return (li, false, index);
            }
            index -= l.biases.len();
        }
        panic!("parameter index out of range");
    }

    /// Parameter `index` in flattened order: per layer, weights then biases.
    pub fn parameter(&self, index: usize) -> f64 {
        let (l, w, i) = self.locate(index);
        if w {
            self.layers[l].weights[i]
        } else {
            self.layers[l].biases[i]
        }
    }

    pub fn set_parameter(&mut self, index: usize, value: f64) {
        let (l, w, i) = self.locate(index);
        if w {
            self.layers[l].weights[i] = value;
        } else {
            self.layers[l].biases[i] = value;
        }
        self.version += 1;
    }

    pub(crate) fn for_each_parameter_mut(&mut self, mut f: impl FnMut(usize, usize, bool, &mut f64)) {
        for (li, layer) in self.layers.iter_mut().enumerate() {
            for (i, w) in layer.weights.iter_mut().enumerate() {
                f(li, i, true, w);
            }
            for (i, b) in layer.biases.iter_mut().enumerate() {
                f(li, i, false, b);
            }
        }
        self.version += 1;
    }

    /// Forward pass over a batch (one example per row), keeping every
    /// layer's activations for [`Mlp::backward`].
    pub fn forward(&self, input: &Matrix) -> Result<ForwardCache> {
        check_len(self.input_width(), input.cols())?;
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(input.clone());
        for layer in &self.layers {
            let x = activations.last().expect("non-empty");
            let mut z = Matrix::zeros(x.rows(), layer.spec.output_width);
            matmul_xwt(x, &layer.weights, layer.spec.output_width, &mut z);
            for r in 0..z.rows() {
                let row = z.row_mut(r);
                for (v, b) in row.iter_mut().zip(&layer.biases) {
                    *v += b;
                }
                activate(layer.spec.activation, row);
            }
            activations.push(z);
        }
        Ok(ForwardCache {
            id: self.id,
            version: self.version,
            activations,
        })
    }

    /// Forward pass returning only the network output.
    pub fn predict(&self, input: &Matrix) -> Result<Matrix> {
        Ok(self.forward(input)?.into_output())
    }

    /// Backpropagates `d_output`, the loss gradient with respect to the
    /// network output (after the final activation).
    pub fn backward(&self, cache: &ForwardCache, d_output: &Matrix) -> Result<Backward> {
        self.check_cache(cache, d_output)?;
        let last = self.layers.len() - 1;
        let dz = match self.layers[last].spec.activation {
            Activation::Softmax => softmax_backward(cache.output(), d_output)?,
            Activation::Relu => relu_backward(cache.output(), d_output),
            Activation::Linear => d_output.clone(),
        };
        self.backward_pre_activation(cache, dz)
    }

    /// Backpropagates a gradient taken with respect to the final layer's
    /// pre-activation (logits). With a softmax head and cross-entropy loss
    /// this is `(p − onehot) / M`.
    pub fn backward_from_logits(&self, cache: &ForwardCache, d_logits: &Matrix) -> Result<Backward> {
        self.check_cache(cache, d_logits)?;
        self.backward_pre_activation(cache, d_logits.clone())
    }

    fn check_cache(&self, cache: &ForwardCache, grad: &Matrix) -> Result<()> {
        if cache.id != self.id || cache.version != self.version {
            return Err(Error::StaleCache);
        }
        check_len(cache.output().rows(), grad.rows())?;
        check_len(self.output_width(), grad.cols())
    }

    fn backward_pre_activation(&self, cache: &ForwardCache, mut dz: Matrix) -> Result<Backward> {
        let mut grads: Vec<LayerGrads> = Vec::with_capacity(self.layers.len());
        for (li, layer) in self.layers.iter().enumerate().rev() {
            let x = &cache.activations[li];
            let mut dw = alloc::vec![0.0; layer.weights.len()];
            matmul_dztx(&dz, x, &mut dw);
            let mut db = alloc::vec![0.0; layer.biases.len()];
            for r in 0..dz.rows() {
                for (acc, v) in db.iter_mut().zip(dz.row(r)) {
                    *acc += v;
                }
            }
            grads.push(LayerGrads {
                weights: dw,
                biases: db,
            });
            let mut dx = Matrix::zeros(dz.rows(), layer.spec.input_width);
            matmul_dzw(&dz, &layer.weights, layer.spec.input_width, &mut dx);
            if li > 0 {
                dz = match self.layers[li - 1].spec.activation {
                    Activation::Relu => relu_backward(x, &dx),
                    Activation::Linear => dx,
                    Activation::Softmax => unreachable!("softmax only on the final layer"),
                };
            } else {
                dz = dx;
            }
        }
        grads.reverse();
        Ok(Backward {
            grads: MlpGrads { layers: grads },
            input_grad: dz,
        })
    }
}

pub(crate) fn stack_specs(input: usize, hidden: &[usize], output: usize, head: Activation) -> Vec<LayerSpec> {
    let mut specs = Vec::with_capacity(hidden.len() + 1);
    let mut width = input;
    for &h in hidden {
        specs.push(LayerSpec::new(width, h, Activation::Relu));
        width = h;
    }
    specs.push(LayerSpec::new(width, output, head));
    specs
}

fn activate(activation: Activation, row: &mut [f64]) {
    match activation {
        Activation::Relu => row.iter_mut().for_each(|v| *v = v.max(0.0)),
        Activation::Linear => {}
        Activation::Softmax => {
            let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut sum = 0.0;
            for v in row.iter_mut() {
                *v = math::exp(*v - max);
                sum += *v;
            }
            row.iter_mut().for_each(|v| *v /= sum);
        }
    }
}

fn relu_backward(out: &Matrix, d_out: &Matrix) -> Matrix {
    let mut dz = d_out.clone();
    for (g, &a) in dz.data_mut().iter_mut().zip(out.data()) {
        if a <= 0.0 {
            *g = 0.0;
        }
    }
    dz
}

/// Vector-Jacobian product of a row-wise softmax: `p ⊙ (g − ⟨g, p⟩)`.
pub fn softmax_backward(probs: &Matrix, d_probs: &Matrix) -> Result<Matrix> {
    check_len(probs.rows(), d_probs.rows())?;
    check_len(probs.cols(), d_probs.cols())?;
    let mut dz = Matrix::zeros(probs.rows(), probs.cols());
    for r in 0..probs.rows() {
        let p = probs.row(r);
        let g = d_probs.row(r);
        let dot: f64 = p.iter().zip(g).map(|(a, b)| a * b).sum();
        for ((d, &pi), &gi) in dz.row_mut(r).iter_mut().zip(p).zip(g) {
            *d = pi * (gi - dot);
        }
    }
    Ok(dz)
}

/// Activations recorded by [`Mlp::forward`].
#[derive(Debug, Clone)]
pub struct ForwardCache {
    id: usize,
    version: u64,
    activations: Vec<Matrix>,
}

impl ForwardCache {
    pub fn output(&self) -> &Matrix {
        self.activations.last().expect("non-empty")
    }

    pub fn into_output(mut self) -> Matrix {
        self.activations.pop().expect("non-empty")
    }
}

/// Result of a backward pass.
#[derive(Debug, Clone)]
pub struct Backward {
    pub grads: MlpGrads,
    /// Loss gradient with respect to the network input.
    pub input_grad: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrads {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

/// Parameter gradients shaped like an [`Mlp`].
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGrads {
    pub layers: Vec<LayerGrads>,
}

impl MlpGrads {
    pub fn zeros_like(params: &Mlp) -> Self {
        Self {
            layers: params
                .layers
                .iter()
                .map(|l| LayerGrads {
                    weights: alloc::vec![0.0; l.weights.len()],
                    biases: alloc::vec![0.0; l.biases.len()],
                })
                .collect(),
        }
    }

    pub fn matches(&self, params: &Mlp) -> bool {
        self.layers.len() == params.layers.len()
            && self
                .layers
                .iter()
                .zip(&params.layers)
                .all(|(g, l)| g.weights.len() == l.weights.len() && g.biases.len() == l.biases.len())
    }

    /// Flattened in the same order as [`Mlp::parameter`].
    pub fn flatten(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.biases).copied())
            .collect()
    }

    pub fn scale(&mut self, s: f64) {
        for l in &mut self.layers {
            l.weights.iter_mut().chain(l.biases.iter_mut()).for_each(|v| *v *= s);
        }
    }

    pub fn add_assign(&mut self, other: &MlpGrads) -> Result<()> {
        check_len(self.layers.len(), other.layers.len())?;
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            check_len(a.weights.len(), b.weights.len())?;
            check_len(a.biases.len(), b.biases.len())?;
            a.weights.iter_mut().zip(&b.weights).for_each(|(x, y)| *x += y);
            a.biases.iter_mut().zip(&b.biases).for_each(|(x, y)| *x += y);
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.biases))
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.biases))
            .all(|v| v.is_finite())
    }
}
