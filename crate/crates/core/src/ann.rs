// SPDX-License-Identifier: MIT

//! Structured feed-forward networks: layers, architecture descriptors,
//! parameter counts and realizations.

use crate::error::{Error, Result};
use crate::sparse::Csr;

/// Pointwise activation applied on hidden layers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Activation {
    LeakyRelu { beta: f64 },
    Softplus,
}

impl Activation {
    pub fn leaky_relu(beta: f64) -> Result<Self> {
        let a = Activation::LeakyRelu { beta };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Activation::LeakyRelu { beta } if !(beta.is_finite() && beta >= 0.0 && beta != 1.0) => {
                Err(Error::InvalidActivation(format!("leaky relu slope {beta} outside [0,inf) minus {{1}}")))
            }
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Activation::LeakyRelu { beta } => x.max(beta * x),
            Activation::Softplus => x.max(0.0) + (-x.abs()).exp().ln_1p(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub w: Csr,
    pub b: Vec<f64>,
}

impl Layer {
    pub fn new(w: Csr, b: Vec<f64>) -> Result<Self> {
        if w.rows() != b.len() {
            return Err(Error::InvalidNet(format!("weight has {} rows but bias has {} entries", w.rows(), b.len())));
        }
        Ok(Layer { w, b })
    }

    pub fn affine(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.w.matvec(x);
        for (yi, bi) in y.iter_mut().zip(&self.b) {
            *yi += bi;
        }
        y
    }
}

/// Architecture descriptor `(l_0, ..., l_L)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arch {
    pub dims: Vec<usize>,
}

impl Arch {
    pub fn depth(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn hidden(&self) -> usize {
        self.depth() - 1
    }

    pub fn input(&self) -> usize {
        self.dims[0]
    }

    pub fn output(&self) -> usize {
        *self.dims.last().unwrap()
    }

    /// `l_n` for `n <= L`, zero beyond.
    pub fn dim(&self, n: usize) -> usize {
        self.dims.get(n).copied().unwrap_or(0)
    }

    /// Largest entry of the descriptor.
    pub fn max_width(&self) -> usize {
        *self.dims.iter().max().unwrap()
    }

    /// `sum_k l_k (l_{k-1} + 1)`, overflow-checked.
    pub fn param_count(&self) -> u64 {
        self.dims
            .windows(2)
            .map(|w| (w[1] as u64).checked_mul(w[0] as u64 + 1).expect("parameter count overflow"))
            .try_fold(0u64, u64::checked_add)
            .expect("parameter count overflow")
    }
}

/// A feed-forward network: nonempty sequence of affine layers with matching inner dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct Ann {
    layers: Vec<Layer>,
}

impl Ann {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidNet("network needs at least one layer".into()));
        }
        if layers[0].w.cols() == 0 {
            return Err(Error::InvalidNet("input dimension must be positive".into()));
        }
        for (k, l) in layers.iter().enumerate() {
            if l.w.rows() == 0 {
                return Err(Error::InvalidNet(format!("layer {k} has zero width")));
            }
            if l.b.len() != l.w.rows() {
                return Err(Error::InvalidNet(format!("layer {k}: bias length {} != rows {}", l.b.len(), l.w.rows())));
            }
            if k > 0 && l.w.cols() != layers[k - 1].w.rows() {
                return Err(Error::InvalidNet(format!(
                    "layer {k}: expects {} inputs, previous layer has {} outputs",
                    l.w.cols(),
                    layers[k - 1].w.rows()
                )));
            }
        }
        Ok(Ann { layers })
    }

    /// Single affine layer.
    pub fn affine(w: Csr, b: Vec<f64>) -> Result<Self> {
        Ann::new(vec![Layer::new(w, b)?])
    }

    /// Depth-one net `(I_n, 0)`.
    pub fn identity_affine(n: usize) -> Self {
        Ann { layers: vec![Layer { w: Csr::identity(n), b: vec![0.0; n] }] }
    }

    /// Depth-one net with all weights and biases zero.
    pub fn zero(input: usize, output: usize) -> Self {
        Ann { layers: vec![Layer { w: Csr::zeros(output, input), b: vec![0.0; output] }] }
    }

    pub(crate) fn from_layers_unchecked(layers: Vec<Layer>) -> Self {
        debug_assert!(Ann::new(layers.clone()).is_ok());
        Ann { layers }
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn into_layers(self) -> Vec<Layer> {
        self.layers
    }

    pub fn describe(&self) -> Arch {
        let mut dims = Vec::with_capacity(self.layers.len() + 1);
        dims.push(self.layers[0].w.cols());
        dims.extend(self.layers.iter().map(|l| l.w.rows()));
        Arch { dims }
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].w.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().w.rows()
    }

    pub fn param_count(&self) -> u64 {
        self.describe().param_count()
    }

    /// Stored nonzero weights and biases.
    pub fn nnz(&self) -> usize {
        self.layers.iter().map(|l| l.w.nnz() + l.b.iter().filter(|v| **v != 0.0).count()).sum()
    }

    pub fn realize(&self, act: &Activation, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::InputShape { expected: self.input_dim(), got: x.len() });
        }
        let last = self.layers.len() - 1;
        let mut v = x.to_vec();
        for (k, layer) in self.layers.iter().enumerate() {
            v = layer.affine(&v);
            if k < last {
                for t in &mut v {
                    *t = act.apply(*t);
                }
            }
        }
        Ok(v)
    }
}
