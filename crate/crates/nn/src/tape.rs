use crate::error::{NnError, Result};
use crate::features::Features;
use crate::layer::{ConvLayer, LayerCache, LayerGrad};

/// Handle of a value stored on a [`Tape`].
pub type ValueId = usize;

/// A recorded operation; its output is the value pushed with it.
#[derive(Debug, Clone)]
pub enum Op {
    Input,
    Conv { layer: usize, input: ValueId, cache: LayerCache },
    Pool { input: ValueId },
    Unpool { input: ValueId },
    Concat { inputs: Vec<ValueId> },
}

/// Forward-pass record of a model: every intermediate value and the operation
/// that produced it.
#[derive(Debug, Clone)]
pub struct Tape {
    values: Vec<Features>,
    ops: Vec<Op>,
    n_layers: usize,
    consumed: bool,
}

impl Tape {
    pub fn new(n_layers: usize) -> Self {
        Tape {
            values: Vec::new(),
            ops: Vec::new(),
            n_layers,
            consumed: false,
        }
    }

    pub fn push(&mut self, value: Features) -> ValueId {
        self.record(Op::Input, value)
    }

    pub fn record(&mut self, op: Op, value: Features) -> ValueId {
        self.values.push(value);
        self.ops.push(op);
        self.values.len() - 1
    }

    pub fn value(&self, id: ValueId) -> &Features {
        &self.values[id]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Runs `layer` (number `index` in its model) on value `input` and records it.
    pub fn conv(&mut self, layer: &ConvLayer, index: usize, input: ValueId) -> Result<ValueId> {
        let (y, cache) = layer.forward_cached(&self.values[input])?;
        Ok(self.record(
            Op::Conv {
                layer: index,
                input,
                cache,
            },
            y,
        ))
    }

    /// Gradients of every layer given the gradient of the last recorded value.
    /// The layers must be the ones used in the forward pass. A tape can be
    /// replayed only once.
    pub fn backward(&mut self, layers: &[ConvLayer], seed: &Features) -> Result<Vec<LayerGrad>> {
        if self.consumed {
            return Err(NnError::TapeConsumed);
        }
        if layers.len() != self.n_layers {
            return Err(NnError::Shape("layer list differs from the recorded model".into()));
        }
        let last = self.values.len().checked_sub(1).ok_or_else(|| NnError::Shape("empty tape".into()))?;
        self.values[last].check_like(seed)?;
        self.consumed = true;

        let mut grads: Vec<Option<Features>> = vec![None; self.values.len()];
        grads[last] = Some(seed.clone());
        let mut layer_grads: Vec<Option<LayerGrad>> = vec![None; self.n_layers];
        for id in (0..self.values.len()).rev() {
            let Some(g) = grads[id].take() else { continue };
            match &self.ops[id] {
                Op::Input => {}
                Op::Conv { layer, input, cache } => {
                    let (gx, gp) = layers[*layer].backward(&self.values[*input], cache, &g)?;
                    accumulate(&mut grads[*input], gx)?;
                    layer_grads[*layer] = Some(gp);
                }
                Op::Pool { input } => {
                    let gx = g.unpool(self.values[*input].band_limit());
                    accumulate(&mut grads[*input], gx)?;
                }
                Op::Unpool { input } => {
                    let gx = g.pool(self.values[*input].band_limit());
                    accumulate(&mut grads[*input], gx)?;
                }
                Op::Concat { inputs } => {
                    let sizes: Vec<usize> = inputs.iter().map(|i| self.values[*i].n_channels()).collect();
                    for (i, part) in inputs.iter().zip(g.split(&sizes)) {
                        accumulate(&mut grads[*i], part)?;
                    }
                }
            }
        }
        layer_grads
            .into_iter()
            .zip(layers)
            .map(|(g, l)| {
                Ok(g.unwrap_or_else(|| LayerGrad {
                    weights: vec![vec![Default::default(); l.spec().filter_len()]; l.spec().in_channels * l.spec().out_channels],
                    bias: l.bias().map(|b| vec![0.0; b.len()]),
                    slope: 0.0,
                }))
            })
            .collect()
    }
}

fn accumulate(slot: &mut Option<Features>, g: Features) -> Result<()> {
    match slot {
        Some(acc) => acc.add_assign(&g)?,
        None => *slot = Some(g),
    }
    Ok(())
}
