/**
 * Model builders: the shallow 5-conv/3-dense regression CNN, a residual
 * backbone for pre-training, the concurrent-SU dense network, and the
 * bidirectional-encoder sequence model.
 */

import * as tf from '@tensorflow/tfjs'

export interface ShallowSpec {
  convChannels?: number[] // one entry per conv stage, increasing with depth
  denseUnits?: number[] // two hidden stages; the linear head is implicit
  seed?: number
}

/** 5 conv stages with 3x3 filters and ReLU, 3 fully-connected stages, linear head. */
export function buildShallowCnn(h: number, w: number, s: number, spec: ShallowSpec = {}): tf.LayersModel {
  const channels = spec.convChannels ?? [16, 32, 64, 128, 128]
  if (channels.length !== 5) {
    throw new Error('the shallow model uses exactly 5 convolution stages')
  }
  const dense = spec.denseUnits ?? [128, 64]
  const init = tf.initializers.heNormal({ seed: spec.seed ?? 7 })
  const model = tf.sequential()
  let size = Math.min(h, w)
  channels.forEach((filters, i) => {
    model.add(
      tf.layers.conv2d({
        filters,
        kernelSize: 3,
        padding: 'same',
        activation: 'relu',
        kernelInitializer: init,
        ...(i === 0 ? { inputShape: [h, w, s] } : {}),
      }),
    )
    // downsample after the later stages so the flatten stays small
    if (i >= 1 && size >= 2) {
      model.add(tf.layers.maxPooling2d({ poolSize: 2 }))
      size = Math.floor(size / 2)
    }
  })
  model.add(tf.layers.flatten())
  for (const units of dense) {
    model.add(tf.layers.dense({ units, activation: 'relu', kernelInitializer: init }))
  }
  model.add(tf.layers.dense({ units: 1, activation: 'linear', kernelInitializer: init }))
  return model
}

export interface ResidualSpec {
  blocks?: number // residual blocks of two 3x3 convs each
  filters?: number
  weightDecay?: number
  seed?: number
}

export const AVG_POOL_LAYER = 'avg_pool'

/**
 * Residual backbone ending in a named global-average-pooling layer (the
 * feature tap for the sequence model) and a linear regression head.
 */
export function buildResidualCnn(h: number, w: number, s: number, spec: ResidualSpec = {}): tf.LayersModel {
  const blocks = spec.blocks ?? 8
  const filters = spec.filters ?? 32
  const l2 = tf.regularizers.l2({ l2: spec.weightDecay ?? 1e-5 })
  const init = tf.initializers.heNormal({ seed: spec.seed ?? 11 })
  const conv = (x: tf.SymbolicTensor, f: number, strides: number) =>
    tf.layers
      .conv2d({ filters: f, kernelSize: 3, padding: 'same', strides, kernelInitializer: init, kernelRegularizer: l2 })
      .apply(x) as tf.SymbolicTensor

  const input = tf.input({ shape: [h, w, s] })
  let x = conv(input, filters, 1)
  x = tf.layers.reLU().apply(x) as tf.SymbolicTensor
  for (let b = 0; b < blocks; b++) {
    // downsample every third block while the map stays large enough
    const shape = x.shape.slice(1, 3) as number[]
    const strides = b % 3 === 2 && Math.min(...shape) >= 4 ? 2 : 1
    let shortcut = x
    let y = conv(x, filters, strides)
    y = tf.layers.reLU().apply(y) as tf.SymbolicTensor
    y = conv(y, filters, 1)
    if (strides !== 1) {
      shortcut = tf.layers
        .conv2d({ filters, kernelSize: 1, strides, kernelInitializer: init, kernelRegularizer: l2 })
        .apply(shortcut) as tf.SymbolicTensor
    }
    x = tf.layers.add().apply([y, shortcut]) as tf.SymbolicTensor
    x = tf.layers.reLU().apply(x) as tf.SymbolicTensor
  }
  const pooled = tf.layers.globalAveragePooling2d({ name: AVG_POOL_LAYER }).apply(x) as tf.SymbolicTensor
  const head = tf.layers.dense({ units: 1, activation: 'linear', kernelInitializer: init }).apply(pooled) as tf.SymbolicTensor
  return tf.model({ inputs: input, outputs: head })
}

/** Submodel exposing the pooled features of a residual model. */
export function featureExtractor(model: tf.LayersModel): tf.LayersModel {
  const layer = model.getLayer(AVG_POOL_LAYER)
  return tf.model({ inputs: model.inputs, outputs: layer.output as tf.SymbolicTensor })
}

/** 4 dense stages of 128 units with heavy dropout before the output. */
export function buildMultisuNn(nSus: number, seed = 13): tf.LayersModel {
  const init = tf.initializers.heNormal({ seed })
  const model = tf.sequential()
  for (let i = 0; i < 4; i++) {
    model.add(
      tf.layers.dense({
        units: 128,
        activation: 'relu',
        kernelInitializer: init,
        ...(i === 0 ? { inputShape: [nSus * 3] } : {}),
      }),
    )
  }
  model.add(tf.layers.dropout({ rate: 0.8, seed }))
  model.add(tf.layers.dense({ units: nSus, activation: 'linear', kernelInitializer: init }))
  return model
}

/**
 * Sequence-to-sequence grants: a bidirectional recurrent encoder (the SU
 * set is unordered) conditioning a unidirectional recurrent decoder via
 * its final state; one power per input position.
 */
export function buildSeq2Seq(nSus: number, featDim: number, units = 32, seed = 17): tf.LayersModel {
  const init = tf.initializers.glorotNormal({ seed })
  const input = tf.input({ shape: [nSus, featDim] })
  const encoded = tf.layers
    .bidirectional({
      layer: tf.layers.lstm({ units, returnSequences: false, kernelInitializer: init }) as tf.RNN,
      mergeMode: 'concat',
    })
    .apply(input) as tf.SymbolicTensor
  const repeated = tf.layers.repeatVector({ n: nSus }).apply(encoded) as tf.SymbolicTensor
  const decoded = tf.layers
    .lstm({ units, returnSequences: true, kernelInitializer: init })
    .apply(repeated) as tf.SymbolicTensor
  const powers = tf.layers
    .timeDistributed({ layer: tf.layers.dense({ units: 1, activation: 'linear', kernelInitializer: init }) })
    .apply(decoded) as tf.SymbolicTensor
  const flat = tf.layers.reshape({ targetShape: [nSus] }).apply(powers) as tf.SymbolicTensor
  return tf.model({ inputs: input, outputs: flat })
}
