/**
 * Training loops: the shallow regression CNN with the asymmetric loss,
 * residual pre-training plus fine-tuning, and the two concurrent-SU
 * models (dense and sequence-to-sequence).
 */

import * as tf from '@tensorflow/tfjs'

import {
  LabelNorm,
  RegressionData,
  TensorDims,
  denormalize,
  fitNorm,
  imagesToTensor,
  normalize,
  readIndependentGrants,
  readManifest,
  readMultisuLabels,
  readSuImage,
  readSuLocations,
} from './dataset'
import { asymmetricSquaredError } from './loss'
import { AVG_POOL_LAYER, buildMultisuNn, buildResidualCnn, buildSeq2Seq, buildShallowCnn, featureExtractor } from './models'
import { PredictionRow } from './predictions'

export interface TrainOptions {
  epochs?: number
  batchSize?: number
  learningRate?: number
  alphaFp?: number
  alphaFn?: number
  validationSplit?: number
  verbose?: boolean
  convChannels?: number[] // override the 5 conv widths (pure-JS backend is slow)
  denseUnits?: number[]
  shuffle?: boolean // disable (with pre-shuffled data) for reproducible runs
}

export interface TrainedRegressor {
  model: tf.LayersModel
  norm: LabelNorm
}

const DENIAL_FLOOR_DBM = -100

function compileRegression(model: tf.LayersModel, opts: TrainOptions, norm: LabelNorm): void {
  // loss weights act on normalized labels; the FP/FN split is invariant
  // to the affine map, so the asymmetry carries over unchanged
  const loss = asymmetricSquaredError(opts.alphaFp ?? 1, opts.alphaFn ?? 1)
  model.compile({ optimizer: tf.train.adam(opts.learningRate ?? 1e-3), loss })
}

export async function trainShallow(data: RegressionData, opts: TrainOptions = {}): Promise<TrainedRegressor> {
  const { h, w, s } = { h: data.dims.h, w: data.dims.w, s: data.dims.s }
  const model = buildShallowCnn(h, w, s, { convChannels: opts.convChannels, denseUnits: opts.denseUnits })
  const norm = fitNorm(data.ys)
  compileRegression(model, opts, norm)
  const ysNorm = normalize(data.ys, norm)
  await model.fit(data.xs, ysNorm, {
    epochs: opts.epochs ?? 20,
    batchSize: opts.batchSize ?? 32,
    validationSplit: opts.validationSplit ?? 0,
    shuffle: opts.shuffle ?? true,
    verbose: opts.verbose ? 1 : 0,
  })
  ysNorm.dispose()
  return { model, norm }
}

export interface PretrainOptions extends TrainOptions {
  blocks?: number
  filters?: number
  pretrainEpochs?: number
  finetuneEpochs?: number
  pretrainLearningRate?: number
  finetuneLearningRate?: number
  momentum?: number
  weightDecay?: number
}

/**
 * Pre-train a residual model on auto-generated samples (momentum SGD,
 * learning rate divided by 10 every 10 epochs, weight decay through L2
 * regularizers), then fine-tune on field samples with a low-rate
 * adaptive-moment optimizer. Zero fine-tune epochs returns the
 * pre-trained model untouched.
 */
export async function pretrainFinetune(
  pretrainData: RegressionData,
  fieldData: RegressionData | null,
  opts: PretrainOptions = {},
): Promise<TrainedRegressor> {
  const dims = pretrainData.dims
  const model = buildResidualCnn(dims.h, dims.w, dims.s, {
    blocks: opts.blocks ?? 8,
    filters: opts.filters,
    weightDecay: opts.weightDecay ?? 1e-5,
  })
  const norm = fitNorm(pretrainData.ys)
  const loss = asymmetricSquaredError(opts.alphaFp ?? 1, opts.alphaFn ?? 1)
  const baseLr = opts.pretrainLearningRate ?? 0.01
  const optimizer = tf.train.momentum(baseLr, opts.momentum ?? 0.9)
  model.compile({ optimizer, loss })
  const ysNorm = normalize(pretrainData.ys, norm)
  await model.fit(pretrainData.xs, ysNorm, {
    epochs: opts.pretrainEpochs ?? 10,
    batchSize: opts.batchSize ?? 64,
    shuffle: opts.shuffle ?? true,
    verbose: opts.verbose ? 1 : 0,
    callbacks: {
      onEpochBegin: async epoch => {
        ;(optimizer as unknown as { learningRate: number }).learningRate = baseLr / 10 ** Math.floor(epoch / 10)
      },
    },
  })
  ysNorm.dispose()

  const finetuneEpochs = opts.finetuneEpochs ?? 10
  if (fieldData && finetuneEpochs > 0) {
    model.compile({ optimizer: tf.train.adam(opts.finetuneLearningRate ?? 1e-5), loss })
    const fieldNorm = normalize(fieldData.ys, norm)
    await model.fit(fieldData.xs, fieldNorm, {
      epochs: finetuneEpochs,
      batchSize: opts.batchSize ?? 32,
      shuffle: opts.shuffle ?? true,
      verbose: opts.verbose ? 1 : 0,
    })
    fieldNorm.dispose()
  }
  return { model, norm }
}

export function predictRows(trained: TrainedRegressor, data: RegressionData, algo: string): PredictionRow[] {
  const preds = tf.tidy(() => {
    const raw = trained.model.predict(data.xs) as tf.Tensor
    return denormalize(raw, trained.norm).dataSync()
  })
  return data.sampleIds.map((sampleId, i) => ({ sampleId, predictedDbm: preds[i], algo }))
}

/** Constant predictor at the mean training label: the floor any learned model must beat. */
export function meanPredictorRows(trainYs: tf.Tensor2D, data: RegressionData, algo = 'mean'): PredictionRow[] {
  const mean = tf.tidy(() => trainYs.mean().dataSync()[0])
  return data.sampleIds.map(sampleId => ({ sampleId, predictedDbm: mean, algo }))
}

export interface ErrorReport {
  aErrDb: number
  aFpDb: number
  fpRate: number
  n: number
}

/** Same conventions as the simulator's scorer: denial maps to the floor. */
export function scorePredictions(rows: PredictionRow[], labels: Map<number, number | null>): ErrorReport {
  let absErr = 0
  let fpExcess = 0
  let nFp = 0
  for (const row of rows) {
    if (!labels.has(row.sampleId)) {
      throw new Error(`prediction for unknown sample ${row.sampleId}`)
    }
    const y = labels.get(row.sampleId) ?? DENIAL_FLOOR_DBM
    const yHat = row.predictedDbm ?? DENIAL_FLOOR_DBM
    absErr += Math.abs(yHat - y)
    if (yHat > y) {
      nFp += 1
      fpExcess += yHat - y
    }
  }
  const n = rows.length
  return { aErrDb: absErr / n, aFpDb: fpExcess / n, fpRate: nFp / n, n }
}

// ---- concurrent SUs ---------------------------------------------------------

export interface MultisuData {
  nSus: number
  sampleIds: number[]
  suIds: number[][]
  features: tf.Tensor2D // (n, nSus*3): [p_i, x, y] normalized
  targets: tf.Tensor2D // (n, nSus) normalized grants
  norm: LabelNorm
  regionSize: number
  independents: number[][] // raw dBm, floor for denials
}

/**
 * Assemble (independent power, location) -> simultaneous-grant training
 * pairs from a multi-SU dataset directory. Every scenario must carry the
 * same SU count.
 */
export function loadMultisu(dir: string, regionSize = 1000): MultisuData {
  const labels = readMultisuLabels(dir)
  const independents = readIndependentGrants(dir)
  const locations = readSuLocations(dir)
  const bySample = new Map<number, { suId: number; granted: number }[]>()
  for (const row of labels) {
    const list = bySample.get(row.sampleId) ?? []
    list.push({ suId: row.suId, granted: row.grantedDbm ?? DENIAL_FLOOR_DBM })
    bySample.set(row.sampleId, list)
  }
  const sampleIds = Array.from(bySample.keys()).sort((a, b) => a - b)
  const nSus = bySample.get(sampleIds[0])!.length
  const feats: number[][] = []
  const targets: number[][] = []
  const suIds: number[][] = []
  const independentRaw: number[][] = []
  for (const sid of sampleIds) {
    const rows = bySample.get(sid)!.sort((a, b) => a.suId - b.suId)
    if (rows.length !== nSus) {
      throw new Error(`sample ${sid} has ${rows.length} SUs, expected ${nSus}`)
    }
    const locs = new Map(locations.get(sid)!.map(l => [l.suId, l]))
    const f: number[] = []
    const indep: number[] = []
    for (const r of rows) {
      const p = independents.get(`${sid}:${r.suId}`) ?? DENIAL_FLOOR_DBM
      const loc = locs.get(r.suId)!
      indep.push(p ?? DENIAL_FLOOR_DBM)
      f.push(p ?? DENIAL_FLOOR_DBM, loc.x / regionSize, loc.y / regionSize)
    }
    feats.push(f)
    targets.push(rows.map(r => r.granted))
    suIds.push(rows.map(r => r.suId))
    independentRaw.push(indep)
  }
  const targetTensor = tf.tensor2d(targets)
  const norm = fitNorm(targetTensor as tf.Tensor2D)
  const normalized = tf.tidy(() => targetTensor.sub(norm.mean).div(norm.std)) as tf.Tensor2D
  targetTensor.dispose()
  // normalize the power column of the features with the same affine map
  const featTensor = tf.tensor2d(feats)
  const featNorm = tf.tidy(() => {
    const arr = featTensor.arraySync() as number[][]
    for (const row of arr) {
      for (let i = 0; i < row.length; i += 3) {
        row[i] = (row[i] - norm.mean) / norm.std
      }
    }
    return tf.tensor2d(arr)
  }) as tf.Tensor2D
  featTensor.dispose()
  return { nSus, sampleIds, suIds, features: featNorm, targets: normalized, norm, regionSize, independents: independentRaw }
}

export interface TrainedMultisu {
  model: tf.LayersModel
  norm: LabelNorm
  nSus: number
}

export async function trainMultisuNn(data: MultisuData, opts: TrainOptions = {}): Promise<TrainedMultisu> {
  const model = buildMultisuNn(data.nSus)
  model.compile({ optimizer: tf.train.adam(opts.learningRate ?? 1e-3), loss: 'meanSquaredError' })
  await model.fit(data.features, data.targets, {
    epochs: opts.epochs ?? 40,
    batchSize: opts.batchSize ?? 16,
    shuffle: opts.shuffle ?? true,
    verbose: opts.verbose ? 1 : 0,
  })
  return { model, norm: data.norm, nSus: data.nSus }
}

export function predictMultisuNn(trained: TrainedMultisu, data: MultisuData): number[][] {
  return tf.tidy(() => {
    const raw = trained.model.predict(data.features) as tf.Tensor
    return denormalize(raw, trained.norm).arraySync() as number[][]
  })
}

/**
 * Per-SU feature sequences from the average-pooling output of a trained
 * convolutional model applied to the per-SU image tensors.
 */
export function multisuFeatureSequences(dir: string, cnn: tf.LayersModel, data: MultisuData): tf.Tensor3D {
  const manifest = readManifest(dir)
  const dims = manifest.tensor as TensorDims
  const extractor = cnn.getLayer(AVG_POOL_LAYER) ? featureExtractor(cnn) : cnn
  const sequences: tf.Tensor[] = []
  for (let i = 0; i < data.sampleIds.length; i++) {
    const images = data.suIds[i].map(suId => readSuImage(dir, data.sampleIds[i], suId, dims))
    const xs = imagesToTensor(images, dims)
    const feats = extractor.predict(xs) as tf.Tensor
    sequences.push(feats)
    xs.dispose()
  }
  const out = tf.stack(sequences) as tf.Tensor3D
  sequences.forEach(t => t.dispose())
  return out
}

export async function trainMultisuRnn(
  sequences: tf.Tensor3D,
  data: MultisuData,
  opts: TrainOptions = {},
): Promise<TrainedMultisu> {
  const [, nSus, featDim] = sequences.shape
  const model = buildSeq2Seq(nSus, featDim)
  model.compile({ optimizer: tf.train.adam(opts.learningRate ?? 1e-3), loss: 'meanSquaredError' })
  await model.fit(sequences, data.targets, {
    epochs: opts.epochs ?? 40,
    batchSize: opts.batchSize ?? 16,
    shuffle: opts.shuffle ?? true,
    verbose: opts.verbose ? 1 : 0,
  })
  return { model, norm: data.norm, nSus }
}
