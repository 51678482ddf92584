import * as fs from 'fs'
import * as path from 'path'
import * as tf from '@tensorflow/tfjs'
import { beforeAll, describe, expect, it } from 'vitest'

import { imagesToTensor, readManifest, readSuImage } from '../src/dataset'
import { buildResidualCnn } from '../src/models'
import { writeMultisuPredictions } from '../src/predictions'
import {
  loadMultisu,
  multisuFeatureSequences,
  predictMultisuNn,
  trainMultisuNn,
  trainMultisuRnn,
} from '../src/train'
import { Fixtures, REGION_SIZE, buildFixtures } from './fixtures'

let fx: Fixtures

beforeAll(async () => {
  await tf.ready()
  fx = buildFixtures()
})

function meanAbs(preds: number[][], targets: number[][]): number {
  let s = 0
  let n = 0
  for (let i = 0; i < preds.length; i++) {
    for (let j = 0; j < preds[i].length; j++) {
      s += Math.abs(preds[i][j] - targets[i][j])
      n++
    }
  }
  return s / n
}

describe('concurrent-SU models', () => {
  it('dense network learns simultaneous grants from (independent power, location) lists', async () => {
    const data = loadMultisu(fx.multisu4, REGION_SIZE)
    expect(data.nSus).toBe(4)
    const targets = tf.tidy(() => data.targets.mul(data.norm.std).add(data.norm.mean).arraySync()) as number[][]
    const constMae = meanAbs(targets.map(r => r.map(() => data.norm.mean)), targets)
    const trained = await trainMultisuNn(data, { epochs: 150, batchSize: 16, shuffle: false })
    const preds = predictMultisuNn(trained, data)
    const mae = meanAbs(preds, targets)
    console.log(`multisu nn: mae=${mae.toFixed(3)} vs constant ${constMae.toFixed(3)}`)
    expect(mae).toBeLessThan(constMae * 0.8)
  }, 900_000)

  it('single-SU sequences approximately recover the independent grant', async () => {
    const data = loadMultisu(fx.multisu1, REGION_SIZE)
    expect(data.nSus).toBe(1)
    const trained = await trainMultisuNn(data, { epochs: 200, batchSize: 8, shuffle: false })
    const preds = predictMultisuNn(trained, data)
    let err = 0
    for (let i = 0; i < preds.length; i++) {
      err += Math.abs(preds[i][0] - data.independents[i][0])
    }
    err /= preds.length
    const constMae = meanAbs(
      data.independents.map(r => r.map(() => data.norm.mean)),
      data.independents,
    )
    console.log(`multisu identity: |pred - independent| = ${err.toFixed(3)} dB (constant ${constMae.toFixed(3)})`)
    expect(err).toBeLessThan(constMae)
  }, 900_000)

  it('sequence model trains end-to-end on pooled CNN features of per-SU images', async () => {
    const data = loadMultisu(fx.multisu4, REGION_SIZE)
    const dims = readManifest(fx.multisu4).tensor!
    // feature CNN fitted briefly to the per-SU stand-alone grants
    const images: Float32Array[] = []
    const ys: number[] = []
    for (let i = 0; i < data.sampleIds.length; i++) {
      data.suIds[i].forEach((suId, j) => {
        images.push(readSuImage(fx.multisu4, data.sampleIds[i], suId, dims))
        ys.push((data.independents[i][j] - data.norm.mean) / data.norm.std)
      })
    }
    const xs = imagesToTensor(images, dims)
    const yT = tf.tensor2d(ys.map(v => [v]))
    const cnn = buildResidualCnn(dims.h, dims.w, dims.s, { blocks: 2, filters: 6 })
    cnn.compile({ optimizer: tf.train.adam(3e-3), loss: 'meanSquaredError' })
    await cnn.fit(xs, yT, { epochs: 2, batchSize: 32, shuffle: false, verbose: 0 })

    const sequences = multisuFeatureSequences(fx.multisu4, cnn, data)
    expect(sequences.shape).toEqual([48, 4, 6])

    const losses: number[] = []
    const model = await trainMultisuRnn(sequences, data, { epochs: 1, batchSize: 16, shuffle: false })
    await model.model.fit(sequences, data.targets, {
      epochs: 40,
      batchSize: 16,
      shuffle: false,
      verbose: 0,
      callbacks: { onEpochEnd: async (_, logs) => void losses.push(logs!.loss as number) },
    })
    expect(losses[losses.length - 1]).toBeLessThan(losses[0])

    const preds = tf.tidy(
      () => (model.model.predict(sequences) as tf.Tensor).mul(model.norm.std).add(model.norm.mean).arraySync(),
    ) as number[][]
    for (const row of preds) {
      for (const v of row) {
        expect(Number.isFinite(v)).toBe(true)
      }
    }

    const outPath = path.join(fx.root, 'multisu_predictions.csv')
    writeMultisuPredictions(
      outPath,
      data.sampleIds.flatMap((sampleId, i) =>
        data.suIds[i].map((suId, j) => ({ sampleId, suId, predictedDbm: preds[i][j], algo: 'multisu-rnn' })),
      ),
    )
    const lines = fs.readFileSync(outPath, 'utf8').trim().split('\n')
    expect(lines[0]).toBe('sample_id,su_id,predicted_dbm,algo')
    expect(lines).toHaveLength(1 + 48 * 4)
  }, 900_000)
})
