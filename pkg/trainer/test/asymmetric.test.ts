import * as tf from '@tensorflow/tfjs'
import { beforeAll, describe, expect, it } from 'vitest'

import { loadRegression, readLabels, shuffleRegression } from '../src/dataset'
import { predictRows, scorePredictions, trainShallow } from '../src/train'
import { Fixtures, MICRO_SHALLOW, buildFixtures } from './fixtures'

let fx: Fixtures

beforeAll(async () => {
  await tf.ready()
  fx = buildFixtures()
})

describe('asymmetric-loss sweep', () => {
  it('drives the false-positive mass down as the over-allocation weight grows', async () => {
    const train = shuffleRegression(loadRegression(fx.train), 77)
    const evalData = loadRegression(fx.evalSet)
    const labels = new Map(readLabels(fx.evalSet).map(r => [r.sampleId, r.optimalDbm]))
    const aFp: number[] = []
    for (const ratio of [1, 10, 100]) {
      const trained = await trainShallow(train, {
        epochs: 10,
        batchSize: 16,
        learningRate: 3e-3,
        alphaFp: ratio,
        alphaFn: 1,
        shuffle: false,
        ...MICRO_SHALLOW,
      })
      const rep = scorePredictions(predictRows(trained, evalData, `cnn-fp${ratio}`), labels)
      console.log(`alpha ratio ${ratio}: a_err=${rep.aErrDb.toFixed(3)} a_fp=${rep.aFpDb.toFixed(4)} fp_rate=${rep.fpRate.toFixed(3)}`)
      aFp.push(rep.aFpDb)
      trained.model.dispose()
    }
    expect(aFp[1]).toBeLessThanOrEqual(aFp[0] + 0.02)
    expect(aFp[2]).toBeLessThanOrEqual(aFp[1] + 0.02)
    expect(aFp[2]).toBeLessThan(aFp[0]) // the sweep's whole point
  }, 900_000)
})
