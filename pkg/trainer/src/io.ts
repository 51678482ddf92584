/**
 * Filesystem checkpoints for the pure-JS runtime (no file:// handlers
 * there): model.json + weights.bin + config.json with the run settings
 * embedded.
 */

import * as fs from 'fs'
import * as path from 'path'
import * as tf from '@tensorflow/tfjs'

export async function saveModel(model: tf.LayersModel, dir: string, config: Record<string, unknown>): Promise<void> {
  fs.mkdirSync(dir, { recursive: true })
  await model.save(
    tf.io.withSaveHandler(async artifacts => {
      const weightData = artifacts.weightData as ArrayBuffer
      fs.writeFileSync(path.join(dir, 'weights.bin'), Buffer.from(weightData))
      fs.writeFileSync(
        path.join(dir, 'model.json'),
        JSON.stringify({
          modelTopology: artifacts.modelTopology,
          weightSpecs: artifacts.weightSpecs,
        }),
      )
      return { modelArtifactsInfo: { dateSaved: new Date(), modelTopologyType: 'JSON' } }
    }),
  )
  fs.writeFileSync(path.join(dir, 'config.json'), JSON.stringify(config, null, 1) + '\n')
}

export async function loadModel(dir: string): Promise<{ model: tf.LayersModel; config: Record<string, unknown> }> {
  const meta = JSON.parse(fs.readFileSync(path.join(dir, 'model.json'), 'utf8'))
  const weights = fs.readFileSync(path.join(dir, 'weights.bin'))
  const model = await tf.loadLayersModel(
    tf.io.fromMemory({
      modelTopology: meta.modelTopology,
      weightSpecs: meta.weightSpecs,
      weightData: weights.buffer.slice(weights.byteOffset, weights.byteOffset + weights.byteLength),
    }),
  )
  const config = JSON.parse(fs.readFileSync(path.join(dir, 'config.json'), 'utf8'))
  return { model, config }
}
