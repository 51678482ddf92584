/**
 * Trainer commands. All of them read specalloc dataset directories and
 * write prediction CSVs the simulator's `eval` subcommand can score.
 *
 *   train-shallow      --dataset D --eval-dataset E --out predictions.csv
 *                      [--epochs N --batch N --lr F --alpha-fp F --alpha-fn F
 *                       --conservative --limit N --save-model DIR --algo NAME]
 *   pretrain-finetune  --pretrain P --field F --eval-dataset E --out predictions.csv
 *                      [--blocks N --pretrain-epochs N --finetune-epochs N
 *                       --finetune-lr F --save-model DIR --algo NAME]
 *   train-multisu      --dataset D --arch nn|rnn --out multisu_predictions.csv
 *                      [--epochs N --cnn-model DIR]
 *   sweep-sizes        --dataset D --eval-dataset E --sizes 256,512,1024,2048
 *                      --out sweep.csv [--epochs N]
 */

import * as fs from 'fs'
import * as tf from '@tensorflow/tfjs'

import { loadRegression, readLabels } from './dataset'
import { loadModel, saveModel } from './io'
import { writeMultisuPredictions, writePredictions } from './predictions'
import {
  loadMultisu,
  multisuFeatureSequences,
  predictMultisuNn,
  predictRows,
  pretrainFinetune,
  scorePredictions,
  trainMultisuNn,
  trainMultisuRnn,
  trainShallow,
} from './train'

type Flags = Record<string, string | boolean>

function parseFlags(argv: string[]): Flags {
  const flags: Flags = {}
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i]
    if (!arg.startsWith('--')) throw new Error(`unexpected argument ${arg}`)
    const key = arg.slice(2)
    if (i + 1 < argv.length && !argv[i + 1].startsWith('--')) {
      flags[key] = argv[++i]
    } else {
      flags[key] = true
    }
  }
  return flags
}

function str(flags: Flags, key: string, required = true): string {
  const v = flags[key]
  if (typeof v !== 'string') {
    if (required) throw new Error(`missing --${key}`)
    return ''
  }
  return v
}

function num(flags: Flags, key: string, fallback: number): number {
  const v = flags[key]
  return typeof v === 'string' ? Number(v) : fallback
}

function labelMap(dir: string, conservative = false): Map<number, number | null> {
  const out = new Map<number, number | null>()
  for (const row of readLabels(dir)) {
    out.set(row.sampleId, conservative ? row.conservativeDbm : row.optimalDbm)
  }
  return out
}

function channels(flags: Flags): number[] | undefined {
  const raw = str(flags, 'conv-channels', false)
  return raw ? raw.split(',').map(Number) : undefined
}

async function cmdTrainShallow(flags: Flags): Promise<void> {
  const train = loadRegression(str(flags, 'dataset'), {
    useConservative: Boolean(flags['conservative']),
    limit: num(flags, 'limit', 0) || undefined,
  })
  const trained = await trainShallow(train, {
    epochs: num(flags, 'epochs', 20),
    batchSize: num(flags, 'batch', 32),
    learningRate: num(flags, 'lr', 1e-3),
    alphaFp: num(flags, 'alpha-fp', 1),
    alphaFn: num(flags, 'alpha-fn', 1),
    convChannels: channels(flags),
    verbose: Boolean(flags['verbose']),
  })
  const evalDir = str(flags, 'eval-dataset')
  const evalData = loadRegression(evalDir)
  const rows = predictRows(trained, evalData, str(flags, 'algo', false) || 'shallow-cnn')
  writePredictions(str(flags, 'out'), rows)
  const report = scorePredictions(rows, labelMap(evalDir))
  console.log(`a_err=${report.aErrDb.toFixed(4)} dB a_fp=${report.aFpDb.toFixed(4)} dB fp_rate=${report.fpRate.toFixed(4)} n=${report.n}`)
  const saveDir = str(flags, 'save-model', false)
  if (saveDir) {
    await saveModel(trained.model, saveDir, { kind: 'shallow', norm: trained.norm, flags })
  }
}

async function cmdPretrainFinetune(flags: Flags): Promise<void> {
  const pre = loadRegression(str(flags, 'pretrain'))
  const field = loadRegression(str(flags, 'field'))
  const trained = await pretrainFinetune(pre, field, {
    blocks: num(flags, 'blocks', 8),
    filters: num(flags, 'filters', 32),
    pretrainEpochs: num(flags, 'pretrain-epochs', 10),
    finetuneEpochs: num(flags, 'finetune-epochs', 10),
    finetuneLearningRate: num(flags, 'finetune-lr', 1e-5),
    batchSize: num(flags, 'batch', 32),
    verbose: Boolean(flags['verbose']),
  })
  const evalDir = str(flags, 'eval-dataset')
  const evalData = loadRegression(evalDir)
  const rows = predictRows(trained, evalData, str(flags, 'algo', false) || 'pretrained-cnn')
  writePredictions(str(flags, 'out'), rows)
  const report = scorePredictions(rows, labelMap(evalDir))
  console.log(`a_err=${report.aErrDb.toFixed(4)} dB a_fp=${report.aFpDb.toFixed(4)} dB fp_rate=${report.fpRate.toFixed(4)} n=${report.n}`)
  const saveDir = str(flags, 'save-model', false)
  if (saveDir) {
    await saveModel(trained.model, saveDir, { kind: 'residual', norm: trained.norm, flags })
  }
}

async function cmdTrainMultisu(flags: Flags): Promise<void> {
  const dir = str(flags, 'dataset')
  const arch = str(flags, 'arch')
  const data = loadMultisu(dir)
  const opts = { epochs: num(flags, 'epochs', 40), verbose: Boolean(flags['verbose']) }
  let predictions: number[][]
  if (arch === 'nn') {
    const trained = await trainMultisuNn(data, opts)
    predictions = predictMultisuNn(trained, data)
  } else if (arch === 'rnn') {
    const cnnDir = str(flags, 'cnn-model')
    const { model } = await loadModel(cnnDir)
    const sequences = multisuFeatureSequences(dir, model, data)
    const trained = await trainMultisuRnn(sequences, data, opts)
    predictions = tf.tidy(() => {
      const raw = trained.model.predict(sequences) as tf.Tensor
      return raw.mul(trained.norm.std).add(trained.norm.mean).arraySync() as number[][]
    })
    sequences.dispose()
  } else {
    throw new Error(`unknown --arch ${arch}`)
  }
  const rows = data.sampleIds.flatMap((sampleId, i) =>
    data.suIds[i].map((suId, j) => ({
      sampleId,
      suId,
      predictedDbm: predictions[i][j],
      algo: `multisu-${arch}`,
    })),
  )
  writeMultisuPredictions(str(flags, 'out'), rows)
  console.log(`wrote ${rows.length} per-SU predictions`)
}

async function cmdSweepSizes(flags: Flags): Promise<void> {
  const dir = str(flags, 'dataset')
  const evalDir = str(flags, 'eval-dataset')
  const sizes = str(flags, 'sizes')
    .split(',')
    .map(s => Number(s.trim()))
  const evalData = loadRegression(evalDir)
  const labels = labelMap(evalDir)
  const lines = ['train_size,a_err_db,a_fp_db,fp_rate']
  for (const size of sizes) {
    const train = loadRegression(dir, { limit: size })
    const trained = await trainShallow(train, {
      epochs: num(flags, 'epochs', 20),
      batchSize: num(flags, 'batch', 32),
      verbose: Boolean(flags['verbose']),
    })
    const report = scorePredictions(predictRows(trained, evalData, 'shallow-cnn'), labels)
    lines.push(`${size},${report.aErrDb},${report.aFpDb},${report.fpRate}`)
    console.log(`size=${size}: a_err=${report.aErrDb.toFixed(4)} dB`)
    trained.model.dispose()
    train.xs.dispose()
    train.ys.dispose()
  }
  fs.writeFileSync(str(flags, 'out'), lines.join('\n') + '\n')
}

const COMMANDS: Record<string, (flags: Flags) => Promise<void>> = {
  'train-shallow': cmdTrainShallow,
  'pretrain-finetune': cmdPretrainFinetune,
  'train-multisu': cmdTrainMultisu,
  'sweep-sizes': cmdSweepSizes,
}

export async function main(argv: string[]): Promise<number> {
  const [command, ...rest] = argv
  const handler = command ? COMMANDS[command] : undefined
  if (!handler) {
    console.error(`usage: trainer <${Object.keys(COMMANDS).join('|')}> [--flags]`)
    return 1
  }
  await tf.ready()
  try {
    await handler(parseFlags(rest))
    return 0
  } catch (err) {
    console.error(`trainer: ${err instanceof Error ? err.message : err}`)
    return 2
  }
}

if (require.main === module) {
  main(process.argv.slice(2)).then(code => {
    process.exitCode = code
  })
}
