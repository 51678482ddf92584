/**
 * Readers for specalloc dataset directories.
 *
 * The on-disk contract: manifest.json carries tensor dims {s, h, w};
 * labels.csv holds sample_id, optimal_dbm (empty = denial),
 * binding ids, conservative_dbm; images/sample_%08d.bin are raw
 * float32 little-endian, C row-major, S*H*W with no header. Denied
 * samples are excluded from regression tensors per the manifest flag.
 */

import * as fs from 'fs'
import * as path from 'path'
import * as tf from '@tensorflow/tfjs'

export interface TensorDims {
  s: number
  h: number
  w: number
}

export interface Manifest {
  format_version: number
  count: number
  seed: number
  tensor: TensorDims | null
  [key: string]: unknown
}

export interface LabelRow {
  sampleId: number
  optimalDbm: number | null
  conservativeDbm: number | null
}

export interface MultisuRow {
  sampleId: number
  suId: number
  grantedDbm: number | null
  channel: number | null
}

export interface SuLocation {
  suId: number
  x: number
  y: number
}

export function readManifest(dir: string): Manifest {
  const manifest = JSON.parse(fs.readFileSync(path.join(dir, 'manifest.json'), 'utf8'))
  if (manifest.format_version !== 1) {
    throw new Error(`unsupported dataset format version ${manifest.format_version}`)
  }
  return manifest as Manifest
}

function parseCsv(text: string): string[][] {
  return text
    .split('\n')
    .filter(line => line.length > 0)
    .map(line => line.split(','))
}

function optionalFloat(field: string): number | null {
  return field === '' ? null : Number(field)
}

export function readLabels(dir: string): LabelRow[] {
  const rows = parseCsv(fs.readFileSync(path.join(dir, 'labels.csv'), 'utf8'))
  const header = rows.shift()
  if (!header || header[0] !== 'sample_id' || header[1] !== 'optimal_dbm') {
    throw new Error(`unexpected labels.csv header: ${header}`)
  }
  return rows.map(r => ({
    sampleId: Number(r[0]),
    optimalDbm: optionalFloat(r[1]),
    conservativeDbm: optionalFloat(r[4]),
  }))
}

export function readMultisuLabels(dir: string): MultisuRow[] {
  const rows = parseCsv(fs.readFileSync(path.join(dir, 'multisu_labels.csv'), 'utf8'))
  rows.shift()
  return rows.map(r => ({
    sampleId: Number(r[0]),
    suId: Number(r[1]),
    grantedDbm: optionalFloat(r[2]),
    channel: r[3] === '' ? null : Number(r[3]),
  }))
}

export function readIndependentGrants(dir: string): Map<string, number | null> {
  const rows = parseCsv(fs.readFileSync(path.join(dir, 'multisu_independent.csv'), 'utf8'))
  rows.shift()
  const out = new Map<string, number | null>()
  for (const r of rows) {
    out.set(`${Number(r[0])}:${Number(r[1])}`, optionalFloat(r[2]))
  }
  return out
}

/** SU locations per scenario, pulled from the JSONL world snapshots. */
export function readSuLocations(dir: string): Map<number, SuLocation[]> {
  const lines = fs
    .readFileSync(path.join(dir, 'scenarios.jsonl'), 'utf8')
    .split('\n')
    .filter(l => l.trim().length > 0)
  const out = new Map<number, SuLocation[]>()
  lines.forEach((line, i) => {
    const scenario = JSON.parse(line)
    out.set(
      i,
      scenario.sus.map((su: { id: number; x: number; y: number }) => ({ suId: su.id, x: su.x, y: su.y })),
    )
  })
  return out
}

function readRawImage(file: string, dims: TensorDims): Float32Array {
  const buf = fs.readFileSync(file)
  const expected = dims.s * dims.h * dims.w * 4
  if (buf.length !== expected) {
    throw new Error(`${file}: expected ${expected} bytes, found ${buf.length}`)
  }
  return new Float32Array(buf.buffer, buf.byteOffset, dims.s * dims.h * dims.w)
}

export function readImage(dir: string, sampleId: number, dims: TensorDims): Float32Array {
  const name = `sample_${String(sampleId).padStart(8, '0')}.bin`
  return readRawImage(path.join(dir, 'images', name), dims)
}

export function readSuImage(dir: string, sampleId: number, suId: number, dims: TensorDims): Float32Array {
  const name = `sample_${String(sampleId).padStart(8, '0')}_su_${String(suId).padStart(3, '0')}.bin`
  return readRawImage(path.join(dir, 'images', name), dims)
}

/** Stack raw (S,H,W) images into a channels-last (n,H,W,S) tensor. */
export function imagesToTensor(images: Float32Array[], dims: TensorDims): tf.Tensor4D {
  const n = images.length
  const flat = new Float32Array(n * dims.s * dims.h * dims.w)
  images.forEach((img, i) => flat.set(img, i * img.length))
  return tf.tidy(() =>
    tf.tensor4d(flat, [n, dims.s, dims.h, dims.w]).transpose([0, 2, 3, 1]),
  ) as tf.Tensor4D
}

export interface RegressionData {
  xs: tf.Tensor4D
  ys: tf.Tensor2D
  sampleIds: number[]
  dims: TensorDims
}

export interface LoadOptions {
  useConservative?: boolean
  limit?: number
}

/**
 * Labeled image tensors for single-SU regression. Denied samples (and,
 * with useConservative, samples whose conservative label degraded to a
 * denial) are excluded.
 */
export function loadRegression(dir: string, opts: LoadOptions = {}): RegressionData {
  const manifest = readManifest(dir)
  if (!manifest.tensor) {
    throw new Error(`dataset ${dir} has no image tensors`)
  }
  const dims = manifest.tensor
  const labels = readLabels(dir)
  const usable: Array<{ id: number; y: number }> = []
  for (const row of labels) {
    const y = opts.useConservative ? row.conservativeDbm : row.optimalDbm
    if (y !== null) {
      usable.push({ id: row.sampleId, y })
    }
    if (opts.limit && usable.length >= opts.limit) break
  }
  const images = usable.map(u => readImage(dir, u.id, dims))
  const xs = imagesToTensor(images, dims)
  const ys = tf.tensor2d(usable.map(u => [u.y]))
  return { xs, ys, sampleIds: usable.map(u => u.id), dims }
}

/** Seeded Fisher-Yates permutation of a regression set, for reproducible
 * training runs with fit(shuffle: false). */
export function shuffleRegression(data: RegressionData, seed: number): RegressionData {
  let state = seed >>> 0
  const rand = () => {
    // mulberry32
    state = (state + 0x6d2b79f5) >>> 0
    let t = state
    t = Math.imul(t ^ (t >>> 15), t | 1)
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61)
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296
  }
  const n = data.sampleIds.length
  const perm = Array.from({ length: n }, (_, i) => i)
  for (let i = n - 1; i > 0; i--) {
    const j = Math.floor(rand() * (i + 1))
    ;[perm[i], perm[j]] = [perm[j], perm[i]]
  }
  const idx = tf.tensor1d(perm, 'int32')
  const xs = tf.gather(data.xs, idx) as tf.Tensor4D
  const ys = tf.gather(data.ys, idx) as tf.Tensor2D
  idx.dispose()
  return { xs, ys, sampleIds: perm.map(i => data.sampleIds[i]), dims: data.dims }
}

/** Mean/std label normalization, stored so predictions can be mapped back. */
export interface LabelNorm {
  mean: number
  std: number
}

export function fitNorm(ys: tf.Tensor2D): LabelNorm {
  const { mean, variance } = tf.moments(ys)
  const norm = { mean: mean.dataSync()[0], std: Math.sqrt(variance.dataSync()[0]) || 1 }
  mean.dispose()
  variance.dispose()
  return norm
}

export function normalize(ys: tf.Tensor2D, norm: LabelNorm): tf.Tensor2D {
  return tf.tidy(() => ys.sub(norm.mean).div(norm.std)) as tf.Tensor2D
}

export function denormalize(ys: tf.Tensor, norm: LabelNorm): tf.Tensor {
  return tf.tidy(() => ys.mul(norm.std).add(norm.mean))
}
