import * as fs from 'fs'
import * as path from 'path'
import * as tf from '@tensorflow/tfjs'
import { beforeAll, describe, expect, it } from 'vitest'

import {
  loadRegression,
  readImage,
  readIndependentGrants,
  readLabels,
  readManifest,
  readMultisuLabels,
  readSuLocations,
  shuffleRegression,
} from '../src/dataset'
import { Fixtures, buildFixtures } from './fixtures'

let fx: Fixtures

beforeAll(async () => {
  await tf.ready()
  fx = buildFixtures()
})

describe('dataset directory readers', () => {
  it('reads the manifest with tensor dims', () => {
    const m = readManifest(fx.train)
    expect(m.count).toBe(120)
    expect(m.tensor).toEqual({ s: 7, h: 16, w: 16 })
  })

  it('rejects unknown format versions', () => {
    const dir = path.join(fx.root, 'badver')
    fs.mkdirSync(dir, { recursive: true })
    fs.writeFileSync(path.join(dir, 'manifest.json'), JSON.stringify({ format_version: 99 }))
    expect(() => readManifest(dir)).toThrow(/format version/)
  })

  it('parses labels including conservative columns', () => {
    const rows = readLabels(fx.fadingTrain)
    expect(rows).toHaveLength(120)
    for (const row of rows) {
      expect(row.optimalDbm).not.toBeNull()
      if (row.conservativeDbm !== null) {
        expect(row.conservativeDbm).toBeLessThanOrEqual(row.optimalDbm! + 1e-9)
      }
    }
  })

  it('decodes image bytes as little-endian float32 in (S,H,W) order', () => {
    const dims = readManifest(fx.train).tensor!
    const img = readImage(fx.train, 0, dims)
    const raw = fs.readFileSync(path.join(fx.train, 'images', 'sample_00000000.bin'))
    expect(raw.length).toBe(dims.s * dims.h * dims.w * 4)
    // spot-check a few positions against manual little-endian decoding
    for (const idx of [0, 1234, dims.s * dims.h * dims.w - 1]) {
      expect(img[idx]).toBe(raw.readFloatLE(idx * 4))
    }
  })

  it('transposes to channels-last consistently', () => {
    const data = loadRegression(fx.train, { limit: 3 })
    const dims = data.dims
    const flat = readImage(fx.train, data.sampleIds[1], dims)
    const tensorValue = data.xs.slice([1, 0, 0, 0], [1, dims.h, dims.w, dims.s]).dataSync()
    // raw index (s, i, j) must equal channels-last index (i, j, s)
    const s = 6
    const i = 7
    const j = 9
    expect(tensorValue[(i * dims.w + j) * dims.s + s]).toBe(flat[(s * dims.h + i) * dims.w + j])
    data.xs.dispose()
    data.ys.dispose()
  })

  it('excludes denied labels from regression tensors', () => {
    const dir = path.join(fx.root, 'denials')
    fs.mkdirSync(path.join(dir, 'images'), { recursive: true })
    const manifest = { ...readManifest(fx.train), count: 2 }
    fs.writeFileSync(path.join(dir, 'manifest.json'), JSON.stringify(manifest))
    fs.writeFileSync(
      path.join(dir, 'labels.csv'),
      'sample_id,optimal_dbm,binding_pu_id,binding_pur_id,conservative_dbm\n0,-12.5,0,0,\n1,,0,1,\n',
    )
    const dims = manifest.tensor!
    for (const sid of [0, 1]) {
      fs.copyFileSync(
        path.join(fx.train, 'images', 'sample_00000000.bin'),
        path.join(dir, 'images', `sample_${String(sid).padStart(8, '0')}.bin`),
      )
    }
    const data = loadRegression(dir)
    expect(data.sampleIds).toEqual([0])
    expect(Array.from(data.ys.dataSync())).toEqual([-12.5])
  })

  it('reads multi-SU labels, independent grants, and SU locations', () => {
    const rows = readMultisuLabels(fx.multisu4)
    expect(rows).toHaveLength(48 * 4)
    const indep = readIndependentGrants(fx.multisu4)
    expect(indep.size).toBe(48 * 4)
    const locs = readSuLocations(fx.multisu4)
    expect(locs.get(0)).toHaveLength(4)
    // a simultaneous grant never beats the stand-alone grant
    for (const row of rows) {
      const p = indep.get(`${row.sampleId}:${row.suId}`)
      if (row.grantedDbm !== null && p !== null && p !== undefined) {
        expect(row.grantedDbm).toBeLessThanOrEqual(p + 0.1)
      }
    }
  })

  it('shuffles deterministically as a permutation', () => {
    const data = loadRegression(fx.train, { limit: 20 })
    const a = shuffleRegression(data, 42)
    const b = shuffleRegression(data, 42)
    expect(a.sampleIds).toEqual(b.sampleIds)
    expect(a.sampleIds.slice().sort((x, y) => x - y)).toEqual(data.sampleIds)
    expect(a.sampleIds).not.toEqual(data.sampleIds)
    // rows stay aligned: y of a permuted row matches the original label
    const ysA = a.ys.dataSync()
    const ysOrig = data.ys.dataSync()
    const firstOrig = data.sampleIds.indexOf(a.sampleIds[0])
    expect(ysA[0]).toBe(ysOrig[firstOrig])
  })
})
