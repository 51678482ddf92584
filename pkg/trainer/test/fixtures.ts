/**
 * Shared micro datasets generated through the simulator CLI: the trainer
 * consumes the primary component only through its dataset directories,
 * so the fixtures are built by shelling out to `specalloc`.
 *
 * The worlds are deliberately tiny (single PU, 500 m region, 16 px
 * sheets) because the pure-JS backend trains convolutions slowly; they
 * keep the label-vs-image relationship learnable at double-digit sample
 * counts.
 */

import { execFileSync } from 'child_process'
import * as fs from 'fs'
import * as os from 'os'
import * as path from 'path'

const MICRO_TOML = `
[region]
width_m = 500.0
height_m = 500.0
grid_cell_m = 10.0

[propagation]
shadowing_sigma_db = 0.0

[oracle]
beta_db = 3.0
noise_dbm = -120.0
max_su_power_dbm = 60.0

[sampler]
n_pus = [1, 1]
pu_power_dbm = [-4.0, 0.0]
purs_per_pu = [2, 3]
pur_radius_m = 25.0
n_sensors = 4
snr_margin_db = 6.0

[sheets]
image_px = 16
r_min_px = 1
r_max_px = 3
`

const FADING_TOML =
  MICRO_TOML.replace(
    'shadowing_sigma_db = 0.0',
    'shadowing_sigma_db = 0.0\nfading_amplitude_db = 6.0',
  ) + `
[conservative]
neighborhood_radius_m = 5.0
n_probes = 16
`

export interface Fixtures {
  root: string
  microConfig: string
  train: string // 120 labeled+encoded samples
  trainAugmented: string // + rotations 90/180/270 (480)
  evalSet: string // 48 held-out samples
  field: string // 64 samples, distinct seed
  fadingTrain: string // fading world, conservative labels
  fadingEval: string
  multisu4: string // 48 scenarios x 4 SUs with per-SU images
  multisu1: string // 40 scenarios x 1 SU
}

function run(args: string[]): void {
  execFileSync('specalloc', args, { stdio: 'pipe' })
}

export function specalloc(args: string[]): string {
  return execFileSync('specalloc', args, { stdio: 'pipe' }).toString()
}

export function buildFixtures(): Fixtures {
  const root = path.join(os.tmpdir(), 'specalloc-trainer-fixtures-v1')
  const micro = path.join(root, 'micro.toml')
  const fading = path.join(root, 'fading.toml')
  const fx: Fixtures = {
    root,
    microConfig: micro,
    train: path.join(root, 'train'),
    trainAugmented: path.join(root, 'train_aug'),
    evalSet: path.join(root, 'eval'),
    field: path.join(root, 'field'),
    fadingTrain: path.join(root, 'fading_train'),
    fadingEval: path.join(root, 'fading_eval'),
    multisu4: path.join(root, 'multisu4'),
    multisu1: path.join(root, 'multisu1'),
  }
  if (fs.existsSync(path.join(root, '.complete'))) {
    return fx
  }
  fs.rmSync(root, { recursive: true, force: true })
  fs.mkdirSync(root, { recursive: true })
  fs.writeFileSync(micro, MICRO_TOML)
  fs.writeFileSync(fading, FADING_TOML)

  run(['pretrain-gen', '--config', micro, '--seed', '101', '--count', '120', '--jobs', '2', '--out', fx.train])
  run(['augment', '--config', micro, '--dataset', fx.train, '--out', fx.trainAugmented, '--rotations', '90,180,270'])
  run(['pretrain-gen', '--config', micro, '--seed', '202', '--count', '48', '--jobs', '2', '--out', fx.evalSet])
  run(['pretrain-gen', '--config', micro, '--seed', '303', '--count', '64', '--jobs', '2', '--out', fx.field])

  run(['gen', '--config', fading, '--seed', '404', '--count', '120', '--jobs', '2', '--out', fx.fadingTrain])
  run(['label', '--config', fading, '--seed', '404', '--dataset', fx.fadingTrain, '--conservative'])
  run(['encode', '--config', fading, '--dataset', fx.fadingTrain])
  run(['pretrain-gen', '--config', fading, '--seed', '505', '--count', '48', '--jobs', '2', '--out', fx.fadingEval])

  run(['multisu', '--config', micro, '--seed', '606', '--algo', 'binary', '--n-sus', '4', '--count', '48', '--per-su-images', '--out', fx.multisu4])
  run(['multisu', '--config', micro, '--seed', '707', '--algo', 'binary', '--n-sus', '1', '--count', '40', '--per-su-images', '--out', fx.multisu1])

  fs.writeFileSync(path.join(root, '.complete'), 'ok\n')
  return fx
}

export const REGION_SIZE = 500

/** Small-but-learnable shallow architecture for the slow JS backend. */
export const MICRO_SHALLOW = { convChannels: [4, 6, 8, 8, 8], denseUnits: [16, 8] }
