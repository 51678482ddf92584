/** Prediction-file writers matching the simulator's CSV contracts. */

import * as fs from 'fs'

export interface PredictionRow {
  sampleId: number
  predictedDbm: number | null
  algo: string
}

export function writePredictions(path: string, rows: PredictionRow[]): void {
  const lines = ['sample_id,predicted_dbm,algo']
  for (const r of rows) {
    const value = r.predictedDbm === null ? '' : String(r.predictedDbm)
    lines.push(`${r.sampleId},${value},${r.algo}`)
  }
  fs.writeFileSync(path, lines.join('\n') + '\n')
}

export interface MultisuPredictionRow {
  sampleId: number
  suId: number
  predictedDbm: number | null
  algo: string
}

export function writeMultisuPredictions(path: string, rows: MultisuPredictionRow[]): void {
  const lines = ['sample_id,su_id,predicted_dbm,algo']
  for (const r of rows) {
    const value = r.predictedDbm === null ? '' : String(r.predictedDbm)
    lines.push(`${r.sampleId},${r.suId},${value},${r.algo}`)
  }
  fs.writeFileSync(path, lines.join('\n') + '\n')
}
