/**
 * Feature extraction into HTGF files.
 *
 * The ID table always follows manifest order (minus any samples skipped by
 * --skip-unreadable); extraction is deterministic, so repeated runs produce
 * byte-identical files — the core's acceptance checks depend on that.
 * The adapter never computes metrics; data flows one way into the core.
 */
import { readFileSync } from 'fs'
import { dirname, resolve } from 'path'
import { Checkpoint, forward, LayerOutputs } from './backbone'
import { FormatError } from './errors'
import { HtgfTensor } from './htgf'
import { ManifestEntry } from './manifest'
import { decodePng } from './png'

export type LayerName = 'pool' | 'logits' | 'conv1' | 'conv2'

export interface ExtractOptions {
  checkpoint: Checkpoint
  layer: LayerName
  imageRoot?: string
  skipUnreadable?: boolean
  log?: (message: string) => void
}

export function extractFeatures(
  manifest: ManifestEntry[],
  manifestPath: string,
  options: ExtractOptions,
): HtgfTensor {
  const root = options.imageRoot ?? dirname(manifestPath)
  const log = options.log ?? ((m: string) => process.stderr.write(m + '\n'))
  const ids: string[] = []
  const rows: Float64Array[] = []
  let mapShape: number[] | null = null

  for (const entry of manifest) {
    if (!entry.image_path) {
      throw new FormatError(`sample ${entry.sample_id} has no image_path`)
    }
    const path = resolve(root, entry.image_path)
    let outputs: LayerOutputs
    try {
      outputs = forward(options.checkpoint, decodePng(readFileSync(path)))
    } catch (err) {
      if (options.skipUnreadable) {
        log(`skipping ${entry.sample_id}: ${err}`)
        continue
      }
      throw new FormatError(`sample ${entry.sample_id}: ${err}`)
    }
    ids.push(entry.sample_id)
    if (options.layer === 'pool') {
      rows.push(outputs.pool)
    } else if (options.layer === 'logits') {
      rows.push(outputs.logits)
    } else {
      const maps = options.layer === 'conv1' ? outputs.conv1 : outputs.conv2
      const side = Math.sqrt(maps[0].length)
      mapShape = [maps.length, side, side]
      const flat = new Float64Array(maps.length * maps[0].length)
      maps.forEach((chan, c) => flat.set(chan, c * chan.length))
      rows.push(flat)
    }
  }
  if (rows.length === 0) throw new FormatError('no readable images')

  const rowLen = rows[0].length
  const data = new Float32Array(rows.length * rowLen)
  rows.forEach((row, i) => {
    if (row.length !== rowLen) {
      throw new FormatError('inconsistent feature lengths across images')
    }
    for (let j = 0; j < rowLen; j++) data[i * rowLen + j] = row[j]
  })

  const dims = mapShape ? [rows.length, ...mapShape] : [rows.length, rowLen]
  const tensor: HtgfTensor = { ids, dims, data }
  if (options.layer === 'logits') tensor.probabilityFlag = false
  return tensor
}
