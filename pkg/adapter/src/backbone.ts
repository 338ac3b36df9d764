/**
 * Deterministic convolutional backbones.
 *
 * Two built-in variants share one tiny two-stage architecture whose weights
 * derive from a seeded PRNG, so repeated extraction is bit-stable; a custom
 * checkpoint (JSON weight file) can replace them. The classifier flavor adds
 * a logits head; the perceptual flavor is meant for per-layer map export.
 */
import { readFileSync } from 'fs'
import { FormatError } from './errors'
import { GrayImage, resize } from './png'

export const INPUT_SIZE = 32

export interface Checkpoint {
  name: string
  conv1: number[][][] // [c1][3][3]
  conv2: number[][][][] // [c2][c1][3][3]
  proj: number[][] // [K][2*c2]
}

export interface LayerOutputs {
  /** conv1 after ReLU + 2x average pooling: [c1][16][16] */
  conv1: Float64Array[]
  /** conv2 after ReLU + 2x average pooling: [c2][8][8] */
  conv2: Float64Array[]
  /** channel means and maxima of conv2: length 2*c2 */
  pool: Float64Array
  /** raw classifier scores: length K */
  logits: Float64Array
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0
  return () => {
    a = (a + 0x6d2b79f5) >>> 0
    let t = a
    t = Math.imul(t ^ (t >>> 15), t | 1)
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61)
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296
  }
}

function gaussianish(next: () => number): number {
  // Sum of uniforms: cheap, deterministic, symmetric.
  return next() + next() + next() + next() - 2
}

export function buildCheckpoint(kind: 'classifier' | 'perceptual', seed = 0): Checkpoint {
  const next = mulberry32(seed + (kind === 'classifier' ? 101 : 202))
  const c1 = 8
  const c2 = 16
  const k = 10
  const conv1: number[][][] = []
  for (let f = 0; f < c1; f++) {
    const filt: number[][] = []
    for (let i = 0; i < 3; i++) filt.push([0, 0, 0].map(() => gaussianish(next) * 0.6))
    conv1.push(filt)
  }
  const conv2: number[][][][] = []
  for (let f = 0; f < c2; f++) {
    const perChannel: number[][][] = []
    for (let c = 0; c < c1; c++) {
      const filt: number[][] = []
      for (let i = 0; i < 3; i++) filt.push([0, 0, 0].map(() => gaussianish(next) * 0.25))
      perChannel.push(filt)
    }
    conv2.push(perChannel)
  }
  const proj: number[][] = []
  for (let row = 0; row < k; row++) {
    proj.push(Array.from({ length: 2 * c2 }, () => gaussianish(next)))
  }
  return { name: kind, conv1, conv2, proj }
}

export function loadCheckpoint(path: string): Checkpoint {
  let payload: unknown
  try {
    payload = JSON.parse(readFileSync(path, 'utf-8'))
  } catch (err) {
    throw new FormatError(`${path}: not a JSON checkpoint (${err})`)
  }
  const ckpt = payload as Checkpoint
  if (!Array.isArray(ckpt.conv1) || !Array.isArray(ckpt.conv2) || !Array.isArray(ckpt.proj)) {
    throw new FormatError(`${path}: checkpoint needs conv1, conv2, proj arrays`)
  }
  const c1 = ckpt.conv1.length
  for (const perChannel of ckpt.conv2) {
    if (perChannel.length !== c1) {
      throw new FormatError(`${path}: conv2 expects ${c1} input channels`)
    }
  }
  for (const row of ckpt.proj) {
    if (row.length !== 2 * ckpt.conv2.length) {
      throw new FormatError(`${path}: proj rows must have length ${2 * ckpt.conv2.length}`)
    }
  }
  return { ...ckpt, name: ckpt.name ?? path }
}

function convolveSame(
  input: Float64Array[],
  size: number,
  filters: number[][][][], // [out][in][3][3]
): Float64Array[] {
  const out: Float64Array[] = []
  for (let f = 0; f < filters.length; f++) {
    const acc = new Float64Array(size * size)
    const perChannel = filters[f]
    for (let c = 0; c < perChannel.length; c++) {
      const filt = perChannel[c]
      const chan = input[c]
      for (let y = 0; y < size; y++) {
        for (let x = 0; x < size; x++) {
          let v = 0
          for (let dy = -1; dy <= 1; dy++) {
            const yy = y + dy
            if (yy < 0 || yy >= size) continue
            for (let dx = -1; dx <= 1; dx++) {
              const xx = x + dx
              if (xx < 0 || xx >= size) continue
              v += filt[dy + 1][dx + 1] * chan[yy * size + xx]
            }
          }
          acc[y * size + x] += v
        }
      }
    }
    out.push(acc)
  }
  return out
}

function reluPool2(channels: Float64Array[], size: number): Float64Array[] {
  const half = size / 2
  return channels.map((chan) => {
    const out = new Float64Array(half * half)
    for (let y = 0; y < half; y++) {
      for (let x = 0; x < half; x++) {
        let v = 0
        for (let dy = 0; dy < 2; dy++) {
          for (let dx = 0; dx < 2; dx++) {
            v += Math.max(0, chan[(2 * y + dy) * size + (2 * x + dx)])
          }
        }
        out[y * half + x] = v / 4
      }
    }
    return out
  })
}

export function forward(ckpt: Checkpoint, image: GrayImage): LayerOutputs {
  const gray = resize(image, INPUT_SIZE, INPUT_SIZE)
  const ink = new Float64Array(gray.length)
  for (let i = 0; i < gray.length; i++) ink[i] = 1 - gray[i]

  const conv1Filters = ckpt.conv1.map((filt) => [filt])
  const conv1 = reluPool2(convolveSame([ink], INPUT_SIZE, conv1Filters), INPUT_SIZE)
  const conv2 = reluPool2(convolveSame(conv1, INPUT_SIZE / 2, ckpt.conv2), INPUT_SIZE / 2)

  const c2 = conv2.length
  const pool = new Float64Array(2 * c2)
  for (let c = 0; c < c2; c++) {
    let sum = 0
    let max = -Infinity
    for (const v of conv2[c]) {
      sum += v
      if (v > max) max = v
    }
    pool[c] = sum / conv2[c].length
    pool[c2 + c] = max
  }

  const logits = new Float64Array(ckpt.proj.length)
  for (let row = 0; row < ckpt.proj.length; row++) {
    let v = 0
    for (let j = 0; j < pool.length; j++) v += ckpt.proj[row][j] * pool[j]
    logits[row] = v
  }
  return { conv1, conv2, pool, logits }
}
