/**
 * Minimal PNG decoder for the image kinds the toolkit exchanges:
 * 8/16-bit grayscale (color types 0 and 4) plus RGB/RGBA (2 and 6), which
 * are reduced with the BT.601 luma transform. No palette, no interlacing.
 */
import { inflateSync } from 'zlib'
import { FormatError } from './errors'

export interface GrayImage {
  width: number
  height: number
  /** Row-major intensities scaled to [0, 1]. */
  pixels: Float64Array
  maxIntensity: number
}

const SIGNATURE = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a])

function paeth(a: number, b: number, c: number): number {
  const p = a + b - c
  const pa = Math.abs(p - a)
  const pb = Math.abs(p - b)
  const pc = Math.abs(p - c)
  if (pa <= pb && pa <= pc) return a
  return pb <= pc ? b : c
}

export function decodePng(buf: Buffer): GrayImage {
  if (buf.length < 8 || !buf.subarray(0, 8).equals(SIGNATURE)) {
    throw new FormatError('not a PNG file')
  }
  let off = 8
  let width = 0
  let height = 0
  let bitDepth = 0
  let colorType = 0
  const idat: Buffer[] = []
  while (off + 8 <= buf.length) {
    const length = buf.readUInt32BE(off)
    const kind = buf.toString('ascii', off + 4, off + 8)
    const body = buf.subarray(off + 8, off + 8 + length)
    if (kind === 'IHDR') {
      width = body.readUInt32BE(0)
      height = body.readUInt32BE(4)
      bitDepth = body.readUInt8(8)
      colorType = body.readUInt8(9)
      if (body.readUInt8(12) !== 0) throw new FormatError('interlaced PNG not supported')
    } else if (kind === 'IDAT') {
      idat.push(body)
    } else if (kind === 'IEND') {
      break
    }
    off += 12 + length
  }
  if (!width || !height) throw new FormatError('missing IHDR')
  if (bitDepth !== 8 && bitDepth !== 16) {
    throw new FormatError(`unsupported bit depth ${bitDepth}`)
  }
  const channels = { 0: 1, 2: 3, 4: 2, 6: 4 }[colorType as 0 | 2 | 4 | 6]
  if (channels === undefined) throw new FormatError(`unsupported color type ${colorType}`)

  const raw = inflateSync(Buffer.concat(idat))
  const bpp = channels * (bitDepth / 8)
  const stride = width * bpp
  if (raw.length !== height * (stride + 1)) {
    throw new FormatError(`bad scanline data: ${raw.length} bytes for ${width}x${height}`)
  }

  const out = Buffer.alloc(height * stride)
  for (let y = 0; y < height; y++) {
    const filter = raw[y * (stride + 1)]
    const line = raw.subarray(y * (stride + 1) + 1, (y + 1) * (stride + 1))
    const dst = y * stride
    const prev = dst - stride
    for (let x = 0; x < stride; x++) {
      const left = x >= bpp ? out[dst + x - bpp] : 0
      const up = y > 0 ? out[prev + x] : 0
      const upLeft = y > 0 && x >= bpp ? out[prev + x - bpp] : 0
      let v = line[x]
      switch (filter) {
        case 0:
          break
        case 1:
          v += left
          break
        case 2:
          v += up
          break
        case 3:
          v += Math.floor((left + up) / 2)
          break
        case 4:
          v += paeth(left, up, upLeft)
          break
        default:
          throw new FormatError(`unknown filter type ${filter}`)
      }
      out[dst + x] = v & 0xff
    }
  }

  const maxIntensity = bitDepth === 16 ? 65535 : 255
  const pixels = new Float64Array(width * height)
  const readSample = (byteIndex: number): number =>
    bitDepth === 16 ? out.readUInt16BE(byteIndex) : out[byteIndex]
  const sampleBytes = bitDepth / 8
  for (let i = 0; i < width * height; i++) {
    const base = i * bpp
    let value: number
    if (channels === 1 || channels === 2) {
      value = readSample(base)
    } else {
      const r = readSample(base)
      const g = readSample(base + sampleBytes)
      const b = readSample(base + 2 * sampleBytes)
      value = 0.299 * r + 0.587 * g + 0.114 * b
    }
    pixels[i] = value / maxIntensity
  }
  return { width, height, pixels, maxIntensity }
}

/** Bilinear resize to a fixed grid (used before feature extraction). */
export function resize(img: GrayImage, outW: number, outH: number): Float64Array {
  const out = new Float64Array(outW * outH)
  const sx = img.width / outW
  const sy = img.height / outH
  for (let y = 0; y < outH; y++) {
    const fy = Math.min(Math.max((y + 0.5) * sy - 0.5, 0), img.height - 1)
    const y0 = Math.floor(fy)
    const y1 = Math.min(img.height - 1, y0 + 1)
    const wy = fy - y0
    for (let x = 0; x < outW; x++) {
      const fx = Math.min(Math.max((x + 0.5) * sx - 0.5, 0), img.width - 1)
      const x0 = Math.floor(fx)
      const x1 = Math.min(img.width - 1, x0 + 1)
      const wx = fx - x0
      const top = img.pixels[y0 * img.width + x0] * (1 - wx) + img.pixels[y0 * img.width + x1] * wx
      const bot = img.pixels[y1 * img.width + x0] * (1 - wx) + img.pixels[y1 * img.width + x1] * wx
      out[y * outW + x] = top * (1 - wy) + bot * wy
    }
  }
  return out
}
