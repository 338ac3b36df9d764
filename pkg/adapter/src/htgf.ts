/**
 * HTGF v1 tensor container (little-endian):
 *   magic "HTGF" | u32 version=1 | u32 rank | rank*u32 dims (dims[0]=N)
 *   | u32 id-table byte length | N newline-separated UTF-8 ids
 *   | float32 row-major payload | (logit files) u8 probability flag
 */
import { readFileSync, writeFileSync } from 'fs'
import { FormatError } from './errors'

const MAGIC = 'HTGF'
const VERSION = 1

export interface HtgfTensor {
  ids: string[]
  dims: number[]
  data: Float32Array
  probabilityFlag?: boolean
}

export function encodeHtgf(tensor: HtgfTensor): Buffer {
  const { ids, dims, data, probabilityFlag } = tensor
  const count = dims.reduce((a, b) => a * b, 1)
  if (dims.length < 1 || dims[0] !== ids.length) {
    throw new FormatError(`leading dim ${dims[0]} does not match ${ids.length} ids`)
  }
  if (count !== data.length) {
    throw new FormatError(`dims ${dims} imply ${count} values, payload has ${data.length}`)
  }
  for (const v of data) {
    if (!Number.isFinite(v)) throw new FormatError('payload contains NaN or Inf')
  }
  const idBlob = Buffer.from(ids.join('\n'), 'utf-8')
  const headerLen = 4 + 4 + 4 + 4 * dims.length + 4
  const total = headerLen + idBlob.length + 4 * count + (probabilityFlag === undefined ? 0 : 1)
  const buf = Buffer.alloc(total)
  let off = 0
  buf.write(MAGIC, off, 'ascii')
  off += 4
  off = buf.writeUInt32LE(VERSION, off)
  off = buf.writeUInt32LE(dims.length, off)
  for (const d of dims) off = buf.writeUInt32LE(d, off)
  off = buf.writeUInt32LE(idBlob.length, off)
  idBlob.copy(buf, off)
  off += idBlob.length
  const view = new DataView(buf.buffer, buf.byteOffset + off, 4 * count)
  for (let i = 0; i < count; i++) view.setFloat32(4 * i, data[i], true)
  off += 4 * count
  if (probabilityFlag !== undefined) buf.writeUInt8(probabilityFlag ? 1 : 0, off)
  return buf
}

export function writeHtgf(path: string, tensor: HtgfTensor): void {
  writeFileSync(path, encodeHtgf(tensor))
}

/** Parse an HTGF file; used by the adapter's own tests. */
export function readHtgf(path: string, withFlag = false): HtgfTensor {
  const buf = readFileSync(path)
  if (buf.length < 12 || buf.toString('ascii', 0, 4) !== MAGIC) {
    throw new FormatError(`${path}: bad magic`)
  }
  const version = buf.readUInt32LE(4)
  if (version !== VERSION) throw new FormatError(`${path}: unsupported version ${version}`)
  const rank = buf.readUInt32LE(8)
  let off = 12
  const dims: number[] = []
  for (let i = 0; i < rank; i++) {
    dims.push(buf.readUInt32LE(off))
    off += 4
  }
  const idLen = buf.readUInt32LE(off)
  off += 4
  const ids = buf.toString('utf-8', off, off + idLen).split('\n')
  off += idLen
  if (ids.length !== dims[0]) {
    throw new FormatError(`${path}: ${ids.length} ids but leading dim ${dims[0]}`)
  }
  const count = dims.reduce((a, b) => a * b, 1)
  const expected = off + 4 * count + (withFlag ? 1 : 0)
  if (buf.length !== expected) {
    throw new FormatError(`${path}: expected ${expected} bytes, found ${buf.length}`)
  }
  const data = new Float32Array(count)
  const view = new DataView(buf.buffer, buf.byteOffset + off, 4 * count)
  for (let i = 0; i < count; i++) data[i] = view.getFloat32(4 * i, true)
  const out: HtgfTensor = { ids, dims, data }
  if (withFlag) out.probabilityFlag = buf.readUInt8(buf.length - 1) === 1
  return out
}
