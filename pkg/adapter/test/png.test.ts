import assert from 'node:assert/strict'
import { test } from 'node:test'
import { decodePng, resize } from '../src/png'
import { encodeGrayPng, gradientImage } from './helpers'

test('decodes 8-bit grayscale with exact values', () => {
  const pixels = gradientImage(20, 12)
  const img = decodePng(encodeGrayPng(20, 12, pixels))
  assert.equal(img.width, 20)
  assert.equal(img.height, 12)
  assert.equal(img.maxIntensity, 255)
  for (let i = 0; i < pixels.length; i++) {
    assert.ok(Math.abs(img.pixels[i] - pixels[i] / 255) < 1e-12)
  }
})

test('rejects non-png bytes', () => {
  assert.throws(() => decodePng(Buffer.from('definitely not a png')))
})

test('resize to fixed grid is deterministic and in range', () => {
  const img = decodePng(encodeGrayPng(20, 12, gradientImage(20, 12)))
  const a = resize(img, 32, 32)
  const b = resize(img, 32, 32)
  assert.deepEqual(Array.from(a), Array.from(b))
  for (const v of a) assert.ok(v >= 0 && v <= 1)
})

test('constant image stays constant under resize', () => {
  const px = new Uint8Array(15 * 9).fill(200)
  const img = decodePng(encodeGrayPng(15, 9, px))
  const out = resize(img, 32, 32)
  for (const v of out) assert.ok(Math.abs(v - 200 / 255) < 1e-12)
})
