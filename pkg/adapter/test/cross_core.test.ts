/**
 * Cross-component contract tests: everything the adapter emits must be
 * accepted by the core toolkit through its external interfaces (the
 * htg-eval CLI and the HTGF/JSONL file formats).
 */
import assert from 'node:assert/strict'
import { test } from 'node:test'
import { spawnSync } from 'child_process'
import { createHash } from 'crypto'
import { mkdtempSync, readFileSync, writeFileSync } from 'fs'
import { tmpdir } from 'os'
import { join } from 'path'
import { buildCheckpoint } from '../src/backbone'
import { convertLog } from '../src/convert'
import { extractFeatures } from '../src/extract'
import { encodeHtgf } from '../src/htgf'
import { loadManifest } from '../src/manifest'

const CORE = process.env.HTG_EVAL_BIN ?? 'htg-eval'

function core(args: string[]): { code: number; stdout: string; stderr: string } {
  const result = spawnSync(CORE, args, { encoding: 'utf-8' })
  if (result.error) {
    throw new Error(
      `cannot run ${CORE} (${result.error}); install the core package or set HTG_EVAL_BIN`,
    )
  }
  return { code: result.status ?? -1, stdout: result.stdout, stderr: result.stderr }
}

function makeFixture(dir: string): string {
  const result = core([
    'fixture',
    '--writers',
    '3',
    '--samples',
    '12',
    '--seed',
    '5',
    '--out-dir',
    dir,
  ])
  assert.equal(result.code, 0, result.stderr)
  return JSON.parse(result.stdout).paths.manifest
}

test('adapter HTGF output passes core loader validation', () => {
  const dir = mkdtempSync(join(tmpdir(), 'cross-'))
  const manifestPath = makeFixture(dir)
  const manifest = loadManifest(manifestPath)
  const ckpt = buildCheckpoint('classifier', 0)

  const pool = extractFeatures(manifest, manifestPath, { checkpoint: ckpt, layer: 'pool' })
  const poolPath = join(dir, 'pool.htgf')
  writeFileSync(poolPath, encodeHtgf(pool))
  const poolCheck = core(['validate', '--path', poolPath, '--kind', 'features'])
  assert.equal(poolCheck.code, 0, poolCheck.stderr)
  assert.equal(JSON.parse(poolCheck.stdout).ok, true)
  assert.deepEqual(JSON.parse(poolCheck.stdout).dims, pool.dims)

  const logits = extractFeatures(manifest, manifestPath, { checkpoint: ckpt, layer: 'logits' })
  const logitsPath = join(dir, 'logits.htgf')
  writeFileSync(logitsPath, encodeHtgf(logits))
  const logitsCheck = core(['validate', '--path', logitsPath, '--kind', 'logits'])
  assert.equal(logitsCheck.code, 0, logitsCheck.stderr)
  assert.equal(JSON.parse(logitsCheck.stdout).is_probability, false)

  const maps = extractFeatures(manifest, manifestPath, { checkpoint: ckpt, layer: 'conv1' })
  const mapsPath = join(dir, 'conv1.htgf')
  writeFileSync(mapsPath, encodeHtgf(maps))
  const mapsCheck = core(['validate', '--path', mapsPath, '--kind', 'maps'])
  assert.equal(mapsCheck.code, 0, mapsCheck.stderr)
})

test('core metrics consume adapter features end to end', () => {
  const dir = mkdtempSync(join(tmpdir(), 'cross-'))
  const manifestPath = makeFixture(dir)
  const manifest = loadManifest(manifestPath)
  const ckpt = buildCheckpoint('classifier', 0)
  const pool = extractFeatures(manifest, manifestPath, { checkpoint: ckpt, layer: 'pool' })
  const poolPath = join(dir, 'pool.htgf')
  writeFileSync(poolPath, encodeHtgf(pool))

  const fid = core(['fid', '--real', poolPath, '--gen', poolPath])
  assert.equal(fid.code, 0, fid.stderr)
  assert.ok(Math.abs(JSON.parse(fid.stdout).value) < 1e-8)

  const hwd = core(['hwd', '--real', poolPath, '--gen', poolPath, '--manifest', manifestPath])
  assert.equal(hwd.code, 0, hwd.stderr)
  assert.equal(JSON.parse(hwd.stdout).value, 0)
})

test('convert -> core load round-trip preserves every record', () => {
  const dir = mkdtempSync(join(tmpdir(), 'cross-'))
  const rows = [
    ['s1', 'move', 'move'],
    ['s2', 'sabotage', 'sabotage'],
    ['s3', 'word', 'ward'],
    ['s4', 'hello, world', 'hello world'],
  ]
  const csv =
    'id,gt,pred\n' +
    rows.map(([i, g, p]) => `${i},"${g.replace(/"/g, '""')}","${p.replace(/"/g, '""')}"`).join('\n') +
    '\n'
  const lines = convertLog(csv, 'transcription')
  assert.equal(lines.length, rows.length)
  lines.forEach((line, n) => {
    assert.deepEqual(JSON.parse(line), {
      sample_id: rows[n][0],
      reference: rows[n][1],
      hypothesis: rows[n][2],
    })
  })
  const outPath = join(dir, 'converted.jsonl')
  writeFileSync(outPath, lines.join('\n') + '\n')

  const result = core(['cer', '--records', outPath])
  assert.equal(result.code, 0, result.stderr)
  const report = JSON.parse(result.stdout)
  assert.equal(report.n_records, rows.length)
  assert.equal(
    report.total_reference_length,
    rows.reduce((acc, [, g]) => acc + g.length, 0),
  )
})

test('repeated deterministic extraction yields identical digests', () => {
  const dir = mkdtempSync(join(tmpdir(), 'cross-'))
  const manifestPath = makeFixture(dir)
  const manifest = loadManifest(manifestPath)
  const sha = (b: Buffer) => createHash('sha256').update(b).digest('hex')
  const digests = new Set<string>()
  for (let run = 0; run < 3; run++) {
    const ckpt = buildCheckpoint('classifier', 0)
    const tensor = extractFeatures(manifest, manifestPath, { checkpoint: ckpt, layer: 'pool' })
    digests.add(sha(encodeHtgf(tensor)))
  }
  assert.equal(digests.size, 1)
})

test('checkpoint file round-trips through extraction', () => {
  const dir = mkdtempSync(join(tmpdir(), 'cross-'))
  const manifestPath = makeFixture(dir)
  const manifest = loadManifest(manifestPath)
  const ckptPath = join(dir, 'ckpt.json')
  writeFileSync(ckptPath, JSON.stringify(buildCheckpoint('classifier', 42)))
  const { loadCheckpoint } = require('../src/backbone') as typeof import('../src/backbone')
  const fromFile = extractFeatures(manifest, manifestPath, {
    checkpoint: loadCheckpoint(ckptPath),
    layer: 'pool',
  })
  const fromSeed = extractFeatures(manifest, manifestPath, {
    checkpoint: buildCheckpoint('classifier', 42),
    layer: 'pool',
  })
  assert.deepEqual(Array.from(fromFile.data), Array.from(fromSeed.data))
})
