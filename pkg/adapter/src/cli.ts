#!/usr/bin/env node
/**
 * htg-eval-adapter: extract features/logits/layer maps from image sets into
 * HTGF files, and convert foreign prediction logs into the toolkit JSONL
 * schemas.
 *
 *   extract --manifest m.jsonl --out feats.htgf --layer pool
 *           [--backbone classifier|perceptual] [--checkpoint w.json]
 *           [--image-root DIR] [--seed 0] [--skip-unreadable]
 *   convert --in log.csv --kind transcription|style --out t.jsonl
 */
import { readFileSync, writeFileSync } from 'fs'
import { parseArgs } from 'util'
import { buildCheckpoint, loadCheckpoint } from './backbone'
import { convertLog } from './convert'
import { extractFeatures, LayerName } from './extract'
import { encodeHtgf } from './htgf'
import { loadManifest } from './manifest'

function fail(message: string): never {
  process.stderr.write(JSON.stringify({ error: 'UsageError', message }) + '\n')
  process.exit(2)
}

function runExtract(argv: string[]): void {
  const { values } = parseArgs({
    args: argv,
    options: {
      manifest: { type: 'string' },
      out: { type: 'string' },
      layer: { type: 'string', default: 'pool' },
      backbone: { type: 'string', default: 'classifier' },
      checkpoint: { type: 'string' },
      'image-root': { type: 'string' },
      seed: { type: 'string', default: '0' },
      'skip-unreadable': { type: 'boolean', default: false },
    },
  })
  if (!values.manifest || !values.out) fail('extract needs --manifest and --out')
  const layer = values.layer as LayerName
  if (!['pool', 'logits', 'conv1', 'conv2'].includes(layer)) {
    fail(`unknown layer ${values.layer}`)
  }
  if (values.backbone !== 'classifier' && values.backbone !== 'perceptual') {
    fail(`unknown backbone ${values.backbone}`)
  }
  const checkpoint = values.checkpoint
    ? loadCheckpoint(values.checkpoint)
    : buildCheckpoint(values.backbone as 'classifier' | 'perceptual', Number(values.seed))
  const manifest = loadManifest(values.manifest)
  const tensor = extractFeatures(manifest, values.manifest, {
    checkpoint,
    layer,
    imageRoot: values['image-root'],
    skipUnreadable: values['skip-unreadable'],
  })
  writeFileSync(values.out, encodeHtgf(tensor))
  process.stdout.write(
    JSON.stringify({
      out: values.out,
      layer,
      dims: tensor.dims,
      n_samples: tensor.ids.length,
      backbone: checkpoint.name,
    }) + '\n',
  )
}

function runConvert(argv: string[]): void {
  const { values } = parseArgs({
    args: argv,
    options: {
      in: { type: 'string' },
      kind: { type: 'string' },
      out: { type: 'string' },
    },
  })
  if (!values.in || !values.out || !values.kind) {
    fail('convert needs --in, --kind, and --out')
  }
  if (values.kind !== 'transcription' && values.kind !== 'style') {
    fail(`unknown kind ${values.kind}`)
  }
  const lines = convertLog(readFileSync(values.in, 'utf-8'), values.kind)
  writeFileSync(values.out, lines.join('\n') + '\n')
  process.stdout.write(
    JSON.stringify({ out: values.out, kind: values.kind, n_records: lines.length }) + '\n',
  )
}

function main(): void {
  const [command, ...rest] = process.argv.slice(2)
  try {
    if (command === 'extract') {
      runExtract(rest)
    } else if (command === 'convert') {
      runConvert(rest)
    } else {
      fail(`unknown command ${command ?? '(none)'}; expected extract or convert`)
    }
  } catch (err) {
    const name = err instanceof Error ? err.name : 'Error'
    const message = err instanceof Error ? err.message : String(err)
    process.stderr.write(JSON.stringify({ error: name, message }) + '\n')
    process.exit(1)
  }
}

main()
