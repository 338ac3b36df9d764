import { readFileSync } from 'fs'
import { SchemaError } from './errors'

export interface ManifestEntry {
  sample_id: string
  image_path: string | null
  transcript: string
  writer_id: number
  vocab_tag: 'IV' | 'OOV' | null
}

export function loadManifest(path: string): ManifestEntry[] {
  const entries: ManifestEntry[] = []
  const seen = new Set<string>()
  const lines = readFileSync(path, 'utf-8').split('\n')
  lines.forEach((line, index) => {
    if (!line.trim()) return
    let obj: Record<string, unknown>
    try {
      obj = JSON.parse(line)
    } catch (err) {
      throw new SchemaError(`${path}:${index + 1}: invalid JSON (${err})`)
    }
    for (const field of ['sample_id', 'transcript', 'writer_id']) {
      if (!(field in obj)) {
        throw new SchemaError(`${path}:${index + 1}: missing required field ${field}`)
      }
    }
    const entry = obj as unknown as ManifestEntry
    if (seen.has(entry.sample_id)) {
      throw new SchemaError(`${path}:${index + 1}: duplicate sample_id ${entry.sample_id}`)
    }
    seen.add(entry.sample_id)
    entries.push({
      sample_id: String(entry.sample_id),
      image_path: entry.image_path ?? null,
      transcript: String(entry.transcript),
      writer_id: Number(entry.writer_id),
      vocab_tag: entry.vocab_tag ?? null,
    })
  })
  if (entries.length === 0) throw new SchemaError(`${path}: empty manifest`)
  return entries
}
