/**
 * Foreign prediction-log conversion into the toolkit's JSONL schemas.
 *
 * Recognized CSV headers (case-insensitive):
 *   transcription: id|sample_id, gt|ref|reference, pred|hyp|hypothesis
 *   style:         id|sample_id, true|true_label|gt, pred|predicted_label
 * Field mapping is lossless and IDs are preserved verbatim.
 */
import { SchemaError } from './errors'

export function parseCsv(text: string): string[][] {
  const rows: string[][] = []
  let row: string[] = []
  let field = ''
  let inQuotes = false
  let i = 0
  const push = () => {
    row.push(field)
    field = ''
  }
  const endRow = () => {
    push()
    if (row.length > 1 || row[0] !== '') rows.push(row)
    row = []
  }
  while (i < text.length) {
    const ch = text[i]
    if (inQuotes) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          field += '"'
          i++
        } else {
          inQuotes = false
        }
      } else {
        field += ch
      }
    } else if (ch === '"') {
      inQuotes = true
    } else if (ch === ',') {
      push()
    } else if (ch === '\n') {
      endRow()
    } else if (ch !== '\r') {
      field += ch
    }
    i++
  }
  if (field !== '' || row.length > 0) endRow()
  return rows
}

const TRANSCRIPTION_COLUMNS: Record<string, string[]> = {
  sample_id: ['id', 'sample_id'],
  reference: ['gt', 'ref', 'reference', 'ground_truth'],
  hypothesis: ['pred', 'hyp', 'hypothesis', 'prediction'],
}

const STYLE_COLUMNS: Record<string, string[]> = {
  sample_id: ['id', 'sample_id'],
  true_label: ['true', 'true_label', 'gt', 'writer'],
  predicted_label: ['pred', 'predicted', 'predicted_label'],
}

function columnIndex(header: string[], aliases: Record<string, string[]>): Record<string, number> {
  const lower = header.map((h) => h.trim().toLowerCase())
  const index: Record<string, number> = {}
  for (const [field, names] of Object.entries(aliases)) {
    const at = lower.findIndex((h) => names.includes(h))
    if (at < 0) {
      throw new SchemaError(`no column maps to ${field} (header: ${header.join(', ')})`)
    }
    index[field] = at
  }
  return index
}

export function convertLog(csvText: string, kind: 'transcription' | 'style'): string[] {
  const rows = parseCsv(csvText)
  if (rows.length < 2) throw new SchemaError('CSV needs a header row and at least one record')
  const aliases = kind === 'transcription' ? TRANSCRIPTION_COLUMNS : STYLE_COLUMNS
  const cols = columnIndex(rows[0], aliases)
  const out: string[] = []
  rows.slice(1).forEach((row, n) => {
    const get = (field: string): string => {
      const value = row[cols[field]]
      if (value === undefined) {
        throw new SchemaError(`row ${n + 2}: missing field ${field}`)
      }
      return value
    }
    const sampleId = get('sample_id')
    if (!sampleId) throw new SchemaError(`row ${n + 2}: empty sample id`)
    if (kind === 'transcription') {
      out.push(
        JSON.stringify({
          sample_id: sampleId,
          reference: get('reference'),
          hypothesis: get('hypothesis'),
        }),
      )
    } else {
      const trueLabel = Number(get('true_label'))
      const predicted = Number(get('predicted_label'))
      if (!Number.isInteger(trueLabel) || !Number.isInteger(predicted)) {
        throw new SchemaError(`row ${n + 2}: labels must be integers`)
      }
      out.push(
        JSON.stringify({
          sample_id: sampleId,
          true_label: trueLabel,
          predicted_label: predicted,
        }),
      )
    }
  })
  return out
}
