import assert from 'node:assert/strict'
import { test } from 'node:test'
import { convertLog, parseCsv } from '../src/convert'

test('csv parser handles quotes and embedded commas', () => {
  const rows = parseCsv('id,gt,pred\r\na,"hello, world","say ""hi"""\n')
  assert.deepEqual(rows, [
    ['id', 'gt', 'pred'],
    ['a', 'hello, world', 'say "hi"'],
  ])
})

test('transcription conversion maps fields losslessly', () => {
  const lines = convertLog('id,gt,pred\ns1,move,move\ns2,word,ward\n', 'transcription')
  assert.equal(lines.length, 2)
  assert.deepEqual(JSON.parse(lines[0]), {
    sample_id: 's1',
    reference: 'move',
    hypothesis: 'move',
  })
  assert.deepEqual(JSON.parse(lines[1]), {
    sample_id: 's2',
    reference: 'word',
    hypothesis: 'ward',
  })
})

test('alias headers are recognized', () => {
  const lines = convertLog(
    'sample_id,reference,hypothesis\nx,aa,ab\n',
    'transcription',
  )
  assert.equal(JSON.parse(lines[0]).sample_id, 'x')
})

test('style conversion produces integer labels', () => {
  const lines = convertLog('id,true,pred\ns1,3,3\ns2,1,0\n', 'style')
  assert.deepEqual(JSON.parse(lines[0]), { sample_id: 's1', true_label: 3, predicted_label: 3 })
})

test('unmapped column is a schema error', () => {
  assert.throws(() => convertLog('id,gt\na,b\n', 'transcription'), /no column maps/)
})

test('missing id value is a schema error', () => {
  assert.throws(() => convertLog('id,gt,pred\n,x,y\n', 'transcription'), /empty sample id/)
})

test('non-integer style labels are rejected', () => {
  assert.throws(() => convertLog('id,true,pred\na,1.5,0\n', 'style'), /integers/)
})
