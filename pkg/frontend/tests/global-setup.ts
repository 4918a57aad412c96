// Spawns the real suggestion service on the test fixtures (building them
// first if missing) and tears it down after the run.

import { spawn, spawnSync, ChildProcess } from 'node:child_process'
import { existsSync } from 'node:fs'
import path from 'node:path'

const ROOT = path.resolve(__dirname, '..')
const FIXTURES = path.join(ROOT, '.fixtures')
const PORT = 8931
export const BASE_URL = `http://127.0.0.1:${PORT}`

let service: ChildProcess | null = null

async function waitForHealth(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs
  while (Date.now() < deadline) {
    try {
      const res = await fetch(`${BASE_URL}/api/health`)
      if (res.ok) return
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250))
  }
  throw new Error(`service did not become healthy within ${timeoutMs} ms`)
}

export async function setup(): Promise<void> {
  if (!existsSync(path.join(FIXTURES, 'location.ckpt.json'))) {
    const made = spawnSync('python3', [path.join(ROOT, 'scripts', 'make_fixtures.py')], {
      stdio: 'inherit',
    })
    if (made.status !== 0) throw new Error('fixture build failed')
  }
  service = spawn('python3', [
    '-m', 'brepmate.cli', 'serve',
    '--host', '127.0.0.1', '--port', String(PORT),
    '--location-model', path.join(FIXTURES, 'location.ckpt.json'),
    '--type-model', path.join(FIXTURES, 'type.ckpt.json'),
    '--parts-dir', path.join(FIXTURES, 'parts'),
  ], { stdio: 'ignore' })
  process.env.BREPMATE_URL = BASE_URL
  await waitForHealth(60000)
}

export async function teardown(): Promise<void> {
  if (service && !service.killed) service.kill('SIGTERM')
}
