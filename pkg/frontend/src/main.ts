// DOM wiring: part pickers, click-to-select faces, the 6-item suggestion
// list (hotkeys 1-6), live preview, and the ranked mate types.

import { createApi } from './api'
import { buildGeometry } from './picking'
import { UiSession, Slot } from './session'
import { createViewer } from './viewer'

const api = createApi('')
const session = new UiSession(api)

const viewerHost = document.getElementById('viewer')!
const viewer = createViewer(viewerHost)
const partSelectA = document.getElementById('part-a') as HTMLSelectElement
const partSelectB = document.getElementById('part-b') as HTMLSelectElement
const statusLine = document.getElementById('status')!
const suggestionList = document.getElementById('suggestions')!
const typeList = document.getElementById('types')!
const confirmButton = document.getElementById('confirm') as HTMLButtonElement

async function loadPartPair(): Promise<void> {
  const a = partSelectA.value
  const b = partSelectB.value
  if (!a || !b) return
  session.loadParts(a, b)
  const [meshA, meshB] = await Promise.all([api.getMesh(a), api.getMesh(b)])
  viewer.setPart('a', buildGeometry(meshA))
  viewer.setPart('b', buildGeometry(meshB))
  viewer.applyPreview(null)
  viewer.showSuggestionFrames([], null)
}

function renderState(): void {
  const s = session.current
  statusLine.textContent = s.error
    ? `error: ${s.error}`
    : s.pending
      ? 'scoring candidates...'
      : s.suggestions.length
        ? `${s.suggestions.length} of ${s.candidateCount} candidates${s.truncated ? ' (truncated)' : ''}`
        : `select a face on each part (a: ${s.faceA ?? '-'}, b: ${s.faceB ?? '-'})`

  suggestionList.innerHTML = ''
  s.suggestions.forEach((sug, i) => {
    const li = document.createElement('li')
    li.className = i === s.chosenIndex ? 'chosen' : ''
    li.textContent = `${sug.rank}. score ${sug.score.toFixed(3)} ` +
      `(${sug.mcf_a.origin_type} / ${sug.mcf_b.origin_type})`
    li.onclick = () => session.chooseSuggestion(i)
    suggestionList.appendChild(li)
  })

  typeList.innerHTML = ''
  for (const t of s.typeRanking ?? []) {
    const li = document.createElement('li')
    li.textContent = `${t.mate_type} ${(t.probability * 100).toFixed(1)}%`
    typeList.appendChild(li)
  }

  confirmButton.disabled = s.chosenIndex === null
  viewer.showSuggestionFrames(s.suggestions, s.chosenIndex)
  viewer.applyPreview(session.previewTransform)
  viewer.highlightFace('a', s.faceA)
  viewer.highlightFace('b', s.faceB)
  viewer.render()
}

session.onChange(renderState)

viewerHost.addEventListener('pointerdown', (event) => {
  const rect = viewerHost.getBoundingClientRect()
  const ndcX = ((event.clientX - rect.left) / rect.width) * 2 - 1
  const ndcY = -((event.clientY - rect.top) / rect.height) * 2 + 1
  const hit = viewer.pickAtPointer(ndcX, ndcY)
  if (!hit) return // background click leaves selections unchanged
  session.selectFace(hit.slot as Slot, hit.faceId)
  if (session.bothFacesSelected) void session.requestSuggestions()
})

window.addEventListener('keydown', (event) => {
  const n = Number(event.key)
  if (n >= 1 && n <= 6) session.chooseSuggestion(n - 1)
})

confirmButton.addEventListener('click', () => void session.confirmChosen())
partSelectA.addEventListener('change', () => void loadPartPair())
partSelectB.addEventListener('change', () => void loadPartPair())
window.addEventListener('resize', () => {
  viewer.resize()
  viewer.render()
})

async function boot(): Promise<void> {
  const health = await api.health()
  for (const select of [partSelectA, partSelectB]) {
    select.innerHTML = ''
    for (const id of health.parts) {
      const option = document.createElement('option')
      option.value = id
      option.textContent = id
      select.appendChild(option)
    }
  }
  if (health.parts.length >= 2) {
    partSelectA.value = health.parts[0]
    partSelectB.value = health.parts[1]
    await loadPartPair()
  }
  renderState()
}

void boot()
