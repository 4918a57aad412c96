// three.js scene hosting the two parts, face highlighting, suggestion
// frame glyphs, and the live mate preview.

import * as THREE from 'three'
import type { FrameJson, Suggestion } from './api'
import { PartMesh, matrixFromFrame, matrixFromRowMajor, pickFace } from './picking'
import type { Slot } from './session'

const PART_COLORS = { a: 0x5b8dd9, b: 0xd9a05b }
const HIGHLIGHT = 0x35d06a

export interface Viewer {
  setPart: (slot: Slot, part: PartMesh) => void
  pickAtPointer: (ndcX: number, ndcY: number) => { slot: Slot; faceId: string } | null
  highlightFace: (slot: Slot, faceId: string | null) => void
  showSuggestionFrames: (suggestions: Suggestion[], chosen: number | null) => void
  applyPreview: (transformRowMajor: number[] | null) => void
  resize: () => void
  render: () => void
  dispose: () => void
}

function frameGlyph(frame: FrameJson, size: number): THREE.AxesHelper {
  const glyph = new THREE.AxesHelper(size)
  glyph.matrixAutoUpdate = false
  glyph.matrix.copy(matrixFromFrame(frame))
  return glyph
}

export function createViewer(container: HTMLElement): Viewer {
  const renderer = new THREE.WebGLRenderer({ antialias: true })
  renderer.setPixelRatio(Math.min(window.devicePixelRatio, 2))
  renderer.setSize(container.clientWidth, container.clientHeight)
  renderer.setClearColor(0x14171c)
  container.appendChild(renderer.domElement)

  const scene = new THREE.Scene()
  const camera = new THREE.PerspectiveCamera(
    45, container.clientWidth / Math.max(1, container.clientHeight), 0.01, 100)
  camera.position.set(2.2, 1.6, 2.6)
  camera.lookAt(0, 0, 0)

  scene.add(new THREE.AmbientLight(0xffffff, 0.55))
  const key = new THREE.DirectionalLight(0xffffff, 1.1)
  key.position.set(3, 4, 2)
  scene.add(key)
  scene.add(new THREE.GridHelper(4, 16, 0x2a2f38, 0x20242c))

  const raycaster = new THREE.Raycaster()
  const parts: Partial<Record<Slot, PartMesh>> = {}
  const objects: Partial<Record<Slot, THREE.Mesh>> = {}
  const highlights: Partial<Record<Slot, THREE.Mesh>> = {}
  const previewGroup = new THREE.Group() // part b lives here; preview sets its matrix
  previewGroup.matrixAutoUpdate = false
  scene.add(previewGroup)
  const glyphGroup = new THREE.Group()
  scene.add(glyphGroup)

  function setPart(slot: Slot, part: PartMesh): void {
    const old = objects[slot]
    if (old) {
      old.removeFromParent()
      old.geometry.dispose()
    }
    const material = new THREE.MeshStandardMaterial({
      color: PART_COLORS[slot], side: THREE.DoubleSide, flatShading: true,
    })
    const mesh = new THREE.Mesh(part.geometry, material)
    mesh.name = `part_${slot}`
    parts[slot] = part
    objects[slot] = mesh
    if (slot === 'b') previewGroup.add(mesh)
    else scene.add(mesh)
    highlightFace(slot, null)
  }

  function pickAtPointer(ndcX: number, ndcY: number): { slot: Slot; faceId: string } | null {
    raycaster.setFromCamera(new THREE.Vector2(ndcX, ndcY), camera)
    let best: { slot: Slot; faceId: string; distance: number } | null = null
    for (const slot of ['a', 'b'] as Slot[]) {
      const object = objects[slot]
      const part = parts[slot]
      if (!object || !part) continue
      const hits = raycaster.intersectObject(object, false)
      const hit = hits[0]
      if (!hit) continue
      const faceId = pickFace(raycaster, object, part)
      if (faceId && (!best || hit.distance < best.distance)) {
        best = { slot, faceId, distance: hit.distance }
      }
    }
    return best ? { slot: best.slot, faceId: best.faceId } : null
  }

  function highlightFace(slot: Slot, faceId: string | null): void {
    const old = highlights[slot]
    if (old) {
      old.removeFromParent()
      old.geometry.dispose()
      highlights[slot] = undefined
    }
    const part = parts[slot]
    const host = objects[slot]
    if (!faceId || !part || !host) return
    // sub-geometry of the selected face's triangles, drawn slightly lifted
    const tris: number[] = []
    part.faceOfTriangle.forEach((fid, i) => {
      if (fid === faceId) tris.push(i)
    })
    const source = part.geometry.getIndex()
    if (!source) return
    const sub = new THREE.BufferGeometry()
    sub.setAttribute('position', part.geometry.getAttribute('position'))
    const idx = new Uint32Array(tris.length * 3)
    tris.forEach((t, i) => {
      idx[i * 3] = source.getX(t * 3)
      idx[i * 3 + 1] = source.getX(t * 3 + 1)
      idx[i * 3 + 2] = source.getX(t * 3 + 2)
    })
    sub.setIndex(new THREE.BufferAttribute(idx, 1))
    const mesh = new THREE.Mesh(sub, new THREE.MeshBasicMaterial({
      color: HIGHLIGHT, side: THREE.DoubleSide, transparent: true, opacity: 0.55,
      polygonOffset: true, polygonOffsetFactor: -2,
    }))
    host.add(mesh)
    highlights[slot] = mesh
  }

  function showSuggestionFrames(suggestions: Suggestion[], chosen: number | null): void {
    glyphGroup.clear()
    suggestions.forEach((s, i) => {
      const size = i === chosen ? 0.22 : 0.1
      glyphGroup.add(frameGlyph(s.frame_a, size))
    })
  }

  function applyPreview(transformRowMajor: number[] | null): void {
    if (transformRowMajor) {
      previewGroup.matrix.copy(matrixFromRowMajor(transformRowMajor))
    } else {
      previewGroup.matrix.identity()
    }
  }

  function resize(): void {
    camera.aspect = container.clientWidth / Math.max(1, container.clientHeight)
    camera.updateProjectionMatrix()
    renderer.setSize(container.clientWidth, container.clientHeight)
  }

  function render(): void {
    renderer.render(scene, camera)
  }

  return {
    setPart,
    pickAtPointer,
    highlightFace,
    showSuggestionFrames,
    applyPreview,
    resize,
    render,
    dispose: () => renderer.dispose(),
  }
}
