// Face picking against live tessellated meshes: every hit triangle maps
// back to its BREP face id through the server's face_of_triangle tags.

import * as THREE from 'three'
import { beforeAll, describe, expect, it } from 'vitest'
import { createApi, type Api } from '../src/api'
import { buildGeometry, faceOfIntersection, pickFace, type PartMesh } from '../src/picking'

let api: Api

beforeAll(() => {
  api = createApi(process.env.BREPMATE_URL!)
})

function meshObject(part: PartMesh): THREE.Mesh {
  const mesh = new THREE.Mesh(part.geometry, new THREE.MeshBasicMaterial({ side: THREE.DoubleSide }))
  mesh.updateMatrixWorld(true)
  return mesh
}

function rayFrom(origin: [number, number, number], target: [number, number, number]): THREE.Raycaster {
  const o = new THREE.Vector3(...origin)
  const dir = new THREE.Vector3(...target).sub(o).normalize()
  return new THREE.Raycaster(o, dir)
}

describe('face picking', () => {
  it('resolves every cylinder side triangle to the single side face id', async () => {
    const part = buildGeometry(await api.getMesh('peg', 24))
    const object = meshObject(part)
    // rays at many heights and angles around the barrel
    for (const z of [-0.2, -0.1, 0, 0.1, 0.2]) {
      for (let k = 0; k < 12; k++) {
        const angle = (k / 12) * Math.PI * 2
        const from: [number, number, number] = [2 * Math.cos(angle), 2 * Math.sin(angle), z]
        const picked = pickFace(rayFrom(from, [0, 0, z]), object, part)
        expect(picked).toBe('f_side')
      }
    }
  })

  it('distinguishes the caps from the side', async () => {
    const part = buildGeometry(await api.getMesh('peg', 24))
    const object = meshObject(part)
    expect(pickFace(rayFrom([0.05, 0.03, 2], [0.05, 0.03, 0]), object, part)).toBe('f_top')
    expect(pickFace(rayFrom([0.05, 0.03, -2], [0.05, 0.03, 0]), object, part)).toBe('f_bot')
  })

  it('picks cube faces through camera NDC coordinates like a click', async () => {
    const part = buildGeometry(await api.getMesh('cube_a'))
    const object = meshObject(part)
    const camera = new THREE.PerspectiveCamera(45, 1, 0.01, 100)
    camera.position.set(0, 0, 3)
    camera.lookAt(0, 0, 0)
    camera.updateMatrixWorld(true)
    const raycaster = new THREE.Raycaster()
    raycaster.setFromCamera(new THREE.Vector2(0, 0), camera)
    expect(pickFace(raycaster, object, part)).toBe('f_zmax')
  })

  it('returns null on a background miss so the selection stays unchanged', async () => {
    const part = buildGeometry(await api.getMesh('cube_a'))
    const object = meshObject(part)
    expect(pickFace(rayFrom([5, 5, 5], [5, 5, 9]), object, part)).toBeNull()
    expect(faceOfIntersection(part, undefined)).toBeNull()
  })

  it('builds geometry whose triangle count matches the tag list', async () => {
    const mesh = await api.getMesh('peg', 16)
    const part = buildGeometry(mesh)
    const index = part.geometry.getIndex()!
    expect(index.count / 3).toBe(mesh.face_of_triangle.length)
    const side = mesh.face_of_triangle.filter((f) => f === 'f_side').length
    expect(side).toBe(32)
  })
})
