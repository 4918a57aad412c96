// Mesh construction and face picking. The server tags every triangle
// with its BREP face id; a raycast hit maps back through faceIndex.

import * as THREE from 'three'
import type { MeshJson } from './api'

export interface PartMesh {
  geometry: THREE.BufferGeometry
  faceOfTriangle: string[]
}

export function buildGeometry(mesh: MeshJson): PartMesh {
  const geometry = new THREE.BufferGeometry()
  const positions = new Float32Array(mesh.positions.length * 3)
  mesh.positions.forEach((p, i) => positions.set(p, i * 3))
  const index = new Uint32Array(mesh.triangles.length * 3)
  mesh.triangles.forEach((t, i) => index.set(t, i * 3))
  geometry.setAttribute('position', new THREE.BufferAttribute(positions, 3))
  geometry.setIndex(new THREE.BufferAttribute(index, 1))
  geometry.computeVertexNormals()
  return { geometry, faceOfTriangle: mesh.face_of_triangle }
}

/** BREP face id of a raycast intersection, or null when nothing maps. */
export function faceOfIntersection(
  part: PartMesh,
  intersection: THREE.Intersection | undefined,
): string | null {
  if (!intersection || intersection.faceIndex == null) return null
  return part.faceOfTriangle[intersection.faceIndex] ?? null
}

/**
 * Cast a ray against one part's mesh object and resolve the BREP face id.
 * A miss returns null so the caller can leave the selection unchanged.
 */
export function pickFace(
  raycaster: THREE.Raycaster,
  object: THREE.Mesh,
  part: PartMesh,
): string | null {
  const hits = raycaster.intersectObject(object, false)
  return faceOfIntersection(part, hits[0])
}

/** Row-major 16-float transform from the server as a three.js matrix. */
export function matrixFromRowMajor(values: number[]): THREE.Matrix4 {
  const m = new THREE.Matrix4()
  m.set(
    values[0], values[1], values[2], values[3],
    values[4], values[5], values[6], values[7],
    values[8], values[9], values[10], values[11],
    values[12], values[13], values[14], values[15],
  )
  return m
}

/** Frame (origin + axes) as a homogeneous matrix; columns are the axes. */
export function matrixFromFrame(frame: { origin: number[]; x: number[]; y: number[]; z: number[] }): THREE.Matrix4 {
  const m = new THREE.Matrix4()
  m.set(
    frame.x[0], frame.y[0], frame.z[0], frame.origin[0],
    frame.x[1], frame.y[1], frame.z[1], frame.origin[1],
    frame.x[2], frame.y[2], frame.z[2], frame.origin[2],
    0, 0, 0, 1,
  )
  return m
}
