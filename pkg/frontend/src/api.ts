// Typed client for the suggestion service. The UI performs no geometric
// computation of its own; every frame and transform comes from here.

export type Vec3 = [number, number, number]

export interface FrameJson {
  origin: Vec3
  x: Vec3
  y: Vec3
  z: Vec3
}

export interface McfRefJson {
  origin_ref: string
  origin_type: string
  orient_ref: string
}

export interface Suggestion {
  rank: number
  score: number
  mcf_a: McfRefJson
  mcf_b: McfRefJson
  frame_a: FrameJson
  frame_b: FrameJson
  transform_b: number[] // 16 floats, row-major
}

export interface SuggestResponse {
  suggestions: Suggestion[]
  candidate_count: number
  truncated: boolean
}

export interface MeshJson {
  positions: Vec3[]
  triangles: [number, number, number][]
  face_of_triangle: string[]
}

export interface TypeRanking {
  mate_type: string
  probability: number
}

export interface HealthResponse {
  status: string
  model_hash: string | null
  type_model_hash: string | null
  parts: string[]
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail)
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const res = await fetch(`${base}${path}`, init)
  if (!res.ok) {
    let detail = res.statusText
    try {
      const body = await res.json()
      if (body && typeof body.detail === 'string') detail = body.detail
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(res.status, detail)
  }
  return res.json() as Promise<T>
}

export function createApi(base: string) {
  const post = (body: unknown): RequestInit => ({
    method: 'POST',
    headers: { 'Content-Type': 'application/json' },
    body: JSON.stringify(body),
  })
  return {
    health: () => request<HealthResponse>(base, '/api/health'),
    getPart: (id: string) => request<Record<string, unknown>>(base, `/api/parts/${id}`),
    getMesh: (id: string, resolution = 32) =>
      request<MeshJson>(base, `/api/parts/${id}/mesh?resolution=${resolution}`),
    suggest: (body: {
      part_a: string
      part_b: string
      face_a: string
      face_b: string
      k?: number
      merge_equivalent?: boolean
    }) => request<SuggestResponse>(base, '/api/suggest', post(body)),
    mateType: (body: {
      part_a: string
      part_b: string
      mcf_a: McfRefJson
      mcf_b: McfRefJson
    }) => request<{ types: TypeRanking[] }>(base, '/api/mate-type', post(body)),
  }
}

export type Api = ReturnType<typeof createApi>
