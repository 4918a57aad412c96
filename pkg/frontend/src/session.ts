// UI session state machine. Suggestions exist only while both faces are
// selected; changing a selection clears them; responses that arrive for
// a superseded selection are discarded; the preview transform is always
// the chosen suggestion's transform, verbatim from the server.

import type { Api, Suggestion, TypeRanking } from './api'

export type Slot = 'a' | 'b'

export interface SessionState {
  partA: string | null
  partB: string | null
  faceA: string | null
  faceB: string | null
  suggestions: Suggestion[]
  chosenIndex: number | null
  typeRanking: TypeRanking[] | null
  candidateCount: number
  truncated: boolean
  pending: boolean
  error: string | null
}

export class UiSession {
  private state: SessionState = {
    partA: null, partB: null,
    faceA: null, faceB: null,
    suggestions: [], chosenIndex: null,
    typeRanking: null,
    candidateCount: 0, truncated: false,
    pending: false, error: null,
  }
  private requestToken = 0
  private listeners: Array<(s: SessionState) => void> = []

  constructor(
    private api: Api,
    private suggestionCount = 6,
    private mergeEquivalent = true,
  ) {}

  onChange(listener: (s: SessionState) => void): void {
    this.listeners.push(listener)
  }

  get current(): SessionState {
    return this.state
  }

  private update(patch: Partial<SessionState>): void {
    this.state = { ...this.state, ...patch }
    for (const fn of this.listeners) fn(this.state)
  }

  loadParts(partA: string, partB: string): void {
    this.update({
      partA, partB,
      faceA: null, faceB: null,
      suggestions: [], chosenIndex: null, typeRanking: null,
      candidateCount: 0, truncated: false, error: null,
    })
  }

  /** Re-click replaces the slot's selection; null clears it. Any change
   *  invalidates suggestions and in-flight requests. */
  selectFace(slot: Slot, faceId: string | null): void {
    this.requestToken += 1
    this.update({
      [slot === 'a' ? 'faceA' : 'faceB']: faceId,
      suggestions: [], chosenIndex: null, typeRanking: null,
      candidateCount: 0, truncated: false, error: null,
    } as Partial<SessionState>)
  }

  get bothFacesSelected(): boolean {
    return this.state.faceA !== null && this.state.faceB !== null
  }

  async requestSuggestions(): Promise<void> {
    const { partA, partB, faceA, faceB } = this.state
    if (!partA || !partB || !faceA || !faceB) return
    const token = ++this.requestToken
    this.update({ pending: true, error: null })
    try {
      const res = await this.api.suggest({
        part_a: partA, part_b: partB,
        face_a: faceA, face_b: faceB,
        k: this.suggestionCount,
        merge_equivalent: this.mergeEquivalent,
      })
      if (token !== this.requestToken) return // superseded selection
      this.update({
        suggestions: res.suggestions,
        candidateCount: res.candidate_count,
        truncated: res.truncated,
        chosenIndex: res.suggestions.length ? 0 : null,
        pending: false,
      })
    } catch (err) {
      if (token !== this.requestToken) return
      this.update({ pending: false, error: err instanceof Error ? err.message : String(err) })
    }
  }

  /** Hotkeys 1..6 land here with index 0..5. */
  chooseSuggestion(index: number): void {
    if (index < 0 || index >= this.state.suggestions.length) return
    this.update({ chosenIndex: index, typeRanking: null })
  }

  get chosenSuggestion(): Suggestion | null {
    const { chosenIndex, suggestions } = this.state
    return chosenIndex === null ? null : suggestions[chosenIndex]
  }

  /** Preview transform for part b: exactly the server's matrix. */
  get previewTransform(): number[] | null {
    return this.chosenSuggestion?.transform_b ?? null
  }

  async confirmChosen(): Promise<TypeRanking[] | null> {
    const chosen = this.chosenSuggestion
    const { partA, partB } = this.state
    if (!chosen || !partA || !partB) return null
    const token = this.requestToken
    try {
      const res = await this.api.mateType({
        part_a: partA, part_b: partB,
        mcf_a: chosen.mcf_a, mcf_b: chosen.mcf_b,
      })
      if (token !== this.requestToken) return null
      this.update({ typeRanking: res.types })
      return res.types
    } catch (err) {
      if (token === this.requestToken) {
        this.update({ error: err instanceof Error ? err.message : String(err) })
      }
      return null
    }
  }
}
