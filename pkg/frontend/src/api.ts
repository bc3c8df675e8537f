import type {
  EditResponse,
  FetchLike,
  MotionResponse,
  SnippetsResponse,
  Suggestion,
} from "./types";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

/** Thin typed client over the annotation/editing service. */
export class ServiceClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  listMotions(): Promise<{ ids: string[] }> {
    return this.request("/motions");
  }

  getMotion(id: string): Promise<MotionResponse> {
    return this.request(`/motions/${encodeURIComponent(id)}`);
  }

  getSnippets(id: string): Promise<SnippetsResponse> {
    return this.request(`/motions/${encodeURIComponent(id)}/snippets`);
  }

  putSnippetText(id: string, index: number, text: string): Promise<unknown> {
    return this.request(`/motions/${encodeURIComponent(id)}/snippets/${index}`, {
      method: "PUT",
      body: text,
    });
  }

  suggest(query: string, k = 5): Promise<{ suggestions: Suggestion[] }> {
    const q = encodeURIComponent(query);
    return this.request(`/corpus/suggest?q=${q}&k=${k}`);
  }

  edit(
    coarseText: string,
    edits: { index: number; text: string }[],
    initialMotionId?: string,
  ): Promise<EditResponse> {
    return this.request("/edit", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        coarse_text: coarseText,
        edits,
        initial_motion_id: initialMotionId,
      }),
    });
  }
}
