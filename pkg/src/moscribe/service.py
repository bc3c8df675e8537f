"""HTTP service exposing the annotation and editing workflows.

Every endpoint is a thin wrapper over the library call on the same state,
so service responses match library results exactly. Annotation mutations
persist through the single-writer store.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException, Query, Request
from fastapi.responses import JSONResponse

from .clients import BackendError, StubT2MBackend, load_stub_fixtures
from .describer import DEFAULT_THRESHOLDS
from .features import encode_features
from .fixtures import demo_workspace
from .motion import canonicalize
from .motion_io import load_motion, motion_to_json
from .pipeline import (
    EditRequest,
    GeneratorRequest,
    PipelineError,
    edit_motion,
    describe_motion,
    generate_motion,
    organize_paragraph,
)
from .segmentation import segment
from .skeleton import Skeleton
from .store import AnnotationStore, build_corpus, deserialize_annotations, suggest_sentences
from .textgen import BPMSDList


class ServiceState:
    """Motions, annotations, and backends behind the HTTP API."""

    def __init__(self, store: AnnotationStore, skeleton: Skeleton | None = None,
                 snippet_duration_s=0.5, paragraph_mode="fallback", completion_client=None,
                 thresholds=DEFAULT_THRESHOLDS):
        self.store = store
        self.skeleton = skeleton or Skeleton()
        self.snippet_duration_s = snippet_duration_s
        self.paragraph_mode = paragraph_mode
        self.completion_client = completion_client
        self.thresholds = thresholds
        self.motions = {}
        self.backends = {}

    @staticmethod
    def from_workspace(directory, **kwargs):
        directory = Path(directory)
        if not (directory / "annotations").exists():
            demo_workspace(directory)
        state = ServiceState(AnnotationStore(directory / "annotations"), **kwargs)
        for path in sorted((directory / "motions").glob("*.mofg")):
            motion, skeleton = load_motion(path)
            state.add_motion(canonicalize(motion, skeleton))
        registry = directory / "stub_fixtures.json"
        if registry.exists():
            state.backends["stub"] = StubT2MBackend(load_stub_fixtures(registry))
        return state

    def add_motion(self, motion):
        self.motions[motion.id] = motion

    def motion(self, motion_id):
        if motion_id not in self.motions:
            raise HTTPException(status_code=404, detail=f"unknown motion {motion_id!r}")
        return self.motions[motion_id]

    def backend(self, backend_id):
        if backend_id not in self.backends:
            raise HTTPException(status_code=400, detail=f"unknown backend {backend_id!r}")
        return self.backends[backend_id]

    def snippet_texts(self, motion_id):
        """Stored snippet texts, generated and persisted on first access."""
        stored = self.store.bpmsd().get(motion_id)
        motion = self.motion(motion_id)
        snippets = segment(motion, self.snippet_duration_s)
        if stored is None or len(stored) != len(snippets):
            texts = describe_motion(
                motion, self.skeleton, self.thresholds,
                snippet_duration_s=self.snippet_duration_s,
            )
            self.store.set_bpmsd(motion_id, list(texts.texts))
            stored = list(texts.texts)
        return snippets, stored


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="moscribe service")

    @app.exception_handler(PipelineError)
    async def _pipeline_error(request: Request, exc: PipelineError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(BackendError)
    async def _backend_error(request: Request, exc: BackendError):
        return JSONResponse(status_code=502, content={"detail": str(exc)})

    @app.get("/motions")
    def list_motions():
        return {"ids": sorted(state.motions)}

    @app.get("/motions/{motion_id}")
    def get_motion(motion_id: str):
        motion = state.motion(motion_id)
        features = encode_features(motion, state.skeleton)
        return {
            "motion": motion_to_json(motion),
            "features": features.data.tolist(),
            "fps": motion.fps,
        }

    @app.get("/motions/{motion_id}/snippets")
    def get_snippets(motion_id: str):
        snippets, texts = state.snippet_texts(motion_id)
        return {
            "motion_id": motion_id,
            "snippets": [
                {
                    "index": s.index,
                    "start": s.frame_range[0],
                    "end": s.frame_range[1],
                    "text": texts[s.index],
                }
                for s in snippets
            ],
        }

    @app.put("/motions/{motion_id}/snippets/{index}")
    async def put_snippet(motion_id: str, index: int, request: Request):
        snippets, texts = state.snippet_texts(motion_id)
        if not 0 <= index < len(snippets):
            raise HTTPException(status_code=400, detail=f"snippet index {index} out of range")
        body = (await request.body()).decode("utf-8")
        try:
            # Accept either a raw text body or a {"text": ...} JSON object.
            parsed = json.loads(body)
            text = parsed["text"] if isinstance(parsed, dict) else str(parsed)
        except (json.JSONDecodeError, KeyError):
            text = body
        state.store.set_snippet_text(motion_id, index, text)
        return {"motion_id": motion_id, "index": index, "text": text}

    @app.get("/corpus/suggest")
    def corpus_suggest(q: str = Query(...), k: int = Query(5)):
        corpus = build_corpus(deserialize_annotations(state.store.bpmsd_path.read_bytes()))
        ranked = suggest_sentences(corpus, q, k)
        return {
            "suggestions": [
                {"sentence": e.sentence, "score": score, "frequency": e.frequency}
                for score, e in ranked
            ]
        }

    @app.post("/paragraph/{motion_id}")
    def post_paragraph(motion_id: str):
        _, texts = state.snippet_texts(motion_id)
        stored = state.store.bpmp().get(motion_id, [])
        paragraph = organize_paragraph(
            BPMSDList(motion_id, texts),
            mode=state.paragraph_mode,
            client=state.completion_client,
            variant=len(stored),
            seed=len(stored),
        )
        state.store.set_bpmp(motion_id, list(stored) + [paragraph.text])
        return {"motion_id": motion_id, "text": paragraph.text, "variant": paragraph.variant}

    @app.post("/generate")
    def post_generate(payload: dict = Body(...)):
        request = GeneratorRequest(
            coarse_text=payload.get("coarse_text", ""),
            detailed_text=payload.get("detailed_text"),
            target_length=payload.get("target_length"),
        )
        backend = state.backend(payload.get("backend_id", "stub"))
        motion = generate_motion(request, backend, state.skeleton)
        return {
            "motion": motion_to_json(motion),
            "features": encode_features(motion, state.skeleton).data.tolist(),
        }

    @app.post("/edit")
    def post_edit(payload: dict = Body(...)):
        request = EditRequest(
            coarse_text=payload.get("coarse_text", ""),
            edits=tuple((e["index"], e["text"]) for e in payload.get("edits", [])),
            backend_id=payload.get("backend_id", "stub"),
            target_length=payload.get("target_length"),
        )
        if not request.coarse_text:
            raise HTTPException(status_code=400, detail="coarse_text must be non-empty")
        backend = state.backend(request.backend_id)
        initial_id = payload.get("initial_motion_id")
        initial = state.motions.get(initial_id) if initial_id else None
        result = edit_motion(
            request, backend, state.skeleton, initial=initial,
            snippet_duration_s=state.snippet_duration_s, thresholds=state.thresholds,
        )
        return {
            "initial": motion_to_json(result.initial),
            "edited": motion_to_json(result.edited),
            "initial_features": encode_features(result.initial, state.skeleton).data.tolist(),
            "edited_features": encode_features(result.edited, state.skeleton).data.tolist(),
            "texts_before": list(result.texts_before.texts),
            "texts_after": list(result.texts_after.texts),
        }

    return app


def serve(workspace, host="127.0.0.1", port=8777, **state_kwargs):
    """Run the service over a workspace directory (blocking)."""
    import uvicorn

    state = ServiceState.from_workspace(workspace, **state_kwargs)
    uvicorn.run(create_app(state), host=host, port=port)
