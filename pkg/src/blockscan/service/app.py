"""HTTP face of the retrieval engine.

The service keeps one index in memory (built from uploads or loaded from
an index file) and answers query/inspect requests against it from any
number of clients.  All handlers delegate to the core package; the index
reference is swapped atomically under a lock.
"""

from __future__ import annotations

import base64
import binascii
import threading

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse

from .. import __version__
from ..features import FEATURE_DIMS, feature_matrix
from ..imaging import decode_ppm, partition_blocks
from ..pipeline import image_signature, signature_from_ppm
from ..retrieval import filter_by_threshold, rank
from ..signature import SignatureIndex, load_index, save_index
from .schemas import (
    BuildIndexRequest,
    BuildIndexResponse,
    FeatureRow,
    FeaturesRequest,
    FeaturesResponse,
    HealthResponse,
    IndexEntrySummary,
    IndexSummary,
    LoadIndexRequest,
    Match,
    QueryRequest,
    QueryResponse,
    SkippedImage,
)


def _summary(index: SignatureIndex) -> IndexSummary:
    return IndexSummary(
        version=index.version,
        k=index.k,
        dims=index.dims,
        entry_count=len(index.entries),
        entries=[
            IndexEntrySummary(image_id=e.image_id, block_count=e.block_count)
            for e in index.entries
        ],
    )


def _decode_b64(payload: str) -> bytes:
    try:
        return base64.b64decode(payload, validate=True)
    except binascii.Error as exc:
        raise HTTPException(status_code=400, detail=f"invalid base64 payload: {exc}")


def create_app() -> FastAPI:
    app = FastAPI(title="blockscan", version=__version__)
    app.state.index = None
    app.state.lock = threading.Lock()

    def _require_index() -> SignatureIndex:
        index = app.state.index
        if index is None:
            raise HTTPException(
                status_code=404,
                detail="no index loaded; POST /index/build or /index/load first",
            )
        return index

    def _install(index: SignatureIndex) -> None:
        with app.state.lock:
            app.state.index = index

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/index/build", response_model=BuildIndexResponse)
    def index_build(request: BuildIndexRequest) -> BuildIndexResponse:
        ids = [upload.image_id for upload in request.images]
        if len(set(ids)) != len(ids):
            raise HTTPException(status_code=400, detail="duplicate image_id in upload")
        entries = []
        skipped: list[SkippedImage] = []
        for upload in sorted(request.images, key=lambda u: u.image_id):
            try:
                data = base64.b64decode(upload.content_b64, validate=True)
                image = decode_ppm(data)
                entries.append(image_signature(image, upload.image_id, k=request.k, seed=request.seed))
            except (binascii.Error, ValueError) as exc:
                skipped.append(SkippedImage(image_id=upload.image_id, reason=str(exc)))
        if not entries:
            raise HTTPException(status_code=400, detail="no image could be indexed")
        index = SignatureIndex(k=request.k, dims=FEATURE_DIMS, entries=entries)
        _install(index)
        return BuildIndexResponse(indexed=len(entries), skipped=skipped, index=_summary(index))

    @app.post("/index/load", response_model=IndexSummary)
    def index_load(request: LoadIndexRequest) -> IndexSummary:
        try:
            index = load_index(request.content.encode("utf-8"))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=f"invalid index file: {exc}")
        _install(index)
        return _summary(index)

    @app.get("/index", response_model=IndexSummary)
    def index_summary() -> IndexSummary:
        return _summary(_require_index())

    @app.get("/index/file", response_class=PlainTextResponse)
    def index_file() -> PlainTextResponse:
        return PlainTextResponse(save_index(_require_index()).decode("utf-8"))

    @app.post("/query", response_model=QueryResponse)
    def query(request: QueryRequest) -> QueryResponse:
        index = _require_index()
        data = _decode_b64(request.content_b64)
        try:
            signature = signature_from_ppm(data, "query", k=index.k, seed=request.seed)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=f"cannot compute query signature: {exc}")
        matches = rank(signature, index)
        if request.threshold is not None:
            matches = filter_by_threshold(matches, request.threshold)
        if request.top is not None:
            matches = matches[: request.top]
        return QueryResponse(
            matches=[Match(image_id=m.image_id, distance=m.distance) for m in matches]
        )

    @app.post("/features", response_model=FeaturesResponse)
    def features(request: FeaturesRequest) -> FeaturesResponse:
        data = _decode_b64(request.content_b64)
        try:
            grid = partition_blocks(decode_ppm(data))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=f"cannot decode image: {exc}")
        rows = [
            FeatureRow(block=i, h=fv.h, s=fv.s, v=fv.v, hl=fv.hl, lh=fv.lh, hh=fv.hh)
            for i, fv in enumerate(feature_matrix(grid))
        ]
        return FeaturesResponse(block_rows=grid.block_rows, block_cols=grid.block_cols, features=rows)

    return app


app = create_app()
