"""Pydantic request/response models for the HTTP API.

Image payloads travel as base64 PPM bytes inside JSON; index files travel
as plain UTF-8 text since the on-disk format is already textual.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class ImageUpload(BaseModel):
    image_id: str = Field(min_length=1)
    content_b64: str


class BuildIndexRequest(BaseModel):
    images: list[ImageUpload] = Field(min_length=1)
    k: int = Field(default=3, ge=1)
    seed: int = Field(default=0, ge=0)


class SkippedImage(BaseModel):
    image_id: str
    reason: str


class IndexEntrySummary(BaseModel):
    image_id: str
    block_count: int


class IndexSummary(BaseModel):
    version: int
    k: int
    dims: int
    entry_count: int
    entries: list[IndexEntrySummary]


class BuildIndexResponse(BaseModel):
    indexed: int
    skipped: list[SkippedImage]
    index: IndexSummary


class LoadIndexRequest(BaseModel):
    content: str


class QueryRequest(BaseModel):
    content_b64: str
    top: int | None = Field(default=None, ge=1)
    threshold: float | None = Field(default=None, ge=0)
    seed: int = Field(default=0, ge=0)


class Match(BaseModel):
    image_id: str
    distance: float


class QueryResponse(BaseModel):
    matches: list[Match]


class FeaturesRequest(BaseModel):
    content_b64: str


class FeatureRow(BaseModel):
    block: int
    h: float
    s: float
    v: float
    hl: float
    lh: float
    hh: float


class FeaturesResponse(BaseModel):
    block_rows: int
    block_cols: int
    features: list[FeatureRow]


class HealthResponse(BaseModel):
    status: str
    version: str
