"""Pydantic request/response models for the HTTP API.

Field names follow the wire format (camelCase).  Survey payloads served
to respondents never carry the sample kind.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class NormalizeRequest(BaseModel):
    text: str


class NormalizeResponse(BaseModel):
    text: str


class G2pRequest(BaseModel):
    text: str


class G2pResponse(BaseModel):
    words: list[list[str]]


class EncodeRequest(BaseModel):
    text: str


class EncodeResponse(BaseModel):
    ids: list[int]


class LossRequest(BaseModel):
    predicted: list[list[float]]
    target: list[list[float]]
    kind: str = Field(pattern="^(mel|lin)$")


class LossResponse(BaseModel):
    kind: str
    loss: float


class SurveyRequest(BaseModel):
    respondentId: str | None = None
    seed: int | None = None


class SurveySample(BaseModel):
    sampleId: str
    audioUrl: str


class SurveyResponse(BaseModel):
    surveyId: str
    token: str
    samples: list[SurveySample]


class RatingRequest(BaseModel):
    sampleId: str
    axis: str = Field(pattern="^(naturalness|intelligibility)$")
    score: int


class RatingAck(BaseModel):
    status: str
    sampleId: str
    axis: str
    score: int


class ReportCell(BaseModel):
    kind: str
    axis: str
    count: int
    mean: float | None
    rendered: str


class ReportResponse(BaseModel):
    cells: list[ReportCell]
    table: str
