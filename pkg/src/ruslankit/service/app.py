"""FastAPI service wrapping the core package.

Survey endpoints implement the blind MOS protocol; the text endpoints
expose normalization, transcription and the loss metrics for clients
that do not import the package directly.

Data directory layout:

    pool.json       sample inventory [{sampleId, audioPath, kind}, ...]
    ratings.jsonl   append-only rating log (created on first rating)
    acronyms.tsv    optional acronym lexicon
    <audio files>   referenced by pool audioPath, relative to the dir
"""

from __future__ import annotations

import secrets
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Header, HTTPException
from fastapi.responses import FileResponse, JSONResponse, PlainTextResponse

from .. import corpus, features, mos, phonemics, textnorm
from ..charset import Charset
from ..errors import RuslanKitError, ScoreOutOfRange, UnknownSample
from . import schemas

RATINGS_LOG = "ratings.jsonl"
POOL_FILE = "pool.json"
ACRONYMS_FILE = "acronyms.tsv"


class _SurveySession:
    def __init__(self, survey_id: str, respondent_id: str, order):
        self.survey_id = survey_id
        self.respondent_id = respondent_id
        self.order = order


def create_app(data_dir: str | Path, admin_token: str | None = None,
               enforce_paper_counts: bool = True) -> FastAPI:
    data_dir = Path(data_dir)
    pool = mos.SamplePool.from_file(data_dir / POOL_FILE)
    store = mos.RatingStore(data_dir / RATINGS_LOG, pool)
    charset = Charset.default()
    lexicon_path = data_dir / ACRONYMS_FILE
    lexicon = textnorm.AcronymLexicon.from_file(lexicon_path) \
        if lexicon_path.exists() else textnorm.AcronymLexicon.empty()

    app = FastAPI(title="ruslankit service")
    app.state.pool = pool
    app.state.store = store
    app.state.admin_token = admin_token or secrets.token_urlsafe(16)
    app.state.sessions = {}  # token -> _SurveySession

    @app.exception_handler(RuslanKitError)
    async def _data_error(_, exc: RuslanKitError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/normalize", response_model=schemas.NormalizeResponse)
    def normalize(req: schemas.NormalizeRequest):
        return schemas.NormalizeResponse(
            text=textnorm.normalize(req.text, lexicon, charset))

    @app.post("/g2p", response_model=schemas.G2pResponse)
    def g2p(req: schemas.G2pRequest):
        result = phonemics.transcribe(req.text, charset)
        return schemas.G2pResponse(words=[list(w) for w in result.words])

    @app.post("/encode", response_model=schemas.EncodeResponse)
    def encode(req: schemas.EncodeRequest):
        return schemas.EncodeResponse(ids=corpus.encode_text(req.text, charset))

    @app.post("/loss", response_model=schemas.LossResponse)
    def loss(req: schemas.LossRequest):
        predicted = np.asarray(req.predicted, dtype=np.float64)
        target = np.asarray(req.target, dtype=np.float64)
        fn = features.loss_mel if req.kind == "mel" else features.loss_lin
        return schemas.LossResponse(kind=req.kind, loss=fn(predicted, target))

    @app.post("/surveys", response_model=schemas.SurveyResponse)
    def create_survey(req: schemas.SurveyRequest):
        seed = req.seed if req.seed is not None else secrets.randbits(32)
        respondent = req.respondentId or f"resp-{secrets.token_hex(4)}"
        order = mos.create_survey(pool, respondent, seed,
                                  enforce_paper_counts=enforce_paper_counts)
        token = secrets.token_urlsafe(16)
        survey_id = f"survey-{secrets.token_hex(6)}"
        app.state.sessions[token] = _SurveySession(survey_id, respondent, order)
        samples = [schemas.SurveySample(sampleId=e.sample_id,
                                        audioUrl=f"/audio/{e.sample_id}")
                   for e in order]
        return schemas.SurveyResponse(surveyId=survey_id, token=token, samples=samples)

    @app.get("/audio/{sample_id}")
    def audio(sample_id: str):
        for entry in pool.entries:
            if entry.sample_id == sample_id:
                path = data_dir / entry.audio_path
                if not path.is_file():
                    raise HTTPException(status_code=404, detail="audio file missing")
                return FileResponse(path, media_type="audio/wav")
        raise HTTPException(status_code=404, detail="unknown sample")

    @app.post("/ratings", response_model=schemas.RatingAck)
    def submit_rating(req: schemas.RatingRequest,
                      authorization: str | None = Header(default=None)):
        session = _session_for(app, authorization)
        try:
            rating = mos.submit_rating(store, session.respondent_id,
                                       req.sampleId, req.axis, req.score)
        except UnknownSample as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        except ScoreOutOfRange as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return schemas.RatingAck(status="ok", sampleId=rating.sample_id,
                                 axis=rating.axis, score=rating.score)

    @app.get("/report", response_model=schemas.ReportResponse)
    def report(x_admin_token: str | None = Header(default=None)):
        if x_admin_token != app.state.admin_token:
            raise HTTPException(status_code=403, detail="admin token required")
        result = mos.aggregate(store.ratings(), pool)
        cells = [schemas.ReportCell(**c) for c in result.as_dict()["cells"]]
        return schemas.ReportResponse(cells=cells, table=result.render_table())

    @app.get("/report/table", response_class=PlainTextResponse)
    def report_table(x_admin_token: str | None = Header(default=None)):
        if x_admin_token != app.state.admin_token:
            raise HTTPException(status_code=403, detail="admin token required")
        return mos.aggregate(store.ratings(), pool).render_table()

    return app


def _session_for(app: FastAPI, authorization: str | None) -> _SurveySession:
    if not authorization or not authorization.startswith("Bearer "):
        raise HTTPException(status_code=401, detail="Bearer token required")
    token = authorization.removeprefix("Bearer ").strip()
    session = app.state.sessions.get(token)
    if session is None:
        raise HTTPException(status_code=401, detail="unknown survey token")
    return session
