"""HTTP service exposing the restoration pipeline.

Images travel as base64-encoded PGM (or PNG) bytes inside JSON bodies, so
the service is self-contained: clients never need filesystem access on the
server. The CLI is a thin client of these endpoints.
"""

from __future__ import annotations

import base64
import binascii
import math
import time

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .detector import DetectorParams
from .image_io import ImageFormatError, decode_image, encode_image
from .metrics import mse as compute_mse
from .metrics import psnr as compute_psnr
from .metrics import ssim as compute_ssim
from .nlm import NlmParams
from .noise import NoiseSpec, inject_sap
from .pipeline import METHODS, denoise
from .sweep import RunConfig, SweepRow, rows_to_csv, run_sweep

app = FastAPI(title="namf", version=__version__,
              description="Salt-and-pepper denoising service")


class DetectorOptions(BaseModel):
    w_max: int = Field(default=7, ge=1)
    w_step: int = Field(default=1, ge=1)
    t: float = Field(default=0.8, ge=0.0, le=1.0)

    def to_params(self) -> DetectorParams:
        return DetectorParams(w_max=self.w_max, w_step=self.w_step, t=self.t)


class NlmOptions(BaseModel):
    patch_radius: int = Field(default=2, ge=1)
    search_radius: int = Field(default=20, ge=1)
    beta0: float = 4.5595
    beta1: float = 6.0314
    beta2: float = 2.2186
    kernel_a: float = Field(default=0.0, ge=0.0)

    def to_params(self) -> NlmParams:
        return NlmParams(patch_radius=self.patch_radius, search_radius=self.search_radius,
                         beta0=self.beta0, beta1=self.beta1, beta2=self.beta2,
                         kernel_a=self.kernel_a)


def _decode(b64: str, what: str = "image"):
    try:
        return decode_image(base64.b64decode(b64, validate=True))
    except (binascii.Error, ImageFormatError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=f"invalid {what}: {exc}") from exc


def _encode(img) -> str:
    return base64.b64encode(encode_image(img, "pgm")).decode("ascii")


class InjectRequest(BaseModel):
    image: str = Field(description="base64 PGM/PNG bytes")
    density: float = Field(ge=0.0, le=1.0)
    salt_fraction: float = Field(default=0.5, ge=0.0, le=1.0)
    seed: int = 0


class InjectResponse(BaseModel):
    noisy: str
    mask: str = Field(description="corrupted pixels as a {0,255} PGM")
    corrupted_fraction: float


@app.post("/inject", response_model=InjectResponse)
def inject(req: InjectRequest) -> InjectResponse:
    img = _decode(req.image)
    noisy, truth = inject_sap(img, NoiseSpec(req.density, req.salt_fraction, req.seed))
    return InjectResponse(
        noisy=_encode(noisy),
        mask=_encode(truth.astype("uint8") * 255),
        corrupted_fraction=float(truth.mean()),
    )


class DenoiseRequest(BaseModel):
    image: str
    method: str = "namf"
    detector: DetectorOptions = DetectorOptions()
    nlm: NlmOptions = NlmOptions()
    return_mask: bool = False


class DenoiseResponse(BaseModel):
    restored: str
    mask: str | None = None
    runtime_ms: float


@app.post("/denoise", response_model=DenoiseResponse)
def denoise_endpoint(req: DenoiseRequest) -> DenoiseResponse:
    if req.method not in METHODS:
        raise HTTPException(status_code=400,
                            detail=f"unknown method {req.method!r}, expected one of {METHODS}")
    img = _decode(req.image)
    start = time.perf_counter()
    restored, mask = denoise(img, req.method, req.detector.to_params(), req.nlm.to_params())
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    mask_b64 = None
    if req.return_mask and mask is not None:
        mask_b64 = _encode(mask.astype("uint8") * 255)
    return DenoiseResponse(restored=_encode(restored), mask=mask_b64, runtime_ms=elapsed_ms)


class MetricsRequest(BaseModel):
    reference: str
    test: str
    ssim_global: bool = False


class MetricsResponse(BaseModel):
    mse: float
    psnr_db: float | None = Field(description="null means infinite (identical images)")
    ssim: float


@app.post("/metrics", response_model=MetricsResponse)
def metrics_endpoint(req: MetricsRequest) -> MetricsResponse:
    ref = _decode(req.reference, "reference")
    test = _decode(req.test, "test")
    try:
        p = compute_psnr(ref, test)
        return MetricsResponse(
            mse=compute_mse(ref, test),
            psnr_db=None if math.isinf(p) else p,
            ssim=compute_ssim(ref, test, global_stats=req.ssim_global),
        )
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


class SweepImage(BaseModel):
    id: str
    image: str


class SweepRequest(BaseModel):
    images: list[SweepImage] = Field(min_length=1)
    densities: list[float] = Field(default=[round(0.1 * k, 1) for k in range(1, 10)])
    methods: list[str] = Field(default=list(METHODS))
    seed: int = 0
    salt_fraction: float = Field(default=0.5, ge=0.0, le=1.0)
    detector: DetectorOptions = DetectorOptions()
    nlm: NlmOptions = NlmOptions()
    record_runtime: bool = True


class SweepRowModel(BaseModel):
    image: str
    method: str
    alpha: float
    psnr_db: float | None
    ssim: float | None
    runtime_ms: float
    seed: int
    error: str | None = None


class SweepResponse(BaseModel):
    rows: list[SweepRowModel]
    csv: str


def _row_model(row: SweepRow) -> SweepRowModel:
    return SweepRowModel(
        image=row.image, method=row.method, alpha=row.alpha,
        psnr_db=None if not math.isfinite(row.psnr_db) else row.psnr_db,
        ssim=None if not math.isfinite(row.ssim) else row.ssim,
        runtime_ms=row.runtime_ms, seed=row.seed, error=row.error,
    )


@app.post("/sweep", response_model=SweepResponse)
def sweep_endpoint(req: SweepRequest) -> SweepResponse:
    images = {item.id: _decode(item.image, f"image {item.id}") for item in req.images}
    try:
        cfg = RunConfig(
            images=images,
            densities=tuple(req.densities),
            methods=tuple(req.methods),
            seed=req.seed,
            salt_fraction=req.salt_fraction,
            detector_params=req.detector.to_params(),
            nlm_params=req.nlm.to_params(),
            record_runtime=req.record_runtime,
        )
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    rows = run_sweep(cfg)
    return SweepResponse(rows=[_row_model(r) for r in rows], csv=rows_to_csv(rows, cfg))


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}
