"""Command-line client for the denoising service.

The CLI is a thin HTTP client. By default it talks to the service
in-process (no server needs to run); ``--server URL`` points it at a
remote instance instead, and ``namf serve`` starts one.
"""

from __future__ import annotations

import base64
import sys
from pathlib import Path

import click
import httpx

from .pipeline import METHODS


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    # in-process transport: same request path as a live server, no socket
    from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _b64_file(path: str) -> str:
    return base64.b64encode(Path(path).read_bytes()).decode("ascii")


def _write_b64(b64: str, path: str) -> None:
    data = base64.b64decode(b64)
    if path.lower().endswith(".png"):
        from .image_io import decode_image, save_image

        save_image(decode_image(data), path)
    else:
        Path(path).write_bytes(data)


def _post(client: httpx.Client, endpoint: str, payload: dict) -> dict:
    resp = client.post(endpoint, json=payload)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        raise click.ClickException(f"{endpoint} failed ({resp.status_code}): {detail}")
    return resp.json()


def _density(ctx, param, value):
    if value is not None and not 0.0 <= value <= 1.0:
        raise click.BadParameter("density must be in [0,1]")
    return value


_in_file = click.Path(exists=True, dir_okay=False)


@click.group()
@click.option("--server", default=None, metavar="URL",
              help="Service URL; default runs the service in-process.")
@click.pass_context
def main(ctx, server):
    """Salt-and-pepper image restoration toolkit."""
    ctx.obj = server


@main.command()
@click.option("--input", "-i", "input_", required=True, type=_in_file)
@click.option("--density", "-d", required=True, type=float, callback=_density)
@click.option("--salt-fraction", default=0.5, type=float, show_default=True)
@click.option("--seed", default=0, type=int, show_default=True)
@click.option("--output", "-o", required=True, help="Noisy image path (.pgm or .png).")
@click.option("--mask-output", default=None, help="Ground-truth mask as a {0,255} image.")
@click.pass_obj
def inject(server, input_, density, salt_fraction, seed, output, mask_output):
    """Corrupt an image with seeded salt-and-pepper noise."""
    with _client(server) as client:
        body = _post(client, "/inject", {
            "image": _b64_file(input_), "density": density,
            "salt_fraction": salt_fraction, "seed": seed,
        })
    _write_b64(body["noisy"], output)
    if mask_output:
        _write_b64(body["mask"], mask_output)
    click.echo(f"corrupted fraction: {body['corrupted_fraction']:.4f}")


def _param_options(fn):
    opts = [
        click.option("--t", default=0.8, type=float, show_default=True,
                     help="Detection proportion threshold."),
        click.option("--w-max", default=7, type=int, show_default=True,
                     help="Detection window radius cap."),
        click.option("--w-step", default=1, type=int, show_default=True),
        click.option("--patch-radius", default=2, type=int, show_default=True),
        click.option("--search-radius", default=20, type=int, show_default=True),
        click.option("--beta0", default=4.5595, type=float, show_default=True),
        click.option("--beta1", default=6.0314, type=float, show_default=True),
        click.option("--beta2", default=2.2186, type=float, show_default=True),
        click.option("--kernel-a", default=0.0, type=float, show_default=True,
                     help="Gaussian patch-weight std; 0 = uniform."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _param_payload(kw: dict) -> dict:
    return {
        "detector": {"w_max": kw["w_max"], "w_step": kw["w_step"], "t": kw["t"]},
        "nlm": {
            "patch_radius": kw["patch_radius"], "search_radius": kw["search_radius"],
            "beta0": kw["beta0"], "beta1": kw["beta1"], "beta2": kw["beta2"],
            "kernel_a": kw["kernel_a"],
        },
    }


@main.command()
@click.option("--method", "-m", default="namf", type=click.Choice(METHODS), show_default=True)
@click.option("--input", "-i", "input_", required=True, type=_in_file)
@click.option("--output", "-o", required=True)
@click.option("--dump-mask", default=None, help="Write the detection mask as a {0,255} image.")
@_param_options
@click.pass_obj
def denoise(server, method, input_, output, dump_mask, **kw):
    """Restore a noisy image with the chosen method."""
    payload = {"image": _b64_file(input_), "method": method,
               "return_mask": dump_mask is not None, **_param_payload(kw)}
    with _client(server) as client:
        body = _post(client, "/denoise", payload)
    _write_b64(body["restored"], output)
    if dump_mask:
        if body.get("mask") is None:
            raise click.ClickException(f"method {method!r} produces no detection mask")
        _write_b64(body["mask"], dump_mask)
    click.echo(f"restored in {body['runtime_ms']:.0f} ms -> {output}")


@main.command()
@click.option("--reference", "-r", required=True, type=_in_file)
@click.option("--test", "-t", required=True, type=_in_file)
@click.option("--ssim-global", is_flag=True,
              help="Whole-image SSIM statistics instead of sliding windows.")
@click.pass_obj
def metrics(server, reference, test, ssim_global):
    """Print MSE / PSNR / SSIM for an image pair."""
    with _client(server) as client:
        body = _post(client, "/metrics", {
            "reference": _b64_file(reference), "test": _b64_file(test),
            "ssim_global": ssim_global,
        })
    psnr = "inf" if body["psnr_db"] is None else f"{body['psnr_db']:.4f}"
    click.echo(f"mse: {body['mse']:.4f}")
    click.echo(f"psnr_db: {psnr}")
    click.echo(f"ssim: {body['ssim']:.6f}")


def _parse_config(path: str) -> dict:
    """Flat key-value config: one `key = value` per line, `#` comments."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise click.ClickException(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key] = value.strip("\"'")
    return out


_SWEEP_KEYS = {
    "images": str, "densities": str, "methods": str, "seed": int,
    "salt_fraction": float, "output_csv": str, "record_runtime": str,
    "t": float, "w_max": int, "w_step": int, "patch_radius": int,
    "search_radius": int, "beta0": float, "beta1": float, "beta2": float,
    "kernel_a": float,
}


@main.command()
@click.option("--config", "-c", default=None, type=_in_file,
              help="Flat key-value config file; flags override its keys.")
@click.option("--images", default=None, help="Comma-separated image paths.")
@click.option("--densities", default=None, help="Comma-separated noise densities.")
@click.option("--methods", default=None, help=f"Comma-separated subset of {METHODS}.")
@click.option("--seed", default=None, type=int)
@click.option("--salt-fraction", default=None, type=float)
@click.option("--output-csv", default=None)
@click.option("--no-runtime", is_flag=True, help="Write 0.0 runtimes (byte-stable CSV).")
@click.pass_obj
def sweep(server, config, images, densities, methods, seed, salt_fraction,
          output_csv, no_runtime):
    """Benchmark methods across noise densities; writes a CSV."""
    cfg = _parse_config(config) if config else {}
    for key, conv in _SWEEP_KEYS.items():
        if key in cfg:
            cfg[key] = conv(cfg[key])
    if images is not None:
        cfg["images"] = images
    if densities is not None:
        cfg["densities"] = densities
    if methods is not None:
        cfg["methods"] = methods
    if seed is not None:
        cfg["seed"] = seed
    if salt_fraction is not None:
        cfg["salt_fraction"] = salt_fraction
    if output_csv is not None:
        cfg["output_csv"] = output_csv
    if no_runtime:
        cfg["record_runtime"] = "false"

    if not cfg.get("images"):
        raise click.UsageError("no input images (use --images or the config file)")
    if not cfg.get("output_csv"):
        raise click.UsageError("no output CSV path (use --output-csv or the config file)")

    paths = [p.strip() for p in str(cfg["images"]).split(",") if p.strip()]
    for p in paths:
        if not Path(p).is_file():
            raise click.UsageError(f"image not found: {p}")

    payload: dict = {
        "images": [{"id": Path(p).stem, "image": _b64_file(p)} for p in paths],
        "seed": int(cfg.get("seed", 0)),
        "salt_fraction": float(cfg.get("salt_fraction", 0.5)),
        "record_runtime": str(cfg.get("record_runtime", "true")).lower() != "false",
        "detector": {"w_max": int(cfg.get("w_max", 7)), "w_step": int(cfg.get("w_step", 1)),
                     "t": float(cfg.get("t", 0.8))},
        "nlm": {"patch_radius": int(cfg.get("patch_radius", 2)),
                "search_radius": int(cfg.get("search_radius", 20)),
                "beta0": float(cfg.get("beta0", 4.5595)),
                "beta1": float(cfg.get("beta1", 6.0314)),
                "beta2": float(cfg.get("beta2", 2.2186)),
                "kernel_a": float(cfg.get("kernel_a", 0.0))},
    }
    if "densities" in cfg:
        payload["densities"] = [float(x) for x in str(cfg["densities"]).split(",") if x.strip()]
    if "methods" in cfg:
        payload["methods"] = [m.strip() for m in str(cfg["methods"]).split(",") if m.strip()]

    with _client(server) as client:
        body = _post(client, "/sweep", payload)
    Path(cfg["output_csv"]).write_text(body["csv"])
    failed = [r for r in body["rows"] if r.get("error")]
    click.echo(f"{len(body['rows'])} rows -> {cfg['output_csv']}"
               + (f" ({len(failed)} failed)" if failed else ""))
    if failed:
        sys.exit(1)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, type=int, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
