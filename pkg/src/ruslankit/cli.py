"""Single entry-point command line tool.

Exit codes are a scriptability contract: 0 success, 1 validation
findings, 2 usage error, 3 data error, 4 internal error.  Data goes to
stdout, diagnostics to stderr; `--json` variants emit one well-formed
document with a schemaVersion field.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import corpus as corpus_mod
from . import features as features_mod
from . import neural, phonemics, rslf, textnorm, vocoder
from .audio import read_wav, write_wav
from .charset import Charset
from .errors import RuslanKitError

SCHEMA_VERSION = 1
GRAD_TOLERANCE = 1e-4


def _resolve(path: str | None, root: Path | None) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    if root is not None and not p.is_absolute():
        return root / p
    return p


def _load_lexicon(path: Path | None) -> textnorm.AcronymLexicon:
    if path is None:
        return textnorm.AcronymLexicon.empty()
    return textnorm.AcronymLexicon.from_file(path)


def _load_charset(path: Path | None) -> Charset:
    if path is None:
        return Charset.default()
    return Charset.from_file(path)


@click.group()
@click.option("--root", type=click.Path(), default=None,
              help="Base directory for relative paths (default: $RUSLAN_DATA or cwd).")
@click.pass_context
def cli(ctx, root):
    """Corpus tooling: normalization, transcription, statistics, features,
    copy-synthesis, loss metrics, gradient checks, and the MOS service."""
    if root is None:
        root = os.environ.get("RUSLAN_DATA")
    ctx.obj = Path(root) if root else None


@cli.command()
@click.option("--in", "in_file", required=True, type=click.Path())
@click.option("--out", "out_file", required=True, type=click.Path())
@click.option("--acronyms", type=click.Path(), default=None)
@click.pass_obj
def normalize(root, in_file, out_file, acronyms):
    """Normalize a UTF-8 text file line by line."""
    lexicon = _load_lexicon(_resolve(acronyms, root))
    charset = Charset.default()
    in_path = _resolve(in_file, root)
    out_path = _resolve(out_file, root)
    lines_out = []
    for line_no, line in enumerate(in_path.read_text("utf-8").split("\n"), 1):
        try:
            lines_out.append(textnorm.normalize(line, lexicon, charset))
        except RuslanKitError as exc:
            raise type(exc)(f"{in_path}:{line_no}: {exc}") from None
    out_path.write_text("\n".join(lines_out), encoding="utf-8")


@cli.command()
@click.argument("text", required=False)
@click.option("--manifest", type=click.Path(), default=None)
@click.option("--dist-out", type=click.Path(), default=None,
              help="Write the phoneme frequency table (TSV) here.")
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
def g2p(root, text, manifest, dist_out, as_json):
    """Transcribe TEXT (or every manifest utterance) to phonemes."""
    if (text is None) == (manifest is None):
        raise click.UsageError("provide exactly one of TEXT or --manifest")
    if text is not None:
        result = phonemics.transcribe(text)
        if as_json:
            click.echo(json.dumps({"schemaVersion": SCHEMA_VERSION,
                                   "words": [list(w) for w in result.words]},
                                  ensure_ascii=False))
        else:
            click.echo(" | ".join(" ".join(word) for word in result.words))
        return
    utterances = corpus_mod.load_manifest(_resolve(manifest, root))
    for utt in utterances:
        result = phonemics.transcribe(utt.text)
        click.echo(utt.utterance_id + "\t"
                   + " | ".join(" ".join(word) for word in result.words))
    if dist_out is not None:
        dist = phonemics.phoneme_distribution([u.text for u in utterances])
        phonemics.write_distribution(dist, _resolve(dist_out, root))


@cli.command()
@click.option("--manifest", required=True, type=click.Path())
@click.option("--json", "as_json", is_flag=True)
@click.option("--no-spaces", is_flag=True, help="Exclude spaces from symbol counts.")
@click.option("--bins", type=int, default=20, show_default=True)
@click.option("--hist-duration-out", type=click.Path(), default=None)
@click.option("--hist-symbols-out", type=click.Path(), default=None)
@click.pass_obj
def stats(root, manifest, as_json, no_spaces, bins, hist_duration_out, hist_symbols_out):
    """Corpus statistics; optional histogram exports for plotting."""
    utterances = corpus_mod.load_manifest(_resolve(manifest, root))
    result = corpus_mod.compute_stats(utterances, count_spaces=not no_spaces)
    if as_json:
        click.echo(json.dumps({"schemaVersion": SCHEMA_VERSION, **result.as_dict()},
                              ensure_ascii=False))
    else:
        for key, value in result.as_dict().items():
            click.echo(f"{key}\t{value}")
    if hist_duration_out is not None:
        corpus_mod.write_histogram(
            corpus_mod.histogram(utterances, "duration", bins),
            _resolve(hist_duration_out, root))
    if hist_symbols_out is not None:
        corpus_mod.write_histogram(
            corpus_mod.histogram(utterances, "symbols", bins),
            _resolve(hist_symbols_out, root))


@cli.command()
@click.option("--manifest", required=True, type=click.Path())
@click.option("--charset", "charset_file", type=click.Path(), default=None)
@click.option("--acronyms", type=click.Path(), default=None)
@click.pass_obj
def validate(root, manifest, charset_file, acronyms):
    """Report corpus violations; exit 1 if any are found."""
    utterances = corpus_mod.load_manifest(_resolve(manifest, root))
    findings = corpus_mod.validate(utterances,
                                   _load_charset(_resolve(charset_file, root)),
                                   _load_lexicon(_resolve(acronyms, root)))
    for v in findings:
        click.echo(f"{v.utterance_id}\t{v.category}\t{v.detail}")
    click.echo(f"{len(findings)} finding(s) in {len(utterances)} utterance(s)", err=True)
    if findings:
        sys.exit(1)


@cli.command()
@click.option("--manifest", required=True, type=click.Path())
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--fft", type=int, default=2048, show_default=True)
@click.option("--hop", type=int, default=512, show_default=True)
@click.option("--win", type=int, default=2048, show_default=True)
@click.option("--mels", type=int, default=80, show_default=True)
@click.pass_obj
def features(root, manifest, out_dir, fft, hop, win, mels):
    """Extract linear and mel spectrograms to RSLF files."""
    cfg = features_mod.StftConfig(fft_size=fft, win_length=win, hop_length=hop)
    out = _resolve(out_dir, root)
    out.mkdir(parents=True, exist_ok=True)
    for utt in corpus_mod.load_manifest(_resolve(manifest, root)):
        wave = read_wav(utt.audio_path)
        lin = features_mod.linear_spectrogram(wave, cfg)
        mel = features_mod.mel_spectrogram(lin, bands=mels)
        rslf.write_matrix(lin.values, out / f"{utt.utterance_id}.lin.rslf")
        rslf.write_matrix(mel.values, out / f"{utt.utterance_id}.mel.rslf")
        click.echo(f"{utt.utterance_id}\t{lin.values.shape[0]} frames", err=True)


@cli.command()
@click.argument("in_wav", type=click.Path())
@click.argument("out_wav", type=click.Path())
@click.option("--iters", type=int, default=300, show_default=True)
@click.option("--alpha", type=float, default=0.99, show_default=True)
@click.option("--seed", type=int, default=None,
              help="Random phase init with this seed (default: zero phase).")
@click.option("--fft", type=int, default=2048, show_default=True)
@click.option("--hop", type=int, default=512, show_default=True)
@click.option("--win", type=int, default=2048, show_default=True)
@click.pass_obj
def copysynth(root, in_wav, out_wav, iters, alpha, seed, fft, hop, win):
    """Analyze a WAV to magnitudes and resynthesize it via Griffin-Lim."""
    cfg = features_mod.StftConfig(fft_size=fft, win_length=win, hop_length=hop)
    gl_cfg = vocoder.GriffinLimConfig(
        iterations=iters, alpha=alpha,
        init_phase="zeros" if seed is None else "random",
        seed=seed if seed is not None else 0)
    wave = read_wav(_resolve(in_wav, root))
    lin = features_mod.linear_spectrogram(wave, cfg)
    rebuilt = vocoder.griffin_lim(lin, gl_cfg)
    sc = vocoder.spectral_convergence(lin, rebuilt)
    peak = float(np.max(np.abs(rebuilt.samples))) if rebuilt.samples.size else 0.0
    if peak > 1.0:
        click.echo(f"peak {peak:.3f} > 1.0, scaling down before write", err=True)
        rebuilt = type(rebuilt)(rebuilt.samples / peak, rebuilt.sample_rate)
    write_wav(rebuilt, _resolve(out_wav, root))
    click.echo(f"spectral convergence: {sc:.2f} dB", err=True)


@cli.command()
@click.option("--pred", required=True, type=click.Path())
@click.option("--target", required=True, type=click.Path())
@click.option("--kind", required=True, type=click.Choice(["mel", "lin"]))
@click.option("--json", "as_json", is_flag=True)
@click.pass_obj
def loss(root, pred, target, kind, as_json):
    """L1 loss between two RSLF feature files."""
    predicted = rslf.read_matrix(_resolve(pred, root))
    reference = rslf.read_matrix(_resolve(target, root))
    fn = features_mod.loss_mel if kind == "mel" else features_mod.loss_lin
    value = fn(predicted, reference)
    if as_json:
        click.echo(json.dumps({"schemaVersion": SCHEMA_VERSION,
                               "kind": kind, "loss": value}))
    else:
        click.echo(f"{value:.12g}")


@cli.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--eps", type=float, default=1e-5, show_default=True)
def gradcheck(seed, eps):
    """Finite-difference gradient verification; exit 1 on any failure."""
    failed = False
    for op_name in neural.GRAD_CHECK_OPS:
        report = neural.grad_check(op_name, seed=seed, eps=eps)
        err = report.max_relative_error
        status = "ok" if err <= GRAD_TOLERANCE else "FAIL"
        click.echo(f"{op_name}\t{err:.3e}\t{status}")
        failed = failed or err > GRAD_TOLERANCE
    if failed:
        sys.exit(1)


@cli.command(name="mos-serve")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data", required=True, type=click.Path())
@click.option("--admin-token", default=None,
              help="Token for /report (default: generated and printed).")
@click.option("--allow-any-pool", is_flag=True,
              help="Skip the 9 real + 11 synthesized survey composition check.")
@click.pass_obj
def mos_serve(root, port, host, data, admin_token, allow_any_pool):
    """Run the MOS survey HTTP service."""
    import uvicorn

    from .service import create_app

    app = create_app(_resolve(data, root), admin_token=admin_token,
                     enforce_paper_counts=not allow_any_pool)
    click.echo(f"admin token: {app.state.admin_token}", err=True)
    uvicorn.run(app, host=host, port=port)


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.UsageError as exc:
        exc.show()
        sys.exit(2)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except click.Abort:
        sys.exit(2)
    except RuslanKitError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    except Exception as exc:  # pragma: no cover - defensive
        click.echo(f"internal error: {exc!r}", err=True)
        sys.exit(4)


if __name__ == "__main__":
    main()
