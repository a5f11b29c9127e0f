"""Command-line entry point: ``amoebakit <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC, EXIT_GENERATION = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument parsing


def _level(text):
    if str(text).lower() in ("inf", "infinity", "∞"):
        return "inf"
    try:
        n = int(text)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"n must be a positive integer or 'inf', got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("n must be >= 1")
    return n


def _positive_int(text):
    try:
        v = int(text)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _positive_float(text):
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {v}")
    return v


def _floats(text):
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _complexes(text):
    try:
        return [complex(v.replace(" ", "").replace("i", "j")) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _point(text):
    v = _floats(text)
    if len(v) != 2:
        raise argparse.ArgumentTypeError(f"expected x,y, got {text!r}")
    return v


def _window(text):
    v = _floats(text)
    if len(v) == 1 and v[0] > 0:
        return v[0]
    if len(v) == 4 and v[1] > v[0] and v[3] > v[2]:
        return v
    raise argparse.ArgumentTypeError(f"window is R or x0,x1,y0,y1, got {text!r}")


# every option: (flags, dest, type, default, help). Defaults live here so that
# config-file values can sit between defaults and explicit flags.
COMMON = [
    (("--seed",), "seed", int, 0, "seed for every stochastic stage"),
    (("--threads",), "threads", _positive_int, None, "worker cap (default: AMOEBAKIT_THREADS or all cores)"),
]
POLY = [
    (("--poly",), "poly", str, "f0", "preset name (f0, l332, cz2z4, k4532) or polynomial text file"),
    (("--coeffs",), "coeffs", _complexes, None, "comma-separated preset coefficients"),
]

COMMANDS = {
    "genus": POLY + [
        (("--n",), "n", _level, 1, "cyclic-resultant level or 'inf' for the amoeba itself"),
        (("--window",), "window", _window, None, "half-width R or x0,x1,y0,y1 (default from coefficients)"),
        (("--res",), "res", _positive_int, 256, "grid cells per axis (>= 64)"),
        (("--mask-out",), "mask_out", str, None, "write the membership mask as PGM"),
        (("--out",), "out", str, None, "write the full report as JSON"),
    ],
    "membership": POLY + [
        (("--point",), "point", _point, None, "Log-plane point x,y"),
        (("--theta-steps",), "theta_steps", _positive_int, 512, "angular samples of the torus scan"),
        (("--tol",), "tol", _positive_float, 1e-3, "relative modulus tolerance"),
    ],
    "lopsided": POLY + [
        (("--n",), "n", _level, 1, "cyclic-resultant level"),
        (("--point",), "point", _point, None, "Log-plane point x,y"),
    ],
    "render": POLY + [
        (("--samples",), "samples", _positive_int, 20000, "torus draws"),
        (("--s-range",), "s_range", _positive_float, 6.0, "draw log-moduli from [-s, s]"),
        (("--res",), "res", _positive_int, 256, "image side in pixels"),
        (("--window",), "window", _window, 6.0, "half-width R or x0,x1,y0,y1"),
        (("--transform",), "transform", str, None, "unimodular matrix 'a,b;c,d' for resampling"),
        (("--axes",), "axes", int, 1, "draw axes (1) or not (0)"),
        (("--out",), "out", str, None, "output PGM"),
        (("--cloud-out",), "cloud_out", str, None, "also write the point cloud as CSV"),
    ],
    "crawl": POLY + [
        (("--index",), "index", _positive_int, 5, "1-based coefficient to vary"),
        (("--values",), "values", _floats, None, "comma-separated values"),
        (("--n",), "n", _level, 1, "cyclic-resultant level or 'inf'"),
        (("--window",), "window", _window, None, "half-width R or x0,x1,y0,y1"),
        (("--res",), "res", _positive_int, 128, "grid cells per axis (>= 64)"),
        (("--out",), "out", str, None, "CSV of value,genus,degenerate"),
        (("--masks-out",), "masks_out", str, None, "stacked boundary masks as .npy"),
    ],
    "transform": POLY + [
        (("--matrix",), "matrix", str, None, "integer matrix 'a,b;c,d'"),
        (("--alpha",), "alpha", _complexes, None, "two nonzero scale factors a1,a2"),
        (("--out",), "out", str, None, "write the transformed polynomial text"),
    ],
    "gen-dataset": [
        (("--preset",), "preset", str, "f0", "f0, l332, cz2z4 or k4532"),
        (("--task",), "task", str, "genus", "genus, membership or images"),
        (("--count",), "count", _positive_int, 2000, "rows (genus/membership)"),
        (("--label-mode",), "label_mode", _level, 1, "n or 'inf'"),
        (("--domain",), "domain", str, "real", "real, abs or positive-int"),
        (("--balance",), "balance", int, 1, "balance classes (1) or not (0)"),
        (("--min-margin",), "min_margin", float, 0.0, "drop rows this close to an analytic threshold"),
        (("--per-class",), "per_class", _positive_int, 1000, "images per class"),
        (("--resolutions",), "resolutions", _floats, None, "image sides, default 2,4,...,256"),
        (("--out",), "out", str, None, "CSV path, or directory for images"),
    ],
    "train": [
        (("--data",), "data", str, None, "dataset CSV or image manifest"),
        (("--hidden",), "hidden", _floats, [100], "hidden dense widths (coefficient data)"),
        (("--epochs",), "epochs", _positive_int, 20, "training epochs"),
        (("--batch",), "batch", _positive_int, 32, "mini-batch size"),
        (("--lr",), "lr", _positive_float, 1e-3, "Adam learning rate"),
        (("--weights-out",), "weights_out", str, None, "write the trained weights"),
    ],
    "eval": [
        (("--data",), "data", str, None, "dataset CSV or image manifest"),
        (("--weights",), "weights", str, None, "evaluate saved weights instead of cross-validating"),
        (("--k",), "k", _positive_int, 5, "folds"),
        (("--hidden",), "hidden", _floats, [100], "hidden dense widths"),
        (("--epochs",), "epochs", _positive_int, 20, "training epochs"),
        (("--batch",), "batch", _positive_int, 32, "mini-batch size"),
        (("--lr",), "lr", _positive_float, 1e-3, "Adam learning rate"),
        (("--out",), "out", str, None, "per-fold metrics CSV"),
    ],
    "project": [
        (("--method",), "method", str, "pca", "pca, mds, isomap or spectral"),
        (("--dims",), "dims", _positive_int, 2, "embedding dimension"),
        (("--k",), "k", _positive_int, 10, "neighbours for isomap/spectral"),
        (("--in",), "input", str, None, "dataset CSV"),
        (("--out",), "out", str, None, "embedding CSV"),
    ],
    "persist": [
        (("--cloud",), "cloud", str, None, "point cloud CSV (x,y)"),
        (("--max-radius",), "max_radius", _positive_float, math.inf, "largest disc radius"),
        (("--max-points",), "max_points", _positive_int, 300, "farthest-point subsample size"),
        (("--window",), "window", _window, None, "drop points outside this window first"),
        (("--out",), "out", str, None, "diagram CSV (dim,birth,death)"),
    ],
}

REQUIRED = {
    "membership": ["point"],
    "lopsided": ["point"],
    "render": ["out"],
    "crawl": ["values"],
    "transform": ["matrix"],
    "gen-dataset": ["out"],
    "train": ["data"],
    "eval": ["data"],
    "project": ["input", "out"],
    "persist": ["cloud"],
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="amoebakit", description="Amoebae of bivariate Newton polynomials.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, opts in COMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", default=argparse.SUPPRESS, help="JSON file of option values; flags win")
        for flags, dest, typ, default, help_ in opts + COMMON:
            p.add_argument(*flags, dest=dest, type=typ, default=argparse.SUPPRESS, help=f"{help_} (default: {default})")
    return parser


def parse_config(argv) -> dict:
    """Merge defaults, an optional JSON config file, then explicit flags."""
    ns = build_parser().parse_args(argv)
    if ns.command is None:
        raise UsageError("amoebakit: a subcommand is required")
    cmd = ns.command
    opts = COMMANDS[cmd] + COMMON
    types = {dest: typ for _, dest, typ, _, _ in opts}
    cfg = {dest: default for _, dest, _, default, _ in opts}
    given = vars(ns)
    if "config" in given:
        try:
            with open(given["config"]) as fh:
                file_cfg = json.load(fh)
        except OSError as exc:
            raise FileNotFoundError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file is not valid JSON: {exc}") from None
        unknown = sorted(set(file_cfg) - set(cfg))
        if unknown:
            raise UsageError(f"unknown config keys for {cmd}: {', '.join(unknown)}")
        for key, value in file_cfg.items():
            if value is not None and not isinstance(value, (list, dict)):
                try:
                    value = types[key](value) if types[key] is not str else str(value)
                except argparse.ArgumentTypeError as exc:
                    raise UsageError(f"config {key}: {exc}") from None
            cfg[key] = value
    for key, value in given.items():
        if key in cfg:
            cfg[key] = value
    for key in REQUIRED.get(cmd, []):
        if cfg.get(key) is None:
            raise UsageError(f"{cmd}: --{key.replace('_', '-')} is required")
    if cfg.get("threads") is None:
        env = os.environ.get("AMOEBAKIT_THREADS")
        cfg["threads"] = int(env) if env and env.isdigit() and int(env) > 0 else (os.cpu_count() or 1)
    cfg["command"] = cmd
    return cfg


def config_header(cfg: dict) -> str:
    """``# config: {...}`` with output-independent keys (threads excluded)."""
    echo = {k: v for k, v in sorted(cfg.items()) if k != "threads"}
    return "# config: " + json.dumps(echo, sort_keys=True, default=_json_default)


def _json_default(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.integer, np.floating)):
        return v.item()
    return str(v)


# ---------------------------------------------------------------------------
# helpers


def load_polynomial(cfg):
    from .poly import PRESET_SUPPORTS, parse_poly_text, preset

    src = cfg["poly"]
    if src in PRESET_SUPPORTS:
        return preset(src, cfg.get("coeffs"))
    if cfg.get("coeffs") is not None:
        raise UsageError("--coeffs only applies to presets")
    with open(src) as fh:
        return parse_poly_text(fh.read())


def _write_text(path, text):
    from .sampler import atomic_write_text

    atomic_write_text(path, text)


def _read_csv(path):
    """(column names, float matrix, config line or '')."""
    header = None
    rows = []
    cfg_line = ""
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                cfg_line = cfg_line or line
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append(line.split(","))
    if header is None:
        raise ValueError(f"{path}: no header row")
    return header, rows, cfg_line


def load_dataset(path):
    """Coefficient CSV (…,label) or image manifest (path,label,resolution)."""
    from .ml.datasets import Dataset
    from .sampler import read_pgm

    header, rows, _ = _read_csv(path)
    if header[:2] == ["path", "label"]:
        base = Path(path).parent
        imgs = [read_pgm(base / r[0]).pixels for r in rows]
        labels = np.array([int(r[1]) for r in rows])
        return Dataset(np.stack(imgs)[..., None], labels, {"kind": "images"})
    if header[-1] != "label":
        raise ValueError(f"{path}: last column must be 'label'")
    X = np.array([[float(v) for v in r[:-1]] for r in rows], dtype=float)
    y = np.array([int(r[-1]) for r in rows], dtype=int)
    return Dataset(X, y, {"kind": "coefficients", "columns": header[:-1]})


def _specs_for(data, cfg):
    from .ml.network import image_cnn, mlp

    n_classes = max(2, int(data.labels.max()) + 1)
    if data.inputs.ndim == 4:
        return image_cnn(data.inputs.shape[1])
    return mlp(data.inputs.shape[1], n_classes, hidden=tuple(int(h) for h in cfg["hidden"]))


def _fmt(v) -> str:
    return "inf" if v == math.inf else f"{v:.17g}"


# ---------------------------------------------------------------------------
# subcommands


def cmd_genus(cfg):
    from .genus import genus_grid_scan
    from .sampler import RasterImage, write_pgm

    p = load_polynomial(cfg)
    rep = genus_grid_scan(p, cfg["n"], cfg["window"], cfg["res"])
    if cfg["out"]:
        _write_text(cfg["out"], json.dumps(rep.to_dict(), indent=2) + "\n")
    if cfg["mask_out"]:
        write_pgm(RasterImage(rep.mask[::-1].astype(float), rep.window), cfg["mask_out"])
    warn = ",".join(rep.warnings) or "none"
    print(f"genus={rep.genus} n={rep.level_n} components={len(rep.components)} res={rep.resolution} "
          f"window={','.join(f'{v:.6g}' for v in rep.window)} warnings={warn}")
    return EXIT_OK


def cmd_membership(cfg):
    from .genus import exact_membership_torus

    p = load_polynomial(cfg)
    m = exact_membership_torus(p, cfg["point"], cfg["theta_steps"], cfg["tol"])
    print(f"member={'true' if m else 'false'}")
    return EXIT_OK


def cmd_lopsided(cfg):
    from .lopsided import cyclic_resultant, is_lopsided, magnitudes_at

    if cfg["n"] == "inf":
        raise UsageError("lopsided needs a finite --n")
    p = load_polynomial(cfg)
    q = cyclic_resultant(p, cfg["n"]).expanded
    mags = magnitudes_at(q, cfg["point"])
    print("not-member" if is_lopsided(mags) else "member")
    print(",".join(f"{v:.17g}" for v in mags))
    return EXIT_OK


def cmd_render(cfg):
    from .poly import UnimodularTransform, parse_matrix
    from .sampler import rasterize, sample_amoeba, write_cloud_csv, write_pgm

    p = load_polynomial(cfg)
    t = UnimodularTransform(parse_matrix(cfg["transform"])) if cfg["transform"] else None
    cloud = sample_amoeba(p, cfg["samples"], cfg["s_range"], cfg["seed"], t)
    img = rasterize(cloud, cfg["res"], cfg["window"], draw_axes=bool(cfg["axes"]))
    write_pgm(img, cfg["out"])
    if cfg["cloud_out"]:
        write_cloud_csv(cloud, cfg["cloud_out"], config_header(cfg))
    print(f"points={len(cloud)} res={cfg['res']} empty={'true' if img.empty else 'false'} out={cfg['out']}")
    return EXIT_OK


def cmd_crawl(cfg):
    from .genus import crawl_sweep
    from .poly import PRESET_DEFAULTS, PRESET_SUPPORTS

    name = cfg["poly"]
    if name not in PRESET_SUPPORTS:
        raise UsageError("crawl needs a preset --poly")
    base = cfg["coeffs"] or PRESET_DEFAULTS[name]
    if cfg["index"] > len(base):
        raise UsageError(f"--index must be <= {len(base)}")
    res = crawl_sweep(name, base, cfg["index"] - 1, cfg["values"], cfg["n"], cfg["window"], cfg["res"])
    lines = [config_header(cfg), "value,genus,degenerate"]
    for v, rep, dg in zip(res.values, res.reports, res.degenerate):
        lines.append(f"{v:.17g},{rep.genus},{int(dg)}")
    if cfg["out"]:
        _write_text(cfg["out"], "\n".join(lines) + "\n")
    if cfg["masks_out"]:
        import io

        from .sampler import atomic_write_bytes

        buf = io.BytesIO()
        np.save(buf, res.boundaries)
        atomic_write_bytes(cfg["masks_out"], buf.getvalue())
    print("genera=" + ",".join(str(r.genus) for r in res.reports)
          + " degenerate=" + ",".join(str(int(d)) for d in res.degenerate))
    return EXIT_OK


def cmd_transform(cfg):
    from .poly import UnimodularTransform, format_poly_text, parse_matrix, transform

    p = load_polynomial(cfg)
    alpha = tuple(cfg["alpha"]) if cfg["alpha"] else (1, 1)
    if len(alpha) != 2:
        raise UsageError("--alpha takes two values")
    q = transform(p, UnimodularTransform(parse_matrix(cfg["matrix"]), alpha))
    text = format_poly_text(q)
    if cfg["out"]:
        _write_text(cfg["out"], "# " + config_header(cfg)[2:] + "\n" + text)
    else:
        sys.stdout.write(text)
    print(f"terms={len(q)}")
    return EXIT_OK


def cmd_gen_dataset(cfg):
    from .ml.datasets import gen_coeff_dataset, gen_image_dataset, gen_membership_dataset
    from .poly import PRESET_SUPPORTS
    from .sampler import RasterImage, atomic_write_text, pgm_bytes

    task = cfg["task"]
    if task == "images":
        if cfg["preset"] != "f0":
            raise UsageError("image datasets use the f0 preset")
        res = [int(r) for r in (cfg["resolutions"] or [2, 4, 8, 16, 32, 64, 128, 256])]
        sets = gen_image_dataset(cfg["per_class"], res, cfg["seed"])
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        for r, ds in sets.items():
            d = out / f"res{r}"
            d.mkdir(exist_ok=True)
            lines = [config_header(cfg), "path,label,resolution"]
            for k, (img, lab) in enumerate(zip(ds.inputs, ds.labels)):
                name = f"res{r}/img{k:05d}.pgm"
                data = pgm_bytes(RasterImage(img[..., 0], (-1, 1, -1, 1)))
                from .sampler import atomic_write_bytes

                atomic_write_bytes(out / name, data)
                lines.append(f"{name},{lab},{r}")
            atomic_write_text(out / f"manifest_{r}.csv", "\n".join(lines) + "\n")
        print(f"images={2 * cfg['per_class']} resolutions={','.join(map(str, res))} out={out}")
        return EXIT_OK
    if cfg["preset"] not in PRESET_SUPPORTS:
        raise UsageError(f"unknown preset {cfg['preset']!r}")
    if task == "membership":
        ds = gen_membership_dataset(cfg["count"], cfg["seed"], n=1 if cfg["label_mode"] == "inf" else cfg["label_mode"])
        cols = ["c1", "c2", "c3", "c4", "c5", "x1", "x2"]
    elif task == "genus":
        ds = gen_coeff_dataset(
            cfg["preset"], cfg["count"], cfg["label_mode"], cfg["domain"], bool(cfg["balance"]), cfg["seed"],
            min_margin=cfg["min_margin"],
        )
        cols = [f"c{i + 1}" for i in range(ds.inputs.shape[1])]
    else:
        raise UsageError(f"unknown task {task!r}")
    lines = [config_header(cfg), ",".join(cols + ["label"])]
    for row, lab in zip(ds.inputs, ds.labels):
        lines.append(",".join(f"{v:.17g}" for v in row) + f",{lab}")
    _write_text(cfg["out"], "\n".join(lines) + "\n")
    counts = np.bincount(ds.labels)
    print(f"rows={len(ds)} classes={','.join(map(str, counts))} out={cfg['out']}")
    return EXIT_OK


def _hp(cfg):
    from .ml.network import TrainParams

    return TrainParams(lr=cfg["lr"], epochs=cfg["epochs"], batch=cfg["batch"])


def cmd_train(cfg):
    from .ml.network import train
    from .ml.weights import export_weights, format_weights

    data = load_dataset(cfg["data"])
    res = train(_specs_for(data, cfg), data.inputs, data.labels, _hp(cfg), seed=cfg["seed"])
    acc = float(np.mean(res.network.predict(data.inputs) == data.labels))
    if cfg["weights_out"]:
        _write_text(cfg["weights_out"], format_weights(export_weights(res.network), config_header(cfg)))
    print(f"loss={res.history[-1]:.6g} train_accuracy={acc:.4f} epochs={len(res.history)}")
    return EXIT_OK


def cmd_eval(cfg):
    from .ml.metrics import evaluate_predictions, kfold_cv
    from .ml.weights import heaviside_genus, import_weights, parse_weights

    data = load_dataset(cfg["data"])
    n_classes = max(2, int(data.labels.max()) + 1)
    if cfg["weights"]:
        with open(cfg["weights"]) as fh:
            rec = parse_weights(fh.read())
        net = import_weights(rec)
        pred = net.predict(data.inputs)
        m = evaluate_predictions(data.labels, pred, n_classes)
        extra = ""
        if net.output_shape == (1,):
            agree = float(np.mean(heaviside_genus(rec, data.inputs) == pred))
            extra = f" heaviside_agreement={agree:.4f}"
        print(f"accuracy={m.accuracy:.4f} mcc={m.mcc_text}{extra}")
        return EXIT_OK
    res = kfold_cv(_specs_for(data, cfg), data.inputs, data.labels, cfg["k"], _hp(cfg), cfg["seed"], n_classes)
    if cfg["out"]:
        lines = [config_header(cfg), "fold,accuracy,mcc"]
        lines += [f"{i},{f.accuracy:.17g},{f.mcc_text if f.mcc is None else repr(f.mcc)}" for i, f in enumerate(res.folds)]
        _write_text(cfg["out"], "\n".join(lines) + "\n")
    print(res.summary().replace("±", "+-"))
    return EXIT_OK


def cmd_project(cfg):
    from .projections import project

    data = load_dataset(cfg["input"])
    emb = project(cfg["method"], data.inputs, cfg["dims"], cfg["k"])
    cols = [f"dim{i + 1}" for i in range(cfg["dims"])]
    lines = [config_header(cfg), ",".join(cols + ["label"])]
    for row, lab in zip(emb.coords, data.labels):
        lines.append(",".join(f"{v:.17g}" for v in row) + f",{lab}")
    _write_text(cfg["out"], "\n".join(lines) + "\n")
    print(f"method={cfg['method']} rows={len(emb.coords)} dims={cfg['dims']} out={cfg['out']}")
    return EXIT_OK


def cmd_persist(cfg):
    from .persistence import dominant_h1, noise_floor, rips_persistence
    from .sampler import read_cloud_csv

    cloud = read_cloud_csv(cfg["cloud"])
    dg = rips_persistence(cloud, cfg["max_radius"], cfg["max_points"], cfg["seed"], cfg["window"])
    lines = [config_header(cfg), "dim,birth,death"]
    lines += [f"{d},{_fmt(b)},{_fmt(e)}" for d, b, e in dg.features]
    if cfg["out"]:
        _write_text(cfg["out"], "\n".join(lines) + "\n")
    top, second = dominant_h1(dg)
    print(f"points={dg.point_count} h0={len(dg.dim(0))} h1={len(dg.dim(1))} "
          f"h1_top={top:.6g} h1_second={second:.6g} noise_floor={noise_floor(dg):.6g}")
    return EXIT_OK


HANDLERS = {
    "genus": cmd_genus,
    "membership": cmd_membership,
    "lopsided": cmd_lopsided,
    "render": cmd_render,
    "crawl": cmd_crawl,
    "transform": cmd_transform,
    "gen-dataset": cmd_gen_dataset,
    "train": cmd_train,
    "eval": cmd_eval,
    "project": cmd_project,
    "persist": cmd_persist,
}


def dispatch(cfg: dict) -> int:
    from .ml.datasets import GenerationError

    try:
        return HANDLERS[cfg["command"]](cfg)
    except UsageError:
        raise
    except GenerationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GENERATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # malformed inputs (bad polynomial text, bad matrix, degenerate coefficients)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO if _is_file_error(exc) else EXIT_USAGE


def _is_file_error(exc) -> bool:
    from .ml.weights import WeightFormatError
    from .sampler import PGMParseError

    return isinstance(exc, (PGMParseError, WeightFormatError))


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        return dispatch(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
