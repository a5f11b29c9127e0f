"""Monte Carlo amoeba sampling, rasterization and PGM images."""
from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .poly import NewtonPolynomial, UnimodularTransform, transform as apply_transform
from .roots import batch_roots

CHUNK = 4096
RESIDUAL_TOL = 1e-8


class DegeneratePolynomialError(ValueError):
    pass


class EmptyCloudError(ValueError):
    pass


class PGMParseError(ValueError):
    def __init__(self, msg, offset):
        super().__init__(f"{msg} (byte offset {offset})")
        self.offset = offset


@dataclass
class PointCloud:
    points: np.ndarray
    seed: int
    sample_spec: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.points)


def stream(seed: int, index: int) -> np.random.Generator:
    """Generator for sub-stream ``index`` of ``seed`` (Philox4x64, counter-based)."""
    return np.random.Generator(np.random.Philox(key=[int(seed) & (2**64 - 1), int(index)]))


def _coeff_rows(p: NewtonPolynomial, fixed: np.ndarray, var_col: int) -> np.ndarray:
    e = p.exponents
    fix_col = 1 - var_col
    lo, hi = e[:, var_col].min(), e[:, var_col].max()
    rows = np.zeros((fixed.size, hi - lo + 1), dtype=complex)
    for ex, c in zip(e, p.coefficients):
        rows[:, hi - ex[var_col]] += c * fixed ** ex[fix_col]
    return rows


def _verified(p: NewtonPolynomial, z: np.ndarray, w: np.ndarray) -> np.ndarray:
    val = np.zeros(z.shape, dtype=complex)
    scale = np.zeros(z.shape)
    with np.errstate(all="ignore"):
        for (i, j), c in p.terms:
            t = c * z**i * w**j
            val += t
            scale += np.abs(t)
        ok = np.isfinite(val) & (scale > 0) & (np.abs(val) < RESIDUAL_TOL * scale)
    return ok & (z != 0) & (w != 0) & np.isfinite(z) & np.isfinite(w)


def _scan(p: NewtonPolynomial, rng: np.random.Generator, draws: int, s_range: float, var_col: int):
    """Fix one variable on random points of the torus, solve for the other."""
    s = rng.uniform(-s_range, s_range, draws)
    theta = rng.uniform(0.0, 2 * np.pi, draws)
    fixed = np.exp(s + 1j * theta)
    rows = _coeff_rows(p, fixed, var_col)
    keep = np.abs(rows[:, 0]) > 0
    rows, fixed = rows[keep], fixed[keep]
    if rows.shape[0] == 0:
        return np.empty((0, 2))
    # trailing zero coefficients only add roots at 0, which are not on the torus
    roots, _ = batch_roots(rows)
    d = roots.shape[1]
    fx = np.repeat(fixed, d)
    rv = roots.ravel()
    z, w = (fx, rv) if var_col == 1 else (rv, fx)
    ok = _verified(p, z, w)
    return np.column_stack([np.log(np.abs(z[ok])), np.log(np.abs(w[ok]))])


def sample_amoeba(
    p: NewtonPolynomial,
    count: int,
    s_range: float = 6.0,
    seed: int = 0,
    transform: UnimodularTransform | None = None,
) -> PointCloud:
    """Sample points of the amoeba of ``p``.

    ``count`` torus draws are split evenly between the two scans (|z| fixed,
    solve for w; |w| fixed, solve for z). Each draw contributes every verified
    root. With ``transform``, the transformed polynomial is sampled and the
    points are mapped back, which spreads samples more evenly over tentacles.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if s_range <= 0:
        raise ValueError("s_range must be positive")
    q = p
    draw_range = s_range
    if transform is not None:
        q = apply_transform(p, transform)
        # widen the draw box so mapped-back points still cover [-s_range, s_range]^2
        inv = np.linalg.inv(transform.matrix.T.astype(float))
        draw_range = s_range * float(np.abs(inv).sum(axis=1).max())
    e = q.exponents
    has = [np.ptp(e[:, 0]) > 0, np.ptp(e[:, 1]) > 0]
    if not any(has):
        raise DegeneratePolynomialError("polynomial depends on neither z nor w")
    roles = [col for col in (1, 0) if has[col]]
    pieces = []
    chunk_id = 0
    for k, col in enumerate(roles):
        draws = count // len(roles) + (1 if k < count % len(roles) else 0)
        done = 0
        while done < draws:
            m = min(CHUNK, draws - done)
            pieces.append(_scan(q, stream(seed, chunk_id), m, draw_range, col))
            chunk_id += 1
            done += m
    pts = np.concatenate(pieces) if pieces else np.empty((0, 2))
    if transform is not None:
        pts = transform.map_back(pts)
    spec = {"count": int(count), "s_range": float(s_range)}
    if transform is not None:
        spec["transform"] = [list(r) for r in transform.M]
    return PointCloud(pts, int(seed), spec)


def write_cloud_csv(cloud: PointCloud, path, header: str = "") -> None:
    lines = [header] if header else []
    lines.append("x,y")
    lines += [f"{x:.17g},{y:.17g}" for x, y in cloud.points]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_cloud_csv(path) -> PointCloud:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("x"):
                continue
            a, b = line.split(",")[:2]
            rows.append((float(a), float(b)))
    return PointCloud(np.array(rows, dtype=float).reshape(-1, 2), seed=-1)


# ---------------------------------------------------------------------------
# rasters


@dataclass
class RasterImage:
    pixels: np.ndarray  # (height, width), row 0 is the top (largest y)
    window: tuple[float, float, float, float]
    axes_drawn: bool = False
    empty: bool = False

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


def _window(window) -> tuple[float, float, float, float]:
    if np.isscalar(window):
        r = float(window)
        return (-r, r, -r, r)
    w = tuple(float(v) for v in window)
    if len(w) != 4 or w[1] <= w[0] or w[3] <= w[2]:
        raise ValueError(f"bad window {window!r}")
    return w  # type: ignore[return-value]


def occupancy(points: np.ndarray, resolution: int, window) -> np.ndarray:
    """Point counts per cell, row 0 at the top of the window."""
    x0, x1, y0, y1 = _window(window)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    h, _, _ = np.histogram2d(pts[:, 1], pts[:, 0], bins=resolution, range=[[y0, y1], [x0, x1]])
    return h[::-1]


def rasterize(
    cloud: PointCloud | np.ndarray,
    resolution: int,
    window=6.0,
    draw_axes: bool = False,
    mode: str = "binary",
) -> RasterImage:
    """Bin points into a square image with values in [0, 1].

    ``mode="binary"`` marks any occupied cell with 1; ``"density"`` scales counts
    by the maximum count. Axes are drawn as 0.5-grey lines through the origin on
    otherwise empty cells.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    pts = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud)
    if len(pts) == 0:
        raise EmptyCloudError("cannot rasterize an empty cloud")
    win = _window(window)
    h = occupancy(pts, resolution, win)
    if mode == "binary":
        img = (h > 0).astype(float)
    elif mode == "density":
        img = h / h.max() if h.max() > 0 else h
    else:
        raise ValueError(f"unknown mode {mode!r}")
    empty = not np.any(h > 0)
    if draw_axes:
        x0, x1, y0, y1 = win
        if x0 <= 0 < x1:
            col = min(int((0 - x0) / (x1 - x0) * resolution), resolution - 1)
            img[:, col] = np.maximum(img[:, col], 0.5)
        if y0 <= 0 < y1:
            row = resolution - 1 - min(int((0 - y0) / (y1 - y0) * resolution), resolution - 1)
            img[row, :] = np.maximum(img[row, :], 0.5)
    return RasterImage(img, win, draw_axes, empty)


def _pool_matrix(src: int, dst: int) -> np.ndarray:
    """(dst, src) matrix of fractional overlaps, rows summing to 1."""
    edges_s = np.arange(src + 1) / src
    edges_d = np.arange(dst + 1) / dst
    lo = np.maximum(edges_d[:-1, None], edges_s[None, :-1])
    hi = np.minimum(edges_d[1:, None], edges_s[None, 1:])
    a = np.clip(hi - lo, 0, None)
    return a / a.sum(axis=1, keepdims=True)


def downsample(img: RasterImage, target: int) -> RasterImage:
    """Area-average pooling to target x target."""
    src = img.pixels
    if target > min(src.shape) or target < 1:
        raise ValueError(f"cannot downsample {src.shape} to {target}")
    if src.shape[0] % target == 0 and src.shape[1] % target == 0:
        fy, fx = src.shape[0] // target, src.shape[1] // target
        out = src.reshape(target, fy, target, fx).mean(axis=(1, 3))
    else:
        out = _pool_matrix(src.shape[0], target) @ src @ _pool_matrix(src.shape[1], target).T
    return RasterImage(np.clip(out, 0.0, 1.0), img.window, img.axes_drawn, img.empty)


def hausdorff_cells(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance, in cells, between two boolean occupancy masks."""
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if not a.any() or not b.any():
        raise EmptyCloudError("both masks need occupied cells")
    da = ndimage.distance_transform_edt(~a)
    db = ndimage.distance_transform_edt(~b)
    return float(max(da[b].max(), db[a].max()))


# ---------------------------------------------------------------------------
# PGM


def atomic_write_bytes(path, data: bytes) -> None:
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode())


def pgm_bytes(img: RasterImage) -> bytes:
    q = np.rint(np.clip(img.pixels, 0, 1) * 255).astype(np.uint8)
    header = f"P5\n{img.width} {img.height}\n255\n".encode()
    return header + q.tobytes()


def write_pgm(img: RasterImage, path) -> None:
    atomic_write_bytes(path, pgm_bytes(img))


def parse_pgm(data: bytes) -> RasterImage:
    pos = 0
    tokens = []
    if data[:2] != b"P5":
        raise PGMParseError("missing P5 magic", 0)
    pos = 2
    while len(tokens) < 3:
        if pos >= len(data):
            raise PGMParseError("truncated header", pos)
        ch = data[pos : pos + 1]
        if ch.isspace():
            pos += 1
        elif ch == b"#":
            nl = data.find(b"\n", pos)
            if nl < 0:
                raise PGMParseError("unterminated comment", pos)
            pos = nl + 1
        else:
            start = pos
            while pos < len(data) and data[pos : pos + 1].isdigit():
                pos += 1
            if pos == start:
                raise PGMParseError(f"unexpected byte {data[pos:pos + 1]!r}", pos)
            tokens.append(int(data[start:pos]))
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise PGMParseError("expected whitespace after maxval", pos)
    pos += 1
    width, height, maxval = tokens
    if width < 1 or height < 1:
        raise PGMParseError("nonpositive dimensions", pos)
    if not 0 < maxval < 256:
        raise PGMParseError(f"unsupported maxval {maxval}", pos)
    need = width * height
    if len(data) - pos < need:
        raise PGMParseError(f"payload has {len(data) - pos} bytes, expected {need}", len(data))
    px = np.frombuffer(data, dtype=np.uint8, count=need, offset=pos).reshape(height, width)
    return RasterImage(px.astype(float) / maxval, (-1.0, 1.0, -1.0, 1.0))


def read_pgm(path) -> RasterImage:
    with open(path, "rb") as fh:
        return parse_pgm(fh.read())
