"""Labelled datasets: coefficient vectors -> genus, membership rows, and amoeba images."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..genus import (
    INF,
    centre_point_f0,
    exact_membership_torus,
    f0_threshold,
    genus_f0,
    genus_l332,
    genus_lopsided,
    l332_thresholds,
)
from ..lopsided import lopsided_membership
from ..poly import PRESET_SUPPORTS, max_genus, preset
from ..sampler import downsample, rasterize, sample_amoeba


class GenerationError(RuntimeError):
    pass


@dataclass
class Dataset:
    inputs: np.ndarray
    labels: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.labels)

    @property
    def n_classes(self) -> int:
        return int(self.meta.get("n_classes", int(self.labels.max()) + 1))


# default coefficient boxes, in each preset's coefficient order
DEFAULT_RANGES = {
    "f0": {"real": [(-5, 5)] * 4 + [(-20, 20)], "positive-int": [(1, 5)] * 4 + [(1, 20)]},
    "l332": {
        "real": [(-20, 20)] + [(-5, 5)] * 4 + [(-20, 20)],
        "positive-int": [(1, 20)] + [(1, 5)] * 4 + [(1, 20)],
    },
    "cz2z4": {"real": [(-30, 30)] * 15, "positive-int": [(1, 30)] * 15},
    "k4532": {"real": [(-30, 30)] * 11, "positive-int": [(1, 30)] * 11},
}

COEFF_DOMAINS = ("real", "abs", "positive-int")


def _rng(seed, purpose):
    return np.random.Generator(np.random.Philox(key=[int(seed) & (2**64 - 1), 0x64730000 + purpose]))


def draw_coefficients(name: str, count: int, domain: str, rng, ranges=None) -> np.ndarray:
    if domain not in COEFF_DOMAINS:
        raise ValueError(f"unknown coefficient domain {domain!r}")
    key = "positive-int" if domain == "positive-int" else "real"
    box = ranges or DEFAULT_RANGES[name][key]
    if len(box) != len(PRESET_SUPPORTS[name]):
        raise ValueError(f"{name} needs {len(PRESET_SUPPORTS[name])} ranges")
    lo = np.array([b[0] for b in box], dtype=float)
    hi = np.array([b[1] for b in box], dtype=float)
    if domain == "positive-int":
        return rng.integers(lo.astype(int), hi.astype(int) + 1, size=(count, len(box))).astype(float)
    c = rng.uniform(lo, hi, size=(count, len(box)))
    return np.abs(c) if domain == "abs" else c


def label_coefficients(name: str, c, mode) -> int:
    """Genus label of one coefficient vector.

    mode is an integer n (genus of the lopsided amoeba of the n-th cyclic
    resultant) or INF (amoeba itself, via the centre-point test for F0).
    """
    if mode == INF:
        if name != "f0":
            raise ValueError("infinite-n labels use the F0 centre point")
        return int(not exact_membership_torus(preset("f0", c), centre_point_f0(c)))
    n = int(mode)
    if n == 1 and name == "f0":
        return genus_f0(c)
    if n == 1 and name == "l332":
        return genus_l332(c)
    return genus_lopsided(preset(name, c), n)


def margin(name: str, c) -> float:
    """Distance of a coefficient vector from its family's analytic genus thresholds."""
    m = np.abs(np.asarray(c, dtype=complex))
    if name == "f0":
        return abs(m[4] - f0_threshold(c))
    if name == "l332":
        t = l332_thresholds(c)
        return min(abs(m[0] - t.a1), abs(m[5] - t.a2))
    return math.inf


def _nondegenerate(name, c) -> bool:
    need = {"f0": range(4), "l332": (1, 2, 3, 4)}.get(name, ())
    return all(c[i] != 0 for i in need)


def gen_coeff_dataset(
    name: str,
    count: int,
    label_mode=1,
    coeff_domain: str = "real",
    balance: bool = True,
    seed: int = 0,
    ranges=None,
    min_margin: float = 0.0,
    classes=None,
    max_attempts: int | None = None,
) -> Dataset:
    """Random coefficient vectors of preset ``name`` labelled by genus.

    With ``balance`` every class in ``classes`` (default 0..max genus) gets
    ``count // len(classes)`` rows, the first ``count % len(classes)`` classes one
    more; rows are drawn by rejection. Raises GenerationError if the quota is
    not met within ``max_attempts`` draws.
    """
    if name not in PRESET_SUPPORTS:
        raise ValueError(f"unknown preset {name!r}")
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = _rng(seed, 1)
    if classes is None:
        top = 1 if name == "f0" else max_genus(preset(name))
        classes = list(range(top + 1))
    classes = list(classes)
    quota = {k: count // len(classes) + (1 if i < count % len(classes) else 0) for i, k in enumerate(classes)}
    max_attempts = max_attempts or 400 * count
    rows, labels = [], []
    attempts = 0
    batch = max(64, count)
    while len(rows) < count:
        if attempts >= max_attempts:
            have = {k: labels.count(k) for k in classes}
            raise GenerationError(f"could not fill class quotas {quota} after {attempts} draws (have {have})")
        for c in draw_coefficients(name, batch, coeff_domain, rng, ranges):
            attempts += 1
            if not _nondegenerate(name, c):
                continue
            if min_margin > 0 and margin(name, c) <= min_margin:
                continue
            g = label_coefficients(name, c, label_mode)
            if balance:
                if g not in quota or labels.count(g) >= quota[g]:
                    continue
            rows.append(c)
            labels.append(g)
            if len(rows) == count or attempts >= max_attempts:
                break
    meta = {
        "preset": name,
        "label_mode": str(label_mode),
        "coeff_domain": coeff_domain,
        "seed": seed,
        "ranges": ranges or DEFAULT_RANGES[name]["positive-int" if coeff_domain == "positive-int" else "real"],
        "n_classes": max(classes) + 1,
        "min_margin": min_margin,
    }
    return Dataset(np.array(rows, dtype=float), np.array(labels, dtype=int), meta)


def gen_membership_dataset(count: int, seed: int = 0, n: int = 1, box: float = 5.0, balance: bool = True) -> Dataset:
    """Rows (c1..c5, x1, x2) for F0 labelled 1 when x lies in the lopsided amoeba of level n."""
    rng = _rng(seed, 2)
    rows, labels = [], []
    want = {0: count // 2, 1: count - count // 2}
    got = {0: 0, 1: 0}
    attempts = 0
    while len(rows) < count:
        if attempts > 400 * count:
            raise GenerationError("could not balance membership dataset")
        c = rng.uniform(-box, box, 5)
        x = rng.uniform(-box, box, 2)
        attempts += 1
        if np.any(c[:4] == 0):
            continue
        lab = int(lopsided_membership(preset("f0", c), n, x))
        if balance and got[lab] >= want[lab]:
            continue
        got[lab] += 1
        rows.append(np.concatenate([c, x]))
        labels.append(lab)
    return Dataset(np.array(rows), np.array(labels), {"preset": "f0", "task": "membership", "n": n, "seed": seed, "n_classes": 2})


# ---------------------------------------------------------------------------
# images


@dataclass
class ImageSettings:
    master: int = 512
    window: float = 4.0
    # sparse sampling and small holes make the task depend on resolution
    draws: int = 800
    coeff_range: tuple[float, float] = (0.5, 3.0)
    # c5 = threshold * exp(+-v) with v uniform in this range
    log_gap: tuple[float, float] = (0.02, 0.3)


def gen_image_dataset(
    count_per_class: int,
    resolutions=(2, 4, 8, 16, 32, 64, 128, 256),
    seed: int = 0,
    settings: ImageSettings | None = None,
) -> dict[int, Dataset]:
    """Rasterised F0 amoebae labelled by the n = 1 genus rule.

    c1..c4 are positive reals and c5 sits a random log-distance on either side
    of the genus threshold, so both classes share the same overall body size
    and differ mainly in whether the central hole is open. Each image is
    rendered once at the master resolution on a fixed square window (with
    axes) and area-downsampled to every requested resolution.
    """
    s = settings or ImageSettings()
    for r in resolutions:
        if r > s.master or r & (r - 1):
            raise ValueError(f"resolution {r} must be a power of two <= {s.master}")
    rng = _rng(seed, 3)
    coeffs, labels = [], []
    for k in range(2 * count_per_class):
        g = k % 2
        c = rng.uniform(*s.coeff_range, 4)
        v = rng.uniform(*s.log_gap)
        c5 = f0_threshold(np.append(c, 0.0)) * np.exp(v if g else -v)
        c = np.append(c, c5)
        if genus_f0(c) != g:
            raise GenerationError("label does not match the side of the threshold")
        coeffs.append(c)
        labels.append(g)
    images = {r: [] for r in resolutions}
    for k, c in enumerate(coeffs):
        cloud = sample_amoeba(preset("f0", c), s.draws, s_range=s.window + 1, seed=(int(seed) << 20) + k)
        master = rasterize(cloud, s.master, s.window, draw_axes=True)
        for r in resolutions:
            images[r].append(downsample(master, r).pixels)
    out = {}
    for r in resolutions:
        meta = {
            "preset": "f0",
            "resolution": r,
            "seed": seed,
            "window": s.window,
            "master": s.master,
            "draws": s.draws,
            "n_classes": 2,
            "coefficients": np.array(coeffs),
        }
        out[r] = Dataset(np.stack(images[r])[..., None], np.array(labels), meta)
    return out
