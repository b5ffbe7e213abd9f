"""Convex and star transform orders decided through finite characterizations.

Refutation is exact: a violating ``(a, b)`` is re-checked on a refined grid
and reported with everything needed to reproduce it. Positive answers are
"numerically supported" over the sweeps that were run, never proved.

Sign tests look at V(x) = tail_Y(x) - tail_X(a x + b). Its sign equals the
sign of h(a x + b) - x for h = tail_Y^{-1} o tail_X, so the relation
X <=_* Y allows only sign patterns inside "-,+" (with b = 0) and X <=_c Y
only subsequences of "+,-,+".
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from ._logspace import log_cdf_from_lnlc
from .distcore import Lifetime, PowerOf
from .errors import ConfigurationError, DomainError, SingularPointError, ValidationError

__all__ = [
    "ConvexOrderResult",
    "DirectionResult",
    "Evidence",
    "GenericFamily",
    "PowerFamily",
    "ScaleFamily",
    "ShapeResult",
    "SignPattern",
    "SMResult",
    "SweepConfig",
    "convex_order_test",
    "quantile_compose",
    "saunders_moran_D",
    "shape_probe",
    "sign_pattern",
    "sm_order_test",
    "star_order_test",
    "v_curve",
]

MIN_GRID = 64
STAR_ALLOWED = frozenset({"", "-", "+", "-,+"})
CONVEX_ALLOWED = frozenset({"", "+", "-", "+,-", "-,+", "+,-,+"})
REFINE_FACTOR = 4
MAX_WITNESSES = 3


# ---------------------------------------------------------------------------
# Composition and shape
# ---------------------------------------------------------------------------


def quantile_compose(X: Lifetime, Y: Lifetime, x):
    """h(x) = tail_Y^{-1}(tail_X(x)), inverted on whichever log scale is precise."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise DomainError("quantile_compose needs x >= 0")
    return Y.inverse_from(X.log_tail(x), X.log_neg_log_cdf(x))


def composition(X: Lifetime, Y: Lifetime) -> Callable:
    return lambda x: quantile_compose(X, Y, x)


class ShapeResult(str, Enum):
    HOLDS = "Holds"
    HOLDS_REVERSED = "HoldsReversed"
    NEITHER = "Neither"
    INCONCLUSIVE = "Inconclusive"


def _check_grid(xs):
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1 or xs.size < MIN_GRID:
        raise ConfigurationError(f"grid needs at least {MIN_GRID} points, got {xs.size}")
    if np.any(np.diff(xs) <= 0):
        raise ConfigurationError("grid must be strictly increasing")
    return xs


def shape_probe(xs, hs, mode: str, rel_tol: float = 1e-8) -> ShapeResult:
    """Convexity (slope differences) or star-shape (h/x differences) of sampled h.

    Holds means convex / h(x)/x nondecreasing; HoldsReversed the opposite.
    Both directions need a witness exceeding ``rel_tol`` to report Neither.
    """
    xs = _check_grid(xs)
    hs = np.asarray(hs, dtype=float)
    if hs.shape != xs.shape:
        raise ConfigurationError("h samples must match the grid")
    if not np.all(np.isfinite(hs)):
        return ShapeResult.INCONCLUSIVE
    if mode == "convex":
        q = np.diff(hs) / np.diff(xs)
    elif mode == "star":
        pos = xs > 0
        q = hs[pos] / xs[pos]
    else:
        raise ConfigurationError(f"shape mode must be 'convex' or 'star', got {mode!r}")
    if q.size < 2:
        return ShapeResult.INCONCLUSIVE
    step = np.diff(q)
    tol = rel_tol * float(np.max(np.abs(q)))
    up = bool(np.any(step > tol))
    down = bool(np.any(step < -tol))
    if up and down:
        return ShapeResult.NEITHER
    return ShapeResult.HOLDS_REVERSED if down else ShapeResult.HOLDS


# ---------------------------------------------------------------------------
# Sign patterns
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SignPattern:
    signs: tuple[int, ...]
    eps: float
    suppressed: int

    @property
    def text(self) -> str:
        return ",".join("+" if s > 0 else "-" for s in self.signs)

    @property
    def empty(self) -> bool:
        return not self.signs

    @property
    def changes(self) -> int:
        return max(len(self.signs) - 1, 0)

    def __str__(self) -> str:
        return self.text or "(empty)"


def sign_pattern(values, eps: float = 1e-9) -> SignPattern:
    """Collapse the signs of ``values``; |v| <= eps * max|v| counts as zero."""
    if not (eps > 0):
        raise ConfigurationError("sign tolerance must be positive")
    v = np.asarray(values, dtype=float).ravel()
    v = np.where(np.isnan(v), 0.0, v)
    scale = float(np.max(np.abs(v))) if v.size else 0.0
    live = np.abs(v) > eps * scale if scale > 0 else np.zeros(v.shape, dtype=bool)
    s = np.sign(v[live]).astype(int)
    if s.size:
        keep = np.concatenate(([True], s[1:] != s[:-1]))
        s = s[keep]
    return SignPattern(tuple(int(x) for x in s), float(eps), int(v.size - np.count_nonzero(live)))


def v_curve(X: Lifetime, Y: Lifetime, a: float, b: float, xs, normalized: bool = True):
    """Samples of V(x) = tail_Y(x) - tail_X(a x + b).

    The normalized form divides by the larger of the two tails (or the two
    cdfs, whichever side is smaller), which keeps the sign and the relative
    size of V where both tails underflow.
    """
    xs = np.asarray(xs, dtype=float)
    u = np.maximum(a * xs + b, 0.0)
    if not normalized:
        return np.asarray(Y.tail(xs)) - np.asarray(X.tail(u))
    ly, lx = np.asarray(Y.log_tail(xs)), np.asarray(X.log_tail(u))
    cy = log_cdf_from_lnlc(Y.log_neg_log_cdf(xs))
    cx = log_cdf_from_lnlc(X.log_neg_log_cdf(u))
    with np.errstate(invalid="ignore"):
        use_tail = np.maximum(ly, lx) <= np.maximum(cy, cx)
        d_tail = ly - lx
        d_cdf = cx - cy
        d = np.where(use_tail, d_tail, d_cdf)
        out = np.sign(d) * -np.expm1(-np.abs(d))
    return np.where(np.isnan(out), 0.0, out)


# ---------------------------------------------------------------------------
# Evidence and sweep configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Evidence:
    kind: str  # pattern_witness | shape_probe | sm_monotone | asymptotic_line | tail_ratio
    note: str
    payload: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind == "pattern_witness" and not self.payload.get("a", 0) > 0:
            raise ValidationError("pattern witnesses need a > 0")

    def to_doc(self) -> dict:
        return {"kind": self.kind, "note": self.note, "payload": dict(self.payload)}


@dataclass(frozen=True)
class SweepConfig:
    a_sweep: tuple[float, ...] | None = None
    b_count: int = 33
    b_scale: float = 5.0
    grid_size: int = 4096
    eps: float = 1e-9
    q_lo: float = 1e-8
    q_hi: float = 1.0 - 1e-10
    chord_points: int = 160
    threads: int | None = None

    def __post_init__(self):
        if self.grid_size < MIN_GRID:
            raise ConfigurationError(f"grid size must be >= {MIN_GRID}")
        if not self.eps > 0:
            raise ConfigurationError("sign tolerance must be positive")

    def a_values(self) -> np.ndarray:
        if self.a_sweep is not None:
            a = np.asarray(self.a_sweep, dtype=float)
            if np.any(a <= 0):
                raise ConfigurationError("a-sweep must lie in (0, inf)")
            return a
        return np.geomspace(0.05, 20.0, 64)

    def b_values(self, Y: Lifetime, nonnegative: bool = False) -> np.ndarray:
        B = self.b_scale * Y.median()
        bs = np.linspace(-B, B, self.b_count)
        return bs[bs >= 0] if nonnegative else bs

    def workers(self) -> int:
        if self.threads is not None:
            return max(1, int(self.threads))
        env = os.environ.get("XORDER_THREADS")
        return max(1, int(env)) if env and env.isdigit() else 1


def _span(X: Lifetime, Y: Lifetime, cfg: SweepConfig) -> tuple[float, float]:
    lo = min(float(X.quantile(cfg.q_lo)), float(Y.quantile(cfg.q_lo)))
    hi = max(_safe_quantile(X, cfg.q_hi), _safe_quantile(Y, cfg.q_hi))
    if lo <= 0:
        lo = hi * 1e-14
    return lo, hi


def _safe_quantile(L: Lifetime, p: float) -> float:
    q = float(L.quantile(p))
    sup = L.support()[1]
    return min(q, sup) if math.isfinite(sup) else q


def log_grid(lo: float, hi: float, n: int) -> np.ndarray:
    return np.geomspace(lo, hi, n)


def grid_doc(lo: float, hi: float, n: int) -> dict:
    return {"lo": float(lo), "hi": float(hi), "n": int(n), "spacing": "log"}


def _map(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))  # map preserves input order


# ---------------------------------------------------------------------------
# Witness search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DirectionResult:
    """Outcome of testing one direction (X <= Y) of one order."""

    order: str  # "star" | "convex"
    holds: bool  # no violation found
    witnesses: tuple[Evidence, ...]
    checked: int
    grid: dict

    def to_doc(self) -> dict:
        return {
            "order": self.order,
            "holds": self.holds,
            "checked": self.checked,
            "grid": self.grid,
            "witnesses": [w.to_doc() for w in self.witnesses],
        }


def _pattern_at(X, Y, a, b, xs, eps):
    return sign_pattern(v_curve(X, Y, a, b, xs), eps)


def _verify(X, Y, a, b, lo, hi, n, eps, allowed, direction, source):
    """Pattern on the sweep grid, re-checked on a refined grid; Evidence or None."""
    xs = log_grid(lo, hi, n)
    pat = _pattern_at(X, Y, a, b, xs, eps)
    if pat.text in allowed:
        return None
    fine_n = REFINE_FACTOR * n
    fine = _pattern_at(X, Y, a, b, log_grid(lo, hi, fine_n), eps)
    if fine.text in allowed:
        return None
    return Evidence(
        "pattern_witness",
        f"V has sign pattern {fine.text} at a={a:.6g}, b={b:.6g} ({direction})",
        {
            "a": float(a),
            "b": float(b),
            "pattern": fine.text,
            "coarse_pattern": pat.text,
            "eps": float(eps),
            "grid": grid_doc(lo, hi, fine_n),
            "direction": direction,
            "source": source,
        },
    )


def _chord_star_candidates(X, Y, lo, hi, n):
    """a values that straddle a drop of h(y)/y; each forces the pattern '+,-'."""
    ys = log_grid(lo, hi, n)
    h = np.asarray(quantile_compose(X, Y, ys))
    ok = np.isfinite(h) & (h > 0)
    ys, h = ys[ok], h[ok]
    r = h / ys
    out = []
    for gap in (1, 2, 4, 8, 16, 32, 64):
        if gap >= r.size:
            break
        drop = r[:-gap] - r[gap:]
        i = int(np.argmax(drop))
        if drop[i] > 1e-12 * r[i]:
            out.append(1.0 / math.sqrt(r[i] * r[i + gap]))
    return out


def _chord_convex_candidates(X, Y, lo, hi, n):
    """(a, b) lines lying above h at a midpoint and below it at both ends.

    A concavity excess delta at y2 between y1 < y3 means h(y2) exceeds the
    chord by delta; lifting the chord by delta/2 gives a line L with h - L of
    signs -, +, -, which maps to V pattern '-,+,-' for a = 1/s, b = -beta/s.
    """
    ys = log_grid(lo, hi, n)
    h = np.asarray(quantile_compose(X, Y, ys))
    ok = np.isfinite(h)
    ys, h = ys[ok], h[ok]
    out = []
    for gap in (1, 2, 4, 8, 16, 32, 64):
        if 2 * gap >= h.size:
            break
        y1, y2, y3 = ys[: -2 * gap], ys[gap:-gap], ys[2 * gap :]
        h1, h2, h3 = h[: -2 * gap], h[gap:-gap], h[2 * gap :]
        slope = (h3 - h1) / (y3 - y1)
        excess = h2 - (h1 + slope * (y2 - y1))
        rel = excess / np.maximum(np.abs(h2), 1e-300)
        i = int(np.argmax(rel))
        if rel[i] > 1e-9 and slope[i] > 0:
            s = slope[i]
            beta = h1[i] - s * y1[i] + 0.5 * excess[i]
            out.append((1.0 / s, -beta / s))
    return out


def _sweep(X, Y, pairs, lo, hi, cfg, allowed, direction, workers):
    """Check (a, b) pairs in order; stop at the first chunk that yields witnesses."""
    found: list[Evidence] = []
    checked = 0
    chunk = max(workers * 8, 16)
    for start in range(0, len(pairs), chunk):
        block = pairs[start : start + chunk]
        results = _map(
            lambda ab: _verify(X, Y, ab[0], ab[1], lo, hi, cfg.grid_size, cfg.eps, allowed, direction, "sweep"),
            block,
            workers,
        )
        checked += len(block)
        found.extend(r for r in results if r is not None)
        if found:
            break
    return found[:MAX_WITNESSES], checked


def _direction(X, Y, order, cfg: SweepConfig, nonnegative_b=False, label="X<=Y") -> DirectionResult:
    lo, hi = _span(X, Y, cfg)
    allowed = STAR_ALLOWED if order == "star" else CONVEX_ALLOWED
    workers = cfg.workers()
    witnesses: list[Evidence] = []
    checked = 0
    # targeted candidates first: they catch violations far below the sweep spacing
    if order == "star":
        cands = [(a, 0.0) for a in _chord_star_candidates(X, Y, lo, hi, cfg.chord_points)]
    else:
        cands = [(a, b) for a, b in _chord_convex_candidates(X, Y, lo, hi, cfg.chord_points) if b >= 0 or not nonnegative_b]
    for a, b in cands:
        checked += 1
        w = _verify(X, Y, a, b, lo, hi, cfg.grid_size, cfg.eps, allowed, label, "chord")
        if w is not None:
            witnesses.append(w)
            break
    if not witnesses:
        a_vals = cfg.a_values()
        b_vals = np.array([0.0]) if order == "star" else cfg.b_values(Y, nonnegative_b)
        pairs = [(float(a), float(b)) for a in a_vals for b in b_vals]
        found, n = _sweep(X, Y, pairs, lo, hi, cfg, allowed, label, workers)
        witnesses.extend(found)
        checked += n
    return DirectionResult(order, not witnesses, tuple(witnesses), checked, grid_doc(lo, hi, cfg.grid_size))


def star_order_test(X: Lifetime, Y: Lifetime, a_sweep=None, config: SweepConfig | None = None) -> DirectionResult:
    """Search for a violation of X <=_* Y; ``holds`` means none was found."""
    cfg = config or SweepConfig()
    if a_sweep is not None:
        cfg = _replace(cfg, a_sweep=tuple(a_sweep))
    return _direction(X, Y, "star", cfg, label="X<=*Y")


def _replace(cfg, **kw):
    from dataclasses import replace

    return replace(cfg, **kw)


@dataclass(frozen=True)
class ConvexOrderResult:
    relation: str  # le_convex | ge_convex | equivalent | non_comparable
    forward: DirectionResult  # X <=_c Y
    reverse: DirectionResult  # Y <=_c X

    @property
    def evidence(self) -> list[Evidence]:
        return list(self.forward.witnesses) + list(self.reverse.witnesses)

    def to_doc(self) -> dict:
        return {"relation": self.relation, "forward": self.forward.to_doc(), "reverse": self.reverse.to_doc()}


def convex_order_test(
    X: Lifetime,
    Y: Lifetime,
    a_sweep=None,
    b_sweep=None,
    use_star_shortcut: bool = False,
    config: SweepConfig | None = None,
) -> ConvexOrderResult:
    """Both directions of the convex order by sign-pattern sweeps.

    ``b_sweep`` may be an explicit sequence of offsets; with
    ``use_star_shortcut`` a direction whose star order survives its own sweep
    only needs offsets b >= 0.
    """
    cfg = config or SweepConfig()
    if a_sweep is not None:
        cfg = _replace(cfg, a_sweep=tuple(a_sweep))

    def run(P, Q, label):
        nonneg = False
        if use_star_shortcut:
            nonneg = _direction(P, Q, "star", cfg, label=label).holds
        if b_sweep is None:
            return _direction(P, Q, "convex", cfg, nonnegative_b=nonneg, label=label)
        return _explicit(P, Q, cfg, b_sweep, nonneg, label)

    fwd = run(X, Y, "X<=cY")
    rev = run(Y, X, "Y<=cX")
    if fwd.holds and rev.holds:
        rel = "equivalent"
    elif fwd.holds:
        rel = "le_convex"
    elif rev.holds:
        rel = "ge_convex"
    else:
        rel = "non_comparable"
    return ConvexOrderResult(rel, fwd, rev)


def _explicit(P, Q, cfg, b_sweep, nonneg, label):
    lo, hi = _span(P, Q, cfg)
    bs = [float(b) for b in b_sweep if (b >= 0 or not nonneg)]
    pairs = [(float(a), b) for a in cfg.a_values() for b in bs]
    found, n = _sweep(P, Q, pairs, lo, hi, cfg, CONVEX_ALLOWED, label, cfg.workers())
    return DirectionResult("convex", not found, tuple(found), n, grid_doc(lo, hi, cfg.grid_size))


# ---------------------------------------------------------------------------
# Saunders-Moran criterion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerFamily:
    """F_t = F_base^t."""

    base: Lifetime
    name: str = "power"

    def member(self, t: float) -> Lifetime:
        return PowerOf(self.base, t)

    def D(self, t, x):
        # F ln F / (t x f) with F = F_base, all in log space
        x = np.asarray(x, dtype=float)
        log_f = np.asarray(self.base.log_pdf(x))
        _singular(log_f, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            logF = np.asarray(self.base.log_cdf(x))
            m = np.asarray(self.base.log_neg_log_cdf(x))
            out = -np.exp(logF + m - math.log(t) - np.log(x) - log_f)
        return out + 0.0

    def to_doc(self):
        return {"type": "power", "base": self.base.to_doc()}


@dataclass(frozen=True)
class ScaleFamily:
    """F_lam(x) = F_base(lam x)."""

    base: Lifetime
    name: str = "scale"

    def member(self, lam: float) -> Lifetime:
        return self.base.rescaled(1.0 / lam)

    def D(self, lam, x):
        x = np.asarray(x, dtype=float)
        _singular(np.asarray(self.base.log_pdf(lam * x)), x)
        return np.full(x.shape, 1.0 / lam)

    def to_doc(self):
        return {"type": "scale", "base": self.base.to_doc()}


@dataclass(frozen=True)
class GenericFamily:
    """Any parametrization; the parameter derivative is a central difference."""

    builder: Callable[[float], Lifetime]
    name: str = "generic"
    rel_step: float = 1e-5

    def member(self, t: float) -> Lifetime:
        return self.builder(t)

    def D(self, t, x):
        x = np.asarray(x, dtype=float)
        step = self.rel_step * max(1.0, abs(t))
        log_f = np.asarray(self.builder(t).log_pdf(x))
        _singular(log_f, x)
        dF = (np.asarray(self.builder(t + step).cdf(x)) - np.asarray(self.builder(t - step).cdf(x))) / (2 * step)
        return dF / (x * np.exp(log_f))

    def to_doc(self):
        return {"type": "generic", "name": self.name}


Family = PowerFamily | ScaleFamily | GenericFamily


def _singular(log_f, x):
    if np.any(np.isneginf(log_f)):
        bad = np.asarray(x)[np.isneginf(log_f)] if np.ndim(x) else x
        raise SingularPointError(f"density vanishes at x = {np.ravel(bad)[0]:.6g}")
    if np.any(np.asarray(x) <= 0):
        raise SingularPointError("D(t, x) needs x > 0")


def saunders_moran_D(family: Family, t: float, x):
    """D(t, x) = (dF_t/dt)(x) / (x f_t(x))."""
    out = family.D(t, x)
    return float(out) if np.ndim(x) == 0 else out


@dataclass(frozen=True)
class SMResult:
    relation: str  # le_star | ge_star | equivalent | non_comparable
    direction: str  # increasing | decreasing | constant | non_monotone
    params: tuple[float, float]
    evidence: tuple[Evidence, ...]

    def to_doc(self):
        return {
            "relation": self.relation,
            "direction": self.direction,
            "params": list(self.params),
            "evidence": [e.to_doc() for e in self.evidence],
        }


def default_sm_grid(family: Family, t: float, n: int = 512) -> np.ndarray:
    L = family.member(t)
    lo, hi = L.support()
    q_lo = float(L.quantile(1e-6))
    q_hi = min(float(L.quantile(1 - 1e-6)), hi)
    return np.linspace(max(lo, q_lo), q_hi, n)


def _monotonicity(d, rel_tol):
    step = np.diff(d)
    tol = rel_tol * float(np.max(np.abs(d)))
    up = bool(np.any(step > tol))
    down = bool(np.any(step < -tol))
    if up and down:
        return "non_monotone"
    if up:
        return "increasing"
    if down:
        return "decreasing"
    return "constant"


def sm_order_test(family: Family, t1: float, t2: float, grid=None, rel_tol: float = 1e-9, probes: int = 3) -> SMResult:
    """Compare F_{t1} and F_{t2} through the monotonicity of D(t, .) for t between them.

    D increasing in x: the member with the larger parameter is star-smaller.
    D decreasing: the larger parameter is star-larger. D constant: equivalent.
    Grid points where the density vanishes are skipped and reported.
    """
    if t1 == t2:
        raise ConfigurationError("sm_order_test needs two distinct parameters")
    ts = np.linspace(t1, t2, probes)
    grid = default_sm_grid(family, min(t1, t2)) if grid is None else np.asarray(grid, dtype=float)
    directions = []
    skipped = []
    for t in ts:
        vals = []
        for x in grid:
            try:
                vals.append(float(family.D(t, np.array([x]))[0]))
            except SingularPointError:
                skipped.append(float(x))
        d = np.asarray(vals)
        d = d[np.isfinite(d)]
        directions.append(_monotonicity(d, rel_tol) if d.size >= 2 else "non_monotone")
    uniq = set(directions)
    direction = directions[0] if len(uniq) == 1 else "non_monotone"
    larger_first = t1 > t2
    if direction == "constant":
        rel = "equivalent"
    elif direction == "increasing":
        rel = "ge_star" if not larger_first else "le_star"
    elif direction == "decreasing":
        rel = "le_star" if not larger_first else "ge_star"
    else:
        rel = "non_comparable"
    ev = Evidence(
        "sm_monotone",
        f"D(t, x) is {direction} in x for t in [{min(t1, t2):.6g}, {max(t1, t2):.6g}]",
        {
            "direction": direction,
            "per_parameter": dict(zip((f"{t:.6g}" for t in ts), directions)),
            "grid": {"lo": float(grid[0]), "hi": float(grid[-1]), "n": int(grid.size), "spacing": "linear"},
            "skipped_singular": sorted(set(skipped)),
        },
    )
    return SMResult(rel, direction, (float(t1), float(t2)), (ev,))
