"""Session configuration, validation and the shared computation session."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .anderson import min_omega_factors
from .cinf import Context
from .drinfeld import DrinfeldModule
from .errors import ValidationError
from .ffield import FiniteField, ff_solve_kummer, is_prime

__all__ = ["SessionConfig", "Session", "requirements", "load_config"]

SUITES = ("series", "periods", "difference", "legendre", "anderson", "third-kind", "ext", "cm", "all")


@dataclass
class SessionConfig:
    p: int = 3
    e: int = 1
    s: int = 4
    m: int = 8
    N: int = 160
    D: int = 40
    I: int = 3
    depth: int = 3
    slack: int = 16
    guard: int = 96
    seed: int = 0
    kappa: list = field(default_factory=lambda: [0])
    delta: list = field(default_factory=lambda: [1])
    alphas: list = field(default_factory=lambda: [[1], [0, 1], [1, 2]])

    KEYS = ("p", "e", "s", "m", "N", "D", "I", "depth", "slack", "guard", "seed", "kappa", "delta", "alphas")

    @classmethod
    def from_dict(cls, obj: dict) -> "SessionConfig":
        unknown = sorted(set(obj) - set(cls.KEYS))
        if unknown:
            raise ValidationError(f"unknown configuration keys {unknown}", field=unknown[0])
        return cls(**obj)

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def q(self):
        return self.p ** self.e

    def validate(self, suite: str | None = None) -> dict:
        """Check every field; returns the computed requirements."""
        for key in ("p", "e", "s", "m", "N", "D", "depth"):
            v = getattr(self, key)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ValidationError(f"{key} must be a positive integer", field=key, value=v)
        for key in ("slack", "guard", "I", "seed"):
            v = getattr(self, key)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ValidationError(f"{key} must be a nonnegative integer", field=key, value=v)
        if not is_prime(self.p):
            raise ValidationError("p must be prime", field="p", value=self.p)
        if self.slack >= self.N:
            raise ValidationError("slack must be smaller than N", field="slack")
        if self.D < 2:
            raise ValidationError("D must be at least 2", field="D")
        if suite is not None and suite not in SUITES:
            raise ValidationError(f"unknown suite {suite!r}", field="suite", choices=list(SUITES))
        for key in ("kappa", "delta"):
            _check_poly(self, key, getattr(self, key))
        if not isinstance(self.alphas, list):
            raise ValidationError("alphas must be a list of coefficient lists", field="alphas")
        for a in self.alphas:
            _check_poly(self, "alphas", a)
        if all(c == 0 for c in self.delta):
            raise ValidationError("delta must be nonzero (rank 2)", field="delta")
        req = requirements(self)
        if req["wild"]:
            raise ValidationError("torsion roots are wildly ramified; no ramification index m works",
                                  field="m", valuations=req["valuations"])
        if self.m % req["m"]:
            raise ValidationError(
                f"m={self.m} is too small: root valuations need m divisible by {req['m']}; use m={req['m']}",
                field="m", required_m=req["m"],
            )
        if req["s"] is None or not req["s_ok"]:
            raise ValidationError(
                f"s={self.s} does not contain the required roots; use s={req['s']}",
                field="s", required_s=req["s"],
            )
        ctx = self.context()
        need_I = min_omega_factors(ctx)
        if self.I < need_I:
            raise ValidationError(f"I={self.I} Omega factors are too few; use I={need_I}", field="I", required_I=need_I)
        if suite in ("cm", "all") and self.q % 2 == 0:
            raise ValidationError("the CM suite needs q odd", field="p")
        if suite == "cm" and (self.kappa_is_zero() is False or self.delta != [1]):
            raise ValidationError("the CM suite applies to kappa = 0, delta = 1", field="kappa")
        return req

    def kappa_is_zero(self):
        return all(c == 0 for c in self.kappa)

    def field(self) -> FiniteField:
        return FiniteField(self.p, self.e, self.s)

    def context(self) -> Context:
        return Context(self.field(), self.m, self.N, self.guard, self.slack)


def _check_poly(cfg, key, coeffs):
    if not isinstance(coeffs, list) or not coeffs:
        raise ValidationError(f"{key} must be a nonempty list of coefficients", field=key)
    F = FiniteField(cfg.p, cfg.e, cfg.s)
    for c in coeffs:
        if isinstance(c, bool) or not isinstance(c, (int, list)):
            raise ValidationError(f"{key} coefficients must be integers or coordinate lists", field=key)
        if isinstance(c, int) and not 0 <= c < cfg.p:
            raise ValidationError(f"{key} coefficient {c} is not in F_{cfg.p}", field=key)
        if isinstance(c, list) and not F(c).in_subfield(cfg.e):
            raise ValidationError(f"{key} coefficient {c} is not in F_q", field=key)


def _deg_lc(F, coeffs):
    deg = max((k for k, c in enumerate(coeffs) if F(c)), default=None)
    return (None, None) if deg is None else (deg, F(coeffs[deg]))


def _polygon(points):
    """Lower hull segments [(i0, i1, slope)] of points {i: val}."""
    pts = sorted(points.items())
    hull = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    return [(a[0], b[0], Fraction(b[1] - a[1], b[0] - a[0])) for a, b in zip(hull, hull[1:])]


def _torsion_data(q, kappa, delta):
    """Polygon segments of rho_t(X)/X with exact data (valuation, lc) per degree."""
    one_theta = (Fraction(-1), None)
    pts = {0: one_theta}
    if kappa is not None:
        pts[q - 1] = kappa
    pts[q * q - 1] = delta
    segs = _polygon({i: v for i, (v, _) in pts.items()})
    return pts, segs


def requirements(cfg: SessionConfig) -> dict:
    """Minimal m and s for the configured module.

    m: Omega needs (q-1) | m; the t-torsion polygon and the twist roots need
    the denominators of their valuations.  s: the residue equations of the
    torsion polygon must split, and -1, -Delta, 1/Delta must have the Kummer
    roots used for xi, xi_Delta and eps."""
    q, p = cfg.q, cfg.p
    F0 = FiniteField(p, cfg.e, cfg.s)
    dk, lk = _deg_lc(F0, cfg.kappa)
    dd, ld = _deg_lc(F0, cfg.delta)
    if dd is None:
        raise ValidationError("delta must be nonzero (rank 2)", field="delta")
    dens = [q - 1]
    vals = []
    twist = not (dd == 0 and ld == F0.one())
    v_eps = Fraction(dd, q * q - 1)
    if twist:
        dens += [v_eps.denominator, Fraction(dd, q - 1).denominator]
        # monic model: kappa_nu = kappa eps^(q-1), Delta_nu = 1
        kap = None if dk is None else (Fraction(-dk) + (q - 1) * v_eps, lk)
        dlt = (Fraction(0), F0.one())
    else:
        kap = None if dk is None else (Fraction(-dk), lk)
        dlt = (Fraction(-dd), ld)
    pts, segs = _torsion_data(q, kap, dlt)
    wild = False
    for i0, i1, s in segs:
        v = -s
        vals.append(str(v))
        if v.denominator % p == 0:
            wild = True
        dens.append(v.denominator)
    need_m = 1
    for d in dens:
        if d % p:
            need_m = need_m * d // math.gcd(need_m, d)

    def ok(F):
        if not ff_solve_kummer(-F.one(), q - 1):
            return False
        for c in (lk, ld):
            if c is not None and _embed(F, c) is None:
                return False
        if twist:
            c_eps = ff_solve_kummer(_embed(F, ld).inverse(), q * q - 1)
            if not c_eps or not ff_solve_kummer(-_embed(F, ld), q - 1):
                return False
        for i0, i1, s in segs:
            res = {}
            for i in range(i0, i1 + 1):
                if i in pts and pts[i][0] == pts[i0][0] + s * (i - i0):
                    lc = pts[i][1]
                    res[i - i0] = F.one() if lc is None else _embed(F, lc)
            if twist and kap is not None and (q - 1) in pts and (q - 1 - i0) in res:
                # the leading coefficient of kappa_nu picks up eps's Kummer root
                res[q - 1 - i0] = res[q - 1 - i0] * c_eps[0] ** (q - 1)
            counted = 0
            for c in F.elements():
                if c and not sum((a * c ** k for k, a in res.items()), F.zero()):
                    counted += 1
            if counted < i1 - i0:
                return False
        return True

    s_ok = ok(FiniteField(p, cfg.e, cfg.s))
    need_s = None
    for s_try in range(1, 13):
        if p ** (cfg.e * s_try) > 6561:
            break
        if ok(FiniteField(p, cfg.e, s_try)):
            need_s = s_try
            break
    if s_ok and need_s is None:  # pragma: no cover - configured field beyond the search range
        need_s = cfg.s
    return {"m": need_m, "s": need_s, "s_ok": s_ok, "wild": wild, "valuations": vals}


def _embed(F: FiniteField, c):
    """Move an element of F_q into the carrier F: prime-field values transfer
    directly, anything else only within its own carrier (None otherwise)."""
    v = c.to_list()
    if not any(v[1:]):
        return F(int(v[0]))
    return c if c.field is F else None


def load_config(path: str | None) -> SessionConfig:
    if path is None:
        return SessionConfig()
    with open(path) as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ValidationError("configuration file must hold a JSON object", field="config")
    return SessionConfig.from_dict(obj)


class Session:
    """Validated configuration plus lazily computed shared objects."""

    def __init__(self, cfg: SessionConfig, suite: str | None = None):
        self.cfg = cfg
        self.requirements = cfg.validate(suite)
        self.ctx = cfg.context()
        self.module = DrinfeldModule(self.ctx, self.poly(cfg.kappa), self.poly(cfg.delta), name="rho")
        self.carlitz = DrinfeldModule.carlitz(self.ctx)
        self._lattice = None

    def poly(self, coeffs):
        return self.ctx.from_poly([self.ctx.field(c) for c in coeffs])

    @property
    def lattice(self):
        if self._lattice is None:
            from .periods import compute_lattice
            self._lattice = compute_lattice(self.module, self.cfg.depth, self.cfg.I)
        return self._lattice

    @property
    def monic_lattice(self):
        """Lattice of the monic model (nu-coordinates when Delta != 1)."""
        lat = self.lattice
        return lat if lat.twist is None else lat.twist.nu_lattice

    def to_monic(self, alpha):
        """alpha in nu-coordinates: alpha eps^q."""
        lat = self.lattice
        return alpha if lat.twist is None else alpha * lat.twist.eps.qpow(1)
