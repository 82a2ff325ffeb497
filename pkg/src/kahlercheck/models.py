"""Built-in model manifolds and immersion fixtures with known behavior.

URIs:

* ``builtin:flat:<m>``: flat chart, potential ``sum z_k zb_k``, zero curvature
* ``builtin:fs:<m>[:<scale>]``: round chart ``(1/s) log(1 + sum z_k zb_k)``;
  constant holomorphic sectional curvature ``2 s``
* ``builtin:chyp:<m>[:<scale>]``: ``-(1/s) log(1 - sum z_k zb_k)`` on the
  ball of radius 0.9; constant holomorphic sectional curvature ``-2 s``
* ``builtin:product:fs:<m1>:fs:<m2>``: product of two round factors on
  disjoint coordinate blocks.  The factors get unequal default scales
  (1 and 2) so the factor curvatures differ; the product is neither
  Einstein nor Bochner-flat.

The immersion fixtures label spheres by their radius in the ambient metric
(g doubles the Euclidean coordinate metric of the flat chart, so coordinate
radius is r / sqrt(2)).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

from . import expr as ex
from .expr import Expr
from .geometry import ChartDomain, KahlerManifold, ball, polydisc
from .submanifold import Immersion, box

MANIFOLD_CHECKS = (
    "bochner",
    "lemma",
    "basis-sum",
    "einstein",
    "ricci-offdiag",
    "chsc",
    "reconstruct-2-3",
)


class ModelError(ValueError):
    """Unknown URI or invalid model parameters."""


def _sum_zzb(lo: int, hi: int) -> Expr:
    total: Expr = ex.mul(ex.z(lo), ex.zb(lo))
    for k in range(lo + 1, hi + 1):
        total = ex.add(total, ex.mul(ex.z(k), ex.zb(k)))
    return total


def flat_potential(m: int) -> Expr:
    return _sum_zzb(1, m)


def fs_potential(m: int, scale: float = 1.0, offset: int = 0) -> Expr:
    body = ex.log(ex.add(ex.const(1), _sum_zzb(offset + 1, offset + m)))
    return body if scale == 1.0 else ex.div(body, ex.const(scale))


def chyp_potential(m: int, scale: float = 1.0) -> Expr:
    body = ex.log(ex.sub(ex.const(1), _sum_zzb(1, m)))
    return ex.neg(body if scale == 1.0 else ex.div(body, ex.const(scale)))


_PRODUCT_SCALES = (1.0, 2.0)


def _require_dim(text: str) -> int:
    if not re.fullmatch(r"[1-9][0-9]*", text):
        raise ModelError(f"invalid dimension {text!r}")
    return int(text)


def _require_scale(text: str) -> float:
    try:
        s = float(text)
    except ValueError:
        raise ModelError(f"invalid scale {text!r}") from None
    if s <= 0:
        raise ModelError(f"scale must be positive, got {s}")
    return s


def build_model(uri: str) -> KahlerManifold:
    """Construct a builtin manifold from its URI."""
    parts = uri.split(":")
    if parts[0] != "builtin" or len(parts) < 2:
        raise ModelError(f"unknown manifold uri {uri!r}")
    kind = parts[1]
    args = parts[2:]
    if kind == "flat":
        if len(args) != 1:
            raise ModelError(f"usage: builtin:flat:<m>, got {uri!r}")
        m = _require_dim(args[0])
        return KahlerManifold(m, flat_potential(m), ball(2.0), name=uri)
    if kind in ("fs", "chyp"):
        if len(args) not in (1, 2):
            raise ModelError(f"usage: builtin:{kind}:<m>[:<scale>], got {uri!r}")
        m = _require_dim(args[0])
        scale = _require_scale(args[1]) if len(args) == 2 else 1.0
        if kind == "fs":
            return KahlerManifold(m, fs_potential(m, scale), ball(1.5), name=uri)
        return KahlerManifold(m, chyp_potential(m, scale), ball(0.9), name=uri)
    if kind == "product":
        if len(args) != 4 or args[0] != "fs" or args[2] != "fs":
            raise ModelError(f"usage: builtin:product:fs:<m1>:fs:<m2>, got {uri!r}")
        m1, m2 = _require_dim(args[1]), _require_dim(args[3])
        s1, s2 = _PRODUCT_SCALES
        potential = ex.add(
            fs_potential(m1, s1),
            fs_potential(m2, s2, offset=m1),
        )
        return KahlerManifold(m1 + m2, potential, ball(1.2), name=uri)
    raise ModelError(f"unknown manifold uri {uri!r}")


@dataclass(frozen=True)
class ModelDescriptor:
    """Expected outcomes for one builtin model, per check.

    ``expectations`` maps every manifold check name to the expected verdict
    (True = pass at the default 1e-8 tolerance); ``hsc_sign`` is the sign of
    the constant holomorphic sectional curvature when it exists.
    """

    uri: str
    expectations: dict[str, bool]
    bochner_flat: bool
    einstein: bool
    hsc_sign: int  # -1, 0, +1; meaningful when constant-HSC

    def __post_init__(self):
        missing = set(MANIFOLD_CHECKS) - set(self.expectations)
        if missing:
            raise ValueError(f"expectation table incomplete for {self.uri}: {missing}")


def builtin_descriptors() -> list[ModelDescriptor]:
    def table(good: bool) -> dict[str, bool]:
        return {name: good for name in MANIFOLD_CHECKS} | {"reconstruct-2-3": True}

    return [
        ModelDescriptor(
            uri="builtin:flat:3",
            expectations=table(True),
            bochner_flat=True,
            einstein=True,
            hsc_sign=0,
        ),
        ModelDescriptor(
            uri="builtin:fs:3",
            expectations=table(True),
            bochner_flat=True,
            einstein=True,
            hsc_sign=+1,
        ),
        ModelDescriptor(
            uri="builtin:chyp:3",
            expectations=table(True),
            bochner_flat=True,
            einstein=True,
            hsc_sign=-1,
        ),
        ModelDescriptor(
            uri="builtin:product:fs:1:fs:2",
            # The reconstruction check verifies an algebraic identity and
            # passes on every manifold; all genuine flatness checks fail.
            expectations=table(False),
            bochner_flat=False,
            einstein=False,
            hsc_sign=+1,
        ),
    ]


# --------------------------------------------------------------------------
# Immersion fixtures
# --------------------------------------------------------------------------


def _sin(v: Expr) -> Expr:
    iv = ex.mul(ex.const(1j), v)
    niv = ex.mul(ex.const(-1j), v)
    return ex.div(ex.sub(ex.exp(iv), ex.exp(niv)), ex.const(2j))


def _cos(v: Expr) -> Expr:
    iv = ex.mul(ex.const(1j), v)
    niv = ex.mul(ex.const(-1j), v)
    return ex.div(ex.add(ex.exp(iv), ex.exp(niv)), ex.const(2))


def linear_subspace_in_flat3() -> Immersion:
    """Holomorphic linear 2-plane (u1 + i u2, u3 + i u4, 0) in the flat chart."""
    ambient = build_model("builtin:flat:3")
    u1, u2, u3, u4 = ex.u(1), ex.u(2), ex.u(3), ex.u(4)
    components = [
        ex.add(u1, ex.mul(ex.const(1j), u2)),
        ex.add(u3, ex.mul(ex.const(1j), u4)),
        ex.const(0),
    ]
    return Immersion(
        ambient,
        4,
        components,
        box(-0.5, 0.5, -0.5, 0.5, -0.5, 0.5, -0.5, 0.5),
        name="linear-flat3",
    )


def sphere_in_flat2(radius: float = 1.0) -> Immersion:
    """Round 2-sphere of metric radius ``radius`` in a real 3-plane of flat C^2.

    Coordinate radius is radius / sqrt(2); mean curvature norm is 1/radius.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    ambient = build_model("builtin:flat:2")
    rho = radius / math.sqrt(2.0)
    u1, u2 = ex.u(1), ex.u(2)
    f1 = ex.mul(
        ex.const(rho),
        ex.mul(_sin(u1), ex.exp(ex.mul(ex.const(1j), u2))),
    )
    f2 = ex.mul(ex.const(rho), _cos(u1))
    return Immersion(
        ambient,
        2,
        [f1, f2],
        box(0.35, 2.75, 0.1, 6.0),
        name=f"sphere-flat2-r{radius:g}",
    )


def ellipsoid_in_flat2(axes: tuple[float, float, float] = (0.7, 0.9, 0.55)) -> Immersion:
    """Triaxial ellipsoid in a real 3-plane of flat C^2 (not umbilical)."""
    a, b, c = axes
    ambient = build_model("builtin:flat:2")
    u1, u2 = ex.u(1), ex.u(2)
    f1 = ex.add(
        ex.mul(ex.const(a), ex.mul(_sin(u1), _cos(u2))),
        ex.mul(ex.const(1j * b), ex.mul(_sin(u1), _sin(u2))),
    )
    f2 = ex.mul(ex.const(c), _cos(u1))
    return Immersion(
        ambient, 2, [f1, f2], box(0.5, 2.6, 0.1, 6.0), name="ellipsoid-flat2"
    )


def cylinder_in_flat2(rho: float = 0.6) -> Immersion:
    """Circle times line in flat C^2: distinct principal curvatures."""
    ambient = build_model("builtin:flat:2")
    u1, u2 = ex.u(1), ex.u(2)
    f1 = ex.mul(ex.const(rho), ex.exp(ex.mul(ex.const(1j), u1)))
    return Immersion(
        ambient, 2, [f1, u2], box(0.05, 6.2, -0.6, 0.6), name="cylinder-flat2"
    )


def cp1_in_cp2() -> Immersion:
    """Chart embedding z -> (z, 0) of the totally geodesic round 2-sphere
    inside the round 4-manifold (holomorphic linear slice)."""
    ambient = build_model("builtin:fs:2")
    u1, u2 = ex.u(1), ex.u(2)
    components = [ex.add(u1, ex.mul(ex.const(1j), u2)), ex.const(0)]
    return Immersion(
        ambient, 2, components, box(-0.6, 0.6, -0.6, 0.6), name="cp1-in-cp2"
    )


def real_slice_in_flat2() -> Immersion:
    """Real 2-plane (u1, u2) in flat C^2; its tangent plane is antiholomorphic."""
    ambient = build_model("builtin:flat:2")
    return Immersion(
        ambient,
        2,
        [ex.u(1), ex.u(2)],
        box(-0.7, 0.7, -0.7, 0.7),
        name="real-slice-flat2",
    )


def builtin_immersions() -> list[tuple[Immersion, dict]]:
    """Immersion fixtures with their expectation tables."""
    return [
        (
            linear_subspace_in_flat3(),
            {
                "umbilic": True,
                "totally_geodesic": True,
                "parallel_h": True,
                "mean_curvature": 0.0,
                "tangent_plane": "holomorphic",
            },
        ),
        (
            sphere_in_flat2(1.0),
            {
                "umbilic": True,
                "totally_geodesic": False,
                "parallel_h": True,
                "mean_curvature": 1.0,
                "tangent_plane": None,
            },
        ),
        (
            ellipsoid_in_flat2(),
            {
                "umbilic": False,
                "totally_geodesic": False,
                "parallel_h": False,
                "mean_curvature": None,
                "tangent_plane": None,
            },
        ),
        (
            cylinder_in_flat2(),
            {
                "umbilic": False,
                "totally_geodesic": False,
                "parallel_h": True,
                "mean_curvature": None,
                "tangent_plane": None,
            },
        ),
        (
            cp1_in_cp2(),
            {
                "umbilic": True,
                "totally_geodesic": True,
                "parallel_h": True,
                "mean_curvature": 0.0,
                "tangent_plane": "holomorphic",
            },
        ),
        (
            real_slice_in_flat2(),
            {
                "umbilic": True,
                "totally_geodesic": True,
                "parallel_h": True,
                "mean_curvature": 0.0,
                "tangent_plane": "antiholomorphic",
            },
        ),
    ]


def builtin_immersion(name: str) -> Immersion:
    for imm, _ in builtin_immersions():
        if imm.name == name:
            return imm
    known = ", ".join(i.name for i, _ in builtin_immersions())
    raise ModelError(f"unknown immersion {name!r} (known: {known})")


# --------------------------------------------------------------------------
# Spec files (key = value per line; values may be quoted; '#' comments)
# --------------------------------------------------------------------------


def _parse_kv(text: str, path: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ModelError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        value = value.strip()
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
            value = value[1:-1]
        entries[key.strip()] = value
    return entries


def _parse_domain(value: str, m: int, path: str) -> ChartDomain:
    parts = value.split()
    if parts and parts[0] == "ball" and len(parts) == 2:
        return ball(float(parts[1]))
    if parts and parts[0] == "polydisc" and len(parts) == m + 1:
        return polydisc(*(float(p) for p in parts[1:]))
    raise ModelError(
        f"{path}: domain must be 'ball <radius>' or 'polydisc <r1> ... <r{m}>'"
    )


def parse_manifold_spec(text: str, path: str = "<text>") -> KahlerManifold:
    entries = _parse_kv(text, path)
    for key in ("dimension", "potential"):
        if key not in entries:
            raise ModelError(f"{path}: missing '{key}'")
    m = _require_dim(entries["dimension"])
    potential = ex.parse_expression(entries["potential"], m, ("z", "zb"))
    domain = (
        _parse_domain(entries["domain"], m, path) if "domain" in entries else ball(1.0)
    )
    return KahlerManifold(m, potential, domain, name=path)


def load_manifold(source: str) -> KahlerManifold:
    """Load a manifold from a builtin URI or a spec file path."""
    if source.startswith("builtin:"):
        return build_model(source)
    path = Path(source)
    return parse_manifold_spec(path.read_text(), str(path))


def parse_immersion_spec(text: str, path: str = "<text>") -> Immersion:
    entries = _parse_kv(text, path)
    for key in ("ambient", "parameters", "domain"):
        if key not in entries:
            raise ModelError(f"{path}: missing '{key}'")
    ambient_src = entries["ambient"]
    if not ambient_src.startswith("builtin:") and path != "<text>":
        candidate = Path(path).parent / ambient_src
        if candidate.exists():
            ambient_src = str(candidate)
    ambient = load_manifold(ambient_src)
    n = _require_dim(entries["parameters"])
    components = []
    for k in range(1, ambient.m + 1):
        key = f"component{k}"
        if key not in entries:
            raise ModelError(f"{path}: missing '{key}'")
        components.append(ex.parse_expression(entries[key], n, ("u",)))
    parts = entries["domain"].split()
    if len(parts) != 2 * n + 1 or parts[0] != "box":
        raise ModelError(f"{path}: domain must be 'box lo1 hi1 ... lo{n} hi{n}'")
    bounds = [float(p) for p in parts[1:]]
    return Immersion(ambient, n, components, box(*bounds), name=path)


def load_immersion(source: str) -> Immersion:
    """Load an immersion from ``builtin:<name>`` or a spec file path."""
    if source.startswith("builtin:"):
        return builtin_immersion(source.split(":", 1)[1])
    path = Path(source)
    return parse_immersion_spec(path.read_text(), str(path))
