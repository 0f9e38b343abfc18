"""Built-in evolution systems and the declarative system file format.

A system file is a list of ``key: value`` lines; ``#`` starts a comment::

    indep: t, x, y        # independent variables, in order
    time: t               # distinguished time variable (default t)
    dep: u                # dependent variable name (default u)
    rhs: 4*u_x^3 + u_xxx  # right-hand side Phi of u_t = Phi
    killed: y             # optional; jets with a y-derivative vanish
    weights: t=-3, x=-1   # optional scaling weights of independent variables
    base_weight: 0        # optional weight of u itself
    max_order: 16         # optional jet-order cap
"""

from __future__ import annotations

import os
from typing import Optional

from .calculus import PMKDV_WEIGHTS, EvolutionSystem, WeightSpec
from .jetcore import DEFAULT_MAX_ORDER, JetContext, JetError, parse_expr

BUILTIN = ("pmkdv", "pmkdv-y", "pmkdv-3d")


def default_max_order() -> int:
    value = os.environ.get("JETVAR_MAX_ORDER")
    if not value:
        return DEFAULT_MAX_ORDER
    try:
        n = int(value)
    except ValueError:
        raise JetError(f"JETVAR_MAX_ORDER must be an integer, got {value!r}") from None
    if n < 1:
        raise JetError("JETVAR_MAX_ORDER must be >= 1")
    return n


def builtin_system(name: str, max_order: Optional[int] = None) -> EvolutionSystem:
    """Fresh instance of one of the three potential mKdV systems."""
    max_order = max_order or default_max_order()
    if name == "pmkdv":
        ctx = JetContext(("t", "x"), max_order=max_order)
        rhs = "4*u_x^3 + u_xxx"
        killed = ()
        w = WeightSpec.of(t=-3, x=-1)
    elif name == "pmkdv-y":
        ctx = JetContext(("t", "x", "y"), max_order=max_order)
        rhs = "4*u_x^3 + u_xxx"
        killed = ("y",)
        w = PMKDV_WEIGHTS
    elif name == "pmkdv-3d":
        ctx = JetContext(("t", "x", "y"), max_order=max_order)
        rhs = "4*u_x^3 + u_xxx + u_yyy"
        killed = ()
        w = PMKDV_WEIGHTS
    else:
        raise JetError(f"unknown system {name!r}; built-ins are {', '.join(BUILTIN)}")
    return EvolutionSystem(ctx, parse_expr(rhs, ctx), "t", killed, w, name)


def parse_system(text: str, name: str = "") -> EvolutionSystem:
    fields = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise JetError(f"line {lineno}: expected 'key: value'")
        key, value = (s.strip() for s in line.split(":", 1))
        if key in fields:
            raise JetError(f"line {lineno}: duplicate key {key!r}")
        fields[key] = value
    unknown = set(fields) - {"indep", "time", "dep", "rhs", "killed", "weights",
                             "base_weight", "max_order"}
    if unknown:
        raise JetError(f"unknown keys: {', '.join(sorted(unknown))}")
    for required in ("indep", "rhs"):
        if required not in fields:
            raise JetError(f"missing key {required!r}")

    def names(value):
        return tuple(s.strip() for s in value.split(",") if s.strip())

    max_order = int(fields["max_order"]) if "max_order" in fields else default_max_order()
    ctx = JetContext(names(fields["indep"]), fields.get("dep", "u"), max_order)
    weights = None
    if "weights" in fields:
        pairs = {}
        for item in names(fields["weights"]):
            var, _, w = item.partition("=")
            ctx.index(var.strip())
            pairs[var.strip()] = int(w)
        weights = WeightSpec(tuple(pairs.items()), int(fields.get("base_weight", 0)))
    return EvolutionSystem(ctx, parse_expr(fields["rhs"], ctx), fields.get("time", "t"),
                           names(fields.get("killed", "")), weights, name)


def load_system(spec: str) -> EvolutionSystem:
    """A built-in name, or a path to a system file."""
    if spec in BUILTIN:
        return builtin_system(spec)
    if os.path.exists(spec):
        with open(spec) as fh:
            return parse_system(fh.read(), os.path.basename(spec))
    raise JetError(f"unknown system {spec!r}; built-ins are {', '.join(BUILTIN)}")
