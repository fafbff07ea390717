"""Declarative state recipes and their canonical text form.

Grammar::

    spec    := family "{" param ("," param)* "}"
    param   := key "=" value
    family  := fock | coherent | even_cat | odd_cat
             | squeezed_fock | subtracted_squeezed

Keys per family (order in the canonical form):

    fock                 n, cutoff
    coherent             alpha, cutoff
    even_cat, odd_cat    alpha, cutoff
    squeezed_fock        r | r_db, theta, n, cutoff
    subtracted_squeezed  r | r_db, theta, k, cutoff

``alpha`` accepts Python complex literals (``1.6``, ``1.2+0.5j``); ``theta``
defaults to 0 and ``cutoff`` to 80. Floats are written with ``repr`` so
``parse(format(spec)) == spec`` holds exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import fock
from .fock import FockVector, db_to_r

DEFAULT_CUTOFF = 80

_KEYS = {
    "fock": ("n", "cutoff"),
    "coherent": ("alpha", "cutoff"),
    "even_cat": ("alpha", "cutoff"),
    "odd_cat": ("alpha", "cutoff"),
    "squeezed_fock": ("r", "r_db", "theta", "n", "cutoff"),
    "subtracted_squeezed": ("r", "r_db", "theta", "k", "cutoff"),
}
_INT_KEYS = {"n", "k", "cutoff"}
_FLOAT_KEYS = {"r", "r_db", "theta"}
_SPEC_RE = re.compile(r"^\s*([a-z_]+)\s*\{(.*)\}\s*$")


class SpecError(ValueError):
    """Malformed state specification."""


def _fmt(value) -> str:
    if isinstance(value, complex):
        if value.imag == 0:
            return repr(value.real)
        return repr(value).strip("()")
    return repr(value)


@dataclass(frozen=True)
class StateSpec:
    family: str
    params: tuple[tuple[str, object], ...]
    cutoff: int = DEFAULT_CUTOFF

    def __post_init__(self):
        if self.family not in _KEYS:
            raise SpecError(f"unknown family {self.family!r}; expected one of {sorted(_KEYS)}")
        params = dict(self.params)
        allowed = set(_KEYS[self.family]) - {"cutoff"}
        unknown = set(params) - allowed
        if unknown:
            raise SpecError(f"{self.family}: unexpected keys {sorted(unknown)}")
        clean = {}
        for key, value in params.items():
            try:
                if key in _INT_KEYS:
                    if isinstance(value, float) and not value.is_integer():
                        raise ValueError
                    value = int(value)
                elif key in _FLOAT_KEYS:
                    value = float(value)
                else:
                    value = complex(value)
            except (TypeError, ValueError):
                raise SpecError(f"{self.family}: bad value for {key}: {value!r}") from None
            clean[key] = value
        if self.family in ("squeezed_fock", "subtracted_squeezed"):
            if ("r" in clean) == ("r_db" in clean):
                raise SpecError(f"{self.family}: give exactly one of r, r_db")
            clean.setdefault("theta", 0.0)
        required = allowed - {"r", "r_db", "theta"}
        missing = required - set(clean)
        if missing:
            raise SpecError(f"{self.family}: missing keys {sorted(missing)}")
        if self.family == "subtracted_squeezed" and clean["k"] not in (1, 2):
            raise SpecError("subtracted_squeezed: k must be 1 or 2")
        ordered = tuple((k, clean[k]) for k in _KEYS[self.family] if k in clean)
        object.__setattr__(self, "params", ordered)
        object.__setattr__(self, "cutoff", int(self.cutoff))
        if self.cutoff < 2:
            raise SpecError("cutoff must be >= 2")

    @classmethod
    def make(cls, family: str, cutoff: int = DEFAULT_CUTOFF, **params) -> "StateSpec":
        return cls(family, tuple(params.items()), cutoff)

    def get(self, key, default=None):
        return dict(self.params).get(key, default)

    @property
    def squeeze_r(self) -> float | None:
        if "r" in dict(self.params):
            return self.get("r")
        if "r_db" in dict(self.params):
            return db_to_r(self.get("r_db"))
        return None

    def with_cutoff(self, cutoff: int) -> "StateSpec":
        return StateSpec(self.family, self.params, cutoff)

    def to_text(self) -> str:
        body = ",".join(f"{k}={_fmt(v)}" for k, v in self.params)
        return f"{self.family}{{{body},cutoff={self.cutoff}}}"

    __str__ = to_text

    def build(self) -> FockVector:
        fam, c = self.family, self.cutoff
        if fam == "fock":
            return fock.make_fock(self.get("n"), c)
        if fam == "coherent":
            return fock.make_coherent(self.get("alpha"), c)
        if fam in ("even_cat", "odd_cat"):
            return fock.make_cat(self.get("alpha"), fam.split("_")[0], c)
        params = fock.SqueezeParams(self.squeeze_r, self.get("theta"))
        if fam == "squeezed_fock":
            return fock.apply_squeeze(fock.make_fock(self.get("n"), c), params)
        # a^k weights the parent's tail by ~n^k: build it with headroom, then
        # truncate so the leak check and tail guard see the subtracted state
        parent = fock.apply_squeeze(fock.make_fock(0, c + fock.WORK_MARGIN), params)
        child = fock.subtract_photons(parent, self.get("k"))
        return fock.truncate_state(child, c)


def parse_spec(text: str) -> StateSpec:
    m = _SPEC_RE.match(text)
    if not m:
        raise SpecError(f"cannot parse state spec {text!r}; expected family{{key=value,...}}")
    family, body = m.groups()
    params = {}
    for item in filter(None, (s.strip() for s in body.split(","))):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise SpecError(f"bad parameter {item!r} in {text!r}")
        if key in params:
            raise SpecError(f"duplicate key {key!r} in {text!r}")
        value = value.strip()
        if key in _INT_KEYS or key in _FLOAT_KEYS:
            try:
                params[key] = int(value) if key in _INT_KEYS else float(value)
            except ValueError:
                raise SpecError(f"bad value for {key}: {value!r}") from None
        else:
            params[key] = value.replace(" ", "")
    cutoff = params.pop("cutoff", DEFAULT_CUTOFF)
    return StateSpec(family, tuple(params.items()), cutoff)


def build_escalating(spec: StateSpec, step: int = 40, max_cutoff: int = 400) -> FockVector:
    """Build ``spec``, raising the cutoff in ``step`` increments until the tail guard passes."""
    cutoff = spec.cutoff
    while True:
        try:
            return spec.with_cutoff(cutoff).build()
        except fock.TruncationError:
            if cutoff + step > max_cutoff:
                raise
            cutoff += step
