"""Shared domain types and unit conventions.

Everything is dimensionless: lengths are in units of the transition
wavelength, rates in units of the single-atom decay rate, and frequencies
are detunings from the bare transition frequency.  A complex eigenvalue
``E`` of the effective Hamiltonian is written ``E = detuning - 1j * decay / 2``.
"""
from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

import numpy as np

TWO_PI = 2.0 * math.pi

#: slack allowed on the sign of decay rates (PSD check on the decay matrix)
TOL_PSD = 1e-10

#: normalisation tolerance for mode amplitudes
TOL_NORM = 1e-12

CONFIG_KEYS = ("n_atoms", "spacing", "zeeman_amp", "flux", "phase")


class ConfigError(ValueError):
    """Invalid configuration value or malformed config file."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.message = message
        self.key = key
        self.line = line


def reduce_phase(phi: float) -> float:
    """Return ``phi`` reduced to the interval ``[0, 2*pi)``."""
    phi = float(phi)
    if not math.isfinite(phi):
        raise ValueError(f"phase must be finite, got {phi!r}")
    r = phi % TWO_PI
    # x % 2pi can round up to exactly 2pi for tiny negative x
    if r >= TWO_PI:
        r = 0.0
    return r


@dataclass(frozen=True)
class ChainConfig:
    """Physical parameters of one atomic chain.

    Parameters
    ----------
    n_atoms : int
        Number of atoms ``N``.
    spacing : float
        Lattice constant in units of the wavelength.
    zeeman_amp : float
        Amplitude of the Zeeman shift ``mu * B0`` in units of the decay rate.
    flux : float
        Spatial frequency ``b`` of the field modulation.  Stored as given;
        rational approximations are derived where needed.
    phase : float
        Modulation phase, reduced to ``[0, 2*pi)``.
    """

    n_atoms: int
    spacing: float = 0.1
    zeeman_amp: float = 10.0
    flux: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if isinstance(self.n_atoms, bool) or int(self.n_atoms) != self.n_atoms:
            raise ConfigError("must be an integer", key="n_atoms")
        if self.n_atoms < 1:
            raise ConfigError("must be >= 1", key="n_atoms")
        object.__setattr__(self, "n_atoms", int(self.n_atoms))
        for key in ("spacing", "zeeman_amp", "flux", "phase"):
            value = float(getattr(self, key))
            if not math.isfinite(value):
                raise ConfigError("must be finite", key=key)
            object.__setattr__(self, key, value)
        if self.spacing <= 0:
            raise ConfigError("must be > 0", key="spacing")
        if self.zeeman_amp < 0:
            raise ConfigError("must be >= 0", key="zeeman_amp")
        object.__setattr__(self, "phase", reduce_phase(self.phase))

    def replace(self, **changes) -> "ChainConfig":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return ChainConfig(**values)


@dataclass(frozen=True)
class ComplexEigenvalue:
    """Eigenvalue ``E = detuning - i * decay / 2``."""

    detuning: float
    decay: float

    def __post_init__(self):
        if self.decay < -TOL_PSD:
            raise ValueError(f"unphysical negative decay rate {self.decay!r}")

    @classmethod
    def from_complex(cls, energy: complex) -> "ComplexEigenvalue":
        return cls(float(energy.real), float(-2.0 * energy.imag))

    @property
    def energy(self) -> complex:
        return complex(self.detuning, -0.5 * self.decay)


@dataclass(frozen=True, eq=False)
class CollectiveMode:
    """One eigenmode of the chain.

    ``amplitudes`` are ordered ``(C_{1,+}, C_{1,-}, C_{2,+}, C_{2,-}, ...)``,
    unit-normalised, with the largest-magnitude component real and positive.
    """

    eigenvalue: ComplexEigenvalue
    amplitudes: np.ndarray
    residual: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size % 2:
            raise ValueError("amplitudes must be a flat vector of even length")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > TOL_NORM:
            raise ValueError(f"amplitudes not normalised (norm^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def detuning(self) -> float:
        return self.eigenvalue.detuning

    @property
    def decay(self) -> float:
        return self.eigenvalue.decay

    @property
    def n_atoms(self) -> int:
        return self.amplitudes.size // 2

    @property
    def plus(self) -> np.ndarray:
        return self.amplitudes[0::2]

    @property
    def minus(self) -> np.ndarray:
        return self.amplitudes[1::2]


def normalize_amplitudes(vec: np.ndarray) -> np.ndarray:
    """Scale to unit norm and rotate so the largest component is real positive."""
    vec = np.asarray(vec, dtype=complex)
    vec = vec / np.linalg.norm(vec)
    # argmax picks the first of equal maxima: deterministic
    k = int(np.argmax(np.abs(vec)))
    vec = vec * (abs(vec[k]) / vec[k])
    vec[k] = abs(vec[k])
    # renormalise once more so |v|^2 sums to 1 to machine precision
    return vec / math.sqrt(float(np.sum(np.abs(vec) ** 2)))


# --- config file -----------------------------------------------------------

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_NAMES = {"pi": math.pi, "e": math.e}
_FUNCS = {"sqrt": math.sqrt, "cos": math.cos, "sin": math.sin}


def _eval_node(node):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return node.value
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left), _eval_node(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        return _UNARY[type(node.op)](_eval_node(node.operand))
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if (
        isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id in _FUNCS
        and len(node.args) == 1
        and not node.keywords
    ):
        return _FUNCS[node.func.id](_eval_node(node.args[0]))
    raise ValueError("unsupported expression")


def parse_value(text: str) -> Any:
    """Parse a config value: a number, ``true``/``false``, or an arithmetic
    expression over numbers, ``pi``, ``sqrt``, ``cos`` and ``sin``
    (e.g. ``sqrt(5)/10``).  Anything else is returned as a stripped string.
    """
    text = text.strip()
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    try:
        return _eval_node(ast.parse(text, mode="eval"))
    except (SyntaxError, ValueError, TypeError, ZeroDivisionError, OverflowError):
        return text


def parse_config(text: str, defaults: dict | None = None):
    """Parse ``key = value`` text into a :class:`ChainConfig` and extra keys.

    Blank lines and ``#`` comments are ignored.  Keys other than the chain
    parameters are returned untouched in a dict for the consuming module.

    Returns
    -------
    config : ChainConfig
    extras : dict
    """
    values: dict[str, Any] = dict(defaults or {})
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        if not key.isidentifier():
            raise ConfigError("invalid key", key=key, line=lineno)
        if key in seen:
            raise ConfigError(f"duplicate key (first set on line {seen[key]})", key=key, line=lineno)
        seen[key] = lineno
        if not value.strip():
            raise ConfigError("missing value", key=key, line=lineno)
        parsed = parse_value(value)
        if key in CONFIG_KEYS and isinstance(parsed, (str, bool)):
            raise ConfigError(f"not a number: {value.strip()!r}", key=key, line=lineno)
        values[key] = parsed
    chain = {k: values.pop(k) for k in CONFIG_KEYS if k in values}
    if "n_atoms" not in chain:
        raise ConfigError("required key missing", key="n_atoms")
    try:
        config = ChainConfig(**chain)
    except ConfigError as exc:
        raise ConfigError(exc.message, key=exc.key, line=seen.get(exc.key)) from None
    return config, values


def format_config(config: ChainConfig, extras: dict | None = None) -> str:
    """Serialise to the ``key = value`` format; floats round-trip exactly."""
    lines = [f"n_atoms = {config.n_atoms}"]
    for key in CONFIG_KEYS[1:]:
        lines.append(f"{key} = {getattr(config, key)!r}")
    for key, value in (extras or {}).items():
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def load_config(path: str | Path, defaults: dict | None = None):
    return parse_config(Path(path).read_text(), defaults=defaults)
