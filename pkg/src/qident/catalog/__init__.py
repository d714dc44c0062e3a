"""Identity catalog: one ``.qid`` text file per identity.

File layout (``#`` starts a comment line; indented lines continue the
previous field)::

    id: B1
    paper: (Rama1psi1)
    aliases: other-name
    symbols: a, b, z[0.3,1.0]
    let: c = a*b
    q: [0.05, 0.6]
    constraint: |b/a| < |z| < 1
    lhs: psi(a; b; q; z)
    rhs: qpoch_inf(q, b/a, a*z, q/(a*z); q) / qpoch_inf(b, q/a, z, b/(a*z); q)
    negative: ...
    note: free text

Symbols take an optional ``[lo,hi]`` modulus range (log-uniform with a
uniform phase) or ``[lo,hi,real]`` (uniform on the real segment).
Constraint forms: a ``<`` chain of moduli with an optional ``@margin``,
``re(x) > 0``, ``nonzero(x)``, ``notunity(x)`` and ``lattice(x[; kind])``.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import DSLSyntaxError, DuplicateIdError, NotFoundError, UndeclaredSymbolError
from ..expr import (
    Div,
    Evaluator,
    Expr,
    Mul,
    Phi,
    Psi,
    QPochInf,
    Theta,
    WPBi,
    WPUni,
    expand_idem,
    free_symbols,
    parse,
    walk,
)
from .constraints import (
    LATTICE_KINDS,
    Constraint,
    ModulusLess,
    NonZero,
    NotInQPowerLattice,
    NotUnity,
    RePositive,
    SeriesConverges,
    lattice_distance,
)

DEFAULT_MODULUS_RANGE = (0.3, 1.8)
DEFAULT_Q_RANGE = (0.05, 0.6)
DATA_DIR = Path(__file__).with_name("data")


@dataclass(frozen=True)
class SymbolSpec:
    name: str
    lo: float = DEFAULT_MODULUS_RANGE[0]
    hi: float = DEFAULT_MODULUS_RANGE[1]
    real: bool = False


@dataclass(frozen=True)
class Identity:
    id: str
    paper_label: str
    symbols: tuple
    lhs: Expr
    rhs_forms: tuple
    constraints: tuple = ()
    lets: tuple = ()
    aliases: tuple = ()
    q_range: tuple = DEFAULT_Q_RANGE
    negative_variant: Expr | None = None
    notes: str = ""
    source: str = ""
    auto_constraints: tuple = field(default=(), compare=False)

    @property
    def symbol_names(self) -> tuple:
        return tuple(s.name for s in self.symbols)

    @property
    def all_constraints(self) -> tuple:
        return self.constraints + self.auto_constraints

    def sides(self) -> list[tuple[str, Expr]]:
        """``[("lhs", e), ("rhs[0]", e), ...]``."""
        out = [("lhs", self.lhs)]
        out += [(f"rhs[{k}]", e) for k, e in enumerate(self.rhs_forms)]
        return out

    def bind(self, point: dict, ctl) -> dict:
        """Add the derived ``let`` symbols to a point (current mpmath precision)."""
        values = dict(point)
        ev = Evaluator(values, ctl)
        for name, e in self.lets:
            values[name] = ev(e)
            ev.values = values
        return values


# ---------------------------------------------------------------------------
# parsing


_SYMBOL = re.compile(
    r"\s*([A-Za-z_][A-Za-z_0-9]*)\s*(?:\[\s*([^\],]+)\s*,\s*([^\],]+)\s*(?:,\s*(real)\s*)?\])?\s*"
)
_FIELDS = {"id", "paper", "aliases", "symbols", "let", "q", "constraint", "lhs", "rhs", "negative", "note"}
_REPEATABLE = {"let", "constraint", "rhs", "note"}


def _split_fields(text: str, source: str):
    fields: dict[str, list[tuple[str, int]]] = {}
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if line[0].isspace():
            if current is None:
                raise DSLSyntaxError("continuation line before any field", lineno, 1, source)
            key, idx = current
            value, start = fields[key][idx]
            fields[key][idx] = (value + "\n" + line, start)
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        if not sep or key not in _FIELDS:
            raise DSLSyntaxError(f"unknown field {key!r}", lineno, 1, source)
        if key in fields and key not in _REPEATABLE:
            raise DSLSyntaxError(f"field {key!r} given twice", lineno, 1, source)
        fields.setdefault(key, []).append((value, lineno))
        current = (key, len(fields[key]) - 1)
    return fields


def _parse_expr(text: str, lineno: int, source: str) -> Expr:
    try:
        return parse(text)
    except DSLSyntaxError as exc:
        raise DSLSyntaxError(f"{source}: {exc.msg}", lineno + exc.lineno - 1, exc.offset, text) from None


def _parse_symbols(text: str, lineno: int, source: str) -> tuple:
    out = []
    depth, buf, parts = 0, "", []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(buf)
            buf = ""
        else:
            buf += ch
    if buf.strip():
        parts.append(buf)
    for p in parts:
        m = _SYMBOL.fullmatch(p)
        if not m:
            raise DSLSyntaxError(f"{source}: bad symbol declaration {p.strip()!r}", lineno, 1, text)
        name, lo, hi, real = m.groups()
        if lo is None:
            out.append(SymbolSpec(name))
        else:
            lo, hi = float(lo), float(hi)
            if not lo <= hi:
                raise DSLSyntaxError(f"{source}: empty range for {name!r}", lineno, 1, text)
            out.append(SymbolSpec(name, lo, hi, bool(real)))
    return tuple(out)


def _strip_bars(s: str) -> str:
    s = s.strip()
    if len(s) >= 2 and s[0] == "|" and s[-1] == "|":
        return s[1:-1]
    return s


def _parse_constraint(text: str, lineno: int, source: str) -> list[Constraint]:
    body, _, margin_text = text.partition("@")
    margin = float(margin_text) if margin_text.strip() else None
    body = body.strip()
    m = re.fullmatch(r"re\((.*)\)\s*>\s*0", body, re.S)
    if m:
        return [RePositive(_parse_expr(m.group(1), lineno, source), margin)]
    m = re.fullmatch(r"(nonzero|notunity|lattice)\((.*)\)", body, re.S)
    if m:
        kind, arg = m.groups()
        if kind == "lattice":
            expr_text, _, lk = arg.partition(";")
            lk = lk.strip() or "nonpositive"
            if lk not in LATTICE_KINDS:
                raise DSLSyntaxError(f"{source}: unknown lattice kind {lk!r}", lineno, 1, text)
            return [NotInQPowerLattice(_parse_expr(expr_text, lineno, source), lk)]
        e = _parse_expr(arg, lineno, source)
        return [NonZero(e) if kind == "nonzero" else NotUnity(e)]
    pieces = body.split("<")
    if len(pieces) < 2:
        raise DSLSyntaxError(f"{source}: unrecognised constraint {body!r}", lineno, 1, text)
    exprs = [_parse_expr(_strip_bars(p), lineno, source) for p in pieces]
    return [ModulusLess(x, y, margin) for x, y in zip(exprs, exprs[1:])]


def _parse_range(text: str, lineno: int, source: str) -> tuple:
    m = re.fullmatch(r"\s*\[\s*([^,\]]+)\s*,\s*([^,\]]+)\s*\]\s*", text)
    if not m:
        raise DSLSyntaxError(f"{source}: q range must look like [lo, hi]", lineno, 1, text)
    lo, hi = float(m.group(1)), float(m.group(2))
    if not 0 < lo <= hi < 1:
        raise DSLSyntaxError(f"{source}: q range must lie inside (0, 1)", lineno, 1, text)
    return (lo, hi)


def auto_constraints(exprs) -> tuple:
    """Lattice guards and convergence conditions implied by the expressions."""
    out: list[Constraint] = []
    seen = set()

    def add(c):
        if c not in seen:
            seen.add(c)
            out.append(c)

    for e in exprs:
        for node in walk(expand_idem(e)):
            if isinstance(node, QPochInf):
                for x in node.args:
                    add(NotInQPowerLattice(x, "nonpositive"))
            elif isinstance(node, Theta):
                for x in node.args:
                    add(NotInQPowerLattice(x, "all"))
            elif isinstance(node, Phi):
                for x in node.dens:
                    add(NotInQPowerLattice(x, "nonpositive"))
                add(SeriesConverges(node))
            elif isinstance(node, Psi):
                for x in node.dens:
                    add(NotInQPowerLattice(x, "nonpositive"))
                for x in node.nums:
                    add(NotInQPowerLattice(x, "positive"))
                add(SeriesConverges(node))
            elif isinstance(node, (WPUni, WPBi)):
                add(NotUnity(node.a))
                # the implied denominators q a / b_i
                for x in node.tail:
                    add(NotInQPowerLattice(_wp_den(node, x), "nonpositive"))
                    if isinstance(node, WPBi):
                        add(NotInQPowerLattice(x, "positive"))
                add(SeriesConverges(node))
    return tuple(out)


def _wp_den(node, x) -> Expr:
    return Div(Mul(node.base, node.a), x)


def parse_identity(text: str, source: str = "<string>") -> Identity:
    """Parse one ``.qid`` document and check its symbol invariants."""
    fields = _split_fields(text, source)
    for required in ("id", "symbols", "lhs", "rhs"):
        if required not in fields:
            raise DSLSyntaxError(f"{source}: missing field {required!r}", 1, 1, text)

    def one(key, default=""):
        return fields[key][0][0].strip() if key in fields else default

    ident = one("id")
    symbols = _parse_symbols(one("symbols"), fields["symbols"][0][1], source)
    names = [s.name for s in symbols]
    if len(set(names)) != len(names) or "q" in names:
        raise DSLSyntaxError(f"{source}: duplicate symbol or redeclared q", fields["symbols"][0][1], 1, text)
    lets = []
    for value, lineno in fields.get("let", []):
        name, eq, rhs = value.partition("=")
        name = name.strip()
        if not eq or not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
            raise DSLSyntaxError(f"{source}: let needs 'name = expr'", lineno, 1, text)
        lets.append((name, _parse_expr(rhs, lineno, source)))
    constraints = []
    for value, lineno in fields.get("constraint", []):
        constraints.extend(_parse_constraint(value, lineno, source))
    lhs = _parse_expr(one("lhs"), fields["lhs"][0][1], source)
    rhs = tuple(_parse_expr(v, ln, source) for v, ln in fields["rhs"])
    negative = None
    if "negative" in fields:
        v, ln = fields["negative"][0]
        negative = _parse_expr(v, ln, source)
    q_range = _parse_range(*fields["q"][0], source) if "q" in fields else DEFAULT_Q_RANGE
    aliases = tuple(a.strip() for a in one("aliases").split(",") if a.strip())
    notes = " ".join(" ".join(v.split()) for v, _ in fields.get("note", []))

    declared = set(names) | {"q"}
    for name, e in lets:
        _check_symbols(free_symbols(e), declared, source, f"let {name}")
        declared.add(name)
    parts = [("lhs", lhs)] + [(f"rhs[{k}]", e) for k, e in enumerate(rhs)]
    if negative is not None:
        parts.append(("negative", negative))
    for label, e in parts:
        _check_symbols(free_symbols(e), declared, source, label)
    for c in constraints:
        _check_symbols(c.symbols(), declared, source, "constraint")

    return Identity(
        id=ident,
        paper_label=one("paper"),
        symbols=symbols,
        lhs=lhs,
        rhs_forms=rhs,
        constraints=tuple(constraints),
        lets=tuple(lets),
        aliases=aliases,
        q_range=q_range,
        negative_variant=negative,
        notes=notes,
        source=source,
        auto_constraints=auto_constraints([e for _, e in parts]),
    )


def _check_symbols(used, declared, source, where):
    extra = sorted(set(used) - declared)
    if extra:
        raise UndeclaredSymbolError(f"{source}: {where} uses undeclared symbol(s) {', '.join(extra)}")


# ---------------------------------------------------------------------------
# loading and lookup


def load(path) -> list[Identity]:
    """Parse every ``*.qid`` file in ``path`` (sorted by file name)."""
    path = Path(path)
    out: list[Identity] = []
    keys: dict[str, str] = {}
    for f in sorted(path.glob("*.qid")):
        ident = parse_identity(f.read_text(encoding="utf-8"), str(f))
        for key in (ident.id,) + ident.aliases:
            if key in keys:
                raise DuplicateIdError(f"{key!r} is defined in both {keys[key]} and {f}")
            keys[key] = str(f)
        out.append(ident)
    return out


class Catalog:
    """Loaded identities with id and alias lookup."""

    def __init__(self, identities):
        self.identities = list(identities)
        self._by_key = {}
        for ident in self.identities:
            for key in (ident.id,) + ident.aliases:
                if key in self._by_key:
                    raise DuplicateIdError(f"duplicate catalog key {key!r}")
                self._by_key[key] = ident

    @classmethod
    def from_path(cls, path) -> "Catalog":
        return cls(load(path))

    def get(self, key: str) -> Identity:
        try:
            return self._by_key[key]
        except KeyError:
            raise NotFoundError(f"no identity with id or alias {key!r}") from None

    def list_ids(self) -> list[str]:
        return [i.id for i in self.identities]

    def __len__(self):
        return len(self.identities)

    def __iter__(self):
        return iter(self.identities)


def catalog_path() -> Path:
    """Catalog directory: ``$QIDENT_CATALOG`` if set, else the shipped data."""
    env = os.environ.get("QIDENT_CATALOG")
    return Path(env) if env else DATA_DIR


_cache: dict[Path, Catalog] = {}


def default_catalog() -> Catalog:
    p = catalog_path().resolve()
    if p not in _cache:
        _cache[p] = Catalog.from_path(p)
    return _cache[p]


def get(key: str) -> Identity:
    return default_catalog().get(key)


def list_ids() -> list[str]:
    return default_catalog().list_ids()


__all__ = [
    "Catalog",
    "Constraint",
    "DATA_DIR",
    "Identity",
    "ModulusLess",
    "NonZero",
    "NotInQPowerLattice",
    "NotUnity",
    "RePositive",
    "SeriesConverges",
    "SymbolSpec",
    "auto_constraints",
    "catalog_path",
    "default_catalog",
    "get",
    "lattice_distance",
    "list_ids",
    "load",
    "parse_identity",
]
