"""Exact rational functions over named variables.

An :class:`Expr` is kept in a canonical normal form: an expanded numerator and
denominator over ``QQ`` with their polynomial GCD cancelled and the
denominator made monic with respect to a fixed graded monomial order.  Two
expressions that agree as rational functions therefore have identical
representations, and the zero test is a dictionary emptiness check.

The sparse polynomial arithmetic (including multivariate GCD) is delegated to
``sympy.polys.rings``; everything above that kernel lives here.

Variable names follow a small convention that fixes the global variable
order used for printing and for choosing the leading term:

``x``            the independent variable
``y<k>``         jet coordinate ``y^(k)`` of a single equation
``y<i>_<j>``     ``j``-th derivative of the ``i``-th unknown of a system
``p<i>_<j>``     ``j``-th formal derivative of the coefficient ``p_i``
anything else    a free parameter
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping

import numpy as np
from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyRing

from .errors import PoleError, UnassignedVariableError

_JET = re.compile(r"y(\d+)\Z")
_SYSJET = re.compile(r"y(\d+)_(\d+)\Z")
_INDET = re.compile(r"p(\d+)_(\d+)\Z")

PRIME_LIMIT = 3  # printed names use primes up to this order, y^(k) beyond


def var_key(name: str) -> tuple:
    """Sort key realising the global order x < y0 < y1 < ... < parameters."""
    if name == "x":
        return (0, 0, 0, "")
    m = _JET.match(name)
    if m:
        return (1, int(m.group(1)), 0, "")
    m = _SYSJET.match(name)
    if m:
        return (2, int(m.group(1)), int(m.group(2)), "")
    m = _INDET.match(name)
    if m:
        return (3, int(m.group(1)), int(m.group(2)), "")
    return (4, 0, 0, name)


def jet_name(k: int) -> str:
    return f"y{k}"


def system_jet_name(i: int, j: int) -> str:
    return f"y{i}_{j}"


def indeterminate_name(i: int, j: int) -> str:
    return f"p{i}_{j}"


def parse_jet_name(name: str) -> int | None:
    m = _JET.match(name)
    return int(m.group(1)) if m else None


def parse_system_jet_name(name: str) -> tuple[int, int] | None:
    m = _SYSJET.match(name)
    return (int(m.group(1)), int(m.group(2))) if m else None


def parse_indeterminate_name(name: str) -> tuple[int, int] | None:
    m = _INDET.match(name)
    return (int(m.group(1)), int(m.group(2))) if m else None


def _primed(base: str, k: int) -> str:
    if k <= PRIME_LIMIT:
        return base + "'" * k
    return f"{base}^({k})"


def display_name(name: str) -> str:
    """Name as written in the equation input language."""
    k = parse_jet_name(name)
    if k is not None:
        return _primed("y", k)
    ij = parse_system_jet_name(name)
    if ij is not None:
        return _primed(f"y{ij[0]}", ij[1])
    ij = parse_indeterminate_name(name)
    if ij is not None:
        return _primed(f"p{ij[0]}", ij[1])
    return name


def _latex_primed(base: str, k: int) -> str:
    if k <= PRIME_LIMIT:
        return base + "'" * k
    return f"{base}^{{({k})}}"


def latex_name(name: str) -> str:
    k = parse_jet_name(name)
    if k is not None:
        return _latex_primed("y", k)
    ij = parse_system_jet_name(name)
    if ij is not None:
        return _latex_primed(f"y_{{{ij[0]}}}", ij[1])
    ij = parse_indeterminate_name(name)
    if ij is not None:
        return _latex_primed(f"p_{{{ij[0]}}}", ij[1])
    return name


# ---------------------------------------------------------------------------
# polynomial kernel plumbing

_RING_NAMES: dict[int, tuple[str, ...]] = {}


@lru_cache(maxsize=None)
def _ring(names: tuple[str, ...]) -> PolyRing:
    ring = PolyRing(names, QQ, grlex)
    _RING_NAMES[id(ring)] = names
    return ring


def _names(ring: PolyRing) -> tuple[str, ...]:
    return _RING_NAMES[id(ring)]


_EMPTY = _ring(())


def _union(a: Iterable[str], b: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(a) | set(b), key=var_key))


def _embed(poly, ring: PolyRing):
    if poly.ring is ring:
        return poly
    old = _names(poly.ring)
    new = _names(ring)
    index = {n: i for i, n in enumerate(new)}
    # names absent from the target ring must not actually occur in ``poly``
    pos = [index.get(n) for n in old]
    width = len(new)
    out = {}
    for monom, coeff in poly.items():
        m = [0] * width
        for p, e in zip(pos, monom):
            if e:
                m[p] = e
        out[tuple(m)] = coeff
    return ring.from_dict(out, QQ) if out else ring.zero


def _lead_coeff(poly):
    best = None
    best_coeff = None
    for monom, coeff in poly.items():
        key = (sum(monom), monom[::-1])
        if best is None or key > best:
            best, best_coeff = key, coeff
    return best_coeff


def _to_fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def _used_positions(*polys) -> set[int]:
    used: set[int] = set()
    for poly in polys:
        for monom in poly.keys():
            for i, e in enumerate(monom):
                if e:
                    used.add(i)
    return used


# ---------------------------------------------------------------------------


class Expr:
    """Immutable exact rational function in canonical normal form."""

    __slots__ = ("_num", "_den", "_hash")

    def __init__(self, num, den=None, *, _normalize: bool = True):
        ring = num.ring
        if den is None:
            den = ring.one
        elif den.ring is not ring:
            raise ValueError("numerator and denominator live in different rings")
        if not den:
            raise PoleError("division by the zero polynomial")
        if not num:
            den = ring.one
        elif _normalize and not den.is_one:
            num, den = num.cancel(den)
            lc = _lead_coeff(den)
            if lc != 1:
                inv = QQ(1) / lc
                num = num.mul_ground(inv)
                den = den.mul_ground(inv)
        self._num = num
        self._den = den
        self._hash = None

    # -- construction -----------------------------------------------------

    @classmethod
    def const(cls, value) -> "Expr":
        if isinstance(value, Expr):
            return value
        if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
            if hasattr(value, "numerator") and hasattr(value, "denominator") and not isinstance(value, float):
                value = Fraction(int(value.numerator), int(value.denominator))
            else:
                raise TypeError(f"cannot build an exact constant from {value!r}")
        value = Fraction(value)
        return cls(_EMPTY.ground_new(QQ(value.numerator, value.denominator)), _normalize=False)

    @classmethod
    def var(cls, name: str) -> "Expr":
        ring = _ring((name,))
        return cls(ring.gens[0], _normalize=False)

    # -- structure --------------------------------------------------------

    @property
    def ring_names(self) -> tuple[str, ...]:
        return _names(self._num.ring)

    @property
    def variables(self) -> frozenset[str]:
        names = self.ring_names
        return frozenset(names[i] for i in _used_positions(self._num, self._den))

    @property
    def is_zero(self) -> bool:
        return not self._num

    @property
    def is_polynomial(self) -> bool:
        return self._den.is_one

    @property
    def is_constant(self) -> bool:
        return self._den.is_one and all(not any(m) for m in self._num.keys())

    def constant_value(self) -> Fraction:
        if not self.is_constant:
            raise ValueError("expression is not constant")
        if not self._num:
            return Fraction(0)
        return _to_fraction(self._num.get((0,) * self._num.ring.ngens, QQ(0)))

    @property
    def numerator(self) -> "Expr":
        return Expr(self._num, _normalize=False)

    @property
    def denominator(self) -> "Expr":
        return Expr(self._den, _normalize=False)

    def terms(self) -> list[tuple[dict[str, int], Fraction]]:
        """Terms of the numerator as ``(exponents-by-name, coefficient)``."""
        names = self.ring_names
        out = []
        for monom, coeff in self._num.items():
            out.append(({names[i]: e for i, e in enumerate(monom) if e}, _to_fraction(coeff)))
        return out

    def degree(self, name: str) -> int:
        """Degree of the numerator in ``name`` (``-1`` for the zero expression)."""
        if not self._num:
            return -1
        names = self.ring_names
        if name not in names:
            return 0
        i = names.index(name)
        return max(m[i] for m in self._num.keys())

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "Expr | None":
        if isinstance(other, Expr):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Expr.const(other)
        return None

    def _common(self, other: "Expr"):
        ring = self._num.ring
        if other._num.ring is ring:
            return self._num, self._den, other._num, other._den
        ring = _ring(_union(self.ring_names, other.ring_names))
        return (
            _embed(self._num, ring),
            _embed(self._den, ring),
            _embed(other._num, ring),
            _embed(other._den, ring),
        )

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        an, ad, bn, bd = self._common(other)
        if ad == bd:
            return Expr(an + bn, ad, _normalize=not ad.is_one)
        return Expr(an * bd + bn * ad, ad * bd)

    __radd__ = __add__

    def __neg__(self):
        return Expr(-self._num, self._den, _normalize=False)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return ZERO
        an, ad, bn, bd = self._common(other)
        if ad.is_one and bd.is_one:
            return Expr(an * bn, _normalize=False)
        # both factors are already reduced, so cross-cancelling suffices
        n1, d2 = an.cancel(bd) if not bd.is_one else (an, bd)
        n2, d1 = bn.cancel(ad) if not ad.is_one else (bn, ad)
        num, den = n1 * n2, d1 * d2
        lc = _lead_coeff(den)
        if lc != 1:
            inv = QQ(1) / lc
            num, den = num.mul_ground(inv), den.mul_ground(inv)
        return Expr(num, den, _normalize=False)

    __rmul__ = __mul__

    def reciprocal(self) -> "Expr":
        if self.is_zero:
            raise PoleError("reciprocal of zero")
        num, den = self._den, self._num
        lc = _lead_coeff(den)
        if lc != 1:
            inv = QQ(1) / lc
            num, den = num.mul_ground(inv), den.mul_ground(inv)
        return Expr(num, den, _normalize=False)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.reciprocal()

    def __pow__(self, e):
        if isinstance(e, Expr):
            if not e.is_constant or e.constant_value().denominator != 1:
                raise ValueError("only integer exponents are supported")
            e = int(e.constant_value())
        if not isinstance(e, int) or isinstance(e, bool):
            raise TypeError("only integer exponents are supported")
        if e < 0:
            return self.reciprocal() ** (-e)
        if e == 0:
            return ONE
        return Expr(self._num**e, self._den**e, _normalize=False)

    # -- comparison -------------------------------------------------------

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        an, ad, bn, bd = self._common(other)
        return an == bn and ad == bd

    def __hash__(self):
        if self._hash is None:
            if self.is_constant:
                self._hash = hash(self.constant_value())
            else:
                names = self.ring_names

                def canon(poly):
                    return frozenset(
                        (tuple((names[i], e) for i, e in enumerate(m) if e), _to_fraction(c))
                        for m, c in poly.items()
                    )

                self._hash = hash((canon(self._num), canon(self._den)))
        return self._hash

    # -- calculus ---------------------------------------------------------

    def diff(self, name: str) -> "Expr":
        """Exact partial derivative with respect to the variable ``name``."""
        names = self.ring_names
        if name not in names:
            return ZERO
        gen = self._num.ring.gens[names.index(name)]
        dn = self._num.diff(gen)
        if self._den.is_one:
            return Expr(dn, _normalize=False)
        dd = self._den.diff(gen)
        return Expr(dn * self._den - self._num * dd, self._den**2)

    def derive(self, rule: Callable[[str], "Expr | None"]) -> "Expr":
        """Apply the derivation sending each variable ``v`` to ``rule(v)``.

        ``rule`` returns ``None`` (or zero) for variables annihilated by the
        derivation, so the result is ``sum_v rule(v) * d(self)/dv``.
        """
        names = self.ring_names
        images: dict[str, Expr] = {}
        for i in sorted(_used_positions(self._num, self._den)):
            img = rule(names[i])
            if img is None:
                continue
            img = Expr.const(img) if not isinstance(img, Expr) else img
            if not img.is_zero:
                images[names[i]] = img
        if not images:
            return ZERO
        all_names = set(names)
        for img in images.values():
            all_names.update(img.ring_names)
        ring = _ring(tuple(sorted(all_names, key=var_key)))
        num = _embed(self._num, ring)
        den = _embed(self._den, ring)

        dens = []
        for img in images.values():
            if not img._den.is_one:
                d = _embed(img._den, ring)
                if d not in dens:
                    dens.append(d)
        common = ring.one
        for d in dens:
            common *= d
        factors = {}
        for name, img in images.items():
            inum = _embed(img._num, ring)
            if img._den.is_one:
                factors[name] = inum * common
            else:
                d = _embed(img._den, ring)
                cof = ring.one
                for other in dens:
                    if other != d:
                        cof *= other
                factors[name] = inum * cof
        gens = {n: ring.gens[_names(ring).index(n)] for n in images}

        def apply(poly):
            total = ring.zero
            for name, fac in factors.items():
                dp = poly.diff(gens[name])
                if dp:
                    total += dp * fac
            return total

        if den.is_one:
            return Expr(apply(num), common, _normalize=not common.is_one)
        return Expr(apply(num) * den - num * apply(den), den**2 * common)

    # -- substitution and evaluation --------------------------------------

    def subs(self, mapping: Mapping[str, "Expr | int | Fraction"]) -> "Expr":
        """Simultaneous substitution ``v -> mapping[v]`` followed by normalization."""
        names = self.ring_names
        used = {names[i] for i in _used_positions(self._num, self._den)}
        values = {}
        for k, v in mapping.items():
            if k in used:
                v = self._coerce(v)
                if v is None:
                    raise TypeError(f"cannot substitute {mapping[k]!r} for {k}")
                values[k] = v
        if not values:
            return self
        target = set(used) - set(values)
        for v in values.values():
            target.update(v.variables)
        ring = _ring(tuple(sorted(target, key=var_key)))
        vals = {k: (_embed(v._num, ring), _embed(v._den, ring)) for k, v in values.items()}
        n1, d1 = _subs_poly(self._num, names, ring, vals)
        if self._den.is_one:
            return Expr(n1, d1, _normalize=not d1.is_one)
        n2, d2 = _subs_poly(self._den, names, ring, vals)
        if not n2:
            raise PoleError("substitution makes the denominator vanish")
        return Expr(n1 * d2, d1 * n2)

    def evaluate(self, point: Mapping[str, object]):
        """Value at ``point``; exact ``Fraction`` when every input is rational."""
        names = self.ring_names
        used = sorted(_used_positions(self._num, self._den))
        vals = {}
        exact = True
        for i in used:
            name = names[i]
            if name not in point:
                raise UnassignedVariableError(f"no value for variable {display_name(name)}")
            v = point[name]
            if isinstance(v, Expr):
                v = v.constant_value()
            if isinstance(v, (int, Fraction)) and not isinstance(v, bool):
                v = Fraction(v)
            else:
                exact = False
            vals[i] = v
        if not exact:
            vals = {i: float(v) for i, v in vals.items()}

        def ev(poly):
            total = Fraction(0) if exact else 0.0
            for monom, coeff in poly.items():
                c = _to_fraction(coeff) if exact else float(_to_fraction(coeff))
                for i, e in enumerate(monom):
                    if e:
                        c *= vals[i] ** e
                total += c
            return total

        num = ev(self._num)
        den = ev(self._den)
        if den == 0:
            raise PoleError(f"denominator vanishes at {dict(point)}")
        return num / den

    def compile(self, names: Iterable[str]) -> Callable[..., np.ndarray]:
        """Vectorized float evaluator taking one array per name in ``names``."""
        names = list(names)
        own = self.ring_names
        missing = [own[i] for i in _used_positions(self._num, self._den) if own[i] not in names]
        if missing:
            raise UnassignedVariableError(f"no input for variable(s) {', '.join(map(display_name, missing))}")
        num = _FloatPoly(self._num, own, names)
        den = None if self._den.is_one else _FloatPoly(self._den, own, names)

        def fn(*arrays):
            if len(arrays) != len(names):
                raise TypeError(f"expected {len(names)} arrays, got {len(arrays)}")
            arrs = [np.asarray(a, dtype=float) for a in arrays]
            shape = np.broadcast_shapes(*(a.shape for a in arrs)) if arrs else ()
            arrs = [np.broadcast_to(a, shape) for a in arrs]
            top = num(arrs, shape)
            if den is None:
                return top
            bottom = den(arrs, shape)
            if np.any(bottom == 0):
                raise PoleError("denominator vanishes at an evaluation point")
            return top / bottom

        return fn

    # -- printing ---------------------------------------------------------

    def _integer_parts(self):
        """Numerator/denominator term lists scaled to coprime integer coefficients."""
        names = self.ring_names

        def items(poly):
            rows = [
                ({names[i]: e for i, e in enumerate(m) if e}, _to_fraction(c), (sum(m), m[::-1]))
                for m, c in poly.items()
            ]
            rows.sort(key=lambda r: r[2], reverse=True)
            return [(r[0], r[1]) for r in rows]

        num = items(self._num)
        den = items(self._den)
        lcm = 1
        for _, c in num + den:
            lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
        g = 0
        for _, c in num + den:
            g = math.gcd(g, int(c * lcm))
        g = g or 1
        num = [(m, int(c * lcm) // g) for m, c in num]
        den = [(m, int(c * lcm) // g) for m, c in den]
        return num, den

    def to_text(self) -> str:
        """Render in the equation input language (round-trips through ``parse``)."""
        if self.is_zero:
            return "0"
        num, den = self._integer_parts()
        top = _poly_text(num)
        if len(den) == 1 and not den[0][0] and den[0][1] == 1:
            return top
        bottom = _poly_text(den)
        if len(num) > 1:
            top = f"({top})"
        if not _is_atom(den):
            bottom = f"({bottom})"
        return f"{top}/{bottom}"

    def to_latex(self) -> str:
        if self.is_zero:
            return "0"
        num, den = self._integer_parts()
        top = _poly_latex(num)
        if len(den) == 1 and not den[0][0] and den[0][1] == 1:
            return top
        return f"\\frac{{{top}}}{{{_poly_latex(den)}}}"

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"Expr({self.to_text()!r})"


def _is_atom(terms) -> bool:
    if len(terms) != 1:
        return False
    monom, c = terms[0]
    if not monom:
        return c > 0
    return c == 1 and len(monom) == 1


def _monomial_text(monom: dict[str, int]) -> str:
    parts = []
    for name in sorted(monom, key=var_key, reverse=True):
        e = monom[name]
        shown = display_name(name)
        parts.append(shown if e == 1 else f"{shown}^{e}")
    return "*".join(parts)


def _poly_text(terms) -> str:
    out = []
    for idx, (monom, c) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        c = abs(c)
        body = _monomial_text(monom)
        if not body:
            body = str(c)
        elif c != 1:
            body = f"{c}*{body}"
        if idx == 0:
            out.append(body if sign == "+" else f"-{body}")
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


def _monomial_latex(monom: dict[str, int]) -> str:
    parts = []
    for name in sorted(monom, key=var_key, reverse=True):
        e = monom[name]
        shown = latex_name(name)
        if e == 1:
            parts.append(shown)
        elif re.fullmatch(r"[A-Za-z]\w*", shown):
            parts.append(f"{shown}^{{{e}}}")
        else:
            parts.append(f"\\left({shown}\\right)^{{{e}}}")
    return " ".join(parts)


def _poly_latex(terms) -> str:
    out = []
    for idx, (monom, c) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        c = abs(c)
        body = _monomial_latex(monom)
        if not body:
            body = str(c)
        elif c != 1:
            body = f"{c} {body}"
        if idx == 0:
            out.append(body if sign == "+" else f"-{body}")
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


class _FloatPoly:
    """Float evaluator for one polynomial, vectorized over sample points."""

    _CHUNK = 512

    def __init__(self, poly, own_names, names):
        index = {n: i for i, n in enumerate(names)}
        cols = [index.get(n) for n in own_names]
        rows = []
        coeffs = []
        for monom, c in poly.items():
            row = [0] * len(names)
            for i, e in enumerate(monom):
                if e:
                    row[cols[i]] = e
            rows.append(row)
            coeffs.append(float(_to_fraction(c)))
        self.exps = np.array(rows, dtype=np.int64).reshape(len(rows), len(names))
        self.coeffs = np.array(coeffs, dtype=float)
        self.active = [j for j in range(len(names)) if self.exps.size and self.exps[:, j].any()]

    def __call__(self, arrays, shape):
        out = np.zeros(shape, dtype=float)
        if not len(self.coeffs):
            return out
        flat = [np.ravel(arrays[j]) for j in range(len(arrays))]
        size = int(np.prod(shape)) if shape else 1
        acc = np.zeros(size, dtype=float)
        for start in range(0, len(self.coeffs), self._CHUNK):
            exps = self.exps[start : start + self._CHUNK]
            block = np.broadcast_to(self.coeffs[start : start + self._CHUNK, None], (len(exps), size)).copy()
            for j in self.active:
                col = exps[:, j]
                if col.any():
                    block *= flat[j][None, :] ** col[:, None]
            acc += block.sum(axis=0)
        return acc.reshape(shape)


def _subs_poly(poly, src_names, ring, vals):
    """Substitute into one polynomial; returns (numerator, common denominator)."""
    tgt_names = _names(ring)
    tgt_index = {n: i for i, n in enumerate(tgt_names)}
    sub_pos = [i for i, n in enumerate(src_names) if n in vals]
    keep_pos = [(i, tgt_index[n]) for i, n in enumerate(src_names) if n not in vals and n in tgt_index]
    degrees = {i: 0 for i in sub_pos}
    for monom in poly.keys():
        for i in sub_pos:
            if monom[i] > degrees[i]:
                degrees[i] = monom[i]
    groups: dict[tuple, dict] = {}
    width = len(tgt_names)
    for monom, coeff in poly.items():
        pattern = tuple(monom[i] for i in sub_pos)
        m = [0] * width
        for i, j in keep_pos:
            m[j] = monom[i]
        groups.setdefault(pattern, {})[tuple(m)] = coeff

    powers: dict[tuple, object] = {}

    def power(i, which, e):
        key = (i, which, e)
        if key not in powers:
            base = vals[src_names[i]][which]
            powers[key] = base**e if e else ring.one
        return powers[key]

    total = ring.zero
    for pattern, part in groups.items():
        factor = ring.from_dict(part, QQ)
        for i, e in zip(sub_pos, pattern):
            a = power(i, 0, e)
            if not vals[src_names[i]][1].is_one:
                a = a * power(i, 1, degrees[i] - e)
            factor = factor * a
        total += factor
    den = ring.one
    for i in sub_pos:
        if not vals[src_names[i]][1].is_one:
            den = den * power(i, 1, degrees[i])
    return total, den


ZERO = Expr.const(0)
ONE = Expr.const(1)


def var(name: str) -> Expr:
    return Expr.var(name)


def const(value) -> Expr:
    return Expr.const(value)


def x_derivative(e: Expr) -> Expr:
    return e.diff("x")
