"""Terms of the restricted language: sum a_i*2^|x_i| + sum b_j*x_j + sum d_k*|x_k| + c.

The ``|x|`` part only ever holds exponents produced by linearisation; parsed
input never contains it unless written as ``abs(x)``.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping

Coeffs = tuple[tuple[str, int], ...]


def _canon(items: Mapping[str, int] | Iterable[tuple[str, int]]) -> Coeffs:
    if isinstance(items, Mapping):
        items = items.items()
    return tuple(sorted((v, c) for v, c in items if c))


def _merge(a: Coeffs, b: Coeffs, scale_b: int = 1) -> Coeffs:
    if not b:
        return a
    acc = dict(a)
    for v, c in b:
        acc[v] = acc.get(v, 0) + scale_b * c
    return _canon(acc)


class Term:
    """Immutable linear term over powers, variables and absolute values."""

    __slots__ = ("pows", "lins", "abss", "const", "_hash")

    def __init__(self, pows=(), lins=(), abss=(), const: int = 0):
        self.pows: Coeffs = _canon(pows) if pows else ()
        self.lins: Coeffs = _canon(lins) if lins else ()
        self.abss: Coeffs = _canon(abss) if abss else ()
        self.const: int = int(const)
        self._hash = hash((self.pows, self.lins, self.abss, self.const))

    @classmethod
    def _raw(cls, pows: Coeffs, lins: Coeffs, abss: Coeffs, const: int) -> "Term":
        t = cls.__new__(cls)
        t.pows, t.lins, t.abss, t.const = pows, lins, abss, const
        t._hash = hash((pows, lins, abss, const))
        return t

    # constructors -------------------------------------------------------

    @classmethod
    def constant(cls, c: int) -> "Term":
        return cls._raw((), (), (), int(c))

    @classmethod
    def var(cls, x: str, coeff: int = 1) -> "Term":
        return cls._raw((), ((x, coeff),) if coeff else (), (), 0)

    @classmethod
    def power(cls, x: str, coeff: int = 1) -> "Term":
        return cls._raw(((x, coeff),) if coeff else (), (), (), 0)

    @classmethod
    def absolute(cls, x: str, coeff: int = 1) -> "Term":
        return cls._raw((), (), ((x, coeff),) if coeff else (), 0)

    # equality / hashing -------------------------------------------------

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        return (
            self._hash == other._hash
            and self.const == other.const
            and self.pows == other.pows
            and self.lins == other.lins
            and self.abss == other.abss
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Term({self})"

    def __str__(self):
        return render_term(self)

    # arithmetic ---------------------------------------------------------

    def __add__(self, other) -> "Term":
        if isinstance(other, int):
            return Term._raw(self.pows, self.lins, self.abss, self.const + other)
        return Term._raw(
            _merge(self.pows, other.pows),
            _merge(self.lins, other.lins),
            _merge(self.abss, other.abss),
            self.const + other.const,
        )

    __radd__ = __add__

    def __sub__(self, other) -> "Term":
        if isinstance(other, int):
            return Term._raw(self.pows, self.lins, self.abss, self.const - other)
        return Term._raw(
            _merge(self.pows, other.pows, -1),
            _merge(self.lins, other.lins, -1),
            _merge(self.abss, other.abss, -1),
            self.const - other.const,
        )

    def __rsub__(self, other: int) -> "Term":
        return (-self) + other

    def __neg__(self) -> "Term":
        return self * -1

    def __mul__(self, n: int) -> "Term":
        if n == 1:
            return self
        if n == 0:
            return ZERO
        return Term._raw(
            tuple((v, c * n) for v, c in self.pows),
            tuple((v, c * n) for v, c in self.lins),
            tuple((v, c * n) for v, c in self.abss),
            self.const * n,
        )

    __rmul__ = __mul__

    # inspection ---------------------------------------------------------

    def is_ground(self) -> bool:
        return not (self.pows or self.lins or self.abss)

    def is_zero(self) -> bool:
        return self.is_ground() and self.const == 0

    def variables(self) -> set[str]:
        out = {v for v, _ in self.pows}
        out.update(v for v, _ in self.lins)
        out.update(v for v, _ in self.abss)
        return out

    def power_vars(self) -> set[str]:
        return {v for v, _ in self.pows}

    def linear_vars(self) -> set[str]:
        """Variables occurring outside powers (plain or under ``|.|``)."""
        out = {v for v, _ in self.lins}
        out.update(v for v, _ in self.abss)
        return out

    def pow_coeff(self, x: str) -> int:
        for v, c in self.pows:
            if v == x:
                return c
        return 0

    def lin_coeff(self, x: str) -> int:
        for v, c in self.lins:
            if v == x:
                return c
        return 0

    def abs_coeff(self, x: str) -> int:
        for v, c in self.abss:
            if v == x:
                return c
        return 0

    def coefficients(self) -> Iterator[int]:
        for _, c in self.pows:
            yield c
        for _, c in self.lins:
            yield c
        for _, c in self.abss:
            yield c

    def num_vars(self) -> int:
        return len(self.variables())

    def homogeneous(self) -> "Term":
        if self.const == 0:
            return self
        return Term._raw(self.pows, self.lins, self.abss, 0)

    def with_const(self, c: int) -> "Term":
        return Term._raw(self.pows, self.lins, self.abss, c)

    def norm_inf(self) -> int:
        return max(abs(self.const), max((abs(c) for c in self.coefficients()), default=0))

    def norm_one(self) -> int:
        return sum(abs(c) for c in self.coefficients()) + abs(self.const)

    def project(self, keep: set[str] | frozenset[str]) -> "Term":
        """Homogeneous part over variables in ``keep``."""
        return Term._raw(
            tuple(p for p in self.pows if p[0] in keep),
            tuple(p for p in self.lins if p[0] in keep),
            tuple(p for p in self.abss if p[0] in keep),
            0,
        )

    def drop(self, keep_out: set[str] | frozenset[str]) -> "Term":
        """Homogeneous part over variables *not* in ``keep_out``."""
        return Term._raw(
            tuple(p for p in self.pows if p[0] not in keep_out),
            tuple(p for p in self.lins if p[0] not in keep_out),
            tuple(p for p in self.abss if p[0] not in keep_out),
            0,
        )

    def sign_canonical(self) -> tuple["Term", int]:
        """Return (s, e) with s = e*self and the leading coefficient of s positive."""
        lead = next(self.coefficients(), self.const)
        if lead < 0:
            return -self, -1
        return self, 1

    # substitution -------------------------------------------------------

    def without_pow(self, x: str) -> "Term":
        return Term._raw(tuple(p for p in self.pows if p[0] != x), self.lins, self.abss, self.const)

    def without_lin(self, x: str) -> "Term":
        return Term._raw(self.pows, tuple(p for p in self.lins if p[0] != x), self.abss, self.const)

    def without_abs(self, x: str) -> "Term":
        return Term._raw(self.pows, self.lins, tuple(p for p in self.abss if p[0] != x), self.const)

    def subst_pow(self, x: str, t: "Term") -> "Term":
        a = self.pow_coeff(x)
        if not a:
            return self
        return self.without_pow(x) + t * a

    def subst_lin(self, x: str, t: "Term") -> "Term":
        b = self.lin_coeff(x)
        if not b:
            return self
        return self.without_lin(x) + t * b

    def subst_abs(self, x: str, t: "Term") -> "Term":
        d = self.abs_coeff(x)
        if not d:
            return self
        return self.without_abs(x) + t * d

    def evaluate(self, env: Mapping[str, int]) -> int:
        total = self.const
        for v, c in self.pows:
            total += c << abs(env[v])
        for v, c in self.lins:
            total += c * env[v]
        for v, c in self.abss:
            total += c * abs(env[v])
        return total


ZERO = Term.constant(0)


def render_term(t: Term) -> str:
    parts: list[tuple[int, str]] = []
    for v, c in t.pows:
        parts.append((c, f"pow({v})"))
    for v, c in t.lins:
        parts.append((c, v))
    for v, c in t.abss:
        parts.append((c, f"abs({v})"))
    if not parts:
        return str(t.const)
    out = []
    for i, (c, s) in enumerate(parts):
        mag = abs(c)
        body = s if mag == 1 else f"{mag}*{s}"
        if i == 0:
            out.append(body if c > 0 else f"-{body}")
        else:
            out.append(f" + {body}" if c > 0 else f" - {body}")
    if t.const > 0:
        out.append(f" + {t.const}")
    elif t.const < 0:
        out.append(f" - {-t.const}")
    return "".join(out)
