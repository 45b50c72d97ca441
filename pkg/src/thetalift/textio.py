"""Plain-text formats shared by the CLI and the pipeline.

Integer polynomials are written like ``z^3 - z + 1`` or ``2*x^4 + x - 7``
(one variable, ``*`` optional between a coefficient and the variable) or as a
comma-separated coefficient list, lowest degree first.
"""

import re

from .errors import ConfigError
from .finite_field import FqContext
from .padic import zq_context

_TERM = re.compile(r"([+-]?)\s*(\d*)\s*\*?\s*(?:([a-zA-Z]\w*)\s*(?:\^\s*(\d+))?)?")


def parse_int_poly(text, var=None):
    """Little-endian integer coefficients of a one-variable polynomial."""
    text = text.strip()
    if not text:
        raise ConfigError("empty polynomial")
    if re.fullmatch(r"-?\d+(\s*,\s*-?\d+)*", text) and "," in text:
        return [int(v) for v in text.split(",")]
    compact = text.replace(" ", "")
    pos = 0
    coeffs = {}
    seen_var = None
    while pos < len(compact):
        m = _TERM.match(compact, pos)
        if not m or m.end() == pos or (not m.group(2) and not m.group(3)):
            raise ConfigError(f"cannot parse polynomial {text!r} near {compact[pos:]!r}")
        sign, digits, name, exp = m.groups()
        if name is not None:
            if var is not None and name != var:
                raise ConfigError(f"unexpected variable {name!r} in {text!r}")
            if seen_var is not None and name != seen_var:
                raise ConfigError(f"polynomial {text!r} mixes variables")
            seen_var = name
            deg = int(exp) if exp else 1
        else:
            deg = 0
        c = int(digits) if digits else 1
        coeffs[deg] = coeffs.get(deg, 0) + (-c if sign == "-" else c)
        pos = m.end()
        if pos < len(compact) and compact[pos] not in "+-":
            raise ConfigError(f"cannot parse polynomial {text!r} near {compact[pos:]!r}")
    top = max(coeffs)
    return [coeffs.get(i, 0) for i in range(top + 1)]


def make_field(p, modulus_text=None):
    """F_p or F_p[z]/(modulus); the modulus may be text or a coefficient list."""
    if modulus_text is None or str(modulus_text).strip() in ("", "z"):
        return FqContext(p, [0, 1])
    mod = modulus_text if isinstance(modulus_text, list) else parse_int_poly(str(modulus_text), "z")
    return FqContext(p, mod)


def parse_element(text, fq, default_m=None):
    """A residue element (``z^k``, ``3^2:[..]``, polynomial in z, integer) or a p-adic one (``3^2@m:[..]``)."""
    text = text.strip()
    if "@" in text:
        m = int(re.search(r"@(\d+)", text).group(1))
        return zq_context(fq, max(m, default_m or 0)).parse(text)
    try:
        return fq.parse(text)
    except ValueError:
        coeffs = parse_int_poly(text, fq.name)
        acc = fq.zero
        for c in reversed(coeffs):
            acc = acc * fq.gen + fq(c)
        return acc


def parse_list(text):
    """Split on commas outside square brackets."""
    out, depth, cur = [], 0, []
    for ch in str(text):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur).strip())
    return [t for t in out if t]
