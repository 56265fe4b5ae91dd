"""Small recursive-descent parser for ring expressions.

Grammar (whitespace ignored)::

    expr   := ["-"] term (("+" | "-") term)*
    term   := factor ("*" factor)*
    factor := atom ("^" INT)?
    atom   := INT | VARIABLE | "(" expr ")"

The caller supplies the variable syntax and the constructors, so the same
parser reads polynomials (``2*t1^2*t2 - t3``) and face-ring elements
(``v[e]*v[g] - v[p]``).
"""
import re

_TOKEN = re.compile(r"\s*(?:(\d+)|(\^)|([-+*()]))")


class ParseError(ValueError):
    pass


def parse_expression(text, var_regex, make_var, make_const):
    var_re = re.compile(r"\s*(" + var_regex + ")")
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = var_re.match(text, pos)
        if m and m.group(1):
            tokens.append(("var", m.group(1)))
            pos = m.end()
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected input at {text[pos:pos + 12]!r}")
        if m.group(1):
            tokens.append(("int", int(m.group(1))))
        elif m.group(2):
            tokens.append(("op", "^"))
        else:
            tokens.append(("op", m.group(3)))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1

    i = 0

    def peek():
        return tokens[i] if i < len(tokens) else (None, None)

    def take(kind=None, value=None):
        nonlocal i
        tok = peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise ParseError(f"expected {value or kind}, got {tok[1]!r}")
        i += 1
        return tok

    def atom():
        kind, val = peek()
        if kind == "int":
            take()
            return make_const(val)
        if kind == "var":
            take()
            return make_var(val)
        if (kind, val) == ("op", "("):
            take()
            out = expr()
            take("op", ")")
            return out
        raise ParseError(f"unexpected token {val!r}")

    def factor():
        base = atom()
        if peek() == ("op", "^"):
            take()
            _, k = take("int")
            return base ** k
        return base

    def term():
        out = factor()
        while peek() == ("op", "*"):
            take()
            out = out * factor()
        return out

    def expr():
        negate = False
        if peek() == ("op", "-"):
            take()
            negate = True
        elif peek() == ("op", "+"):
            take()
        out = term()
        if negate:
            out = -out
        while peek() in (("op", "+"), ("op", "-")):
            _, op = take()
            rhs = term()
            out = out + rhs if op == "+" else out - rhs
        return out

    if not tokens:
        raise ParseError("empty expression")
    result = expr()
    if i != len(tokens):
        raise ParseError(f"trailing input starting at {tokens[i][1]!r}")
    return result


def parse_poly(text, n):
    from .polyring import Poly

    def var(tok):
        k = int(tok[1:])
        if not 1 <= k <= n:
            raise ParseError(f"variable {tok} out of range for n={n}")
        return Poly.var(n, k - 1)

    return parse_expression(text, r"t\d+", var, lambda c: Poly.constant(n, c))
