"""Text, LaTeX and JSON rendering of equation sets and analyses.

JSON never carries native numbers: scalars are exact strings ("3/2",
"-1/4+1/4i") and index values are strings as well.  Key order is fixed by
construction, so identical inputs give byte-identical documents.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Sequence

from . import __version__
from .derive import TensorEquation
from .exact import VARIABLES, CRational, MomentumPoly, format_crational, parse_crational
from .fields import LinearForm, parse_symbol

EQUATIONS_SCHEMA = "bwspin2.equations/1"
REPORT_SCHEMA = "bwspin2.report/1"


@dataclass
class Analysis:
    name: str
    inputs: dict  # str -> str, echoed verbatim
    results: dict  # str -> str | bool | list
    passed: bool | None = None


@dataclass
class Report:
    convention_ledger: dict
    equation_sets: dict = field(default_factory=dict)  # name -> list[TensorEquation]
    analyses: list = field(default_factory=list)
    versions: dict = field(default_factory=dict)

    def add(self, analysis: Analysis) -> Analysis:
        self.analyses.append(analysis)
        return analysis

    @property
    def passed(self) -> bool:
        return all(a.passed is not False for a in self.analyses)


def config_hash(inputs: dict) -> str:
    blob = json.dumps(inputs, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def versions_for(inputs: dict) -> dict:
    return {"artifact": __version__, "config_hash": config_hash(inputs)}


# --- monomials and polynomials ----------------------------------------------------

def format_monomial(mono: tuple) -> str:
    parts = [v if e == 1 else f"{v}^{e}" for v, e in zip(VARIABLES, mono) if e]
    return "*".join(parts) if parts else "1"


def parse_monomial(text: str) -> tuple:
    exps = [0] * len(VARIABLES)
    if text.strip() == "1":
        return tuple(exps)
    for factor in text.split("*"):
        name, _, power = factor.strip().partition("^")
        if name not in VARIABLES:
            raise ValueError(f"unknown variable {name!r} in monomial {text!r}")
        exps[VARIABLES.index(name)] += int(power) if power else 1
    return tuple(exps)


def poly_to_json(c: MomentumPoly) -> list:
    return [{"monomial": format_monomial(mono), "value": format_crational(v)} for mono, v in c.sorted_terms()]


def poly_from_json(items: list) -> MomentumPoly:
    return MomentumPoly({parse_monomial(it["monomial"]): parse_crational(it["value"]) for it in items})


def equation_to_json(eq: TensorEquation) -> dict:
    return {
        "provenance": eq.provenance,
        "free_indices": [[k, str(v)] for k, v in eq.free_indices],
        "terms": [{"symbol": str(s), "coefficient": poly_to_json(c)} for s, c in eq.lhs.sorted_items()],
    }


def equation_from_json(obj: dict) -> TensorEquation:
    lf = LinearForm({parse_symbol(t["symbol"]): poly_from_json(t["coefficient"]) for t in obj["terms"]})
    idx = tuple((k, int(v)) for k, v in obj["free_indices"])
    return TensorEquation(lf, idx, obj["provenance"])


def parse_equations(text: str) -> list[TensorEquation]:
    doc = json.loads(text)
    if doc.get("schema") != EQUATIONS_SCHEMA:
        raise ValueError(f"not an equation document (schema {doc.get('schema')!r})")
    return [equation_from_json(e) for e in doc["equations"]]


# --- LaTeX --------------------------------------------------------------------------

def _latex_var(name: str) -> str:
    return "m" if name == "m" else f"p^{{{name[1:]}}}"


def _latex_power(name: str, e: int) -> str:
    base = _latex_var(name)
    if e == 1:
        return base
    return f"m^{{{e}}}" if name == "m" else f"({base})^{{{e}}}"


def _latex_scalar(z: CRational) -> str:
    def q(x):
        if x.denominator == 1:
            return str(abs(x.numerator))
        return rf"\tfrac{{{abs(x.numerator)}}}{{{x.denominator}}}"

    if not z.im:
        return ("-" if z.re < 0 else "") + q(z.re)
    if not z.re:
        mag = "" if abs(z.im) == 1 else q(z.im)
        return ("-" if z.im < 0 else "") + mag + "i"
    sign = "-" if z.im < 0 else "+"
    mag = "" if abs(z.im) == 1 else q(z.im)
    return f"({'-' if z.re < 0 else ''}{q(z.re)}{sign}{mag}i)"


def latex_poly(c: MomentumPoly) -> str:
    parts = []
    for mono, v in c.sorted_terms():
        vars_ = " ".join(_latex_power(n, e) for n, e in zip(VARIABLES, mono) if e)
        s = _latex_scalar(v)
        if vars_:
            if s in ("1", "-1"):
                s = s[:-1]
            parts.append(f"{s}{vars_}" if s in ("", "-") else f"{s}\\,{vars_}")
        else:
            parts.append(s)
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def latex_form(lf: LinearForm) -> str:
    if not lf:
        return "0"
    chunks = []
    for s, c in lf.sorted_items():
        body = latex_poly(c)
        if len(c.terms) > 1:
            body = f"\\left({body}\\right)"
        elif body == "1":
            body = ""
        elif body == "-1":
            body = "-"
        chunks.append(f"{body}\\,{s.latex()}" if body not in ("", "-") else f"{body}{s.latex()}")
    out = chunks[0]
    for ch in chunks[1:]:
        out += f" - {ch[1:]}" if ch.startswith("-") else f" + {ch}"
    return out


def _latex_label(eq: TensorEquation) -> str:
    idx = ", ".join(f"\\{k}={v}" for k, v in eq.free_indices)
    tag = eq.provenance.replace("_", r"\_").replace("|", r"\,|\,")
    return rf"\text{{{tag}}}" + (f"\\; ({idx})" if idx else "")


# --- equation documents -------------------------------------------------------------

def emit_equations(eqs: Sequence[TensorEquation], fmt: str = "text") -> str:
    if fmt == "text":
        return "".join(f"{e}\n" for e in eqs)
    if fmt == "json":
        doc = {"schema": EQUATIONS_SCHEMA, "equations": [equation_to_json(e) for e in eqs]}
        return json.dumps(doc, indent=2, ensure_ascii=True) + "\n"
    if fmt == "latex":
        lines = [
            r"\documentclass{article}",
            r"\usepackage{amsmath,amssymb}",
            r"\allowdisplaybreaks",
            r"\begin{document}",
        ]
        if eqs:
            lines.append(r"\begin{align*}")
            body = [f"&{_latex_label(e)}:& {latex_form(e.lhs)} &= 0" for e in eqs]
            lines.append(" \\\\\n".join(body))
            lines.append(r"\end{align*}")
        else:
            lines.append(r"\noindent No equations.")
        lines.append(r"\end{document}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown equation format {fmt!r}")


# --- analysis documents -------------------------------------------------------------

def _jsonable(v):
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, CRational):
        return format_crational(v)
    return str(v)


def report_to_json(r: Report) -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "versions": {k: str(v) for k, v in r.versions.items()},
        "convention_ledger": {k: str(v) for k, v in r.convention_ledger.items()},
        "equation_sets": {name: [equation_to_json(e) for e in eqs] for name, eqs in r.equation_sets.items()},
        "analyses": [
            {"name": a.name, "inputs": _jsonable(a.inputs), "results": _jsonable(a.results), "passed": a.passed}
            for a in r.analyses
        ],
        "passed": r.passed,
    }


def emit_analysis(r: Report, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(report_to_json(r), indent=2, ensure_ascii=True) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown analysis format {fmt!r}")
    out = ["conventions:"]
    out += [f"  {k}: {v}" for k, v in r.convention_ledger.items()]
    for name, eqs in r.equation_sets.items():
        out.append(f"equations {name} ({len(eqs)}):")
        out += [f"  {e}" for e in eqs]
    for a in r.analyses:
        status = {True: "PASS", False: "FAIL", None: "INFO"}[a.passed]
        out.append(f"[{status}] {a.name}")
        if a.inputs:
            out.append("  inputs: " + ", ".join(f"{k}={_flat(v)}" for k, v in a.inputs.items()))
        out += [f"  {k}: {_flat(v)}" for k, v in a.results.items()]
    out.append("versions: " + ", ".join(f"{k}={v}" for k, v in r.versions.items()))
    return "\n".join(out) + "\n"


def _flat(v) -> str:
    v = _jsonable(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v, ensure_ascii=True)
    if isinstance(v, bool):
        return "true" if v else "false"
    return "null" if v is None else v
