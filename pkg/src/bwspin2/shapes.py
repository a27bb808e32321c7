"""Reference equation shapes written out by hand in momentum space.

Every index is stored upper; lowering factors ``g_mu`` are explicit.  The
forms are m-cleared (multiplied through by the least power of m) and use the
plane-wave rule ``d_mu -> -i p_mu``.  They are the comparison targets for the
derived equations; derived rows only have to agree up to a nonzero constant.
"""

from __future__ import annotations

from typing import Iterable

from .clifford import LORENTZ, METRIC, levi_civita
from .exact import CRational, I, MomentumPoly
from .fields import CoefficientSet, LinearForm

g = METRIC


def p(mu: int) -> MomentumPoly:
    return MomentumPoly.var(f"p{mu}")


def p_low(mu: int) -> MomentumPoly:
    return MomentumPoly.var(f"p{mu}", g[mu])


M = MomentumPoly.var("m")


def p_squared() -> MomentumPoly:
    return sum((p(mu) * p_low(mu) for mu in LORENTZ), MomentumPoly.zero())


def _t(block: str, indices: Iterable[int], coeff) -> LinearForm:
    return LinearForm.term(block, tuple(indices), coeff)


def _sum(forms) -> LinearForm:
    acc = LinearForm()
    for f in forms:
        acc = acc + f
    return acc


# --- pair-level and standard tensor shapes ------------------------------------------

def divergence_form(x: str, y: str, prefix: tuple, nu: int, a=1, b=1) -> LinearForm:
    """-2i a p_mu X^{..mu nu} + m b Y^{..nu}."""
    div = _sum(_t(x, prefix + (mu, nu), p_low(mu).scale(CRational(0, -2) * a)) for mu in LORENTZ)
    return div + _t(y, prefix + (nu,), M.scale(b))


def curl_form(x: str, y: str, prefix: tuple, mu: int, nu: int, a=1, b=1) -> LinearForm:
    """2m a X^{..mu nu} + i b (p^mu Y^{..nu} - p^nu Y^{..mu})."""
    out = _t(x, prefix + (mu, nu), M.scale(2 * a))
    out = out + _t(y, prefix + (nu,), p(mu).scale(I * b))
    return out - _t(y, prefix + (mu,), p(nu).scale(I * b))


def divergence_constraint(y: str, prefix: tuple) -> LinearForm:
    """p_mu Y^{..mu}."""
    return _sum(_t(y, prefix + (mu,), p_low(mu)) for mu in LORENTZ)


def dual_divergence_constraint(x: str, prefix: tuple, mu: int) -> LinearForm:
    """eps_{alpha beta nu mu} p^alpha X^{..beta nu}."""
    return _sum(
        _t(x, prefix + (b, n), p(a).scale(levi_civita(a, b, n, mu, lowered=True)))
        for a in LORENTZ for b in LORENTZ for n in LORENTZ if levi_civita(a, b, n, mu))


def pair_dual_divergence(x: str, nu: int) -> LinearForm:
    """eps^{mu nu}_{alpha beta} p_mu X^{alpha beta}."""
    return _sum(
        _t(x, (a, b), p_low(mu).scale(levi_civita(mu, nu, a, b) * g[a] * g[b]))
        for mu in LORENTZ for a in LORENTZ for b in LORENTZ if levi_civita(mu, nu, a, b))


def second_order_form(kappa: int, mu: int) -> LinearForm:
    """p_nu p^mu G^{kappa nu} - p^2 G^{kappa mu} + m^2 G^{kappa mu}."""
    out = _sum(_t("G", (kappa, nu), p_low(nu) * p(mu)) for nu in LORENTZ)
    return out + _t("G", (kappa, mu), M * M - p_squared())


def trace_form() -> LinearForm:
    """p_mu p_nu G^{mu nu} - (p^2 - m^2) G^mu_mu."""
    out = _sum(_t("G", (a, b), p_low(a) * p_low(b)) for a in LORENTZ for b in LORENTZ)
    return out - _sum(_t("G", (a, a), (p_squared() - M * M).scale(g[a])) for a in LORENTZ)


def trace_condition() -> LinearForm:
    """G^mu_mu."""
    return _sum(_t("G", (a, a), g[a]) for a in LORENTZ)


# --- generalized shapes ---------------------------------------------------------------

def mixed_divergence_form(c: CoefficientSet, kappa: int, mu: int) -> LinearForm:
    """-2i a2 b4 p_nu T^{k mu nu} + a3 b7 eps^{mu nu alpha beta} p_nu T~_{k, alpha beta} - m a1 b1 G^{k mu}.

    The common lowering factor g_kappa is dropped.
    """
    out = _sum(_t("T", (kappa, mu, nu), p_low(nu).scale(CRational(0, -2) * c.a(2) * c.b(4)))
               for nu in LORENTZ)
    out = out + _sum(
        _t("Tt", (kappa, a, b), p_low(nu).scale(c.a(3) * c.b(7) * levi_civita(mu, nu, a, b) * g[a] * g[b]))
        for nu in LORENTZ for a in LORENTZ for b in LORENTZ if levi_civita(mu, nu, a, b))
    return out - _t("G", (kappa, mu), M.scale(c.a(1) * c.b(1)))


def mixed_curl_form(c: CoefficientSet, kappa: int, mu: int, nu: int) -> LinearForm:
    """m (2 a2 b4 T^{k mu nu} + i a3 b7 eps^{alpha beta mu nu} T~_{k, alpha beta}) + i a1 b1 (p^mu G^{k nu} - p^nu G^{k mu})."""
    out = _t("T", (kappa, mu, nu), M.scale(2 * c.a(2) * c.b(4)))
    out = out + _sum(
        _t("Tt", (kappa, a, b), M.scale(I * c.a(3) * c.b(7) * levi_civita(a, b, mu, nu) * g[a] * g[b]))
        for a in LORENTZ for b in LORENTZ if levi_civita(a, b, mu, nu))
    ab = c.a(1) * c.b(1)
    return out + _t("G", (kappa, nu), p(mu).scale(I * ab)) - _t("G", (kappa, mu), p(nu).scale(I * ab))


def _eps_pair(a: int, b: int, k: int, t: int) -> int:
    return levi_civita(a, b, k, t, lowered=True)


def mixed_tensor_divergence_form(c: CoefficientSet, kappa: int, tau: int, mu: int,
                                 derivative_on_d: bool = True) -> LinearForm:
    """Divergence equation with a sigma first pair and sigma second pair, all blocks present.

    With ``derivative_on_d`` the doubly dualized D term carries (1/m) d_nu like
    every other term; without it the term is taken literally as an undifferentiated
    mass-free product, which is dimensionally inconsistent with the rest.
    """
    gk = g[kappa] * g[tau]
    mi = CRational(0, -1)
    out = _sum(_t("R", (kappa, tau, mu, nu), p_low(nu).scale(2 * c.a(2) * c.b(5) * gk * mi)) for nu in LORENTZ)
    out = out + _sum(
        _t("Rt", (a, b, mu, nu), p_low(nu).scale(I * mi * c.a(2) * c.b(6) * _eps_pair(a, b, kappa, tau)))
        for a in LORENTZ for b in LORENTZ for nu in LORENTZ if _eps_pair(a, b, kappa, tau))
    out = out + _sum(
        _t("Dt", (kappa, tau, a, b),
           p_low(nu).scale(I * mi * c.a(3) * c.b(8) * levi_civita(mu, nu, a, b) * gk * g[a] * g[b]))
        for nu in LORENTZ for a in LORENTZ for b in LORENTZ if levi_civita(mu, nu, a, b))
    if derivative_on_d:
        out = out + _sum(_d_terms(c, kappa, tau, mu, lambda nu: p_low(nu).scale(mi)))
    else:
        out = out + _sum(_d_terms(c, kappa, tau, mu, lambda nu: M))
    out = out - _t("F", (kappa, tau, mu), M.scale(c.a(1) * c.b(2) * gk))
    out = out - _sum(_t("Ft", (a, b, mu), M.scale(I * c.a(1) * c.b(3) * _eps_pair(a, b, kappa, tau) / 2))
                     for a in LORENTZ for b in LORENTZ if _eps_pair(a, b, kappa, tau))
    return out


def _d_terms(c: CoefficientSet, kappa: int, tau: int, mu: int, factor):
    """-(a3 b9 / 2) eps^{mu nu alpha beta} eps_{lambda delta kappa tau} D^{lambda delta}_{alpha beta} * factor(nu)."""
    for nu in LORENTZ:
        for a in LORENTZ:
            for b in LORENTZ:
                e1 = levi_civita(mu, nu, a, b)
                if not e1:
                    continue
                for la in LORENTZ:
                    for de in LORENTZ:
                        e2 = _eps_pair(la, de, kappa, tau)
                        if e2:
                            w = CRational(-c.a(3) * c.b(9) / 2) * (e1 * e2 * g[a] * g[b])
                            yield _t("D", (la, de, a, b), factor(nu).scale(w))


def mixed_tensor_curl_form(c: CoefficientSet, kappa: int, tau: int, mu: int, nu: int) -> LinearForm:
    """Curl equation with a sigma first pair and sigma second pair, all blocks present."""
    gk = g[kappa] * g[tau]
    out = _t("R", (kappa, tau, mu, nu), M.scale(2 * c.a(2) * c.b(5) * gk))
    out = out + _sum(
        _t("Dt", (kappa, tau, a, b), M.scale(I * c.a(3) * c.b(8) * levi_civita(a, b, mu, nu) * gk * g[a] * g[b]))
        for a in LORENTZ for b in LORENTZ if levi_civita(a, b, mu, nu))
    out = out + _sum(
        _t("Rt", (a, b, mu, nu), M.scale(I * c.a(2) * c.b(6) * _eps_pair(a, b, kappa, tau)))
        for a in LORENTZ for b in LORENTZ if _eps_pair(a, b, kappa, tau))
    out = out + _sum(
        _t("D", (la, de, a, b),
           M.scale(CRational(-c.a(3) * c.b(9) / 2) * (levi_civita(a, b, mu, nu) * _eps_pair(la, de, kappa, tau)
                                                      * g[a] * g[b])))
        for a in LORENTZ for b in LORENTZ for la in LORENTZ for de in LORENTZ
        if levi_civita(a, b, mu, nu) and _eps_pair(la, de, kappa, tau))
    # - (a1 b2)(-i)(p^mu F_{kt}^nu - p^nu F_{kt}^mu) - (i a1 b3 / 2)(-i) eps_{ab kt}(p^mu Ft^{ab nu} - p^nu Ft^{ab mu})
    f = c.a(1) * c.b(2) * gk
    out = out + _t("F", (kappa, tau, nu), p(mu).scale(I * f)) - _t("F", (kappa, tau, mu), p(nu).scale(I * f))
    for a in LORENTZ:
        for b in LORENTZ:
            e = _eps_pair(a, b, kappa, tau)
            if not e:
                continue
            w = CRational(-c.a(1) * c.b(3) * e / 2)
            out = out + _t("Ft", (a, b, nu), p(mu).scale(w)) - _t("Ft", (a, b, mu), p(nu).scale(w))
    return out


def proportional(a: LinearForm, b: LinearForm) -> bool:
    """True when a = c * b for a nonzero constant c (both zero counts as proportional)."""
    if not a or not b:
        return not a and not b
    if set(a.terms) != set(b.terms):
        return False
    sym = next(iter(b.terms))
    mono, coeff = next(iter(b.terms[sym].terms.items()))
    other = a.terms[sym].terms.get(mono)
    if other is None:
        return False
    ratio = other / coeff
    return a == b.scale(ratio)
