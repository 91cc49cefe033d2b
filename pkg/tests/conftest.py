"""Shared fixtures and slow-but-obvious reference implementations.

The helpers here deliberately avoid the package's cached bracket tables and
weight pruning so they can serve as oracles for the fast paths.
"""

from __future__ import annotations

import itertools

from hypothesis import settings

from svforms.algebra import AlgebraParams, Element, Window, bracket, enumerate_window

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")


def P(lam, mu, s="0") -> AlgebraParams:
    return AlgebraParams.from_strings(str(lam), str(mu), str(s))


def in_window(e: Element, basis: set) -> bool:
    return all(b in basis for b in e)


def naive_violations(params: AlgebraParams, form, window: Window) -> list:
    """Residuals phi([x,y],z) - phi(x,[y,z]) by direct Element arithmetic."""
    basis = enumerate_window(params, window)
    members = set(basis)
    out = []
    for x, y, z in itertools.product(basis, repeat=3):
        xy = bracket(params, Element.basis(x), Element.basis(y))
        yz = bracket(params, Element.basis(y), Element.basis(z))
        if not (in_window(xy, members) and in_window(yz, members)):
            continue
        r = form(xy, Element.basis(z)) - form(Element.basis(x), yz)
        if r:
            out.append(((x, y, z), r))
    return sorted(out, key=lambda t: [b.sort_key for b in t[0]])

