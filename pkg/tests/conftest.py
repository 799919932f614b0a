"""Shared test helpers: series comparison and reference closed forms.

The closed-form iterate tables below are written directly from the hand
recurrence (v_1 = h*J(bracket(v_0)), v_m = (n+h) v_{m-1} + h*J(bracket(v_{m-1})))
and use the C library Gamma as an oracle independent of the package.
"""

from __future__ import annotations

from math import gamma as G


def assert_series_terms(got, expected: dict, rtol: float = 1e-10):
    """Exact term-set match: same (p, q, factor) keys, coefficients to rtol."""
    gm = got.coeff_map()
    extra = set(gm) - set(expected)
    missing = set(expected) - set(gm)
    assert not extra and not missing, (
        f"term sets differ: extra {sorted(extra)}, missing {sorted(missing)}"
    )
    for key, want in expected.items():
        have = gm[key]
        assert abs(have - want) <= rtol * max(abs(have), abs(want)), (
            f"term {key}: got {have!r}, want {want!r}"
        )


def assert_series_close(a, b, rtol: float = 1e-12):
    """Coefficient match relative to the overall series scale."""
    am, bm = a.coeff_map(), b.coeff_map()
    values = [abs(v) for v in am.values()] + [abs(v) for v in bm.values()]
    scale = max(values) if values else 1.0
    for key in sorted(set(am) | set(bm)):
        x, y = am.get(key, 0.0), bm.get(key, 0.0)
        assert abs(x - y) <= rtol * scale, f"term {key}: {x!r} vs {y!r} (scale {scale:g})"


def _combine(*maps_and_weights) -> dict:
    out: dict = {}
    for weight, m in maps_and_weights:
        for k, v in m.items():
            out[k] = out.get(k, 0.0) + weight * v
    return out


def reference_iterates(name: str, g: float, h: float, n: int) -> list[dict]:
    """Reference closed forms of v1, v2, v3 for each built-in problem.

    Keys are (p, q, factor_index) on the exponent lattice of the problem's
    evolution variable.
    """
    if name in ("ex41", "ex44", "ex45"):
        damping = {"ex41": 2.0, "ex44": 3.0, "ex45": 2.0}[name]
        decay = {"ex41": 2.0, "ex44": 3.0, "ex45": 2.0}[name]
        a = damping * decay
        v1 = {(1, 1, 0): -a * h / G(g + 2)}
        v2 = _combine((n + h, v1), (1.0, {(1, 2, 0): -a * damping * h * h / G(2 * g + 2)}))
        v3 = _combine(
            ((n + h) ** 2, v1),
            (1.0, {(1, 2, 0): -2 * a * damping * h * h * (n + h) / G(2 * g + 2)}),
            (1.0, {(1, 3, 0): -a * damping**2 * h**3 / G(3 * g + 2)}),
        )
        return [v1, v2, v3]
    if name == "ex42":
        v1 = {(0, 1, 0): -h / G(g + 1), (1, 1, 0): -h / G(g + 2)}
        tail2 = {(0, 2, 0): h * h / G(2 * g + 1), (1, 2, 0): h * h / G(2 * g + 2)}
        v2 = _combine((n + h, v1), (1.0, tail2))
        v3 = _combine(
            ((n + h) ** 2, v1),
            (2 * (n + h), tail2),
            (1.0, {(0, 3, 0): -h**3 / G(3 * g + 1), (1, 3, 0): -h**3 / G(3 * g + 2)}),
        )
        return [v1, v2, v3]
    if name == "ex43":
        v1 = {(0, 2, 0): -2 * h / G(2 * g + 1), (2, 2, 0): 2 * h / G(2 * g + 3)}
        tail2 = {(0, 4, 0): 2 * h * h / G(4 * g + 1), (2, 4, 0): -2 * h * h / G(4 * g + 3)}
        v2 = _combine((n + h, v1), (1.0, tail2))
        v3 = _combine(
            ((n + h) ** 2, v1),
            (2 * (n + h), tail2),
            (1.0, {(0, 6, 0): -2 * h**3 / G(6 * g + 1), (2, 6, 0): 2 * h**3 / G(6 * g + 3)}),
        )
        return [v1, v2, v3]
    raise KeyError(name)


# Admissible order ranges used when drawing random parameters per problem.
ORDER_RANGES = {
    "ex41": (0.0, 1.0),
    "ex42": (1.0, 2.0),
    "ex43": (0.0, 1.0),
    "ex44": (0.0, 1.0),
    "ex45": (0.0, 1.0),
}
