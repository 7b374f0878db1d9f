"""
Verification Module

Property checks on structuring elements and surface measures:
1. h_Q is positively homogeneous and subadditive in v
2. h(◊Q, v) = ½(h_Q(v) + h_Q(−v)), and ◊Q is origin-symmetric
3. P_{◊Q} = ½(P_Q + P_{−Q}) when 0 ∈ Q, with P_{−Q}(S) = P_Q(reflect(S))
4. P_{rQ} = r·P_Q when 0 ∈ Q
5. P_{[0,u]}(S) = Σ w_i ⟨u, ν_i⟩⁺
6. Σ w_i ν_i = 0 for measures of closed surfaces
"""

import math

import numpy as np

from .convex_bodies import (
    StructuringElement,
    contains_origin,
    direction_net,
    reflect,
    scale,
    support,
    symmetral,
)
from .surface_measures import (
    CLOSED_TOL,
    anisotropic_perimeter,
    box_surface_measure,
    polygon_surface_measure,
    reflect_measure,
    sphere_surface_measure,
)


def _mark(ok):
    return "✓" if ok else "✗"


def default_elements():
    """Named structuring elements covering every variant."""
    return {
        "B²": StructuringElement.unit_ball(2),
        "[0,e₁]": StructuringElement.segment([0, 0], [1, 0]),
        "triangle": StructuringElement.polytope([[0, 0], [1, 0], [0, 1]]),
        "shifted square": StructuringElement.polytope([[-0.25, -0.5], [0.75, -0.5], [0.75, 0.5], [-0.25, 0.5]]),
        "{p}": StructuringElement.singleton([0.3, -0.2]),
        "B³": StructuringElement.unit_ball(3),
        "disk in xy": StructuringElement.planar_disk([[1, 0, 0], [0, 1, 0]]),
        "tilted disk": StructuringElement.ball([0.1, 0, 0], 0.5, [[1, 1, 0], [0, 0, 1]]),
        "cube corner": StructuringElement.polytope(
            [[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)]
        ),
    }


def default_measures():
    """Named surface measures per dimension."""
    return {
        2: {
            "square": polygon_surface_measure([[0, 0], [1, 0], [1, 1], [0, 1]]),
            "L-shape": polygon_surface_measure([[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2]]),
        },
        3: {
            "box": box_surface_measure([0, 0, 0], [1, 2, 3]),
            "sphere": sphere_surface_measure(1.0, level=2),
        },
    }


class Verifier:
    """
    Verification tools for support functions and anisotropic perimeters.
    """

    def __init__(self, seed=0, pairs=200):
        """
        Args:
            seed: seed of the random direction pairs used by subadditivity
            pairs: number of random pairs
        """
        self.rng = np.random.default_rng(seed)
        self.pairs = pairs

    def verify_homogeneity(self, Q, S=None, factors=(0.5, 2.0, 7.0), verbose=True):
        """
        h_Q(s·v) = s·h_Q(v) on the direction net, and P_{rQ}(S) = r·P_Q(S)
        when a measure is given and 0 ∈ Q.

        Returns:
            True if every factor passes
        """
        net = direction_net(Q.dim)
        base = support(Q, net)
        ok = all(np.allclose(support(Q, s * net), s * base, rtol=1e-12, atol=1e-12) for s in factors)
        if S is not None and contains_origin(Q):
            P = anisotropic_perimeter(S, Q)
            for r in factors:
                ok &= math.isclose(anisotropic_perimeter(S, scale(Q, r)), r * P, rel_tol=1e-12, abs_tol=1e-12)
        if verbose:
            print(f"{_mark(ok)} homogeneity of {Q!r}")
        return bool(ok)

    def verify_subadditivity(self, Q, verbose=True):
        """h_Q(v + w) ≤ h_Q(v) + h_Q(w) on random direction pairs."""
        v = self.rng.standard_normal((self.pairs, Q.dim))
        w = self.rng.standard_normal((self.pairs, Q.dim))
        slack = support(Q, v) + support(Q, w) - support(Q, v + w)
        ok = bool(np.all(slack >= -1e-12))
        if verbose:
            print(f"{_mark(ok)} subadditivity of {Q!r} (min slack {slack.min():.3e})")
        return ok

    def verify_symmetral_identity(self, Q, tol=1e-10, verbose=True):
        """h(◊Q, v) = ½(h_Q(v) + h_Q(−v)) and h(◊Q, v) = h(◊Q, −v)."""
        net = direction_net(Q.dim)
        sym = symmetral(Q)
        expected = 0.5 * (support(Q, net) + support(Q, -net))
        identity = float(np.max(np.abs(support(sym, net) - expected)))
        mirror = float(np.max(np.abs(support(sym, net) - support(sym, -net))))
        ok = identity <= tol and mirror <= tol
        if verbose:
            print(f"{_mark(ok)} symmetral of {Q!r}: identity error {identity:.2e}, mirror error {mirror:.2e}")
        return ok

    def verify_symmetral_split(self, S, Q, tol=1e-10, verbose=True):
        """
        P_{◊Q}(S) = ½(P_Q(S) + P_Q(reflect(S))) for 0 ∈ Q.

        Raises:
            ValueError: if 0 ∉ Q
        """
        if not contains_origin(Q):
            raise ValueError(f"the symmetral split needs 0 ∈ Q, got {Q!r}")
        lhs = anisotropic_perimeter(S, symmetral(Q))
        rhs = 0.5 * (anisotropic_perimeter(S, Q) + anisotropic_perimeter(reflect_measure(S), Q))
        ok = abs(lhs - rhs) <= tol * max(1.0, abs(rhs))
        if verbose:
            print(f"{_mark(ok)} P_◊Q = ½(P_Q + P_−Q): {lhs:.12f} vs {rhs:.12f}")
        return ok

    def verify_segment_formula(self, S, u, tol=1e-12, verbose=True):
        """P_{[0,u]}(S) against the atom sum Σ w_i max(0, ⟨u, ν_i⟩)."""
        u = np.asarray(u, dtype=float)
        Q = StructuringElement.segment(np.zeros(S.dim), u)
        lhs = anisotropic_perimeter(S, Q)
        rhs = math.fsum(w * max(0.0, float(n @ u)) for w, n in zip(S.weights, S.normals))
        ok = abs(lhs - rhs) <= tol * max(1.0, abs(rhs))
        if verbose:
            print(f"{_mark(ok)} segment formula along {u.tolist()}: {lhs:.12f} vs {rhs:.12f}")
        return ok

    def verify_closedness(self, S, verbose=True):
        """‖Σ w_i ν_i‖ ≤ 1e−8·Σ w_i."""
        ok = S.closedness_defect <= CLOSED_TOL
        if verbose:
            print(f"{_mark(ok)} closedness of {S.kind} measure: defect {S.closedness_defect:.2e}")
        return bool(ok)

    def verify_reflection(self, Q, verbose=True):
        """h_{−Q}(v) = h_Q(−v)."""
        net = direction_net(Q.dim)
        ok = bool(np.allclose(support(reflect(Q), net), support(Q, -net), rtol=0, atol=1e-12))
        if verbose:
            print(f"{_mark(ok)} reflection of {Q!r}")
        return ok

    def verify_all(self, verbose=True):
        """
        Run every check over the default catalogue.

        Returns:
            True if all checks pass
        """
        elements = default_elements()
        measures = default_measures()
        results = []

        if verbose:
            print("\n" + "=" * 70)
            print("SUPPORT FUNCTIONS")
            print("=" * 70)
        for Q in elements.values():
            S = next(iter(measures[Q.dim].values()))
            results.append(self.verify_homogeneity(Q, S, verbose=verbose))
            results.append(self.verify_subadditivity(Q, verbose=verbose))
            results.append(self.verify_reflection(Q, verbose=verbose))

        if verbose:
            print("\n" + "=" * 70)
            print("SYMMETRALS")
            print("=" * 70)
        for Q in elements.values():
            results.append(self.verify_symmetral_identity(Q, verbose=verbose))
        for Q in elements.values():
            if not contains_origin(Q):
                continue
            for S in measures[Q.dim].values():
                results.append(self.verify_symmetral_split(S, Q, verbose=verbose))

        if verbose:
            print("\n" + "=" * 70)
            print("SURFACE MEASURES")
            print("=" * 70)
        for dim, named in measures.items():
            for S in named.values():
                results.append(self.verify_closedness(S, verbose=verbose))
                for u in np.eye(dim):
                    results.append(self.verify_segment_formula(S, u, verbose=verbose))
                results.append(self.verify_segment_formula(S, np.full(dim, 0.5), verbose=verbose))

        passed = all(results)
        if verbose:
            print("\n" + "=" * 70)
            print(f"{_mark(passed)} {sum(results)}/{len(results)} checks passed")
            print("=" * 70)
        return passed


if __name__ == "__main__":
    Verifier().verify_all(verbose=True)
