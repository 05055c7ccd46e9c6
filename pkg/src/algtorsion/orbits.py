"""Reeb orbits of the circle-invariant model: covers of fibers over
critical points, with Conley-Zehnder data and a synthetic action model."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import EVEN, ODD, Generator
from .errors import ValidationError

ELLIPTIC = "elliptic"
HYPERBOLIC = "hyperbolic"


def conley_zehnder(morse_index, n):
    """Conley-Zehnder index of the n-fold cover over a critical point.

    1 for local extrema (index 0 or 2), 0 for saddles, independently of the
    covering multiplicity.
    """
    if n < 1:
        raise ValidationError("cover must be >= 1")
    if morse_index in (0, 2):
        return 1
    if morse_index == 1:
        return 0
    raise ValidationError(f"invalid Morse index {morse_index}")


@dataclass(frozen=True)
class ReebOrbit:
    critical_point: str
    cover: int
    cz_index: int
    parity: int
    action: Fraction
    orbit_kind: str

    @property
    def name(self):
        return f"{self.critical_point}^{self.cover:02d}"

    def generator(self):
        return Generator(
            name=self.name, parity=self.parity, action=self.action, kappa=self.cover
        )


class ActionModel:
    """Assigns base actions near 1 with distinct small perturbations.

    Saddle orbits get actions in (1, 5/4); elliptic orbits (extrema of the
    glued function) get actions in (3/2, 7/4), which keeps the positive end
    of every same-side gradient cylinder strictly above its negative end.
    Orbits in the interface region are modelled as lying above every
    truncation and are never generated.
    """

    def __init__(self, ds):
        by_index = ds.critical_points_by_index()
        saddles = by_index[1]
        extrema = by_index[0] + by_index[2]
        self._base = {}
        for j, cp in enumerate(sorted(saddles)):
            self._base[cp] = 1 + Fraction(j + 1, 4 * (len(saddles) + 1))
        for j, cp in enumerate(sorted(extrema)):
            self._base[cp] = Fraction(3, 2) + Fraction(j + 1, 4 * (len(extrema) + 1))

    def base_action(self, cp_id):
        return self._base[cp_id]

    def minimum(self):
        return min(self._base.values())


def generate_orbits(ds, cover_max, action_model=None):
    """One ReebOrbit per (critical point, cover <= cover_max).

    The cover bound plays the role of the truncation parameter that keeps
    interface orbits out of the generator set.  All orbits of this model
    are good: the Conley-Zehnder parity is constant in the cover.
    """
    if cover_max < 1:
        raise ValidationError("cover_max must be >= 1")
    model = action_model or ActionModel(ds)
    orbits = []
    for cp_id in sorted(ds._critical()):
        index = ds.heps_index(cp_id)
        kind = HYPERBOLIC if index == 1 else ELLIPTIC
        for n in range(1, cover_max + 1):
            cz = conley_zehnder(index, n)
            # Goodness: the parity never flips along covers here, so no
            # even cover of a bad orbit has to be excluded.
            assert cz % 2 == conley_zehnder(index, 1) % 2
            orbits.append(
                ReebOrbit(
                    critical_point=cp_id,
                    cover=n,
                    cz_index=cz,
                    parity=ODD if cz == 0 else EVEN,
                    action=n * model.base_action(cp_id),
                    orbit_kind=kind,
                )
            )
    return orbits


def orbit_table(orbits):
    return {(o.critical_point, o.cover): o for o in orbits}
