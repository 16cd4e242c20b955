"""Systems as sector-partitioned inner-product spaces, and their composites.

A system is an ordered partition of the canonical basis ``{0..n-1}`` of a
real or complex inner-product space into *sectors*: coordinate subspaces
within which coherence is allowed.  States are block-diagonal across
sectors, so the partition fixes the kinematics of the theory.  Four kinds
of system are supported:

* ``quantum``   -- a single sector (full coherence; real or complex field),
* ``classical`` -- singleton sectors (no coherence anywhere),
* ``coherent``  -- singleton sectors individually, but entangling
  composition rules: a coherent d-level system (codit) purifies a
  classical d-level system (cdit),
* ``composite`` -- a pair of factor systems glued by the tensor basis
  pairing ``(i, j) -> i * n_B + j``.

The number of perfectly distinguishable pure states (the operational
dimension) always equals the total linear dimension ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimension, UnsupportedComposite

KINDS = ("quantum", "classical", "coherent", "composite")
FIELDS = ("real", "complex")


@dataclass(frozen=True)
class SystemDescriptor:
    """A physical system: sector partition plus composition metadata.

    ``sectors`` is an ordered tuple of disjoint, sorted index tuples whose
    union is ``{0..total_dim-1}``.  For composites, ``factors`` holds the
    two child descriptors; the basis pairing is always row-major
    (``(i, j) -> i * n_B + j``).
    """

    kind: str
    field: str
    total_dim: int
    sectors: tuple[tuple[int, ...], ...]
    factors: tuple["SystemDescriptor", "SystemDescriptor"] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidDimension(f"unknown kind {self.kind!r}")
        if self.field not in FIELDS:
            raise InvalidDimension(f"unknown field {self.field!r}")
        if self.total_dim < 1:
            raise InvalidDimension("total_dim must be >= 1")
        seen: set[int] = set()
        for sec in self.sectors:
            if any(not 0 <= i < self.total_dim for i in sec):
                raise InvalidDimension("sector index out of range")
            if seen.intersection(sec):
                raise InvalidDimension("sectors must be disjoint")
            if tuple(sorted(sec)) != tuple(sec):
                raise InvalidDimension("sector indices must be sorted")
            seen.update(sec)
        if len(seen) != self.total_dim:
            raise InvalidDimension("sectors must cover all basis indices")
        if self.kind == "quantum" and len(self.sectors) != 1:
            raise InvalidDimension("quantum systems have exactly one sector")
        if self.kind in ("classical", "coherent") and any(
            len(s) != 1 for s in self.sectors
        ):
            raise InvalidDimension("classical/coherent sectors are singletons")
        if self.kind == "composite":
            if self.factors is None:
                raise InvalidDimension("composite systems need factors")
            na, nb = self.factors[0].total_dim, self.factors[1].total_dim
            if na * nb != self.total_dim:
                raise InvalidDimension("factor dimensions inconsistent")

    # -- derived views -----------------------------------------------------

    @property
    def gpt_dim(self) -> int:
        """Number of perfectly distinguishable pure states (equals n)."""
        return self.total_dim

    @property
    def sector_sizes(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.sectors)

    @property
    def dtype(self):
        return np.float64 if self.field == "real" else np.complex128

    def sector_of_index(self, i: int) -> tuple[int, int]:
        """Return ``(sector index, position within sector)`` of basis index i."""
        return self._index_table()[i]

    def _index_table(self):
        # cached on first use; descriptor is frozen so this is safe
        table = getattr(self, "_table", None)
        if table is None:
            table = {}
            for s, sec in enumerate(self.sectors):
                for pos, i in enumerate(sec):
                    table[i] = (s, pos)
            object.__setattr__(self, "_table", table)
        return table

    def __repr__(self):
        return f"SystemDescriptor({describe(self)})"


def make_quantum(d: int, field: str = "complex") -> SystemDescriptor:
    """Quantum system of dimension ``d``: one sector of full coherence."""
    if d < 1:
        raise InvalidDimension("quantum dimension must be >= 1")
    return SystemDescriptor(
        kind="quantum",
        field=field,
        total_dim=d,
        sectors=(tuple(range(d)),),
    )


def make_classical(d: int, field: str = "complex") -> SystemDescriptor:
    """Classical d-level system: d singleton sectors."""
    if d < 1:
        raise InvalidDimension("classical dimension must be >= 1")
    return SystemDescriptor(
        kind="classical",
        field=field,
        total_dim=d,
        sectors=tuple((i,) for i in range(d)),
    )


def make_coherent(d: int, field: str = "complex") -> SystemDescriptor:
    """Coherent d-level system (codit).

    Alone it has exactly the states of a classical d-level system; the
    kind tag only changes how it composes with other systems.
    """
    if d < 1:
        raise InvalidDimension("coherent dimension must be >= 1")
    return SystemDescriptor(
        kind="coherent",
        field=field,
        total_dim=d,
        sectors=tuple((i,) for i in range(d)),
    )


def trivial_system(field: str = "complex") -> SystemDescriptor:
    """The one-dimensional system I."""
    return make_classical(1, field)


def _product_sectors(a: SystemDescriptor, b: SystemDescriptor):
    """Cartesian pairing of sectors: one composite sector per (S_A, S_B)."""
    nb = b.total_dim
    out = []
    for sa in a.sectors:
        for sb in b.sectors:
            out.append(tuple(sorted(i * nb + j for i in sa for j in sb)))
    return tuple(out)


def _offset_sectors(da: int, db: int):
    """Offset pairing for cdit/codit composition.

    Sector delta couples classical label x on the left with label
    ``(x + delta) mod d_B`` on the right (for ``d_A <= d_B``; mirrored
    otherwise), giving ``max(d_A, d_B)`` sectors of size ``min(d_A, d_B)``.
    """
    out = []
    for delta in range(max(da, db)):
        if da <= db:
            idx = [x * db + ((x + delta) % db) for x in range(da)]
        else:
            idx = [((y - delta) % da) * db + y for y in range(db)]
        out.append(tuple(sorted(idx)))
    return tuple(out)


def compose(a: SystemDescriptor, b: SystemDescriptor) -> SystemDescriptor:
    """Compose two systems under the supported pairing rules.

    Supported pairs: quantum x quantum (same field), anything x classical
    (either side), classical/coherent x coherent (offset rule), and
    quantum x coherent.  Anything else is rejected.
    """
    if a.field != b.field:
        raise UnsupportedComposite("cannot mix real and complex systems")
    ka, kb = a.kind, b.kind
    if ka in ("classical", "coherent") and kb == "coherent":
        sectors = _offset_sectors(a.total_dim, b.total_dim)
    elif kb == "classical" or ka == "classical":
        sectors = _product_sectors(a, b)
    elif ka == "quantum" and kb == "quantum":
        sectors = _product_sectors(a, b)
    elif (ka, kb) in (("quantum", "coherent"), ("coherent", "quantum")):
        sectors = _product_sectors(a, b)
    else:
        raise UnsupportedComposite(f"unsupported composite {ka} x {kb}")
    return SystemDescriptor(
        kind="composite",
        field=a.field,
        total_dim=a.total_dim * b.total_dim,
        sectors=sectors,
        factors=(a, b),
    )


def _mirror_composite(a: SystemDescriptor, partner: SystemDescriptor):
    """Offset-of-sector-labels composite used for purifying partners.

    The partner mirrors a's sector layout (same number of sectors, same
    sizes).  Composite sector ``delta`` couples a's sector ``k`` with the
    partner's sector ``(k + delta) mod m``, so the diagonal pairing vector
    sits inside offset 0.
    """
    m = len(a.sectors)
    npart = partner.total_dim
    sectors = []
    for delta in range(m):
        idx = []
        for k in range(m):
            tgt = partner.sectors[(k + delta) % m]
            idx.extend(i * npart + j for i in a.sectors[k] for j in tgt)
        sectors.append(tuple(sorted(idx)))
    return SystemDescriptor(
        kind="composite",
        field=a.field,
        total_dim=a.total_dim * npart,
        sectors=tuple(sectors),
        factors=(a, partner),
    )


def purifying_partner(a: SystemDescriptor):
    """Return ``(partner, composite)`` used to purify states of ``a``.

    Quantum systems take an equal quantum partner; classical and coherent
    systems take a coherent partner of equal dimension; general
    sector-structured systems take a coherent mirror over sector labels
    with a matching quantum part inside each sector.
    """
    if a.kind == "quantum":
        partner = make_quantum(a.total_dim, a.field)
        return partner, compose(a, partner)
    sizes = set(a.sector_sizes)
    m = len(a.sectors)
    if sizes == {1}:
        partner = make_coherent(m, a.field)
        return partner, compose(a, partner)
    if len(sizes) != 1:
        # unreachable through the supported composition rules, which all
        # produce equal-size sectors; rejected rather than guessed
        raise UnsupportedComposite(
            "mirror purification needs equal sector sizes"
        )
    partner = compose(make_quantum(sizes.pop(), a.field), make_coherent(m, a.field))
    return partner, _mirror_composite(a, partner)


def describe(desc: SystemDescriptor) -> str:
    """Short human-readable label, e.g. ``classical(2) (x) coherent(2)``."""
    if desc.kind == "composite" and desc.factors is not None:
        left, right = desc.factors
        return f"{describe(left)} (x) {describe(right)}"
    tag = f"{desc.kind}({desc.total_dim})"
    if desc.field == "real":
        tag = f"real-{tag}"
    return tag
