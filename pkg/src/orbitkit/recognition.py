"""Recovering a partial action from a partitioned groupoid.

A partition of the arrows into bisections, closed under inversion and
absorbing composition blockwise, plays the role of a generating labelled
cover: each block U gives a partial bijection of the unit space (follow
the unique arrow of U leaving a given unit), the block labels generate a
group-like alphabet whose words multiply by absorbing adjacent pairs, and
the original groupoid maps onto the transformation groupoid of the
reconstructed system by gamma |-> (label of its block, source of gamma).

The label alphabet is wrapped in the same descriptor interface the rest
of the package uses for groups, so the reconstructed system is an
ordinary FinitePDS and every generic tool applies to it.  The rewriting
multiply is strategy-based (leftmost pair first); on partitions that do
come from a groupoid the absorption target is unique, and any deficit
shows up when the reconstructed system is validated rather than being
hidden here.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from .errors import InvalidStructure, TruncationError
from .groups import GroupDescriptor, GroupElement
from .groupoid import FiniteGroupoid, GroupoidHom, transformation_groupoid
from .pds import FinitePDS, FiniteSpace, PartialBijection
from .reports import Violation


class LabelDescriptor(GroupDescriptor):
    """Words over block labels, multiplied by absorption.

    Letters are block indices (the unit block never appears in a word);
    the inverse of letter i is the index of the inverted block.  An
    adjacent pair (i, j) with nonempty blockwise product rewrites to the
    absorbing block's letter, or vanishes when that block is the unit
    block.  Pairs with empty product stay side by side: such words label
    nowhere-defined maps, matching an empty domain in the reconstruction.
    """

    kind = "label"

    def __init__(self, names: tuple, inverse_of: tuple, unit_block: int,
                 products: Dict[Tuple[int, int], int]):
        n = len(names)
        if len(set(names)) != n:
            raise InvalidStructure("duplicate block names")
        if sorted(inverse_of) != list(range(n)) or not 0 <= unit_block < n:
            raise InvalidStructure("inverse table must permute the block indices")
        for (i, j), k in products.items():
            if not (0 <= i < n and 0 <= j < n and 0 <= k < n):
                raise InvalidStructure("product table mentions unknown blocks")
        self.names = tuple(names)
        self.inverse_of = tuple(inverse_of)
        self.unit_block = unit_block
        self.products = dict(products)
        self._key = (self.names, self.inverse_of, self.unit_block,
                     tuple(sorted(self.products.items())))

    def __eq__(self, other):
        return isinstance(other, LabelDescriptor) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"LabelDescriptor({len(self.names)} blocks)"

    # -- the word calculus --------------------------------------------------

    def _rewrite(self, letters) -> tuple:
        word = [i for i in letters if i != self.unit_block]
        changed = True
        while changed:
            changed = False
            for i in range(len(word) - 1):
                k = self.products.get((word[i], word[i + 1]))
                if k is None:
                    continue
                if k == self.unit_block:
                    word[i:i + 2] = []
                else:
                    word[i:i + 2] = [k]
                changed = True
                break
        return tuple(word)

    def identity(self) -> GroupElement:
        return GroupElement(self, ())

    def letter(self, index: int) -> GroupElement:
        if not 0 <= index < len(self.names):
            raise InvalidStructure(f"no block with index {index}")
        if index == self.unit_block:
            return self.identity()
        return GroupElement(self, (index,))

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        self.check_element(g)
        self.check_element(h)
        return GroupElement(self, self._rewrite(g.value + h.value))

    def inverse(self, g: GroupElement) -> GroupElement:
        self.check_element(g)
        return GroupElement(self, self._rewrite(
            tuple(self.inverse_of[i] for i in reversed(g.value))))

    def check_element(self, g: GroupElement) -> GroupElement:
        super().check_element(g)
        if not all(isinstance(i, int) and 0 <= i < len(self.names) for i in g.value):
            raise InvalidStructure(f"bad label word {g.value!r}")
        return g

    def format_element(self, g: GroupElement) -> str:
        if not g.value:
            return "e"
        return ".".join(self.names[i] for i in g.value)

    def parse_element(self, text: str) -> GroupElement:
        text = text.strip()
        if text == "e":
            return self.identity()
        by_name = {nm: i for i, nm in enumerate(self.names)}
        letters = []
        for tok in text.split("."):
            if tok not in by_name:
                raise InvalidStructure(f"unknown block name {tok!r}")
            letters.append(by_name[tok])
        return GroupElement(self, self._rewrite(letters))


class BisectionPartition:
    """A partition of the arrows of a finite groupoid, block list kept in
    the given order."""

    def __init__(self, gpd: FiniteGroupoid, blocks):
        self.gpd = gpd
        self.blocks = tuple(frozenset(b) for b in blocks)
        self._block_of: Dict[object, int] = {}
        for i, b in enumerate(self.blocks):
            if not b:
                raise InvalidStructure("empty block")
            for a in b:
                if a in self._block_of:
                    raise InvalidStructure(f"arrow {a!r} appears in two blocks")
                self._block_of[a] = i

    def block_of(self, arrow) -> int:
        return self._block_of[arrow]

    def __len__(self):
        return len(self.blocks)


def singleton_partition(gpd: FiniteGroupoid) -> BisectionPartition:
    """Unit arrows together, every other arrow on its own."""
    units = [a for a in gpd.arrows if gpd.is_unit_arrow(a)]
    rest = [frozenset([a]) for a in sorted(
        (a for a in gpd.arrows if not gpd.is_unit_arrow(a)), key=repr)]
    return BisectionPartition(gpd, [frozenset(units)] + rest)


def canonical_partition(gpd: FiniteGroupoid) -> BisectionPartition:
    """Group arrows by the group element of their payload."""
    if gpd.payload is None:
        raise InvalidStructure("canonical partition needs action payloads")
    by_g: Dict[object, set] = {}
    for a in gpd.arrows:
        g, _ = gpd.payload[a]
        by_g.setdefault(g, set()).add(a)
    keys = sorted(by_g, key=repr)
    return BisectionPartition(gpd, [frozenset(by_g[k]) for k in keys])


def validate_partition(part: BisectionPartition) -> List[Violation]:
    gpd = part.gpd
    if gpd.truncated:
        raise TruncationError("partition checks need a complete composition table")
    out: List[Violation] = []

    covered = set(part._block_of)
    missing = [a for a in gpd.arrows if a not in covered]
    if missing:
        out.append(Violation("partition-cover", (repr(missing[0]),),
                             f"{len(missing)} arrows not covered by any block"))

    unit_arrows = frozenset(a for a in gpd.arrows if gpd.is_unit_arrow(a))
    unit_blocks = [i for i, b in enumerate(part.blocks) if b & unit_arrows]
    for i in unit_blocks:
        if part.blocks[i] != unit_arrows:
            out.append(Violation("unit-block", (i,),
                                 f"block {i} mixes unit and non-unit arrows"))
    if not unit_blocks:
        out.append(Violation("unit-block", (), "no block holds the unit arrows"))

    block_index = {b: i for i, b in enumerate(part.blocks)}
    for i, b in enumerate(part.blocks):
        inv = frozenset(gpd.inverse[a] for a in b)
        if inv not in block_index:
            out.append(Violation("inverse-closed", (i,),
                                 f"the inverse of block {i} is not a block"))

    for i, b in enumerate(part.blocks):
        sources = [gpd.source[a] for a in b]
        ranges = [gpd.range_[a] for a in b]
        if len(set(sources)) != len(sources) or len(set(ranges)) != len(ranges):
            out.append(Violation("bisection", (i,),
                                 f"block {i} has repeated sources or ranges"))

    for i, u in enumerate(part.blocks):
        for j, v in enumerate(part.blocks):
            prod = set()
            for a in u:
                for b in v:
                    if gpd.composable(a, b):
                        prod.add(gpd.compose[(a, b)])
            if not prod:
                continue
            homes = {part._block_of.get(c) for c in prod}
            if len(homes) != 1 or None in homes:
                out.append(Violation(
                    "product-absorbed", (i, j),
                    f"the composites of blocks {i} and {j} do not land in "
                    f"a single block"))
    return out


class ReconstructedSystem:
    """The partial action recovered from a partition: points are the unit
    names, the group is the label descriptor, and each non-unit block
    contributes the partial bijection source -> range along its arrows."""

    def __init__(self, part: BisectionPartition):
        bad = validate_partition(part)
        if bad:
            raise InvalidStructure(f"partition is not usable: {bad[0].message}")
        gpd = part.gpd
        self.partition = part
        self.unit_name = {u: str(u) for u in gpd.units}
        if len(set(self.unit_name.values())) != len(gpd.units):
            raise InvalidStructure("unit names collide as strings")

        unit_arrows = frozenset(a for a in gpd.arrows if gpd.is_unit_arrow(a))
        unit_block = part.blocks.index(unit_arrows)

        names = tuple(f"b{i}" for i in range(len(part.blocks)))
        block_index = {b: i for i, b in enumerate(part.blocks)}
        inverse_of = tuple(
            block_index[frozenset(gpd.inverse[a] for a in b)] for b in part.blocks)
        products: Dict[Tuple[int, int], int] = {}
        for i, u in enumerate(part.blocks):
            for j, v in enumerate(part.blocks):
                prod = {gpd.compose[(a, b)] for a in u for b in v
                        if gpd.composable(a, b)}
                if prod:
                    products[(i, j)] = part._block_of[next(iter(prod))]
        self.descriptor = LabelDescriptor(names, inverse_of, unit_block, products)

        space = FiniteSpace(tuple(sorted(self.unit_name[u] for u in gpd.units)))
        table: Dict[GroupElement, PartialBijection] = {}
        for i, b in enumerate(part.blocks):
            if i == unit_block:
                continue
            mapping = {self.unit_name[gpd.source[a]]: self.unit_name[gpd.range_[a]]
                       for a in b}
            table[self.descriptor.letter(i)] = PartialBijection(mapping)
        self.pds = FinitePDS.explicit(space, self.descriptor, table)

    def label_of(self, arrow) -> GroupElement:
        return self.descriptor.letter(self.partition.block_of(arrow))


def check_cocycle(recon: ReconstructedSystem) -> List[Violation]:
    """Diagnostics for the label cocycle c = label_of.

    The rewriting multiply of the label descriptor is strategy-based
    (leftmost pair first), so two things are verified empirically instead
    of assumed: c is multiplicative on every composable pair, and no two
    blocks end up with the same label.  Both are exhaustive on a finite
    groupoid."""
    gpd = recon.partition.gpd
    desc = recon.descriptor
    out: List[Violation] = []
    for a in gpd.arrows:
        for b in gpd.arrows:
            if not gpd.composable(a, b):
                continue
            lhs = desc.multiply(recon.label_of(a), recon.label_of(b))
            rhs = recon.label_of(gpd.compose[(a, b)])
            if lhs != rhs:
                out.append(Violation(
                    "cocycle-multiplicative", (repr(a), repr(b)),
                    f"c(a)c(b) rewrites to {desc.format_element(lhs)} but "
                    f"c(ab) is {desc.format_element(rhs)}"))
    letters = [desc.letter(i) for i in range(len(desc.names))]
    for i, gi in enumerate(letters):
        for j in range(i + 1, len(letters)):
            if gi == letters[j]:
                out.append(Violation(
                    "label-collision", (i, j),
                    f"blocks {i} and {j} received the same label"))
    for a in gpd.arrows:
        if recon.label_of(a).is_identity() != gpd.is_unit_arrow(a):
            out.append(Violation(
                "unit-fibre", (repr(a),),
                "exactly the unit arrows may carry the identity label"))
    return out


def build_cocycle(part: BisectionPartition) -> ReconstructedSystem:
    """The label cocycle of a partition, packaged with its relations.

    Arrows are sent to the letter of their block; the blockwise products
    act as the relation set and live inside the returned descriptor.  Any
    check_cocycle diagnostic is fatal here."""
    recon = ReconstructedSystem(part)
    bad = check_cocycle(recon)
    if bad:
        raise InvalidStructure(f"label rewriting is unusable: {bad[0].message}")
    return recon


def cocycle_to_action(recon: ReconstructedSystem) -> FinitePDS:
    """The partial action of the label group on the unit space."""
    return recon.pds


def build_phi(recon: ReconstructedSystem,
              target: Optional[FiniteGroupoid] = None) -> GroupoidHom:
    """gamma |-> (label of gamma's block, source of gamma), into the
    transformation groupoid of the reconstructed system."""
    gpd = recon.partition.gpd
    tgt = target if target is not None else transformation_groupoid(recon.pds)
    unit_map = {u: recon.unit_name[u] for u in gpd.units}
    arrow_map = {}
    for a in gpd.arrows:
        arrow_map[a] = (recon.label_of(a), recon.unit_name[gpd.source[a]])
    return GroupoidHom(gpd, tgt, unit_map, arrow_map)
