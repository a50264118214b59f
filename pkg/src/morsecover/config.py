"""Plain-text configuration: `key: value` lines with indented sections.

Diff-friendly and dependency-free.  Measure and region specifications live
in their own files referenced from the run configuration:

    measure file lines:   atom: <coords...> <weight>
                          density: <lo...> <hi...> <rho>
    region file lines:    box: <lo...> <hi...>
                          ball: <center...> <radius>
                          minus-box / minus-ball: same payloads, subtracted
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InputError
from .geometry import Space
from .measure import MeasurableRegion, RadonMeasure, RBall, RBox


@dataclass
class ConfigNode:
    """Parsed section: scalar values plus named child sections."""

    values: dict[str, tuple[str, int]] = field(default_factory=dict)
    children: dict[str, "ConfigNode"] = field(default_factory=dict)
    line: int = 0

    def get(self, key: str, default=None) -> str | None:
        if key in self.values:
            return self.values[key][0]
        return default

    def require(self, key: str, path: str) -> str:
        if key not in self.values:
            raise InputError(f"{path}:{self.line}: missing required key {key!r}")
        return self.values[key][0]

    def get_float(self, key: str, path: str, default=None) -> float | None:
        raw = self.get(key)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError:
            raise InputError(
                f"{path}:{self.values[key][1]}: {key!r} is not a number: {raw!r}")

    def get_int(self, key: str, path: str, default=None) -> int | None:
        raw = self.get(key)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            raise InputError(
                f"{path}:{self.values[key][1]}: {key!r} is not an integer: {raw!r}")


def parse_config(text: str, path: str = "<config>") -> ConfigNode:
    root = ConfigNode()
    stack: list[tuple[int, ConfigNode]] = [(-1, root)]
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].rstrip()
        if not stripped.strip():
            continue
        indent = len(stripped) - len(stripped.lstrip())
        line = stripped.strip()
        if ":" not in line:
            raise InputError(f"{path}:{lineno}: expected 'key: value' or 'key:'")
        key, _, value = line.partition(":")
        key = key.strip()
        value = value.strip()
        while stack and indent <= stack[-1][0]:
            stack.pop()
        if not stack:
            raise InputError(f"{path}:{lineno}: bad indentation")
        parent = stack[-1][1]
        if value:
            parent.values[key] = (value, lineno)
        else:
            child = ConfigNode(line=lineno)
            parent.children[key] = child
            stack.append((indent, child))
    return root


def load_config(path: str) -> ConfigNode:
    try:
        with open(path) as fh:
            return parse_config(fh.read(), path)
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc


def space_from_node(node: ConfigNode | None, path: str) -> Space:
    if node is None:
        return Space(1, "l2")
    dim = node.get_int("dim", path, 1)
    norm = node.get("norm", "l2")
    weights = None
    raw_w = node.get("weights")
    if raw_w is not None:
        weights = tuple(float(w) for w in raw_w.split())
    return Space(dim, norm, weights)


def _floats(raw: str, path: str, lineno: int) -> list[float]:
    try:
        return [float(tok) for tok in raw.split()]
    except ValueError:
        raise InputError(f"{path}:{lineno}: expected numbers, got {raw!r}")


def load_measure(path: str, space: Space) -> RadonMeasure:
    d = space.dim
    atoms = []
    pieces = []
    try:
        fh = open(path)
    except OSError as exc:
        raise InputError(f"cannot read measure file {path}: {exc}") from exc
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition(":")
            nums = _floats(value.strip(), path, lineno)
            if key.strip() == "atom":
                if len(nums) != d + 1:
                    raise InputError(
                        f"{path}:{lineno}: atom needs {d} coords and a weight")
                atoms.append((tuple(nums[:d]), nums[d]))
            elif key.strip() == "density":
                if len(nums) != 2 * d + 1:
                    raise InputError(
                        f"{path}:{lineno}: density needs lo, hi and a value")
                pieces.append((RBox(tuple(nums[:d]), tuple(nums[d:2 * d])),
                               nums[2 * d]))
            else:
                raise InputError(f"{path}:{lineno}: unknown entry {key!r}")
    return RadonMeasure(space, tuple(atoms), tuple(pieces))


def load_region(path: str, space: Space) -> MeasurableRegion:
    d = space.dim
    pos: list = []
    neg: list = []
    try:
        fh = open(path)
    except OSError as exc:
        raise InputError(f"cannot read region file {path}: {exc}") from exc
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition(":")
            key = key.strip()
            nums = _floats(value.strip(), path, lineno)
            target = neg if key.startswith("minus-") else pos
            kind = key.removeprefix("minus-")
            if kind == "box":
                if len(nums) != 2 * d:
                    raise InputError(f"{path}:{lineno}: box needs lo and hi")
                target.append(RBox(tuple(nums[:d]), tuple(nums[d:])))
            elif kind == "ball":
                if len(nums) != d + 1:
                    raise InputError(
                        f"{path}:{lineno}: ball needs a center and radius")
                target.append(RBall(tuple(nums[:d]), nums[d]))
            else:
                raise InputError(f"{path}:{lineno}: unknown entry {key!r}")
    if not pos:
        raise InputError(f"{path}: region needs at least one positive shape")
    return MeasurableRegion(tuple(pos), tuple(neg))
