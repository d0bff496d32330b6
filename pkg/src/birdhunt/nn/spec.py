"""Network topology descriptions.

A NetSpec is a trunk (conv/dense/relu/flatten chain) plus one or more heads:
categorical branches (softmaxed) and scalar outputs. Parameter layout is a
single flat vector whose per-layer offsets are a pure function of the spec.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterator


@dataclass(frozen=True)
class Conv:
    out_channels: int
    kernel: int
    stride: int


@dataclass(frozen=True)
class Dense:
    units: int


@dataclass(frozen=True)
class Relu:
    pass


@dataclass(frozen=True)
class Flatten:
    pass


Layer = Conv | Dense | Relu | Flatten


@dataclass(frozen=True)
class Head:
    """`kind` is "branch" (categorical, softmaxed) or "scalar"."""

    size: int
    kind: str = "branch"

    def __post_init__(self) -> None:
        if self.kind not in ("branch", "scalar"):
            raise ValueError(f"unknown head kind {self.kind!r}")
        if self.size < 1:
            raise ValueError("head size must be >= 1")
        if self.kind == "scalar" and self.size != 1:
            raise ValueError("scalar heads have size 1")


@dataclass(frozen=True)
class NetSpec:
    input_width: int
    input_height: int
    input_channels: int
    layers: tuple[Layer, ...]
    heads: tuple[Head, ...]

    def __post_init__(self) -> None:
        if not self.heads:
            raise ValueError("a net needs at least one head")
        self.trunk_dim()  # validates the shape chain

    # -- shape chain -------------------------------------------------------

    def shape_chain(self) -> list[tuple[int, ...]]:
        """Activation shape after each layer, starting from the input."""
        shape: tuple[int, ...] = (self.input_height, self.input_width, self.input_channels)
        chain = [shape]
        for layer in self.layers:
            if isinstance(layer, Conv):
                if len(shape) != 3:
                    raise ValueError("conv layer after flatten")
                h, w, _ = shape
                oh = (h - layer.kernel) // layer.stride + 1
                ow = (w - layer.kernel) // layer.stride + 1
                if oh < 1 or ow < 1:
                    raise ValueError(f"conv kernel {layer.kernel} too large for {h}x{w}")
                shape = (oh, ow, layer.out_channels)
            elif isinstance(layer, Dense):
                if len(shape) != 1:
                    raise ValueError("dense layer needs a flat input; add Flatten first")
                shape = (layer.units,)
            elif isinstance(layer, Flatten):
                shape = (int(_prod(shape)),)
            elif isinstance(layer, Relu):
                pass
            else:
                raise ValueError(f"unknown layer {layer!r}")
            chain.append(shape)
        return chain

    def trunk_dim(self) -> int:
        final = self.shape_chain()[-1]
        if len(final) != 1:
            raise ValueError("trunk must end flat (add Flatten before heads)")
        return final[0]

    def is_dense_only(self) -> bool:
        return not any(isinstance(l, Conv) for l in self.layers)

    # -- parameter layout ----------------------------------------------------

    def param_slices(self) -> list[tuple[str, tuple[int, ...], slice]]:
        """(name, shape, slice) for every weight/bias, in layout order."""
        out: list[tuple[str, tuple[int, ...], slice]] = []
        offset = 0

        def add(name: str, shape: tuple[int, ...]) -> None:
            nonlocal offset
            n = int(_prod(shape))
            out.append((name, shape, slice(offset, offset + n)))
            offset += n

        shape = (self.input_height, self.input_width, self.input_channels)
        for i, layer in enumerate(self.layers):
            if isinstance(layer, Conv):
                h, w, c = shape
                add(f"conv{i}.w", (layer.kernel, layer.kernel, c, layer.out_channels))
                add(f"conv{i}.b", (layer.out_channels,))
                oh = (h - layer.kernel) // layer.stride + 1
                ow = (w - layer.kernel) // layer.stride + 1
                shape = (oh, ow, layer.out_channels)
            elif isinstance(layer, Dense):
                add(f"dense{i}.w", (shape[0], layer.units))
                add(f"dense{i}.b", (layer.units,))
                shape = (layer.units,)
            elif isinstance(layer, Flatten):
                shape = (int(_prod(shape)),)
        trunk = shape[0]
        for j, head in enumerate(self.heads):
            add(f"head{j}.w", (trunk, head.size))
            add(f"head{j}.b", (head.size,))
        return out

    def param_count(self) -> int:
        slices = self.param_slices()
        return slices[-1][2].stop if slices else 0

    def branch_sizes(self) -> tuple[int, ...]:
        return tuple(h.size for h in self.heads if h.kind == "branch")

    def head_indices(self, kind: str) -> list[int]:
        return [i for i, h in enumerate(self.heads) if h.kind == kind]

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        def layer_doc(layer: Layer) -> list[Any]:
            if isinstance(layer, Conv):
                return ["conv", layer.out_channels, layer.kernel, layer.stride]
            if isinstance(layer, Dense):
                return ["dense", layer.units]
            if isinstance(layer, Relu):
                return ["relu"]
            return ["flatten"]

        return {
            "input": [self.input_width, self.input_height, self.input_channels],
            "layers": [layer_doc(l) for l in self.layers],
            "heads": [[h.kind, h.size] for h in self.heads],
        }

    @classmethod
    def from_json(cls, doc: dict[str, Any]) -> "NetSpec":
        layers: list[Layer] = []
        for item in doc["layers"]:
            tag = item[0]
            if tag == "conv":
                layers.append(Conv(int(item[1]), int(item[2]), int(item[3])))
            elif tag == "dense":
                layers.append(Dense(int(item[1])))
            elif tag == "relu":
                layers.append(Relu())
            elif tag == "flatten":
                layers.append(Flatten())
            else:
                raise ValueError(f"unknown layer tag {tag!r}")
        w, h, c = (int(v) for v in doc["input"])
        heads = tuple(Head(int(size), kind) for kind, size in doc["heads"])
        return cls(w, h, c, tuple(layers), heads)


def _prod(shape: tuple[int, ...] | Iterator[int]) -> int:
    out = 1
    for v in shape:
        out *= int(v)
    return out


def default_trunk(width: int, height: int, channels: int) -> tuple[Layer, ...]:
    """Smallest stack that learns the task at the given scale.

    Boards up to 24px use a two-layer MLP; larger boards get the conv stack.
    """
    if max(width, height) <= 24:
        return (Flatten(), Dense(128), Relu(), Dense(128), Relu())
    return (
        Conv(16, 8, 4),
        Relu(),
        Conv(32, 4, 2),
        Relu(),
        Flatten(),
        Dense(128),
        Relu(),
    )
