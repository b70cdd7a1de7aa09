"""Kernel composition strings such as `SE[SE]` or `SC[SC[SE]]`."""

import re
from dataclasses import dataclass

from cdgp.constants import KernelFamily
from cdgp.utils import InputError, ParseError

MIN_DEPTH = 2
MAX_DEPTH = 3

TOKEN = re.compile(r"\s*(SE|SC|\[|\])", re.IGNORECASE)


@dataclass(frozen=True)
class CompositionSpec:
    """Kernel families ordered from the innermost layer (raw inputs) to the exposed layer.

    >>> str(CompositionSpec.parse("sc[sc[se]]"))
    'SC[SC[SE]]'
    >>> CompositionSpec.parse("SC[SE]").families
    (<KernelFamily.SE: 'SE'>, <KernelFamily.SC: 'SC'>)
    """

    families: tuple[KernelFamily, ...]

    def __post_init__(self) -> None:
        """Validate the depth."""
        if not MIN_DEPTH <= len(self.families) <= MAX_DEPTH:
            msg = f"composition depth must be {MIN_DEPTH} or {MAX_DEPTH}, got {len(self.families)}"
            raise InputError(msg)

    def __str__(self) -> str:
        """Render in outer[inner] notation."""
        text = self.families[0].value
        for family in self.families[1:]:
            text = f"{family.value}[{text}]"
        return text

    def __len__(self) -> int:
        """Number of layers."""
        return len(self.families)

    @property
    def inner(self) -> KernelFamily:
        """Family of the layer on raw inputs."""
        return self.families[0]

    @property
    def outer(self) -> KernelFamily:
        """Family of the exposed layer."""
        return self.families[-1]

    @classmethod
    def parse(cls, text: str) -> "CompositionSpec":
        """Parse outer[inner] notation.

        Raises:
            ParseError: On unknown tokens, unbalanced brackets or an unsupported depth.
        """
        tokens: list[str] = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            match = TOKEN.match(stripped, pos)
            if not match:
                msg = f"unexpected character {stripped[pos:].lstrip()[:1]!r} in {text!r}"
                raise ParseError(msg)
            tokens.append(match.group(1).upper())
            pos = match.end()

        # Grammar: FAMILY ( '[' spec ']' )?
        outer_to_inner: list[KernelFamily] = []
        expect_family = True
        depth = 0
        closed = False
        for token in tokens:
            if expect_family:
                if token in {"[", "]"}:
                    msg = f"expected a kernel family before {token!r} in {text!r}"
                    raise ParseError(msg)
                outer_to_inner.append(KernelFamily(token))
                expect_family = False
            elif token == "[":
                if closed:
                    msg = f"nested layers must be written as outer[inner] in {text!r}"
                    raise ParseError(msg)
                depth += 1
                expect_family = True
            elif token == "]":
                depth -= 1
                closed = True
                if depth < 0:
                    msg = f"unbalanced ']' in {text!r}"
                    raise ParseError(msg)
            else:
                msg = f"missing '[' between kernel families in {text!r}"
                raise ParseError(msg)

        if expect_family or depth != 0:
            msg = f"incomplete composition {text!r}"
            raise ParseError(msg)
        if not MIN_DEPTH <= len(outer_to_inner) <= MAX_DEPTH:
            depth_found = len(outer_to_inner)
            msg = f"composition {text!r} has depth {depth_found}; only 2 or 3 layers are supported"
            raise ParseError(msg)
        return cls(tuple(reversed(outer_to_inner)))
