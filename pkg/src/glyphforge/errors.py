"""Exception types shared across the pipeline."""


class GlyphForgeError(Exception):
    """Base class for all package errors."""


class CharsetSpecInvalid(GlyphForgeError):
    pass


class CharsetEmpty(GlyphForgeError):
    pass


class GlyphMissing(GlyphForgeError):
    def __init__(self, codepoint: int):
        self.codepoint = codepoint
        super().__init__(f"no outline for U+{codepoint:04X}")


class GlyphBlank(GlyphForgeError):
    def __init__(self, codepoint: int):
        self.codepoint = codepoint
        super().__init__(f"glyph U+{codepoint:04X} rendered without ink")


class DatasetEmpty(GlyphForgeError):
    pass


class SplitDegenerate(GlyphForgeError):
    pass


class ConfigInvalid(GlyphForgeError):
    pass


class ShapeMismatch(GlyphForgeError):
    pass


class StyleDimMismatch(GlyphForgeError):
    pass


class StyleUnknown(GlyphForgeError):
    pass


class MixSpecInvalid(GlyphForgeError):
    pass


class NumericalDivergence(GlyphForgeError):
    pass


class CheckpointInvalid(GlyphForgeError):
    pass
