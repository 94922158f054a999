"""Chinese font style transfer: datasets, a style-conditioned U-Net, mixing tools."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    CharsetEmpty,
    CharsetSpecInvalid,
    CheckpointInvalid,
    ConfigInvalid,
    DatasetEmpty,
    GlyphBlank,
    GlyphForgeError,
    GlyphMissing,
    MixSpecInvalid,
    NumericalDivergence,
    ShapeMismatch,
    SplitDegenerate,
    StyleDimMismatch,
    StyleUnknown,
)
