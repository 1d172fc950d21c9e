class ScootError(Exception):
    """Base class for errors raised by this package."""


class ImageLoadError(ScootError):
    def __init__(self, path, reason):
        self.path = str(path)
        self.reason = reason
        super().__init__(f"{self.path}: {reason}")


class UnreadableImageError(ImageLoadError):
    """The file is missing, unreadable or not a recognised raster."""


class UnsupportedImageError(ImageLoadError):
    """The raster is readable but uses an unsupported bit depth or variant."""


class EmptyImageError(ImageLoadError):
    """The raster declares a zero width or height."""


class LayoutMismatchError(ScootError, ValueError):
    """Two feature vectors built with different layouts were compared."""


class ManifestError(ScootError, ValueError):
    def __init__(self, key, reason):
        self.key = key
        super().__init__(f"manifest key {key!r}: {reason}")


class DegenerateRankingError(ScootError, ValueError):
    """Spearman correlation is undefined because a score list has no rank variance."""
