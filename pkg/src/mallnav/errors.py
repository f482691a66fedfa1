"""Exception hierarchy with machine-readable error categories.

Every error raised by the library carries a stable ``category`` slug that
the CLI prints on stderr, so scripted callers can branch on it without
parsing prose.
"""


class MallnavError(Exception):
    category = "error"


class InvalidOrderError(MallnavError):
    category = "invalid-order"


class DegenerateBboxError(MallnavError):
    category = "degenerate-bbox"


class DegenerateTrainingSetError(MallnavError):
    category = "degenerate-training-set"


class FeatureDimensionMismatchError(MallnavError):
    category = "feature-dimension-mismatch"


class ImageTooSmallError(MallnavError):
    category = "image-too-small"


class EmptyInputError(MallnavError):
    category = "empty-input"


class MalformedFeatureFileError(MallnavError):
    category = "malformed-feature-file"


class InvalidAlphaError(MallnavError):
    category = "invalid-alpha"


class EmptyDatasetError(MallnavError):
    category = "empty-dataset"


class InvalidParamsError(MallnavError):
    category = "invalid-params"


class NothingToAnchorError(MallnavError):
    category = "nothing-to-anchor"


class UnmatchedColumnError(MallnavError):
    category = "unmatched-column"


class DuplicateIdError(MallnavError):
    category = "duplicate-id"


class DanglingLandmarkError(MallnavError):
    category = "dangling-landmark"


class UnknownBrandError(MallnavError):
    category = "unknown-brand"


class UnobservableShopError(MallnavError):
    category = "unobservable-shop"


class UnreachableError(MallnavError):
    category = "unreachable"
