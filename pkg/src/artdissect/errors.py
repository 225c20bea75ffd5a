"""Exception hierarchy.

Every error carries a stable ``code`` (the class name) so the CLI can emit
machine-readable error records.
"""


class ArtDissectError(Exception):
    @property
    def code(self) -> str:
        return type(self).__name__


class BadParameter(ArtDissectError, ValueError):
    pass


# ingest
class UnreadableFile(ArtDissectError):
    pass


class UnsupportedFormat(ArtDissectError):
    pass


class EmptyImage(ArtDissectError, ValueError):
    pass


class BadBinCount(BadParameter):
    pass


# dissection
class RegionOutOfBounds(ArtDissectError, ValueError):
    pass


class NotAPartition(ArtDissectError, ValueError):
    pass


class DegenerateCut(ArtDissectError, ValueError):
    pass


class RegionTooSmall(ArtDissectError, ValueError):
    pass


# composition
class NotHorizontalFirst(ArtDissectError):
    pass


# corpus
class SchemaError(ArtDissectError):
    pass


class DuplicateId(ArtDissectError):
    pass


class BadYear(ArtDissectError):
    pass


class EmptyManifest(ArtDissectError):
    pass


class AllItemsFailed(ArtDissectError):
    pass


class BadBoundaries(BadParameter):
    pass


class EmptyGenre(ArtDissectError):
    pass


class MalformedRecords(ArtDissectError):
    pass


# simnet
class TooFewSamples(ArtDissectError):
    pass


class BinMismatch(ArtDissectError, ValueError):
    pass


class TooFewArtists(ArtDissectError):
    pass


class IncompletePartition(ArtDissectError, ValueError):
    pass


# synth
class BadSpec(ArtDissectError, ValueError):
    pass


class IoError(ArtDissectError):
    pass
