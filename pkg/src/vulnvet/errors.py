class VetError(Exception):
    """Base class for workspace-level tool errors."""


class ManifestError(VetError):
    pass


class MissingDependency(VetError):
    def __init__(self, name, version):
        super().__init__("dependency %s:%s not found in the library store" % (name, version))
        self.name = name
        self.version = version


class UnknownLibrary(VetError):
    pass


class UnknownArchive(VetError):
    pass


class DuplicateVuln(VetError):
    pass


class EmptyChangeSet(VetError):
    pass


class EmptyRange(VetError):
    pass


class IdMismatch(VetError):
    pass


class NotReached(VetError):
    pass


class NoTestsMatched(VetError):
    pass


class MalformedTraceLine(VetError):
    def __init__(self, line_no, reason):
        super().__init__("trace line %d: %s" % (line_no, reason))
        self.line_no = line_no


class NoTouchPoints(VetError):
    pass


class EmptyConstructSet(VetError):
    pass


class NoCandidates(VetError):
    pass
