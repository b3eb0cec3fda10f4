"""Exception hierarchy shared across the service."""


class ChoirError(Exception):
    """Base class for all service-level errors."""


# repository store

class NotARepository(ChoirError):
    pass


class DocumentNotFound(ChoirError):
    pass


class RevisionNotFound(ChoirError):
    pass


class StaleBase(ChoirError):
    """Expected base revision is no longer the latest for the path."""

    def __init__(self, path: str, expected: str, actual: str):
        super().__init__(f"stale base for {path}: expected {expected}, repository is at {actual}")
        self.path = path
        self.expected = expected
        self.actual = actual


class EmptyEdit(ChoirError):
    """Proposed content is identical to the current content."""


class MalformedTrailer(ChoirError):
    """Context trailer key present but its payload cannot be decoded."""


# assistant

class ProviderUnavailable(ChoirError):
    pass


class DegenerateOutput(ChoirError):
    """Provider returned empty content or content identical to the input."""


# workflow

class IllegalTransition(ChoirError):
    def __init__(self, state, event):
        super().__init__(f"event {event} not allowed in state {state}")
        self.state = state
        self.event = event


class SelectionNotOffered(ChoirError):
    """Selected messages are not a subset of the offered window."""


class NoManagersConfigured(ChoirError):
    pass


class NotAManager(ChoirError):
    pass


class NotAMember(ChoirError):
    pass


class FlowNotFound(ChoirError):
    pass


# gateway

class MalformedEvent(ChoirError):
    pass


class CorruptJournal(ChoirError):
    def __init__(self, record_index: int, reason: str):
        super().__init__(f"journal record {record_index}: {reason}")
        self.record_index = record_index
        self.reason = reason


class ConfigError(ChoirError):
    def __init__(self, key: str, reason: str):
        super().__init__(f"config key {key!r}: {reason}")
        self.key = key
        self.reason = reason
