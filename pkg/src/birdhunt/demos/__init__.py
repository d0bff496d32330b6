from .format import (
    DemoError,
    DemoFile,
    DemoRecord,
    DemoRecorder,
    DemoSummary,
    load_demo,
    record_oracle,
    replay_check,
    validate_demo,
)

__all__ = [
    "DemoError",
    "DemoFile",
    "DemoRecord",
    "DemoRecorder",
    "DemoSummary",
    "load_demo",
    "record_oracle",
    "replay_check",
    "validate_demo",
]
