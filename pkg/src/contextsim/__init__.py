"""contextsim: slotted-time simulator and context-protocol toolkit for
dependable low-power IoT studies (age-of-information scheduling, duty-cycled
event detection, and task-aware process monitoring)."""

__version__ = "0.1.0"
