"""
Configuration errors for the system model
"""


class InvalidConfigurationError(ValueError):
    """Raised when a configuration violates a model invariant.

    ``errors`` maps each offending field to its list of messages.
    """

    def __init__(self, errors):
        self.errors = {field: [str(m) for m in messages] for field, messages in errors.items()}
        details = '; '.join(
            f"{field}: {' '.join(messages)}" for field, messages in self.errors.items()
        )
        super().__init__(f'Invalid configuration ({details})')
