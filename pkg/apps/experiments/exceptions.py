"""
Scenario file errors
"""


class ScenarioParseError(ValueError):
    """A scenario line could not be parsed or violates a parameter constraint"""

    def __init__(self, message: str, line: int = None, field: str = None):
        self.line = line
        self.field = field
        location = f'line {line}: ' if line is not None else ''
        super().__init__(f'{location}{message}')
