"""Error types shared across the package."""


class NetlistError(Exception):
    """Malformed netlist input (syntax, undeclared qubit, bad arity, ...)."""

    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(self._render())

    def _render(self):
        if self.line is None:
            return self.message
        if self.col is None:
            return f"line {self.line}: {self.message}"
        return f"line {self.line}, col {self.col}: {self.message}"


class ConfigError(Exception):
    """Infeasible or inconsistent configuration (budgets, profiles, parameters)."""
