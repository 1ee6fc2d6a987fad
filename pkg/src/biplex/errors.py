class BiplexError(Exception):
    pass


class GraphParseError(BiplexError, ValueError):
    def __init__(self, msg, lineno=None):
        super().__init__(msg)
        self.lineno = lineno


class EmptyGraphError(GraphParseError):
    pass


class ParameterError(BiplexError, ValueError):
    pass


class InfeasibleError(ParameterError):
    """A side of the graph is smaller than its size lower bound."""


class ContractError(BiplexError, AssertionError):
    pass


class SearchTimeout(BiplexError):
    pass
