"""Exception types shared by the library and the command line."""


class FroglabError(Exception):
    exit_code = 1


class ConfigError(FroglabError, ValueError):
    exit_code = 2


class InfeasibleError(FroglabError, ValueError):
    """A requested computation does not fit its window, horizon or enumeration budget."""

    exit_code = 3


class AllCensoredError(FroglabError, RuntimeError):
    exit_code = 4
