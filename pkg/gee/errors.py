class GeeError(Exception):
    """Base class for every error raised by the gee package."""


class ConfigError(GeeError, ValueError):
    pass


class GraphFormatError(GeeError, ValueError):
    """A line of an edge-list or label file could not be parsed."""

    def __init__(self, path, lineno, message):
        self.path = str(path)
        self.lineno = lineno
        if lineno is None:
            super().__init__(f'{self.path}: {message}')
        else:
            super().__init__(f'{self.path}, line {lineno}: {message}')


class GraphValidationError(GeeError, ValueError):
    pass


class LabelError(GeeError, ValueError):
    pass


class EmbeddingError(GeeError, ValueError):
    pass


class ClusteringError(GeeError, ValueError):
    pass


class QualityError(GeeError, ValueError):
    pass


class EnsembleError(GeeError, ValueError):
    pass


class SimulationError(GeeError, ValueError):
    pass


class ExperimentError(GeeError, ValueError):
    pass
