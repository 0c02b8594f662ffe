"""Exception hierarchy with module-qualified error codes.

Every error raised by the engine carries a ``code`` of the form
``<module>/<slug>``. The CLI prints the code in its single-line error
output and the HTTP service embeds it in 4xx response bodies, so
callers can dispatch on failures without parsing prose.
"""


class EngineError(Exception):
    code = "engine/error"

    def __init__(self, message: str, *, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


# market-data ---------------------------------------------------------------

class IngestError(EngineError):
    code = "market-data/ingest"


class MalformedRowError(IngestError):
    code = "market-data/malformed-row"


class DuplicateKeyError(IngestError):
    code = "market-data/duplicate-key"


class PanelInvariantError(EngineError):
    code = "market-data/invariant"


class EpochError(EngineError):
    code = "market-data/epoch"


class InsufficientDataError(EngineError):
    code = "market-data/insufficient-data"


# seasonal ------------------------------------------------------------------

class SeasonalError(EngineError):
    code = "seasonal/error"


class LogitDomainError(SeasonalError):
    code = "seasonal/logit-domain"


class SeasonalRankError(SeasonalError):
    code = "seasonal/rank-deficient"


# posterior -----------------------------------------------------------------

class PosteriorError(EngineError):
    code = "posterior/error"


class RankDeficiencyError(PosteriorError):
    code = "posterior/rank-deficient"


# elicitation ---------------------------------------------------------------

class ElicitationError(EngineError):
    code = "elicitation/error"


class ProfileValidationError(ElicitationError):
    code = "elicitation/invalid-profile"


class TranscriptError(ElicitationError):
    code = "elicitation/incomplete-transcript"


# forecast ------------------------------------------------------------------

class ForecastError(EngineError):
    code = "forecast/error"


class MissingPosteriorError(ForecastError):
    code = "forecast/missing-posterior"


class MissingCovariateError(ForecastError):
    code = "forecast/missing-covariate"


# service-cli ---------------------------------------------------------------

class ConfigError(EngineError):
    code = "service-cli/config"
