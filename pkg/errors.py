from __future__ import annotations

ERROR_DOMAIN = "domain"
ERROR_INCOMPATIBLE_EXPONENTS = "incompatible_exponents"
ERROR_UNSUPPORTED_INFINITE_ORDER = "unsupported_infinite_order"
ERROR_INCONSISTENT_ORDERS = "inconsistent_orders"
ERROR_NON_INTEGRABLE = "non_integrable"
ERROR_GRID_COVERAGE = "grid_coverage"
ERROR_NON_DIFFEOMORPHIC_TARGET = "non_diffeomorphic_target"
ERROR_PRECONDITION = "precondition"
ERROR_USAGE = "usage"

ERROR_CODES = frozenset(
    {
        ERROR_DOMAIN,
        ERROR_INCOMPATIBLE_EXPONENTS,
        ERROR_UNSUPPORTED_INFINITE_ORDER,
        ERROR_INCONSISTENT_ORDERS,
        ERROR_NON_INTEGRABLE,
        ERROR_GRID_COVERAGE,
        ERROR_NON_DIFFEOMORPHIC_TARGET,
        ERROR_PRECONDITION,
        ERROR_USAGE,
    }
)


class EpiError(ValueError):
    def __init__(self, code: str, message: str) -> None:
        super().__init__(message)
        self.code = code if code in ERROR_CODES else ERROR_DOMAIN
        self.message = message

    def to_dict(self) -> dict[str, str]:
        return {"code": self.code, "message": self.message}


def domain_error(message: str) -> EpiError:
    return EpiError(ERROR_DOMAIN, message)
