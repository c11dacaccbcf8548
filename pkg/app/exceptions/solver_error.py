from typing import Optional

from app.exceptions.bdie_error import BdieError


class SolverError(BdieError):

    def __init__(self, message, condition_estimate: Optional[float] = None):
        super().__init__(message)
        self.condition_estimate = condition_estimate
