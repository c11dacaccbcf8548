from app.exceptions.bdie_error import BdieError


class CoefficientError(BdieError):
    pass
