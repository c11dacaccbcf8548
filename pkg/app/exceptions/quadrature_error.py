from app.exceptions.bdie_error import BdieError


class QuadratureError(BdieError):
    pass
