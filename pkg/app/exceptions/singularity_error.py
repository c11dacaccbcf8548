from app.exceptions.bdie_error import BdieError


class SingularityError(BdieError):
    pass
