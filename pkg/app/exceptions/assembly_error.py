from app.exceptions.bdie_error import BdieError


class AssemblyError(BdieError):
    pass
