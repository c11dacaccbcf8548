from app.exceptions.bdie_error import BdieError


class ConfigError(BdieError):
    pass
