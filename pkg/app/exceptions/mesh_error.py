from typing import Optional

from app.exceptions.bdie_error import BdieError


class MeshError(BdieError):

    def __init__(self, message, line_number: Optional[int] = None):
        if line_number is not None:
            message = f'line {line_number}: {message}'
        super().__init__(message)
        self.line_number = line_number
