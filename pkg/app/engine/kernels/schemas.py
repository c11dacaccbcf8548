from enum import Enum


class KernelId(str, Enum):
    LAPLACE = 'laplace'
    PARAMETRIX_X = 'parametrix_x'
    PARAMETRIX_Y = 'parametrix_y'
    REMAINDER_X = 'remainder_x'
    REMAINDER_Y = 'remainder_y'
    CONORMAL_X = 'conormal_x'
    LAPLACE_CONORMAL = 'laplace_conormal'
    CONORMAL_Y = 'conormal_y'

    @property
    def needs_source_normal(self) -> bool:
        return self in (KernelId.CONORMAL_X, KernelId.LAPLACE_CONORMAL)

    @property
    def needs_target_normal(self) -> bool:
        return self == KernelId.CONORMAL_Y
