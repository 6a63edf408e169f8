# ptorus/domain/enums.py

from enum import Enum


class CommandType(str, Enum):
    """Команды CLI (группа-подкоманда)."""
    MASKIT_TRACE = "maskit-trace"
    MASKIT_CUSP = "maskit-cusp"
    MASKIT_MEMBER = "maskit-member"
    SEQ_CLASSIFY = "seq-classify"
    SEQ_LIMIT = "seq-limit"
    GEOM_CHECK = "geom-check"
    BUMP_CLOUD = "bump-cloud"
    BERS_CLOUD = "bers-cloud"
    RENDER_LIMITSET = "render-limitset"


class IsometryClass(str, Enum):
    """Тип изометрии по квадрату следа."""
    IDENTITY = "identity"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"
    LOXODROMIC = "loxodromic"


class FilterResult(str, Enum):
    """Результат необходимого условия дискретности."""
    PASS = "pass"
    FAIL = "fail"


class BowditchVerdictKind(str, Enum):
    """Вердикт поиска по дереву Фарея."""
    NOT_REJECTED = "not_rejected"
    REJECTED = "rejected"
    INCONCLUSIVE = "inconclusive"


class MembershipVerdict(str, Enum):
    """Трёхзначный ответ о принадлежности слайсу Маскита."""
    INSIDE = "inside"
    OUTSIDE = "outside"
    UNKNOWN = "unknown"


class ApproachKind(str, Enum):
    """Характер приближения последовательности к бесконечности."""
    HOROCYCLIC = "horocyclic"
    TANGENTIAL = "tangential"
    MIXED = "mixed"


class VerdictKind(str, Enum):
    """Исход классификатора последовательностей скручиваний."""
    CONVERGES_STANDARD = "converges_standard"
    CONVERGES_EXOTIC = "converges_exotic"
    DIVERGES = "diverges"
    SPLITS_BY_SUBSEQUENCE = "splits_by_subsequence"
    UNKNOWN = "unknown"


class DivergenceReason(str, Enum):
    """Причина расходимости."""
    HOROCYCLIC = "horocyclic"
    TANDIV = "tandiv"
    IRRATIONAL_LIMIT = "irrational_limit"


class CloudTag(str, Enum):
    """Тег облака параметров."""
    M = "M"
    MSTAR = "Mstar"
    MP = "Mp"
    BERS_GEOM = "BersGeom"
    BUMP_SET = "BumpSet"


class CloudBranch(str, Enum):
    """Ветвь, из которой получена точка облака."""
    SLICE = "slice"  # точки M без изменений
    CONJUGATE_SHIFT = "conjugate_shift"  # сопряжённые точки, сдвинутые на 2*nu_bar
    BUMP = "bump"  # комбинации (p+1)mu - p*nu_bar
