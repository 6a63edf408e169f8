# ptorus/domain/models/types.py

from typing import Annotated, Any, List

from pydantic import BeforeValidator, PlainSerializer


def coerce_complex(value: Any) -> Any:
    """
    Комплексное число из входного документа: число, строка 'RE,IM' или '1+2j', [re, im], {"re":..., "im":...}.
    """
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, dict) and set(value) <= {"re", "im"}:
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    if isinstance(value, str) and "," in value:
        re_part, im_part = value.split(",", 1)
        return complex(float(re_part), float(im_part))
    if isinstance(value, str):
        return complex(value.replace(" ", "").replace("i", "j"))
    return value


def complex_to_pair(value: complex) -> List[float]:
    return [value.real, value.imag]


# Комплексное поле: гибкий ввод, в JSON пишется как [re, im]
ComplexValue = Annotated[
    complex,
    BeforeValidator(coerce_complex),
    PlainSerializer(complex_to_pair, when_used="json"),
]
