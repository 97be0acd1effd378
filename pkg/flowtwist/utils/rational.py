from fractions import Fraction


def format_rational(value: Fraction) -> str:
    """统一序列化为 "num/den"（整数也带分母 1）"""
    return f"{value.numerator}/{value.denominator}"
