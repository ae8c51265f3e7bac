"""Deterministic float formatting shared by the CSV/JSON writers."""


def fmt(x) -> str:
    """17 significant digits; complex numbers as 're+imj'."""
    if isinstance(x, complex):
        return f"{x.real:.17g}{x.imag:+.17g}j"
    return f"{float(x):.17g}"
