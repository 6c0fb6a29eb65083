# commands/__init__.py
"""Uma etapa da CLI por módulo; cada um expõe register(subparsers) e run(args) -> código de saída."""
import argparse
import math
import sys
import uuid


def new_run_id() -> str:
    return uuid.uuid4().hex[:8]


def success(message: str):
    print(f"✅ {message}")


def warning(message: str):
    print(f"⚠️ {message}", file=sys.stderr)


def parse_image_size(text: str) -> tuple:
    """'64x64' -> (64, 64)."""
    try:
        width, height = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"Tamanho de imagem inválido '{text}' (use LxA, ex.: 64x64)")
    if width < 1 or height < 1:
        raise argparse.ArgumentTypeError(f"Tamanho de imagem deve ser positivo: '{text}'")
    return width, height


def _parse_angle(token: str) -> float:
    """'1.5', 'pi', '2pi', '-pi', 'pi/2', '3/4pi' ou 'π' -> radianos."""
    token = token.strip().lower().replace("π", "pi")
    if "pi" not in token:
        return float(token)
    head, _, tail = token.partition("pi")
    head = head.rstrip("*")
    if "/" in head:
        numerator, denominator = head.split("/")
        coefficient = float(numerator or 1) / float(denominator)
    elif head in ("", "+", "-"):
        coefficient = -1.0 if head == "-" else 1.0
    else:
        coefficient = float(head)
    if tail:
        if not tail.startswith("/"):
            raise ValueError(f"Ângulo inválido: '{token}'")
        coefficient /= float(tail[1:])
    return coefficient * math.pi


def parse_angle_range(text: str) -> tuple:
    """'0,2pi' -> (0.0, 6.283...); aceita números e múltiplos de pi."""
    try:
        lo, hi = (_parse_angle(part) for part in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"Intervalo de ângulos inválido '{text}' (use lo,hi, ex.: 0,2pi)")
    if not hi > lo:
        raise argparse.ArgumentTypeError(f"Intervalo de ângulos exige hi > lo: '{text}'")
    return lo, hi
