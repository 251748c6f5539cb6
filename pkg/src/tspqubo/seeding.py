"""Deterministic seed derivation.

A single splitmix64-style avalanche is used everywhere a child seed is
derived from a parent (per repetition, per iteration, per branch), so that
reordering or parallelizing work can never change which random stream a
unit of work sees.
"""

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _avalanche(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(*parts: int) -> int:
    """Mix integer parts into a 64-bit child seed, order sensitive."""
    state = _GOLDEN
    for part in parts:
        state = _avalanche((state + _GOLDEN + (int(part) & _MASK)) & _MASK)
    return state


def name_key(name: str) -> int:
    """Stable 64-bit key for a text label, independent of PYTHONHASHSEED."""
    state = _GOLDEN
    for ch in name.encode("utf-8"):
        state = _avalanche((state * 31 + ch) & _MASK)
    return state
