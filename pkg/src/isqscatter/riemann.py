"""Points on the logarithmic Riemann surface of k^p.

A SheetPoint keeps its argument unwrapped, so multivalued powers remember
which sheet they live on.  The branch cut runs along the negative imaginary
axis; sheet 0 (the physical sheet) is the band -pi/2 <= arg < 3pi/2, which
contains the positive imaginary axis where bound-state poles sit.

Fields may be numpy arrays of matching shape; all operations broadcast.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["SheetPoint", "mv_pow", "rotate", "sheet_of"]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SheetPoint:
    modulus: float
    argument: float

    def __post_init__(self):
        m = np.asarray(self.modulus, dtype=float)
        if not np.all(np.isfinite(m)) or not np.all(m > 0.0):
            raise ValueError("SheetPoint modulus must be finite and > 0 (k = 0, inf are branch points)")
        if not np.all(np.isfinite(self.argument)):
            raise ValueError("SheetPoint argument must be finite")

    @classmethod
    def from_complex(cls, z, sheet=0):
        """Lift a nonzero complex number onto the given sheet."""
        z = np.asarray(z, dtype=complex)
        arg = np.angle(z)
        arg = np.where(arg < -0.5 * np.pi, arg + TWO_PI, arg) + TWO_PI * sheet
        return cls(_unwrap0(np.abs(z)), _unwrap0(arg))

    @classmethod
    def near(cls, z, ref):
        """Lift z onto the sheet continuously connected to the reference point.

        The argument is ref.argument + Arg(z / ref), so z must stay within
        a half-turn of ref.
        """
        z = np.asarray(z, dtype=complex)
        arg = ref.argument + np.angle(z / ref.to_complex())
        return cls(_unwrap0(np.abs(z)), _unwrap0(arg))

    def to_complex(self):
        return self.modulus * np.exp(1j * np.asarray(self.argument))

    def scaled(self, factor):
        """Multiply the modulus by a positive real factor."""
        return SheetPoint(self.modulus * factor, self.argument)

    @property
    def log(self):
        return np.log(self.modulus) + 1j * np.asarray(self.argument)

    @property
    def sheet(self):
        return sheet_of(self)


def _unwrap0(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a


def mv_pow(z, p):
    """z**p on the sheet carried by z: exp(p (ln|z| + i arg z)) with arg not reduced."""
    return np.exp(p * z.log)


def rotate(z, dtheta):
    """Multiply by exp(i dtheta), advancing the unwrapped argument."""
    return SheetPoint(z.modulus, z.argument + dtheta)


def sheet_of(z):
    """Sheet index n = floor((arg + pi/2) / 2pi); sheet 0 is the physical sheet."""
    n = np.floor((np.asarray(z.argument) + 0.5 * np.pi) / TWO_PI).astype(int)
    return int(n) if n.ndim == 0 else n
