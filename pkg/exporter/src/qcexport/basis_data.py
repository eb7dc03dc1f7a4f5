"""Embedded Gaussian basis-set data (s and p shells only).

Shells are (angular momentum, [exponents], [contraction coefficients])
with coefficients referring to normalized primitives; SP shells from the
minimal-basis tables are split into separate s and p entries sharing
exponents.  Covered: STO-3G for H-Ar, 6-31G and cc-pVDZ for hydrogen.
Basis sets needing d shells (cc-pVDZ beyond H) are not included.
"""

# Least-squares STO expansions: exponents scale as zeta**2 times these.
_STO3G_1S_EXP = (2.227660584, 0.405771156, 0.109818)
_STO3G_1S_COEF = (0.154328967, 0.535328142, 0.444634542)
_STO3G_2SP_EXP = (0.994203, 0.231031, 0.0751386)
_STO3G_2S_COEF = (-0.099967229, 0.399512826, 0.700115468)
_STO3G_2P_COEF = (0.155916275, 0.607683719, 0.391957393)
_STO3G_3SP_EXP = (0.4828540806, 0.1347150629, 0.0527262)
_STO3G_3S_COEF = (-0.219620369, 0.225595433, 0.900398426)
_STO3G_3P_COEF = (0.010587604, 0.595167005, 0.462001012)

# Standard molecular scale factors (zeta) per element, (zeta1s, zeta2sp, zeta3sp).
_STO3G_ZETA = {
    "H": (1.24,), "He": (1.69,),
    "Li": (2.69, 0.80), "Be": (3.68, 1.15), "B": (4.68, 1.50), "C": (5.67, 1.72),
    "N": (6.67, 1.95), "O": (7.66, 2.25), "F": (8.65, 2.55), "Ne": (9.64, 2.88),
    "Na": (10.61, 3.48, 1.75), "Mg": (11.59, 3.90, 1.70), "Al": (12.56, 4.36, 1.70),
    "Si": (13.53, 4.83, 1.75), "P": (14.50, 5.31, 1.90), "S": (15.47, 5.79, 2.05),
    "Cl": (16.43, 6.26, 2.10), "Ar": (17.40, 6.74, 2.30),
}


def _scaled(exps, zeta):
    return tuple(e * zeta * zeta for e in exps)


def sto3g_shells(element):
    if element not in _STO3G_ZETA:
        raise KeyError(f"STO-3G data not embedded for element {element}")
    zetas = _STO3G_ZETA[element]
    shells = [(0, _scaled(_STO3G_1S_EXP, zetas[0]), _STO3G_1S_COEF)]
    if len(zetas) >= 2:
        e2 = _scaled(_STO3G_2SP_EXP, zetas[1])
        shells.append((0, e2, _STO3G_2S_COEF))
        shells.append((1, e2, _STO3G_2P_COEF))
    if len(zetas) >= 3:
        e3 = _scaled(_STO3G_3SP_EXP, zetas[2])
        shells.append((0, e3, _STO3G_3S_COEF))
        shells.append((1, e3, _STO3G_3P_COEF))
    return shells


_631G_H = [
    (0, (18.73113696, 2.825394365, 0.6401216923),
        (0.03349460434, 0.2347269535, 0.8137573261)),
    (0, (0.1612777588,), (1.0,)),
]

_CCPVDZ_H = [
    (0, (13.01, 1.962, 0.4446, 0.122), (0.019685, 0.137977, 0.478148, 0.501240)),
    (0, (0.122,), (1.0,)),
    (1, (0.727,), (1.0,)),
]


def shells_for(element, basis):
    basis = basis.lower().replace("*", "").replace("-", "")
    if basis in ("sto3g",):
        return sto3g_shells(element)
    if basis in ("631g",):
        if element != "H":
            raise KeyError(f"6-31G data only embedded for H, not {element}")
        return list(_631G_H)
    if basis in ("ccpvdz",):
        if element != "H":
            raise KeyError(f"cc-pVDZ data only embedded for H (s,p shells), not {element}")
        return list(_CCPVDZ_H)
    raise KeyError(f"basis set {basis!r} not embedded")


ATOMIC_NUMBER = {
    "H": 1, "He": 2, "Li": 3, "Be": 4, "B": 5, "C": 6, "N": 7, "O": 8, "F": 9,
    "Ne": 10, "Na": 11, "Mg": 12, "Al": 13, "Si": 14, "P": 15, "S": 16,
    "Cl": 17, "Ar": 18,
}
