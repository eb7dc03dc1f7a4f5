"""Named molecular geometries (Angstrom) with their customary basis sets."""

GEOMETRIES = {
    "h2": {
        "symbols": ["H", "H"],
        "coords": [[0.0, 0.0, 0.0], [0.0, 0.0, 0.7]],
        "default_basis": "sto-3g",
    },
    "h4_square": {
        "symbols": ["H", "H", "H", "H"],
        "coords": [[0.0, 0.0, 0.0], [0.0, 0.0, 2.0], [0.0, 2.0, 0.0], [0.0, 2.0, 2.0]],
        "default_basis": "sto-3g",
    },
    "h4_chain": {
        "symbols": ["H", "H", "H", "H"],
        "coords": [[0.0, 0.0, 0.7 * k] for k in range(4)],
        "default_basis": "sto-3g",
    },
    "h4_chain_stretched": {
        "symbols": ["H", "H", "H", "H"],
        "coords": [[0.0, 0.0, 2.0 * k] for k in range(4)],
        "default_basis": "sto-3g",
    },
    "h6_chain": {
        "symbols": ["H"] * 6,
        "coords": [[0.0, 0.0, 0.7 * k] for k in range(6)],
        "default_basis": "sto-3g",
    },
    "h10_chain": {
        "symbols": ["H"] * 10,
        "coords": [[0.0, 0.0, 0.7 * k] for k in range(10)],
        "default_basis": "cc-pvdz",
    },
    "lih": {
        "symbols": ["H", "Li"],
        "coords": [[0.0, 0.0, 0.0], [0.0, 0.0, 1.546]],
        "default_basis": "sto-3g",
    },
    "h2o": {
        "symbols": ["O", "H", "H"],
        "coords": [[0.0, 0.0, 0.127161],
                   [0.0, 0.758082, -0.508642],
                   [0.0, -0.758082, -0.508642]],
        "default_basis": "sto-3g",
    },
    "ch4": {
        "symbols": ["C", "H", "H", "H", "H"],
        "coords": [[0.0, 0.0, 0.0],
                   [0.6276, 0.6276, 0.6276],
                   [0.6276, -0.6276, -0.6276],
                   [-0.6276, 0.6276, -0.6276],
                   [-0.6276, -0.6276, 0.6276]],
        "default_basis": "sto-3g",
    },
    "hcn": {
        "symbols": ["C", "H", "N"],
        "coords": [[0.0, 0.0, -0.500078],
                   [0.0, 0.0, -1.569990],
                   [0.0, 0.0, 0.652923]],
        "default_basis": "sto-3g",
    },
    "c2h4": {
        "symbols": ["C", "C", "H", "H", "H", "H"],
        "coords": [[0.0, 0.0, 0.653036], [0.0, 0.0, -0.653036],
                   [0.0, 0.915747, 1.229213], [0.0, -0.915747, 1.229213],
                   [0.0, -0.915747, -1.229213], [0.0, 0.915747, -1.229213]],
        "default_basis": "sto-3g",
    },
    "n2": {
        "symbols": ["N", "N"],
        "coords": [[0.0, 0.0, 0.538653], [0.0, 0.0, -0.538653]],
        "default_basis": "cc-pvdz",
    },
    "so3": {
        "symbols": ["S", "O", "O", "O"],
        "coords": [[0.0, 0.0, 0.0],
                   [0.0, 1.416762, 0.0],
                   [1.226952, -0.708381, 0.0],
                   [-1.226952, -0.708381, 0.0]],
        "default_basis": "cc-pvdz",
    },
    "f2": {
        "symbols": ["F", "F"],
        "coords": [[0.0, 0.0, 0.0], [0.0, 0.0, 1.4]],
        "default_basis": "sto-3g",
    },
    "cl2": {
        "symbols": ["Cl", "Cl"],
        "coords": [[0.0, 0.0, 0.0], [0.0, 0.0, 2.130]],
        "default_basis": "sto-3g",
    },
    "beh2": {
        "symbols": ["H", "Be", "H"],
        "coords": [[0.0, 0.0, -1.304], [0.0, 0.0, 0.0], [0.0, 0.0, 1.304]],
        "default_basis": "sto-3g",
    },
}


def parse_xyz(text):
    """Minimal .xyz reader: count line, comment line, then 'El x y z' rows."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    try:
        count = int(lines[0].split()[0])
        body = lines[2:2 + count]
    except (ValueError, IndexError):
        # bare format without the two header lines
        body = lines
    symbols, coords = [], []
    for ln in body:
        toks = ln.split()
        symbols.append(toks[0].capitalize())
        coords.append([float(t) for t in toks[1:4]])
    return symbols, coords
