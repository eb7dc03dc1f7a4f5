"""Command line driver: exporter --molecule NAME|--xyz PATH --basis NAME --out DIR."""

import argparse
import sys
from pathlib import Path

from .export import export_fixture
from .geometries import GEOMETRIES
from .scf import ScfError


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="exporter",
        description="Export FCIDUMP / Fock-matrix / reference-energy fixtures.")
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--molecule", choices=sorted(GEOMETRIES), help="named geometry")
    group.add_argument("--xyz", type=Path, help="xyz geometry file")
    parser.add_argument("--basis", default=None, help="basis set name (default per molecule)")
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory")
    parser.add_argument("--charge", type=int, default=0)
    parser.add_argument("--name", default=None, help="fixture name for reference.json")
    parser.add_argument("--level-shift", type=float, default=0.0,
                        help="virtual-orbital level shift to aid difficult SCF cases")
    args = parser.parse_args(argv)

    xyz_text = args.xyz.read_text() if args.xyz else None
    try:
        res = export_fixture(molecule=args.molecule, basis=args.basis, outdir=args.out,
                             xyz_text=xyz_text, charge=args.charge, name=args.name,
                             level_shift=args.level_shift)
    except ScfError as exc:
        print(f"export failed: {exc}", file=sys.stderr)
        return 1
    print(f"wrote fixture to {args.out}  (E_SCF = {res.e_total:.10f} Ha, "
          f"{res.iterations} iterations)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
