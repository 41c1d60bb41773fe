"""Rewrite the golden dimension tables from the brute-force kernels.

    python3 tests/golden/regenerate.py

Run only when a table is meant to change; the tests diff against these
files on every run.
"""

from pathlib import Path

from opeglue.conformal import builtin_sl2, builtin_virasoro
from opeglue.enveloping import EnvelopingVA
from opeglue.gluing import format_table, y2_kernel, yn_kernel

HERE = Path(__file__).parent

# (file, header, producer)
TABLES = [
    ("v2_vir_K4.txt", "Vir: dim Ker Y^2, degree N, tensor weight <= W, cutoff 4",
     lambda: y2_kernel(EnvelopingVA(builtin_virasoro(), 4), 4)),
    ("v2_sl2_K4.txt", "Cur(sl2): dim Ker Y^2, degree N, tensor weight <= W, cutoff 4",
     lambda: y2_kernel(EnvelopingVA(builtin_sl2(), 4), 4)),
    ("y3_vir_W3.txt", "Vir: dim Ker Y^3, degree N, tensor weight <= W, pole bound 3, output weight 9",
     lambda: yn_kernel(EnvelopingVA(builtin_virasoro(), 9), 3, 3, pole_bound=3, out_weight=9)),
]


def main() -> None:
    for name, header, make in TABLES:
        (HERE / name).write_text(format_table(make(), header), encoding="utf-8")
        print("wrote", name)


if __name__ == "__main__":
    main()
