"""Regenerate the census golden files from the VF2 oracle.

Run from the repository root: ``python3 tests/make_golden.py``.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from invgraphs import families  # noqa: E402
from vf2_oracle import classify_rooted, summarize  # noqa: E402

GOLDEN = Path(__file__).parent / "golden"

CASES = {
    "free_group_2_8_n5_d3_strict": (lambda: families.free_group(2, 8), 5, 3, False),
    "free_group_2_8_n5_d3_relabel": (lambda: families.free_group(2, 8), 5, 3, True),
    "free_abelian_2_8_n5_d2_strict": (lambda: families.free_abelian(2, 8), 5, 2, False),
    "bicyclic_10_n2_d8_strict": (lambda: families.bicyclic_tree(10), 2, 8, False),
    "bicyclic_17_n9_d8_strict": (lambda: families.bicyclic_tree(17), 9, 8, False),
    "bicyclic_25_n17_d8_strict": (lambda: families.bicyclic_tree(25), 17, 8, False),
}


def write(name, build, max_norm, depth, relabel):
    rows = classify_rooted(build(), max_norm, depth, relabel)
    per, cum = summarize(rows)
    lines = [f"# VF2 oracle: max_norm={max_norm} depth={depth} relabel={int(relabel)}", "norm\tvertex\tclass"]
    lines += [f"{n}\t{v}\t{c}" for n, v, c in rows]
    lines += [f"# cumulative {n} {cum[n]}" for n in sorted(cum)]
    (GOLDEN / f"{name}.tsv").write_text("\n".join(lines) + "\n")
    return cum


def main():
    GOLDEN.mkdir(exist_ok=True)
    for name, args in CASES.items():
        cum = write(name, *args)
        print(name, cum)


if __name__ == "__main__":
    main()
