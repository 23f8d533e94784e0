#!/usr/bin/env python3
"""Write the 2^G_l1 principal graphs of the bundled corpus as DOT files."""

import argparse
from pathlib import Path

from neargroup.corpus import corpus_all
from neargroup.fusion import principal_graph
from neargroup.solutions import dimension_d


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="graphs")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(exist_ok=True)
    for name, s in corpus_all().items():
        l = s.m // s.n
        gr = principal_graph(s.group, l)
        path = out / f"{name}.dot"
        path.write_text(gr.to_dot())
        d = dimension_d(s.n, s.m).value
        print(f"{path}  |Gamma|^2 = {gr.norm_squared():.9f} = 1 + {l} * {d:.9f}")


if __name__ == "__main__":
    main()
