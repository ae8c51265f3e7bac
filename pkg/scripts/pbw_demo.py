#!/usr/bin/env python3
"""Normal-order a few words and run the overlap check on a relation file.

    python3 scripts/pbw_demo.py                      # bundled quantum-matrix relations
    python3 scripts/pbw_demo.py my_relations.txt     # '# generators: ...' then 'LHS = RHS' lines
"""
import sys

from qdeform.ncalg import format_poly, load_fixture, load_system_text, normal_order, pbw_overlap_check, parse_poly

if len(sys.argv) > 1:
    S = load_system_text(open(sys.argv[1]).read())
else:
    S = load_fixture("sl2")
A = S.alphabet
names = A.names
for w in dict.fromkeys((names[::-1], names[-1:] + names[:1], names[1:] + names[:1])):
    p = parse_poly(" ".join(w), A)
    print(f"{' '.join(w):>12}  ->  {format_poly(normal_order(p, S), A)}")
fails = pbw_overlap_check(S)
print("PBW:", "holds through degree 3" if not fails else "fails")
for f in fails:
    print("  witness:", f.text)
