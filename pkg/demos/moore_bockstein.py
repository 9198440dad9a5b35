"""Walk through the 2-adic filtration of Z --4--> Z.

The homotopy of the Moore complex is Z/4. Its 2-adic filtration has
associated graded F_2 in filtrations 0 and 1, and the spectral sequence
finds both classes after a page of d_2's. Run with ``python3 demos/moore_bockstein.py``.
"""

from taufilt import INF, SpectralSequence, adic_filtration_complex, moore_complex
from taufilt.omnibus import verify_omnibus
from taufilt.render import factor_text
from taufilt.taubss import bss_compare_to_sseq, build_truncated_bss
from taufilt.taumod import bigraded_homotopy

X = adic_filtration_complex(moore_complex(2, 2), 2, 6)
ss = SpectralSequence(X)

for r in (1, 2, 3):
    page = ss.page(r)
    cells = ", ".join(f"({n},{s}) {factor_text(page.group(n, s))}" for n, s in page.nonzero_cells())
    print(f"E{r}: {cells}")
    diffs = page.nonzero_diffs()
    if diffs:
        print(f"  d{r} nonzero out of {diffs}")

inf = ss.page(INF)
print("E_inf:", ", ".join(f"({n},{s}) {factor_text(inf.group(n, s))}" for n, s in inf.nonzero_cells()))

# The Z[tau]-module: pi_{0,s} = H_0(X^s), with tau induced by x2 on the levels.
M = bigraded_homotopy(X)
print("\nbigraded homotopy in stem 0")
for s in range(0, 7):
    print(f"  pi(0,{s}) = {factor_text(M.group(0, s))}")

# Every class gets a verdict: either it lifts to a tau-torsion element whose
# order is read off the page where it dies, or it survives.
report = verify_omnibus(X, ss)
print("\nomnibus passed:", report.passed)
for rec in report.records:
    if rec.checks:
        print(f"  ({rec.n},{rec.s}) cycle length {rec.cycle_length}, checks {sorted(rec.checks)}")

# The tau-Bockstein spectral sequence carries the same information one
# weight at a time; the truncated version only sees tau^k-torsion.
print("\nBockstein comparison:", bss_compare_to_sseq(X).ok)
B = build_truncated_bss(X, 2)
print("truncated k=2 E1 cells:", len(B.page(1).nonzero_cells()))
