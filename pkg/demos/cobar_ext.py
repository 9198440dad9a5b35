"""Ext over an exterior Hopf algebra from its cobar cosimplicial object.

Ext over Λ(x) is a polynomial ring on one class h in bidegree (1, |x|), so
the table below has a single F_p in each row s at t = s·|x|. The cobar
computation is checked against a minimal-resolution count and against the
E_2 page of the Tot spectral sequence. Over an odd prime x must sit in odd
degree, otherwise Λ(x) is not a Hopf algebra and ``cobar`` refuses it.
"""

from taufilt.cosimplicial import cobar, exterior_hopf

for p, t0 in [(2, 1), (3, 1), (2, 3)]:
    res = cobar(exterior_hopf(p, t0), None, s_max=6, t_max=18)
    print(f"Λ(x) over F_{p}, |x| = {t0}: agrees = {res.agrees}")
    for s in range(res.table.s_max + 1):
        row = [res.table.dim(s, t) for t in range(res.table.t_max + 1)]
        print(f"  s={s}: " + " ".join(str(d) if d else "." for d in row))
