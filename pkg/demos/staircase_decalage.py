"""Tot and décalage on a cosimplicial complex with one long differential.

The zig-zag a_0 -> b_1 ... -> c gives d_2(a_0) = 2c in the Tot spectral
sequence, leaving Z/2 on E_3. Décalage turns the same data into a filtration
whose E_r page is E_{r+1} of the unnormalized Tot, with (n, s) moved to
(n, s + n). The unnormalized Tot also carries classes at the top level
s = m, left over from cutting the object off at m. Below that level its
pages agree with the normalized ones.
"""

from taufilt import SpectralSequence
from taufilt.cosimplicial import UNNORMALIZED, decalage, double_complex, kan_extend, staircase, tot_filtration, verify_decalage, verify_tot
from taufilt.exactalg import ZZ
from taufilt.render import factor_text

A = kan_extend(double_complex(*staircase(ZZ, 2, 0, 2, 3, 0, 2)))


def show(title, ss, pages):
    print(title)
    for r in pages:
        page = ss.page(r)
        cells = ", ".join(f"({n},{s}) {factor_text(page.group(n, s))}" for n, s in page.nonzero_cells())
        print(f"  E{r}: {cells}")


show("Tot", SpectralSequence(tot_filtration(A).filtered), (1, 2, 3))
show("Tot, unnormalized", SpectralSequence(tot_filtration(A, UNNORMALIZED).filtered), (2, 3))
show("décalage", SpectralSequence(decalage(A).filtered), (1, 2))
print("Tot checks pass:", verify_tot(A).passed)
print("décalage checks pass:", verify_decalage(A, 4).passed)
