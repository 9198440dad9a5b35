"""Exact spectral sequences of filtered chain complexes over Z and F_p."""

from .complexes import ChainComplex, ChainMap, Cone, mapping_cone
from .cosimplicial import CosimplicialData, HopfData, cobar, decalage, tot_filtration
from .exactalg import GF, ZZ, Hom, Matrix, Subquotient, smith
from .filtration import FilteredComplex, adic_filtration_complex, filtered_sphere, moore_complex
from .instance import InstanceError, load, loads
from .multiplicative import FilteredDGA, leibniz_check
from .omnibus import total_diff_table, verify_omnibus, verify_truncated_omnibus
from .randomgen import corpus, random_filtered_complex
from .render import ChartSpec, emit_chart
from .sseq import INF, PageData, SpectralSequence, reindex_second_page
from .taubss import bss_compare_to_sseq, build_bss, build_truncated_bss
from .taumod import TauModule, bigraded_homotopy, present_filtered_ring

__version__ = "0.1.0"
