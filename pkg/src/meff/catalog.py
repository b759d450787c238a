"""Static catalog of the 38 even-spin-vertex fourth-order terms.

The fourth-order coefficient splits into 76 inner products of perturbation
vectors against resolvent strings; terms with an odd number of spin vertices
are purely imaginary and drop from the real part, leaving the 38 rows stored
here.  Each row records the operator content (spin vertices sigma*B, total
momentum insertions P_f, resolvents H0^-1) and the tabulated leading
divergence.  Five rows form the dominant family (labels E0..E4); exactly one
row, (16, 1, 2), carries the -(lambda/m)^2 divergence.

The catalog is data, not derivation: rows are transcribed with their table
and row numbers and are never regenerated symbolically.  The "order" column
is a one-sided bound (upper or lower depending on the row); the printed tag
is kept verbatim in ``printed_order`` alongside the coarse ``Order`` enum.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

__all__ = [
    "Order",
    "TermDescriptor",
    "PowerCount",
    "ParitySummary",
    "list_terms",
    "predicted_order",
    "parity_filter",
    "power_count",
    "dominant_family",
    "BALANCE_CONSTANT",
]


class Order(str, enum.Enum):
    """Coarse divergence class of one term as the UV cutoff grows."""

    ZERO = "zero"
    LOG = "log"
    LOG2 = "log^2"
    SQRT = "sqrt"
    MINUS_SQRT = "-sqrt"
    LAMBDA2 = "Lambda^2"
    MINUS_LAMBDA2 = "-Lambda^2"


@dataclass(frozen=True)
class TermDescriptor:
    """One catalogued inner product (Phi_l, H_m Phi_n) with operator counts."""

    phi_left: int
    h_mid: int
    phi_right: int
    sigma_b_count: int
    pf_count: int
    h0inv_count: int
    predicted_order: Order
    printed_order: str
    table_row: tuple[int, int]
    dominant_label: str | None = None
    note: str | None = None

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.phi_left, self.h_mid, self.phi_right)


@dataclass(frozen=True)
class PowerCount:
    """Naive divergence bound and which counting violation the term shows."""

    naive_order: Order
    collinear: bool   # soft |k1+k2| region upgrades the bound to sqrt
    asymmetric: bool  # strongly asymmetric integrand upgrades it to Lambda^2


@dataclass(frozen=True)
class ParitySummary:
    """Bookkeeping of the even-spin-vertex survivors out of all 76 terms."""

    total_terms: int
    survivors: int
    dropped_odd: int
    sigma_b_values: tuple[int, ...]
    group_sizes: tuple[int, ...]
    group_survivors: tuple[int, ...]


# All resolvent counts below satisfy h0inv - (sigma_b + pf)/2 == 2: each term
# needs exactly two more denominators than half its insertion count to sit at
# the marginal (log^2) power counting.
BALANCE_CONSTANT = 2

_GID = "carries an overall -|g1|^2 factor"
_ZERO_PF = "P_f A phi_0 = A P_f phi_0 = 0"
_ZERO_ODD = "integrand is odd in the photon momentum"

_ROWS = (
    # table, row, (l, m, n), sigmaB, Pf, H0inv, printed, order, dominant, note
    (1, 1, (1, 1, 1), 2, 0, 3, "log^2", Order.LOG2, None, _GID),
    (1, 2, (2, 1, 2), 4, 2, 5, "log^2", Order.LOG2, None, _GID),

    (2, 1, (3, 1, 3), 2, 0, 3, "log^2", Order.LOG2, None, None),
    (2, 2, (5, 1, 3), 2, 2, 4, "log^2", Order.LOG2, None, None),
    (2, 3, (3, 1, 5), 2, 2, 4, "log^2", Order.LOG2, None, None),
    (2, 4, (4, 1, 4), 0, 2, 3, "+sqrt(Lambda/m)", Order.SQRT, None, None),
    (2, 5, (6, 1, 4), 2, 2, 4, "-sqrt(Lambda/m)", Order.MINUS_SQRT, None, None),
    (2, 6, (4, 1, 6), 2, 2, 4, "-sqrt(Lambda/m)", Order.MINUS_SQRT, None, None),
    (2, 7, (5, 1, 5), 2, 4, 5, "+sqrt(Lambda/m)", Order.SQRT, None, None),
    (2, 8, (6, 1, 6), 4, 2, 5, "log^2", Order.LOG2, "E2", None),

    (3, 1, (1, 4, 1), 0, 0, 2, "log^2", Order.LOG2, None, None),
    (3, 2, (2, 4, 2), 2, 2, 4, "log^2", Order.LOG2, None, None),
    (3, 3, (1, 5, 1), 0, 2, 3, "log(Lambda/m)", Order.LOG, None, None),
    (3, 4, (2, 5, 2), 2, 4, 5, "log^2", Order.LOG2, None, None),
    (3, 5, (2, 6, 1), 2, 2, 4, "log^2", Order.LOG2, None, None),
    (3, 6, (1, 6, 2), 2, 2, 4, "log^2", Order.LOG2, None, None),
    (3, 7, (2, 7, 1), 2, 2, 4, "log^2", Order.LOG2, None, None),
    (3, 8, (1, 7, 2), 2, 2, 4, "log^2", Order.LOG2, None, None),
    (3, 9, (1, 8, 1), 2, 0, 3, "log^2", Order.LOG2, "E0", None),
    (3, 10, (2, 8, 2), 4, 2, 5, "log^2", Order.LOG2, "E3", None),

    (4, 1, (4, 2, 1), 0, 2, 3, "log(Lambda/m)", Order.LOG, None, None),
    (4, 2, (6, 2, 1), 2, 2, 4, "log^2", Order.LOG2, None, None),
    (4, 3, (3, 2, 2), 2, 2, 4, "log^2", Order.LOG2, None, None),
    (4, 4, (5, 2, 2), 2, 4, 5, "sqrt(Lambda/m)", Order.SQRT, None, None),
    (4, 5, (3, 3, 1), 2, 0, 3, "log^2", Order.LOG2, None, None),
    (4, 6, (5, 3, 1), 2, 2, 4, "log^2", Order.LOG2, None, None),
    (4, 7, (4, 3, 2), 2, 2, 4, "sqrt(Lambda/m)", Order.SQRT, None, None),
    (4, 8, (6, 3, 2), 4, 2, 5, "-sqrt(Lambda/m)", Order.MINUS_SQRT, "E1", None),

    (5, 1, (7, 1, 1), 0, 0, 2, "log^2", Order.LOG2, None, None),
    (5, 2, (9, 1, 1), 2, 0, 3, "log^2", Order.LOG2, None, None),
    (5, 3, (11, 1, 1), 0, 2, 3, "=0", Order.ZERO, None, _ZERO_PF),
    (5, 4, (13, 1, 1), 2, 2, 4, "=0", Order.ZERO, None, _ZERO_PF),
    (5, 5, (15, 1, 1), 2, 2, 4, "=0", Order.ZERO, None, _ZERO_PF),
    (5, 6, (8, 1, 2), 2, 2, 4, "log^2", Order.LOG2, None, None),
    (5, 7, (10, 1, 2), 2, 2, 4, "=0", Order.ZERO, None, _ZERO_ODD),
    (5, 8, (12, 1, 2), 2, 4, 5, "log^2", Order.LOG2, None, None),
    (5, 9, (14, 1, 2), 2, 2, 4, "log^2", Order.LOG2, None, None),
    (5, 10, (16, 1, 2), 4, 2, 5, "-(Lambda/m)^2", Order.MINUS_LAMBDA2, "E4", None),
)

_TERMS = tuple(
    TermDescriptor(
        phi_left=lmn[0],
        h_mid=lmn[1],
        phi_right=lmn[2],
        sigma_b_count=sb,
        pf_count=pf,
        h0inv_count=h0,
        predicted_order=order,
        printed_order=printed,
        table_row=(table, row),
        dominant_label=dom,
        note=note,
    )
    for table, row, lmn, sb, pf, h0, printed, order, dom, note in _ROWS
)

_BY_KEY = {t.key: t for t in _TERMS}

# Group combinatorics before the parity cut: the five inner-product blocks
# contain 2*1*2, 4*1*4, 2*5*2, 4*2*2 and 10*1*2 pairings.
_GROUP_SIZES = (4, 16, 20, 16, 20)


def list_terms() -> list[TermDescriptor]:
    """All 38 catalogued rows in table order (dominant rows carry labels)."""
    return list(_TERMS)


def dominant_family() -> list[TermDescriptor]:
    """The five rows labeled E0..E4 (four spin vertices or the e2 constant)."""
    fam = [t for t in _TERMS if t.dominant_label is not None]
    return sorted(fam, key=lambda t: t.dominant_label)


def predicted_order(phi_left: int, h_mid: int, phi_right: int) -> Order:
    """Tabulated divergence class of one term; KeyError if not catalogued."""
    key = (phi_left, h_mid, phi_right)
    if key not in _BY_KEY:
        raise KeyError(f"term {key} is not in the catalog")
    return _BY_KEY[key].predicted_order


def power_count(term: TermDescriptor) -> PowerCount:
    """Naive bound (always log^2) and which violation the tabulated order shows."""
    return PowerCount(
        naive_order=Order.LOG2,
        collinear=term.predicted_order in (Order.SQRT, Order.MINUS_SQRT),
        asymmetric=term.predicted_order in (Order.LAMBDA2, Order.MINUS_LAMBDA2),
    )


def parity_filter() -> ParitySummary:
    """Survivor counts of the even-spin-vertex selection (38 out of 76).

    The vanishing of the odd-count sum is an input fact (those terms are
    purely imaginary), recorded here rather than recomputed.
    """
    survivors_by_table = tuple(
        sum(1 for t in _TERMS if t.table_row[0] == i + 1) for i in range(5)
    )
    values = tuple(sorted({t.sigma_b_count for t in _TERMS}))
    assert all(v % 2 == 0 for v in values)
    total = sum(_GROUP_SIZES)
    return ParitySummary(
        total_terms=total,
        survivors=len(_TERMS),
        dropped_odd=total - len(_TERMS),
        sigma_b_values=values,
        group_sizes=_GROUP_SIZES,
        group_survivors=survivors_by_table,
    )


CSV_HEADER = ("table,row,phi_left,h_mid,phi_right,sigma_b_count,pf_count,"
              "h0inv_count,predicted_order,printed_order,dominant_label,note")


def csv_rows() -> list[str]:
    """The catalog as CSV lines (without the header)."""
    rows = []
    for t in _TERMS:
        rows.append(
            f"{t.table_row[0]},{t.table_row[1]},{t.phi_left},{t.h_mid},"
            f"{t.phi_right},{t.sigma_b_count},{t.pf_count},{t.h0inv_count},"
            f"{t.predicted_order.value},{t.printed_order},"
            f"{t.dominant_label or ''},{t.note or ''}"
        )
    return rows
