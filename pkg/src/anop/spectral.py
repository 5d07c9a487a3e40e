"""Spectral data for self-adjoint members of the representable class:
Toeplitz symbols, essential spectra, positive-operator summaries with
eigenspaces, modulus summaries, diagonalization, and kernel dimensions.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (FiniteComponent, NotPositive, NotSelfAdjoint,
                     UncertifiedTail)
from .exactla import kernel_basis, mat_sub_diag
from .jacobi import sym_eigen
from .operators import (adjoint, corner_sizes, dense_window, multiply,
                        ops_equal_exact, truncate, window_layout)
from .ratfn import RationalFn
from .scalars import Scalar, ZERO, scalar_sqrt
from .subspaces import Subspace
from .vectors import VectorExpr

THETA_SAMPLES = 4096

COMP_CONST = "const"
COMP_DIAGRULE = "diagrule"
COMP_SYMBOLIC = "symbolic"
COMP_UNCERTIFIED = "uncertified"


# -- symbols ---------------------------------------------------------------------

@dataclass
class Symbol:
    """Trigonometric polynomial formed from the diagonal limits."""

    coeffs: dict

    def eval_theta(self, theta):
        acc = 0j
        for j, c in self.coeffs.items():
            acc += complex(c) * np.exp(1j * j * theta)
        return acc

    def is_real(self):
        for j, c in self.coeffs.items():
            other = self.coeffs.get(-j, ZERO)
            if Scalar.of(other) != Scalar.of(c).conj():
                return False
        return True

    def is_constant(self):
        return all(j == 0 or Scalar.of(c).is_zero() for j, c in self.coeffs.items())

    def constant_value(self):
        return self.coeffs.get(0, ZERO)

    def range_real(self, tol=1e-10):
        """[min, max] of the (real) symbol by dense sampling plus local
        refinement of the bracketing extrema."""
        thetas = np.linspace(0.0, 2.0 * math.pi, THETA_SAMPLES, endpoint=False)
        vals = np.array([self.eval_theta(t).real for t in thetas])
        lo = self._refine(thetas, vals, np.argmin(vals), sign=+1, tol=tol)
        hi = -self._refine(thetas, -vals, np.argmax(vals), sign=-1, tol=tol)
        return lo, hi

    def _refine(self, thetas, vals, idx, sign, tol):
        step = 2.0 * math.pi / len(thetas)
        a = thetas[idx] - step
        b = thetas[idx] + step
        f = lambda t: sign * self.eval_theta(t).real
        while b - a > tol * 1e-2 + 1e-15:
            m1 = a + (b - a) / 3.0
            m2 = b - (b - a) / 3.0
            if f(m1) <= f(m2):
                b = m2
            else:
                a = m1
        return f(0.5 * (a + b)) * sign if sign == 1 else f(0.5 * (a + b))


def symbol(op, component):
    """Symbol of the banded diagonal block of an l2 component."""
    if op.spaces[component].kind != "l2":
        raise FiniteComponent(f"component {component} is finite")
    blk = op.blocks.get((component, component))
    if blk is None:
        return Symbol({0: ZERO})
    return Symbol({j: d.limit for j, d in blk.diagonals.items()})


# -- self-adjointness ---------------------------------------------------------------

def self_adjoint_defect(op, n=None):
    """Float Frobenius defect ||op - op*|| on a covering window."""
    d = op - adjoint(op)
    if not d.blocks:
        return 0.0
    nn = n if n is not None else max(corner_sizes(d)) + 2
    return float(np.linalg.norm(truncate(d, nn).matrix)) + sum(
        abs(ds.limit) + (ds.decay[0] if ds.decay else 0.0)
        for b in d.blocks.values() if hasattr(b, "diagonals")
        for ds in b.diagonals.values())


def _blocks_identical(a, b):
    if set(a.blocks) != set(b.blocks):
        return False
    for pos, blk in a.blocks.items():
        other = b.blocks[pos]
        if type(blk) is not type(other) or not blk.structurally_equal(other):
            return False
    return True


def _entries_available(op):
    for blk in op.blocks.values():
        if hasattr(blk, "diagonals"):
            for d in blk.diagonals.values():
                if not d.has_entries():
                    return False
    return True


def check_self_adjoint(op, tol):
    adj = adjoint(op)
    if _blocks_identical(op, adj):
        return
    if op.is_exact_scalars() and _entries_available(op):
        if ops_equal_exact(op, adj):
            return
        raise NotSelfAdjoint("operator differs from its adjoint")
    if self_adjoint_defect(op) > tol:
        raise NotSelfAdjoint("operator differs from its adjoint beyond tol")


# -- essential spectrum ----------------------------------------------------------------

def _merge_pieces(pieces, tol=1e-10):
    points, intervals = [], []
    for p in pieces:
        if p[0] == "point":
            points.append(p[1])
        else:
            intervals.append((p[1], p[2]))
    intervals.sort()
    merged = []
    for lo, hi in intervals:
        if merged and lo <= merged[-1][1] + tol:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    out_points = []
    for p in points:
        pf = float(p.re) if isinstance(p, Scalar) else float(p)
        if any(lo - tol <= pf <= hi + tol for lo, hi in merged):
            continue
        if any(_pt_eq(p, q, tol) for q in out_points):
            continue
        out_points.append(p)
    out = [("interval", lo, hi) for lo, hi in merged]
    out += [("point", p) for p in out_points]
    return sorted(out, key=lambda t: t[1] if t[0] == "interval"
                  else (float(t[1].re) if isinstance(t[1], Scalar) else float(t[1])))


def _pt_eq(a, b, tol):
    if isinstance(a, Scalar) and isinstance(b, Scalar) and a.is_exact and b.is_exact:
        return a == b
    fa = float(a.re) if isinstance(a, Scalar) else float(a)
    fb = float(b.re) if isinstance(b, Scalar) else float(b)
    return abs(fa - fb) <= tol


def essential_spectrum(op, tol=1e-10):
    """Union over l2 components of the real symbol's range; compact
    deviations certified by decay bounds contribute nothing."""
    check_self_adjoint(op, tol)
    pieces = []
    for i in op.l2_components():
        blk = op.blocks.get((i, i))
        if blk is not None:
            for d in blk.diagonals.values():
                if d.tier == "asymptotic" and d.decay is None:
                    raise UncertifiedTail(
                        f"component {i} has an uncertified asymptotic diagonal")
        sym = symbol(op, i)
        if not sym.is_real():
            raise NotSelfAdjoint("component symbol is not real")
        if sym.is_constant():
            pieces.append(("point", sym.constant_value()))
        else:
            lo, hi = sym.range_real(tol)
            pieces.append(("interval", lo, hi))
    return _merge_pieces(pieces, tol)


def ess_points(pieces):
    """Spectrum pieces as floats (intervals widen to their endpoints)."""
    out = []
    for p in pieces:
        if p[0] == "point":
            v = p[1]
            out.append(float(v.re) if isinstance(v, Scalar) else float(v))
        else:
            out.append(p[1])
            out.append(p[2])
    return out


# -- positive summaries -------------------------------------------------------------------

@dataclass
class EigStream:
    """Eigenvalue sequence fn(k), k >= start, of a rule-governed diagonal
    tail; each value is an eigenvalue with eigenvector e_k."""
    comp: int
    start: int
    fn: RationalFn

    def value(self, k):
        return self.fn.eval(k)

    def limit(self):
        return self.fn.limit()

    def monotone(self):
        return self.fn.monotone_from(self.start)

    def count_below(self, bound):
        """#{k >= start: fn(k) < bound}; int, 'infinite' or 'unknown'."""
        bound = Fraction(bound)
        diff = self.fn.sub_const(bound)
        sgn = diff.sign_from(self.start)
        if sgn is not None and sgn >= 0:
            return 0
        if sgn == -1:
            return "infinite"
        mono = self.monotone()
        lim = self.limit()
        if lim < bound:
            return "infinite"
        if mono == "inc":
            # entries climb past the bound; count the initial run below it
            k = self.start
            count = 0
            while self.fn.eval(k) < bound:
                count += 1
                k += 1
                if count > 100000:
                    return "unknown"
            return count
        if mono == "dec":
            # strictly decreasing entries stay above their limit >= bound
            return 0
        return "unknown"


def _stream_extremes(st):
    """Exact inf/sup of {fn(k): k >= start} together with the limit value.

    Beyond the root bound of the finite-difference numerator the sequence is
    monotone, so sampling up to that bound plus the limit is exhaustive.
    """
    from .ratfn import _root_bound
    diff = st.fn.shift_index(1) + st.fn.scale(-1)
    bound = st.start + 2
    if diff.num:
        bound = max(bound, int(_root_bound(diff.num)) + 2)
    vals = [float(st.fn.eval(k)) for k in range(st.start, bound + 1)]
    lim = float(st.limit())
    return min(vals + [lim]), max(vals + [lim])


@dataclass
class DiscreteEig:
    value: float
    mult: int
    exact: Fraction | None = None
    source: str = "corner"


class SpectralSummary:
    """Spectral facts for a positive operator: essential spectrum, discrete
    eigenvalues, norm, minimum modulus and essential minimum modulus, plus
    lazily computed eigenspaces."""

    def __init__(self, op, tol):
        self.op = op
        self.tol = tol
        self.tier = "numerical"
        self.ess = []
        self.discrete = []
        self.streams = []
        self.c0s = {}
        self.norm = 0.0
        self.m = 0.0
        self.m_e = 0.0
        self.norm_exact = None
        self.m_exact = None
        self.m_e_exact = None
        self._corner = None
        self._corner_np = None
        self._corner_sizes = None
        self._corner_pairs = None
        self._exact_eigs = {}
        self._path = None

    # serialization of just the summary facts
    def to_json(self):
        from .serialize import scalar_to_json
        ess = []
        for p in self.ess:
            if p[0] == "point":
                v = p[1]
                ess.append({"point": scalar_to_json(v) if isinstance(v, Scalar)
                            else float(v)})
            else:
                ess.append({"interval": [p[1], p[2]]})
        return {"ess": ess,
                "discrete": [{"value": d.value, "mult": d.mult,
                              **({"exact": str(d.exact)} if d.exact is not None else {})}
                             for d in self.discrete],
                "norm": self.norm, "m": self.m, "m_e": self.m_e,
                "tier": "Exact" if self.tier == "exact" else "Numerical"}


def _classify_component(op, i):
    blk = op.blocks.get((i, i))
    if blk is None:
        return COMP_CONST
    has_rule = False
    for j, d in blk.diagonals.items():
        if d.rule is not None:
            if j != 0:
                return COMP_UNCERTIFIED
            has_rule = True
        elif d.decay is not None:
            return COMP_UNCERTIFIED
    if has_rule:
        if blk.bandwidth == 0:
            return COMP_DIAGRULE
        return COMP_UNCERTIFIED
    sym = symbol(op, i)
    return COMP_CONST if sym.is_constant() else COMP_SYMBOLIC


def positive_spectral_summary(p, tol=1e-10, trunc=256):
    """Summary of a self-adjoint positive-semidefinite operator."""
    check_self_adjoint(p, tol)
    s = SpectralSummary(p, tol)
    classes = {i: _classify_component(p, i) for i in p.l2_components()}
    if any(c == COMP_UNCERTIFIED for c in classes.values()):
        raise UncertifiedTail("component tail is not in the certified class")
    if all(c in (COMP_CONST, COMP_DIAGRULE) for c in classes.values()):
        _structured_summary(s, classes, trunc)
    else:
        _symbolic_summary(s, classes, trunc)
    return s


def _structured_summary(s, classes, trunc):
    p, tol = s.op, s.tol
    s._path = "structured"
    sizes = corner_sizes(p)
    s._corner_sizes = sizes
    exact_corner = p.is_exact_scalars()
    s._corner = dense_window(p, sizes)
    s._corner_np = np.array([[complex(v) for v in row] for row in s._corner])
    n = len(s._corner_np)
    pairs = sym_eigen(s._corner_np, max(tol, 1e-12)) if n else []
    s._corner_pairs = pairs
    scale = max((abs(w) for w, _ in pairs), default=0.0) or 1.0
    # essential points
    for i, cls in classes.items():
        blk = p.blocks.get((i, i))
        if cls == COMP_CONST:
            c0 = blk.diagonals[0].limit if blk is not None and 0 in blk.diagonals \
                else ZERO
            s.c0s[i] = c0
            s.ess.append(("point", c0))
        else:
            d0 = blk.diagonals[0]
            s.streams.append(EigStream(i, sizes[i], d0.rule))
            s.ess.append(("point", Scalar.exact(d0.rule.limit())))
    s.ess = _merge_pieces(s.ess, tol)
    # positivity
    if pairs and pairs[-1][0] < -max(tol, 1e-12) * scale:
        raise NotPositive(f"corner eigenvalue {pairs[-1][0]:.3g} < 0")
    for i, c0 in s.c0s.items():
        if float(c0.re) < -tol:
            raise NotPositive(f"component {i} tail constant {float(c0.re):.3g} < 0")
    for st in s.streams:
        if st.fn.sign_from(st.start) == -1 or float(st.limit()) < -tol:
            raise NotPositive("stream entries negative")
    # exact eigen refinement on the corner
    exact_values = {}
    if exact_corner:
        cands = set()
        for w, _ in pairs:
            coarse = Fraction(w).limit_denominator(10 ** 6)
            cands.add(coarse)
            if n <= 12 and abs(float(coarse) - w) > 1e-13 * scale:
                # small corner whose eigenvalue is not a small rational:
                # afford one finer attempt before settling for float data
                cands.add(Fraction(w).limit_denominator(10 ** 13))
        # diagonal entries of the window are frequent exact eigenvalues
        for k, row in enumerate(s._corner):
            v = row[k]
            if v.is_real():
                cands.add(Fraction(v.re))
        for c0 in s.c0s.values():
            cands.add(Fraction(c0.re))
        cands.add(Fraction(0))
        floats = np.array([w for w, _ in pairs]) if pairs else np.array([])
        for lam in sorted(cands):
            # an exact eigenvalue must sit next to a float one, so skip
            # candidates with no nearby float eigenvalue instead of running
            # their (empty) exact kernels
            if floats.size and np.min(np.abs(floats - float(lam))) > 1e-7 * scale:
                continue
            ker = kernel_basis(mat_sub_diag(s._corner, Scalar.exact(lam)))
            if ker:
                exact_values[lam] = ker
    s._exact_eigs = exact_values
    # cluster float eigenvalues, attribute to exact values where possible
    used = [False] * len(pairs)
    entries = []
    for lam, ker in sorted(exact_values.items(), reverse=True):
        lf = float(lam)
        hits = [k for k, (w, _) in enumerate(pairs)
                if not used[k] and abs(w - lf) <= 1e-7 * scale]
        for k in hits[:len(ker)]:
            used[k] = True
        entries.append((lf, len(ker), lam))
    k = 0
    while k < len(pairs):
        if used[k]:
            k += 1
            continue
        j = k
        mult = 0
        while j < len(pairs) and abs(pairs[j][0] - pairs[k][0]) <= 1e-9 * scale:
            if not used[j]:
                mult += 1
                used[j] = True
            j += 1
        entries.append((pairs[k][0], mult, None))
        k = j
    # split into discrete/c0 classes; exact values compare exactly so a
    # discrete eigenvalue merely float-close to a tail constant survives
    c0_vals = [(float(c.re), Fraction(c.re) if c.is_exact else None)
               for c in s.c0s.values()]

    def _matches_c0(val, exact):
        for vf, ex in c0_vals:
            if exact is not None and ex is not None:
                if exact == ex:
                    return True
            elif abs(val - vf) <= 1e-9 * scale:
                return True
        return False

    for val, mult, exact in sorted(entries, key=lambda e: -e[0]):
        if not _matches_c0(val, exact):
            s.discrete.append(DiscreteEig(val, mult, exact))
    # stream values listed (capped) for reporting
    for st in s.streams:
        for k in range(st.start, st.start + min(trunc, 64)):
            v = st.value(k)
            s.discrete.append(DiscreteEig(float(v), 1, v, source="stream"))
    s.discrete.sort(key=lambda d: -d.value)
    # norm / m / m_e (corner extremes come from the refined entry list so
    # exactly verified eigenvalues are not blurred by float residue)
    corner_vals = [val for val, mult, _ in entries if mult > 0]
    highs = [max(corner_vals)] if corner_vals else []
    lows = [min(corner_vals)] if corner_vals else []
    highs += [vf for vf, _ in c0_vals]
    lows += [vf for vf, _ in c0_vals]
    for st in s.streams:
        st_lo, st_hi = _stream_extremes(st)
        highs.append(st_hi)
        lows.append(st_lo)
    s.norm = max(highs, default=0.0)
    s.m = max(min(lows, default=0.0), 0.0)
    s.m_e = min(ess_points(s.ess), default=0.0)
    # exact labels when available
    s.norm_exact = _match_exact(s, s.norm)
    s.m_exact = _match_exact(s, s.m)
    s.m_e_exact = _match_exact(s, s.m_e)
    all_pairs_exact = pairs and sum(len(k) for k in exact_values.values()) == len(pairs)
    s.tier = "exact" if (exact_corner and not s.streams and
                         (not pairs or all_pairs_exact)) else "numerical"


def _match_exact(s, val):
    for lam in s._exact_eigs or {}:
        if abs(float(lam) - val) <= 1e-9 * max(1.0, abs(val)):
            return lam
    for c in s.c0s.values():
        if c.is_exact and abs(float(c.re) - val) <= 1e-9 * max(1.0, abs(val)):
            return Fraction(c.re)
    for st in s.streams:
        lim = st.limit()
        if abs(float(lim) - val) <= 1e-9 * max(1.0, abs(val)):
            return lim
    return None


def _symbolic_summary(s, classes, trunc):
    p, tol = s.op, s.tol
    s._path = "symbolic"
    sizes = corner_sizes(p)
    s._corner_sizes = sizes
    pieces = []
    for i, cls in classes.items():
        sym = symbol(p, i)
        if not sym.is_real():
            raise NotSelfAdjoint("component symbol is not real")
        if sym.is_constant():
            c0 = sym.constant_value()
            s.c0s[i] = c0
            pieces.append(("point", c0))
        else:
            lo, hi = sym.range_real(tol)
            pieces.append(("interval", lo, hi))
    s.ess = _merge_pieces(pieces, tol)
    n1 = max(trunc, max(sizes) + 8)
    t1 = truncate(p, n1)
    w1 = np.linalg.eigvalsh(t1.matrix)
    if w1.size and w1[0] < -max(tol, 1e-12) * max(1.0, abs(w1[-1])):
        raise NotPositive(f"truncation eigenvalue {w1[0]:.3g} < 0")
    t0 = truncate(p, max(n1 // 2, max(sizes) + 4))
    w0 = np.linalg.eigvalsh(t0.matrix)

    def outside(v):
        for piece in s.ess:
            if piece[0] == "point":
                ref = piece[1]
                rf = float(ref.re) if isinstance(ref, Scalar) else float(ref)
                if abs(v - rf) <= 1e-6 * max(1.0, abs(v)):
                    return False
            else:
                if piece[1] - 1e-8 <= v <= piece[2] + 1e-8:
                    return False
        return True

    cands = [v for v in w1 if outside(v)]
    stable = [v for v in cands
              if np.any(np.abs(w0 - v) <= 1e-6 * max(1.0, abs(v)))]
    vals = []
    for v in stable:
        if not vals or abs(v - vals[-1][0]) > 1e-8 * max(1.0, abs(v)):
            vals.append([v, 1])
        else:
            vals[-1][1] += 1
    for v, mult in sorted(vals, reverse=True):
        s.discrete.append(DiscreteEig(float(v), int(mult)))
    hi_pts = ess_points(s.ess)
    s.norm = max([d.value for d in s.discrete] + hi_pts, default=0.0)
    s.m = max(min([d.value for d in s.discrete] + hi_pts, default=0.0), 0.0)
    s.m_e = min(hi_pts, default=0.0)
    s.tier = "numerical"


# -- eigenspaces ---------------------------------------------------------------------

def _as_exact_value(value):
    if isinstance(value, Scalar):
        return Fraction(value.re) if value.is_exact else None
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    return None


def summary_eigenspace(s, value, tol=None):
    """N(p - value I) as a Subspace (exact wherever the data allows)."""
    tol = tol if tol is not None else s.tol
    p = s.op
    exact_val = _as_exact_value(value)
    vf = float(exact_val) if exact_val is not None else \
        (float(value.re) if isinstance(value, Scalar) else float(value))
    if s._path != "structured":
        vecs = []
        if s._corner_pairs is None:
            n1 = max(256, max(s._corner_sizes) + 8)
            t1 = truncate(p, n1)
            prs = sym_eigen(t1.matrix, max(tol, 1e-12))
            s._corner_pairs = prs
            s._corner_sizes_np = t1.sizes
            s._labels = t1.labels
        scale = max((abs(w) for w, _ in s._corner_pairs), default=1.0)
        for w, v in s._corner_pairs:
            if abs(w - vf) <= 1e-7 * max(1.0, scale):
                vecs.append(_vec_from_flat(p, s._labels, v))
        return Subspace.span(p.spaces, vecs)
    sizes = s._corner_sizes
    starts, labels = window_layout(p.spaces, sizes)
    corner_vecs = []
    if s._corner is not None and p.is_exact_scalars() and exact_val is not None:
        ker = s._exact_eigs.get(exact_val)
        if ker is None:
            ker = kernel_basis(mat_sub_diag(s._corner, Scalar.exact(exact_val)))
        for kv in ker:
            corner_vecs.append(_vec_from_flat(p, labels, kv, exact=True))
    else:
        scale = max((abs(w) for w, _ in s._corner_pairs), default=1.0)
        for w, v in s._corner_pairs:
            if abs(w - vf) <= 1e-7 * max(1.0, scale):
                corner_vecs.append(_vec_from_flat(p, labels, v))
    tails = {}
    for i, c0 in s.c0s.items():
        same = (exact_val is not None and c0.is_exact and Fraction(c0.re) == exact_val)
        if not same and abs(float(c0.re) - vf) <= 1e-12 * max(1.0, abs(vf)) and \
           not (exact_val is not None and c0.is_exact):
            same = True
        if same:
            tails[i] = sizes[i]
    stream_vecs = []
    for st in s.streams:
        if exact_val is not None:
            zs = st.fn.sub_const(exact_val).zeros_from(st.start)
            if zs is None:
                tails[st.comp] = max(tails.get(st.comp, 0), st.start)
                continue
            for k in zs:
                stream_vecs.append(VectorExpr.basis(p.spaces, st.comp, k))
    vecs = corner_vecs + stream_vecs
    if tails:
        # extras must avoid the tail region; corner vectors do by construction
        return Subspace.cofinite(p.spaces, tails, vecs)
    return Subspace.span(p.spaces, vecs)


def _vec_from_flat(p, labels, flat, exact=False):
    data = [dict() for _ in p.spaces]
    for (ci, k), v in zip(labels, flat):
        if exact:
            if not v.is_zero():
                data[ci][k] = v
        else:
            if abs(v) > 1e-13:
                data[ci][k] = Scalar.inexact(v.real, v.imag)
    return VectorExpr(p.spaces, data)


def count_spectrum_in(s, lo, hi):
    """Number of spectrum points of the summarized operator in [lo, hi);
    int, 'infinite' or 'unknown'."""
    if hi <= lo:
        return 0
    count = 0
    seen = set()
    for d in s.discrete:
        if d.source == "corner" and lo - 1e-12 <= d.value < hi - 1e-12:
            key = round(d.value, 9)
            if key not in seen:
                seen.add(key)
                count += 1
    for c0 in s.c0s.values():
        v = float(c0.re)
        if lo - 1e-12 <= v < hi - 1e-12:
            count += 1
    for st in s.streams:
        hi_exact = Fraction(hi).limit_denominator(10 ** 9) if not isinstance(hi, Fraction) else hi
        below = st.count_below(hi_exact)
        if below in ("infinite", "unknown"):
            return below
        count += below
    return count


# -- modulus ------------------------------------------------------------------------

class ModulusSummary:
    """Spectral data of |T| derived from a summary of T*T by a square root
    on the value level; eigenvectors are shared (N(|T|-a) = N(T*T-a^2))."""

    def __init__(self, base):
        self.base = base
        self.ess = []
        for piece in base.ess:
            if piece[0] == "point":
                v = piece[1]
                self.ess.append(("point", scalar_sqrt(v) if isinstance(v, Scalar)
                                 else math.sqrt(max(v, 0.0))))
            else:
                self.ess.append(("interval", math.sqrt(max(piece[1], 0.0)),
                                 math.sqrt(max(piece[2], 0.0))))
        self.discrete = [DiscreteEig(math.sqrt(max(d.value, 0.0)), d.mult,
                                     _exact_sqrt_opt(d.exact), d.source)
                         for d in base.discrete]
        self.norm = math.sqrt(max(base.norm, 0.0))
        self.m = math.sqrt(max(base.m, 0.0))
        self.m_e = math.sqrt(max(base.m_e, 0.0))
        self.norm_exact = _exact_sqrt_opt(base.norm_exact)
        self.m_exact = _exact_sqrt_opt(base.m_exact)
        self.m_e_exact = _exact_sqrt_opt(base.m_e_exact)
        self.tier = base.tier

    def eigenspace(self, value, tol=None):
        ex = _as_exact_value(value)
        if ex is not None:
            return summary_eigenspace(self.base, ex * ex, tol)
        vf = float(value.re) if isinstance(value, Scalar) else float(value)
        return summary_eigenspace(self.base, vf * vf, tol)

    def to_json(self):
        from .serialize import scalar_to_json
        ess = []
        for p in self.ess:
            if p[0] == "point":
                v = p[1]
                ess.append({"point": scalar_to_json(v) if isinstance(v, Scalar)
                            else float(v)})
            else:
                ess.append({"interval": [p[1], p[2]]})
        return {"ess": ess,
                "discrete": [{"value": d.value, "mult": d.mult} for d in self.discrete],
                "norm": self.norm, "m": self.m, "m_e": self.m_e,
                "tier": "Exact" if self.tier == "exact" else "Numerical"}


def _exact_sqrt_opt(v):
    if v is None:
        return None
    from .scalars import exact_sqrt
    if v < 0:
        return None
    r, perfect = exact_sqrt(Fraction(v))
    return r if perfect else None


def modulus_summary(t, tol=1e-10, trunc=256):
    """Summary of |T| = (T*T)^(1/2)."""
    q = multiply(adjoint(t), t)
    return ModulusSummary(positive_spectral_summary(q, tol, trunc))


def adjoint_modulus_summary(t, tol=1e-10, trunc=256):
    """Summary of |T*| = (TT*)^(1/2)."""
    q = multiply(t, adjoint(t))
    return ModulusSummary(positive_spectral_summary(q, tol, trunc))


# -- diagonalization of positive AN operators -----------------------------------------

@dataclass
class DiagonalizationResult:
    pairs: list                       # (value, Subspace or basis description)
    limit_point: float | None
    infinite_multiplicity_value: float | None
    clauses: dict = field(default_factory=dict)
    truncated: bool = False

    def to_json(self):
        return {"pairs": [{"value": v, "dim": (sp.dim() if sp.dim() is not None
                                               else "infinite")}
                          for v, sp in self.pairs],
                "limit_point": self.limit_point,
                "infinite_multiplicity_value": self.infinite_multiplicity_value,
                "clauses": self.clauses,
                "truncated": self.truncated}


def positive_an_diagonalize(p, tol=1e-10, trunc=256, max_stream=64):
    """Explicit eigenpair expansion of a positive operator that passes the
    singleton-essential-spectrum criterion; the four structural clauses of
    the expansion are checked on the output and reported."""
    from .errors import NotAN
    s = positive_spectral_summary(p, tol, trunc)
    pts = [pc for pc in s.ess]
    if len(pts) != 1 or pts[0][0] != "point":
        raise NotAN("essential spectrum is not a single point")
    cnt = count_spectrum_in(s, s.m, s.m_e)
    if cnt == "infinite":
        raise NotAN("infinitely many spectrum points below the essential minimum")
    pairs = []
    truncated = False
    for d in s.discrete:
        if d.source != "corner":
            continue
        val = d.exact if d.exact is not None else d.value
        pairs.append((float(d.value), summary_eigenspace(s, val, tol)))
    for st in s.streams:
        for k in range(st.start, st.start + max_stream):
            pairs.append((float(st.value(k)),
                          Subspace.span(p.spaces, [VectorExpr.basis(p.spaces, st.comp, k)])))
        truncated = True
    c0_vals = sorted({float(c.re) for c in s.c0s.values()}, reverse=True)
    inf_val = c0_vals[0] if c0_vals else None
    if inf_val is not None:
        exacts = [c for c in s.c0s.values() if abs(float(c.re) - inf_val) < 1e-12]
        pairs.append((inf_val, summary_eigenspace(s, exacts[0], tol)))
    pairs.sort(key=lambda t: -t[0])
    limit_point = None
    approached_increasing = None
    if s.streams:
        lims = sorted({float(st.limit()) for st in s.streams})
        limit_point = lims[0] if len(lims) == 1 else lims
        monos = {st.monotone() for st in s.streams}
        approached_increasing = monos == {"inc"}
    clauses = {
        "sup_attained_in_every_subset": not s.streams or
            all(st.monotone() == "dec" for st in s.streams),
        "at_most_one_limit_point": not isinstance(limit_point, list),
        "limit_approached_increasing": approached_increasing,
        "at_most_one_infinite_multiplicity": len(c0_vals) <= 1,
        "limit_equals_infinite_multiplicity":
            (limit_point is None or inf_val is None or
             (not isinstance(limit_point, list) and
              abs(limit_point - inf_val) <= 1e-12)),
    }
    return DiagonalizationResult(pairs, limit_point if not isinstance(limit_point, list)
                                 else None, inf_val, clauses, truncated)


# -- kernel dimensions ---------------------------------------------------------------

@dataclass
class KernelDims:
    dim_t: object       # int or "infinite" or "undetermined"
    dim_t_star: object
    tier: str

    def as_tuple(self):
        return (self.dim_t, self.dim_t_star)

    def to_json(self):
        return {"dim_N_T": self.dim_t, "dim_N_T_star": self.dim_t_star,
                "tier": self.tier}


def _kernel_dim_of_positive(q, tol, trunc):
    s = positive_spectral_summary(q, tol, trunc)
    if s._path != "structured":
        raise UncertifiedTail(
            "kernel dimensions need constant symbols or certified diagonal "
            "tails per component")
    for i, c0 in s.c0s.items():
        if c0.is_exact and Fraction(c0.re) == 0:
            return "infinite", True
        if not c0.is_exact and abs(float(c0.re)) <= tol:
            return "undetermined", False
    for st in s.streams:
        if st.fn.zeros_from(st.start) is None:
            return "infinite", True
    sp = summary_eigenspace(s, Scalar.exact(0), tol)
    d = sp.dim()
    if d is None:
        return "infinite", True
    return d, q.is_exact_scalars()


def kernel_dims(t, tol=1e-10, trunc=256):
    """dim N(T) and dim N(T*) through the zero eigenspaces of T*T and TT*."""
    q = multiply(adjoint(t), t)
    qq = multiply(t, adjoint(t))
    d1, e1 = _kernel_dim_of_positive(q, tol, trunc)
    d2, e2 = _kernel_dim_of_positive(qq, tol, trunc)
    exact = e1 and e2 and t.is_exact_scalars()
    return KernelDims(d1, d2, "exact" if exact else "numerical")
