"""Atoms, admissible pairs and the good-cluster machinery."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .graph import Clustering, Graph

ATOMIC = "ATOMIC"
ADMISSIBLE = "ADMISSIBLE"
NON_ADMISSIBLE = "NON_ADMISSIBLE"


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**6)
    return Fraction(x)


@dataclass
class PreclusteredInstance:
    n: int
    atoms: tuple
    admissible: np.ndarray  # (k, 2) int64, u < v, sorted
    epsilon: Fraction
    degrees: np.ndarray
    atom_of: np.ndarray = field(init=False)
    adm: np.ndarray = field(init=False, repr=False)  # dense boolean admissibility

    def __post_init__(self):
        self.epsilon = as_fraction(self.epsilon)
        self.atoms = tuple(tuple(sorted(int(x) for x in k)) for k in self.atoms)
        self.atom_of = np.full(self.n, -1, dtype=np.int64)
        for i, k in enumerate(self.atoms):
            if len(k) < 2:
                raise ValueError("atoms must have at least two vertices")
            if np.any(self.atom_of[list(k)] >= 0):
                raise ValueError("atoms must be disjoint")
            self.atom_of[list(k)] = i
        adm = np.asarray(self.admissible, dtype=np.int64).reshape(-1, 2)
        adm = np.unique(np.sort(adm, axis=1), axis=0)
        if adm.size and np.any(adm[:, 0] == adm[:, 1]):
            raise ValueError("admissible pairs need distinct endpoints")
        if adm.size and np.any((self.atom_of[adm[:, 0]] >= 0) & (self.atom_of[adm[:, 1]] >= 0)):
            raise ValueError("an admissible pair needs an endpoint outside every atom")
        self.admissible = adm
        self.adm = np.zeros((self.n, self.n), dtype=bool)
        self.adm[adm[:, 0], adm[:, 1]] = True
        self.adm[adm[:, 1], adm[:, 0]] = True

    @property
    def d_adm(self) -> np.ndarray:
        return self.adm.sum(axis=1)

    @property
    def num_admissible(self) -> int:
        return int(self.admissible.shape[0])

    def atomic_matrix(self) -> np.ndarray:
        a = (self.atom_of[:, None] == self.atom_of[None, :]) & (self.atom_of[:, None] >= 0)
        np.fill_diagonal(a, False)
        return a

    def pair_class(self, u: int, v: int) -> str:
        if u == v:
            raise ValueError("pair_class needs two distinct vertices")
        if self.atom_of[u] >= 0 and self.atom_of[u] == self.atom_of[v]:
            return ATOMIC
        return ADMISSIBLE if self.adm[u, v] else NON_ADMISSIBLE

    def atom_set(self, v: int) -> tuple:
        """K(v): the atom containing v, or (v,)."""
        a = self.atom_of[v]
        return self.atoms[a] if a >= 0 else (int(v),)

    def initial_clustering(self) -> Clustering:
        """Atoms plus singletons."""
        lab = np.where(self.atom_of >= 0, self.atom_of, self.n + np.arange(self.n))
        return Clustering(lab)


# ---------------------------------------------------------------- construction


def _atom_thresholds(epsilon: Fraction, c: int):
    ce = c * epsilon
    # "sufficiently small eps": never ask for less than half of the atom
    return max(1 - ce, Fraction(1, 2)), ce


def atom_condition_witnesses(g: Graph, atom, epsilon, c: int = 5) -> list:
    """Vertices of ``atom`` that violate the atom condition."""
    epsilon = as_fraction(epsilon)
    frac_in, frac_out = _atom_thresholds(epsilon, c)
    K = np.asarray(atom, dtype=np.int64)
    inK = np.zeros(g.n, dtype=bool)
    inK[K] = True
    bad = []
    for v in K.tolist():
        nb = g.neighbors(v)
        inside = int(np.count_nonzero(inK[nb]))
        outside = nb.size - inside
        if inside < frac_in * (K.size - 1) or outside > frac_out * K.size:
            bad.append(v)
    return bad


def compute_atoms(g: Graph, epsilon, strategy: str = "agreement", c: int = 5) -> list[tuple[int, ...]]:
    """Atoms via the agreement heuristic.

    Adjacent u, v agree when their closed neighborhoods differ in at most
    c*eps*max(d(u), d(v)) vertices.  Components of the agreement graph with at
    least two vertices become atoms if every member passes the atom condition.
    """
    if strategy != "agreement":
        raise ValueError(f"unknown atom strategy {strategy!r}")
    epsilon = as_fraction(epsilon)
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if g.m == 0:
        return []
    e = g.edges()
    A = g.dense().astype(np.float64)
    common = np.rint((A[e[:, 0]] * A[e[:, 1]]).sum(axis=1)).astype(np.int64)
    du = g.degrees[e[:, 0]]
    dv = g.degrees[e[:, 1]]
    # closed neighborhoods of adjacent u, v share their common neighbors plus u and v
    sym = (du + 1) + (dv + 1) - 2 * (common + 2)
    agree = sym * epsilon.denominator <= c * epsilon.numerator * np.maximum(du, dv)
    ea = e[agree]
    m = coo_matrix((np.ones(len(ea)), (ea[:, 0], ea[:, 1])), shape=(g.n, g.n))
    ncomp, comp = connected_components(m, directed=False)
    atoms = []
    for k in range(ncomp):
        members = np.flatnonzero(comp == k)
        if members.size >= 2 and not atom_condition_witnesses(g, members, epsilon, c):
            atoms.append(tuple(members.tolist()))
    atoms.sort()
    return atoms


def compute_admissible(g: Graph, epsilon, atoms) -> np.ndarray:
    """All admissible pairs as an (k, 2) array with u < v.

    uv is admissible when an endpoint lies outside the atoms, the degrees are
    within a factor 1/eps of each other, and at least eps*min(d(u), d(v)) common
    neighbors are degree-similar to both.  Isolated vertices are never admissible.
    """
    epsilon = as_fraction(epsilon)
    p, q = epsilon.numerator, epsilon.denominator
    n = g.n
    d = g.degrees.astype(np.int64)
    in_atom = np.zeros(n, dtype=bool)
    for k in atoms:
        in_atom[list(k)] = True
    sim = (p * d[:, None] <= q * d[None, :]) & (p * d[None, :] <= q * d[:, None])
    sim &= (d[:, None] > 0) & (d[None, :] > 0)
    A = g.dense()
    AS = (A & sim).astype(np.float64)
    common = np.rint(AS @ AS.T).astype(np.int64)
    dmin = np.minimum(d[:, None], d[None, :])
    ok = sim & (q * common >= p * dmin)
    ok &= ~(in_atom[:, None] & in_atom[None, :])
    ok &= (d[:, None] > 0) & (d[None, :] > 0)
    u, v = np.nonzero(np.triu(ok, 1))
    return np.stack([u, v], axis=1).astype(np.int64)


def preclustering(g: Graph, epsilon, c: int = 5, atoms=None) -> PreclusteredInstance:
    epsilon = as_fraction(epsilon)
    atoms = compute_atoms(g, epsilon, c=c) if atoms is None else [tuple(k) for k in atoms]
    adm = compute_admissible(g, epsilon, atoms)
    return PreclusteredInstance(g.n, atoms, adm, epsilon, g.degrees.copy())


# ---------------------------------------------------------------- validation


@dataclass
class GoodnessReport:
    adm_degree_ok: bool
    degree_ratio_ok: bool
    atoms_ok: bool
    adm_degree_witnesses: list
    degree_ratio_witnesses: list
    atom_witnesses: list

    @property
    def ok(self) -> bool:
        return self.adm_degree_ok and self.degree_ratio_ok and self.atoms_ok


def validate_good_instance(g: Graph, pc: PreclusteredInstance, c: int = 5) -> GoodnessReport:
    eps = pc.epsilon
    d = g.degrees.astype(np.int64)
    dadm = pc.d_adm
    # d_adm(v) <= 2 eps^-3 d(v)  <=>  eps^3 d_adm <= 2 d
    e3 = eps ** 3
    w1 = [int(v) for v in np.flatnonzero(e3.numerator * dadm > 2 * e3.denominator * d)]
    # d(u) <= 2 eps^-1 d(v) for both orientations
    u, v = pc.admissible[:, 0], pc.admissible[:, 1]
    p, q = eps.numerator, eps.denominator
    bad = (p * d[u] > 2 * q * d[v]) | (p * d[v] > 2 * q * d[u])
    w2 = [(int(a), int(b)) for a, b in pc.admissible[bad]]
    w3 = []
    for k in pc.atoms:
        w3.extend(atom_condition_witnesses(g, k, eps, c))
    return GoodnessReport(not w1, not w2, not w3, w1, w2, w3)


def _min_sizes(pc: PreclusteredInstance, delta) -> np.ndarray:
    delta = pc.epsilon if delta is None else as_fraction(delta)
    return np.array([math.ceil(delta * int(x)) for x in pc.degrees], dtype=np.int64)


def is_good_cluster(cluster, pc: PreclusteredInstance, delta=None) -> bool:
    """Atoms unbroken, no non-admissible pair inside, and |C| >= delta*d(v) when |C| > 1."""
    C = np.unique(np.asarray(list(cluster), dtype=np.int64))
    if C.size == 0:
        return False
    aids = pc.atom_of[C]
    for a in np.unique(aids[aids >= 0]).tolist():
        if not set(pc.atoms[a]) <= set(C.tolist()):
            return False
    if C.size == 1:
        return True
    sub_adm = pc.adm[np.ix_(C, C)]
    same_atom = (aids[:, None] == aids[None, :]) & (aids[:, None] >= 0)
    allowed = sub_adm | same_atom | np.eye(C.size, dtype=bool)
    if not allowed.all():
        return False
    return bool(np.all(C.size >= _min_sizes(pc, delta)[C]))


def is_good_clustering(c: Clustering, pc: PreclusteredInstance, delta=None) -> bool:
    return all(is_good_cluster(cl, pc, delta) for cl in c.clusters)


def good_constraints(g: Graph, pc: PreclusteredInstance, delta=None):
    """(required-together, forbidden-together, min cluster size) for the good-clustering oracle."""
    req = pc.atomic_matrix()
    forb = ~(pc.adm | req)
    np.fill_diagonal(forb, False)
    return req, forb, _min_sizes(pc, delta)


def neighborhoods(pc: PreclusteredInstance, g: Graph, r: int):
    """(N(r), K(r), D(r)) as sorted int arrays."""
    K = np.asarray(pc.atom_set(r), dtype=np.int64)
    if pc.atom_of[r] < 0:
        Nr = pc.adm[r].copy()
        Nr[r] = True
        Nr &= pc.atom_of < 0
    else:
        inter = np.ones(pc.n, dtype=bool)
        for u in K.tolist():
            Nu = pc.adm[u].copy()
            Nu[u] = True
            inter &= Nu
        Nr = inter
        Nr[K] = True
    N = np.flatnonzero(Nr)
    D = np.setdiff1d(N, K)
    return N, K, D


def split_opt_prime(c: Clustering, pc: PreclusteredInstance) -> Clustering:
    """Split off every atom K whose cluster C has |K|/|C| < eps^21/576."""
    if not is_good_clustering(c, pc, delta=0):
        raise ValueError("split_opt_prime needs a good clustering")
    ratio = pc.epsilon ** 21 / 576
    lab = c.labels.copy()
    nxt = c.n
    sizes = c.sizes
    for k in pc.atoms:
        size_c = int(sizes[c.labels[k[0]]])
        if Fraction(len(k), size_c) < ratio:
            lab[list(k)] = nxt
            nxt += 1
    return Clustering(lab)


# ---------------------------------------------------------------- files


def write_atoms(atoms, path) -> None:
    with open(path, "w") as fh:
        for k in atoms:
            fh.write(" ".join(map(str, k)) + "\n")


def read_atoms(path) -> list[tuple[int, ...]]:
    with open(path) as fh:
        return [tuple(map(int, line.split())) for line in fh if line.strip()]


def write_admissible(pc: PreclusteredInstance, path) -> None:
    with open(path, "w") as fh:
        for u, v in pc.admissible.tolist():
            fh.write(f"{u} {v}\n")
