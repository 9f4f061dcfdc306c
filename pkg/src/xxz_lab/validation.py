"""Oracle-equivalence and containment suites bundled behind ``xxz-lab validate``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domains import Disk, Interval, Square
from .energy import field, total_energy, zero_mode
from .error_bounds import (certified_normalized_energy_interval, error_report_row,
                           lemma_checks)
from .exact import (apply_hamiltonian, assemble_excitation, assemble_ground_state,
                    bond_hamiltonian, hamiltonian_matrix, kernel_dimension)
from .lattice import chain_of, make_cylinder
from .laplacian import analytic_reference, extrapolated_eigenvalues
from .shapes import REGISTRY, first_mode, registry_for
from .states import bond_projector, interface, make_aniso
from .variational import ansatz_rayleigh, check_g_bounds, g_function

DELTAS = (1.5, 2.0, 5.0)
MUS = (0.0, 0.5, -1.0)


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""

    def __post_init__(self):
        self.passed = bool(self.passed)
        self.value = float(self.value)

    def row(self):
        return {"check": self.name, "passed": self.passed, "value": self.value,
                "threshold": self.threshold, "detail": self.detail}


def check_projector():
    worst = 0.0
    for dl in DELTAS:
        a = make_aniso(dl)
        h = bond_hamiltonian(a)
        worst = max(worst, np.abs(h @ h - h).max(), abs(np.trace(h) - 1),
                    np.abs(h - bond_projector(a)).max())
    return Check("bond term is the projector |xi><xi|", worst <= 1e-12, worst, 1e-12)


def check_kernel_dimension(max_sites):
    bad = []
    sizes = [n for n in (3, 4, 5, 6) if n <= max_sites]
    for n in sizes:
        for dl in DELTAS:
            rep = kernel_dimension(chain_of(2, n), make_aniso(dl))
            if rep.kernel_dimension != n + 1:
                bad.append(f"|Lambda|={n}, Delta={dl}: {rep.kernel_dimension}")
    return Check("kernel dimension |Lambda|+1 on chains", not bad, float(len(bad)), 0.0,
                 "; ".join(bad) or f"sizes {sizes}")


def check_annihilation(max_sites, seed):
    n = min(12, max_sites)
    cyl = chain_of(2, n)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for dl in DELTAS:
        a = make_aniso(dl)
        for _ in range(20):
            z = complex(rng.uniform(-n / 2, n / 2), rng.uniform(-np.pi, np.pi))
            psi = assemble_ground_state(interface(z), cyl, a, max_sites=max_sites)
            worst = max(worst, float(np.linalg.norm(apply_hamiltonian(psi, cyl, a))))
    return Check("H psi_0(z) = 0", worst <= 1e-11, worst, 1e-11, f"|Lambda|={n}")


def _oracle_lattices(max_sites):
    out = [chain_of(2, min(6, max_sites))]
    base = make_cylinder(Interval(1.0), 3, 2, 2)
    if base.n_sites <= max_sites:
        out.append(base)
    return out


def check_energy_form(max_sites, seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for cyl in _oracle_lattices(max_sites):
        for dl in DELTAS:
            a = make_aniso(dl)
            spec = interface(rng.uniform(-1, 1))
            H = hamiltonian_matrix(cyl, a)
            for _ in range(5):
                f = field(cyl, rng.standard_normal(cyl.n_sites) + 1j * rng.standard_normal(cyl.n_sites))
                g = field(cyl, rng.standard_normal(cyl.n_sites) + 1j * rng.standard_normal(cyl.n_sites))
                pf = assemble_excitation(f, spec, cyl, a, max_sites=max_sites)
                pg = assemble_excitation(g, spec, cyl, a, max_sites=max_sites)
                ref = np.vdot(pf, H @ pg)
                got = total_energy(f, g, spec, a)
                worst = max(worst, abs(got - ref) / max(abs(ref), 1e-300))
    return Check("bond-sum energy = <psi^f|H|psi^g>", worst <= 1e-10, worst, 1e-10)


def check_zero_mode():
    worst = 0.0
    for cyl in (chain_of(2, 7), make_cylinder(Interval(1.0), 8, 2, 6),
                make_cylinder(Square(1.0), 6, 3, 4)):
        for dl in DELTAS:
            for mu in MUS:
                a, spec = make_aniso(dl), interface(mu)
                f = zero_mode(cyl, spec, a)
                worst = max(worst, abs(total_energy(f, f, spec, a)))
    return Check("zero mode has zero energy", worst <= 1e-12, worst, 1e-12)


def check_g():
    a, spec = make_aniso(2.0), interface(0.0)
    g = g_function(2, spec, a).g
    bad = 0
    for L in (10, 40, 100):
        for dl in np.linspace(1.1, 10, 12):
            a = make_aniso(dl)
            for mu in np.linspace(-L, L, 21):
                if not check_g_bounds(g_function(L, interface(mu), a), a, L, mu).ok:
                    bad += 1
    far = abs(g_function(40, interface(40.0), make_aniso(2.0)).g - make_aniso(2.0).exp_minus_alpha)
    ok = abs(g - 2 / 3) <= 1e-12 and bad == 0 and far <= 1e-6
    return Check("g values and bounds", ok, float(bad), 0.0,
                 f"g(2,0,2)={g:.15g}; far-interface gap {far:.2e}")


def check_laplacian():
    worst = 0.0
    tol = {"interval": 1e-3, "rectangle": 5e-3, "disk": 1e-2}
    ok = True
    for dom in (Interval(1.0), Square(1.0), Disk(1.0)):
        rep = extrapolated_eigenvalues(dom, 1 / 64)[0]
        rel = abs(rep.extrapolated - analytic_reference(dom)) / analytic_reference(dom)
        ok &= rel <= tol[dom.name]
        worst = max(worst, rel)
    return Check("extrapolated lambda_1 vs analytic", ok, worst, 1e-2)


def check_lemma(Rs=(8, 16, 32)):
    total = bad = 0
    for R in Rs:
        cyls = {}
        for phi in REGISTRY:
            d = phi.domain.dim + 1
            key = type(phi.domain)
            if key not in cyls:
                cyls[key] = make_cylinder(phi.domain, R, d, 2)
            for c in lemma_checks(phi, cyls[key]):
                total += 1
                bad += not c.within
    return Check("lattice averages within lemma bound", bad == 0, float(bad), 0.0,
                 f"{total} averages")


def check_containment(Rs=(8, 16), L=10):
    total = bad = vacuous = 0
    spec, a = interface(0.0), make_aniso(2.0)
    for R in Rs:
        cyls = {}
        for phi in REGISTRY:
            d = phi.domain.dim + 1
            key = type(phi.domain)
            if key not in cyls:
                cyls[key] = make_cylinder(phi.domain, R, d, L)
            row = error_report_row(phi, R, L, spec, a, cyls[key])
            total += 1
            bad += not row["contained"]
            vacuous += not np.isfinite(row["interval_hi"])
    return Check("certified interval contains exact quotient", bad == 0, float(bad), 0.0,
                 f"{total} cases, {vacuous} with upper end +inf")


def gap_instances(max_sites=14):
    """Every registry-domain cylinder with L >= 2 small enough to diagonalize."""
    out = []
    for dom, Rs in ((Interval(1.0), (1, 2, 3, 4, 5)), (Square(1.0), (1, 2)), (Disk(0.5), (1, 2))):
        for R in Rs:
            for L in range(2, max_sites + 1, 2):
                cyl = make_cylinder(dom, R, dom.dim + 1, L)
                if cyl.n_sites > max_sites:
                    break
                out.append((dom, R, L, cyl))
    return out


@dataclass
class GapInstance:
    domain: str
    R: float
    L: int
    sites: int
    delta: float
    mu: float
    gamma1: float
    best_orthogonal: float  # nan when no registry ansatz survives level-mean removal
    best_orthogonal_id: str
    best_raw: float
    best_raw_id: str
    certified_upper: float

    def row(self):
        return dict(self.__dict__)


def gap_dominance(max_sites=14, deltas=DELTAS, mus=MUS, seed=0):
    rows = []
    for dom, R, L, cyl in gap_instances(max_sites):
        for dl in deltas:
            a = make_aniso(dl)
            g1 = kernel_dimension(cyl, a, max_sites=max_sites, seed=seed).gamma1
            for mu in mus:
                spec = interface(mu)
                shapes = registry_for(dom)
                raw = [(ansatz_rayleigh(p, cyl, spec, a), p.id) for p in shapes if not p.is_constant()]
                orth = [(ansatz_rayleigh(p, cyl, spec, a, orthogonal=True), p.id) for p in shapes]
                orth = [o for o in orth if np.isfinite(o[0])]
                best_o = min(orth) if orth else (float("nan"), "")
                iv = certified_normalized_energy_interval(first_mode(dom), R, L, spec, a, cyl=cyl,
                                                          strict=False)
                rows.append(GapInstance(dom.name, float(R), L, cyl.n_sites, dl, mu, g1, best_o[0],
                                        best_o[1], *min(raw), iv.upper))
    return rows


def check_gap(max_sites):
    rows = gap_dominance(max_sites)
    usable = [r for r in rows if np.isfinite(r.best_orthogonal)]
    bad = [r for r in usable if r.gamma1 > r.best_orthogonal * (1 + 1e-12)]
    bad_cert = [r for r in rows if r.gamma1 > r.certified_upper]
    return Check("gamma_1 <= kernel-orthogonal ansatz and certified upper end",
                 not bad and not bad_cert, float(len(bad) + len(bad_cert)), 0.0,
                 f"{len(usable)}/{len(rows)} instances admit a kernel-orthogonal ansatz")


def run_all(max_sites=12, seed=0):
    return [check_projector(), check_kernel_dimension(max_sites), check_annihilation(max_sites, seed),
            check_energy_form(max_sites, seed), check_zero_mode(), check_g(), check_laplacian(),
            check_lemma(), check_containment(), check_gap(max_sites)]
