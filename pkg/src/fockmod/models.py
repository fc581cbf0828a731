"""Fixed-time interaction models and the machine-checked claim battery.

A model is a choice of smearing kernel sigma; convolving a generator's
position component gives a phase profile, and the twist multiplies the
+ charge sector by exp(-i phi) and the - sector by exp(+i phi).  The
four kinds:

    delta     phi = s0, sharp localization
    bump      phi supported within radius r of supp(s0)
    poisson   phi is the Coulomb-type potential of s0, long range
    lebesgue  phi is the constant integral of s0, a global phase

Check functions evaluate operator identities on explicit witness
vectors and return CheckResult records that the report layer serializes.
"""

from __future__ import annotations

import cmath
import itertools
import math
import random
from dataclasses import dataclass, field

import numpy as np

from .weyl import (
    GeneratorSet,
    GridSpec,
    State,
    WeylElement,
    gram_matrix,
)
from .bimodule import (
    FreeBimodule,
    ModuleVector,
    OneParticleBasis,
    OneParticleVector,
    Twist,
    SECTOR_MINUS,
    SECTOR_PLUS,
    conjugate_vector,
    module_inner,
    mutually_free,
)
from .fock import (
    AnnihilateOp,
    CreateOp,
    FieldOperator,
    FockElement,
    LeftMultOp,
    annihilate,
    annihilation,
    anticommutator,
    commutator,
    create,
    creation,
    dirac,
    fock_from_antisymmetric,
    gns_inner,
    gns_norm,
    operator_matrix,
    project_antisymmetric,
    tensor_inner,
    tensor_of,
    vacuum,
    weyl_mult,
)

__all__ = [
    "SIGMA_KINDS",
    "kernel_value",
    "sigma_convolve",
    "make_twist",
    "ModelContext",
    "build_context",
    "profile_array",
    "plus_vector",
    "particle_support",
    "generator_support",
    "dilate",
    "electron",
    "electron_star",
    "observable",
    "term_charge",
    "gauge_transform",
    "level_basis",
    "CheckResult",
    "check_weyl_exactness",
    "check_gram_positivity",
    "check_car",
    "check_adjointness",
    "check_covariance",
    "check_norm_recovery",
    "check_nonfock",
    "check_pauli",
    "check_dirac_adjoint",
    "check_relative_locality",
    "check_bilinear_locality",
    "check_anticommutator_model",
    "check_observable_net",
    "check_gauge_invariance",
    "check_covariance_phase",
    "check_neutral_commutant",
    "check_mutual_freeness",
    "conventions",
]

SIGMA_KINDS = ("delta", "bump", "poisson", "lebesgue")


# ---------------------------------------------------------------------------
# kernels and convolution


def _origin_regularization(grid: GridSpec) -> float:
    """Half-cell average of the Coulomb-type kernel at displacement 0."""
    a = grid.spacing
    if grid.dimension == 1:
        return -a / 8.0
    if grid.dimension == 2:
        return (math.log(a / 2.0) - 0.5) / (2.0 * math.pi)
    if grid.dimension == 3:
        return 3.0 / (4.0 * math.pi * a)
    raise ValueError("poisson kernel defined for dimensions 1..3")


def kernel_value(kind: str, grid: GridSpec, disp: tuple[int, ...], radius: float | None = None) -> float:
    """Kernel at an integer cell displacement."""
    if kind not in SIGMA_KINDS:
        raise ValueError(f"unknown sigma kind {kind!r}")
    rho = grid.spacing * math.sqrt(sum(d * d for d in disp))
    if kind == "delta":
        return 1.0 / grid.cell_volume if rho == 0.0 else 0.0
    if kind == "bump":
        if radius is None or radius <= 0:
            raise ValueError("bump kernel needs a positive radius")
        if rho >= radius:
            return 0.0
        x = rho / radius
        return math.exp(1.0 - 1.0 / (1.0 - x * x))
    if kind == "lebesgue":
        return 1.0
    # poisson
    if rho == 0.0:
        return _origin_regularization(grid)
    if grid.dimension == 1:
        return -rho / 2.0
    if grid.dimension == 2:
        return math.log(rho) / (2.0 * math.pi)
    if grid.dimension == 3:
        return 1.0 / (4.0 * math.pi * rho)
    raise ValueError("poisson kernel defined for dimensions 1..3")


def sigma_convolve(kind: str, grid: GridSpec, s0, radius: float | None = None) -> np.ndarray:
    """Discrete (sigma * s0)(x) = sum_y k(x - y) s0(y) spacing^d.

    The delta kind returns s0 itself, exactly, for every spacing.
    """
    s0 = np.asarray(s0, dtype=float).reshape(-1)
    if s0.shape != (grid.n_points,):
        raise ValueError("profile length does not match grid")
    if kind == "delta":
        return s0.copy()
    out = np.zeros(grid.n_points)
    coords = [grid.coords(i) for i in range(grid.n_points)]
    vol = grid.cell_volume
    for xi in range(grid.n_points):
        cx = coords[xi]
        acc = 0.0
        for yi in range(grid.n_points):
            sy = s0[yi]
            if sy == 0.0:
                continue
            cy = coords[yi]
            disp = tuple(a - b for a, b in zip(cx, cy))
            acc += kernel_value(kind, grid, disp, radius) * sy
        out[xi] = acc * vol
    return out


def make_twist(
    kind: str,
    basis: OneParticleBasis,
    gens: GeneratorSet,
    radius: float | None = None,
) -> Twist:
    """Diagonal model twist: exp(-i phi) on +, its conjugate on -."""
    grid = basis.grid
    mats = []
    for pair in gens.pairs:
        phi = sigma_convolve(kind, grid, pair.s0, radius)
        diag = np.ones(basis.dim, dtype=complex)
        for p in range(grid.n_points):
            plus_phase = cmath.exp(-1j * phi[p])
            minus_phase = plus_phase.conjugate()
            for c in range(grid.components):
                diag[basis.index(p, c, SECTOR_PLUS)] = plus_phase
                diag[basis.index(p, c, SECTOR_MINUS)] = minus_phase
        mats.append(np.diag(diag))
    return Twist(basis, gens, mats)


def conventions(grid: GridSpec) -> dict:
    """Sign and regularization conventions stamped into every report."""
    return {
        "weyl_product": "W(n) W(n') = exp(+i/2 eta(n,n')) W(n+n')",
        "symplectic_form": "eta(s,t) = sum_x (s1 t0 - s0 t1) spacing^d",
        "generator_commutation": "tested as eta = 0 within 1e-10",
        "lebesgue_twist": "u = exp(-i integral s0) on the + sector",
        "lebesgue_phase": "W(s) psi(w) = exp(-i <s0>) psi(w) W(s)",
        "poisson_origin": f"half-cell average = {_origin_regularization(grid):.17g}"
        if grid.dimension <= 3
        else "n/a",
    }


# ---------------------------------------------------------------------------
# scenario fabric


@dataclass
class ModelContext:
    """Everything a check needs: the bimodule plus scenario metadata."""

    kind: str
    grid: GridSpec
    gens: GeneratorSet
    module: FreeBimodule
    state: State
    truncation: int
    radius: float | None = None
    vectors: dict[str, ModuleVector] = field(default_factory=dict)


def build_context(
    kind: str,
    grid: GridSpec,
    gen_pairs,
    state_kind: str = "tracial",
    truncation: int = 3,
    radius: float | None = None,
) -> ModelContext:
    gens = GeneratorSet(grid, gen_pairs)
    basis = OneParticleBasis(grid)
    twist = make_twist(kind, basis, gens, radius)
    module = FreeBimodule(basis, gens, twist)
    return ModelContext(
        kind=kind,
        grid=grid,
        gens=gens,
        module=module,
        state=State(state_kind),
        truncation=truncation,
        radius=radius,
    )


def profile_array(grid: GridSpec, spec: dict) -> np.ndarray:
    """Real grid profile from a named shape or raw values."""
    out = np.zeros(grid.n_points)
    shape = spec.get("shape", "values")
    if shape == "zero":
        return out
    if shape == "values":
        vals = np.asarray(spec["values"], dtype=float).reshape(-1)
        if vals.shape != (grid.n_points,):
            raise ValueError("values length does not match grid")
        return vals
    amp = float(spec.get("amplitude", 1.0))
    center = spec.get("center", grid.points_per_axis // 2)
    if isinstance(center, (list, tuple)):
        cidx = grid.index(tuple(int(c) for c in center))
    else:
        cidx = grid.index((int(center),) * grid.dimension) if grid.dimension > 1 else int(center)
    ccoords = grid.coords(cidx)
    if shape == "point":
        out[cidx] = amp
        return out
    width = float(spec.get("width", 1.0))
    if width <= 0:
        raise ValueError("width must be positive")
    for i in range(grid.n_points):
        dist = grid.spacing * math.sqrt(
            sum((a - b) ** 2 for a, b in zip(grid.coords(i), ccoords))
        )
        if shape == "box":
            if dist <= width / 2.0 + 1e-12:
                out[i] = amp
        elif shape == "bump":
            x = dist / (width / 2.0)
            if x < 1.0:
                out[i] = amp * math.exp(1.0 - 1.0 / (1.0 - x * x))
        else:
            raise ValueError(f"unknown shape {shape!r}")
    return out


def plus_vector(
    module: FreeBimodule,
    profile,
    component: int = 0,
    sector: int = SECTOR_PLUS,
    coeff: WeylElement | None = None,
) -> ModuleVector:
    """Module vector with the given spatial profile in one sector."""
    basis = module.basis
    grid = basis.grid
    profile = np.asarray(profile, dtype=float).reshape(-1)
    vec = OneParticleVector(
        basis,
        {
            basis.index(p, component, sector): profile[p]
            for p in range(grid.n_points)
            if abs(profile[p]) > 0
        },
    )
    return module.embed(vec, coeff)


def particle_support(f: ModuleVector) -> frozenset[int]:
    """Grid points carrying any one-particle weight of f."""
    basis = f.space.basis
    return frozenset(basis.point_of(b) for b in f.entries)


def generator_support(f: ModuleVector) -> frozenset[int]:
    """Grid points carrying the combined test functions of f's group part."""
    gens = f.space.gens
    out: set[int] = set()
    for n in f.by_group():
        out |= gens.combine(n).support()
    return frozenset(out)


def dilate(grid: GridSpec, points: frozenset[int], radius: float) -> frozenset[int]:
    """Grow a point set by ceil(radius / spacing) cells (Chebyshev)."""
    if radius <= 0:
        return points
    cells = math.ceil(radius / grid.spacing - 1e-12)
    coords = {grid.coords(p) for p in points}
    out = set()
    for i in range(grid.n_points):
        ci = grid.coords(i)
        for cp in coords:
            if max(abs(a - b) for a, b in zip(ci, cp)) <= cells:
                out.add(i)
                break
    return frozenset(out)


# ---------------------------------------------------------------------------
# field builders and the gauge action


def _require_sector(f: ModuleVector, sector: int) -> None:
    basis = f.space.basis
    if any(basis.sector_of(b) != sector for b in f.entries):
        raise ValueError("vector is not supported in the required charge sector")


def electron(f: ModuleVector) -> FieldOperator:
    """Matter field psi(f) for f supported in the + sector."""
    _require_sector(f, SECTOR_PLUS)
    return dirac(f)


def electron_star(f: ModuleVector) -> FieldOperator:
    """Adjoint field psi*(f) = psi-hat(kappa f)."""
    _require_sector(f, SECTOR_PLUS)
    return dirac(conjugate_vector(f))


def observable(s: WeylElement, w1: ModuleVector, w2: ModuleVector) -> FieldOperator:
    """Gauge-invariant bilinear psi(w1) W psi*(w2)."""
    return electron(w1) @ weyl_mult(w1.space, s) @ electron_star(w2)


def _vector_charge(f: ModuleVector) -> int | None:
    """+1 for purely - sector, -1 for purely +, None for mixed/empty."""
    basis = f.space.basis
    sectors = {basis.sector_of(b) for b in f.entries}
    if sectors == {SECTOR_PLUS}:
        return -1
    if sectors == {SECTOR_MINUS}:
        return +1
    return None


def term_charge(prims) -> int | None:
    """Net gauge exponent of a word; None when a mixed vector blocks it."""
    total = 0
    for p in prims:
        if isinstance(p, LeftMultOp):
            continue
        q = _vector_charge(p.vector)
        if q is None:
            return None
        # annihilation is antilinear, flipping the exponent
        total += q if isinstance(p, CreateOp) else -q
    return total


def _gauge_scale(f: ModuleVector, z: complex) -> ModuleVector:
    basis = f.space.basis
    zc = z.conjugate()
    return ModuleVector(
        f.space,
        {
            b: (zc if basis.sector_of(b) == SECTOR_PLUS else z) * a
            for b, a in f.entries.items()
        },
    )


def gauge_transform(z: complex, op: FieldOperator) -> FieldOperator:
    """U(1) action scaling the + sector by conj(z), the - sector by z.

    Single-sector words collapse to an integer power of z on the term
    scalar; a word of net charge zero is returned untouched, which is
    what makes gauge invariance structural rather than numerical.
    """
    if abs(abs(z) - 1.0) > 1e-12:
        raise ValueError("gauge parameter must lie on the unit circle")
    out = []
    for scalar, prims in op.terms:
        q = term_charge(prims)
        if q is None:
            prims = tuple(
                type(p)(_gauge_scale(p.vector, z))
                if isinstance(p, (CreateOp, AnnihilateOp))
                else p
                for p in prims
            )
            out.append((scalar, prims))
        elif q == 0:
            out.append((scalar, prims))
        else:
            out.append((scalar * z**q, prims))
    return FieldOperator(op.space, out)


# ---------------------------------------------------------------------------
# witness machinery


def level_basis(
    module: FreeBimodule,
    truncation: int,
    max_level: int,
    indices=None,
) -> list[FockElement]:
    """Vacuum plus every canonical wedge over the index set, by level."""
    if indices is None:
        indices = range(module.basis.dim)
    indices = sorted(indices)
    unit = WeylElement.unit(module.gens)
    out = [vacuum(module, truncation)]
    for l in range(1, max_level + 1):
        for t in itertools.combinations(indices, l):
            out.append(FockElement(module, truncation, {l: {t: unit}}))
    return out


def _max_residual(op: FieldOperator, witnesses, state: State) -> tuple[float, int]:
    worst = 0.0
    at = -1
    for i, v in enumerate(witnesses):
        r = gns_norm(op.apply(v), state)
        if r > worst:
            worst = r
            at = i
    return worst, at


@dataclass
class CheckResult:
    """One verified claim: status, measured residuals, witness data."""

    name: str
    status: str
    residuals: dict[str, float] = field(default_factory=dict)
    tolerance: dict[str, float] = field(default_factory=dict)
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def _result(name, ok, residuals, tolerance, witness=None, details=None) -> CheckResult:
    return CheckResult(
        name=name,
        status="pass" if ok else "fail",
        residuals=residuals,
        tolerance=tolerance,
        witness=witness,
        details=details or {},
    )


# ---------------------------------------------------------------------------
# algebra-level checks


def check_weyl_exactness(gens: GeneratorSet, seed: int, cases: int = 200, tol: float = 1e-14) -> CheckResult:
    """Random words multiply to the exact group element with the cocycle
    phase, and single products match exp(i eta / 2) to tolerance."""
    rng = random.Random(seed)
    m = len(gens)
    worst_phase = 0.0
    worst_mod = 0.0
    exact_keys = True
    for _ in range(cases):
        n = tuple(rng.randint(-2, 2) for _ in range(m))
        n2 = tuple(rng.randint(-2, 2) for _ in range(m))
        prod = WeylElement.monomial(gens, n) * WeylElement.monomial(gens, n2)
        key = tuple(a + b for a, b in zip(n, n2))
        if set(prod.terms) != {key}:
            exact_keys = False
            continue
        expected = cmath.exp(0.5j * gens.eta(n, n2))
        worst_phase = max(worst_phase, abs(prod.terms[key] - expected))
        # longer word: unitarity of the accumulated cocycle
        word = WeylElement.monomial(gens, n)
        total = list(n)
        for _ in range(3):
            nk = tuple(rng.randint(-1, 1) for _ in range(m))
            word = word * WeylElement.monomial(gens, nk)
            total = [a + b for a, b in zip(total, nk)]
        if set(word.terms) != {tuple(total)}:
            exact_keys = False
            continue
        worst_mod = max(worst_mod, abs(abs(word.terms[tuple(total)]) - 1.0))
    ok = exact_keys and worst_phase <= tol and worst_mod <= tol
    return _result(
        "weyl_exactness",
        ok,
        {"phase": worst_phase, "word_modulus": worst_mod},
        {"phase": tol, "word_modulus": tol},
        details={"cases": cases, "exact_keys": exact_keys},
    )


def check_gram_positivity(gens: GeneratorSet, seed: int, size: int = 8, tol: float = 1e-10) -> CheckResult:
    """GNS Gram matrices of random elements are PSD in both states."""
    rng = random.Random(seed)
    m = len(gens)
    elems = []
    for _ in range(size):
        terms = {}
        for _ in range(rng.randint(1, 3)):
            n = tuple(rng.randint(-1, 1) for _ in range(m))
            terms[n] = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        elems.append(WeylElement(gens, terms))
    worst = 0.0
    for kind in State.KINDS:
        g = gram_matrix(State(kind), elems)
        eig = np.linalg.eigvalsh((g + g.conj().T) / 2.0)
        worst = max(worst, max(0.0, -float(eig.min())))
    return _result(
        "gram_positivity", worst <= tol, {"negativity": worst}, {"negativity": tol}
    )


# ---------------------------------------------------------------------------
# CAR battery


def _car_operators(f: ModuleVector, g: ModuleVector):
    space = f.space
    mixed = anticommutator(annihilation(f), creation(g)) - weyl_mult(
        space, module_inner(f, g)
    )
    ann = anticommutator(annihilation(f), annihilation(g))
    cre = anticommutator(creation(f), creation(g))
    return mixed, ann, cre


def check_car(
    ctx: ModelContext,
    pairs,
    tol: float = 1e-10,
    threshold: float = 0.1,
    name: str = "car",
) -> CheckResult:
    """Anticommutation relations on every wedge witness.

    pairs: iterable of (f, g, expect_free).  Free pairs must satisfy all
    three relations within tol on every basis vector of the stated
    levels; designed non-free pairs must show a mixed residual above
    threshold somewhere.  Freeness decisions must match expectations.
    """
    pairs = list(pairs)
    module = ctx.module
    state = ctx.state
    n = ctx.truncation
    sweep = level_basis(module, n, min(2, n - 1)) if n >= 2 else level_basis(module, n, 0)
    sweep_cre = level_basis(module, n, min(2, max(n - 2, 0)))
    worst_free = 0.0
    best_nonfree = None
    decisions_ok = True
    witness = None
    for idx, (f, g, expect_free) in enumerate(pairs):
        rep = mutually_free(f, g)
        if rep.free != expect_free:
            decisions_ok = False
            witness = {"pair": idx, "problem": "freeness_decision", "got": rep.free}
        mixed, ann, cre = _car_operators(f, g)
        r_mixed, at = _max_residual(mixed, sweep, state)
        if expect_free:
            r_ann, _ = _max_residual(ann, sweep, state)
            r_cre, _ = _max_residual(cre, sweep_cre, state)
            here = max(r_mixed, r_ann, r_cre)
            if here > worst_free:
                worst_free = here
                if here > tol:
                    witness = {"pair": idx, "problem": "free_residual", "value": here}
        else:
            if best_nonfree is None or r_mixed < best_nonfree:
                best_nonfree = r_mixed
                if r_mixed <= threshold:
                    witness = {
                        "pair": idx,
                        "problem": "nonfree_too_small",
                        "value": r_mixed,
                        "witness_vector": at,
                    }
    residuals = {"free_max": worst_free}
    tols = {"free_max": tol}
    ok = decisions_ok and worst_free <= tol
    if best_nonfree is not None:
        residuals["nonfree_min"] = best_nonfree
        tols["nonfree_min"] = threshold
        ok = ok and best_nonfree > threshold
    return _result(name, ok, residuals, tols, witness, {"pairs": len(pairs)})


def _random_weyl(rng, gens, max_terms=2, max_exp=1) -> WeylElement:
    terms = {}
    m = len(gens)
    for _ in range(rng.randint(1, max_terms)):
        n = tuple(rng.randint(-max_exp, max_exp) for _ in range(m))
        terms[n] = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
    return WeylElement(gens, terms)


def _random_module_vector(rng, module, max_entries=2) -> ModuleVector:
    dim = module.basis.dim
    entries = {}
    for _ in range(rng.randint(1, max_entries)):
        entries[rng.randrange(dim)] = _random_weyl(rng, module.gens)
    return ModuleVector(module, entries)


def _random_fock(rng, module, truncation, top) -> FockElement:
    dim = module.basis.dim
    parts: dict[int, dict] = {0: {(): _random_weyl(rng, module.gens)}}
    for l in range(1, top + 1):
        terms = {}
        for _ in range(rng.randint(1, 2)):
            t = tuple(sorted(rng.sample(range(dim), l)))
            terms[t] = _random_weyl(rng, module.gens)
        parts[l] = terms
    return FockElement(module, truncation, parts)


def check_adjointness(ctx: ModelContext, seed: int, cases: int = 100, tol: float = 1e-10) -> CheckResult:
    """<v, a(f) w> = <a*(f) v, w> on random data, both states."""
    rng = random.Random(seed)
    module = ctx.module
    n = ctx.truncation
    worst = 0.0
    states = [State(k) for k in State.KINDS]
    for i in range(cases):
        f = _random_module_vector(rng, module)
        v = _random_fock(rng, module, n, n - 1)
        w = _random_fock(rng, module, n, n)
        st = states[i % 2]
        lhs = gns_inner(v, annihilate(f, w), st)
        rhs = gns_inner(create(f, v), w, st)
        worst = max(worst, abs(lhs - rhs))
    return _result(
        "adjointness", worst <= tol, {"max": worst}, {"max": tol}, details={"cases": cases}
    )


def check_covariance(ctx: ModelContext, seed: int, cases: int = 100, tol: float = 1e-12) -> CheckResult:
    """Left multiplication intertwines with twisted creation and
    annihilation: W a*(w) = a*(u w) W and W a(u* w) = a(w) W on h."""
    rng = random.Random(seed)
    module = ctx.module
    gens = module.gens
    n_tr = ctx.truncation
    m = len(gens)
    worst = 0.0
    states = [State(k) for k in State.KINDS]
    for i in range(cases):
        n = tuple(rng.randint(-1, 1) for _ in range(m))
        wv = OneParticleVector(
            module.basis,
            {
                rng.randrange(module.basis.dim): complex(
                    rng.uniform(-1, 1), rng.uniform(-1, 1)
                ),
                rng.randrange(module.basis.dim): complex(
                    rng.uniform(-1, 1), rng.uniform(-1, 1)
                ),
            },
        )
        wmono = WeylElement.monomial(gens, n)
        f = module.embed(wv)
        fu = module.embed(module.twist.apply(n, wv))
        probe = _random_fock(rng, module, n_tr, n_tr - 1)
        st = states[i % 2]
        lhs = weyl_mult(module, wmono) @ creation(f)
        rhs = creation(fu) @ weyl_mult(module, wmono)
        worst = max(worst, gns_norm((lhs - rhs).apply(probe), st))
        neg = tuple(-x for x in n)
        fd = module.embed(module.twist.apply(neg, wv))
        lhs2 = weyl_mult(module, wmono) @ annihilation(fd)
        rhs2 = annihilation(f) @ weyl_mult(module, wmono)
        worst = max(worst, gns_norm((lhs2 - rhs2).apply(probe), st))
    return _result(
        "covariance", worst <= tol, {"max": worst}, {"max": tol}, details={"cases": cases}
    )


def check_norm_recovery(ctx: ModelContext, seed: int, cases: int = 20, tol: float = 1e-8) -> CheckResult:
    """Compression norm of a(w) equals ||w|| = 1 for unit w in h."""
    rng = random.Random(seed)
    module = ctx.module
    dim = module.basis.dim
    state = State("tracial")
    worst = 0.0
    degenerate = False
    for _ in range(cases):
        size = rng.randint(1, 3)
        picks = rng.sample(range(dim), size)
        coeffs = {b: complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for b in picks}
        vec = OneParticleVector(module.basis, coeffs)
        nrm = vec.norm()
        vec = (1.0 / nrm) * vec
        extras = [b for b in rng.sample(range(dim), 2) if b not in picks]
        span = sorted(set(picks) | set(extras))
        basis = level_basis(module, ctx.truncation, ctx.truncation, span)
        res = operator_matrix(annihilation(module.embed(vec)), basis, state)
        degenerate = degenerate or res.degenerate
        worst = max(worst, abs(res.norm_estimate - 1.0))
    return _result(
        "norm_recovery",
        worst <= tol and not degenerate,
        {"max_error": worst},
        {"max_error": tol},
        details={"cases": cases, "degenerate": degenerate},
    )


def check_nonfock(ctx: ModelContext, threshold: float = 0.1) -> CheckResult:
    """The nested scalar product is not the slotwise product.

    Witness: v = (e_x W(n)) x (e_y W(-n)), w = e_x x e_y.  The nested
    value sees the coefficients cancel inside the tensor; the slotwise
    product evaluates each factor separately and dies in the trace.
    """
    module = ctx.module
    basis = module.basis
    gens = module.gens
    state = State("tracial")
    x = basis.index(0, 0, SECTOR_PLUS)
    y = basis.index(min(1, basis.grid.n_points - 1), 0, SECTOR_PLUS)
    n = gens.unit(0)
    wn = WeylElement.monomial(gens, n)
    wneg = WeylElement.monomial(gens, tuple(-v for v in n))
    f1 = module.basis_element(x, wn)
    f2 = module.basis_element(y, wneg)
    g1 = module.basis_element(x)
    g2 = module.basis_element(y)
    v = tensor_of([f1, f2])
    w = tensor_of([g1, g2])
    nested = state(tensor_inner(v, w))
    slotwise = state(module_inner(f1, g1)) * state(module_inner(f2, g2))
    gap = abs(nested - slotwise)
    return _result(
        "nonfock_witness",
        gap > threshold,
        {"gap": gap},
        {"gap": threshold},
        details={"nested": repr(nested), "slotwise": repr(slotwise)},
    )


def check_pauli(ctx: ModelContext, threshold: float = 0.1, tol: float = 1e-12) -> CheckResult:
    """Wedge of a mutually free pair antisymmetrizes to zero; a twisted
    self-pair does not."""
    module = ctx.module
    basis = module.basis
    gens = module.gens
    state = State("tracial")
    # free pair: plain one-particle vectors at distinct sites
    a = module.basis_element(basis.index(0, 0, SECTOR_PLUS))
    b = module.basis_element(basis.index(min(1, basis.grid.n_points - 1), 0, SECTOR_PLUS))
    sym = project_antisymmetric(tensor_of([a, b])) + project_antisymmetric(
        tensor_of([b, a])
    )
    free_norm = gns_norm(fock_from_antisymmetric(sym, ctx.truncation), state)
    # twisted self-pair: spread over two sites the twist phases apart
    twisted_norm = 0.0
    witness = None
    for k, pair in enumerate(gens.pairs):
        phi = sigma_convolve(ctx.kind, basis.grid, pair.s0, ctx.radius)
        pts = [p for p in range(basis.grid.n_points)]
        best = None
        for p1 in pts:
            for p2 in pts:
                if p1 < p2 and abs(phi[p1] - phi[p2]) > 0.5:
                    best = (p1, p2)
                    break
            if best:
                break
        if best is None:
            continue
        p1, p2 = best
        vec = OneParticleVector(
            basis,
            {
                basis.index(p1, 0, SECTOR_PLUS): 1 / math.sqrt(2),
                basis.index(p2, 0, SECTOR_PLUS): 1 / math.sqrt(2),
            },
        )
        f = module.embed(vec, WeylElement.monomial(gens, gens.unit(k)))
        wedge = project_antisymmetric(tensor_of([f, f]))
        nrm = gns_norm(fock_from_antisymmetric(wedge, ctx.truncation), state)
        if nrm > twisted_norm:
            twisted_norm = nrm
            witness = {"generator": k, "points": [p1, p2]}
    ok = free_norm <= tol and twisted_norm > threshold
    return _result(
        "pauli",
        ok,
        {"free": free_norm, "twisted": twisted_norm},
        {"free": tol, "twisted": threshold},
        witness,
    )


def check_dirac_adjoint(ctx: ModelContext, seed: int, cases: int = 10, tol: float = 1e-12) -> CheckResult:
    """The field adjoint is charge conjugation on the argument."""
    rng = random.Random(seed)
    module = ctx.module
    ok = True
    for _ in range(cases):
        f = _random_module_vector(rng, module)
        if not dirac(f).adjoint().equivalent(dirac(conjugate_vector(f)), tol):
            ok = False
            break
    return _result("dirac_adjoint", ok, {}, {}, details={"cases": cases})


# ---------------------------------------------------------------------------
# model-specific checks


def _witnesses_for(
    ctx: ModelContext, vectors, max_level: int = 2, truncation: int | None = None
) -> list[FockElement]:
    """Vacuum and wedges over every index the given vectors touch."""
    idx: set[int] = set()
    for f in vectors:
        idx |= set(f.entries)
        idx |= {ctx.module.basis.conj_index(b) for b in f.entries}
    n = ctx.truncation if truncation is None else truncation
    return level_basis(ctx.module, n, min(max_level, n - 1), sorted(idx))


def check_relative_locality(
    ctx: ModelContext,
    local_pairs,
    witness_pairs,
    tol: float = 1e-12,
    threshold: float = 0.1,
) -> CheckResult:
    """[psi(w), W] vanishes when the twist leaves w alone, and is seen
    to act otherwise.  Pairs are (vector, generator index)."""
    module = ctx.module
    state = ctx.state
    worst_local = 0.0
    best_witness = None
    wit = None
    for tag, pairs in (("local", local_pairs), ("witness", witness_pairs)):
        for w, k in pairs:
            mono = WeylElement.monomial(module.gens, module.gens.unit(k))
            op = commutator(electron(w), weyl_mult(module, mono))
            probes = _witnesses_for(ctx, [w])
            r, at = _max_residual(op, probes, state)
            if tag == "local":
                if r > worst_local:
                    worst_local = r
                    if r > tol:
                        wit = {"pair": ["local", k], "residual": r}
            else:
                if best_witness is None or r < best_witness:
                    best_witness = r
                    if r <= threshold:
                        wit = {"pair": ["witness", k], "residual": r}
    residuals = {"local_max": worst_local}
    tols = {"local_max": tol}
    ok = worst_local <= tol
    if best_witness is not None:
        residuals["witness_min"] = best_witness
        tols["witness_min"] = threshold
        ok = ok and best_witness > threshold
    return _result("relative_locality", ok, residuals, tols, wit)


def check_bilinear_locality(
    ctx: ModelContext,
    commuting,
    witnesses,
    tol: float = 1e-10,
    threshold: float = 0.1,
) -> CheckResult:
    """[W, psi(w1) psi*(w2)] on triples (gen index, w1, w2)."""
    module = ctx.module
    state = ctx.state
    unitw = WeylElement.unit(module.gens)
    worst_local = 0.0
    best_witness = None
    wit = None
    for tag, triples in (("commuting", commuting), ("witness", witnesses)):
        for k, w1, w2 in triples:
            mono = WeylElement.monomial(module.gens, module.gens.unit(k))
            bilin = electron(w1) @ electron_star(w2)
            op = commutator(weyl_mult(module, mono), bilin)
            probes = _witnesses_for(ctx, [w1, w2])
            r, _ = _max_residual(op, probes, state)
            if tag == "commuting":
                if r > worst_local:
                    worst_local = r
                    if r > tol:
                        wit = {"triple": ["commuting", k], "residual": r}
            else:
                if best_witness is None or r < best_witness:
                    best_witness = r
                    if r <= threshold:
                        wit = {"triple": ["witness", k], "residual": r}
    residuals = {"commuting_max": worst_local}
    tols = {"commuting_max": tol}
    ok = worst_local <= tol
    if best_witness is not None:
        residuals["witness_min"] = best_witness
        tols["witness_min"] = threshold
        ok = ok and best_witness > threshold
    return _result("bilinear_locality", ok, residuals, tols, wit)


def check_anticommutator_model(
    ctx: ModelContext,
    pairs,
    tol: float = 1e-10,
    name: str = "anticommutator_model",
) -> CheckResult:
    """[psi*(f), psi(g)]_+ collapses to left multiplication by <f, g>
    for mutually free pairs of + sector vectors."""
    module = ctx.module
    state = ctx.state
    worst = 0.0
    wit = None
    all_free = True
    for idx, (f, g) in enumerate(pairs):
        if not mutually_free(f, g).free:
            all_free = False
            wit = {"pair": idx, "problem": "not_free"}
            continue
        op = anticommutator(electron_star(f), electron(g)) - weyl_mult(
            module, module_inner(f, g)
        )
        probes = _witnesses_for(ctx, [f, g])
        r, at = _max_residual(op, probes, state)
        if r > worst:
            worst = r
            if r > tol:
                wit = {"pair": idx, "residual": r, "witness_vector": at}
    return _result(
        name, all_free and worst <= tol, {"max": worst}, {"max": tol}, wit
    )


def check_observable_net(
    ctx: ModelContext,
    specs,
    disjoint_pairs,
    tol: float = 1e-10,
) -> CheckResult:
    """Bilinears with disjoint total supports commute.

    specs: list of (s WeylElement, w1, w2); disjoint_pairs: index pairs
    expected to commute.  A product of two bilinears drives a level-1
    probe through level-4 intermediates, so the probes carry enough
    truncation headroom that nothing is chopped asymmetrically between
    the two orders.
    """
    module = ctx.module
    state = ctx.state
    ops = [observable(s, w1, w2) for s, w1, w2 in specs]
    vecs = [w for _, w1, w2 in specs for w in (w1, w2)]
    headroom = max(ctx.truncation, 1 + 3)
    probes = _witnesses_for(ctx, vecs, max_level=1, truncation=headroom)
    worst = 0.0
    wit = None
    for i, j in disjoint_pairs:
        r, at = _max_residual(commutator(ops[i], ops[j]), probes, state)
        if r > worst:
            worst = r
            if r > tol:
                wit = {"pair": [i, j], "residual": r, "witness_vector": at}
    return _result(
        "observable_net",
        worst <= tol,
        {"max": worst},
        {"max": tol},
        wit,
        {"effective_truncation": headroom},
    )


def check_gauge_invariance(ctx: ModelContext, specs, angles) -> CheckResult:
    """Gauge transforms fix each bilinear term by term, exactly."""
    ok = True
    wit = None
    for idx, (s, w1, w2) in enumerate(specs):
        op = observable(s, w1, w2)
        for theta in angles:
            z = cmath.exp(1j * float(theta))
            moved = gauge_transform(z, op)
            same = len(moved.terms) == len(op.terms) and all(
                s1 == s2 and p1 is p2
                for (s1, p1), (s2, p2) in zip(op.terms, moved.terms)
            )
            if not same:
                ok = False
                wit = {"observable": idx, "angle": float(theta)}
    return _result("gauge_invariance", ok, {}, {}, wit, {"exact": True})


def check_covariance_phase(
    ctx: ModelContext,
    pairs,
    tol: float = 1e-12,
) -> CheckResult:
    """Constant-kernel covariance: W(s) psi(w) = exp(-i <s0>) psi(w) W(s)
    and the phase-corrected W intertwines trivially."""
    module = ctx.module
    state = ctx.state
    worst = 0.0
    wit = None
    for w, k in pairs:
        mean = ctx.gens.pairs[k].integral_s0()
        phase = cmath.exp(-1j * mean)
        mono = WeylElement.monomial(module.gens, module.gens.unit(k))
        wop = weyl_mult(module, mono)
        psi = electron(w)
        probes = _witnesses_for(ctx, [w])
        direct = wop @ psi - phase * (psi @ wop)
        r1, _ = _max_residual(direct, probes, state)
        # alpha(W) = exp(+i <s0>) W restores plain commutation
        alpha = phase.conjugate() * wop
        inter = alpha @ psi - psi @ wop
        r2, _ = _max_residual(inter, probes, state)
        r = max(r1, r2)
        if r > worst:
            worst = r
            if r > tol:
                wit = {"generator": k, "residual": r}
    return _result("covariance_phase", worst <= tol, {"max": worst}, {"max": tol}, wit)


def check_neutral_commutant(
    ctx: ModelContext,
    pairs,
    tol: float = 1e-12,
) -> CheckResult:
    """Zero-mean generators commute with every matter field under the
    constant kernel."""
    module = ctx.module
    state = ctx.state
    worst = 0.0
    wit = None
    for w, k in pairs:
        mean = ctx.gens.pairs[k].integral_s0()
        if abs(mean) > 1e-12:
            return _result(
                "neutral_commutant",
                False,
                {"mean": abs(mean)},
                {"mean": 1e-12},
                {"generator": k, "problem": "nonzero_mean"},
            )
        mono = WeylElement.monomial(module.gens, module.gens.unit(k))
        op = commutator(weyl_mult(module, mono), electron(w))
        probes = _witnesses_for(ctx, [w])
        r, _ = _max_residual(op, probes, state)
        if r > worst:
            worst = r
            if r > tol:
                wit = {"generator": k, "residual": r}
    return _result("neutral_commutant", worst <= tol, {"max": worst}, {"max": tol}, wit)


def check_mutual_freeness(ctx: ModelContext, free_pairs, nonfree_pairs) -> CheckResult:
    """Operational freeness decisions match the support geometry."""
    free_pairs = list(free_pairs)
    nonfree_pairs = list(nonfree_pairs)
    ok = True
    wit = None
    worst = 0.0
    for idx, (f, g) in enumerate(free_pairs):
        rep = mutually_free(f, g)
        if not rep.free:
            ok = False
            r = max((x[3] for x in rep.failures), default=0.0)
            worst = max(worst, r)
            wit = {"pair": idx, "expected": "free", "residual": r}
    for idx, (f, g) in enumerate(nonfree_pairs):
        rep = mutually_free(f, g)
        if rep.free:
            ok = False
            wit = {"pair": idx, "expected": "nonfree"}
    return _result(
        "mutual_freeness",
        ok,
        {"false_free_residual": worst},
        {"false_free_residual": 1e-10},
        wit,
        {"free": len(free_pairs), "nonfree": len(nonfree_pairs)},
    )
