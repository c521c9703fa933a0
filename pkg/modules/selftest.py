"""Module for the acceptance self-test

Each criterion is a function (samples, seed) -> (passed, detail). The runner
collects them into a DataFrame; `run.py selftest` exits 0 only when every row
passed.
"""

import itertools
import logging
import time
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from app.config import (
    ADVERSARIAL_CANDIDATES,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    FORMULA_COUNT,
    FORMULA_GRID,
    FORMULA_GUARD,
    UNBOUNDED_FORMULA_COUNT,
    UNBOUNDED_FREE,
    UNBOUNDED_GRID,
)
from modules import profinite
from modules.demos import g_exm, g_laurent
from modules.formulas import parse
from modules.presburger import (
    eliminate_quantifiers,
    eval_bounded,
    eval_outer_unbounded,
    eval_qf_int,
    eval_qf_model,
    normalize,
)
from modules.realspan import GammaDescriptor
from modules.rigidity import (
    GH,
    NON_RIGID,
    RIGID,
    FGamma,
    adversarial_search,
    decide_rigidity,
    doubling_witness,
    verify_automorphism,
)
from modules.zgroup import UNORDERED, SameType
from utils.formula_gen import random_body, random_formula

logger = logging.getLogger(__name__)

Outcome = Tuple[bool, str]
ProgressCallback = Optional[Callable[[float, str], None]]


def check_qe_soundness(samples: int, seed: int) -> Outcome:
    rng = np.random.default_rng(seed)
    for index in range(FORMULA_COUNT):
        f = random_formula(rng)
        qf = normalize(eliminate_quantifiers(f))
        for x in range(-FORMULA_GRID, FORMULA_GRID + 1):
            if eval_qf_int(qf, {"x": x}) != eval_bounded(f, {"x": x}, FORMULA_GUARD):
                return False, f"formula {index}: {f} disagrees with its elimination at x = {x}"
    for index in range(UNBOUNDED_FORMULA_COUNT):
        free = UNBOUNDED_FREE[: int(rng.integers(1, len(UNBOUNDED_FREE), endpoint=True))]
        f = random_formula(rng, free, max_bound=1, unbounded_outer=True)
        qf = normalize(eliminate_quantifiers(f))
        if parse(str(qf)) != qf:
            return False, f"unbounded formula {index}: elimination of {f} does not re-parse"
        for point in itertools.product(range(-UNBOUNDED_GRID, UNBOUNDED_GRID + 1), repeat=len(free)):
            sigma = dict(zip(free, point))
            if eval_qf_int(qf, sigma) != eval_outer_unbounded(f, sigma, FORMULA_GUARD):
                return False, f"unbounded formula {index}: {f} disagrees with its elimination at {sigma}"
    return True, (
        f"{FORMULA_COUNT} guarded formulas agree on [-{FORMULA_GRID}, {FORMULA_GRID}]; "
        f"{UNBOUNDED_FORMULA_COUNT} unbounded ones on [-{UNBOUNDED_GRID}, {UNBOUNDED_GRID}]^k"
    )


def check_profinite_structure(samples: int, seed: int) -> Outcome:
    rng = np.random.default_rng(seed)
    one = profinite.from_integer(1)
    for _ in range(samples):
        x = profinite.random_element(rng)
        for p in (2, 3, 5, 7):
            hits = [i for i in range(p) if profinite.is_divisible(x + i, p)]
            if len(hits) != 1:
                return False, f"{x}: shifts divisible by {p} are {hits}"
            if profinite.is_divisible(one, p):
                return False, f"1 is divisible by {p}"
    return True, f"{samples} elements, primes 2, 3, 5, 7"


def check_group_axioms(samples: int, seed: int) -> Outcome:
    rng = np.random.default_rng(seed)
    for model in (g_exm(), g_laurent()):
        xs = model.random_elements(rng, samples)
        zero, one = model.zero(), model.one()
        for i, x in enumerate(xs):
            y, z = xs[(i + 1) % len(xs)], xs[(i + 2) % len(xs)]
            c = model.compare(x, y)
            if c != -model.compare(y, x) or (c == 0) != (x == y):
                return False, f"order is not total at {model.element_text(x)}, {model.element_text(y)}"
            if model.compare(x + z, y + z) != c:
                return False, f"order is not translation invariant at {model.element_text(x)}"
            if model.compare(x, zero) > 0 and model.compare(x, one) < 0:
                return False, f"{model.element_text(x)} lies strictly between 0 and 1"
            for p in (2, 3, 5, 7):
                k, q = model.divide_by_p_with_remainder(x, p)
                if not 0 <= k < p or q.scale(p) + model.from_int(k) != x:
                    return False, f"division of {model.element_text(x)} by {p} does not round-trip"
    return True, f"{samples} elements in each of the two models"


def check_separation(samples: int, seed: int) -> Outcome:
    rng = np.random.default_rng(seed)
    model = g_exm()
    a = model.d_unit("d0")
    b = a.scale(2)
    if not isinstance(model.separate(a, b), SameType):
        return False, "d0 and 2*d0 were separated"
    for _ in range(20):
        f = normalize(random_body(rng, ["v"], []))
        if eval_qf_model(f, model, {"v": a}) != eval_qf_model(f, model, {"v": b}):
            return False, f"{f} distinguishes d0 from 2*d0"
    xs = model.random_elements(rng, samples) + model.spanning_elements()
    for i, x in enumerate(xs):
        y = xs[(i * 7 + 3) % len(xs)]
        if x == y:
            continue
        witness = model.separate(x, y)
        if isinstance(witness, SameType):
            continue
        f = witness.formula("v")
        if not eval_qf_model(f, model, {"v": x}) or eval_qf_model(f, model, {"v": y}):
            return False, f"{f} does not separate {model.element_text(x)} from {model.element_text(y)}"
    return True, "d0 ~ 2*d0 on 20 formulas; every separating formula checked"


def check_laurent_witness(samples: int, seed: int) -> Outcome:
    model = g_laurent()
    verdict = decide_rigidity(model, samples=samples, seed=seed)
    if verdict.status != NON_RIGID:
        return False, f"verdict {verdict.status}: {verdict.justification}"
    witness = verdict.witness
    if not isinstance(witness, FGamma) or witness.gamma != GammaDescriptor(1, 1):
        return False, f"unexpected witness {witness.describe()}"
    report = verdict.report
    if not report.passed or not report.non_identity:
        return False, f"verification failed: {report.failed_checks()}"
    return True, f"NonRigid with gamma = pi; {report.samples} samples verified"


def check_rigid_model(samples: int, seed: int) -> Outcome:
    model = g_exm()
    verdict = decide_rigidity(model, samples=samples, seed=seed)
    if verdict.status != RIGID:
        return False, f"verdict {verdict.status}"
    result = adversarial_search(model, candidates=ADVERSARIAL_CANDIDATES, seed=seed)
    if not result.found_none:
        return False, f"candidates passed: {result.passing['description'].tolist()[:3]}"
    return True, f"Rigid; {result.candidates} adversarial candidates rejected"


def check_unordered_doubling(samples: int, seed: int) -> Outcome:
    verdict = decide_rigidity(g_exm(UNORDERED), samples=samples, seed=seed)
    if verdict.status != NON_RIGID or not isinstance(verdict.witness, GH):
        return False, f"verdict {verdict.status}"
    ordered = g_exm()
    report = verify_automorphism(ordered, doubling_witness(ordered), samples, seed=seed)
    if report.passed or "order" not in report.failed_checks():
        return False, "doubling preserved the order of the ordered model"
    return True, "doubling verified unordered and rejected on order"


def check_decomposition(samples: int, seed: int) -> Outcome:
    rng = np.random.default_rng(seed)
    model = g_exm()
    for x in model.random_elements(rng, samples):
        d, l = model.decompose(x)
        if d + l != x:
            return False, f"{model.element_text(x)} does not re-sum"
        for n in range(2, 101):
            if model.residue_elem(d, n) != 0 or model.residue_elem(l, n) != model.residue_elem(x, n):
                return False, f"residue mod {n} of the parts of {model.element_text(x)}"
    return True, f"{samples} elements, moduli up to 100"


def check_gamma_inverse(samples: int, seed: int) -> Outcome:
    rng = np.random.default_rng(seed)
    model = g_laurent()
    forward, backward = FGamma(GammaDescriptor(1, 1)), FGamma(GammaDescriptor(1, -1))
    for x in model.random_elements(rng, samples):
        if backward.apply(model, forward.apply(model, x)) != x:
            return False, f"f_(1/pi)(f_pi(x)) != x at {model.element_text(x)}"
    return True, f"{samples} samples"


CRITERIA: Dict[int, Tuple[str, Callable[[int, int], Outcome]]] = {
    1: ("quantifier elimination soundness", check_qe_soundness),
    2: ("profinite integers: one shift divisible by p", check_profinite_structure),
    3: ("Z-group axioms in the example models", check_group_axioms),
    4: ("separation by one-variable formulas", check_separation),
    5: ("Laurent model is not rigid (gamma = pi)", check_laurent_witness),
    6: ("finite-span model is rigid", check_rigid_model),
    7: ("unordered doubling breaks the order", check_unordered_doubling),
    8: ("D + L decomposition", check_decomposition),
    9: ("f_gamma inverse law", check_gamma_inverse),
}


def run_selftest(
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    only: Optional[Sequence[int]] = None,
    progress_callback: ProgressCallback = None,
) -> pd.DataFrame:
    """Run the acceptance criteria and summarise them"""
    selected: List[int] = sorted(only) if only else sorted(CRITERIA)
    rows = []
    for index, number in enumerate(selected):
        title, check = CRITERIA[number]
        if progress_callback:
            progress_callback(index / len(selected), f"criterion {number}: {title}")
        start = time.perf_counter()
        try:
            passed, detail = check(samples, seed)
        except Exception as exc:
            logger.exception("criterion %d raised", number)
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        rows.append({
            "criterion": number,
            "title": title,
            "passed": passed,
            "detail": detail,
            "seconds": round(time.perf_counter() - start, 2),
        })
    if progress_callback:
        progress_callback(1.0, "selftest complete")
    return pd.DataFrame(rows)
