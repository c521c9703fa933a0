"""Module for the worked example models and their demo runs"""

import logging
from typing import Callable, Dict, Optional, Tuple

from app.config import DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TRIALS
from modules import profinite
from modules.realspan import FINITE, LAURENT, SpanElement, inv_pi_minus_one, rational, sqrt_rational
from modules.rigidity import decide_rigidity, doubling_witness, verify_automorphism
from modules.zgroup import ORDERED, UNORDERED, DDimension, LGenerator, Model, ModelSpec, build_model
from utils.errors import UnknownDemo

logger = logging.getLogger(__name__)

ProgressCallback = Optional[Callable[[float, str], None]]

ZERO = SpanElement()


def _u() -> profinite.ProfiniteElement:
    """The idempotent with 2-adic coordinate 1 and every other coordinate 0"""
    return profinite.from_prime_component(2, 1, 0)


def exm_spec(mode: str = ORDERED) -> ModelSpec:
    """D = Q*d0 valued in Q, L generated by u valued in Q*sqrt(2)"""
    return ModelSpec(
        mode=mode,
        span_structure=FINITE,
        d_basis=(DDimension("d0", rational(1), ZERO),),
        l_generators=(LGenerator("u", _u(), sqrt_rational(2), ZERO),),
    )


def laurent_spec(l_value: Optional[SpanElement] = None) -> ModelSpec:
    """D spanned by the powers of pi, L generated by u valued at 1/(pi - 1) by default"""
    return ModelSpec(
        mode=ORDERED,
        span_structure=LAURENT,
        l_generators=(LGenerator("u", _u(), l_value if l_value is not None else inv_pi_minus_one(), ZERO),),
    )


def d_shift_spec() -> ModelSpec:
    return ModelSpec(
        d_basis=(DDimension("d0", rational(1), ZERO),),
        l_generators=(LGenerator("u", _u(), ZERO, sqrt_rational(2)),),
    )


def l_translate_spec() -> ModelSpec:
    return ModelSpec(
        d_basis=(DDimension("d0", ZERO, rational(1)),),
        l_generators=(LGenerator("u", _u(), sqrt_rational(2), ZERO),),
    )


def non_archimedean_spec() -> ModelSpec:
    return ModelSpec(
        d_basis=(DDimension("d0", rational(1), ZERO), DDimension("d1", ZERO, rational(1))),
        l_generators=(LGenerator("u", _u(), sqrt_rational(2), ZERO),),
    )


def g_exm(mode: str = ORDERED) -> Model:
    return build_model(exm_spec(mode))


def g_laurent() -> Model:
    return build_model(laurent_spec())


def _verdict_demo(name: str, model: Model, samples: int, seed: int, progress_callback: ProgressCallback) -> dict:
    logger.info("running demo %s", name)
    verdict = decide_rigidity(model, samples=samples, seed=seed, progress_callback=progress_callback)
    return {"demo": name, "model": model.describe(), "verdict": verdict.to_json()}


def run_exm_exist(samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                  progress_callback: ProgressCallback = None) -> dict:
    return _verdict_demo("exm-exist", g_exm(), samples, seed, progress_callback)


def run_exm_mult(samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                 progress_callback: ProgressCallback = None) -> dict:
    return _verdict_demo("exm-mult", g_laurent(), samples, seed, progress_callback)


def run_unordered_nonrigid(samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                           progress_callback: ProgressCallback = None) -> dict:
    """Doubling is an automorphism of the unordered group but breaks the order"""
    out = _verdict_demo("unordered-nonrigid", g_exm(UNORDERED), samples, seed, progress_callback)
    ordered = g_exm(ORDERED)
    report = verify_automorphism(ordered, doubling_witness(ordered), samples, DEFAULT_TRIALS, seed=seed)
    out["doubling_in_ordered_model"] = report.to_json()
    return out


def run_d_shift(samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                progress_callback: ProgressCallback = None) -> dict:
    return _verdict_demo("d-shift", build_model(d_shift_spec()), samples, seed, progress_callback)


def run_l_translate(samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                    progress_callback: ProgressCallback = None) -> dict:
    return _verdict_demo("l-translate", build_model(l_translate_spec()), samples, seed, progress_callback)


def run_laurent_sqrt2(samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                      progress_callback: ProgressCallback = None) -> dict:
    model = build_model(laurent_spec(sqrt_rational(2)))
    return _verdict_demo("laurent-sqrt2", model, samples, seed, progress_callback)


DEMOS: Dict[str, Tuple[str, Callable[..., dict]]] = {
    "exm-exist": ("Rigid model: D'' = Q, L'' = Q*sqrt(2)", run_exm_exist),
    "exm-mult": ("Laurent model with L'' = Q/(pi - 1); f_pi is a witness", run_exm_mult),
    "unordered-nonrigid": ("Unordered model; doubling D is a witness", run_unordered_nonrigid),
    "d-shift": ("L below level 1; doubling the level-1 D block", run_d_shift),
    "l-translate": ("D at level 2 only; u -> u + d0", run_l_translate),
    "laurent-sqrt2": ("Laurent model with L'' = Q*sqrt(2); no small gamma", run_laurent_sqrt2),
}


def run_demo(name: str, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
             progress_callback: ProgressCallback = None) -> dict:
    if name not in DEMOS:
        raise UnknownDemo(f"unknown demo {name!r}; choose from {sorted(DEMOS)}")
    return DEMOS[name][1](samples=samples, seed=seed, progress_callback=progress_callback)
