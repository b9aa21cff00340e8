"""Gibbs samplers for the probit, logit, multinomial logit and binomial
logit models.

Every sweep draws, in order: latent utilities given β, the working
parameters (when boosting), the Pólya-Gamma weights, and finally β
through `boost_move`. The order is fixed so that seeds reproduce.
"""

import logging
import time
from dataclasses import replace
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import logsumexp
from tqdm import trange

from .bayes_linear import (
    InvalidPriorError,
    draw_canonical,
    posterior_precision,
    precision_factor,
    prior_precision,
)
from .models import (
    Dataset,
    LatentState,
    ModelType,
    PolyaGammaParams,
    PosteriorDraws,
    PriorSpec,
    SamplerConfig,
    WeightedRegressionInput,
    WorkingParams,
    WorkingPrior,
)
from .randvar import (
    GLFamily,
    RngStream,
    draw_gen_logistic,
    draw_polya_gamma,
    draw_truncated_logistic,
    draw_truncated_normal,
)
from .validator import category_labels, default_baseline

logger = logging.getLogger(__name__)


class SamplerError(Exception):
    """Base exception for sampler errors."""
    pass


class InvalidStartError(SamplerError):
    """Raised when beta_start is missing or has the wrong shape."""
    pass


class LatentStateError(SamplerError):
    """Raised when a sweep leaves utilities violating their constraints."""
    pass


class WorkingParameterError(SamplerError):
    """Raised when a working scale draw is not strictly positive."""
    pass


StepFn = Callable[[LatentState, Dataset, PriorSpec, RngStream, Optional[WorkingPrior]], LatentState]


# ---------------------------------------------------------------------------
# Boosting
# ---------------------------------------------------------------------------

def working_prior_for(prior: PriorSpec, config: SamplerConfig) -> Optional[WorkingPrior]:
    """Working prior implied by the coefficient prior; None disables boosting."""
    if not config.boost:
        return None
    return WorkingPrior(
        gamma_variance=prior.G0 if prior.intercept_index is not None else 0.0,
        delta_shape=config.working_shape,
        delta_rate=config.working_rate,
    )


def draw_working_params(working_prior: Optional[WorkingPrior], rng: RngStream) -> WorkingParams:
    """Draw (gamma, delta) from the working prior; (0, 1) when boosting is off."""
    if working_prior is None:
        return WorkingParams()
    gamma = 0.0
    if working_prior.gamma_variance > 0:
        gamma = float(np.sqrt(working_prior.gamma_variance) * rng.generator.standard_normal())
    delta = float(rng.generator.gamma(working_prior.delta_shape, 1.0 / working_prior.delta_rate))
    return WorkingParams(gamma=gamma, delta=delta)


def _scale_applies(block: WeightedRegressionInput, lower: np.ndarray, upper: np.ndarray) -> bool:
    if np.any(block.offsets != 0):
        return False
    bounds = np.concatenate([lower, upper])
    return bool(np.all(bounds[np.isfinite(bounds)] == 0))


def boost_move(block: WeightedRegressionInput, lower: np.ndarray, upper: np.ndarray, prior: PriorSpec,
               working: WorkingParams, rng: RngStream,
               working_prior: Optional[WorkingPrior] = None) -> Tuple[np.ndarray, np.ndarray]:
    """在扩展空间中更新系数 (boosting)

    Runs the scale and location moves on the working response, then draws
    β. The scale move rescales the utilities by sqrt(delta_new / delta),
    with delta_new drawn given the utilities and β integrated out. The
    location move shifts the utilities and the intercept jointly by gamma
    drawn from its truncated conditional, and draws β given gamma. The
    location move runs only when the prior's intercept column of X is
    identically one.

    With working_prior None the working parameters are held at `working`
    and the call reduces to a plain conditional draw of β.

    Args:
        block: stacked regression block (X, utilities, ω, offsets)
        lower, upper: constraint bounds of each utility
        prior: PriorSpec
        working: WorkingParams drawn from the working prior this sweep
        rng: RngStream
        working_prior: WorkingPrior or None

    Returns:
        (beta, utilities) on the identified scale

    Raises:
        WorkingParameterError: the scale draw is not strictly positive
    """
    X, weights, offsets = block.X, block.weights, block.offsets
    response = block.response
    factor = precision_factor(posterior_precision(block, prior))
    n = X.shape[0]

    if working_prior is not None and n > 0 and _scale_applies(block, lower, upper):
        projected = solve_triangular(factor, X.T @ (weights * response), lower=True)
        residual = max(float(response @ (weights * response) - projected @ projected), 0.0)
        shape = working_prior.delta_shape + 0.5 * n
        rate = working_prior.delta_rate + 0.5 * residual / working.delta
        delta = float(rng.generator.gamma(shape, 1.0 / rate))
        if not delta > 0 or not np.isfinite(delta):
            raise WorkingParameterError(f"working scale draw {delta} is not positive")
        response = response * np.sqrt(delta / working.delta)

    # the shift by gamma is absorbed by beta[d] only if column d is all ones
    use_location = (
        working_prior is not None
        and n > 0
        and prior.intercept_index is not None
        and working_prior.gamma_variance > 0
        and bool(np.all(X[:, prior.intercept_index] == 1.0))
    )
    if not use_location:
        linear = X.T @ (weights * response + offsets)
        return draw_canonical(factor, linear, rng), response

    d = prior.intercept_index
    shifted = response - working.gamma
    linear = X.T @ (weights * shifted + offsets)
    coupling = prior_precision(prior)[:, d]
    gamma_prec = coupling[d] + 1.0 / working_prior.gamma_variance

    u = solve_triangular(factor, coupling, lower=True)
    h = solve_triangular(factor, linear, lower=True)
    marginal_prec = gamma_prec - u @ u
    marginal_mean = -(u @ h) / marginal_prec
    with np.errstate(invalid="ignore"):
        gamma_lo = float(np.max(lower - shifted))
        gamma_hi = float(np.min(upper - shifted))
    gamma = draw_truncated_normal(marginal_mean, 1.0 / np.sqrt(marginal_prec), gamma_lo, gamma_hi, rng)

    beta = draw_canonical(factor, linear - coupling * gamma, rng)
    beta[d] += gamma
    return beta, shifted + gamma


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

def _binary_bounds(y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    positive = y == 1
    lower = np.where(positive, 0.0, -np.inf)
    upper = np.where(positive, np.inf, 0.0)
    return lower, upper


def probit_step(state: LatentState, data: Dataset, prior: PriorSpec, rng: RngStream,
                working_prior: Optional[WorkingPrior] = None) -> LatentState:
    """Probit 单次扫描: z | β 截断正态, then β | z."""
    y = np.asarray(data.y, dtype=float)
    eta = data.X @ state.beta
    lower, upper = _binary_bounds(y)
    z = np.atleast_1d(draw_truncated_normal(eta, 1.0, lower, upper, rng))
    working = draw_working_params(working_prior, rng)
    omega = np.ones_like(z)
    beta, z = boost_move(WeightedRegressionInput(data.X, z, omega), lower, upper, prior,
                         working, rng, working_prior)
    return LatentState(beta=beta, z=z, omega=omega)


def logit_step(state: LatentState, data: Dataset, prior: PriorSpec, rng: RngStream,
               working_prior: Optional[WorkingPrior] = None) -> LatentState:
    """Logit 单次扫描

    z | β is logistic truncated by the sign of y, ω ~ PG(2, z − xβ), and
    β is drawn with weights ω and zero offsets.
    """
    y = np.asarray(data.y, dtype=float)
    eta = data.X @ state.beta
    lower, upper = _binary_bounds(y)
    z = np.atleast_1d(draw_truncated_logistic(eta, lower, upper, rng))
    working = draw_working_params(working_prior, rng)
    omega = np.atleast_1d(draw_polya_gamma(PolyaGammaParams(b=2.0, z=z - eta), rng))
    beta, z = boost_move(WeightedRegressionInput(data.X, z, omega), lower, upper, prior,
                         working, rng, working_prior)
    return LatentState(beta=beta, z=z, omega=omega)


def _race_utilities(log_rates: np.ndarray, winner: np.ndarray, rng: RngStream) -> np.ndarray:
    """Utilities of competing alternatives given the observed winner.

    Alternative l arrives after an Exp(λ_l) time T_l and has utility
    −log T_l; the winner arrives first at T* ~ Exp(Σλ) and each loser
    arrives T* + Exp(λ_l).

    Args:
        log_rates: (N, K) log λ; −inf marks an empty alternative
        winner: (N,) column index of the observed alternative

    Returns:
        (N, K) utilities
    """
    n, k = log_rates.shape
    rows = np.arange(n)
    log_total = logsumexp(log_rates, axis=1)
    log_first = np.log(rng.generator.standard_exponential(n)) - log_total
    with np.errstate(divide="ignore", invalid="ignore"):
        log_extra = np.log(rng.generator.standard_exponential((n, k))) - log_rates
        utilities = -np.logaddexp(log_first[:, None], log_extra)
    utilities[rows, winner] = -log_first
    return utilities


def mnl_step(state: LatentState, data: Dataset, prior: PriorSpec, rng: RngStream,
             working_prior: Optional[WorkingPrior] = None) -> LatentState:
    """多项 logit 单次扫描 (aggregated random utility model)

    Each non-baseline category k is updated in label order against the
    baseline and the aggregate of the remaining categories. The working
    response is u_k − max(u_0, u_a) shifted by its known location
    c = log(1 + λ_a), so it is logistic around xβ_k and constrained to
    (c, ∞) when k was chosen and (−∞, c) otherwise.
    """
    beta = np.array(state.beta, dtype=float)
    codes = data.category_codes
    base = data.baseline_index()
    n_labels = beta.shape[1]
    beta[:, base] = 0.0
    u_k = u_0 = u_a = omega = None

    for k in range(n_labels):
        if k == base:
            continue
        eta = data.X @ beta
        others = [c for c in range(n_labels) if c not in (k, base)]
        if others:
            log_rest = logsumexp(eta[:, others], axis=1)
        else:
            log_rest = np.full(data.n_obs, -np.inf)

        winner = np.where(codes == k, 0, np.where(codes == base, 1, 2))
        log_rates = np.column_stack([eta[:, k], np.zeros(data.n_obs), log_rest])
        utilities = _race_utilities(log_rates, winner, rng)
        u_k, u_0, u_a = utilities[:, 0], utilities[:, 1], utilities[:, 2]

        threshold = np.logaddexp(0.0, log_rest)
        response = u_k - np.maximum(u_0, u_a) + threshold
        chosen = codes == k
        lower = np.where(chosen, threshold, -np.inf)
        upper = np.where(chosen, np.inf, threshold)

        working = draw_working_params(working_prior, rng)
        omega = np.atleast_1d(draw_polya_gamma(PolyaGammaParams(b=2.0, z=response - eta[:, k]), rng))
        beta[:, k], _ = boost_move(WeightedRegressionInput(data.X, response, omega), lower, upper,
                                   prior, working, rng, working_prior)

    return LatentState(beta=beta, u_k=u_k, u_0=u_0, u_a=u_a, omega=omega)


def binomial_step(state: LatentState, data: Dataset, prior: PriorSpec, rng: RngStream,
                  working_prior: Optional[WorkingPrior] = None) -> LatentState:
    """二项 logit 单次扫描

    For y_i > 0 the utility w_i = xβ + ε with ε ~ GL-II(y_i) is drawn
    given w_i > 0; for y_i < N_i the utility v_i = xβ + ε with
    ε ~ GL-I(N_i − y_i) is drawn given v_i < 0. Both blocks are stacked
    into one weighted regression, with PG(ν + 1, ε) weights and the
    offsets of the exponential-tilt identity.
    """
    y = np.asarray(data.y, dtype=float)
    trials = np.asarray(data.Ni, dtype=float)
    X = data.X
    eta = X @ state.beta
    n = data.n_obs

    has_w = y > 0
    has_v = y < trials
    nu_w = y[has_w]
    nu_v = (trials - y)[has_v]

    eps_w = np.atleast_1d(draw_gen_logistic(GLFamily.TYPE_II, nu_w, -eta[has_w], np.inf, rng)) \
        if nu_w.size else np.empty(0)
    eps_v = np.atleast_1d(draw_gen_logistic(GLFamily.TYPE_I, nu_v, -np.inf, -eta[has_v], rng)) \
        if nu_v.size else np.empty(0)

    working = draw_working_params(working_prior, rng)

    omega_w = np.atleast_1d(draw_polya_gamma(PolyaGammaParams(b=nu_w + 1.0, z=eps_w), rng)) \
        if nu_w.size else np.empty(0)
    omega_v = np.atleast_1d(draw_polya_gamma(PolyaGammaParams(b=nu_v + 1.0, z=eps_v), rng)) \
        if nu_v.size else np.empty(0)

    # exponential tilt: κ = a − b/2; GL-II(ν) → (1 − ν)/2, GL-I(ν) → (ν − 1)/2
    kappa = np.concatenate([(1.0 - nu_w) / 2.0, (nu_v - 1.0) / 2.0])
    n_w = nu_w.size
    block = WeightedRegressionInput(
        X=np.vstack([X[has_w], X[has_v]]),
        response=np.concatenate([eta[has_w] + eps_w, eta[has_v] + eps_v]),
        weights=np.concatenate([omega_w, omega_v]),
        offsets=-kappa,
    )
    lower = np.concatenate([np.zeros(n_w), np.full(nu_v.size, -np.inf)])
    upper = np.concatenate([np.full(n_w, np.inf), np.zeros(nu_v.size)])
    beta, utilities = boost_move(block, lower, upper, prior, working, rng, working_prior)

    w = np.full(n, np.nan)
    v = np.full(n, np.nan)
    w[has_w] = utilities[:n_w]
    v[has_v] = utilities[n_w:]
    ow = np.full(n, np.nan)
    ov = np.full(n, np.nan)
    ow[has_w] = omega_w
    ov[has_v] = omega_v
    return LatentState(beta=beta, w=w, v=v, omega_w=ow, omega_v=ov)


STEPS: Dict[ModelType, StepFn] = {
    ModelType.PROBIT: probit_step,
    ModelType.LOGIT: logit_step,
    ModelType.MNL: mnl_step,
    ModelType.BINOMIAL: binomial_step,
}


# ---------------------------------------------------------------------------
# Invariants
# ---------------------------------------------------------------------------

def check_latent_state(model_type: ModelType, state: LatentState, data: Dataset) -> None:
    """Verify the constraints a sweep must leave behind.

    Raises:
        LatentStateError: on the first violated constraint
    """
    if not np.all(np.isfinite(state.beta)):
        raise LatentStateError("coefficient draw is not finite")

    if model_type in (ModelType.PROBIT, ModelType.LOGIT):
        y = np.asarray(data.y, dtype=float)
        if np.any((state.z > 0) != (y == 1)):
            raise LatentStateError("utility sign disagrees with the binary outcome")
        if np.any(~(state.omega > 0)):
            raise LatentStateError("mixing weights must be strictly positive")

    elif model_type is ModelType.MNL:
        base = data.baseline_index()
        if np.any(state.beta[:, base] != 0):
            raise LatentStateError("baseline coefficients must stay zero")
        if np.any(~(state.omega > 0)):
            raise LatentStateError("mixing weights must be strictly positive")
        last = max(c for c in range(state.beta.shape[1]) if c != base)
        codes = data.category_codes
        observed = np.where(codes == last, state.u_k, np.where(codes == base, state.u_0, state.u_a))
        best = np.max(np.column_stack([state.u_k, state.u_0, state.u_a]), axis=1)
        if np.any(observed < best):
            raise LatentStateError("observed alternative does not carry the maximum utility")

    else:
        y = np.asarray(data.y, dtype=float)
        trials = np.asarray(data.Ni, dtype=float)
        if np.any(~(state.w[y > 0] > 0)) or np.any(~(state.v[y < trials] < 0)):
            raise LatentStateError("binomial utilities violate w > 0 / v < 0")
        weights = np.concatenate([state.omega_w[y > 0], state.omega_v[y < trials]])
        if np.any(~(weights > 0)):
            raise LatentStateError("mixing weights must be strictly positive")


# ---------------------------------------------------------------------------
# Chains
# ---------------------------------------------------------------------------

def _prepare(model_type: ModelType, data: Dataset) -> Dataset:
    if model_type is not ModelType.MNL:
        return data
    labels = data.category_labels or category_labels(data.y)
    baseline = data.baseline if data.baseline is not None else default_baseline(data.y)
    return replace(data, category_labels=list(labels), baseline=baseline)


def _start_shape(model_type: ModelType, data: Dataset) -> Tuple[int, ...]:
    if model_type is ModelType.MNL:
        return (data.n_coef, len(data.category_labels))
    return (data.n_coef,)


def _initial_beta(model_type: ModelType, data: Dataset, beta_start: Optional[np.ndarray]) -> np.ndarray:
    shape = _start_shape(model_type, data)
    if beta_start is None:
        return np.zeros(shape)
    beta = np.array(beta_start, dtype=float)
    if model_type is ModelType.MNL and beta.shape == (shape[0], shape[1] - 1):
        beta = np.insert(beta, data.baseline_index(), 0.0, axis=1)
    if beta.shape != shape:
        raise InvalidStartError(f"beta_start has shape {beta.shape}, expected {shape}")
    if not np.all(np.isfinite(beta)):
        raise InvalidStartError("beta_start must be finite")
    if model_type is ModelType.MNL:
        beta[:, data.baseline_index()] = 0.0
    return beta


def single_draw(model_type: ModelType, data: Dataset, prior: PriorSpec, beta_start: np.ndarray,
                rng: RngStream, config: Optional[SamplerConfig] = None) -> np.ndarray:
    """单次 Gibbs 扫描, for use as a block inside another sampler.

    Args:
        model_type: ModelType
        data: validated Dataset
        prior: PriorSpec
        beta_start: current coefficients; (d,) or, for MNL, (d, categories)
            or (d, categories - 1)
        rng: RngStream owned by the caller
        config: optional SamplerConfig for the boosting settings

    Returns:
        The new coefficient draw, same layout as run_chain's rows

    Raises:
        InvalidStartError: beta_start missing or of the wrong shape
    """
    if beta_start is None:
        raise InvalidStartError("single_draw requires beta_start")
    config = config or SamplerConfig()
    data = _prepare(model_type, data)
    beta = _initial_beta(model_type, data, beta_start)
    state = STEPS[model_type](LatentState(beta=beta), data, prior, rng, working_prior_for(prior, config))
    if config.debug:
        check_latent_state(model_type, state, data)
    return state.beta


def run_chain(model_type: ModelType, data: Dataset, prior: PriorSpec, config: SamplerConfig,
              rng: Optional[RngStream] = None) -> PosteriorDraws:
    """运行一条 Gibbs 链

    Discards `burnin` sweeps and saves `draws` sweeps.

    Args:
        model_type: ModelType
        data: validated Dataset
        prior: PriorSpec
        config: SamplerConfig
        rng: optional RngStream; defaults to a stream seeded by config.seed

    Returns:
        PosteriorDraws with the wall-clock sampling time and the seed used
    """
    logger.info("Checking data & inputs ...")
    if not config.is_valid():
        raise SamplerError(f"invalid sampler configuration: {config}")
    if not prior.is_valid():
        raise InvalidPriorError(f"invalid prior: {prior}")
    if prior.coef_dim != data.n_coef:
        raise SamplerError(f"prior dimension {prior.coef_dim} does not match {data.n_coef} columns")
    rng = rng or RngStream(config.seed)
    data = _prepare(model_type, data)

    logger.info("Initializing Gibbs sampler ...")
    state = LatentState(beta=_initial_beta(model_type, data, config.beta_start))
    working_prior = working_prior_for(prior, config)
    step = STEPS[model_type]
    saved = np.empty((config.draws,) + state.beta.shape)

    logger.info("Simulating from posterior distribution ...")
    total = config.burnin + config.draws
    start = time.perf_counter()
    for it in trange(total, disable=not config.verbose, desc=model_type.title, leave=False):
        state = step(state, data, prior, rng, working_prior)
        if config.debug:
            check_latent_state(model_type, state, data)
            logger.debug("sweep %d constraints ok", it)
        if it >= config.burnin:
            saved[it - config.burnin] = state.beta
    runtime = time.perf_counter() - start
    logger.info("Sampling successful, took %.2f seconds", runtime)

    return PosteriorDraws(
        model_type=model_type,
        beta=saved,
        coef_names=list(data.column_names),
        draws=config.draws,
        burnin=config.burnin,
        seed=rng.seed,
        runtime_seconds=runtime,
        category_labels=list(data.category_labels) if model_type is ModelType.MNL else None,
        baseline=data.baseline if model_type is ModelType.MNL else None,
        n_obs=data.n_obs,
    )


def run_chains(model_type: ModelType, data: Dataset, prior: PriorSpec, config: SamplerConfig,
               n_chains: int) -> List[PosteriorDraws]:
    """Independent chains on non-overlapping sub-streams of config.seed."""
    root = RngStream(config.seed)
    return [run_chain(model_type, data, prior, config, rng=stream) for stream in root.spawn(n_chains)]
