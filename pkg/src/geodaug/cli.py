"""Command-line experiment drivers.

Every command resolves a flat key=value configuration (defaults < config file
< flags), echoes the resolved configuration as `# key=value` comment lines at
the top of every output CSV, and is bit-deterministic given seed and config.
Numeric CSV fields use 17-significant-digit formatting.

Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 check failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from typing import Dict, List, Optional, Sequence

import numpy as np

from ._rng import spawn_rngs
from .augment import AugmentConfig, augment_batches, read_augmented_csv, write_augmented_csv
from .barycentric import estimate_map
from .classifier import (
    LinearClassifier,
    TrainConfig,
    fgsm_attack,
    load_classifier,
    mean_estimator,
    save_classifier,
    train,
)
from .embedding import AffineEmbedding
from .entropic import cost_matrix, entropic_cost, sinkhorn
from .gaussian_ot import gaussian_geodesic, gaussian_monge_map, w2_gaussian
from .geodesic_reg import performance_geodesic, smoothness_regularizer
from .measures import (
    ConditionalGaussianModel,
    DiscreteMeasure,
    GaussianParams,
    LabeledDataset,
    load_csv,
    sample_conditional_gaussian,
    split_by_class,
)
from .oracles import exact_ot_cost_lp, exact_ot_cost_permutations
from .robustness import (
    dro_worst_case_check,
    linf_robust_error,
    monte_carlo_error,
    q_function,
    robustness_gain_trial,
    smoothed_error,
    standard_error,
    write_trials_csv,
)
from .validation import CsvFormatError, NumericalError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_CHECK_FAILED = 4


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# configuration plumbing


def _parse_scalar(raw: str, like, key: str):
    if isinstance(like, bool):
        lowered = raw.strip().lower()
        if lowered in ("1", "true", "yes"):
            return True
        if lowered in ("0", "false", "no"):
            return False
        raise UsageError(f"config key {key!r} expects a boolean, got {raw!r}")
    try:
        if isinstance(like, int) and not isinstance(like, bool):
            return int(raw)
        if isinstance(like, float):
            return float(raw)
    except ValueError:
        raise UsageError(f"config key {key!r} expects {type(like).__name__}, got {raw!r}") from None
    return raw


def load_config_file(path: str) -> Dict[str, str]:
    values: Dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                stripped = line.strip()
                if not stripped or stripped.startswith("#"):
                    continue
                if "=" not in stripped:
                    raise UsageError(f"{path}:{line_no}: expected key=value, got {stripped!r}")
                key, _, value = stripped.partition("=")
                values[key.strip()] = value.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    return values


def resolve_config(defaults: Dict, args: argparse.Namespace) -> Dict:
    resolved = dict(defaults)
    file_values = load_config_file(args.config) if args.config else {}
    for key, raw in file_values.items():
        if key not in defaults:
            raise UsageError(f"unknown config key {key!r}")
        resolved[key] = _parse_scalar(raw, defaults[key], key)
    for key in defaults:
        raw = getattr(args, key.replace("-", "_"), None)
        if raw is not None:
            resolved[key] = _parse_scalar(raw, defaults[key], key)
    resolved["seed"] = int(args.seed)
    resolved["out"] = args.out
    return resolved


def parse_float_list(raw, key: str) -> List[float]:
    try:
        values = [float(tok) for tok in str(raw).split(",") if tok.strip() != ""]
    except ValueError:
        raise UsageError(f"config key {key!r} expects a comma-separated list of numbers") from None
    if not values:
        raise UsageError(f"config key {key!r} must not be empty")
    return values


def parse_int_list(raw, key: str) -> List[int]:
    return [int(v) for v in parse_float_list(raw, key)]


def _fmt(value) -> str:
    if isinstance(value, bool) or isinstance(value, (np.bool_,)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def config_header(cfg: Dict) -> List[str]:
    # The output directory is location metadata, not part of the experiment:
    # leaving it out keeps fixed-seed runs byte-identical across directories.
    return [f"{key}={_fmt(cfg[key])}" for key in sorted(cfg) if key != "out"]


def write_csv(path: str, header_lines: Sequence[str], columns: Sequence[str], rows) -> None:
    """Write atomically: temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _outpath(cfg: Dict, name: str) -> str:
    return os.path.join(cfg["out"], name)


def _unit_mu(dim: int, mu_norm: float) -> np.ndarray:
    mu = np.zeros(dim)
    mu[0] = mu_norm
    return mu


# --------------------------------------------------------------------------
# commands

THEOREM1_DEFAULTS = dict(
    dim=10,
    mu_norm=1.0,
    sigma=1.0,
    n0=20,
    n1_grid="200",
    r_grid="0.9",
    eps=0.1,
    trials=1000,
    route="analytic",
    sinkhorn_eps=0.01,
)


def cmd_theorem1(cfg: Dict) -> int:
    model = ConditionalGaussianModel(_unit_mu(cfg["dim"], cfg["mu_norm"]), cfg["sigma"])
    r_values = parse_float_list(cfg["r_grid"], "r_grid")
    n1_values = parse_int_list(cfg["n1_grid"], "n1_grid")
    cells = [(r, n1) for r in r_values for n1 in n1_values]
    cell_seeds = np.random.SeedSequence(cfg["seed"]).spawn(len(cells))
    header = config_header(cfg)
    cell_rows = []
    all_trials = []
    for (r, n1), cell_seed in zip(cells, cell_seeds):
        trial_seeds = cell_seed.spawn(cfg["trials"])
        trials = [
            robustness_gain_trial(
                model, cfg["n0"], n1, r, cfg["eps"], s, route=cfg["route"], sinkhorn_eps=cfg["sinkhorn_eps"]
            )
            for s in trial_seeds
        ]
        freq = float(np.mean([t.improved for t in trials]))
        gap = float(np.mean([t.pe_orig - t.pe_aug for t in trials]))
        cell_rows.append([r, n1, cfg["trials"], freq, gap])
        all_trials.extend(trials)
    write_csv(
        _outpath(cfg, "theorem1_cells.csv"),
        header,
        ["r", "n1", "trials", "improve_freq", "mean_gap"],
        cell_rows,
    )
    trial_rows = [
        [k, t.n0, t.n1, t.r, t.eps, t.pe_orig, t.pe_aug, int(t.improved)]
        for k, t in enumerate(all_trials)
    ]
    write_csv(
        _outpath(cfg, "theorem1_trials.csv"),
        header,
        ["trial", "n0", "n1", "r", "eps", "pe_orig", "pe_aug", "improved"],
        trial_rows,
    )
    return EXIT_OK


CURVE_DEFAULTS = dict(
    dim=2,
    mu_norm=1.0,
    sigma=1.0,
    n_per_class=400,
    sinkhorn_eps=0.01,
    t_count=21,
    loss="logistic",
    lambda2=0.05,
    alpha_reg=5.0,
    steps=2000,
    learning_rate=0.1,
    batch_size=64,
    magnification=1.0,
)


def cmd_curve(cfg: Dict) -> int:
    model = ConditionalGaussianModel(_unit_mu(cfg["dim"], cfg["mu_norm"]), cfg["sigma"])
    data = sample_conditional_gaussian(model, 2 * cfg["n_per_class"], cfg["seed"])
    base_cfg = dict(
        loss=cfg["loss"], lambda2=cfg["lambda2"], steps=cfg["steps"], learning_rate=cfg["learning_rate"]
    )
    erm = train(data, None, TrainConfig(**base_cfg))
    erm_reg = train(data, None, TrainConfig(alpha_reg=cfg["alpha_reg"], **base_cfg))
    aug_cfg = AugmentConfig(
        batch_size=min(cfg["batch_size"], cfg["n_per_class"]),
        magnification=cfg["magnification"],
        t_count=cfg["t_count"],
        eps=cfg["sinkhorn_eps"],
        loss=cfg["loss"],
    )
    batches = augment_batches(data, erm, aug_cfg, seed=cfg["seed"] + 1)
    erm_da = train(data, batches, TrainConfig(**base_cfg))
    erm_da_reg = train(data, batches, TrainConfig(alpha_reg=cfg["alpha_reg"], **base_cfg))

    measures = split_by_class(data)
    bmap = estimate_map(measures[-1], measures[1], eps=cfg["sinkhorn_eps"])
    grid = np.linspace(0.0, 1.0, cfg["t_count"])
    strategies = [("erm", erm), ("erm_reg", erm_reg), ("erm_da", erm_da), ("erm_da_reg", erm_da_reg)]
    curves = {
        name: performance_geodesic(clf, bmap, (-1, 1), cfg["loss"], grid) for name, clf in strategies
    }
    header = config_header(cfg)
    rows = [
        [t] + [curves[name].losses[k] for name, _ in strategies] for k, t in enumerate(grid)
    ]
    write_csv(
        _outpath(cfg, "curve.csv"),
        header,
        ["t"] + [f"loss_{name}" for name, _ in strategies],
        rows,
    )
    summary = []
    for name, clf in strategies:
        reg_value = smoothness_regularizer(clf, bmap, (-1, 1), cfg["loss"], grid)
        summary.append([name, reg_value, standard_error(model, LinearClassifier(clf.theta))])
    write_csv(
        _outpath(cfg, "curve_summary.csv"),
        header,
        ["strategy", "reg_value", "analytic_standard_error"],
        summary,
    )
    return EXIT_OK


AUGMENT_DEFAULTS = dict(
    batch_size=64,
    magnification=1.0,
    t_mode="grid",
    t_count=21,
    eps=0.01,
    embedding_dim=0,
    loss="logistic",
)


def cmd_augment(cfg: Dict, data_path: str, model_path: Optional[str]) -> int:
    data = load_csv(data_path)
    if np.unique(data.labels).size < 2:
        raise UsageError("augmentation needs a dataset with at least 2 classes")
    if model_path:
        classifier = load_classifier(model_path)
    elif data.is_binary:
        classifier = mean_estimator(data)
    else:
        raise UsageError("--model is required for datasets with non-binary labels")
    embedding = None
    if cfg["embedding_dim"] > 0:
        embedding = AffineEmbedding(cfg["embedding_dim"]).fit(data.features)
    config = AugmentConfig(
        batch_size=cfg["batch_size"],
        magnification=cfg["magnification"],
        t_mode=cfg["t_mode"],
        t_count=cfg["t_count"],
        eps=cfg["eps"],
        loss=cfg["loss"],
    )
    batches = augment_batches(data, classifier, config, embedding=embedding, seed=cfg["seed"])
    os.makedirs(cfg["out"], exist_ok=True)
    write_augmented_csv(batches, data.dim, _outpath(cfg, "augmented.csv"), config_header(cfg))
    return EXIT_OK


TRAIN_DEFAULTS = dict(
    loss="logistic",
    lambda1=0.0,
    lambda2=0.0,
    alpha_reg=0.0,
    steps=2000,
    learning_rate=0.1,
)


def _load_augmented_any(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                continue
            header = line.strip().split(",")
            break
        else:
            raise UsageError(f"augmented file {path} is empty")
    if header[-4:] == ["soft_label", "hard_label", "t", "pair_id"]:
        return read_augmented_csv(path)
    return load_csv(path)


def cmd_train(cfg: Dict, data_path: str, augmented_path: Optional[str]) -> int:
    data = load_csv(data_path)
    augmented = _load_augmented_any(augmented_path) if augmented_path else None
    config = TrainConfig(
        loss=cfg["loss"],
        lambda1=cfg["lambda1"],
        lambda2=cfg["lambda2"],
        alpha_reg=cfg["alpha_reg"],
        steps=cfg["steps"],
        learning_rate=cfg["learning_rate"],
        seed=cfg["seed"],
    )
    classifier = train(data, augmented, config)
    os.makedirs(cfg["out"], exist_ok=True)
    path = _outpath(cfg, "model.csv")
    fd, tmp = tempfile.mkstemp(dir=cfg["out"], suffix=".tmp")
    os.close(fd)
    save_classifier(classifier, tmp)
    with open(tmp, "r", encoding="utf-8") as fh:
        body = fh.read()
    with open(tmp, "w", encoding="utf-8") as fh:
        for line in config_header(cfg):
            fh.write(f"# {line}\n")
        fh.write(body)
    os.replace(tmp, path)
    return EXIT_OK


EVAL_DEFAULTS = dict(
    eps=0.1,
    sigma_s=0.0,
)


def cmd_eval(cfg: Dict, data_path: str, model_path: str) -> int:
    data = load_csv(data_path)
    classifier = load_classifier(model_path)
    labels = data.require_binary()
    preds = classifier.predict(data.features)
    rows = [["standard_error", float(np.mean(preds != labels))]]
    attacked = fgsm_attack(classifier, data.features, labels, cfg["eps"])
    rows.append([f"fgsm_error_eps={_fmt(cfg['eps'])}", float(np.mean(classifier.predict(attacked) != labels))])
    if cfg["sigma_s"] > 0:
        rng = spawn_rngs(cfg["seed"], 1)[0]
        noisy = data.features + cfg["sigma_s"] * rng.standard_normal(data.features.shape)
        rows.append(
            [f"noise_error_sigma={_fmt(cfg['sigma_s'])}", float(np.mean(classifier.predict(noisy) != labels))]
        )
    write_csv(_outpath(cfg, "eval.csv"), config_header(cfg), ["metric", "value"], rows)
    return EXIT_OK


DRO_DEFAULTS = dict(
    dim=10000,
    mu_norm=1.0,
    sigma=1.0,
    eps_grid="0.1,0.3",
    grid=201,
)


def cmd_dro_check(cfg: Dict) -> int:
    model = ConditionalGaussianModel(_unit_mu(cfg["dim"], cfg["mu_norm"]), cfg["sigma"])
    rows = []
    for eps in parse_float_list(cfg["eps_grid"], "eps_grid"):
        result = dro_worst_case_check(model, eps, grid=cfg["grid"])
        s_expected = 1.0 - eps / cfg["mu_norm"]
        error_expected = q_function((1.0 - eps) * cfg["mu_norm"] / cfg["sigma"])
        s_step = result.s_grid[1] - result.s_grid[0] if result.s_grid.size > 1 else 0.0
        v_step = result.v_grid[1] - result.v_grid[0] if result.v_grid.size > 1 else 0.0
        within = (
            abs(result.s_star - s_expected) <= s_step + 1e-15
            and abs(result.v_star - 1.0) <= abs(v_step) + 1e-15
        )
        rows.append(
            [eps, result.s_star, result.v_star, result.error_star, s_expected, error_expected, int(within)]
        )
    write_csv(
        _outpath(cfg, "dro_check.csv"),
        config_header(cfg),
        ["eps", "s_star", "v_star", "error_star", "s_expected", "error_expected", "within_one_step"],
        rows,
    )
    return EXIT_OK


ORACLE_DEFAULTS = dict(
    w2_pairs=3,
    w2_n=500,
    w2_dim=2,
    w2_eps=0.001,
    w2_tol=0.10,
    map_n=2000,
    map_dim=2,
    map_eps=0.01,
    lp_eps=0.001,
    lp_tol=0.01,
    reg_n=5000,
    reg_grid=64,
    reg_tol=0.03,
    dro_dim=10000,
    dro_grid=201,
    dro_eps=0.3,
)


def _oracle_rows(cfg: Dict) -> List[List]:
    rows: List[List] = []
    rng_root = np.random.SeedSequence(cfg["seed"])
    seeds = [np.random.Generator(np.random.Philox(s)) for s in rng_root.spawn(8)]

    # Closed-form Gaussian W2 vs debiased entropic estimate on samples.
    d = cfg["w2_dim"]
    rng = seeds[0]
    for k in range(cfg["w2_pairs"]):
        direction = rng.standard_normal(d)
        direction /= np.linalg.norm(direction)
        mu0 = rng.standard_normal(d)
        mu1 = mu0 + direction * rng.uniform(1.2, 2.2)
        s0, s1 = rng.uniform(0.8, 1.25), rng.uniform(0.8, 1.25)
        ref = w2_gaussian(GaussianParams.isotropic(mu0, s0**2), GaussianParams.isotropic(mu1, s1**2)) ** 2
        n = cfg["w2_n"]
        draws = [
            mu0 + s0 * rng.standard_normal((n, d)),
            mu0 + s0 * rng.standard_normal((n, d)),
            mu1 + s1 * rng.standard_normal((n, d)),
            mu1 + s1 * rng.standard_normal((n, d)),
        ]
        a, a2, b, b2 = (DiscreteMeasure.uniform(x) for x in draws)
        c_ab = cost_matrix(a, b)
        scale = float(np.median(c_ab.values))

        def solve(p, q):
            c = cost_matrix(p, q)
            plan = sinkhorn(p, q, cfg["w2_eps"], cost=c, cost_scale=scale, tol=1e-4)
            return entropic_cost(plan, c)

        estimate = solve(a, b) - 0.5 * solve(a, a2) - 0.5 * solve(b, b2)
        deviation = abs(estimate - ref) / ref
        rows.append([f"w2_vs_sinkhorn_{k}", estimate, ref, deviation, cfg["w2_tol"], int(deviation <= cfg["w2_tol"])])

    # Barycentric map vs closed-form Gaussian map.
    d = cfg["map_dim"]
    rng = seeds[1]
    mu = rng.standard_normal(d)
    mu /= np.linalg.norm(mu)
    n = cfg["map_n"]
    x = -mu + rng.standard_normal((n, d))
    y = mu + rng.standard_normal((n, d))
    bmap = estimate_map(DiscreteMeasure.uniform(x), DiscreteMeasure.uniform(y), eps=cfg["map_eps"], tol=1e-6)
    rmse = float(np.sqrt(np.mean(np.sum((bmap.images - (x + 2 * mu)) ** 2, axis=1))))
    budget = 0.15 * np.sqrt(d)
    rows.append(["map_vs_monge_rmse", rmse, 0.0, rmse, budget, int(rmse <= budget)])

    # Quadrature smoothness regularizer vs closed form 2 |theta . mu|.
    rng = seeds[2]
    d = 5
    mu = rng.standard_normal(d)
    theta = rng.standard_normal(d)
    model = ConditionalGaussianModel(mu, 1.0)
    x0 = -mu + rng.standard_normal((cfg["reg_n"], d))
    gmap = gaussian_monge_map(model.conditional(-1), model.conditional(1))
    clf = LinearClassifier(theta)
    from .geodesic_reg import smoothness_regularizer as reg_fn

    value = reg_fn(clf, gmap, (-1, 1), "linear_yfx", np.linspace(0, 1, cfg["reg_grid"]), source_points=x0)
    ref = 2.0 * abs(float(theta @ mu))
    deviation = abs(value - ref) / ref
    rows.append(["reg_quadrature_vs_closed_form", value, ref, deviation, cfg["reg_tol"], int(deviation <= cfg["reg_tol"])])

    # Entropic cost vs exact LP / permutation oracle on tiny instances.
    rng = seeds[3]
    worst = 0.0
    for n0, n1 in ((4, 4), (5, 5), (6, 6), (4, 6)):
        xa = rng.standard_normal((n0, 2))
        xb = rng.standard_normal((n1, 2))
        a = DiscreteMeasure.uniform(xa)
        b = DiscreteMeasure.uniform(xb)
        c = cost_matrix(a, b)
        plan = sinkhorn(a, b, cfg["lp_eps"], tol=1e-9)
        approx = entropic_cost(plan, c)
        if n0 == n1:
            exact = exact_ot_cost_permutations(c.values)
        else:
            exact = exact_ot_cost_lp(c.values, a.weights, b.weights)
        worst = max(worst, abs(approx - exact))
    rows.append(["lp_oracle_max_abs_dev", worst, 0.0, worst, cfg["lp_tol"], int(worst <= cfg["lp_tol"])])

    # Constant-speed identity of the analytic geodesic.
    rng = seeds[4]
    d = 4
    p0 = GaussianParams.isotropic(rng.standard_normal(d), float(rng.uniform(0.5, 1.5)) ** 2)
    p1 = GaussianParams.isotropic(rng.standard_normal(d), float(rng.uniform(0.5, 1.5)) ** 2)
    total = w2_gaussian(p0, p1)
    worst = 0.0
    ts = np.linspace(0, 1, 9)
    for i, s in enumerate(ts):
        for t in ts[i:]:
            ps = gaussian_geodesic(p0, p1, s).params
            pt = gaussian_geodesic(p0, p1, t).params
            worst = max(worst, abs(w2_gaussian(ps, pt) - (t - s) * total))
    rows.append(["constant_speed_max_dev", worst, 0.0, worst, 1e-8, int(worst <= 1e-8)])

    # Worst-case location of the DRO grid check.
    model = ConditionalGaussianModel(_unit_mu(cfg["dro_dim"], 1.0), 1.0)
    result = dro_worst_case_check(model, cfg["dro_eps"], grid=cfg["dro_grid"])
    err_dev = abs(result.error_star - q_function(1.0 - cfg["dro_eps"]))
    rows.append(["dro_endpoint_error_dev", result.error_star, q_function(1.0 - cfg["dro_eps"]), err_dev, 1e-10, int(err_dev <= 1e-10)])
    return rows


def cmd_oracle_suite(cfg: Dict) -> int:
    rows = _oracle_rows(cfg)
    write_csv(
        _outpath(cfg, "oracle_suite.csv"),
        config_header(cfg),
        ["check", "value", "reference", "deviation", "tolerance", "passed"],
        rows,
    )
    if all(bool(r[-1]) for r in rows):
        return EXIT_OK
    sys.stderr.write("oracle-suite: some checks failed\n")
    return EXIT_CHECK_FAILED


# --------------------------------------------------------------------------
# argument parsing

_COMMANDS = {
    "theorem1": (THEOREM1_DEFAULTS, "augmentation-gain trials over (r, n1) grids"),
    "curve": (CURVE_DEFAULTS, "performance-geodesic curves for training strategies"),
    "augment": (AUGMENT_DEFAULTS, "augment a dataset CSV"),
    "train": (TRAIN_DEFAULTS, "train a linear classifier on a dataset CSV"),
    "eval": (EVAL_DEFAULTS, "evaluate a saved classifier on a dataset CSV"),
    "dro-check": (DRO_DEFAULTS, "grid check of the worst-case Gaussian pair"),
    "oracle-suite": (ORACLE_DEFAULTS, "closed-form vs empirical oracle battery"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geodaug", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (defaults, help_text) in _COMMANDS.items():
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", default=None, help="key=value configuration file")
        cmd.add_argument("--seed", type=int, default=0)
        cmd.add_argument("--out", default=".", help="output directory")
        for key in defaults:
            cmd.add_argument(f"--{key.replace('_', '-')}", dest=key, default=None)
        if name in ("augment", "train", "eval"):
            cmd.add_argument("--data", required=True, help="input dataset CSV")
        if name == "augment":
            cmd.add_argument("--model", default=None, help="classifier CSV for the worst-case search")
        if name == "train":
            cmd.add_argument("--augmented", default=None, help="augmented dump or dataset CSV")
        if name == "eval":
            cmd.add_argument("--model", required=True, help="classifier CSV")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    defaults = _COMMANDS[args.command][0]
    try:
        cfg = resolve_config(defaults, args)
        if args.command == "theorem1":
            return cmd_theorem1(cfg)
        if args.command == "curve":
            return cmd_curve(cfg)
        if args.command == "augment":
            return cmd_augment(cfg, args.data, args.model)
        if args.command == "train":
            return cmd_train(cfg, args.data, args.augmented)
        if args.command == "eval":
            return cmd_eval(cfg, args.data, args.model)
        if args.command == "dro-check":
            return cmd_dro_check(cfg)
        if args.command == "oracle-suite":
            return cmd_oracle_suite(cfg)
        raise UsageError(f"unknown command {args.command!r}")
    except NumericalError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except (UsageError, CsvFormatError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
