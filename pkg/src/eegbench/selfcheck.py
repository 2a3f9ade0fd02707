"""Property and oracle suites runnable without the benchmark data file.

Each check returns (ok, detail). The CLI `check` verb prints one line per
check; the acceptance tests assert them. Oracles here are deliberately
independent of the paths they verify: central finite differences against
backward(), brute-force pair counting against the rank-based AUC, explicit
Gaussian posteriors against the fitted classifier, and exhaustive partition
bookkeeping against the split planners.
"""

from __future__ import annotations

import numpy as np

from eegbench.metrics import roc_auc
from eegbench.models import (
    GaussianNbModel,
    GbdtModel,
    KnnModel,
    LinearModel,
    RandomForestModel,
    check_proba,
)
from eegbench.nn import tensor as T
from eegbench.nn.gradcheck import max_gradcheck_error
from eegbench.nn.networks import build_cnn, build_rnn, predict_proba
from eegbench.nn.recurrent import GruCell, LstmCell, gru_step, lstm_step
from eegbench.nn.tensor import Tensor
from eegbench.preprocessing import kfold_stratified, stratified_split

GRADCHECK_TOLERANCE = 1e-4
GRADCHECK_CONFIGS = 20
AUC_INSTANCES = 1000
SPLIT_FIXTURES = 1000


def pair_count_auc(scores: np.ndarray, truths: np.ndarray) -> float:
    """Definitionally direct AUC: compare every positive/negative pair."""
    pos = scores[truths == 1][:, None]
    neg = scores[truths == 0][None, :]
    wins = (pos > neg).sum() + 0.5 * (pos == neg).sum()
    return float(wins / (pos.size * neg.size))


def _gradcheck_dense(rng):
    d_in, d_out, batch = rng.integers(1, 5), rng.integers(1, 4), rng.integers(1, 4)
    w = Tensor(rng.normal(size=(d_in, d_out)), requires_grad=True)
    b = Tensor(rng.normal(size=d_out), requires_grad=True)
    x = Tensor(rng.normal(size=(batch, d_in)), requires_grad=True)

    def loss_fn():
        out = T.add(T.matmul(x, w), b)
        return T.sum_all(T.mul(out, out))

    return max_gradcheck_error(loss_fn, [w, b, x])


def _gradcheck_relu(rng):
    x = Tensor(rng.normal(size=(3, int(rng.integers(2, 6)))) + 0.05, requires_grad=True)

    def loss_fn():
        return T.sum_all(T.mul(T.relu(x), x))

    return max_gradcheck_error(loss_fn, [x])


def _gradcheck_conv(rng):
    channels, out_ch = int(rng.integers(1, 3)), int(rng.integers(1, 3))
    length = int(rng.integers(4, 9))
    kernel = int(rng.integers(1, min(3, length) + 1))
    w = Tensor(rng.normal(size=(out_ch, channels, kernel)), requires_grad=True)
    b = Tensor(rng.normal(size=out_ch), requires_grad=True)
    x = Tensor(rng.normal(size=(2, channels, length)), requires_grad=True)

    def loss_fn():
        out = T.conv1d(x, w, b)
        return T.sum_all(T.mul(out, out))

    return max_gradcheck_error(loss_fn, [w, b, x])


def _gradcheck_maxpool(rng):
    length = int(rng.integers(4, 10))
    x = Tensor(rng.normal(size=(2, 2, length)), requires_grad=True)
    window = int(rng.integers(2, 4))

    def loss_fn():
        out = T.maxpool1d(x, window)
        return T.sum_all(T.mul(out, out))

    return max_gradcheck_error(loss_fn, [x])


def _gradcheck_dropout(rng):
    x = Tensor(rng.normal(size=(2, int(rng.integers(3, 7)))), requires_grad=True)
    mask_seed = int(rng.integers(0, 2**31))

    def loss_fn():
        out = T.dropout(x, 0.4, np.random.default_rng(mask_seed), training=True)
        return T.sum_all(T.mul(out, out))

    return max_gradcheck_error(loss_fn, [x])


def _gradcheck_softmax(rng):
    batch, classes = int(rng.integers(1, 4)), int(rng.integers(2, 5))
    logits = Tensor(rng.normal(size=(batch, classes)), requires_grad=True)
    labels = rng.integers(0, classes, size=batch)
    weights = rng.uniform(0.5, 2.0, size=batch)

    def loss_fn():
        return T.softmax_cross_entropy(logits, labels, weights)[0]

    return max_gradcheck_error(loss_fn, [logits])


def _gradcheck_gru(rng):
    d_in, hidden = int(rng.integers(1, 3)), int(rng.integers(1, 4))
    cell = GruCell(d_in, hidden, rng)
    x = Tensor(rng.normal(size=(2, d_in)), requires_grad=True)
    h = Tensor(rng.normal(size=(2, hidden)), requires_grad=True)

    def loss_fn():
        out = gru_step(cell, x, h)
        return T.sum_all(T.mul(out, out))

    return max_gradcheck_error(loss_fn, cell.parameters() + [x, h])


def _gradcheck_lstm(rng):
    d_in, hidden = int(rng.integers(1, 3)), int(rng.integers(1, 4))
    cell = LstmCell(d_in, hidden, rng)
    x = Tensor(rng.normal(size=(2, d_in)), requires_grad=True)
    h = Tensor(rng.normal(size=(2, hidden)), requires_grad=True)
    c = Tensor(rng.normal(size=(2, hidden)), requires_grad=True)

    def loss_fn():
        h_t, c_t = lstm_step(cell, x, h, c)
        return T.sum_all(T.add(T.mul(h_t, h_t), T.mul(c_t, c_t)))

    return max_gradcheck_error(loss_fn, cell.parameters() + [x, h, c])


GRADCHECK_SUITES = {
    "dense": _gradcheck_dense,
    "relu": _gradcheck_relu,
    "conv1d": _gradcheck_conv,
    "maxpool1d": _gradcheck_maxpool,
    "dropout": _gradcheck_dropout,
    "softmax_cross_entropy": _gradcheck_softmax,
    "gru_cell": _gradcheck_gru,
    "lstm_cell": _gradcheck_lstm,
}


def check_gradients() -> tuple[bool, str]:
    worst_name, worst = None, 0.0
    for name, suite in GRADCHECK_SUITES.items():
        rng = np.random.default_rng(abs(hash(name)) % 2**32)
        for _ in range(GRADCHECK_CONFIGS):
            err = suite(rng)
            if err > worst:
                worst_name, worst = name, err
    ok = worst < GRADCHECK_TOLERANCE
    return ok, f"max relative error {worst:.2e} ({worst_name}), tolerance {GRADCHECK_TOLERANCE}"


def check_auc_oracle() -> tuple[bool, str]:
    fixture = roc_auc(np.array([0.1, 0.4, 0.35, 0.8]), np.array([0, 0, 1, 1]))
    if fixture != 0.75:
        return False, f"fixture AUC {fixture} != 0.75"
    rng = np.random.default_rng(8080)
    worst = 0.0
    for _ in range(AUC_INSTANCES):
        n = int(rng.integers(4, 201))
        truths = rng.integers(0, 2, size=n)
        if truths.min() == truths.max():
            truths[0] = 1 - truths[0]
        if rng.random() < 0.5:
            scores = rng.integers(0, 8, size=n) / 7.0  # coarse grid -> ties
        else:
            scores = rng.random(n)
        worst = max(worst, abs(roc_auc(scores, truths) - pair_count_auc(scores, truths)))
    return worst <= 1e-12, f"max |sweep - pairs| = {worst:.2e} over {AUC_INSTANCES} instances"


def check_split_invariants() -> tuple[bool, str]:
    rng = np.random.default_rng(4242)
    for trial in range(SPLIT_FIXTURES):
        n_classes = int(rng.integers(2, 6))
        counts = rng.integers(4, 40, size=n_classes)
        labels = rng.permutation(np.repeat(np.arange(n_classes), counts))
        seed = int(rng.integers(0, 2**31))
        ratio = float(rng.uniform(0.2, 0.9))
        plan = stratified_split(labels, ratio, seed)
        again = stratified_split(labels, ratio, seed)
        if not (
            np.array_equal(plan.train_indices, again.train_indices)
            and np.array_equal(plan.test_indices, again.test_indices)
        ):
            return False, f"split not deterministic on fixture {trial}"
        merged = np.sort(np.concatenate([plan.train_indices, plan.test_indices]))
        if not np.array_equal(merged, np.arange(labels.size)):
            return False, f"split not a partition on fixture {trial}"
        for c in range(n_classes):
            expected = ratio * (labels == c).sum()
            got = (labels[plan.train_indices] == c).sum()
            if abs(got - expected) > 1.0:
                return False, f"stratification off by >1 on fixture {trial} class {c}"
        k = int(rng.integers(2, 5))
        if min(np.bincount(labels[plan.train_indices])) < k:
            continue
        folds = kfold_stratified(plan.train_indices, labels, k, seed)
        again = kfold_stratified(plan.train_indices, labels, k, seed)
        for f1, f2 in zip(folds.folds, again.folds):
            if not np.array_equal(f1, f2):
                return False, f"folds not deterministic on fixture {trial}"
        merged = np.sort(np.concatenate(folds.folds))
        if not np.array_equal(merged, np.sort(plan.train_indices)):
            return False, f"folds not a partition on fixture {trial}"
        for c in range(n_classes):
            per_fold = [(labels[f] == c).sum() for f in folds.folds]
            if max(per_fold) - min(per_fold) > 1:
                return False, f"fold stratification off on fixture {trial} class {c}"
    return True, f"{SPLIT_FIXTURES} random fixtures: partitions exact, strata within 1"


def check_nb_closed_form() -> tuple[bool, str]:
    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(50):
        a = rng.normal(0, 2, size=2)
        b = rng.normal(4, 2, size=2)
        X = np.array([[a[0]], [a[1]], [b[0]], [b[1]]])
        y = np.array([0, 0, 1, 1])
        model = GaussianNbModel().fit(X, y)
        q = rng.normal(2, 2)
        likelihood = []
        for pts in (a, b):
            mu, var = pts.mean(), pts.var()
            likelihood.append(
                0.5 * np.exp(-((q - mu) ** 2) / (2 * var)) / np.sqrt(2 * np.pi * var)
            )
        expected = np.asarray(likelihood) / np.sum(likelihood)
        got = model.predict_proba(np.array([[q]]))[0]
        worst = max(worst, float(np.abs(got - expected).max()))
    return worst <= 1e-12, f"max posterior deviation {worst:.2e}"


def check_knn_memorization() -> tuple[bool, str]:
    rng = np.random.default_rng(77)
    for _ in range(20):
        n = int(rng.integers(5, 40))
        X = rng.normal(size=(n, 4))  # continuous draws: pairwise distinct
        y = rng.integers(0, 3, size=n)
        model = KnnModel(k=1).fit(X, y)
        if not np.array_equal(model.predict(X), y):
            return False, "1-NN failed to memorize a distinct training set"
    return True, "1-NN reproduces training labels on 20 distinct-row fixtures"


def check_gbdt_monotone_loss() -> tuple[bool, str]:
    rng = np.random.default_rng(55)
    X = np.vstack([rng.normal(-1, 0.6, size=(25, 3)), rng.normal(1, 0.6, size=(25, 3))])
    y = np.repeat([0, 1], 25)
    w = np.where(y == 1, 2.0, 0.5)
    model = GbdtModel(learning_rate=0.1, n_rounds=60, max_depth=2).fit(X, y, sample_weight=w)
    diffs = np.diff(model.loss_history_)
    ok = bool(np.all(diffs <= 1e-12))
    return ok, f"worst per-round loss increase {max(diffs.max(), 0.0):.2e}"


def check_tree_affine_invariance() -> tuple[bool, str]:
    rng = np.random.default_rng(66)
    for trial in range(10):
        X = rng.normal(size=(40, 4))
        y = rng.integers(0, 3, size=40)
        queries = rng.normal(size=(15, 4))
        seed = int(rng.integers(0, 2**31))
        base = RandomForestModel(n_estimators=3, seed=seed).fit(X, y)
        # Power-of-two scale + integer shift: exact in floating point.
        moved = RandomForestModel(n_estimators=3, seed=seed).fit(8.0 * X - 5.0, y)
        if not np.array_equal(
            base.predict_proba(queries), moved.predict_proba(8.0 * queries - 5.0)
        ):
            return False, f"forest changed under affine map on fixture {trial}"
    return True, "forest predictions unchanged under increasing affine maps"


def check_prob_validity() -> tuple[bool, str]:
    rng = np.random.default_rng(88)
    X = rng.normal(size=(60, 10))
    y = rng.integers(0, 3, size=60)
    queries = rng.normal(size=(40, 10)) * rng.uniform(0.01, 100)
    models = [
        KnnModel(k=5).fit(X, y),
        LinearModel("logistic").fit(X, y),
        LinearModel("hinge").fit(X, y),
        GaussianNbModel().fit(X, y),
        RandomForestModel(n_estimators=4, seed=1).fit(X, y),
        GbdtModel(n_rounds=8, max_depth=2).fit(X, y),
    ]
    for model in models:
        try:
            check_proba(model.predict_proba(queries))
        except ValueError as exc:
            return False, f"{type(model).__name__}: {exc}"
    Xw = rng.normal(size=(4, 178))
    for net in (build_cnn(3, seed=2), build_rnn("gru", 3, seed=2), build_rnn("lstm", 3, seed=2)):
        try:
            check_proba(predict_proba(net, Xw))
        except ValueError as exc:
            return False, f"{net.kind}: {exc}"
    return True, "all nine model kinds emit valid probability rows"


ALL_CHECKS = [
    ("gradient_checks", check_gradients),
    ("auc_oracle", check_auc_oracle),
    ("split_fold_invariants", check_split_invariants),
    ("nb_closed_form", check_nb_closed_form),
    ("knn_memorization", check_knn_memorization),
    ("gbdt_monotone_loss", check_gbdt_monotone_loss),
    ("tree_affine_invariance", check_tree_affine_invariance),
    ("prob_validity_fuzz", check_prob_validity),
]


def run_all_checks(verbose: bool = True) -> bool:
    all_ok = True
    for name, fn in ALL_CHECKS:
        ok, detail = fn()
        all_ok &= ok
        if verbose:
            print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return all_ok
