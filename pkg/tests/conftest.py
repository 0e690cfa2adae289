from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from ucfda.data import LabeledDataset, load_manifest, prepare

ROOT = Path(__file__).resolve().parent.parent
DATASETS = ROOT / "datasets"
MANIFEST = DATASETS / "benchmark.toml"


def random_dataset(rng: np.random.Generator, C: int, p: int, sizes, spread: float = 2.0) -> LabeledDataset:
    """Gaussian classes with random means and random (unequal) covariances."""
    blocks, labels = [], []
    for i, n in enumerate(sizes):
        mean = rng.normal(scale=spread, size=p)
        a = rng.normal(size=(p, p)) * rng.uniform(0.2, 1.5)
        blocks.append(mean + rng.normal(size=(n, p)) @ a)
        labels += [i] * n
    return LabeledDataset(
        np.vstack(blocks), np.array(labels), tuple(f"x{j}" for j in range(p)), tuple(str(i) for i in range(C))
    )


def synthetic_suite(count: int, seed: int = 1234, pd_only: bool = False) -> list[LabeledDataset]:
    """Random datasets with C in 2..5, p in 2..20, n_i in 5..100."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        C = int(rng.integers(2, 6))
        p = int(rng.integers(2, 21))
        low = p + 2 if pd_only else 5
        if low > 100:
            continue
        sizes = rng.integers(max(5, low), 101, size=C)
        out.append(random_dataset(rng, C, p, sizes))
    return out


@pytest.fixture(scope="session")
def benchmark_datasets() -> dict[str, LabeledDataset]:
    """Every dataset of the bundled manifest, preprocessed as in the benchmark."""
    return {spec.name: prepare(spec).data for spec in load_manifest(MANIFEST) if spec.path.exists()}


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0)


# --- acceptance summary -------------------------------------------------------

ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (rep.when == "call" or rep.failed):
        return
    number, title = marker.args
    if rep.passed:
        detail = getattr(item, "criterion_detail", "")
    else:
        crash = getattr(rep.longrepr, "reprcrash", None)
        detail = (crash.message if crash else str(rep.longrepr)).splitlines()[0]
    ACCEPTANCE[number] = (title, rep.passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[number]
        line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}"
        terminalreporter.write_line(line + (f" | {detail}" if detail else ""))
