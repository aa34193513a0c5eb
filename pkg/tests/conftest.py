"""Collects the outcome of every test in test_acceptance.py and prints a
one-line verdict per criterion at the end of the run."""

CRITERIA = [
    ("test_toy_problem", "toy problem convergence"),
    ("test_on_manifold_guarantee", "on-manifold guarantee (|loss - reference| <= 1e-5)"),
    ("test_iris_end_to_end", "iris end-to-end (accuracy + norm reduction + trends)"),
    ("test_autompg_end_to_end", "auto-mpg end-to-end (beats weight-decay baseline)"),
    ("test_weight_decay_sweep_iris", "iris weight-decay sweep (13 lambdas x 10 runs)"),
    ("test_gradient_correctness", "gradient correctness vs finite differences"),
    ("test_geometry_properties", "projection/rejection/angle geometry (1000 trials)"),
    ("test_pca_oracle_equivalence", "pca vs covariance eigendecomposition oracle"),
    ("test_cost_accounting", "exact cumulative gradient-evaluation accounting"),
    ("test_determinism", "byte-identical reruns"),
    ("test_mnist_reproduction_documented", "mnist-ff (optional, script-only)"),
]

_outcomes = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1].split("[")[0]
    if report.when == "call" or report.skipped:
        prev = _outcomes.get(name)
        if prev != "failed":
            _outcomes[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    seen = [(n, label) for n, label in CRITERIA if n in _outcomes]
    if not seen:
        return
    terminalreporter.section("acceptance criteria")
    for name, label in seen:
        verdict = {"passed": "PASS", "failed": "FAIL",
                   "skipped": "SKIP"}[_outcomes[name]]
        terminalreporter.write_line(f"{verdict}  {label}")
