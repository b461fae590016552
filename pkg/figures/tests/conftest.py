import importlib.util

# Charts are an optional add-on; skip collecting this directory entirely
# when the package is not installed so the simulator's suite still runs.
if importlib.util.find_spec("forageq_figures") is None:
    collect_ignore_glob = ["test_*.py"]
