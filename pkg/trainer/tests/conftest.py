import importlib.util

# the engine's suite must run standalone: when the trainer (or torch) is
# not installed, drop this directory from collection instead of erroring


def _missing(name: str) -> bool:
    try:
        return importlib.util.find_spec(name) is None
    except (ImportError, ValueError):
        return True


if any(_missing(name) for name in ("torch", "seizurefg_trainer", "seizurefg")):
    collect_ignore_glob = ["test_*.py", "*_helpers.py"]
