from typing import Any, Callable, Dict, Iterable, List, Optional, Union
import copy
import os

import numpy as np
import yaml
from joblib import Parallel, delayed
from pathlib2 import Path
from tqdm import tqdm


# environment variable carrying the default worker count
WORKERS_ENV = "HEL_WORKERS"


def load_yaml(yml_path: Union[Path, str], encoding="utf-8"):
    if isinstance(yml_path, str):
        yml_path = Path(yml_path)
    with yml_path.open('r', encoding=encoding) as f:
        cfg = yaml.load(f.read(), Loader=yaml.SafeLoader)
        return cfg if cfg is not None else {}


def dump_yaml(data: Dict, yml_path: Union[Path, str], encoding="utf-8"):
    if isinstance(yml_path, str):
        yml_path = Path(yml_path)
    with yml_path.open('w', encoding=encoding) as f:
        yaml.safe_dump(data, f, sort_keys=True, default_flow_style=False)


def resolve_config(defaults: Dict, file_config: Optional[Dict] = None,
                   flags: Optional[Dict] = None) -> Dict:
    """
    Merge configuration layers with precedence flags > config file > defaults.

    A manifest written by a previous run is accepted as config file, its
    `config` section is used.

    Parameters:
        defaults: section of `config.yml` for the command.
        file_config: mapping loaded from `--config`, may be a manifest.
        flags: parsed command line values, `None` entries are ignored.

    Returns:
        the resolved mapping, a fresh copy.
    """
    resolved = copy.deepcopy(defaults) if defaults else {}
    if file_config:
        if "config" in file_config and isinstance(file_config["config"], dict):
            file_config = file_config["config"]
        resolved.update(copy.deepcopy(file_config))
    if flags:
        resolved.update({k: v for k, v in flags.items() if v is not None})
    return resolved


def default_workers() -> int:
    value = os.environ.get(WORKERS_ENV)
    if value is None:
        return 1
    try:
        workers = int(value)
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {value!r}")
    return max(1, workers)


def stream(seed: int, *key: int) -> np.random.Generator:
    """
    Random generator for the stream identified by (seed, *key).

    Streams are derived with `SeedSequence(seed, spawn_key=key)`, so a draw
    index, a stage or a tree position fully determines the numbers produced,
    whatever the order in which streams are requested.
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key)))


def chunk_indices(count: int, workers: int) -> List[np.ndarray]:
    n_chunks = max(1, min(count, 4 * workers))
    return [c for c in np.array_split(np.arange(count), n_chunks) if len(c)]


def parallel_map(func: Callable, tasks: Iterable, workers: int = 1, desc: str = "",
                 progress: bool = True, total: Optional[int] = None) -> List[Any]:
    """
    Apply `func` to every task with a joblib worker pool, preserving task order.

    Results do not depend on `workers`: every task carries whatever it needs
    to seed itself.
    """
    tasks = list(tasks)
    total = len(tasks) if total is None else total
    if workers <= 1:
        results = []
        with tqdm(tasks, dynamic_ncols=True, colour="#ff924a", disable=not progress, total=total) as data:
            for task in data:
                results.append(func(task))
                data.set_description(desc)
        return results

    runner = Parallel(n_jobs=workers, return_as="generator")
    out = runner(delayed(func)(task) for task in tasks)
    results = []
    with tqdm(out, dynamic_ncols=True, colour="#ff924a", disable=not progress, total=total) as data:
        for result in data:
            results.append(result)
            data.set_description(desc)
    return results


def write_manifest(directory: Union[Path, str], command: str, seed: Optional[int], config: Dict) -> Path:
    """manifest.yml beside the outputs: {command, version, seed, config} with the resolved config."""
    from utils import __version__
    directory = Path(str(directory))
    directory.mkdir(parents=True, exist_ok=True)
    path = directory.joinpath("manifest.yml")
    dump_yaml({"command": command, "version": __version__, "seed": seed, "config": _plain_config(config)}, path)
    return path


def _plain_config(config):
    if isinstance(config, dict):
        return {str(k): _plain_config(v) for k, v in config.items()}
    if isinstance(config, (list, tuple)):
        return [_plain_config(v) for v in config]
    if isinstance(config, np.generic):
        return config.item()
    return config


def parse_list(value, cast=float) -> Optional[List]:
    """'50,100,200' or a YAML list -> list of `cast` values."""
    if value is None:
        return None
    if isinstance(value, str):
        return [cast(v) for v in value.split(",") if v.strip()]
    return [cast(v) for v in value]
