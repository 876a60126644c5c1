import hashlib
import json
import logging
import numpy as np
from pathlib import Path

logger = logging.getLogger('mousetrust')

__all__ = ['array_digest', 'derive_seed', 'make_rng', 'read_json', 'write_json']


# Derives a 64-bit seed from a master seed and any labels (user ids, model names, fold numbers).
# The result depends only on the inputs, never on scheduling, so parallel runs reproduce serial ones.
def derive_seed(master_seed, *parts):
    material = json.dumps([int(master_seed), *[str(part) for part in parts]]).encode('utf-8')
    digest = hashlib.sha256(material).digest()
    return int.from_bytes(digest[:8], 'little')


def make_rng(seed):
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


# SHA-256 over the raw bytes of one or more arrays; used to prove that nothing mutated a fitted artifact.
def array_digest(*arrays):
    hasher = hashlib.sha256()
    for array in arrays:
        array = np.ascontiguousarray(array)
        hasher.update(str(array.dtype).encode('utf-8'))
        hasher.update(str(array.shape).encode('utf-8'))
        hasher.update(array.tobytes())
    return hasher.hexdigest()


def write_json(payload, path):
    path = Path(path)
    logger.debug(f'running write_json() ... path is: { path }')
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(payload, indent=2, sort_keys=True)
    path.write_text(text + '\n', encoding='utf-8')
    return path


def read_json(path):
    logger.debug(f'running read_json() ... path is: { path }')
    return json.loads(Path(path).read_text(encoding='utf-8'))
