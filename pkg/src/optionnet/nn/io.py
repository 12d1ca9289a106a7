"""Versioned on-disk model format (numpy ``.npz`` container)."""
from __future__ import annotations

import io
import json
import os
import zipfile
from pathlib import Path

import numpy as np

from .activations import Activation
from .network import Network

FORMAT_NAME = "optionnet-ffn"
FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    """Corrupt, truncated or incompatible model file."""


def save_model(net: Network, path) -> Path:
    path = Path(path)
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "n_layers": net.n_layers,
        "activations": [[a.kind, a.param] for a in net.activations],
        "dropout_keep_p": net.dropout_keep_p,
        "info": {k: v for k, v in net.info.items() if isinstance(v, (str, int, float, list, dict))},
    }
    arrays = {"header": np.frombuffer(json.dumps(header).encode(), dtype=np.uint8),
              "feature_mean": net.feature_mean, "feature_std": net.feature_std}
    for k, (W, b) in enumerate(zip(net.weights, net.biases)):
        arrays[f"W{k}"] = W
        arrays[f"b{k}"] = b
    buf = io.BytesIO()
    np.savez(buf, **arrays)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(buf.getvalue())
    os.replace(tmp, path)
    return path


def load_model(path) -> Network:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"model file not found: {path}")
    try:
        with np.load(path, allow_pickle=False) as data:
            header = json.loads(bytes(data["header"]).decode())
            arrays = {k: data[k] for k in data.files}
    except (zipfile.BadZipFile, OSError, ValueError, KeyError, EOFError) as exc:
        raise ModelFormatError(f"{path}: corrupt or truncated model file ({exc})") from exc
    if header.get("format") != FORMAT_NAME:
        raise ModelFormatError(f"{path}: not an {FORMAT_NAME} file")
    if header.get("version") != FORMAT_VERSION:
        raise ModelFormatError(
            f"{path}: format version {header.get('version')} unsupported (expected {FORMAT_VERSION})"
        )
    try:
        n = header["n_layers"]
        return Network(
            [arrays[f"W{k}"] for k in range(n)],
            [arrays[f"b{k}"] for k in range(n)],
            [Activation(kind, param) for kind, param in header["activations"]],
            arrays["feature_mean"],
            arrays["feature_std"],
            header.get("dropout_keep_p", 1.0),
            dict(header.get("info", {})),
        )
    except (KeyError, ValueError) as exc:
        raise ModelFormatError(f"{path}: inconsistent model file ({exc})") from exc
