"""Provenance header: config hash and input checksums."""

import hashlib
from pathlib import Path
from typing import Mapping, Optional

from constants import CEP_VERSION


def file_sha256(path: Path) -> str:
    """SHA-256 of a file's bytes."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def get_provenance(command: str, config_path: Optional[Path], inputs: Mapping[str, Path], seed: Optional[int] = None) -> dict:
    """Build the provenance block for a report.

    Only file names and digests are recorded, so the block is the same
    wherever the run happens.
    """
    provenance = {
        "generator": "cep-pricing",
        "cep_version": CEP_VERSION,
        "command": command,
        "config": Path(config_path).name if config_path else None,
        "config_sha256": file_sha256(config_path) if config_path else None,
        "inputs": {name: {"file": Path(path).name, "sha256": file_sha256(path)} for name, path in sorted(inputs.items())},
    }
    if seed is not None:
        provenance["seed"] = seed
    return provenance


def get_header_lines(provenance: Mapping) -> list[str]:
    """Flatten provenance into ``key: value`` lines for comment headers."""
    lines = [
        f"generator: {provenance['generator']} (cep_version {provenance['cep_version']})",
        f"command: {provenance['command']}",
    ]
    if provenance.get("config_sha256"):
        lines.append(f"config {provenance['config']} sha256: {provenance['config_sha256']}")
    for name, entry in provenance.get("inputs", {}).items():
        lines.append(f"input {name} {entry['file']} sha256: {entry['sha256']}")
    if "seed" in provenance:
        lines.append(f"seed: {provenance['seed']}")
    return lines
