"""Command-line workflows: setup, keygen, plant, handoff, derive, trace, bench.

Exit status: 0 on success (or a verified trace), 1 on a verification or
validation failure, 2 on usage or I/O errors.
"""

from __future__ import annotations

import json
import logging
import random
import statistics
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import click

from . import field, groth16, relation
from .crypto import KeyPair, keygen
from .errors import CustodyError, IoError
from .handoff import HandoffPayload, decode_handoff, encode_handoff
from .ledger import Ledger, fingerprint, make_record
from .relation import Witness
from .tag import TagImage, provision_tag, recover_nonce
from .util import atomic_write

log = logging.getLogger("zkcustody")

EXIT_FAILURE = 1
EXIT_USAGE = 2


@dataclass
class WorkspaceConfig:
    ledger_path: Path
    keys_path: Path
    proving_key_path: Path
    verification_key_path: Path
    strict_parent: bool = True
    json_output: bool = False

    def load_pk(self) -> groth16.ProvingKey:
        return groth16.ProvingKey.from_bytes(_read(self.proving_key_path, "proving key"))

    def load_vk(self) -> groth16.VerificationKey:
        return groth16.VerificationKey.from_bytes(_read(self.verification_key_path, "verification key"))

    def load_keys(self) -> KeyPair:
        return KeyPair.from_json(_read(self.keys_path, "key file").decode())

    def load_ledger(self, vk, create: bool = False) -> Ledger:
        if create and not self.ledger_path.exists():
            return Ledger(vk, self.strict_parent)
        return Ledger.load(self.ledger_path, vk, self.strict_parent)


def _read(path: Path, what: str) -> bytes:
    try:
        return path.read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read {what} {path}: {exc.strerror or exc}") from exc


def _emit(cfg: WorkspaceConfig, doc: dict, lines: list[str]) -> None:
    if cfg.json_output:
        click.echo(json.dumps(doc, indent=2))
    else:
        for line in lines:
            click.echo(line)


class _Group(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (IoError, groth16.KeyFormatError) as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(EXIT_USAGE)
        except (CustodyError, ValueError) as exc:
            name = type(exc).__name__
            click.echo(f"error: {name}: {exc}", err=True)
            ctx.exit(EXIT_FAILURE)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(EXIT_USAGE)


@click.group(cls=_Group)
@click.option("--ledger", "ledger_path", default="ledger.json", type=click.Path(path_type=Path), show_default=True)
@click.option("--keys", "keys_path", default="keys.json", type=click.Path(path_type=Path), show_default=True)
@click.option("--pk", "pk_path", default="proving.key", type=click.Path(path_type=Path), show_default=True)
@click.option("--vk", "vk_path", default="verification.key", type=click.Path(path_type=Path), show_default=True)
@click.option("--permissive", is_flag=True, help="Accept records whose parent is not registered.")
@click.option("--verbose", is_flag=True)
@click.option("--json", "json_output", is_flag=True, help="Machine-readable output.")
@click.pass_context
def main(ctx, ledger_path, keys_path, pk_path, vk_path, permissive, verbose, json_output):
    """Zero-knowledge chain of custody for wood objects."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING, format="%(levelname)s %(message)s")
    cfg = WorkspaceConfig(ledger_path, keys_path, pk_path, vk_path, not permissive, json_output)
    log.debug("config: %s", {k: str(v) for k, v in asdict(cfg).items()})
    ctx.obj = cfg


@main.command()
@click.option("--seed", type=int, default=None, help="Deterministic (test-only) setup.")
@click.pass_obj
def setup(cfg: WorkspaceConfig, seed):
    """Generate proving and verification keys for the custody relation."""
    circuit = relation.build_relation()
    rng = random.Random(seed) if seed is not None else None
    pk, vk = relation.setup(circuit, rng)
    try:
        atomic_write(cfg.proving_key_path, pk.to_bytes())
        atomic_write(cfg.verification_key_path, vk.to_bytes())
    except OSError as exc:
        raise IoError(f"cannot write key files: {exc}") from exc
    fp = fingerprint(vk)
    _emit(
        cfg,
        {"constraints": circuit.constraint_count, "verification_key_fingerprint": fp},
        [f"constraints: {circuit.constraint_count}", f"verification key fingerprint: {fp}"],
    )


@main.command("keygen")
@click.pass_obj
def keygen_cmd(cfg: WorkspaceConfig):
    """Create a device key pair and print its address."""
    kp = keygen()
    try:
        kp.save(cfg.keys_path)
    except OSError as exc:
        raise IoError(f"cannot write key file {cfg.keys_path}: {exc}") from exc
    _emit(cfg, {"address": str(kp.address)}, [str(kp.address)])


def _register_new_object(cfg: WorkspaceConfig, p_id: int, p_nonce: int, tag_out: Path):
    pk, vk = cfg.load_pk(), cfg.load_vk()
    keys = cfg.load_keys()
    ledger = cfg.load_ledger(vk, create=True)
    nonce = field.random_nonce()
    proof, io = relation.prove(pk, p_id, Witness(p_nonce, nonce))
    record = ledger.register(make_record(keys, proof, io))
    image = provision_tag(keys.public_key, nonce)
    del nonce  # plaintext nonce must not outlive tag provisioning
    try:
        image.save(tag_out)
    except OSError as exc:
        raise IoError(f"cannot write tag {tag_out}: {exc}") from exc
    try:
        ledger.save(cfg.ledger_path)
    except IoError:
        tag_out.unlink(missing_ok=True)
        raise
    return record


def _print_record(cfg: WorkspaceConfig, record) -> None:
    _emit(
        cfg,
        {"w_id": str(record.w_id), "p_id": str(record.p_id), "registrant": str(record.registrant)},
        [f"w_id: {record.w_id}", f"p_id: {record.p_id}", f"registrant: {record.registrant}"],
    )


@main.command()
@click.option("--tag", "tag_out", required=True, type=click.Path(path_type=Path))
@click.pass_obj
def plant(cfg: WorkspaceConfig, tag_out):
    """Register a tree (parent is genesis) and write its tag."""
    record = _register_new_object(cfg, field.genesis_id(), 0, tag_out)
    _print_record(cfg, record)


@main.command()
@click.option("--tag", "tag_in", required=True, type=click.Path(path_type=Path))
@click.pass_obj
def handoff(cfg: WorkspaceConfig, tag_in):
    """Decrypt a tag's nonce and print the secret handoff string."""
    keys = cfg.load_keys()
    image = TagImage(_read(tag_in, "tag"))
    nonce = recover_nonce(keys.private_key, image)
    text = encode_handoff(HandoffPayload(field.id_of(nonce), nonce))
    _emit(cfg, {"handoff": text}, [text])


@main.command()
@click.option("--handoff", "handoff_text", required=True)
@click.option("--tag", "tag_out", required=True, type=click.Path(path_type=Path))
@click.pass_obj
def derive(cfg: WorkspaceConfig, handoff_text, tag_out):
    """Register a child object of the handed-off parent and write its tag."""
    payload = decode_handoff(handoff_text)
    record = _register_new_object(cfg, payload.p_id, payload.p_nonce, tag_out)
    _print_record(cfg, record)


@main.command()
@click.option("--id", "w_id", required=True)
@click.pass_obj
def trace(cfg: WorkspaceConfig, w_id):
    """Print the chain from an object back to genesis and its verdict."""
    vk = cfg.load_vk()
    ledger = cfg.load_ledger(vk)
    result = ledger.trace(field.from_decimal(w_id))
    verdict = "VERIFIED" if result.verified else "FAILED"
    lines = [f"{r.w_id}  {r.p_id}  {r.registrant}" for r in result.chain]
    lines.append(verdict)
    doc = {
        "chain": [{"w_id": str(r.w_id), "p_id": str(r.p_id), "registrant": str(r.registrant)} for r in result.chain],
        "verified": result.verified,
        "failures": result.failures,
    }
    _emit(cfg, doc, lines)
    if not result.verified:
        sys.exit(EXIT_FAILURE)


@main.command()
@click.option("--trials", default=10, show_default=True, type=click.IntRange(min=1))
@click.pass_obj
def bench(cfg: WorkspaceConfig, trials):
    """Time proof generation for genesis transitions."""
    pk, vk = cfg.load_pk(), cfg.load_vk()
    circuit = relation.build_relation()
    timings, all_ok = [], True
    for _ in range(trials):
        nonce = field.random_nonce()
        start = time.perf_counter()
        proof, io = relation.prove(pk, field.genesis_id(), Witness(0, nonce))
        timings.append((time.perf_counter() - start) * 1000)
        all_ok &= relation.verify(vk, proof, io)
    doc = {
        "trials": trials,
        "timings_ms": timings,
        "mean_ms": statistics.fmean(timings),
        "median_ms": statistics.median(timings),
        "min_ms": min(timings),
        "max_ms": max(timings),
        "constraints": circuit.constraint_count,
        "all_verified": all_ok,
    }
    _emit(
        cfg,
        doc,
        [
            f"trials: {trials}",
            f"mean: {doc['mean_ms']:.1f} ms  median: {doc['median_ms']:.1f} ms  "
            f"min: {doc['min_ms']:.1f} ms  max: {doc['max_ms']:.1f} ms",
            f"constraints: {circuit.constraint_count}",
            f"all proofs verified: {all_ok}",
        ],
    )
    if not all_ok:
        sys.exit(EXIT_FAILURE)


if __name__ == "__main__":
    main()
