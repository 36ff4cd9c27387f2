"""Timing and size figures for the custody relation's proof system.

    python scripts/bench_prover.py [--trials N] [--seed N]
"""

import random
import statistics
import time

import click

from zkcustody import bn254, field, relation
from zkcustody.relation import Witness


def _timed(fn, *args):
    start = time.perf_counter()
    out = fn(*args)
    return out, (time.perf_counter() - start) * 1000


def _row(label, values):
    click.echo(
        f"{label:<14} mean {statistics.fmean(values):9.1f} ms   median {statistics.median(values):9.1f} ms   "
        f"min {min(values):9.1f} ms   max {max(values):9.1f} ms"
    )


@click.command()
@click.option("--trials", default=10, show_default=True, type=click.IntRange(min=1))
@click.option("--seed", default=0, show_default=True)
def main(trials, seed):
    rng = random.Random(seed)
    circuit, build_ms = _timed(relation.build_relation)
    (pk, vk), setup_ms = _timed(relation.setup, circuit, rng)
    click.echo(f"constraints    {circuit.constraint_count}")
    click.echo(f"variables      {circuit.cs.n_vars}")
    click.echo(f"build          {build_ms:9.1f} ms")
    click.echo(f"setup          {setup_ms:9.1f} ms")
    click.echo(f"proving key    {len(pk.to_bytes())} bytes")
    click.echo(f"verif. key     {len(vk.to_bytes())} bytes")

    prove_ms, verify_ms = [], []
    parent = (field.genesis_id(), 0)
    for _ in range(trials):
        nonce = field.random_nonce(rng)
        (proof, io), ms = _timed(relation.prove, pk, parent[0], Witness(parent[1], nonce))
        prove_ms.append(ms)
        ok, ms = _timed(relation.verify, vk, proof, io)
        verify_ms.append(ms)
        if not ok:
            raise click.ClickException("proof failed to verify")
        parent = (io.w_id, nonce)
    click.echo(f"proof          {len(proof.data)} bytes")
    _row("prove", prove_ms)
    _row("verify", verify_ms)
    _, pairing_ms = _timed(bn254.pairing, bn254.G1_GEN, bn254.G2_GEN)
    click.echo(f"pairing        {pairing_ms:9.1f} ms")


if __name__ == "__main__":
    main()
