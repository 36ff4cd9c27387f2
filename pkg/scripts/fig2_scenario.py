"""Tree-to-log scenario driven through the CLI, printed as a ledger table.

Two workspaces (forester, sawmill) share one ledger and key pair files for
the proof system.  The handoff string is passed on the command line, as the
QR code would be between the two devices.

    python scripts/fig2_scenario.py [--workdir DIR] [--seed N]
"""

import json
import shlex
import subprocess
import sys
import tempfile
from pathlib import Path

import click


def _run(workdir: Path, *args: str) -> str:
    cmd = [sys.executable, "-m", "zkcustody.cli", *args]
    click.secho("$ zkcustody " + shlex.join(args), fg="cyan", err=True)
    out = subprocess.run(cmd, cwd=workdir, capture_output=True, text=True)
    if out.returncode:
        raise click.ClickException(f"{args[0]} failed ({out.returncode}): {out.stderr.strip()}")
    return out.stdout


@click.command()
@click.option("--workdir", type=click.Path(file_okay=False, path_type=Path), default=None)
@click.option("--seed", type=int, default=None, help="Seed the (test-grade) key setup.")
def main(workdir, seed):
    workdir = workdir or Path(tempfile.mkdtemp(prefix="zkcustody-fig2-"))
    workdir.mkdir(parents=True, exist_ok=True)
    _run(workdir, "setup", *(["--seed", str(seed)] if seed is not None else []))
    _run(workdir, "--keys", "forester.json", "keygen")
    _run(workdir, "--keys", "sawmill.json", "keygen")
    _run(workdir, "--keys", "forester.json", "plant", "--tag", "tree.wtag")
    handoff = _run(workdir, "--keys", "forester.json", "handoff", "--tag", "tree.wtag").strip()
    _run(workdir, "--keys", "sawmill.json", "derive", "--handoff", handoff, "--tag", "log.wtag")

    records = json.loads((workdir / "ledger.json").read_text())["records"]
    click.echo(f"\nledger ({workdir / 'ledger.json'}):")
    for i, rec in enumerate(records, 1):
        click.echo(f"  row {i}")
        for key in ("w_id", "p_id", "registrant"):
            click.echo(f"    {key:<10} {rec[key]}")
        click.echo(f"    {'proof':<10} {rec['proof'][:34]}...")
        click.echo(f"    {'signature':<10} {rec['signature'][:34]}...")
    click.echo(f"\nrow 1 w_id == row 2 p_id: {records[0]['w_id'] == records[1]['p_id']}")
    click.echo("\ntrace of the log:")
    click.echo(_run(workdir, "trace", "--id", records[-1]["w_id"]))


if __name__ == "__main__":
    main()
