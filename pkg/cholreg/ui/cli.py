"""Command-line interface for cholreg."""
import argparse
import csv
import sys
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from ..core.estimators import EstimatorKind
from ..core.evaluation import (
    CSV_HEADER,
    RiskRecord,
    Scenario,
    format_real,
    oracle_risk_closed_form,
    run_risk,
    scenario_population,
)
from ..core.selftest import DEFAULT_SEED, KNOWN_FAULTS, run_selftest
from ..core.synthetic_models import RngStream
from ..utils.config import PRESETS, Config, SweepConfig
from ..utils.logger import (
    ConfigError,
    NumericalError,
    ValidationError,
    get_logger,
    setup_logger,
)

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def run_sweep(config: SweepConfig) -> List[RiskRecord]:
    """One record per (n, cond, eta, estimator) grid point.

    The population of a grid point depends only on (seed, eta index), so
    curves along n and cond share eigenvectors and eigenvalue draws.
    """
    root = RngStream(config.seed)
    records = []
    for n in config.n_values:
        for cond in config.cond_values:
            for eta_index, eta in enumerate(config.eta_values):
                scenario = Scenario(p=config.p, n=n, target_cond=cond, eta=eta)
                rng = RngStream(root.child(eta_index).derive_seed())
                model = scenario_population(scenario, rng)
                point = {}
                for kind in config.estimators:
                    record = run_risk(scenario, kind, config.trials, rng,
                                      workers=config.workers, model=model)
                    point[kind] = record
                    records.append(record)
                    logger.info(
                        f"{scenario.scenario_id} {kind.value}: "
                        f"{record.mean_loss:.6g} +/- {record.stderr_loss:.3g}"
                    )
                if EstimatorKind.FSOPT in point and EstimatorKind.ORACLE in point:
                    gap = (point[EstimatorKind.ORACLE].mean_loss
                           - point[EstimatorKind.FSOPT].mean_loss)
                    logger.info(f"{scenario.scenario_id} Oracle - FSOPT gap: {gap:.6g}")
    return records


def write_records(records: Sequence[RiskRecord], out: Path,
                  deterministic: bool = False) -> None:
    """Write records as CSV; a timestamp comment leads unless ``deterministic``."""
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="", encoding="utf-8") as f:
        if not deterministic:
            f.write(f"# generated {datetime.now().isoformat(timespec='seconds')}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for record in records:
            writer.writerow(record.to_row())


class CLI:
    """Command-line interface for cholreg."""

    def create_parser(self) -> argparse.ArgumentParser:
        """Create and configure the argument parser."""
        parser = argparse.ArgumentParser(
            prog="cholreg",
            description="cholreg - regularized Cholesky covariance estimation "
                        "and Stein-risk experiments",
            formatter_class=argparse.RawDescriptionHelpFormatter
        )
        parser.add_argument(
            "--log-file",
            type=Path,
            help="Also write logs to this file (rotated)"
        )

        subparsers = parser.add_subparsers(dest="command", help="Available commands")

        # Sweep command
        sweep_parser = subparsers.add_parser(
            "sweep", help="Monte-Carlo Stein-risk sweep written as CSV"
        )
        sweep_parser.add_argument("--config", type=Path, help="Key-value config file")
        sweep_parser.add_argument(
            "--preset",
            choices=sorted(PRESETS),
            help="Start from a built-in experiment grid"
        )
        sweep_parser.add_argument("--p", help="Dimension")
        sweep_parser.add_argument("--n", help="Sample counts, comma-separated")
        sweep_parser.add_argument("--cond", help="Target condition numbers")
        sweep_parser.add_argument("--eta", help="Large-eigenvalue fractions")
        sweep_parser.add_argument(
            "--estimators",
            help="Comma-separated subset of FSOPT, Oracle, RCF, LWLS"
        )
        sweep_parser.add_argument("--trials", help="Trials per grid point")
        sweep_parser.add_argument("--seed", help="Master seed")
        sweep_parser.add_argument("--out", help="Output CSV path")
        sweep_parser.add_argument("--workers", help="Threads per grid point")
        sweep_parser.add_argument(
            "--deterministic",
            action="store_true",
            help="Omit the timestamp line so reruns are byte-identical"
        )

        # Selftest command
        selftest_parser = subparsers.add_parser(
            "selftest", help="Run the fast invariant checks"
        )
        selftest_parser.add_argument(
            "--seed", type=int, default=DEFAULT_SEED, help="Seed for the checks"
        )
        selftest_parser.add_argument(
            "--inject-fault",
            action="append",
            choices=KNOWN_FAULTS,
            default=[],
            help=argparse.SUPPRESS
        )

        # Closed-form Oracle risk
        risk_parser = subparsers.add_parser(
            "oracle-risk", help="Print the closed-form Oracle risk"
        )
        risk_parser.add_argument("--p", type=int, required=True, help="Dimension")
        risk_parser.add_argument(
            "--n", required=True, help="Sample counts, comma-separated"
        )

        return parser

    def cmd_sweep(self, config: SweepConfig) -> int:
        records = run_sweep(config)
        write_records(records, config.out, deterministic=config.deterministic)
        print(f"Wrote {len(records)} records to {config.out}")
        return EXIT_OK

    def cmd_selftest(self, seed: int, faults: Sequence[str] = ()) -> int:
        passed, report = run_selftest(seed=seed, faults=faults)
        for line in report:
            print(line)
        print("selftest passed" if passed else "selftest FAILED")
        return EXIT_OK if passed else EXIT_RUNTIME

    def cmd_oracle_risk(self, p: int, n_values: Sequence[int]) -> int:
        print("p,n,oracle_risk")
        for n in n_values:
            print(f"{p},{n},{format_real(oracle_risk_closed_form(p, n))}")
        return EXIT_OK

    def _sweep_config(self, args: argparse.Namespace) -> SweepConfig:
        config = Config(config_file=args.config, preset=args.preset)
        overrides: Dict[str, Optional[str]] = {
            "p": args.p,
            "n": args.n,
            "cond": args.cond,
            "eta": args.eta,
            "estimators": args.estimators,
            "trials": args.trials,
            "seed": args.seed,
            "out": args.out,
            "workers": args.workers,
        }
        config.apply_overrides(overrides)
        if args.deterministic:
            config.set_config("deterministic", True)
        return config.to_sweep_config()

    def run(self, args: Optional[List[str]] = None) -> int:
        """Run the CLI with the given arguments."""
        parser = self.create_parser()
        parsed_args = parser.parse_args(args)
        setup_logger(log_file=parsed_args.log_file)

        if not parsed_args.command:
            parser.print_help()
            return EXIT_CONFIG

        try:
            if parsed_args.command == "sweep":
                return self.cmd_sweep(self._sweep_config(parsed_args))

            elif parsed_args.command == "selftest":
                return self.cmd_selftest(parsed_args.seed, parsed_args.inject_fault)

            elif parsed_args.command == "oracle-risk":
                try:
                    n_values = [int(v) for v in parsed_args.n.split(",") if v.strip()]
                except ValueError as e:
                    raise ConfigError(f"Invalid --n: {e}")
                return self.cmd_oracle_risk(parsed_args.p, n_values)

        except (ConfigError, ValidationError) as e:
            logger.error(f"Configuration error: {e}")
            print(f"Error: {e}", file=sys.stderr)
            return EXIT_CONFIG
        except (NumericalError, OSError) as e:
            logger.error(f"Error executing command: {e}")
            print(f"Error: {e}", file=sys.stderr)
            return EXIT_RUNTIME

        return EXIT_OK


def main():
    """Entry point for the CLI."""
    cli = CLI()
    sys.exit(cli.run())


if __name__ == "__main__":
    main()
