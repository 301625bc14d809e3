"""Command-line entry point."""

import argparse
import sys

from ledgerpy.importer.csv_import import import_statement
from ledgerpy.reports.balance import compute_running_balance, render_balance_table


def parse_args(argv):
    parser = argparse.ArgumentParser(prog="ledgerpy")
    parser.add_argument("statement", help="CSV bank statement")
    parser.add_argument("--opening", default="0", help="opening balance")
    parser.add_argument("--date-column", type=int, default=0)
    parser.add_argument("--memo-column", type=int, default=1)
    parser.add_argument("--amount-column", type=int, default=2)
    return parser.parse_args(argv)


def main(argv=None):
    args = parse_args(sys.argv[1:] if argv is None else argv)
    with open(args.statement, encoding="utf-8") as handle:
        rows = import_statement(handle.read(), {
            "date": args.date_column,
            "memo": args.memo_column,
            "amount": args.amount_column,
        })
    print(render_balance_table(compute_running_balance(rows)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
