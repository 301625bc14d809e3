"""Balance sheets and running totals."""

from collections import OrderedDict
from decimal import Decimal


def compute_running_balance(transactions, opening=Decimal("0")):
    balance = opening
    lines = []
    ordered = sorted(transactions, key=lambda t: t["date"])
    for txn in ordered:
        if txn.get("pending"):
            continue
        balance += txn["amount"]
        lines.append((txn["date"], txn["memo"], txn["amount"], balance))
    return lines


def aggregate_by_month(transactions):
    months = OrderedDict()
    for txn in sorted(transactions, key=lambda t: t["date"]):
        key = (txn["date"].year, txn["date"].month)
        bucket = months.setdefault(key, {"income": Decimal("0"), "expense": Decimal("0")})
        if txn["amount"] >= 0:
            bucket["income"] += txn["amount"]
        else:
            bucket["expense"] += -txn["amount"]
    return months


def render_balance_table(lines):
    rows = ["date        memo                      amount     balance"]
    for date, memo, amount, balance in lines:
        rows.append(f"{date}  {memo[:24]:<24}  {amount:>9}  {balance:>10}")
    return "\n".join(rows)
