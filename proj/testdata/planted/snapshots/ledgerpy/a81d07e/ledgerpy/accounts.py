"""Account model and transfers."""

from decimal import Decimal


class AccountClosedError(RuntimeError):
    pass


class Account:
    def __init__(self, number, owner, currency="USD"):
        self.number = number
        self.owner = owner
        self.currency = currency
        self.balance = Decimal("0")
        self.closed = False
        self.history = []

    def deposit(self, amount, memo=""):
        if self.closed:
            raise AccountClosedError(self.number)
        self.balance += amount
        self.history.append(("deposit", amount, memo))

    def withdraw(self, amount, memo=""):
        if self.closed:
            raise AccountClosedError(self.number)
        if amount > self.balance:
            raise ValueError("insufficient funds")
        self.balance -= amount
        self.history.append(("withdraw", amount, memo))

    def close_account(self, settlement_account=None):
        if self.balance and settlement_account is None:
            raise ValueError("non-zero balance needs a settlement account")
        if settlement_account is not None:
            transfer_funds(self, settlement_account, self.balance, "closing settlement")
        self.closed = True


def transfer_funds(source, target, amount, memo=""):
    if source.currency != target.currency:
        raise ValueError("cross-currency transfers go through convert_amount")
    source.withdraw(amount, memo)
    target.deposit(amount, memo)
    return source.balance, target.balance
