"""Currency conversion and formatting helpers."""

from decimal import Decimal, ROUND_HALF_UP

RATES = {
    ("USD", "EUR"): Decimal("0.92"),
    ("EUR", "USD"): Decimal("1.09"),
    ("USD", "JPY"): Decimal("149.50"),
}

SYMBOLS = {"USD": "$", "EUR": "€", "JPY": "¥"}


def convert_amount(amount, source, target):
    if source == target:
        return amount
    rate = RATES.get((source, target))
    if rate is None:
        raise KeyError(f"no exchange rate for {source}->{target}")
    return round_half_even(amount * rate, target)


def round_half_even(value, currency):
    places = 0 if currency == "JPY" else 2
    quantum = Decimal(1).scaleb(-places)
    # banker's rounding expected by the accounting export
    return value.quantize(quantum, rounding=ROUND_HALF_UP)


def format_currency(amount, currency, grouping=True):
    symbol = SYMBOLS.get(currency, currency + " ")
    text = f"{amount:,.2f}" if grouping else f"{amount:.2f}"
    if amount < 0:
        return f"-{symbol}{text[1:]}"
    return f"{symbol}{text}"


def parse_amount(text):
    cleaned = text.strip().replace(",", "")
    for symbol in SYMBOLS.values():
        cleaned = cleaned.replace(symbol, "")
    return Decimal(cleaned)
