"""Import bank statements exported as CSV."""

import csv
import datetime
import io

DATE_FORMATS = ("%Y-%m-%d", "%d/%m/%Y", "%m/%d/%Y", "%d.%m.%Y")


def detect_delimiter(sample):
    counts = {d: sample.count(d) for d in (",", ";", "\t")}
    best = max(counts, key=counts.get)
    if counts[best] == 0:
        raise ValueError("could not detect a delimiter")
    return best


def normalize_date(text):
    for fmt in DATE_FORMATS:
        try:
            return datetime.datetime.strptime(text.strip(), fmt).date()
        except ValueError:
            continue
    raise ValueError(f"unrecognized date {text!r}")


def parse_row(row, columns):
    record = {}
    for name, index in columns.items():
        if index >= len(row):
            raise IndexError(f"row has no column {name}")
        record[name] = row[index].strip()
    record["date"] = normalize_date(record["date"])
    return record


def import_statement(text, columns):
    header, _, _ = text.partition("\n")
    delimiter = detect_delimiter(header)
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    next(reader, None)
    rows = []
    for row in reader:
        if not row:
            continue
        rows.append(parse_row(row, columns))
    return rows
