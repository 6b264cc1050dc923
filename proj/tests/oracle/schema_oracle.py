"""Reference verdicts from the jsonschema package.

Input: one JSON document per line, {"schema": ..., "texts": [...]}.
Output: one line per input line, a '1' (accepted) or '0' (rejected) per text.
"""
import json
import sys

from jsonschema import Draft202012Validator


def verdict(validator, text):
    try:
        doc = json.loads(text, parse_constant=lambda name: (_ for _ in ()).throw(ValueError(name)))
    except ValueError:
        return "0"
    return "1" if validator.is_valid(doc) else "0"


def main(in_path, out_path):
    with open(in_path, encoding="utf-8") as src, open(out_path, "w", encoding="utf-8") as dst:
        for line in src:
            group = json.loads(line)
            Draft202012Validator.check_schema(group["schema"])
            validator = Draft202012Validator(group["schema"])
            dst.write("".join(verdict(validator, t) for t in group["texts"]) + "\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
