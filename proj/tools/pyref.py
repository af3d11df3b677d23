#!/usr/bin/env python3
"""Line-oriented regex oracle backed by Python's re module.

Protocol: one request per line, "base64(pattern)\tbase64(string)", answered
with "1" or "0".  Bytes are mapped through latin-1 so arbitrary byte values
survive the round trip.
"""
import base64
import re
import sys


def main():
    cache = {}
    for line in sys.stdin:
        line = line.rstrip("\n")
        if not line:
            continue
        p64, _, s64 = line.partition("\t")
        pattern = base64.b64decode(p64).decode("latin-1")
        subject = base64.b64decode(s64).decode("latin-1")
        compiled = cache.get(pattern)
        if compiled is None:
            compiled = cache[pattern] = re.compile(pattern, re.DOTALL)
        sys.stdout.write("1\n" if compiled.fullmatch(subject) else "0\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
