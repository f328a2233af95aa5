#!/usr/bin/env python3
# Copyright 2026 The matchbench Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Reference matcher plugin: answers top_matches with normalized edit
similarity over canonicalized attribute names (same scores as name_edit).

Protocol: one JSON request line on stdin, one line per source attribute on
stdout, then {"op": "done"}.
"""
import json
import sys


def _is_alnum(b):
    return (48 <= b <= 57) or (65 <= b <= 90) or (97 <= b <= 122) or b >= 0x80


def canonical(name):
    raw = name.encode("utf-8")
    out = bytearray()
    pending = False
    for i, c in enumerate(raw):
        if not _is_alnum(c):
            pending = len(out) > 0
            continue
        if not pending and out and 65 <= c <= 90:
            prev = raw[i - 1]
            nxt_lower = i + 1 < len(raw) and 97 <= raw[i + 1] <= 122
            if (97 <= prev <= 122) or (48 <= prev <= 57) or (65 <= prev <= 90 and nxt_lower):
                pending = True
        if pending:
            out.append(32)
            pending = False
        out.append(c + 32 if 65 <= c <= 90 else c)
    return bytes(out)


def levenshtein(a, b):
    if len(a) < len(b):
        a, b = b, a
    row = list(range(len(b) + 1))
    for i in range(1, len(a) + 1):
        diag, row[0] = row[0], i
        for j in range(1, len(b) + 1):
            cur = row[j]
            row[j] = min(row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] != b[j - 1]))
            diag = cur
    return row[len(b)]


def similarity(a, b):
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def main():
    request = json.loads(sys.stdin.readline())
    k = int(request["k"])
    targets = [(t["name"], canonical(t["name"])) for t in request["target"]]
    for source in request["source"]:
        s = canonical(source["name"])
        scored = [(similarity(s, c), name) for name, c in targets]
        scored = [x for x in scored if x[0] > 0.0]
        scored.sort(key=lambda x: (-x[0], x[1].encode("utf-8")))
        matches = [{"target": name, "score": score} for score, name in scored[:k]]
        print(json.dumps({"source": source["name"], "matches": matches}))
    print(json.dumps({"op": "done"}))
    sys.stdout.flush()


if __name__ == "__main__":
    main()
