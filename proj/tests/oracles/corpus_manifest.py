#!/usr/bin/env python3
# Copyright 2026 The Fablegen Authors.
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

"""Writes manifest.json for a canonical-JSON corpus directory.

Stand-alone counter used to produce the expected values the C++ corpus
statistics are checked against. It shares no code with the library.

    python3 corpus_manifest.py tests/fixtures/corpus > manifest.json
"""

import json
import pathlib
import statistics
import string
import sys

ELEMENTS = ["character", "setting", "feeling", "action", "causal_relationship",
            "outcome_resolution", "prediction"]


def tokens(text):
    out = []
    for piece in text.split():
        piece = piece.strip(string.punctuation).lower()
        if piece:
            out.append(piece)
    return out


def summary(values):
    return {"mean": statistics.fmean(values), "sd": statistics.pstdev(values),
            "min": min(values), "max": max(values)}


def main(root):
    root = pathlib.Path(root)
    splits = json.loads((root / "splits.json").read_text())
    stories = {}
    for path in sorted((root / "stories").glob("*.json")):
        doc = json.loads(path.read_text())
        stories[doc["story_id"]] = doc
    manifest = {"book_count": len(stories),
                "qa_count": sum(len(s["qa_pairs"]) for s in stories.values()),
                "splits": {}}
    for split, ids in sorted(splits.items()):
        docs = [stories[i] for i in ids]
        sec_per_story, tok_per_story, tok_per_sec = [], [], []
        q_per_story, q_per_sec, tok_per_q, tok_per_a = [], [], [], []
        categories = {e: 0 for e in ELEMENTS}
        for d in docs:
            sec_per_story.append(len(d["sections"]))
            tok_per_story.append(sum(len(tokens(s["text"])) for s in d["sections"]))
            q_per_story.append(len(d["qa_pairs"]))
            for s in d["sections"]:
                tok_per_sec.append(len(tokens(s["text"])))
                q_per_sec.append(sum(1 for p in d["qa_pairs"]
                                     if s["index"] in p["section_indices"]))
            for p in d["qa_pairs"]:
                tok_per_q.append(len(tokens(p["question"])))
                tok_per_a.append(len(tokens(p["answer"])))
                categories[p["element"]] += 1
        manifest["splits"][split] = {
            "book_count": len(docs),
            "qa_count": len(tok_per_q),
            "sections_per_story": summary(sec_per_story),
            "tokens_per_story": summary(tok_per_story),
            "tokens_per_section": summary(tok_per_sec),
            "questions_per_story": summary(q_per_story),
            "questions_per_section": summary(q_per_sec),
            "tokens_per_question": summary(tok_per_q),
            "tokens_per_answer": summary(tok_per_a),
            "categories": categories,
        }
    json.dump(manifest, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main(sys.argv[1])
