#!/usr/bin/env python3
"""Independent reference scorer used to freeze expected values in the C++
tests. Implements the metric definitions directly from first principles and
shares no code with the harness.

Usage:
  python3 score_oracle.py stats CORPUS.jsonl
  python3 score_oracle.py naive CORPUS.jsonl {standard|dedup} [both|seeker-only]
  python3 score_oracle.py score CORPUS.jsonl PREDICTIONS.jsonl [sr_cutoff] [denominator]
"""
import json
import re
import sys
from fractions import Fraction

MENTION = re.compile(r"@(\d+)")


def load(path):
    with open(path) as f:
        return [json.loads(line) for line in f if line.strip()]


def merge_turns(d):
    turns = []
    for m in d["messages"]:
        role = "seeker" if m["senderWorkerId"] == d["initiatorWorkerId"] else "recommender"
        if not turns or turns[-1][0] != role:
            turns.append([role, []])
        if m["text"]:
            turns[-1][1].append(m["text"])
    return [(role, " ".join(texts)) for role, texts in turns]


def mentions_of(text):
    return [int(x) for x in MENTION.findall(text)]


def build_instances(d):
    turns = merge_turns(d)
    out = []
    for ti in range(1, len(turns)):
        role, text = turns[ti]
        if role != "recommender":
            continue
        gt = []
        for item in mentions_of(text):
            if item not in gt:
                gt.append(item)
        if not gt:
            continue
        out.append({
            "id": f"{d['conversationId']}#{ti}",
            "dialogue": d["conversationId"],
            "turns": len(turns),
            "rec_turns": sum(1 for r, _ in turns if r == "recommender"),
            "ctx": [(r, mentions_of(t)) for r, t in turns[:ti]],
            "gt": gt,
        })
    return out


def dedup(instances):
    out = []
    for inst in instances:
        ctx_items = set(x for _, turn in inst["ctx"] for x in turn)
        gt = [g for g in inst["gt"] if g not in ctx_items]
        if gt:
            kept = dict(inst)
            kept["gt"] = gt
            out.append(kept)
    return out


def recall(ranking, gt, k):
    return Fraction(len(set(ranking[:k]) & set(gt)), len(gt))


def seeker_forms(d):
    q = d.get("initiatorQuestions") or {}
    return {int(key): f for key, f in q.items()} if isinstance(q, dict) else {}


def score_instances(instances, forms, preds, ks=(1, 10, 50), c=1, denominator="all-turns"):
    rec = {k: Fraction(0) for k in ks}
    dialogues = {}
    for inst in instances:
        ranking = preds[inst["id"]]
        for k in ks:
            rec[k] += recall(ranking, inst["gt"], k)
        dlg = dialogues.setdefault(inst["dialogue"],
                                   {"success": False, "reward": Fraction(0),
                                    "turns": inst["turns"], "rec_turns": inst["rec_turns"]})
        hits = [x for x in ranking[:c] if x in inst["gt"]]
        if hits:
            dlg["success"] = True
            best = Fraction(0)
            for item in hits:
                f = forms.get(inst["dialogue"], {}).get(item)
                if f and f.get("liked") == 1:
                    r = Fraction(1)
                elif f and f.get("seen") == 1:
                    r = Fraction(1, 2)
                else:
                    r = Fraction(0)
                best = max(best, r)
            dlg["reward"] += best

    n = len(instances)
    result = {f"R@{k}": float(rec[k] / n) for k in ks}
    result["instances"] = n
    result["dialogues"] = len(dialogues)
    result["SR"] = float(Fraction(sum(1 for d in dialogues.values() if d["success"]),
                                  len(dialogues)))
    total = Fraction(0)
    for d in dialogues.values():
        turns = d["rec_turns"] if denominator == "recommender-turns" else d["turns"]
        total += d["reward"] / turns
    result["RDL"] = float(total / len(dialogues))
    return result


def cmd_stats(corpus):
    instances = [i for d in corpus for i in build_instances(d)]
    gt_items = set(g for i in instances for g in i["gt"])
    tokens = []
    map_ids = set()
    for d in corpus:
        for m in d["messages"]:
            tokens.extend(mentions_of(m["text"]))
        mm = d.get("movieMentions") or {}
        if isinstance(mm, dict):
            map_ids |= set(int(k) for k in mm)
    overlap = sum(1 for inst in instances
                  if set(x for _, turn in inst["ctx"] for x in turn) & set(inst["gt"]))
    return {
        "conversations": len(corpus),
        "rec_instances": len(instances),
        "gt_occurrences": sum(len(i["gt"]) for i in instances),
        "unique_gt": len(gt_items),
        "raw_tokens": len(tokens),
        "unique_tokens": len(set(tokens)),
        "map_entries": sum(len(d.get("movieMentions") or {}) for d in corpus),
        "unique_map": len(map_ids),
        "repetition_rate": overlap / len(instances) if instances else 0.0,
        "dedup_instances": len(dedup(instances)),
    }


def cmd_naive(corpus, variant, scope):
    instances = [i for d in corpus for i in build_instances(d)]
    preds = {}
    for inst in instances:
        flat = []
        for role, turn in inst["ctx"]:
            if scope == "seeker-only" and role != "seeker":
                continue
            flat.extend(turn)
        ranking = []
        for x in reversed(flat):
            if x not in ranking:
                ranking.append(x)
        preds[inst["id"]] = ranking
    if variant == "dedup":
        instances = dedup(instances)
    forms = {d["conversationId"]: seeker_forms(d) for d in corpus}
    return score_instances(instances, forms, preds)


def main():
    cmd = sys.argv[1]
    corpus = load(sys.argv[2])
    if cmd == "stats":
        print(json.dumps(cmd_stats(corpus), indent=2))
    elif cmd == "naive":
        variant = sys.argv[3] if len(sys.argv) > 3 else "standard"
        scope = sys.argv[4] if len(sys.argv) > 4 else "both"
        print(json.dumps(cmd_naive(corpus, variant, scope), indent=2))
    elif cmd == "score":
        predictions = load(sys.argv[3])
        c = int(sys.argv[4]) if len(sys.argv) > 4 else 1
        denominator = sys.argv[5] if len(sys.argv) > 5 else "all-turns"
        instances = [i for d in corpus for i in build_instances(d)]
        forms = {d["conversationId"]: seeker_forms(d) for d in corpus}
        preds = {p["instance_id"]: p["ranking"] for p in predictions}
        print(json.dumps(score_instances(instances, forms, preds, c=c,
                                         denominator=denominator), indent=2))
    else:
        raise SystemExit("unknown command")


if __name__ == "__main__":
    main()
