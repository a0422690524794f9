#!/usr/bin/env python3
"""Writes the committed test fixtures (mini corpora, scored fixture, catalogs).

Regenerate with:  python3 tests/oracle/make_fixtures.py
The outputs are deterministic; diffs should be empty on a clean tree.
"""
import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.normpath(os.path.join(HERE, "..", "data"))


def msg(mid, sender, text, offset):
    return {"messageId": mid, "text": text, "timeOffset": offset, "senderWorkerId": sender}


def dialogue(cid, initiator, respondent, messages, mentions, init_q, resp_q):
    return {
        "conversationId": cid,
        "initiatorWorkerId": initiator,
        "respondentWorkerId": respondent,
        "messages": messages,
        "movieMentions": mentions,
        "initiatorQuestions": init_q,
        "respondentQuestions": resp_q,
    }


def form(suggested, seen, liked):
    return {"suggested": suggested, "seen": seen, "liked": liked}


def mini_test():
    ds = []
    # 1001: four alternating turns, the second recommendation repeats a
    # context item (224).
    ds.append(dialogue(
        "1001", 10, 20,
        [
            msg(1, 10, "Hi! I want something funny like @111 .", 0),
            msg(2, 20, "Have you seen @222 ? Also @223 is great.", 10),
            msg(3, 10, "I loved @222 ! Maybe something like @224 ?", 20),
            msg(4, 20, "Then try @225 and @224 .", 30),
        ],
        {"111": "Old School (2003)", "222": "Superbad (2007)", "223": "Step Brothers (2008)",
         "224": "Police Academy (1984)", "225": "Police Academy 2: Their First Assignment (1985)"},
        {"111": form(0, 1, 1), "222": form(1, 1, 1), "223": form(1, 0, 2),
         "224": form(0, 1, 1), "225": form(1, 0, 2)},
        {"111": form(0, 1, 1), "222": form(1, 0, 2), "223": form(1, 0, 2),
         "224": form(1, 1, 1), "225": form(1, 0, 2)},
    ))
    # 1002: consecutive same-speaker messages on both sides, duplicate token
    # within the recommendation turn.
    ds.append(dialogue(
        "1002", 30, 40,
        [
            msg(5, 30, "Looking for scary movies.", 0),
            msg(6, 30, "I liked @331 a lot.", 5),
            msg(7, 40, "Try @332 !", 10),
            msg(8, 40, "Oh and @332 is also similar to @333 .", 15),
            msg(9, 30, "Thanks!", 20),
        ],
        {"331": "The Conjuring (2013)", "332": "Insidious (2010)", "333": "Sinister (2012)"},
        {"331": form(0, 1, 1), "332": form(1, 2, 2), "333": form(1, 1, 0)},
        {"331": form(0, 1, 1), "332": form(1, 0, 2), "333": form(1, 0, 2)},
    ))
    # 1003: recommendation in the very first turn (yields no instance).
    ds.append(dialogue(
        "1003", 50, 60,
        [
            msg(10, 60, "Welcome! Try @441 .", 0),
            msg(11, 50, "Hmm, I prefer comedies like @442 .", 10),
            msg(12, 60, "Then @443 it is.", 20),
        ],
        {"441": "The Matrix (1999)", "442": "Anchorman (2004)", "443": "The Hangover (2009)"},
        {"441": form(1, 0, 2), "442": form(0, 1, 1), "443": form(1, 0, 2)},
        {"441": form(1, 0, 2), "442": form(0, 1, 1), "443": form(1, 0, 2)},
    ))
    # 1004: recommender never mentions a movie; zero instances.
    ds.append(dialogue(
        "1004", 70, 80,
        [
            msg(13, 70, "Any drama recs?", 0),
            msg(14, 80, "What have you enjoyed lately?", 10),
            msg(15, 70, "Mostly @551 .", 20),
        ],
        {"551": "Titanic (1997)"},
        {"551": form(0, 1, 1)},
        {"551": form(0, 1, 1)},
    ))
    # 1005: dangling @999, unused map entry 663, an empty message.
    ds.append(dialogue(
        "1005", 90, 95,
        [
            msg(16, 90, "I like @661 and @999 .", 0),
            msg(17, 95, "", 10),
            msg(18, 95, "You might like @662 .", 15),
        ],
        {"661": "Up (2009)", "662": "Coco (2017)", "663": "Brave (2012)"},
        {"661": form(0, 1, 1), "662": form(1, 2, 2), "663": form(0, 2, 2)},
        {"661": form(0, 1, 1), "662": form(1, 0, 2), "663": form(0, 2, 2)},
    ))
    # 1006: the only recommendation repeats the seeker's movie; dedup drops it.
    ds.append(dialogue(
        "1006", 100, 105,
        [
            msg(19, 100, "My favorite is @771 .", 0),
            msg(20, 105, "Great pick, @771 !", 10),
        ],
        {"771": "Inception (2010)"},
        {"771": form(0, 1, 1)},
        {"771": form(1, 1, 1)},
    ))
    # 1007: six merged turns, two instances, trailing mention-free turns.
    ds.append(dialogue(
        "1007", 110, 115,
        [
            msg(21, 110, "I want an action movie.", 0),
            msg(22, 115, "Check out @881 .", 10),
            msg(23, 110, "Seen it. What else?", 20),
            msg(24, 115, "Maybe @882 or @883 .", 30),
            msg(25, 110, "@882 looks good.", 40),
            msg(26, 115, "Enjoy!", 50),
        ],
        {"881": "Mad Max: Fury Road (2015)", "882": "John Wick (2014)", "883": "Die Hard (1988)"},
        {"881": form(1, 1, 0), "882": form(1, 0, 2), "883": form(1, 2, 2)},
        {"881": form(1, 0, 2), "882": form(1, 0, 2), "883": form(1, 0, 2)},
    ))
    return ds


def mini_train():
    ds = []
    ds.append(dialogue(
        "2001", 10, 11,
        [
            msg(101, 10, "Hi I liked @6001 .", 0),
            msg(102, 11, "Try @7001 and @7002 .", 10),
        ],
        {"6001": "Alien (1979)", "7001": "Heat (1995)", "7002": "Ronin (1998)"},
        {"6001": form(0, 1, 1), "7001": form(1, 0, 2), "7002": form(1, 0, 2)},
        {"6001": form(0, 1, 1), "7001": form(1, 0, 2), "7002": form(1, 0, 2)},
    ))
    ds.append(dialogue(
        "2002", 20, 21,
        [
            msg(103, 20, "Recommend something.", 0),
            msg(104, 21, "How about @7001 ?", 10),
            msg(105, 20, "More?", 20),
            msg(106, 21, "@7003 too.", 30),
        ],
        {"7001": "Heat (1995)", "7003": "Halloween (1978)"},
        {"7001": form(1, 1, 1), "7003": form(1, 0, 2)},
        {"7001": form(1, 1, 1), "7003": form(1, 0, 2)},
    ))
    ds.append(dialogue(
        "2003", 30, 31,
        [
            msg(107, 30, "Action please.", 0),
            msg(108, 31, "@7001 , @7002 , and @7004 .", 10),
        ],
        {"7001": "Heat (1995)", "7002": "Ronin (1998)", "7004": "Speed (1994)"},
        {"7001": form(1, 0, 2), "7002": form(1, 0, 2), "7004": form(1, 0, 2)},
        {"7001": form(1, 0, 2), "7002": form(1, 0, 2), "7004": form(1, 0, 2)},
    ))
    ds.append(dialogue(
        "2004", 40, 41,
        [
            msg(109, 40, "Horror?", 0),
            msg(110, 41, "@7003 .", 10),
        ],
        {"7003": "Halloween (1978)"},
        {"7003": form(1, 0, 2)},
        {"7003": form(1, 0, 2)},
    ))
    ds.append(dialogue(
        "2005", 50, 51,
        [
            msg(111, 51, "Welcome, try @7005 .", 0),
            msg(112, 50, "thanks", 10),
        ],
        {"7005": "Twister (1996)"},
        {"7005": form(1, 0, 2)},
        {"7005": form(1, 0, 2)},
    ))
    return ds


def scored_fixture():
    """Ten uniform dialogues, twenty instances, plus a crafted prediction file.

    Dialogue x (1..10) mentions A=4000+10x+1 (seeker), then recommends
    B=..2 (instance #1), then C=..3 and D=..4 (instance #3). Seeker forms:
    B liked, C merely seen, D neither.
    """
    dialogues = []
    predictions = []
    filler = iter(range(9001, 9999))

    def f(n):
        return [next(filler) for _ in range(n)]

    for x in range(1, 11):
        a, b, c, d = (4000 + 10 * x + i for i in (1, 2, 3, 4))
        cid = str(3000 + x)
        seeker, rec = 200 + x, 300 + x
        dialogues.append(dialogue(
            cid, seeker, rec,
            [
                msg(1000 + 4 * x, seeker, f"hello, I enjoyed @{a} .", 0),
                msg(1001 + 4 * x, rec, f"try @{b} .", 10),
                msg(1002 + 4 * x, seeker, "ok, anything else?", 20),
                msg(1003 + 4 * x, rec, f"also @{c} and @{d} .", 30),
            ],
            {str(a): f"Movie A{x}", str(b): f"Movie B{x}", str(c): f"Movie C{x}",
             str(d): f"Movie D{x}"},
            {str(a): form(0, 1, 1), str(b): form(1, 0, 1), str(c): form(1, 1, 0),
             str(d): form(1, 0, 0)},
            {str(a): form(0, 1, 1), str(b): form(1, 0, 2), str(c): form(1, 0, 2),
             str(d): form(1, 0, 2)},
        ))

        # instance #1: B hits at rank 1 (x<=3), rank 2 (x in 4..5), rank 11
        # (x == 6), otherwise misses.
        if x <= 3:
            r1 = [b] + f(11)
        elif x <= 5:
            r1 = f(1) + [b] + f(10)
        elif x == 6:
            r1 = f(10) + [b] + f(1)
        else:
            r1 = f(12)
        predictions.append({"instance_id": f"{cid}#1", "ranking": r1})

        # instance #3: C at rank 1 (x in {1,4,7}), D at rank 3 (x in {2,8}),
        # and for x == 7 additionally D at rank 2.
        if x in (1, 4):
            r3 = [c] + f(11)
        elif x == 7:
            r3 = [c, d] + f(10)
        elif x in (2, 8):
            r3 = f(2) + [d] + f(9)
        else:
            r3 = f(12)
        predictions.append({"instance_id": f"{cid}#3", "ranking": r3})

    return dialogues, predictions


def write_jsonl(path, records):
    with open(path, "w") as out:
        for record in records:
            out.write(json.dumps(record, separators=(",", ":")) + "\n")


def main():
    os.makedirs(DATA, exist_ok=True)
    write_jsonl(os.path.join(DATA, "mini_test.jsonl"), mini_test())
    write_jsonl(os.path.join(DATA, "mini_train.jsonl"), mini_train())
    dialogues, predictions = scored_fixture()
    write_jsonl(os.path.join(DATA, "fixture_scored.jsonl"), dialogues)
    write_jsonl(os.path.join(DATA, "fixture_predictions.jsonl"), predictions)

    with open(os.path.join(DATA, "half_catalog.cat"), "w") as out:
        out.write("catalog_id=half\n")
        for item in (222, 224, 332, 771, 881):
            out.write(f"{item}\n")

    with open(os.path.join(DATA, "remap_catalog.cat"), "w") as out:
        out.write("catalog_id=remap\n")
        out.write("222,9222\n")
        out.write("223,9223\n")
        out.write("224,9224\n")
        out.write("225,9225\n")
        out.write("111,9111\n")

    print("fixtures written to", DATA)


if __name__ == "__main__":
    main()
