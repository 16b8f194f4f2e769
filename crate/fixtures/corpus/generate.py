"""Regenerates the synthetic benchmark corpus in this directory.

Two groups of 100 four-city itineraries over LHR -> CDG -> FRA -> IST with
the durations in durations.txt (4h buffer, 2x cap):

  gemini-2.0   33 itineraries with 1 bad segment, 15 with 2  -> 48 invalid, 63 bad segments
  gpt-4o-mini  40 itineraries with 3 bad segments, 57 with 2 -> 97 invalid, 234 bad segments

Every stay is 72h, so no stay issues occur. Bad segments cycle through
overlap, too-short and too-long gaps.
"""
import json
from datetime import datetime, timedelta
from pathlib import Path

HERE = Path(__file__).parent
ROUTE = [("London", "LHR"), ("Paris", "CDG"), ("Frankfurt", "FRA"), ("Istanbul", "IST")]
FLIGHT = {("LHR", "CDG"): 75, ("CDG", "FRA"): 70, ("FRA", "IST"): 180}
BUFFER = 240
STAY = timedelta(hours=72)


def t_min(a, b):
    return FLIGHT[(a, b)] + BUFFER


def gap(kind, tmin):
    return {
        "ok": tmin + 60,
        "overlap": -120,
        "short": tmin - 60,
        "long": 2 * tmin + 600,
    }[kind]


def itinerary(start, bad):
    """bad: {segment index: kind}"""
    stops = []
    arrival = start
    for i, (name, code) in enumerate(ROUTE):
        departure = arrival + STAY
        stops.append({
            "place": f"{name} ({code})",
            "arrival_time": arrival.strftime("%Y-%m-%d %H:%M"),
            "departure_time": departure.strftime("%Y-%m-%d %H:%M"),
        })
        if i + 1 < len(ROUTE):
            tm = t_min(code, ROUTE[i + 1][1])
            arrival = departure + timedelta(minutes=gap(bad.get(i, "ok"), tm))
    return {"itinerary": stops}


KINDS = ["overlap", "short", "long"]


def plan(tag):
    if tag == "gemini-2.0":
        counts = [1] * 33 + [2] * 15 + [0] * 52
    else:
        counts = [3] * 40 + [2] * 57 + [0] * 3
    for n, k in enumerate(counts):
        segs = [(n + j) % 3 for j in range(k)]
        yield n, {s: KINDS[(n + s) % 3] for s in segs}


manifest = []
for tag in ["gemini-2.0", "gpt-4o-mini"]:
    (HERE / tag).mkdir(exist_ok=True)
    for n, bad in plan(tag):
        start = datetime(2025, 6, 1, 8, 0) + timedelta(hours=7 * n)
        rel = f"{tag}/{n:03d}.json"
        (HERE / rel).write_text(json.dumps(itinerary(start, bad), indent=2) + "\n")
        manifest.append({"file": rel, "model_tag": tag, "num_cities": len(ROUTE)})

(HERE / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
(HERE / "durations.txt").write_text("".join(f"{a} {b} {m}\n" for (a, b), m in FLIGHT.items()))
