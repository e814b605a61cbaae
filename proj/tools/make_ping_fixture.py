#!/usr/bin/env python3
# Copyright 2026 The cram Authors.
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
"""Regenerates data/ping_fixture.json.

The committed fixture is a frozen snapshot; this script only documents how
the numbers were obtained. Average round-trip pings between datacenter
cities are approximated as

    rtt_ms = 0.015 * great_circle_km + 4

which is fibre propagation (~200 km/ms) doubled for the round trip, a 1.5x
routing inflation, and a small constant for last-hop/processing. The slope
and intercept were picked so continental and intercontinental links land
near typical public ping averages. Values are rounded to 0.1 ms. Consumers
use half the round trip as the one-way transmission time.
"""

import json
import math
import pathlib

# name, latitude, longitude
CITIES = [
    ("Seattle", 47.61, -122.33),
    ("San Francisco", 37.77, -122.42),
    ("Los Angeles", 34.05, -118.24),
    ("Denver", 39.74, -104.99),
    ("Dallas", 32.78, -96.80),
    ("Chicago", 41.88, -87.63),
    ("Atlanta", 33.75, -84.39),
    ("New York", 40.71, -74.01),
    ("Miami", 25.76, -80.19),
    ("Toronto", 43.65, -79.38),
    ("Sao Paulo", -23.55, -46.63),
    ("Mexico City", 19.43, -99.13),
    ("London", 51.51, -0.13),
    ("Paris", 48.86, 2.35),
    ("Frankfurt", 50.11, 8.68),
    ("Amsterdam", 52.37, 4.90),
    ("Madrid", 40.42, -3.70),
    ("Stockholm", 59.33, 18.07),
    ("Moscow", 55.76, 37.62),
    ("Johannesburg", -26.20, 28.05),
    ("Dubai", 25.20, 55.27),
    ("Mumbai", 19.08, 72.88),
    ("Singapore", 1.35, 103.82),
    ("Hong Kong", 22.32, 114.17),
    ("Tokyo", 35.68, 139.69),
    ("Seoul", 37.57, 126.98),
    ("Sydney", -33.87, 151.21),
]

USA = ["Seattle", "San Francisco", "Los Angeles", "Denver", "Dallas",
       "Chicago", "Atlanta", "New York", "Miami"]

WORLD = ["Los Angeles", "New York", "Toronto", "Sao Paulo", "Mexico City",
         "London", "Paris", "Frankfurt", "Amsterdam", "Madrid", "Stockholm",
         "Moscow", "Johannesburg", "Dubai", "Mumbai", "Singapore",
         "Hong Kong", "Tokyo", "Seoul", "Sydney"]


def great_circle_km(a, b):
    lat1, lon1 = math.radians(a[1]), math.radians(a[2])
    lat2, lon2 = math.radians(b[1]), math.radians(b[2])
    h = (math.sin((lat2 - lat1) / 2) ** 2
         + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2)
    return 2 * 6371.0 * math.asin(math.sqrt(h))


def main():
    n = len(CITIES)
    rtt_ms = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            rtt = round(0.015 * great_circle_km(CITIES[i], CITIES[j]) + 4.0, 1)
            rtt_ms[i][j] = rtt_ms[j][i] = rtt
    doc = {
        "provenance": "approximate average round-trip pings between "
                      "datacenter cities, snapshot 2026-10-19; see "
                      "tools/make_ping_fixture.py",
        "sites": [{"name": c[0], "latitude": c[1], "longitude": c[2]}
                  for c in CITIES],
        "rtt_ms": rtt_ms,
        "groups": {"usa": USA, "world": WORLD},
    }
    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "ping_fixture.json"
    out.write_text(json.dumps(doc, indent=1) + "\n")


if __name__ == "__main__":
    main()
