#!/usr/bin/env python3
"""Generate the synthetic semi-arid daily weather series shipped in data/weather/.

The series imitates the climate of an irrigated potato district in an
interior semi-arid basin (~46.3 N, ~200 m): hot, dry, sunny summers with
almost no rain between May and September. It is NOT observed data. The
output is a pure function of the arguments (numpy's PCG64 stream).

    python3 tools/make_synthetic_weather.py --out data/weather/semiarid_synthetic.csv
"""
import argparse
import datetime as dt
import math

import numpy as np


def extraterrestrial_radiation(lat_deg, doy):
    phi = math.radians(lat_deg)
    dr = 1 + 0.033 * math.cos(2 * math.pi * doy / 365)
    decl = 0.409 * math.sin(2 * math.pi * doy / 365 - 1.39)
    ws = math.acos(max(-1.0, min(1.0, -math.tan(phi) * math.tan(decl))))
    return 24 * 60 / math.pi * 0.082 * dr * (
        ws * math.sin(phi) * math.sin(decl) + math.cos(phi) * math.cos(decl) * math.sin(ws))


def sat_vp_hpa(t):
    return 6.108 * math.exp(17.27 * t / (t + 237.3))


def generate(start, days, seed, lat):
    rng = np.random.default_rng(seed)
    rows = []
    anomaly = 0.0
    for i in range(days):
        date = start + dt.timedelta(days=i)
        doy = date.timetuple().tm_yday
        season = math.cos(2 * math.pi * (doy - 205) / 365.25)  # +1 late July

        # persistent temperature anomaly (AR(1))
        anomaly = 0.75 * anomaly + rng.normal(0.0, 2.2)
        tmax = 17.5 + 14.0 * season + anomaly
        dtr = 11.5 + 4.0 * season + rng.normal(0.0, 1.5)
        tmin = tmax - max(dtr, 3.0)

        # rain: wet winters, very dry summers
        p_rain = 0.17 - 0.14 * season
        wet = rng.random() < p_rain
        rain = float(rng.exponential(3.5 + 1.5 * (1 - season) / 2)) if wet else 0.0

        ra = extraterrestrial_radiation(lat, doy)
        clear = 0.75 * ra
        cloud = rng.uniform(0.35, 0.7) if wet else rng.uniform(0.82, 1.0)
        srad = clear * cloud

        # dry air: dew point well below tmin in summer
        dew = tmin - (1.5 + 3.5 * max(season, 0.0)) + rng.normal(0.0, 1.0)
        vap = sat_vp_hpa(dew)

        wind = float(np.clip(rng.lognormal(math.log(2.8), 0.35), 0.3, 12.0))
        co2 = 369.5 + 3.0 * math.sin(2 * math.pi * (doy - 40) / 365.25) + rng.normal(0.0, 0.4)

        tavg = 0.5 * (tmax + tmin) + rng.normal(0.0, 0.4)
        tavg = min(max(tavg, tmin), tmax)
        rows.append((date.isoformat(), tmax, tmin, tavg, rain, srad, co2, vap, wind))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", required=True)
    ap.add_argument("--start", default="2000-04-01")
    ap.add_argument("--days", type=int, default=400)
    ap.add_argument("--seed", type=int, default=20000401)
    ap.add_argument("--lat", type=float, default=46.3)
    args = ap.parse_args()

    rows = generate(dt.date.fromisoformat(args.start), args.days, args.seed, args.lat)
    with open(args.out, "w") as f:
        f.write("DATE,TMAX,TMIN,TAVG,RAIN,SRAD,CO2,VAP,WIND\n")
        for r in rows:
            f.write("{},{:.1f},{:.1f},{:.1f},{:.1f},{:.2f},{:.1f},{:.2f},{:.2f}\n".format(*r))


if __name__ == "__main__":
    main()
