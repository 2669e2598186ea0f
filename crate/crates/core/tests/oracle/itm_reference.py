"""Golden-file generator for the area-mode ITM regression test.

Runs the `itmlogic` Python port of ITM 1.2.2 (pip install itmlogic) with the
same inputs the simulator uses and writes tests/data/itm_golden.csv. The Rust
implementation is written separately; this script only produces frozen values.

    python3 tests/oracle/itm_reference.py > tests/data/itm_golden.csv
"""
import math

from itmlogic.preparatory_subroutines.qlrps import qlrps
from itmlogic.preparatory_subroutines.qlra import qlra
from itmlogic.lrprop import lrprop
from itmlogic.statistics.avar import avar

FREQ_MHZ = 3500.0
EPS = 15.0
SGM = 0.005
EN0 = 301.0
CLIMATE = 5  # continental temperate
POL = 0  # horizontal
MDVAR = 0  # single message

SCENARIOS = {
    "macro": dict(tx=50.0, rx=25.0, dh=10.0),
    "small": dict(tx=50.0, rx=10.0, dh=20.0),
}

DISTANCES_KM = [2, 5, 10, 20, 30, 40, 45, 50, 55, 60,
                70, 80, 100, 120, 150, 175, 200, 250, 300, 400]


def area_loss(d_km, tx, rx, dh):
    prop = {
        "hg": [tx, rx],
        "dh": dh,
        "ens": EN0,
        "klim": CLIMATE,
        "klimx": CLIMATE,
        "mdvarx": MDVAR,
        "mdvar": MDVAR,
        "lvar": 5,
        "kwx": 0,
        "mdp": 1,
        "ipol": POL,
    }
    wn, gme, ens, zgnd = qlrps(FREQ_MHZ, 0, EN0, POL, EPS, SGM)
    prop.update(wn=wn, gme=gme, ens=ens, zgnd=zgnd)
    prop = qlra([0, 0], prop)
    prop = lrprop(d_km * 1e3, prop)
    fs = 32.45 + 20 * math.log10(FREQ_MHZ) + 20 * math.log10(prop["dist"] / 1e3)
    var, prop = avar(0.0, 0.0, 0.0, prop)
    return fs + var, prop["kwx"]


def main():
    print("scenario,distance_km,loss_db,kwx")
    for name, p in SCENARIOS.items():
        for d in DISTANCES_KM:
            loss, kwx = area_loss(d, **p)
            print(f"{name},{d},{loss:.6f},{kwx}")


if __name__ == "__main__":
    main()
