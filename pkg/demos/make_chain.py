"""Write an option chain generated from shifted-lognormal parameters."""

import sys

from barrierprod.calibration import synthetic_slice
from barrierprod.market_data import Surface, save_chain
from barrierprod.models import SlnParams

# (days, q, sigma_bar)
ROWS = [(148, -4.7, 0.11), (228, -3.16, 0.1464), (319, -2.7, 0.1698), (501, -1.82, 0.2169)]

if __name__ == "__main__":
    path = sys.argv[1] if len(sys.argv) > 1 else "chain.csv"
    save_chain(Surface([synthetic_slice(SlnParams(s, q), d, discount=0.98) for d, q, s in ROWS]), path)
    print(path)
