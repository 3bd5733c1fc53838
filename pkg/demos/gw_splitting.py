"""Split a few Grothendieck-Witt classes into their e+ and e- parts."""

from chowwitt.scalars.parse import parse_field
from chowwitt.verify import check_gw_splitting

for spec in ("Fp:3", "Fp:7", "Fq:9", "Q"):
    report = check_gw_splitting(parse_field(spec), samples=50, seed=1)
    print(f"{spec:5s} {report.status:5s} minus factor rank {report.witnesses['minusFactorRank']}")
