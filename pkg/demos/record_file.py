"""
Bound entanglement from a measurement-record file, as ``entbound bound`` does.
"""

from pathlib import Path

from entbound import bound_from_record
from entbound.io import load_record

path = Path(__file__).resolve().parent.parent / "docs" / "golden" / "isotropic_n3_f090.json"
record = load_record(path)
print(f"{path.name}: local dims {record.structure.local_dims}, mean {record.means[0]:.6f}")
for measure in ("concurrence", "eof"):
    r = bound_from_record(record, measure=measure)
    print(f"  {measure:<12} bound {r.bound:.6f}  (lambda {r.optimal_lambdas[0]:.4f}, converged {r.converged})")
