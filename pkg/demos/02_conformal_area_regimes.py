"""
Two regimes of the conformal area
=================================

Composing the Clifford-type immersion psi_b with Moebius maps of S^3 changes
its area.  For short tori the undeformed immersion already has the largest
area; past b = sqrt 2 the supremum moves out along an axis of the ball.
"""

import math

import numpy as np

from flattorus import area_functional, psi_b, sup_area_s3
from flattorus.conformal import r1_of
from flattorus.optim import lemma_sup

for b in (1.0, 1.2, math.sqrt(2), 2.0, 3.0):
    res = sup_area_s3(b)
    print(f"b = {b:5.3f}  sup = {res.value:9.5f}  closed form = {lemma_sup(b):9.5f}  branch = {res.branch}")

# Walk along the first axis for b = 2.  The area rises from the origin,
# peaks at sqrt((3 r1 - 2) / r1), then falls as the map degenerates.
b = 2.0
r1 = r1_of(b)
imm = psi_b(b)
for t in np.linspace(0.0, 0.9, 10):
    print(f"gamma_1 = {t:4.2f}  area = {area_functional([t, 0, 0, 0], imm):9.5f}")
print(f"peak expected at gamma_1 = {math.sqrt((3 * r1 - 2) / r1):.4f}")
