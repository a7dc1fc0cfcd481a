"""Three ways to the theta number of the pentagon.

The pentagon is the Cayley graph of Z_5 with generators {1, 4}. Its
theta number can be read off a finite SDP, off the much smaller Fourier LP
of the Cayley structure, or off the closed form for odd cycles. All three
agree on sqrt(5), which sits between the independence number 2 and the
clique-cover number 3.

Run with ``python3 demos/pentagon.py``.
"""

import math
from pathlib import Path

from packbound.cayley import CayleySpec, Cyclic, cayley_theta
from packbound.theta import alpha_bruteforce, read_graph, theta_prime

graph = read_graph(Path(__file__).parent / "data" / "c5.graph")
finite, cert = theta_prime(graph)
lp = cayley_theta(CayleySpec(Cyclic(5), [1, 4]))
c = math.cos(math.pi / 5)

print(f"finite SDP      {finite:.10f}  (certificate PSD margin {cert.psd_margin:.1e})")
print(f"Fourier LP      {lp.value:.10f}  (fhat = {[round(float(v), 6) for v in lp.fhat]})")
print(f"odd-cycle form  {5 * c / (1 + c):.10f}")
print(f"sqrt(5)         {math.sqrt(5):.10f}")
print(f"alpha = {alpha_bruteforce(graph)[0]:g}, so the bound is not tight here")
