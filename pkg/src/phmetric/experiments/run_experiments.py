"""
Acceptance runs of the Lee model. The corresponding variables have to start
with "exp_" in order to be discovered for running them later.

MIT License

Copyright (c) 2026 The phmetric authors

Permission is hereby granted, free of charge, to any person obtaining a copy
of this software and associated documentation files (the "Software"), to deal
in the Software without restriction, including without limitation the rights
to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
copies of the Software, and to permit persons to whom the Software is
furnished to do so, subject to the following conditions:

The above copyright notice and this permission notice shall be included in all
copies or substantial portions of the Software.

THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
SOFTWARE.
"""

from phmetric.config import RunConfig
from phmetric.experiments.metric_experiment import MetricExperiment
from phmetric.lee_model import LeeParams

# all radicands positive, every method applies
exp_lee_real = MetricExperiment(
  name="lee_real",
  config=RunConfig(lee=LeeParams(g=0.05), method="all", seed=1),
)

# Hermitian limit, every metric reduces to the identity
exp_lee_hermitian = MetricExperiment(
  name="lee_hermitian",
  config=RunConfig(lee=LeeParams(g=0.), method="all", seed=1),
)

# sectors n >= 1 carry complex conjugate energies, closed form not applicable
exp_lee_broken = MetricExperiment(
  name="lee_broken",
  config=RunConfig(lee=LeeParams(g=0.2), method="all", seed=1),
)

# s-form normalized eigenvectors, the spectral C = q P is an exact involution
exp_lee_s_form = MetricExperiment(
  name="lee_s_form",
  config=RunConfig(lee=LeeParams(g=0.05), method="spectral", normalization="s_form", seed=1),
)


def discover() -> list:
  return [value for key, value in globals().items() if key.startswith("exp_")]


if __name__ == "__main__":
  # run all experiments defined above
  for e in discover():
    print("Now running experiment", e.name)
    code = e.run()
    print(e.name, "exit code", code, e.summary())
