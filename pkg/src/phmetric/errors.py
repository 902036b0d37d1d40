"""
Exception hierarchy shared by all metric constructions and the command line.

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


class MetricError(Exception):
  """Base class of all errors raised by phmetric."""


class ValidationError(MetricError):
  """Raised when an input violates an invariant of the construction."""


class VerificationError(ValidationError):
  """Raised when an assertion of the verification suite fails."""


class GeneratorError(ValidationError):
  """Raised when a generator family violates one of the conditions (i)-(iii)."""


class RegimeError(MetricError):
  """Raised when a parameter regime is not supported by the requested construction."""


class ExceptionalPointError(RegimeError):
  """Raised when eigenvalues coalesce and the Hamiltonian is not diagonalizable."""


class DecompositionError(RegimeError):
  """Raised when the biorthogonal decomposition is ill-conditioned or cannot be paired."""


class ConfigurationError(MetricError):
  """Raised for invalid run configurations."""
