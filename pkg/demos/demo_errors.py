"""Demo script to show error handling with invalid inputs."""

import warnings

import numpy as np
from pydantic import ValidationError

from fracdrift.core.run_config import ConfigError, parse_run_config
from fracdrift.models import DriftOperator, Grid, RealField, SolverConfig
from fracdrift.models.symbols import SymbolSyntaxError, parse_symbol
from fracdrift.services import GateRefusedError, ParameterError, lorentz_norm, picard_solve

print("=" * 80)
print("🧪 fracdrift Error Handling Demo")
print("=" * 80)
print()

# Test 1: Misspelled config key
print("📋 Test 1: Config with a misspelled key")
print("-" * 80)
try:
    parse_run_config("alpah = 1.5\nN = 64")
except ConfigError as e:
    print("✅ Caught ConfigError:")
    print(str(e))
print()

# Test 2: Grid size that is not a power of two
print("📋 Test 2: Config with N = 100")
print("-" * 80)
try:
    parse_run_config("N = 100")
except ConfigError as e:
    print("✅ Caught ConfigError:")
    print(str(e))
print()

# Test 3: Symbol outside the grammar
print("📋 Test 3: Drift symbol calling an unknown function")
print("-" * 80)
try:
    parse_symbol("sqrt(k1)", 2)
except SymbolSyntaxError as e:
    print("✅ Caught SymbolSyntaxError:")
    print(str(e))
print()

# Test 4: Compressible drift
print("📋 Test 4: Drift that is not divergence-free")
print("-" * 80)
try:
    DriftOperator.from_expressions(["i*k1/|k|", "i*k2/|k|"])
except ValidationError as e:
    print("✅ Caught ValidationError:")
    print(e.errors()[0]["msg"])
print()

# Test 5: Lorentz exponent out of range
print("📋 Test 5: Lorentz norm with p = 1")
print("-" * 80)
try:
    lorentz_norm(RealField.zeros(Grid(n=1, points=16)), 1.0, 2.0)
except ParameterError as e:
    print("✅ Caught ParameterError:")
    print(str(e))
print()

# Test 6: Refused smallness gate
print("📋 Test 6: Large source with enforce_gate")
print("-" * 80)
grid = Grid(n=2, points=64)
x1, _ = grid.coordinates()
large = RealField(grid=grid, samples=10.0 * np.cos(x1))
try:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        picard_solve(large, DriftOperator.sqg(), SolverConfig(alpha=1.5, enforce_gate=True))
except GateRefusedError as e:
    print("✅ Caught GateRefusedError:")
    print(str(e))
print()
