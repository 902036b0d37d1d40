import phmetric

import importlib
import pkgutil

import pytest

# package markers such as phmetric.experiments stay empty
MODULES = [info.name for info in pkgutil.walk_packages(phmetric.__path__, "phmetric.") if not info.ispkg]


@pytest.mark.parametrize("name", ["phmetric"] + MODULES)
def test_module_header(name):
  doc = importlib.import_module(name).__doc__
  summary, license_text = doc.split("MIT License", 1)
  assert summary.strip()
  assert "Copyright (c) 2026 The phmetric authors" in license_text
  assert "Permission is hereby granted, free of charge" in license_text
  assert license_text.rstrip().endswith("SOFTWARE.")
