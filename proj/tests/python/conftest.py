import json
import os
import pathlib

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def schemas():
    return {p.name.split(".")[0]: json.loads(p.read_text()) for p in (ROOT / "schemas").glob("*.schema.json")}


@pytest.fixture(scope="session")
def qqtool():
    path = os.environ.get("QQTOOL")
    if not path or not os.path.exists(path):
        pytest.skip("QQTOOL not set; build with QQ_BUILD_CLI=ON")
    return path
