from __future__ import annotations

import pytest

from critical_halfspace.fields.bubble import make_bubble


@pytest.fixture
def bubble3():
    return make_bubble(3, 1.0)


@pytest.fixture
def bubble4():
    return make_bubble(4, 1.0)
