import pytest

from vlpkit import CameraIntrinsics, LedBeacon


@pytest.fixture
def intrinsics():
    return CameraIntrinsics(
        focal_length=3.0,
        pitch_i=0.006,
        pitch_j=0.006,
        resolution=(800, 600),
    )


@pytest.fixture
def ceiling_beacons():
    return (
        LedBeacon("L1", (-46.5, -49.5, 150.0)),
        LedBeacon("L2", (-46.0, -42.0, 150.0)),
        LedBeacon("L3", (46.0, 49.0, 150.0)),
    )
