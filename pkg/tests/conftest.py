import struct

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def wav_bytes(pcm, rate=8000, channels=1, bits=16, fmt_tag=1, extra_chunks=b""):
    """Hand-assemble a RIFF/WAVE file independent of the package writer."""
    if bits == 16:
        data = np.asarray(pcm, dtype="<i2").tobytes()
    else:
        data = bytes(pcm)
    block = channels * bits // 8
    fmt = struct.pack("<HHIIHH", fmt_tag, channels, rate, rate * block, block, bits)
    body = (b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt + extra_chunks
            + b"data" + struct.pack("<I", len(data)) + data)
    return b"RIFF" + struct.pack("<I", len(body)) + body


@pytest.fixture
def make_wav(tmp_path):
    def make(name, pcm, **kw):
        path = tmp_path / name
        path.write_bytes(wav_bytes(pcm, **kw))
        return path
    return make
