#!/usr/bin/env python3
# Copyright 2026 The dualvoice Authors
# SPDX-License-Identifier: Apache-2.0
"""Writes the packet-service conformance frames.

Built with struct alone so the bytes do not depend on the C++ encoder.
Request files may hold several frames; reply files hold what the service
must send back, byte for byte, before closing or going idle.
"""
import math
import pathlib
import struct

HERE = pathlib.Path(__file__).resolve().parent
AUDIO, LABEL, TRANSCRIPT, ERROR = 0x01, 0x02, 0x03, 0x7F


def frame(kind, payload):
    return struct.pack(">IB", len(payload), kind) + payload


def audio(samples):
    return frame(AUDIO, struct.pack("<1600h", *samples))


def label(kind, confidence):
    return frame(LABEL, struct.pack("<Bf", kind, confidence))


def error(reason):
    return frame(ERROR, reason.encode())


zeros = [0] * 1600
tone = [round(16384 * math.sin(2 * math.pi * 440 * t / 16000)) for t in range(1600)]
quiet = [round(1000 * math.sin(2 * math.pi * 440 * t / 16000)) for t in range(1600)]

cases = {
    # digital silence is gated whatever the model says
    "silence": (audio(zeros), label(2, 1.0)),
    # -33 dBFS tone: still under the gate
    "quiet_tone": (audio(quiet), label(2, 1.0)),
    # with all-zero output weights the probabilities tie and Normal wins
    "tie_normal": (audio(tone), label(0, 0.5)),
    "pipelined": (audio(zeros) + audio(tone) + audio(zeros),
                  label(2, 1.0) + label(0, 0.5) + label(2, 1.0)),
    "bad_length": (frame(AUDIO, bytes(10)), error("bad-length")),
    "bad_type": (frame(LABEL, struct.pack("<Bf", 0, 1.0)), error("bad-type")),
    # the header alone announces 64 KiB + 1
    "oversized": (struct.pack(">IB", 65537, AUDIO), error("oversized")),
    # a valid packet answered, then the malformed one ends the connection
    "good_then_bad": (audio(zeros) + frame(AUDIO, bytes(3199)) + audio(zeros),
                      label(2, 1.0) + error("bad-length")),
}

for name, (request, reply) in cases.items():
    (HERE / f"{name}.request.bin").write_bytes(request)
    (HERE / f"{name}.reply.bin").write_bytes(reply)
