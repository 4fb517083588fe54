"""Desk-scale edge-assisted gesture-controlled UAV loop.

A simulated Tello-class drone streams synthetic gesture frames over a
UDP-style protocol to an edge server, which classifies hand landmarks,
aggregates them into one command per decision slot, supervises failsafes,
and steers the drone. The harness reproduces latency and trajectory
experiments; an optional browser console lets a human fly the loop.
"""

__version__ = "0.1.0"
