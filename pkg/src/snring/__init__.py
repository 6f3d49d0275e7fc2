"""Quantum transport through a flux-threaded ring with a superconducting contact.

Dense Green's-function pipeline for an N-site interferometer ring with
wide-band source/drain leads, a diagonal Andreev-type contact self-energy
built from the bare propagator, an optional 2D normal spacer setting the
contact distance, and sweep drivers for transmission, interference
contrast, local density of states, and the transport-weighted dephasing
rate.
"""

__version__ = "0.1.0"

