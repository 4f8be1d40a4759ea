"""
Pointer-state simulator - Main Entry Point

Usage:
    python run_measurement.py run scenarios/anomalous_weak_value.json --out out/
    python run_measurement.py compare scenarios/anomalous_weak_value.json
    python run_measurement.py sweep scenarios/gamma_sweep.json
    python run_measurement.py verify
"""

import sys

if __name__ == "__main__":
    from pointer_sim.cli import main

    sys.exit(main())
