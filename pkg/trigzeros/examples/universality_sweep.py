#!/usr/bin/env python3
"""
Universality Sweep Example

Compares the expected zero density of several coefficient models with the
limit 2/sqrt(3):
- Rademacher and Gaussian moving-average coefficients
- A sign functional of a Bargmann-Fock Gaussian sequence
- The Kac-Rice value wherever the coefficients are jointly Gaussian
"""

import sys
from pathlib import Path

from dotenv import load_dotenv

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from src.core.oracle import SINC_ZERO_INTENSITY, kac_rice_from_model  # noqa: E402
from src.core.stats import mc_expected_zero_density  # noqa: E402
from src.experiments.config import ModelConfig  # noqa: E402
from src.utils.logging_utils import setup_logging  # noqa: E402

# Load environment variables
load_dotenv()
setup_logging()

PRESETS = ["rademacher-ma1", "gaussian-ma1", "sign-bargmann-fock"]


def run_universality_sweep(degrees, reps: int = 500, seed: int = 20240917, threads: int = 4):
    """Print one line per (model, n) with the estimate, its error bar and the oracles."""
    for name in PRESETS:
        model = ModelConfig.from_preset(name).build()
        for n in degrees:
            estimate = mc_expected_zero_density(model, n, reps, seed, max_workers=threads)
            kac = kac_rice_from_model(model.gaussian_covariance(), n)
            kac_text = f"{kac / n:.4f}" if kac is not None else "   -  "
            print(
                f"{name:<20} n={n:<5} density={estimate.mean:.4f} +- {1.96 * estimate.stderr:.4f}"
                f"  kac-rice={kac_text}  limit={SINC_ZERO_INTENSITY:.4f}"
            )


if __name__ == "__main__":
    degrees = [32, 128, 512]
    print(f"Starting universality sweep for degrees: {degrees}")

    run_universality_sweep(degrees)
    print("\n" + "=" * 50)
    print("SWEEP COMPLETED")
    print("=" * 50)
