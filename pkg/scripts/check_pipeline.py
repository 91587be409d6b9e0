"""Script to smoke-test the pansharpening pipeline end to end on synthetic scenes."""

import sys
from pathlib import Path

# Add src to path
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from autodiff import param_count
from baselines import BASELINES
from config.logging_config import configure_logging
from config.settings import Settings
from fgfgan import Generator, GeneratorConfig, Pansharpener, TrainConfig, synthetic_dataset, train
from fgfgan.gradcheck_suite import GRADCHECK_TOLERANCE, run_gradcheck_suite
from image_core import DatasetSpec, synth_scene, wald_degrade
from metrics import MetricsReport, score_image


def check_pipeline() -> int:
    """Run baselines, a short training run, inference and the gradient suite."""
    print("Checking pansharpening pipeline")
    print("=" * 50)

    settings = Settings()
    configure_logging(settings)
    print(f"\n1. Settings loaded (log level {settings.log_level})")

    print("\n2. Scoring classical baselines on one synthetic scene...")
    ms, pan = synth_scene(0, 4, 128, 128, 2)
    lrms, pan_lo, reference = wald_degrade(ms, pan, 2)
    scores = [score_image(name, method(pan_lo, lrms, 2), reference, 2) for name, method in BASELINES.items()]
    for line in MetricsReport.from_scores(scores).lines():
        print(f"   {line}")

    print("\n3. Counting parameters...")
    cfg = GeneratorConfig(bands=4, sus=2)
    print(f"   generator {param_count(Generator(cfg))}")
    print(f"   generator_no_sam {param_count(Generator(cfg.model_copy(update={'use_sam': False})))}")

    print("\n4. Training a tiny generator for a few steps...")
    splits = synthetic_dataset(DatasetSpec(sus=2, bands=4, split=(12, 2, 2), patch=8, seed=0), 16)
    tiny = GeneratorConfig(bands=4, sus=2, k_layers=2, width=8)
    result = train(splits["train"], splits["val"], tiny, TrainConfig(epochs=3, batch=4, lr=1e-3))
    for line in result.log.lines():
        print(f"   {line}")

    print("\n5. Fusing a test patch from the final weights...")
    sharpener = Pansharpener(tiny, result.final_state)
    test_pan, test_lrms, test_ref = splits["test"].triple(0)
    fused = sharpener.fuse(test_pan, test_lrms)
    print(f"   {score_image('fused', fused, test_ref, 2).model_dump()}")

    print("\n6. Running finite-difference gradient checks...")
    failed = []
    for family, error in run_gradcheck_suite(0).items():
        mark = "✓" if error < GRADCHECK_TOLERANCE else "✗"
        print(f"   {mark} {family} {error:.3e}")
        if error >= GRADCHECK_TOLERANCE:
            failed.append(family)

    print("\n" + "=" * 50)
    if failed:
        print(f"✗ Gradient check failed for: {', '.join(failed)}")
        return 1
    print("✓ Pipeline checks passed!")
    return 0


if __name__ == "__main__":
    sys.exit(check_pipeline())
