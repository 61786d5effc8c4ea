"""
Train one S-SVDD model from Python and score it on the held-out pixels.
"""
import argparse

from spectrasphere.data.scene import stratified_split
from spectrasphere.data.scenes import SceneConfig, load_scene
from spectrasphere.evaluation.metrics import confusion_counts
from spectrasphere.models.serialization import save_model
from spectrasphere.models.ssvdd import Hyperparams, Variant, train_on_dataset
from spectrasphere.utils.logging import setup_logging


def main():
    parser = argparse.ArgumentParser(description="spectrasphere training example")
    parser.add_argument("--target", type=int, default=1, help="Target class label")
    parser.add_argument("--variant", default="linear-psi0", help="Variant label")
    parser.add_argument("--model", help="Optional path to save the trained model")
    args = parser.parse_args()

    setup_logging()

    # Disc-shaped target class hidden in two of twenty bands
    ds = load_scene(SceneConfig(source="synthetic", synthetic={"kind": "disc", "n_bands": 20}))
    train_ds, test_ds = stratified_split(ds, 0.3, seed=0)

    variant = Variant.parse(args.variant)
    hp = Hyperparams(d=2, C=0.1, eta=0.1, beta=0.1, sigma=5.0, max_iter=10).with_variant(variant)
    model = train_on_dataset(train_ds, args.target, hp)

    print("Iteration  dual objective  regulariser")
    for iteration, (objective, psi) in enumerate(zip(model.diagnostics.dual_objective, model.diagnostics.psi), 1):
        print(f"{iteration:9d}  {objective:14.6f}  {psi:11.6f}")

    prediction = model.predict(test_ds.X)
    counts = confusion_counts(test_ds.y == args.target, prediction.labels)
    print(f"Test TPR {counts.tpr:.3f}, TNR {counts.tnr:.3f}, GM {counts.gm:.3f}")

    if args.model:
        save_model(model, args.model)
        print(f"Model saved to {args.model}")


if __name__ == "__main__":
    main()
