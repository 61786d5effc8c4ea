"""
Example showing how to use the MatConnector and StatisticalAnalyser
"""
import argparse
import json

from spectrasphere.analysers.statistical_analyser import StatisticalAnalyser
from spectrasphere.connectors.mat_connector import MatConnector
from spectrasphere.data.scene import HsiCube, vectorize
from spectrasphere.utils.logging import setup_logging


def main():
    """
    Run the example script.
    """
    parser = argparse.ArgumentParser(description="spectrasphere scene analysis example")
    parser.add_argument("--cube", required=True, help="MAT-file holding the reflectance cube")
    parser.add_argument("--cube-var", required=True, help="Variable name of the cube")
    parser.add_argument("--gt", help="MAT-file holding the ground truth (defaults to --cube)")
    parser.add_argument("--gt-var", required=True, help="Variable name of the ground truth")
    parser.add_argument("--output", help="Output file path for the analysis results (JSON)")
    args = parser.parse_args()

    setup_logging()

    connector = MatConnector()
    analyser = StatisticalAnalyser()

    # List what the file holds
    print(f"Variables in {args.cube}:")
    for name, kind, dims in connector.list_variables(args.cube):
        print(f"  {name}: {kind} {dims}")

    cube = HsiCube.from_mat_arrays(
        connector.read_array(args.cube, args.cube_var),
        connector.read_array(args.gt or args.cube, args.gt_var),
    )
    ds = vectorize(cube)
    print(f"Read a {cube.height}x{cube.width} scene with {cube.bands} bands and {ds.n_samples} labelled pixels")

    # Analyse the scene
    print('Analysing scene...')
    results = analyser.analyse_dataset(ds)

    print("\nClass Overview:")
    print("-" * 50)
    print(results["classes"].to_string())
    print("-" * 50)
    print(f"Imbalance ratio: {results['imbalance_ratio']}")
    if results["constant_bands"]:
        print(f"Constant bands: {results['constant_bands']}")

    # Save results to a file if requested
    if args.output:
        print(f"Saving analysis results to {args.output}")
        payload = {
            "n_samples": results["n_samples"],
            "n_bands": results["n_bands"],
            "classes": results["classes"].reset_index().to_dict(orient="records"),
            "bands": results["bands"].reset_index().to_dict(orient="records"),
            "constant_bands": results["constant_bands"],
        }
        with open(args.output, 'w') as f:
            json.dump(payload, f, indent=2, default=str)
        print("Results saved successfully")


if __name__ == "__main__":
    main()
