# ruff: noqa: E501

main_doc = """
Floorplan reconstruction toolkit: project point clouds, turn directed edge
sets into room polygons, match and score predictions against ground truth.

Results are written to stdout as JSON, diagnostics to stderr. Failures print
an error object to stderr and exit with status 2.
"""

project_doc = """
Project an ASCII point cloud (one `x y z` per line, `#` comments) into a
density map stored as binary PGM with a `<out>.json` sidecar.

\b
```JSON
{"width": 256, "height": 256, "max_count": 17, "bounds": [-0.25, -0.25, 5.25, 4.25]}
```
"""

polygonize_doc = """
Convert the edges of a floorplan, prediction or perturbed query file into
closed room polygons. Predicted tokens below the confidence threshold are
dropped first.
"""

match_doc = """
Match predicted rooms to ground-truth rooms with the rotation-aware cost.

\b
```JSON
{
  "assignment": [1, 0, 2],
  "per_pair_cost": [0.0, 0.12, 0.0],
  "best_rotation": [3, 0, 0],
  "reversed": [false, false, false],
  "total_cost": 0.12
}
```
"""

loss_doc = """
Evaluate every supervision term for a prediction. `--dn` adds the denoising
terms of a perturbed query file made from the same ground truth.

\b
```JSON
{"cls": 0.0031, "edge": 0.004, "ras": 0.011,
 "cls_dn": 0.0, "edge_dn": 0.0, "total": 0.0369}
```
"""

perturb_doc = """
Write noised copies of the ground-truth edges for denoising supervision.
Each endpoint moves uniformly by less than lambda/2 per axis and each valid
label flips with probability gamma. A fixed seed reproduces the output.
"""

evaluate_doc = """
Score every `<scene>.json` of GT_DIR against the file of the same name in
PRED_DIR (prediction, polygon or perturbed query file). Prints dataset
micro averages, per-scene macro averages and per-scene reports in percent;
a per-scene table goes to stderr.
"""

render_doc = """
Draw room polygons as a static SVG, optionally over a PGM density map.
"""

validate_doc = """
List the invariant violations of a floorplan file. Exit status 1 when any
violation is found.
"""

sweep_eps_doc = """
Evaluate GT_DIR against PRED_DIR at several polygonization thresholds to
check how sensitive the scores are to `eps`.
"""
