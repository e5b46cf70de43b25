import functools
import json
import sys
from pathlib import Path
from typing import List, Tuple

import anyio
import click
from loguru import logger
from pydantic import ValidationError

from edgeplan import docs
from edgeplan.constants import SWEEP_EPS
from edgeplan.core.exceptions import EdgeplanError
from edgeplan.core.models import Floorplan
from edgeplan.core.service import validate_floorplan
from edgeplan.denoising.exceptions import InvalidConfig
from edgeplan.denoising.models import NoiseConfig
from edgeplan.denoising.service import flip_rate, perturb
from edgeplan.io.exceptions import SchemaViolation
from edgeplan.io.render import render_svg
from edgeplan.io.service import (
    load_any_prediction,
    load_floorplan,
    load_perturbed,
    load_polygons,
    read_density_pgm,
    read_xyz,
    save_perturbed,
    save_polygons,
    write_density_pgm,
)
from edgeplan.logging import configure_logger
from edgeplan.losses.models import LossWeights
from edgeplan.losses.service import total_loss
from edgeplan.matching.models import PredictionSet
from edgeplan.matching.service import match_floorplans
from edgeplan.metrics.models import Matcher, MetricThresholds
from edgeplan.metrics.service import aggregate, evaluate_dataset, evaluate_scene
from edgeplan.polygonization.service import floorplan_to_polygons
from edgeplan.projection.models import Bounds
from edgeplan.projection.service import project
from edgeplan.settings import settings

ERROR_EXIT = 2


def _emit(payload) -> None:
    click.echo(json.dumps(payload, indent=2))


def handle_errors(f):
    """Turn library errors into a JSON object on stderr and exit status 2."""

    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except EdgeplanError as e:
            click.echo(json.dumps(e.to_dict()), err=True)
            sys.exit(ERROR_EXIT)
        except ValidationError as e:
            payload = SchemaViolation.from_validation_error(e).to_dict()
            click.echo(json.dumps(payload), err=True)
            sys.exit(ERROR_EXIT)
        except (click.exceptions.Exit, click.ClickException, SystemExit):
            raise
        except Exception:
            logger.exception("Unexpected failure")
            sys.exit(1)

    return wrapper


def _options_model(model_cls, **values):
    """Build a model from command options, naming the first rejected one."""
    try:
        return model_cls(**values)
    except ValidationError as e:
        field = str(e.errors()[0]["loc"][0])
        raise InvalidConfig(field, values.get(field))


def _prediction_set(path) -> PredictionSet:
    loaded = load_any_prediction(path)
    if not isinstance(loaded, PredictionSet):
        raise SchemaViolation(
            "expected an edge prediction, found polygons", {"path": str(path)}
        )
    return loaded


def _scene_pairs(
    gt_dir: Path, pred_dir: Path, group: int
) -> List[Tuple[Floorplan, object]]:
    pairs = []
    for gt_path in sorted(Path(gt_dir).glob("*.json")):
        try:
            gt = load_floorplan(gt_path)
        except EdgeplanError as e:
            logger.warning(f"Skipping unreadable scene {gt_path.name}: {e.detail}")
            continue
        if gt.scene_id is None:
            gt = gt.copy(update={"scene_id": gt_path.stem})

        pred_path = Path(pred_dir) / gt_path.name
        if pred_path.is_file():
            try:
                pred = load_any_prediction(pred_path, group)
            except EdgeplanError as e:
                logger.warning(
                    f"Skipping unreadable prediction {pred_path.name}: {e.detail}"
                )
                continue
        else:
            logger.warning(
                f"No prediction for scene {gt_path.stem}, scoring it as empty"
            )
            pred = []
        pairs.append((gt, pred))
    return pairs


def _scene_table(report) -> str:
    rows = [
        f"{'scene':<24} {'room f1':>8} {'corner f1':>10} "
        f"{'angle f1':>9} {'iou':>7}"
    ]
    for s in report.scenes:
        rows.append(
            f"{str(s.scene_id):<24} {s.room.f1 * 100:>8.1f} {s.corner.f1 * 100:>10.1f} "
            f"{s.angle.f1 * 100:>9.1f} {s.room_iou * 100:>7.1f}"
        )
    return "\n".join(rows)


@click.group(help=docs.main_doc)
@click.option("--verbose", is_flag=True, help="Log debug diagnostics to stderr")
def main(verbose):
    """Entry point installed as ``edgeplan``."""
    configure_logger("DEBUG" if verbose else None)


@main.command(name="project", help=docs.project_doc)
@click.argument("cloud", type=click.Path(dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@click.option("--res", default=settings.raster_resolution, show_default=True, type=int)
@click.option("--bounds", nargs=4, type=float, default=None, help="x0 y0 x1 y1")
@click.option("--margin", default=settings.bbox_margin, show_default=True, type=float)
@click.option("--z-range", nargs=2, type=float, default=None, help="zmin zmax")
@handle_errors
def project_cmd(cloud, output, res, bounds, margin, z_range):
    dmap = project(
        read_xyz(cloud),
        width=res,
        height=res,
        bounds=Bounds.from_tuple(bounds) if bounds else None,
        margin=margin,
        z_range=tuple(z_range) if z_range else None,
    )
    write_density_pgm(dmap, output)
    _emit(
        {
            "width": dmap.width,
            "height": dmap.height,
            "max_count": dmap.max_count,
            "bounds": list(dmap.bounds.as_tuple()),
        }
    )


@main.command(help=docs.polygonize_doc)
@click.argument("pred", type=click.Path(dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@click.option("--eps", default=settings.polygon_eps, show_default=True, type=float)
@click.option(
    "--threshold", default=settings.confidence_threshold, show_default=True, type=float
)
@click.option("--group", default=0, show_default=True, type=int)
@handle_errors
def polygonize(pred, output, eps, threshold, group):
    loaded = load_any_prediction(pred, group)
    if isinstance(loaded, PredictionSet):
        polys = floorplan_to_polygons(loaded.to_floorplan(threshold), eps)
        scene_id = loaded.scene_id
    else:
        polys, scene_id = loaded, None
    save_polygons(polys, output, scene_id=scene_id)
    _emit({"polygons": len(polys), "eps": eps})


@main.command(help=docs.match_doc)
@click.argument("gt", type=click.Path(dir_okay=False))
@click.argument("pred", type=click.Path(dir_okay=False))
@click.option(
    "--lambda-cls", default=settings.lambda_cls, show_default=True, type=float
)
@click.option("--allow-reverse", is_flag=True, help="Also scan reversed traversal")
@handle_errors
def match(gt, pred, lambda_cls, allow_reverse):
    result = match_floorplans(
        load_floorplan(gt), _prediction_set(pred), lambda_cls, allow_reverse
    )
    payload = result.dict()
    payload["total_cost"] = result.total_cost
    _emit(payload)


@main.command(help=docs.loss_doc)
@click.argument("gt", type=click.Path(dir_okay=False))
@click.argument("pred", type=click.Path(dir_okay=False))
@click.option(
    "--lambda-cls", default=settings.lambda_cls, show_default=True, type=float
)
@click.option(
    "--lambda-edge", default=settings.lambda_edge, show_default=True, type=float
)
@click.option(
    "--lambda-ras", default=settings.lambda_ras, show_default=True, type=float
)
@click.option(
    "--lambda-cls-dn", default=settings.lambda_cls_dn, show_default=True, type=float
)
@click.option(
    "--lambda-edge-dn", default=settings.lambda_edge_dn, show_default=True, type=float
)
@click.option("--dn", type=click.Path(dir_okay=False), default=None)
@click.option("--eps", default=settings.polygon_eps, show_default=True, type=float)
@click.option("--res", default=settings.raster_resolution, show_default=True, type=int)
@handle_errors
def loss(
    gt,
    pred,
    lambda_cls,
    lambda_edge,
    lambda_ras,
    lambda_cls_dn,
    lambda_edge_dn,
    dn,
    eps,
    res,
):
    weights = _options_model(
        LossWeights,
        lambda_cls=lambda_cls,
        lambda_edge=lambda_edge,
        lambda_ras=lambda_ras,
        lambda_cls_dn=lambda_cls_dn,
        lambda_edge_dn=lambda_edge_dn,
    )
    gt_fp = load_floorplan(gt)
    pred_set = _prediction_set(pred)
    result = match_floorplans(gt_fp, pred_set, weights.lambda_cls)

    dn_pred = load_perturbed(dn).as_predictions() if dn else None
    breakdown = total_loss(
        gt_fp,
        pred_set,
        result,
        dn_gt=gt_fp if dn else None,
        dn_pred=dn_pred,
        weights=weights,
        eps=eps,
        resolution=res,
    )
    _emit(breakdown.dict())


@main.command(name="perturb", help=docs.perturb_doc)
@click.argument("gt", type=click.Path(dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@click.option(
    "--lambda",
    "lambda_geo",
    default=settings.noise_lambda,
    show_default=True,
    type=float,
)
@click.option("--gamma", default=settings.noise_gamma, show_default=True, type=float)
@click.option("--seed", default=None, type=int)
@click.option("--groups", default=settings.noise_groups, show_default=True, type=int)
@handle_errors
def perturb_cmd(gt, output, lambda_geo, gamma, seed, groups):
    gt_fp = load_floorplan(gt)
    cfg = NoiseConfig(lambda_geo=lambda_geo, gamma_flip=gamma, seed=seed, groups=groups)
    queries = perturb(gt_fp, cfg)
    save_perturbed(queries, output)
    _emit({"groups": queries.n_groups, "flip_rate": flip_rate(queries, gt_fp)})


def _metric_options(f):
    options = [
        click.option(
            "--iou", default=settings.room_iou_min, show_default=True, type=float
        ),
        click.option(
            "--corner-px",
            default=settings.corner_dist_max,
            show_default=True,
            type=float,
        ),
        click.option(
            "--angle-deg", default=settings.angle_tol_deg, show_default=True, type=float
        ),
        click.option(
            "--res", default=settings.raster_resolution, show_default=True, type=int
        ),
        click.option(
            "--matcher",
            default=Matcher.GREEDY.value,
            show_default=True,
            type=click.Choice([m.value for m in Matcher]),
        ),
        click.option(
            "--threshold",
            default=settings.confidence_threshold,
            show_default=True,
            type=float,
        ),
        click.option("--group", default=0, show_default=True, type=int),
    ]
    for option in reversed(options):
        f = option(f)
    return f


@main.command(help=docs.evaluate_doc)
@click.argument("gt_dir", type=click.Path(file_okay=False, exists=True))
@click.argument("pred_dir", type=click.Path(file_okay=False, exists=True))
@click.option("--eps", default=settings.polygon_eps, show_default=True, type=float)
@click.option("--workers", default=settings.eval_workers, show_default=True, type=int)
@_metric_options
@handle_errors
def evaluate(
    gt_dir,
    pred_dir,
    eps,
    workers,
    iou,
    corner_px,
    angle_deg,
    res,
    matcher,
    threshold,
    group,
):
    thresholds = _options_model(
        MetricThresholds,
        room_iou_min=iou,
        corner_dist_max=corner_px,
        angle_tol_deg=angle_deg,
    )
    pairs = _scene_pairs(gt_dir, pred_dir, group)
    run = functools.partial(
        evaluate_dataset,
        pairs,
        workers,
        eps=eps,
        thresholds=thresholds,
        resolution=res,
        matcher=Matcher(matcher),
        threshold=threshold,
    )
    report = anyio.run(run)
    click.echo(_scene_table(report), err=True)
    _emit(report.to_dict(percent=True))


@main.command(help=docs.render_doc)
@click.argument("polys", type=click.Path(dir_okay=False))
@click.option("--bg", type=click.Path(dir_okay=False), default=None)
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@handle_errors
def render(polys, bg, output):
    polygons = load_polygons(polys)
    render_svg(polygons, read_density_pgm(bg) if bg else None, output)
    _emit({"polygons": len(polygons), "output": str(output)})


@main.command(help=docs.validate_doc)
@click.argument("gt", type=click.Path(dir_okay=False))
@handle_errors
def validate(gt):
    violations = validate_floorplan(load_floorplan(gt))
    _emit([v.dict() for v in violations])
    if violations:
        sys.exit(1)


@main.command(name="sweep-eps", help=docs.sweep_eps_doc)
@click.argument("gt_dir", type=click.Path(file_okay=False, exists=True))
@click.argument("pred_dir", type=click.Path(file_okay=False, exists=True))
@click.option(
    "--eps",
    "eps_values",
    multiple=True,
    type=float,
    default=SWEEP_EPS,
    show_default=True,
)
@_metric_options
@handle_errors
def sweep_eps(
    gt_dir,
    pred_dir,
    eps_values,
    iou,
    corner_px,
    angle_deg,
    res,
    matcher,
    threshold,
    group,
):
    thresholds = _options_model(
        MetricThresholds,
        room_iou_min=iou,
        corner_dist_max=corner_px,
        angle_tol_deg=angle_deg,
    )
    pairs = _scene_pairs(gt_dir, pred_dir, group)
    rows = []
    for eps in eps_values:
        report = aggregate(
            evaluate_scene(
                gt,
                pred,
                eps=eps,
                thresholds=thresholds,
                resolution=res,
                matcher=Matcher(matcher),
                threshold=threshold,
            )
            for gt, pred in pairs
        )
        rows.append({"eps": eps, **report.micro.to_dict(percent=True)})
    _emit(rows)


if __name__ == "__main__":
    main()
