import numpy as np
from loguru import logger

from edgeplan.core.exceptions import CapacityMismatch
from edgeplan.core.models import DirectedEdge, EdgeToken, Floorplan, RoomEdgeSequence
from edgeplan.denoising.exceptions import InvalidConfig
from edgeplan.denoising.models import AttentionMask, NoiseConfig, PerturbedQuerySet


def _noised_copy(gt: Floorplan, coords, labels, cfg: NoiseConfig, rng, w, h):
    m, n = labels.shape

    # one draw per (room, edge, endpoint, axis), C order
    half = np.array([cfg.lambda_geo * w / 2.0, cfg.lambda_geo * h / 2.0])
    low = np.nextafter(-half, 0.0)
    delta_px = rng.uniform(low, half, size=(m, n, 2, 2))
    delta = (delta_px / np.array([w, h])).reshape(m, n, 4)
    flips = rng.random((m, n)) < cfg.gamma_flip

    valid = labels == 1.0
    delta[~valid] = 0.0
    flips &= valid

    moved = np.clip(coords + delta, 0.0, 1.0)

    rooms = []
    for i, room in enumerate(gt.rooms):
        tokens = []
        for j, token in enumerate(room.tokens):
            if not valid[i, j]:
                tokens.append(token)
                continue
            x1, y1, x2, y2 = moved[i, j]
            tokens.append(
                EdgeToken(
                    edge=DirectedEdge.from_coords(
                        float(x1), float(y1), float(x2), float(y2)
                    ),
                    validity=0 if flips[i, j] else 1,
                )
            )
        rooms.append(RoomEdgeSequence(tokens=tokens))

    copy = Floorplan(rooms=rooms, scene_id=gt.scene_id, metadata=gt.metadata)
    return copy, delta, flips


def perturb(
    gt: Floorplan,
    cfg: NoiseConfig = None,
    image_w: float = 1.0,
    image_h: float = 1.0,
) -> PerturbedQuerySet:
    """Build ``cfg.groups`` noised copies of the ground-truth edge tokens.

    Each valid endpoint moves by an independent uniform offset with
    ``|dx| < lambda * w / 2`` and ``|dy| < lambda * h / 2`` in image units,
    then is clamped to the image. Valid labels flip with probability
    ``gamma``; padding is copied untouched. Equal seeds give equal output.
    """
    if cfg is None:
        cfg = NoiseConfig.from_settings()
    if not image_w > 0:
        raise InvalidConfig("image_w", image_w)
    if not image_h > 0:
        raise InvalidConfig("image_h", image_h)

    rng = np.random.default_rng(cfg.seed)
    coords = np.stack([room.coords() for room in gt.rooms])
    labels = np.stack([room.labels() for room in gt.rooms])

    groups = []
    displacements = []
    flipped = []
    for _ in range(cfg.groups):
        copy, delta, flips = _noised_copy(
            gt, coords, labels, cfg, rng, image_w, image_h
        )
        groups.append(copy)
        displacements.append(delta)
        flipped.append(flips)

    flipped = np.stack(flipped)
    logger.debug(
        f"Perturbed scene {gt.scene_id}: {cfg.groups} group(s), "
        f"{int(flipped.sum())} flipped label(s)"
    )
    return PerturbedQuerySet(
        groups=groups,
        displacements=np.stack(displacements),
        flipped=flipped,
        config=cfg,
    )


def build_attention_mask(
    n_perturbed_groups: int, tokens_per_group: int, n_latent: int
) -> AttentionMask:
    """Mask over ``[group 0 | ... | group G-1 | latent]``.

    Perturbed tokens see their own group only, latent tokens see every
    latent token and nothing else.
    """
    for name, value in (
        ("n_perturbed_groups", n_perturbed_groups),
        ("tokens_per_group", tokens_per_group),
        ("n_latent", n_latent),
    ):
        if value < 0:
            raise InvalidConfig(name, value)

    n_perturbed = n_perturbed_groups * tokens_per_group
    size = n_perturbed + n_latent
    allowed = np.zeros((size, size), dtype=bool)

    for g in range(n_perturbed_groups):
        lo = g * tokens_per_group
        hi = lo + tokens_per_group
        allowed[lo:hi, lo:hi] = True
    allowed[n_perturbed:, n_perturbed:] = True

    return AttentionMask(
        allowed=allowed,
        n_groups=n_perturbed_groups,
        tokens_per_group=tokens_per_group,
        n_latent=n_latent,
    )


def flip_rate(queries: PerturbedQuerySet, gt: Floorplan) -> float:
    """Fraction of ground-truth valid tokens whose noised label differs."""
    if queries.capacity != gt.capacity:
        raise CapacityMismatch(gt.capacity.as_tuple(), queries.capacity.as_tuple())

    labels = np.stack([room.labels() for room in gt.rooms])
    valid = labels == 1.0
    total = int(valid.sum()) * queries.n_groups
    if total == 0:
        return 0.0

    changed = 0
    for copy in queries.groups:
        noised = np.stack([room.labels() for room in copy.rooms])
        changed += int((noised[valid] != labels[valid]).sum())
    return changed / total
