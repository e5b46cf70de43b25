from decouple import config


class _EdgeplanConfig:
    def __init__(self) -> None:
        self.max_rooms = config("max_rooms", default=20, cast=int)
        self.max_edges = config("max_edges", default=40, cast=int)
        self.raster_resolution = config("raster_resolution", default=256, cast=int)
        self.polygon_eps = config("polygon_eps", default=0.1, cast=float)
        self.confidence_threshold = config(
            "confidence_threshold", default=0.5, cast=float
        )

        self.lambda_cls = config("lambda_cls", default=0.6, cast=float)
        self.lambda_edge = config("lambda_edge", default=6.0, cast=float)
        self.lambda_ras = config("lambda_ras", default=1.0, cast=float)
        self.lambda_cls_dn = config("lambda_cls_dn", default=0.6, cast=float)
        self.lambda_edge_dn = config("lambda_edge_dn", default=6.0, cast=float)

        self.noise_lambda = config("noise_lambda", default=0.4, cast=float)
        self.noise_gamma = config("noise_gamma", default=0.2, cast=float)
        self.noise_groups = config("noise_groups", default=1, cast=int)

        self.bbox_margin = config("bbox_margin", default=0.05, cast=float)

        self.room_iou_min = config("room_iou_min", default=0.7, cast=float)
        self.corner_dist_max = config("corner_dist_max", default=10.0, cast=float)
        self.angle_tol_deg = config("angle_tol_deg", default=5.0, cast=float)

        self.eval_workers = config("eval_workers", default=4, cast=int)

        self.log_level = config("log_level", default="INFO", cast=str)
        self.log_file = config("log_file", default="", cast=str)


settings = _EdgeplanConfig()
