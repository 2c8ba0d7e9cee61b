"""Synthetic identity corpora with a controllable distribution shift."""

from .corpus import (PUBLIC_ID_BASE, DatasetManifest, load_dataset,
                     make_private_dataset, make_public_dataset, save_dataset)
from .ppm import image_grid, to_uint8, write_ppm, write_ppm_grid
from .render import (IMAGE_SIZE, IdentitySpec, ShiftConfig, identity_spec,
                     render_identity_image, rotate_palette)

__all__ = [
    "DatasetManifest", "IMAGE_SIZE", "IdentitySpec", "PUBLIC_ID_BASE",
    "ShiftConfig", "identity_spec", "image_grid", "load_dataset",
    "make_private_dataset", "make_public_dataset", "render_identity_image",
    "rotate_palette", "save_dataset", "to_uint8", "write_ppm",
    "write_ppm_grid",
]
